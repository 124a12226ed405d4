//! Unextendible product bases: validation, the partition criterion, tensor
//! products, the entanglement-breaking map they induce, and `p = 0`
//! additivity evidence for two uses of that map.
//!
//! An orthogonal product set `{a_i ⊗ b_i}` is extendible iff its members can
//! be split into `S₁, S₂` with `rank{a_i : i ∈ S₁} < d_A` and
//! `rank{b_i : i ∈ S₂} < d_B`; any `α ⊥ S₁` and `β ⊥ S₂` then give a product
//! vector `α ⊗ β` orthogonal to every member.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::cvec;
use crate::maxoverlap::{max_product_overlap, SeesawOptions};
use crate::minentropy::{descend, min_output_renyi_map, MinEntropyOptions, Objective, OutputMap};
use crate::renyi::RenyiOrder;
use crate::scalar::{cr, inner, vec_norm, CMat, CVec, Real, C};
use crate::subspace::Subspace;
use crate::tensor::{kron_vec, matrix_rank, random_vector, seeded_rng, PureState};

/// Largest member count enumerated exhaustively by the partition criterion.
pub const PARTITION_BUDGET: usize = 22;
/// Singular-value threshold for local ranks.
pub const RANK_EPS: f64 = 1e-9;
/// A complement overlap below `1 − COMPLEMENT_MARGIN` counts as evidence of
/// no product vector.
pub const COMPLEMENT_MARGIN: f64 = 1e-4;
/// Smallest normalized output eigenvalue accepted as full rank.
pub const FULL_RANK_EPS: f64 = 1e-6;

const ORTHOGONALITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ProductMember<T: Real> {
    pub a: CVec<T>,
    pub b: CVec<T>,
}

impl<T: Real> ProductMember<T> {
    pub fn vector(&self) -> CVec<T> {
        kron_vec(&self.a, &self.b)
    }
}

/// Pairwise orthogonal normalized product vectors in `C^dA ⊗ C^dB`.
#[derive(Clone, Debug)]
pub struct ProductBasis<T: Real> {
    d_a: usize,
    d_b: usize,
    members: Vec<ProductMember<T>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MemberDocument<T: Real> {
    #[serde(with = "cvec")]
    pub a: CVec<T>,
    #[serde(with = "cvec")]
    pub b: CVec<T>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ProductBasisDocument<T: Real> {
    #[serde(rename = "d_A")]
    pub d_a: usize,
    #[serde(rename = "d_B")]
    pub d_b: usize,
    pub members: Vec<MemberDocument<T>>,
}

fn normalize<T: Real>(v: CVec<T>, what: &str) -> Result<CVec<T>> {
    let n = vec_norm(&v);
    if n <= T::tol(1e-14) {
        return Err(Error::InvalidArgument(format!("zero {what} vector")));
    }
    // Unit vectors are kept bit-exact so documents round-trip.
    if (n - T::one()).abs() <= T::lit(4.0) * T::default_epsilon() {
        return Ok(v);
    }
    Ok(v.unscale(n))
}

impl<T: Real> ProductBasis<T> {
    /// Normalizes each factor and checks pairwise orthogonality.
    pub fn new(d_a: usize, d_b: usize, pairs: Vec<(CVec<T>, CVec<T>)>) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::DimensionMismatch("local dimensions must be positive".into()));
        }
        let mut members = Vec::with_capacity(pairs.len());
        for (i, (a, b)) in pairs.into_iter().enumerate() {
            if a.len() != d_a || b.len() != d_b {
                return Err(Error::DimensionMismatch(format!(
                    "member {i} has factors of length ({}, {}), expected ({d_a}, {d_b})",
                    a.len(),
                    b.len()
                )));
            }
            members.push(ProductMember { a: normalize(a, "A")?, b: normalize(b, "B")? });
        }
        let tol = T::tol(ORTHOGONALITY_TOL);
        for (i, j) in (0..members.len()).tuple_combinations() {
            let (x, y) = (&members[i], &members[j]);
            let overlap = (inner(&x.a, &y.a) * inner(&x.b, &y.b)).norm_sqr().sqrt();
            if overlap > tol {
                return Err(Error::NotOrthogonal(i, j, overlap.as_f64()));
            }
        }
        Ok(Self { d_a, d_b, members })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ProductMember<T>] {
        &self.members
    }

    /// Members as `(A state, B state)` pairs.
    pub fn states(&self) -> Vec<(PureState<T>, PureState<T>)> {
        self.members
            .iter()
            .map(|m| {
                (
                    PureState::normalized(m.a.clone(), vec![self.d_a]).expect("normalized"),
                    PureState::normalized(m.b.clone(), vec![self.d_b]).expect("normalized"),
                )
            })
            .collect()
    }

    /// Member vectors as columns.
    pub fn matrix(&self) -> CMat<T> {
        let mut m = CMat::<T>::zeros(self.d_a * self.d_b, self.len());
        for (j, mem) in self.members.iter().enumerate() {
            m.set_column(j, &mem.vector());
        }
        m
    }

    /// The span of the members.
    pub fn span(&self) -> Result<Subspace<T>> {
        Subspace::new(self.d_a, self.d_b, self.matrix())
    }

    /// The orthogonal complement of the span, or `None` for a complete basis.
    pub fn complement(&self) -> Result<Option<Subspace<T>>> {
        if self.len() == self.d_a * self.d_b {
            return Ok(None);
        }
        self.span()?.complement().map(Some)
    }

    /// The basis with members reordered by `order`.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() || order.iter().any(|&i| i >= self.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidArgument(format!("{order:?} is not a permutation of the members")));
        }
        Ok(Self { d_a: self.d_a, d_b: self.d_b, members: order.iter().map(|&i| self.members[i].clone()).collect() })
    }

    /// Drops one member.
    pub fn without(&self, index: usize) -> Result<Self> {
        if index >= self.len() {
            return Err(Error::InvalidArgument(format!("no member {index}")));
        }
        let mut members = self.members.clone();
        members.remove(index);
        Ok(Self { d_a: self.d_a, d_b: self.d_b, members })
    }

    pub fn to_document(&self) -> ProductBasisDocument<T> {
        ProductBasisDocument {
            d_a: self.d_a,
            d_b: self.d_b,
            members: self.members.iter().map(|m| MemberDocument { a: m.a.clone(), b: m.b.clone() }).collect(),
        }
    }

    pub fn from_document(doc: ProductBasisDocument<T>) -> Result<Self> {
        Self::new(doc.d_a, doc.d_b, doc.members.into_iter().map(|m| (m.a, m.b)).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(text)?)
    }
}

fn basis_vec<T: Real>(d: usize, coeffs: &[f64]) -> CVec<T> {
    assert_eq!(coeffs.len(), d);
    CVec::from_iterator(d, coeffs.iter().map(|&x| cr(x)))
}

/// The five tiles states on `C³ ⊗ C³`.
pub fn tiles_upb<T: Real>() -> ProductBasis<T> {
    let v = |c: [f64; 3]| basis_vec::<T>(3, &c);
    let pairs = vec![
        (v([1.0, 0.0, 0.0]), v([1.0, -1.0, 0.0])),
        (v([0.0, 0.0, 1.0]), v([0.0, 1.0, -1.0])),
        (v([1.0, -1.0, 0.0]), v([0.0, 0.0, 1.0])),
        (v([0.0, 1.0, -1.0]), v([1.0, 0.0, 0.0])),
        (v([1.0, 1.0, 1.0]), v([1.0, 1.0, 1.0])),
    ];
    ProductBasis::new(3, 3, pairs).expect("tiles states are orthogonal")
}

/// All products `(a_i ⊗ a'_j) ⊗ (b_i ⊗ b'_j)`, indexed `i·|u2| + j`.
pub fn tensor_upb<T: Real>(u1: &ProductBasis<T>, u2: &ProductBasis<T>) -> ProductBasis<T> {
    let members = u1
        .members
        .iter()
        .cartesian_product(&u2.members)
        .map(|(x, y)| ProductMember { a: kron_vec(&x.a, &y.a), b: kron_vec(&x.b, &y.b) })
        .collect();
    ProductBasis { d_a: u1.d_a * u2.d_a, d_b: u1.d_b * u2.d_b, members }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericityReport {
    pub generic: bool,
    /// First `d`-subset (in lexicographic order) that is rank deficient.
    pub failing_subset: Option<Vec<usize>>,
    /// `"A"` or `"B"`, the side where the failing subset lacks full rank.
    pub failing_side: Option<&'static str>,
}

fn local_rank<T: Real>(vectors: &[&CVec<T>], dim: usize) -> usize {
    let mut m = CMat::<T>::zeros(dim, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    matrix_rank(&m, T::lit(RANK_EPS))
}

/// Checks that every `d`-subset of product vectors has full local rank on
/// both sides. Orthogonality is not required.
pub fn genericity_check_members<T: Real>(members: &[ProductMember<T>], d: usize) -> Result<GenericityReport> {
    if d < 2 || members.len() != 2 * (d - 1) + 1 {
        return Err(Error::InvalidArgument(format!(
            "genericity needs 2(d-1)+1 = {} members for d = {d}, got {}",
            2 * d.max(1) - 1,
            members.len()
        )));
    }
    if members.iter().any(|m| m.a.len() != d || m.b.len() != d) {
        return Err(Error::DimensionMismatch(format!("genericity needs {d}x{d} members")));
    }
    for subset in (0..members.len()).combinations(d) {
        let a: Vec<&CVec<T>> = subset.iter().map(|&i| &members[i].a).collect();
        let b: Vec<&CVec<T>> = subset.iter().map(|&i| &members[i].b).collect();
        let side = if local_rank(&a, d) < d {
            Some("A")
        } else if local_rank(&b, d) < d {
            Some("B")
        } else {
            None
        };
        if side.is_some() {
            return Ok(GenericityReport { generic: false, failing_subset: Some(subset), failing_side: side });
        }
    }
    Ok(GenericityReport { generic: true, failing_subset: None, failing_side: None })
}

/// [`genericity_check_members`] for a validated basis on `C^d ⊗ C^d`.
pub fn genericity_check<T: Real>(pb: &ProductBasis<T>, d: usize) -> Result<GenericityReport> {
    if pb.d_a != d || pb.d_b != d {
        return Err(Error::DimensionMismatch(format!("basis is {}x{}, not {d}x{d}", pb.d_a, pb.d_b)));
    }
    genericity_check_members(&pb.members, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpbMethod {
    PartitionExhaustive,
    SeesawEvidence,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpbDiagnostic {
    /// A split whose `A` side and `B` side are both rank deficient, giving an
    /// extending product vector.
    ExtendingPartition { alice: Vec<usize>, bob: Vec<usize> },
    /// Every split has a full-rank side.
    NoExtendingPartition { partitions_examined: u64 },
    /// Largest product overlap found with the complement.
    MaxComplementOverlap(f64),
    /// The members span the whole space.
    Complete,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpbCertificate {
    pub is_unextendible: bool,
    pub method: UpbMethod,
    pub diagnostic: UpbDiagnostic,
}

/// Orthonormal set extended by Gram-Schmidt; `rank` counts accepted vectors.
#[derive(Clone)]
struct Span<T: Real> {
    vectors: Vec<CVec<T>>,
}

impl<T: Real> Span<T> {
    fn new() -> Self {
        Self { vectors: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.vectors.len()
    }

    fn with(&self, v: &CVec<T>) -> Self {
        let mut r = v.clone();
        for _ in 0..2 {
            for u in &self.vectors {
                r -= u * inner(u, &r);
            }
        }
        let mut out = self.clone();
        let n = vec_norm(&r);
        if n > T::lit(RANK_EPS) {
            out.vectors.push(r.unscale(n));
        }
        out
    }
}

struct Search<'a, T: Real> {
    members: &'a [ProductMember<T>],
    d_a: usize,
    d_b: usize,
}

impl<T: Real> Search<'_, T> {
    /// Depth-first over assignments of members `idx..` given the current
    /// spans; returns the `A`-side mask of an extending split. Branches where
    /// either side already has full rank cannot extend and are cut.
    fn dfs(&self, idx: usize, mask: u64, sa: &Span<T>, sb: &Span<T>, visited: &mut u64) -> Option<u64> {
        *visited += 1;
        if sa.rank() == self.d_a || sb.rank() == self.d_b {
            return None;
        }
        if idx == self.members.len() {
            return Some(mask);
        }
        let m = &self.members[idx];
        self.dfs(idx + 1, mask | (1 << idx), &sa.with(&m.a), sb, visited)
            .or_else(|| self.dfs(idx + 1, mask, sa, &sb.with(&m.b), visited))
    }

    /// Replays a prefix assignment, returning the spans it produces.
    fn prefix(&self, depth: usize, mask: u64) -> (Span<T>, Span<T>) {
        let (mut sa, mut sb) = (Span::new(), Span::new());
        for (i, m) in self.members[..depth].iter().enumerate() {
            if mask & (1 << i) != 0 {
                sa = sa.with(&m.a);
            } else {
                sb = sb.with(&m.b);
            }
        }
        (sa, sb)
    }
}

fn exhaustive<T: Real>(pb: &ProductBasis<T>) -> UpbCertificate {
    let search = Search { members: &pb.members, d_a: pb.d_a, d_b: pb.d_b };
    let depth = pb.len().min(4);
    let outcomes: Vec<(Option<u64>, u64)> = (0..1u64 << depth)
        .into_par_iter()
        .map(|prefix| {
            let (sa, sb) = search.prefix(depth, prefix);
            let mut visited = 0;
            let found = search.dfs(depth, prefix, &sa, &sb, &mut visited);
            (found, visited)
        })
        .collect();
    let partitions_examined = outcomes.iter().map(|o| o.1).sum();
    let diagnostic = match outcomes.iter().find_map(|o| o.0) {
        Some(mask) => {
            let (alice, bob): (Vec<usize>, Vec<usize>) = (0..pb.len()).partition(|&i| mask & (1 << i) != 0);
            UpbDiagnostic::ExtendingPartition { alice, bob }
        }
        None => UpbDiagnostic::NoExtendingPartition { partitions_examined },
    };
    UpbCertificate {
        is_unextendible: matches!(diagnostic, UpbDiagnostic::NoExtendingPartition { .. }),
        method: UpbMethod::PartitionExhaustive,
        diagnostic,
    }
}

/// Decides unextendibility exactly for up to [`PARTITION_BUDGET`] members and
/// by seesaw evidence on the complement beyond that.
pub fn is_upb_partition_criterion<T: Real>(pb: &ProductBasis<T>, opts: &SeesawOptions) -> Result<UpbCertificate> {
    if pb.len() <= PARTITION_BUDGET {
        return Ok(exhaustive(pb));
    }
    let Some(comp) = pb.complement()? else {
        return Ok(UpbCertificate { is_unextendible: true, method: UpbMethod::SeesawEvidence, diagnostic: UpbDiagnostic::Complete });
    };
    let overlap = no_product_vector_evidence(&comp, opts)?;
    Ok(UpbCertificate {
        is_unextendible: overlap < 1.0 - COMPLEMENT_MARGIN,
        method: UpbMethod::SeesawEvidence,
        diagnostic: UpbDiagnostic::MaxComplementOverlap(overlap),
    })
}

/// Exhaustive partition criterion only; errors past the budget.
pub fn partition_criterion_exhaustive<T: Real>(pb: &ProductBasis<T>) -> Result<UpbCertificate> {
    if pb.len() > PARTITION_BUDGET {
        return Err(Error::PartitionBudget { members: pb.len(), budget: PARTITION_BUDGET });
    }
    Ok(exhaustive(pb))
}

/// Largest product overlap found with the projector onto `s`. Values bounded
/// away from 1 are numerical evidence, not proof, that `s` has no product
/// vector.
pub fn no_product_vector_evidence<T: Real>(s: &Subspace<T>, opts: &SeesawOptions) -> Result<f64> {
    Ok(max_product_overlap(&s.projector(), s.d_a(), s.d_b(), opts)?.value.as_f64())
}

/// The entanglement-breaking map whose Choi operator is the projector onto
/// the span of a product basis: `Λ₀(ρ) ∝ Σ_i ⟨ā_i|ρ|ā_i⟩ |b_i⟩⟨b_i|`.
#[derive(Clone, Debug)]
pub struct UpbMap<T: Real> {
    d_a: usize,
    d_b: usize,
    /// Rows `a_iᵀ`, so that `(A x)_i = ⟨ā_i|x⟩`.
    a_rows: CMat<T>,
    b_projectors: Vec<CMat<T>>,
}

impl<T: Real> UpbMap<T> {
    pub fn new(pb: &ProductBasis<T>) -> Self {
        let mut a_rows = CMat::<T>::zeros(pb.len(), pb.d_a);
        for (i, m) in pb.members.iter().enumerate() {
            a_rows.set_row(i, &m.a.transpose());
        }
        let b_projectors = pb.members.iter().map(|m| &m.b * m.b.adjoint()).collect();
        Self { d_a: pb.d_a, d_b: pb.d_b, a_rows, b_projectors }
    }

    fn combine(&self, weights: impl Iterator<Item = T>) -> CMat<T> {
        let mut out = CMat::<T>::zeros(self.d_b, self.d_b);
        for (w, p) in weights.zip(&self.b_projectors) {
            out += p * C::new(w, T::zero());
        }
        out
    }

    /// Unit-trace output for a density matrix on `C^dA`.
    pub fn apply(&self, rho: &CMat<T>) -> Result<CMat<T>> {
        if rho.nrows() != self.d_a || rho.ncols() != self.d_a {
            return Err(Error::DimensionMismatch(format!("input must be {0}x{0}", self.d_a)));
        }
        let weights = (&self.a_rows * rho * self.a_rows.adjoint()).diagonal();
        let out = self.combine(weights.iter().map(|z| z.re));
        let t = out.trace().re;
        if t <= T::tol(1e-14) {
            return Err(Error::InvalidArgument("input is annihilated by the map".into()));
        }
        Ok(out.unscale(t))
    }
}

impl<T: Real> OutputMap<T> for UpbMap<T> {
    fn input_dim(&self) -> usize {
        self.d_a
    }

    fn output_dim(&self) -> usize {
        self.d_b
    }

    fn output(&self, x: &CVec<T>) -> CMat<T> {
        let c = &self.a_rows * x;
        self.combine(c.iter().map(|z| z.norm_sqr()))
    }

    fn pullback(&self, x: &CVec<T>, g: &CMat<T>) -> CVec<T> {
        let c = &self.a_rows * x;
        let gw = CVec::<T>::from_iterator(
            c.len(),
            self.b_projectors.iter().zip(c.iter()).map(|(p, &ci)| ci * (p * g).trace().re),
        );
        self.a_rows.adjoint() * gw
    }
}

/// Smallest normalized output eigenvalue found by descent from random pure
/// inputs; an attained value, so an upper bound on the true minimum.
pub fn min_output_eigenvalue<T: Real, M: OutputMap<T> + ?Sized>(map: &M, opts: &MinEntropyOptions) -> f64 {
    let restarts = opts.restarts_for(RenyiOrder::Zero);
    (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeded_rng(opts.seed.wrapping_add(r as u64));
            let x0 = random_vector::<T, _>(map.input_dim(), &mut rng);
            descend(map, Objective::MinEigenvalue, x0, opts.tol, opts.max_iter).value.as_f64()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum P0Verdict {
    /// All checks support `S₀` additivity for two copies (numerical evidence).
    AdditiveEvidence,
    /// Some check failed.
    NotSupported,
    /// The basis is extendible, so the pipeline does not apply.
    NotUpb,
}

#[derive(Clone, Debug, Serialize)]
pub struct CopyEvidence {
    /// `log₂` of the full output rank.
    pub full_rank_entropy: f64,
    /// Least output `S₀` found.
    pub min_s0: f64,
    pub min_output_eigenvalue: f64,
    /// Largest product overlap found with the complement of the member span.
    pub complement_overlap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct P0AdditivityReport {
    pub members: usize,
    pub certificate: UpbCertificate,
    pub single_copy: Option<CopyEvidence>,
    pub two_copies: Option<CopyEvidence>,
    pub verdict: P0Verdict,
}

fn copy_evidence<T: Real>(pb: &ProductBasis<T>, opts: &MinEntropyOptions) -> Result<CopyEvidence> {
    let map = UpbMap::new(pb);
    let min_s0 = min_output_renyi_map(&map, RenyiOrder::Zero, &[], opts)?.value.as_f64();
    let complement_overlap = match pb.complement()? {
        Some(c) => no_product_vector_evidence(&c, &opts.seesaw())?,
        None => 0.0,
    };
    Ok(CopyEvidence {
        full_rank_entropy: (pb.d_b as f64).log2(),
        min_s0,
        min_output_eigenvalue: min_output_eigenvalue(&map, opts),
        complement_overlap,
    })
}

impl CopyEvidence {
    fn passes(&self) -> bool {
        (self.min_s0 - self.full_rank_entropy).abs() < 1e-9
            && self.min_output_eigenvalue > FULL_RANK_EPS
            && self.complement_overlap < 1.0 - COMPLEMENT_MARGIN
    }
}

/// Evidence that `min S₀` of the UPB map is additive over two copies: full
/// output rank for one and two copies, and no product vector in the
/// complements of the basis and of its tensor square.
pub fn p0_additivity_report<T: Real>(pb: &ProductBasis<T>, opts: &MinEntropyOptions) -> Result<P0AdditivityReport> {
    let certificate = is_upb_partition_criterion(pb, &opts.seesaw())?;
    if !certificate.is_unextendible {
        return Ok(P0AdditivityReport {
            members: pb.len(),
            certificate,
            single_copy: None,
            two_copies: None,
            verdict: P0Verdict::NotUpb,
        });
    }
    let single = copy_evidence(pb, opts)?;
    let double = copy_evidence(&tensor_upb(pb, pb), opts)?;
    let verdict = if single.passes() && double.passes() { P0Verdict::AdditiveEvidence } else { P0Verdict::NotSupported };
    Ok(P0AdditivityReport { members: pb.len(), certificate, single_copy: Some(single), two_copies: Some(double), verdict })
}
