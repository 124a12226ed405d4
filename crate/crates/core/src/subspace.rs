//! Subspaces of `C^dA ⊗ C^dB` and the channels they define by isometric
//! embedding followed by a trace over the `A` factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{from_pairs, matrix_rows};
use crate::scalar::{max_abs, vec_norm, CMat, CVec, Real, C};
use crate::tensor::{self, PureState};

/// Which construction produced a subspace. Only informational, except that
/// antisymmetric subspaces carry a certified single-copy entropy bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SubspaceKind {
    Antisymmetric { d: usize },
    Parthasarathy { d: usize },
    Full,
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T: Real> {
    d_a: usize,
    d_b: usize,
    basis: CMat<T>,
    kind: SubspaceKind,
}

/// On-disk form: `{"d_A", "d_B", "basis"}` with `basis` the `(d_A·d_B) × k`
/// matrix as row-major rows of `[re, im]` pairs.
#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SubspaceDocument<T: Real> {
    #[serde(rename = "d_A")]
    pub d_a: usize,
    #[serde(rename = "d_B")]
    pub d_b: usize,
    pub basis: Vec<Vec<[T; 2]>>,
}

impl<T: Real> Subspace<T> {
    /// `basis` columns must be orthonormal within 1e-10.
    pub fn new(d_a: usize, d_b: usize, basis: CMat<T>) -> Result<Self> {
        Self::with_kind(d_a, d_b, basis, SubspaceKind::Custom)
    }

    fn with_kind(d_a: usize, d_b: usize, basis: CMat<T>, kind: SubspaceKind) -> Result<Self> {
        if d_a == 0 || d_b == 0 || basis.nrows() != d_a * d_b {
            return Err(Error::DimensionMismatch(format!(
                "basis has {} rows, ambient space is {d_a}x{d_b}",
                basis.nrows()
            )));
        }
        let k = basis.ncols();
        if k == 0 || k > d_a * d_b {
            return Err(Error::InvalidArgument(format!("subspace dimension {k} out of range")));
        }
        let dev = max_abs(&(basis.adjoint() * &basis - CMat::<T>::identity(k, k)));
        if dev > T::tol(1e-10) {
            return Err(Error::NotOrthonormal(dev.as_f64()));
        }
        Ok(Self { d_a, d_b, basis, kind })
    }

    /// Orthonormalizes the span of the given column vectors.
    pub fn from_spanning(d_a: usize, d_b: usize, vectors: &CMat<T>) -> Result<Self> {
        if vectors.nrows() != d_a * d_b {
            return Err(Error::DimensionMismatch("spanning vectors have the wrong length".into()));
        }
        Self::new(d_a, d_b, tensor::orthonormal_span(vectors, T::tol(1e-12)))
    }

    /// The whole space `C^dA ⊗ C^dB`.
    pub fn full(d_a: usize, d_b: usize) -> Result<Self> {
        Self::with_kind(d_a, d_b, CMat::<T>::identity(d_a * d_b, d_a * d_b), SubspaceKind::Full)
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn kind(&self) -> SubspaceKind {
        self.kind
    }

    pub fn basis(&self) -> &CMat<T> {
        &self.basis
    }

    /// Basis vector `i` as a state on factors `(A, B)`.
    pub fn vector(&self, i: usize) -> PureState<T> {
        PureState::normalized(self.basis.column(i).into_owned(), vec![self.d_a, self.d_b])
            .expect("orthonormal basis column")
    }

    pub fn projector(&self) -> CMat<T> {
        if self.basis.iter().all(|z| z.im == T::zero()) {
            let r = self.basis.map(|z| z.re);
            return (&r * r.transpose()).map(|x| C::new(x, T::zero()));
        }
        &self.basis * self.basis.adjoint()
    }

    /// Entrywise complex conjugate in the computational product basis.
    pub fn conjugate(&self) -> Self {
        Self { basis: self.basis.map(|z| z.conj()), ..self.clone() }
    }

    pub fn complement(&self) -> Result<Self> {
        let comp = tensor::orthogonal_complement(&self.basis);
        Self::new(self.d_a, self.d_b, comp)
    }

    /// Same subspace with the basis rotated by the unitary `u` (k × k).
    pub fn rotated(&self, u: &CMat<T>) -> Result<Self> {
        Self::with_kind(self.d_a, self.d_b, &self.basis * u, self.kind)
    }

    /// Orthogonal projection of `v` onto the subspace, normalized; `None`
    /// when `v` is orthogonal to it.
    pub fn project(&self, v: &CVec<T>) -> Option<PureState<T>> {
        let coeffs = self.basis.adjoint() * v;
        let n = vec_norm(&coeffs);
        if n <= T::tol(1e-14) {
            return None;
        }
        PureState::normalized(&self.basis * coeffs, vec![self.d_a, self.d_b]).ok()
    }

    pub fn to_document(&self) -> SubspaceDocument<T> {
        SubspaceDocument { d_a: self.d_a, d_b: self.d_b, basis: matrix_rows(&self.basis) }
    }

    pub fn from_document(doc: &SubspaceDocument<T>) -> Result<Self> {
        let n = doc.d_a * doc.d_b;
        if doc.basis.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "basis has {} rows, expected d_A*d_B = {n}",
                doc.basis.len()
            )));
        }
        let k = doc.basis.first().map_or(0, Vec::len);
        if doc.basis.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch("ragged basis rows".into()));
        }
        let flat: Vec<C<T>> = doc.basis.iter().flat_map(|r| from_pairs(r)).collect();
        Self::new(doc.d_a, doc.d_b, CMat::from_row_slice(n, k, &flat))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SubspaceDocument<T> = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }
}

/// Haar-random `k`-dimensional subspace (span of `k` Gaussian vectors).
pub fn random_subspace<T: Real, R: rand::Rng + ?Sized>(
    d_a: usize,
    d_b: usize,
    k: usize,
    rng: &mut R,
) -> Result<Subspace<T>> {
    let n = d_a * d_b;
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("subspace dimension {k} out of range")));
    }
    loop {
        let mut cols = CMat::<T>::zeros(n, k);
        for j in 0..k {
            cols.set_column(j, &crate::tensor::random::random_vector(n, rng));
        }
        let s = Subspace::from_spanning(d_a, d_b, &cols)?;
        if s.dim() == k {
            return Ok(s);
        }
    }
}

/// Haar-random `k × k` unitary.
pub fn random_unitary<T: Real, R: rand::Rng + ?Sized>(k: usize, rng: &mut R) -> CMat<T> {
    let mut cols = CMat::<T>::zeros(k, k);
    for j in 0..k {
        cols.set_column(j, &crate::tensor::random::random_vector(k, rng));
    }
    cols.qr().q()
}

/// Swap operator `V|ij⟩ = |ji⟩` on `C^d ⊗ C^d`.
pub fn swap_operator<T: Real>(d: usize) -> CMat<T> {
    let n = d * d;
    let mut v = CMat::<T>::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            v[(j * d + i, i * d + j)] = C::new(T::one(), T::zero());
        }
    }
    v
}

/// Antisymmetric subspace of `C^d ⊗ C^d`, basis `(|ij⟩ − |ji⟩)/√2` for
/// `i < j` in lexicographic order.
pub fn antisymmetric_subspace<T: Real>(d: usize) -> Result<Subspace<T>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("antisymmetric subspace needs d >= 2, got {d}")));
    }
    let k = d * (d - 1) / 2;
    let s = T::lit(0.5).sqrt();
    let mut basis = CMat::<T>::zeros(d * d, k);
    let mut col = 0;
    for i in 0..d {
        for j in i + 1..d {
            basis[(i * d + j, col)] = C::new(s, T::zero());
            basis[(j * d + i, col)] = C::new(-s, T::zero());
            col += 1;
        }
    }
    Subspace::with_kind(d, d, basis, SubspaceKind::Antisymmetric { d })
}

/// Completely entangled subspace of `C^d ⊗ C^d`: the orthogonal complement
/// of `span{v_λ ⊗ v_λ}` with `v_λ ∝ (1, λ, …, λ^{d−1})` over the nodes
/// `λ = −d, …, d − 2`. Its dimension is `(d − 1)²`.
pub fn parthasarathy_subspace<T: Real>(d: usize) -> Result<Subspace<T>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("Parthasarathy subspace needs d >= 2, got {d}")));
    }
    let nodes = 2 * d - 1;
    let mut span = CMat::<T>::zeros(d * d, nodes);
    for j in 0..nodes {
        let v = moment_vector::<T>(d, T::lit(j as f64 - d as f64));
        span.set_column(j, &tensor::kron_vec(&v, &v));
    }
    let spanned = tensor::orthonormal_span(&span, T::tol(1e-12));
    if spanned.ncols() != nodes {
        return Err(Error::InvalidArgument("moment vectors are numerically dependent".into()));
    }
    let comp = tensor::orthogonal_complement(&spanned);
    Subspace::with_kind(d, d, comp, SubspaceKind::Parthasarathy { d })
}

/// Normalized `(1, λ, λ², …, λ^{d−1})`.
pub fn moment_vector<T: Real>(d: usize, lambda: T) -> CVec<T> {
    let mut v = CVec::<T>::zeros(d);
    let mut x = T::one();
    for i in 0..d {
        v[i] = C::new(x, T::zero());
        x *= lambda;
    }
    let n = vec_norm(&v);
    v.unscale(n)
}

pub fn conjugate_subspace<T: Real>(s: &Subspace<T>) -> Subspace<T> {
    s.conjugate()
}

/// Channel given by an isometry `W: C^k → C^dA ⊗ C^dB` followed by `Tr_A`.
#[derive(Clone, Debug)]
pub struct Channel<T: Real> {
    isometry: CMat<T>,
    d_a: usize,
    d_b: usize,
}

impl<T: Real> Channel<T> {
    pub fn from_isometry(isometry: CMat<T>, d_a: usize, d_b: usize) -> Result<Self> {
        let s = Subspace::new(d_a, d_b, isometry)?;
        Ok(channel_from_subspace(&s))
    }

    pub fn isometry(&self) -> &CMat<T> {
        &self.isometry
    }

    pub fn input_dim(&self) -> usize {
        self.isometry.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.d_b
    }

    pub fn traced_dim(&self) -> usize {
        self.d_a
    }

    /// Output for a pure input given by unnormalized amplitudes.
    pub fn apply_pure(&self, input: &CVec<T>) -> CMat<T> {
        let out = &self.isometry * input;
        let m = CMat::<T>::from_fn(self.d_a, self.d_b, |a, b| out[a * self.d_b + b]);
        // Tr_A|ψ⟩⟨ψ| = Mᵀ M̄.
        m.transpose() * m.map(|z| z.conj())
    }

    /// Output for a general input operator.
    pub fn apply(&self, rho: &CMat<T>) -> Result<CMat<T>> {
        if rho.nrows() != self.input_dim() || rho.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch("input operator has the wrong size".into()));
        }
        let big = &self.isometry * rho * self.isometry.adjoint();
        tensor::partial_trace(&big, &[self.d_a, self.d_b], &[1])
    }

    /// Kraus operators `K_a = (⟨a| ⊗ I) W`, one per basis state of `A`.
    pub fn kraus(&self) -> Vec<CMat<T>> {
        (0..self.d_a)
            .map(|a| self.isometry.rows(a * self.d_b, self.d_b).into_owned())
            .collect()
    }
}

pub fn channel_from_subspace<T: Real>(s: &Subspace<T>) -> Channel<T> {
    Channel { isometry: s.basis.clone(), d_a: s.d_a, d_b: s.d_b }
}

/// Werner–Holevo map `ρ ↦ (I·Tr ρ − ρᵀ)/(d − 1)`.
pub fn werner_holevo_apply<T: Real>(rho: &CMat<T>, d: usize) -> Result<CMat<T>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("Werner-Holevo channel needs d >= 2, got {d}")));
    }
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch(format!("expected a {d}x{d} input")));
    }
    let tr = rho.trace();
    let out = CMat::<T>::identity(d, d) * tr - rho.transpose();
    Ok(out.unscale(T::count(d - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{hermitian_spectrum, is_projector, seeded_rng};

    #[test]
    fn antisymmetric_dimensions() {
        assert_eq!(antisymmetric_subspace::<f64>(2).unwrap().dim(), 1);
        assert_eq!(antisymmetric_subspace::<f64>(3).unwrap().dim(), 3);
        assert!(antisymmetric_subspace::<f64>(1).is_err());
        let singlet = antisymmetric_subspace::<f64>(2).unwrap().vector(0);
        let s = 0.5f64.sqrt();
        let expect = [0.0, s, -s, 0.0];
        for (a, b) in singlet.amplitudes().iter().zip(expect) {
            assert!((a.re - b).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn antisymmetric_projector_is_half_identity_minus_swap() {
        for d in 2..6 {
            let p = antisymmetric_subspace::<f64>(d).unwrap().projector();
            let n = d * d;
            let oracle = (CMat::<f64>::identity(n, n) - swap_operator(d)).scale(0.5);
            assert!(max_abs(&(p - oracle)) < 1e-12);
        }
    }

    #[test]
    fn swap_properties() {
        let v = swap_operator::<f64>(2);
        assert_eq!(v[(1, 2)], C::new(1.0, 0.0));
        assert_eq!(v[(2, 1)], C::new(1.0, 0.0));
        assert_eq!(v[(0, 0)], C::new(1.0, 0.0));
        for d in 1..5 {
            let v = swap_operator::<f64>(d);
            assert_eq!(v.trace(), C::new(d as f64, 0.0));
            assert_eq!(&v * &v, CMat::<f64>::identity(d * d, d * d));
            let spec = hermitian_spectrum(&v).unwrap();
            let plus = spec.iter().filter(|&&x| (x - 1.0).abs() < 1e-10).count();
            let minus = spec.iter().filter(|&&x| (x + 1.0).abs() < 1e-10).count();
            assert_eq!((plus, minus), (d * (d + 1) / 2, d * (d - 1) / 2));
        }
    }

    #[test]
    fn antisymmetric_vectors_are_odd_under_swap() {
        let s = antisymmetric_subspace::<f64>(4).unwrap();
        let v = swap_operator::<f64>(4);
        for i in 0..s.dim() {
            let col = s.basis().column(i).into_owned();
            assert!((&v * &col + &col).norm() < 1e-14);
        }
    }

    #[test]
    fn parthasarathy_dimensions() {
        assert_eq!(parthasarathy_subspace::<f64>(2).unwrap().dim(), 1);
        assert_eq!(parthasarathy_subspace::<f64>(3).unwrap().dim(), 4);
        assert_eq!(parthasarathy_subspace::<f64>(4).unwrap().dim(), 9);
        assert!(parthasarathy_subspace::<f64>(1).is_err());
    }

    #[test]
    fn parthasarathy_orthogonal_to_fresh_moment_products() {
        use rand::Rng;
        let mut rng = seeded_rng(11);
        for d in 2..=5 {
            let s = parthasarathy_subspace::<f64>(d).unwrap();
            for _ in 0..50 {
                let mu: f64 = rng.random_range(-3.0..3.0);
                let v = moment_vector::<f64>(d, mu);
                let w = tensor::kron_vec(&v, &v);
                let overlap = (s.basis().adjoint() * w).norm_squared();
                assert!(overlap < 1e-9, "d={d} mu={mu} overlap={overlap}");
            }
        }
    }

    #[test]
    fn constructed_projectors_are_projectors() {
        let tol = 1e-10;
        assert!(is_projector(&antisymmetric_subspace::<f64>(5).unwrap().projector(), tol));
        assert!(is_projector(&parthasarathy_subspace::<f64>(4).unwrap().projector(), tol));
        let mut rng = seeded_rng(3);
        let r = random_subspace::<f64, _>(3, 4, 5, &mut rng).unwrap();
        assert!(is_projector(&r.projector(), tol));
        assert!(is_projector(&r.complement().unwrap().projector(), tol));
        assert_eq!(r.complement().unwrap().dim(), 7);
    }

    #[test]
    fn conjugation() {
        let a = antisymmetric_subspace::<f64>(3).unwrap();
        assert_eq!(a.conjugate().projector(), a.projector());
        let mut rng = seeded_rng(5);
        let r = random_subspace::<f64, _>(2, 3, 3, &mut rng).unwrap();
        assert_eq!(r.conjugate().conjugate(), r);
        let pc = r.conjugate().projector();
        assert!(max_abs(&(pc - r.projector().map(|z| z.conj()))) < 1e-14);
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let b = CMat::<f64>::from_element(4, 1, C::new(1.0, 0.0));
        assert!(matches!(Subspace::new(2, 2, b), Err(Error::NotOrthonormal(_))));
    }

    #[test]
    fn antisymmetric_channel_outputs() {
        let ch = channel_from_subspace(&antisymmetric_subspace::<f64>(3).unwrap());
        assert_eq!(ch.output_dim(), 3);
        for i in 0..3 {
            let mut x = CVec::<f64>::zeros(3);
            x[i] = C::new(1.0, 0.0);
            let spec = hermitian_spectrum(&ch.apply_pure(&x)).unwrap();
            assert!((spec[0] - 0.5).abs() < 1e-14);
            assert!((spec[1] - 0.5).abs() < 1e-14);
            assert!(spec[2].abs() < 1e-14);
        }
    }

    #[test]
    fn channel_outputs_are_states() {
        let mut rng = seeded_rng(17);
        let s = random_subspace::<f64, _>(3, 3, 4, &mut rng).unwrap();
        let ch = channel_from_subspace(&s);
        for _ in 0..100 {
            let x = crate::tensor::random::random_vector::<f64, _>(4, &mut rng);
            let out = ch.apply_pure(&x);
            assert!((out.trace().re - 1.0).abs() < 1e-12);
            let spec = hermitian_spectrum(&out).unwrap();
            assert!(*spec.last().unwrap() >= -1e-10);
            let general = ch.apply(&(&x * x.adjoint())).unwrap();
            assert!(max_abs(&(general - out)) < 1e-13);
        }
    }

    #[test]
    fn kraus_view_reproduces_channel() {
        let mut rng = seeded_rng(23);
        let s = random_subspace::<f64, _>(2, 3, 3, &mut rng).unwrap();
        let ch = channel_from_subspace(&s);
        let x = crate::tensor::random::random_vector::<f64, _>(3, &mut rng);
        let rho = &x * x.adjoint();
        let via_kraus = ch.kraus().iter().fold(CMat::<f64>::zeros(3, 3), |acc, k| acc + k * &rho * k.adjoint());
        assert!(max_abs(&(via_kraus - ch.apply_pure(&x))) < 1e-13);
    }

    #[test]
    fn werner_holevo_outputs() {
        let mut rng = seeded_rng(29);
        let x = crate::tensor::random::random_vector::<f64, _>(3, &mut rng);
        let out = werner_holevo_apply(&(&x * x.adjoint()), 3).unwrap();
        // Oracle: eigenvalues of (I − ρᵀ)/2 for a rank-one ρ are {1/2, 1/2, 0}.
        let spec = hermitian_spectrum(&out).unwrap();
        assert!((spec[0] - 0.5).abs() < 1e-12 && (spec[1] - 0.5).abs() < 1e-12 && spec[2].abs() < 1e-12);
        let mixed = CMat::<f64>::identity(4, 4).scale(0.25);
        let out = werner_holevo_apply(&mixed, 4).unwrap();
        assert!(max_abs(&(out - &mixed)) < 1e-15);
        assert!(werner_holevo_apply(&mixed, 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = seeded_rng(31);
        let s = random_subspace::<f64, _>(2, 2, 2, &mut rng).unwrap();
        let back = Subspace::<f64>::from_json(&s.to_json().unwrap()).unwrap();
        assert!(max_abs(&(back.basis() - s.basis())) == 0.0);
        assert!(Subspace::<f64>::from_json(r#"{"d_A":2,"d_B":2,"basis":[[[1,0]]]}"#).is_err());
    }
}
