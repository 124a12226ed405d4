//! Maximal overlap of product states `ψ ⊗ φ` with a projector, by seesaw.
//!
//! For a subspace with orthonormal basis `{u_i}` the objective is
//! `f(ψ, φ) = Σ_i |⟨ψ ⊗ φ|u_i⟩|²`. With `φ` fixed it is the quadratic form
//! of `M_A = Σ_i (U_i φ̄)(U_i φ̄)†`, where `U_i` is `u_i` reshaped to
//! `dA × dB`, so the best `ψ` is its top eigenvector; likewise for `φ`.
//! Every half-step therefore can only increase `f`. The supremum equals the
//! largest squared Schmidt coefficient over the subspace, so a seesaw run
//! yields a lower bound on it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{max_abs, CMat, CVec, Real, C};
use crate::subspace::Subspace;
use crate::tensor::{self, random_vector, seeded_rng, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self { restarts: 32, tol: 1e-10, max_iter: 1000, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct OverlapResult<T: Real> {
    pub value: T,
    pub witness_a: PureState<T>,
    pub witness_b: PureState<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after initialization and after every half-step of the
    /// winning restart.
    pub history: Vec<T>,
    pub restart: usize,
}

/// Callback receiving `(a, b, f(a, b))` after every half-step.
pub type Observer<'a, T> = &'a mut dyn FnMut(&CVec<T>, &CVec<T>, T);

/// The bilinear product-overlap objective for one subspace.
#[derive(Clone, Debug)]
pub struct ProductOverlap<T: Real> {
    d_a: usize,
    d_b: usize,
    blocks: Vec<CMat<T>>,
}

impl<T: Real> ProductOverlap<T> {
    /// `basis` columns: an orthonormal basis of the subspace in `C^dA ⊗ C^dB`.
    pub fn from_basis(d_a: usize, d_b: usize, basis: &CMat<T>) -> Result<Self> {
        if d_a == 0 || d_b == 0 || basis.nrows() != d_a * d_b {
            return Err(Error::DimensionMismatch(format!(
                "basis of length {} on a {d_a}x{d_b} space",
                basis.nrows()
            )));
        }
        let blocks = basis
            .column_iter()
            .map(|col| CMat::<T>::from_fn(d_a, d_b, |a, b| col[a * d_b + b]))
            .collect();
        Ok(Self { d_a, d_b, blocks })
    }

    pub fn from_subspace(s: &Subspace<T>) -> Self {
        Self::from_basis(s.d_a(), s.d_b(), s.basis()).expect("subspace dimensions are consistent")
    }

    pub fn from_projector(p: &CMat<T>, d_a: usize, d_b: usize) -> Result<Self> {
        let basis = projector_basis(p)?;
        Self::from_basis(d_a, d_b, &basis)
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    /// `⟨a ⊗ b|P|a ⊗ b⟩` for unit `a`, `b`.
    pub fn value(&self, a: &CVec<T>, b: &CVec<T>) -> T {
        let bc = b.map(|z| z.conj());
        self.blocks
            .iter()
            .map(|u| crate::scalar::inner(a, &(u * &bc)).norm_sqr())
            .fold(T::zero(), |x, y| x + y)
    }

    /// `M_A` with `b` fixed: `a† M_A a` is the objective.
    pub fn contract_b(&self, b: &CVec<T>) -> CMat<T> {
        let bc = b.map(|z| z.conj());
        let mut m = CMat::<T>::zeros(self.d_a, self.d_a);
        for u in &self.blocks {
            let w = u * &bc;
            m.ger(C::new(T::one(), T::zero()), &w, &w.map(|z| z.conj()), C::new(T::one(), T::zero()));
        }
        m
    }

    /// `M_B` with `a` fixed.
    pub fn contract_a(&self, a: &CVec<T>) -> CMat<T> {
        let ac = a.map(|z| z.conj());
        let mut m = CMat::<T>::zeros(self.d_b, self.d_b);
        for u in &self.blocks {
            let z = u.transpose() * &ac;
            m.ger(C::new(T::one(), T::zero()), &z, &z.map(|x| x.conj()), C::new(T::one(), T::zero()));
        }
        m
    }

    /// One seesaw run from `(a, b)`. `observer` sees every iterate.
    pub fn run(
        &self,
        mut a: CVec<T>,
        mut b: CVec<T>,
        opts: &SeesawOptions,
        mut observer: Option<Observer<'_, T>>,
    ) -> SeesawRun<T> {
        let tol = T::lit(opts.tol);
        let mut current = self.value(&a, &b);
        let mut history = vec![current];
        if let Some(obs) = observer.as_mut() {
            obs(&a, &b, current);
        }
        let mut converged = false;
        let mut iterations = 0;
        while iterations < opts.max_iter {
            iterations += 1;
            let (_, na) = tensor::top_eigenvector(&self.contract_b(&b), Some(&a));
            a = na;
            let va = self.value(&a, &b);
            history.push(va);
            if let Some(obs) = observer.as_mut() {
                obs(&a, &b, va);
            }
            let (_, nb) = tensor::top_eigenvector(&self.contract_a(&a), Some(&b));
            b = nb;
            let vb = self.value(&a, &b);
            history.push(vb);
            if let Some(obs) = observer.as_mut() {
                obs(&a, &b, vb);
            }
            let gain = vb - current;
            current = vb;
            if gain < tol {
                converged = true;
                break;
            }
        }
        SeesawRun { value: current, a, b, iterations, converged, history }
    }

    /// Multi-start seesaw; restart `r` is seeded with `seed + r`.
    pub fn maximize(&self, opts: &SeesawOptions) -> OverlapResult<T> {
        let restarts = opts.restarts.max(1);
        let runs: Vec<SeesawRun<T>> = (0..restarts)
            .into_par_iter()
            .map(|r| {
                let mut rng = seeded_rng(opts.seed.wrapping_add(r as u64));
                let a = random_vector::<T, _>(self.d_a, &mut rng);
                let b = random_vector::<T, _>(self.d_b, &mut rng);
                self.run(a, b, opts, None)
            })
            .collect();
        let mut best = 0;
        for (i, r) in runs.iter().enumerate() {
            if r.value > runs[best].value {
                best = i;
            }
        }
        let run = runs.into_iter().nth(best).expect("at least one restart");
        OverlapResult {
            value: self.value(&run.a, &run.b),
            witness_a: PureState::normalized(run.a, vec![self.d_a]).expect("unit eigenvector"),
            witness_b: PureState::normalized(run.b, vec![self.d_b]).expect("unit eigenvector"),
            iterations: run.iterations,
            converged: run.converged,
            history: run.history,
            restart: best,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeesawRun<T: Real> {
    pub value: T,
    pub a: CVec<T>,
    pub b: CVec<T>,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<T>,
}

/// Orthonormal basis of the range of a projector; checks `P = P† = P²`.
pub fn projector_basis<T: Real>(p: &CMat<T>) -> Result<CMat<T>> {
    if p.nrows() != p.ncols() {
        return Err(Error::DimensionMismatch("projector must be square".into()));
    }
    let tol = T::tol(1e-8);
    let herm = tensor::hermitian_residual(p);
    if herm > tol {
        return Err(Error::NotHermitian(herm.as_f64()));
    }
    let idem = tensor::projector_residual(p);
    if idem > tol {
        return Err(Error::NotProjector(idem.as_f64()));
    }
    let (vals, vecs) = tensor::hermitian_eigh(p)?;
    let keep: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] > T::lit(0.5)).collect();
    Ok(CMat::<T>::from_fn(p.nrows(), keep.len(), |r, c| vecs[(r, keep[c])]))
}

/// Seesaw lower bound on `sup ⟨ψ⊗φ|P|ψ⊗φ⟩` for a projector on `C^dA ⊗ C^dB`.
pub fn max_product_overlap<T: Real>(
    p: &CMat<T>,
    d_a: usize,
    d_b: usize,
    opts: &SeesawOptions,
) -> Result<OverlapResult<T>> {
    if p.nrows() != d_a * d_b {
        return Err(Error::DimensionMismatch(format!(
            "projector of size {} on a {d_a}x{d_b} space",
            p.nrows()
        )));
    }
    if max_abs(p) == T::zero() {
        return Err(Error::InvalidArgument("zero projector".into()));
    }
    Ok(ProductOverlap::from_projector(p, d_a, d_b)?.maximize(opts))
}

/// Average of `⟨ψ⊗φ|P|ψ⊗φ⟩` over independent Haar-random `ψ`, `φ`:
/// `Tr P / (dA·dB)`.
pub fn average_product_overlap<T: Real>(p: &CMat<T>, d_a: usize, d_b: usize) -> Result<T> {
    if p.nrows() != d_a * d_b || p.ncols() != d_a * d_b {
        return Err(Error::DimensionMismatch("projector size does not match dA*dB".into()));
    }
    Ok(p.trace().re / T::count(d_a * d_b))
}

/// Largest squared Schmidt coefficient over the subspace (seesaw lower bound).
pub fn subspace_lambda_max<T: Real>(s: &Subspace<T>, opts: &SeesawOptions) -> OverlapResult<T> {
    ProductOverlap::from_subspace(s).maximize(opts)
}

/// Seesaw over the grouped cut `(a_side) : (rest)` for a subspace of a
/// multi-factor space given by orthonormal basis states sharing `dims`.
pub fn multipartite_max_product_overlap_basis<T: Real>(
    basis: &[PureState<T>],
    a_side: &[usize],
    opts: &SeesawOptions,
) -> Result<OverlapResult<T>> {
    let first = basis
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty basis".into()))?;
    let dims = first.dims().to_vec();
    if basis.iter().any(|s| s.dims() != dims.as_slice()) {
        return Err(Error::DimensionMismatch("basis states disagree on factor dims".into()));
    }
    let perm = grouped_permutation(&dims, a_side)?;
    let d_a: usize = a_side.iter().map(|&k| dims[k]).product();
    let n = first.len();
    let mut mat = CMat::<T>::zeros(n, basis.len());
    for (j, s) in basis.iter().enumerate() {
        mat.set_column(j, s.permute_factors(&perm)?.amplitudes());
    }
    Ok(ProductOverlap::from_basis(d_a, n / d_a, &mat)?.maximize(opts))
}

/// Projector form of [`multipartite_max_product_overlap_basis`].
pub fn multipartite_max_product_overlap<T: Real>(
    p: &CMat<T>,
    dims: &[usize],
    a_side: &[usize],
    opts: &SeesawOptions,
) -> Result<OverlapResult<T>> {
    tensor::check_dims(dims, p.nrows())?;
    let basis = projector_basis(p)?;
    let states = basis
        .column_iter()
        .map(|c| PureState::normalized(c.into_owned(), dims.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    multipartite_max_product_overlap_basis(&states, a_side, opts)
}

fn grouped_permutation(dims: &[usize], a_side: &[usize]) -> Result<Vec<usize>> {
    let m = dims.len();
    let mut a = a_side.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.is_empty() || a.len() == m || a.iter().any(|&k| k >= m) {
        return Err(Error::DimensionMismatch(format!("invalid side {a_side:?} for {m} factors")));
    }
    let mut perm = a.clone();
    perm.extend((0..m).filter(|k| !a.contains(k)));
    Ok(perm)
}
