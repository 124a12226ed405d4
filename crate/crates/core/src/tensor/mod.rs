//! Dense complex tensor algebra: Kronecker products, partial traces, factor
//! permutations, Schmidt decompositions, Hermitian spectra and Haar sampling.
//!
//! Vectors on a multi-factor space use row-major (big-endian) indexing: for
//! factors `(d_0, ..., d_{m-1})` the basis vector `|i_0 ... i_{m-1}⟩` sits at
//! `Σ_k i_k · Π_{l>k} d_l`, so `|ij⟩` on `C^dA ⊗ C^dB` is index `i·dB + j`.

pub(crate) mod random;
mod spectrum;
mod state;

pub use random::{haar_random_state, random_state, random_vector, seeded_rng};
pub use spectrum::SchmidtSpectrum;
pub use state::PureState;
pub(crate) use state::gram_spectrum;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{max_abs, CMat, CVec, Real, C};

/// Singular and eigenvalues below this are treated as exact zeros.
pub const CLAMP_EPS: f64 = 1e-12;

/// Kronecker product of two matrices.
pub fn kron<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a.kronecker(b)
}

/// Kronecker product of two vectors.
pub fn kron_vec<T: Real>(a: &CVec<T>, b: &CVec<T>) -> CVec<T> {
    let n = b.len();
    DVector::from_fn(a.len() * n, |i, _| a[i / n] * b[i % n])
}

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::<T>::identity(n, n)
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

pub(crate) fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!("invalid factor list {dims:?}")));
    }
    let prod: usize = dims.iter().product();
    if prod != len {
        return Err(Error::DimensionMismatch(format!(
            "factor dims {dims:?} multiply to {prod}, expected {len}"
        )));
    }
    Ok(())
}

/// Reduced operator on the factors in `keep` (output ordered by ascending
/// factor index).
pub fn partial_trace<T: Real>(rho: &CMat<T>, dims: &[usize], keep: &[usize]) -> Result<CMat<T>> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::DimensionMismatch("partial trace of a non-square matrix".into()));
    }
    check_dims(dims, rho.nrows())?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "keep set {keep:?} out of range for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let st = strides(dims);
    let kdims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let tdims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kn: usize = kdims.iter().product();
    let tn: usize = tdims.iter().product();

    let offsets = |sel: &[usize], sdims: &[usize], count: usize| -> Vec<usize> {
        let ss = strides(sdims);
        (0..count)
            .map(|idx| {
                sel.iter()
                    .enumerate()
                    .map(|(pos, &f)| ((idx / ss[pos]) % sdims[pos]) * st[f])
                    .sum()
            })
            .collect()
    };
    let koff = offsets(&kept, &kdims, kn);
    let toff = offsets(&traced, &tdims, tn);

    let mut out = CMat::<T>::zeros(kn, kn);
    for (i, &ri) in koff.iter().enumerate() {
        for (j, &rj) in koff.iter().enumerate() {
            let mut acc = C::new(T::zero(), T::zero());
            for &t in &toff {
                acc += rho[(ri + t, rj + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Largest entrywise deviation `|M - M†|`.
pub fn hermitian_residual<T: Real>(m: &CMat<T>) -> T {
    if m.nrows() != m.ncols() {
        return T::max_value().unwrap_or_else(T::one);
    }
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let r = (m[(i, j)] - m[(j, i)].conj()).norm_sqr();
            if r > worst {
                worst = r;
            }
        }
    }
    worst.sqrt()
}

pub fn is_hermitian<T: Real>(m: &CMat<T>, tol: T) -> bool {
    m.nrows() == m.ncols() && hermitian_residual(m) <= tol
}

/// Largest entrywise deviation `|P² - P|`.
pub fn projector_residual<T: Real>(p: &CMat<T>) -> T {
    max_abs(&(p * p - p))
}

pub fn is_projector<T: Real>(p: &CMat<T>, tol: T) -> bool {
    p.nrows() == p.ncols() && is_hermitian(p, tol) && projector_residual(p) <= tol
}

fn is_real<T: Real>(m: &CMat<T>) -> bool {
    m.iter().all(|z| z.im == T::zero())
}

fn hermitian_tolerance<T: Real>(m: &CMat<T>) -> T {
    let scale = max_abs(m);
    T::tol(1e-10) * if scale > T::one() { scale } else { T::one() }
}

fn sort_desc<T: Real>(vals: &mut [T]) {
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
}

/// Real eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_spectrum<T: Real>(m: &CMat<T>) -> Result<Vec<T>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch("spectrum of a non-square matrix".into()));
    }
    let res = hermitian_residual(m);
    if res > hermitian_tolerance(m) {
        return Err(Error::NotHermitian(res.as_f64()));
    }
    Ok(hermitian_spectrum_unchecked(m))
}

pub(crate) fn hermitian_spectrum_unchecked<T: Real>(m: &CMat<T>) -> Vec<T> {
    let mut vals: Vec<T> = if is_real(m) {
        let r: DMatrix<T> = m.map(|z| z.re);
        r.symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    sort_desc(&mut vals);
    vals
}

/// Eigen-decomposition of a Hermitian matrix with eigenpairs sorted by
/// descending eigenvalue. Column `j` of the returned matrix pairs with value `j`.
pub fn hermitian_eigh<T: Real>(m: &CMat<T>) -> Result<(Vec<T>, CMat<T>)> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch("eigendecomposition of a non-square matrix".into()));
    }
    let res = hermitian_residual(m);
    if res > hermitian_tolerance(m) {
        return Err(Error::NotHermitian(res.as_f64()));
    }
    Ok(hermitian_eigh_unchecked(m))
}

pub(crate) fn hermitian_eigh_unchecked<T: Real>(m: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let n = m.nrows();
    let (vals, vecs): (Vec<T>, CMat<T>) = if is_real(m) {
        let r: DMatrix<T> = m.map(|z| z.re);
        let eig = SymmetricEigen::new(r);
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| C::new(x, T::zero())),
        )
    } else {
        let eig = SymmetricEigen::new(m.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap_or(std::cmp::Ordering::Equal));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = CMat::<T>::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    (sorted_vals, sorted_vecs)
}

/// Unit eigenvector for the largest eigenvalue of a Hermitian matrix.
///
/// When the top eigenvalue is degenerate (gap below `1e-12`) the vector is the
/// normalized projection of `prev` onto the top eigenspace, if that projection
/// is nonzero.
pub fn top_eigenvector<T: Real>(m: &CMat<T>, prev: Option<&CVec<T>>) -> (T, CVec<T>) {
    let (vals, vecs) = hermitian_eigh_unchecked(m);
    let top = vals[0];
    let gap = T::tol(1e-12);
    let mult = vals.iter().take_while(|&&v| top - v < gap).count();
    let first = vecs.column(0).into_owned();
    if mult > 1 {
        if let Some(p) = prev {
            let mut proj = CVec::<T>::zeros(m.nrows());
            for j in 0..mult {
                let col = vecs.column(j).into_owned();
                let amp = crate::scalar::inner(&col, p);
                proj += col * amp;
            }
            let norm = crate::scalar::vec_norm(&proj);
            if norm > T::tol(1e-8) {
                return (top, proj.unscale(norm));
            }
        }
    }
    (top, first)
}

/// Number of singular values above `eps` (absolute).
pub fn matrix_rank<T: Real>(m: &CMat<T>, eps: T) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    m.clone().singular_values().iter().filter(|&&s| s > eps).count()
}

/// Orthonormal basis (as columns) of the span of `cols`, discarding directions
/// whose Gram eigenvalue falls below `eps`.
pub fn orthonormal_span<T: Real>(cols: &CMat<T>, eps: T) -> CMat<T> {
    let gram = cols.adjoint() * cols;
    let (vals, vecs) = hermitian_eigh_unchecked(&gram);
    let keep: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] > eps).collect();
    let mut out = CMat::<T>::zeros(cols.nrows(), keep.len());
    for (c, &j) in keep.iter().enumerate() {
        let v = cols * vecs.column(j);
        let n = crate::scalar::vec_norm(&v);
        out.set_column(c, &v.unscale(n));
    }
    out
}

/// Orthonormal basis of the orthogonal complement of the column span of
/// `basis` (whose columns must be orthonormal).
pub fn orthogonal_complement<T: Real>(basis: &CMat<T>) -> CMat<T> {
    let n = basis.nrows();
    let comp = identity::<T>(n) - basis * basis.adjoint();
    let (vals, vecs) = hermitian_eigh_unchecked(&comp);
    let keep: Vec<usize> = (0..n).filter(|&j| vals[j] > T::lit(0.5)).collect();
    CMat::<T>::from_fn(n, keep.len(), |r, c| vecs[(r, keep[c])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cr;

    fn pauli_x() -> CMat<f64> {
        CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
    }

    fn bell() -> CVec<f64> {
        let s = 0.5f64.sqrt();
        CVec::from_vec(vec![cr(s), cr(0.0), cr(0.0), cr(s)])
    }

    #[test]
    fn identity_kron_identity() {
        assert_eq!(kron(&identity::<f64>(2), &identity(2)), identity(4));
    }

    #[test]
    fn local_paulis_multiply_to_product() {
        let x = pauli_x();
        let i = identity::<f64>(2);
        let lhs = kron(&x, &i) * kron(&i, &x);
        // Entrywise multiplication oracle: (X⊗X)[(a,b),(c,d)] = X[a,c]·X[b,d].
        let oracle = CMat::<f64>::from_fn(4, 4, |r, c| x[(r / 2, c / 2)] * x[(r % 2, c % 2)]);
        assert_eq!(lhs, oracle);
        assert_eq!(lhs, kron(&x, &x));
    }

    #[test]
    fn trace_out_half_of_bell_pair() {
        let v = bell();
        let rho = &v * v.adjoint();
        let red = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        assert!(max_abs(&(red - identity::<f64>(2).scale(0.5))) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = CMat::<f64>::from_row_slice(2, 2, &[cr(0.7), C::new(0.1, 0.2), C::new(0.1, -0.2), cr(0.3)]);
        let sigma = CMat::<f64>::from_row_slice(3, 3, &[
            cr(0.5), cr(0.0), cr(0.0),
            cr(0.0), cr(0.25), C::new(0.0, 0.1),
            cr(0.0), C::new(0.0, -0.1), cr(0.25),
        ]);
        let prod = kron(&rho, &sigma.scale(2.0));
        let red = partial_trace(&prod, &[2, 3], &[0]).unwrap();
        assert!(max_abs(&(red - rho.scale(2.0))) < 1e-14);
        let red_b = partial_trace(&prod, &[2, 3], &[1]).unwrap();
        assert!(max_abs(&(red_b - sigma.scale(2.0))) < 1e-14);
    }

    #[test]
    fn singlet_reduction_is_half_identity() {
        let s = 0.5f64.sqrt();
        let v = CVec::from_vec(vec![cr(0.0), cr(s), cr(-s), cr(0.0)]);
        let red = partial_trace(&(&v * v.adjoint()), &[2, 2], &[1]).unwrap();
        assert!(max_abs(&(red - identity::<f64>(2).scale(0.5))) < 1e-15);
    }

    #[test]
    fn keep_everything_is_identity_map() {
        let v = bell();
        let rho = &v * v.adjoint();
        assert_eq!(partial_trace(&rho, &[2, 2], &[0, 1]).unwrap(), rho);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let rho = identity::<f64>(4);
        assert!(partial_trace(&rho, &[2, 3], &[0]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[2]).is_err());
    }

    #[test]
    fn spectrum_of_identity_and_swap() {
        assert_eq!(hermitian_spectrum(&identity::<f64>(3)).unwrap(), vec![1.0; 3]);
        let swap = crate::subspace::swap_operator::<f64>(2);
        let spec = hermitian_spectrum(&swap).unwrap();
        let expect = [1.0, 1.0, 1.0, -1.0];
        for (a, b) in spec.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_of_antisymmetric_projector() {
        let p = crate::subspace::antisymmetric_subspace::<f64>(3).unwrap().projector();
        let spec = hermitian_spectrum(&p).unwrap();
        assert!(spec[..3].iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(spec[3..].iter().all(|v| v.abs() < 1e-12));
        let tr: f64 = spec.iter().sum();
        assert!((tr - 3.0).abs() < 1e-10);
    }

    #[test]
    fn spectrum_rejects_non_hermitian() {
        let m = CMat::<f64>::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)]);
        assert!(matches!(hermitian_spectrum(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn complex_hermitian_spectrum_sums_to_trace() {
        let m = CMat::<f64>::from_row_slice(2, 2, &[cr(1.0), C::new(0.0, -1.0), C::new(0.0, 1.0), cr(1.0)]);
        let spec = hermitian_spectrum(&m).unwrap();
        assert!((spec[0] - 2.0).abs() < 1e-12 && spec[1].abs() < 1e-12);
    }

    #[test]
    fn degenerate_top_eigenvector_follows_previous() {
        let m = identity::<f64>(3);
        let prev = CVec::from_vec(vec![cr(0.6), cr(0.0), cr(0.8)]);
        let (val, v) = top_eigenvector(&m, Some(&prev));
        assert!((val - 1.0).abs() < 1e-14);
        assert!((crate::scalar::inner(&v, &prev).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complement_dimension() {
        let e0 = CMat::<f64>::from_fn(3, 1, |r, _| if r == 0 { cr(1.0) } else { cr(0.0) });
        let comp = orthogonal_complement(&e0);
        assert_eq!(comp.ncols(), 2);
        assert!(max_abs(&(e0.adjoint() * &comp)) < 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let p = crate::subspace::antisymmetric_subspace::<f32>(3).unwrap().projector();
        let spec = hermitian_spectrum(&p).unwrap();
        let tr: f32 = spec.iter().sum();
        assert!((tr - 3.0).abs() < 1e-4);
    }
}
