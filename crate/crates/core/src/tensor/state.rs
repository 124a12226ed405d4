use serde::{Deserialize, Serialize};

use super::{check_dims, hermitian_spectrum_unchecked, strides, SchmidtSpectrum};
use crate::error::{Error, Result};
use crate::scalar::{vec_norm, CMat, CVec, Real, C};
use nalgebra::DMatrix;

/// Unit vector on a tensor product of factors with known dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PureState<T: Real> {
    #[serde(with = "crate::json::cvec")]
    amps: CVec<T>,
    dims: Vec<usize>,
}

impl<T: Real> PureState<T> {
    /// Wraps amplitudes that are already normalized (within 1e-10).
    pub fn new(amps: CVec<T>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amps.len())?;
        let n = vec_norm(&amps);
        if (n - T::one()).magnitude() > T::tol(1e-10) {
            return Err(Error::InvalidArgument(format!("state norm {n} is not 1")));
        }
        Ok(Self { amps, dims })
    }

    /// Normalizes `amps` first; fails on the zero vector.
    pub fn normalized(amps: CVec<T>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amps.len())?;
        let n = vec_norm(&amps);
        if n <= T::zero() {
            return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
        }
        Ok(Self { amps: amps.unscale(n), dims })
    }

    /// Computational basis vector `|index⟩` on the given factors.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let n: usize = dims.iter().product();
        if index >= n {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range {n}")));
        }
        let mut amps = CVec::<T>::zeros(n);
        amps[index] = C::new(T::one(), T::zero());
        Self::new(amps, dims)
    }

    pub fn amplitudes(&self) -> &CVec<T> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVec<T> {
        self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm(&self) -> T {
        vec_norm(&self.amps)
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        crate::scalar::inner(&self.amps, &other.amps)
    }

    pub fn conj(&self) -> Self {
        Self { amps: self.amps.map(|z| z.conj()), dims: self.dims.clone() }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> CMat<T> {
        &self.amps * self.amps.adjoint()
    }

    /// `self ⊗ other`, factor lists concatenated.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { amps: super::kron_vec(&self.amps, &other.amps), dims }
    }

    /// Same amplitudes viewed with a different factorization.
    pub fn regroup(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, self.amps.len())?;
        Ok(Self { amps: self.amps.clone(), dims })
    }

    /// Reorders tensor factors: factor `j` of the result is factor `perm[j]`
    /// of `self`.
    pub fn permute_factors(&self, perm: &[usize]) -> Result<Self> {
        let m = self.dims.len();
        if perm.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for {m} factors",
                perm.len()
            )));
        }
        let mut seen = vec![false; m];
        for &p in perm {
            if p >= m || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
        }
        let old_strides = strides(&self.dims);
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let moved: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
        let n = self.amps.len();
        let mut amps = CVec::<T>::zeros(n);
        // Odometer over the new multi-index, tracking the matching old offset.
        let mut digits = vec![0usize; m];
        let mut old = 0usize;
        for slot in amps.iter_mut() {
            *slot = self.amps[old];
            for k in (0..m).rev() {
                digits[k] += 1;
                old += moved[k];
                if digits[k] < new_dims[k] {
                    break;
                }
                old -= moved[k] * new_dims[k];
                digits[k] = 0;
            }
        }
        Ok(Self { amps, dims: new_dims })
    }

    fn cut_permutation(&self, left: &[usize]) -> Result<Vec<usize>> {
        let m = self.dims.len();
        let mut l = left.to_vec();
        l.sort_unstable();
        l.dedup();
        if l.iter().any(|&k| k >= m) {
            return Err(Error::DimensionMismatch(format!("cut {left:?} out of range for {m} factors")));
        }
        if l.is_empty() || l.len() == m {
            return Err(Error::InvalidArgument("both sides of a cut must be nonempty".into()));
        }
        let mut perm = l.clone();
        perm.extend((0..m).filter(|k| !l.contains(k)));
        Ok(perm)
    }

    /// Amplitudes reshaped to a (left factors) × (right factors) matrix.
    pub fn cut_matrix(&self, left: &[usize]) -> Result<CMat<T>> {
        let perm = self.cut_permutation(left)?;
        let p = self.permute_factors(&perm)?;
        let nl: usize = perm[..left_len(left)].iter().map(|&k| self.dims[k]).product();
        let nr = self.amps.len() / nl;
        Ok(CMat::<T>::from_fn(nl, nr, |r, c| p.amps[r * nr + c]))
    }

    /// Squared Schmidt coefficients across the cut `left : rest`.
    pub fn schmidt_spectrum(&self, left: &[usize]) -> Result<SchmidtSpectrum<T>> {
        let m = self.cut_matrix(left)?;
        SchmidtSpectrum::from_weights(gram_spectrum(&m))
    }

    /// Reduced density matrix on `keep` (factor order preserved ascending).
    pub fn reduced_density(&self, keep: &[usize]) -> Result<CMat<T>> {
        let m = self.cut_matrix(keep)?;
        Ok(&m * m.adjoint())
    }

    /// Applies `op` (rows × `dims[factor]`) to one factor, then splits the new
    /// factor into `out_dims` (whose product must equal `op.nrows()`).
    pub fn apply_to_factor(&self, factor: usize, op: &CMat<T>, out_dims: &[usize]) -> Result<Self> {
        if factor >= self.dims.len() || op.ncols() != self.dims[factor] {
            return Err(Error::DimensionMismatch(format!(
                "operator with {} columns on factor {factor} of {:?}",
                op.ncols(),
                self.dims
            )));
        }
        check_dims(out_dims, op.nrows())?;
        let left: usize = self.dims[..factor].iter().product();
        let right: usize = self.dims[factor + 1..].iter().product();
        let din = op.ncols();
        let dout = op.nrows();
        let mut amps = CVec::<T>::zeros(left * dout * right);
        for l in 0..left {
            for i in 0..din {
                let base_in = (l * din + i) * right;
                for o in 0..dout {
                    let w = op[(o, i)];
                    if w.re == T::zero() && w.im == T::zero() {
                        continue;
                    }
                    let base_out = (l * dout + o) * right;
                    for r in 0..right {
                        amps[base_out + r] += w * self.amps[base_in + r];
                    }
                }
            }
        }
        let mut dims = self.dims[..factor].to_vec();
        dims.extend_from_slice(out_dims);
        dims.extend_from_slice(&self.dims[factor + 1..]);
        Ok(Self { amps, dims })
    }
}

fn left_len(left: &[usize]) -> usize {
    let mut l = left.to_vec();
    l.sort_unstable();
    l.dedup();
    l.len()
}

/// Eigenvalues of `M M†` or `M† M`, whichever is smaller.
pub(crate) fn gram_spectrum<T: Real>(m: &CMat<T>) -> Vec<T> {
    let wide = m.nrows() <= m.ncols();
    if m.iter().all(|z| z.im == T::zero()) {
        let r: DMatrix<T> = m.map(|z| z.re);
        let g = if wide { &r * r.transpose() } else { r.transpose() * &r };
        let mut v: Vec<T> = g.symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        v
    } else {
        let g = if wide { m * m.adjoint() } else { m.adjoint() * m };
        hermitian_spectrum_unchecked(&g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cr;
    use crate::tensor::haar_random_state;

    fn ket(dims: &[usize], idx: usize) -> PureState<f64> {
        PureState::basis(dims.to_vec(), idx).unwrap()
    }

    fn bell() -> PureState<f64> {
        let s = 0.5f64.sqrt();
        PureState::new(CVec::from_vec(vec![cr(s), cr(0.0), cr(0.0), cr(s)]), vec![2, 2]).unwrap()
    }

    #[test]
    fn zero_tensor_one() {
        let v = ket(&[2], 0).tensor(&ket(&[2], 1));
        assert_eq!(v, ket(&[2, 2], 1));
    }

    #[test]
    fn identity_permutation_is_noop() {
        let v = haar_random_state::<f64>(12, 3).unwrap().regroup(vec![2, 3, 2]).unwrap();
        assert_eq!(v.permute_factors(&[0, 1, 2]).unwrap(), v);
    }

    #[test]
    fn swapping_factors_of_01() {
        let v = ket(&[2, 2], 1).permute_factors(&[1, 0]).unwrap();
        assert_eq!(v, ket(&[2, 2], 2));
    }

    #[test]
    fn permutation_then_inverse() {
        let v = haar_random_state::<f64>(24, 9).unwrap().regroup(vec![2, 3, 4]).unwrap();
        let perm = [2, 0, 1];
        let mut inv = [0; 3];
        for (j, &p) in perm.iter().enumerate() {
            inv[p] = j;
        }
        let back = v.permute_factors(&perm).unwrap().permute_factors(&inv).unwrap();
        assert_eq!(back, v);
        assert_eq!(v.permute_factors(&perm).unwrap().dims(), &[4, 2, 3]);
    }

    #[test]
    fn permutation_errors() {
        let v = ket(&[2, 2], 0);
        assert!(v.permute_factors(&[0]).is_err());
        assert!(v.permute_factors(&[0, 0]).is_err());
    }

    #[test]
    fn regrouped_bell_pairs_are_flat() {
        // Φ+_AB ⊗ Φ+_A'B' in order (A,B,A',B'); regroup to (A,A',B,B').
        let v = bell().tensor(&bell()).permute_factors(&[0, 2, 1, 3]).unwrap();
        let spec = v.schmidt_spectrum(&[0, 1]).unwrap();
        // Brute-force oracle: full SVD of the 4×4 cut matrix.
        let m = v.cut_matrix(&[0, 1]).unwrap();
        let sv = m.singular_values();
        assert_eq!(spec.len(), 4);
        for (l, s) in spec.lambdas().iter().zip(sv.iter()) {
            assert!((l - 0.25).abs() < 1e-12);
            assert!((s * s - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn product_and_singlet_spectra() {
        let prod = ket(&[2, 2], 0);
        assert_eq!(prod.schmidt_spectrum(&[0]).unwrap().lambdas(), &[1.0, 0.0]);
        let s = 0.5f64.sqrt();
        let singlet = PureState::new(CVec::from_vec(vec![cr(0.0), cr(s), cr(-s), cr(0.0)]), vec![2, 2]).unwrap();
        let spec: SchmidtSpectrum<f64> = singlet.schmidt_spectrum(&[1]).unwrap();
        assert!((spec.lambdas()[0] - 0.5).abs() < 1e-14 && (spec.lambdas()[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn empty_cut_rejected() {
        let v = ket(&[2, 2], 0);
        assert!(v.schmidt_spectrum(&[]).is_err());
        assert!(v.schmidt_spectrum(&[0, 1]).is_err());
    }

    #[test]
    fn apply_to_factor_matches_kronecker() {
        let v = haar_random_state::<f64>(6, 1).unwrap().regroup(vec![2, 3]).unwrap();
        let op = CMat::<f64>::from_fn(4, 3, |r, c| C::new((r + 2 * c) as f64, (r as f64) - (c as f64)));
        let out = v.apply_to_factor(1, &op, &[2, 2]).unwrap();
        let oracle = crate::tensor::kron(&crate::tensor::identity(2), &op) * v.amplitudes();
        assert!((out.amplitudes() - oracle).norm() < 1e-12);
        assert_eq!(out.dims(), &[2, 2, 2]);
    }

    #[test]
    fn reduced_density_matches_partial_trace() {
        let v = haar_random_state::<f64>(12, 5).unwrap().regroup(vec![2, 3, 2]).unwrap();
        let a = v.reduced_density(&[0, 2]).unwrap();
        let b = crate::tensor::partial_trace(&v.density(), &[2, 3, 2], &[0, 2]).unwrap();
        assert!(crate::scalar::max_abs(&(a - b)) < 1e-14);
    }
}
