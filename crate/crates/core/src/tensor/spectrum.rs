use serde::{Deserialize, Serialize};

use super::CLAMP_EPS;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Squared Schmidt coefficients (equivalently, the spectrum of a reduced
/// density matrix), sorted descending and summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SchmidtSpectrum<T: Real> {
    lambdas: Vec<T>,
}

impl<T: Real> SchmidtSpectrum<T> {
    /// Builds a spectrum from raw nonnegative weights (eigenvalues or squared
    /// singular values): entries below `1e-12` are clamped to zero, then the
    /// rest is renormalized and sorted.
    pub fn from_weights(weights: impl IntoIterator<Item = T>) -> Result<Self> {
        let eps = T::tol(CLAMP_EPS);
        let mut lambdas: Vec<T> = weights
            .into_iter()
            .map(|w| if w > eps { w } else { T::zero() })
            .collect();
        let total = lambdas.iter().fold(T::zero(), |a, &b| a + b);
        if lambdas.is_empty() || total <= T::zero() {
            return Err(Error::InvalidArgument("spectrum has no positive weight".into()));
        }
        for l in lambdas.iter_mut() {
            *l /= total;
        }
        lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Ok(Self { lambdas })
    }

    /// Accepts an explicit probability vector: entries must be ≥ -1e-14 and
    /// sum to one within 1e-8. Tiny negatives are zeroed; nothing is rescaled.
    pub fn from_probabilities(probs: impl IntoIterator<Item = T>) -> Result<Self> {
        let neg_tol = T::tol(1e-14);
        let mut lambdas = Vec::new();
        for p in probs {
            if p < -neg_tol || !p.is_finite() {
                return Err(Error::InvalidArgument(format!("invalid probability {p}")));
            }
            lambdas.push(if p < T::zero() { T::zero() } else { p });
        }
        let total = lambdas.iter().fold(T::zero(), |a, &b| a + b);
        if lambdas.is_empty() || (total - T::one()).magnitude() > T::tol(1e-8) {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambda_max(&self) -> T {
        self.lambdas[0]
    }

    /// Largest Schmidt coefficient (square root of `lambda_max`).
    pub fn a_max(&self) -> T {
        self.lambdas[0].sqrt()
    }

    /// Number of entries strictly above `eps`.
    pub fn rank(&self, eps: T) -> usize {
        self.lambdas.iter().filter(|&&l| l > eps).count()
    }

    /// Spectrum of the tensor product of the two underlying states.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut lambdas: Vec<T> = self
            .lambdas
            .iter()
            .flat_map(|&a| other.lambdas.iter().map(move |&b| a * b))
            .collect();
        lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Self { lambdas }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.lambdas.iter().map(|x| x.as_f64()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_sorts_and_normalizes() {
        let s = SchmidtSpectrum::<f64>::from_weights([0.2, 1e-15, 0.6, -1e-13]).unwrap();
        assert!((s.lambdas()[0] - 0.75).abs() < 1e-15);
        assert!((s.lambdas()[1] - 0.25).abs() < 1e-15);
        assert_eq!(s.lambdas()[2], 0.0);
        assert_eq!(s.rank(1e-9), 2);
    }

    #[test]
    fn rejects_bad_probabilities() {
        assert!(SchmidtSpectrum::from_probabilities([0.5, 0.6]).is_err());
        assert!(SchmidtSpectrum::from_probabilities([1.1, -0.1]).is_err());
        assert!(SchmidtSpectrum::<f64>::from_weights([0.0, 0.0]).is_err());
    }

    #[test]
    fn tensor_spectrum() {
        let a = SchmidtSpectrum::from_probabilities([0.5, 0.5]).unwrap();
        let b = SchmidtSpectrum::from_probabilities([0.75, 0.25]).unwrap();
        let t = a.tensor(&b);
        assert_eq!(t.lambdas(), &[0.375, 0.375, 0.125, 0.125]);
    }
}
