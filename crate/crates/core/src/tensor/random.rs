use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::PureState;
use crate::error::{Error, Result};
use crate::scalar::{CVec, Real, C};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-random unit vector on the factors `dims`: i.i.d. standard complex
/// Gaussian amplitudes, normalized.
pub fn random_state<T: Real, R: rand::Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState<T>> {
    let n: usize = dims.iter().product();
    if dims.is_empty() || n == 0 {
        return Err(Error::InvalidArgument("random state needs a positive dimension".into()));
    }
    let v = random_vector::<T, R>(n, rng);
    PureState::new(v, dims.to_vec())
}

pub fn random_vector<T: Real, R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> CVec<T> {
    loop {
        let v = CVec::<T>::from_fn(n, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C::new(T::lit(re), T::lit(im))
        });
        let norm = crate::scalar::vec_norm(&v);
        if norm > T::zero() {
            // Fix the global phase so the first amplitude is real and positive.
            let v0 = v[0];
            let m0 = v0.norm_sqr().sqrt();
            let phase = if m0 > T::zero() { v0.conj().unscale(m0) } else { C::new(T::one(), T::zero()) };
            return v.map(|z| z * phase).unscale(norm);
        }
    }
}

/// Deterministic Haar-random state of dimension `dim` for a given seed.
pub fn haar_random_state<T: Real>(dim: usize, seed: u64) -> Result<PureState<T>> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let mut rng = seeded_rng(seed);
    random_state(&[dim], &mut rng)
}
