//! Rényi entropies `S_p = log₂(Σ λ^p) / (1 − p)` in bits, with the limits
//! `p = 0` (log-rank), `p = 1` (von Neumann) and `p = ∞` (min-entropy).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::SchmidtSpectrum;

/// Default threshold for counting an eigenvalue towards the rank.
pub const DEFAULT_RANK_EPS: f64 = 1e-9;

/// Orders this close to 1 are evaluated as the von Neumann entropy.
const NEAR_ONE: f64 = 1e-9;

/// A Rényi order `p ∈ [0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RenyiOrder {
    Zero,
    One,
    Infinity,
    Finite(f64),
}

impl RenyiOrder {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 0.0 {
            return Err(Error::InvalidArgument(format!("Renyi order must be >= 0, got {p}")));
        }
        Ok(if p == 0.0 {
            Self::Zero
        } else if p.is_infinite() {
            Self::Infinity
        } else if (p - 1.0).abs() < NEAR_ONE {
            Self::One
        } else {
            Self::Finite(p)
        })
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::One => 1.0,
            Self::Infinity => f64::INFINITY,
            Self::Finite(p) => p,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinity)
    }
}

impl fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Infinity => write!(f, "inf"),
            other => write!(f, "{}", other.value()),
        }
    }
}

impl FromStr for RenyiOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::Infinity),
            t => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("cannot parse Renyi order {s:?}")))?;
                Self::new(p)
            }
        }
    }
}

impl Serialize for RenyiOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Infinity => s.serialize_str("inf"),
            other => s.serialize_f64(other.value()),
        }
    }
}

impl<'de> Deserialize<'de> for RenyiOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Self::new(p),
            Raw::Text(t) => t.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Number of entries strictly greater than `eps`.
pub fn rank_eps<T: Real>(spectrum: &[T], eps: T) -> usize {
    spectrum.iter().filter(|&&l| l > eps).count()
}

/// Rényi entropy in bits of a probability vector, with the default rank
/// threshold for `p = 0`.
pub fn renyi_entropy<T: Real>(probs: &[T], p: RenyiOrder) -> Result<T> {
    renyi_entropy_eps(probs, p, T::lit(DEFAULT_RANK_EPS))
}

pub fn renyi_entropy_eps<T: Real>(probs: &[T], p: RenyiOrder, rank_eps_value: T) -> Result<T> {
    let neg_tol = T::tol(1e-12);
    let mut total = T::zero();
    for &l in probs {
        if l < -neg_tol || !l.is_finite() {
            return Err(Error::InvalidArgument(format!("negative or non-finite probability {l}")));
        }
        total += l;
    }
    if probs.is_empty() || (total - T::one()).magnitude() > T::tol(1e-8) {
        return Err(Error::InvalidArgument(format!("probabilities sum to {total}, expected 1")));
    }
    Ok(renyi_unchecked(probs, p, rank_eps_value))
}

pub(crate) fn renyi_unchecked<T: Real>(probs: &[T], p: RenyiOrder, rank_eps_value: T) -> T {
    let positive = probs.iter().copied().filter(|&l| l > T::zero());
    match p {
        RenyiOrder::Zero => T::count(rank_eps(probs, rank_eps_value)).log2(),
        RenyiOrder::One => -positive.fold(T::zero(), |acc, l| acc + l * l.log2()),
        RenyiOrder::Infinity => {
            let max = probs.iter().copied().fold(T::zero(), |a, b| if b > a { b } else { a });
            -max.log2()
        }
        RenyiOrder::Finite(q) => {
            let q = T::lit(q);
            let sum = positive.fold(T::zero(), |acc, l| acc + l.powf(q));
            sum.log2() / (T::one() - q)
        }
    }
}

/// Rényi entropy of a Schmidt spectrum (already validated on construction).
pub fn spectrum_entropy<T: Real>(spec: &SchmidtSpectrum<T>, p: RenyiOrder) -> T {
    renyi_unchecked(spec.lambdas(), p, T::lit(DEFAULT_RANK_EPS))
}

pub fn spectrum_entropy_eps<T: Real>(spec: &SchmidtSpectrum<T>, p: RenyiOrder, eps: T) -> T {
    renyi_unchecked(spec.lambdas(), p, eps)
}

/// Binary Shannon entropy `h(x)` in bits.
pub fn binary_entropy<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::InvalidArgument(format!("binary entropy argument {x} outside [0,1]")));
    }
    let term = |y: T| if y > T::zero() { -y * y.log2() } else { T::zero() };
    Ok(term(x) + term(T::one() - x))
}
