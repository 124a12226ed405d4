//! The conjugate-pair trial state `ψ⁺(P) = k^{-1/2} Σ_i |ψ_i⟩_{AB}|ψ_i*⟩_{A'B'}`,
//! its Schmidt spectrum across `AA' : BB'`, and violation certification.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::minentropy::{certified_lower_bound, screen_subspace, MinEntropyOptions};
use crate::renyi::{spectrum_entropy, RenyiOrder};
use crate::scalar::{CMat, CVec, Real};
use crate::subspace::{antisymmetric_subspace, Subspace};
use crate::tensor::{gram_spectrum, kron_vec, PureState, SchmidtSpectrum};

/// Margin by which the joint entropy must undercut twice the single-copy
/// minimum before a violation is declared.
pub const VIOLATION_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Violated,
    NotViolated,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct ViolationReport<T: Real> {
    pub p: RenyiOrder,
    /// Local dimension `d_A` of the subspace.
    pub d: usize,
    pub subspace_dim: usize,
    pub single_copy_min: T,
    /// Whether `single_copy_min` is a proven lower bound (antisymmetric case)
    /// rather than an optimizer value.
    pub single_copy_certified: bool,
    pub joint_entropy: T,
    /// `(p/(p−1))·log₂(1/hayden_lambda_bound)`, only meaningful for `p > 1`.
    pub analytic_joint_bound: Option<T>,
    pub hayden_lambda_bound: T,
    pub lambda_max_exact: T,
    pub verdict: Verdict,
}

/// How to obtain the single-copy minimum in a [`ViolationReport`].
#[derive(Clone, Copy, Debug)]
pub enum SingleCopyMin<T> {
    /// Certified bound when known, otherwise the optimizer.
    Auto(MinEntropyOptions),
    /// A caller-supplied certified lower bound.
    Certified(T),
}

impl<T> Default for SingleCopyMin<T> {
    fn default() -> Self {
        Self::Auto(MinEntropyOptions::default())
    }
}

/// `ψ⁺(P)` on factors `(A, B, A', B')`.
pub fn conjugate_pair_state<T: Real>(s: &Subspace<T>) -> PureState<T> {
    let k = s.dim();
    let n = s.ambient_dim();
    let mut amps = CVec::<T>::zeros(n * n);
    for col in s.basis().column_iter() {
        let c = col.into_owned();
        amps += kron_vec(&c, &c.map(|z| z.conj()));
    }
    let amps = amps.unscale(T::count(k).sqrt());
    PureState::normalized(amps, vec![s.d_a(), s.d_b(), s.d_a(), s.d_b()])
        .expect("conjugate pair of an orthonormal basis is normalized")
}

/// Schmidt spectrum of `ψ⁺(P)` across `(A, A') : (B, B')`.
///
/// The amplitudes of `ψ⁺(P)` are `P[(a,b),(a',b')] / √k`, so the cut matrix
/// is the realignment of the projector.
pub fn joint_schmidt_spectrum<T: Real>(s: &Subspace<T>) -> SchmidtSpectrum<T> {
    let (da, db) = (s.d_a(), s.d_b());
    let p = s.projector();
    let scale = T::count(s.dim()).sqrt();
    let r = CMat::<T>::from_fn(da * da, db * db, |row, col| {
        let (a, a2) = (row / da, row % da);
        let (b, b2) = (col / db, col % db);
        p[(a * db + b, a2 * db + b2)].unscale(scale)
    });
    SchmidtSpectrum::from_weights(gram_spectrum(&r)).expect("projector of positive rank")
}

/// Lower bound `dim P / (dA·dB)` on the joint `λ_max`.
pub fn hayden_bound<T: Real>(s: &Subspace<T>) -> T {
    T::count(s.dim()) / T::count(s.ambient_dim())
}

/// Compares the exact joint entropy of `ψ⁺(P)` with twice the single-copy
/// minimum.
pub fn violation_report<T: Real>(
    s: &Subspace<T>,
    p: RenyiOrder,
    single: SingleCopyMin<T>,
) -> Result<ViolationReport<T>> {
    let spectrum = joint_schmidt_spectrum(s);
    let joint_entropy = spectrum_entropy(&spectrum, p);
    let hayden = hayden_bound(s);
    let (single_copy_min, certified) = match single {
        SingleCopyMin::Certified(v) => (v, true),
        SingleCopyMin::Auto(opts) => match certified_lower_bound(s, p) {
            Some(v) => (v, true),
            None => (screen_subspace(s, p, &opts)?.value, false),
        },
    };
    let analytic_joint_bound = match p {
        RenyiOrder::Finite(q) if q > 1.0 => {
            let q = T::lit(q);
            Some(q / (q - T::one()) * (T::one() / hayden).log2())
        }
        RenyiOrder::Infinity => Some(-hayden.log2()),
        _ => None,
    };
    let below = joint_entropy < T::lit(2.0) * single_copy_min - T::lit(VIOLATION_MARGIN);
    // An optimizer value only upper-bounds the true minimum, so it can rule
    // a violation out but never in.
    let verdict = match (below, certified) {
        (true, true) => Verdict::Violated,
        (true, false) => Verdict::Inconclusive,
        (false, _) => Verdict::NotViolated,
    };
    Ok(ViolationReport {
        p,
        d: s.d_a(),
        subspace_dim: s.dim(),
        single_copy_min,
        single_copy_certified: certified,
        joint_entropy,
        analytic_joint_bound,
        hayden_lambda_bound: hayden,
        lambda_max_exact: spectrum.lambda_max(),
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct ScanReport<T: Real> {
    pub p: RenyiOrder,
    pub d_max: usize,
    pub reports: Vec<ViolationReport<T>>,
    pub minimal_violating_d: Option<usize>,
}

/// Violation reports for the antisymmetric subspace at `d = 2..=d_max`.
pub fn scan_violation<T: Real>(p: RenyiOrder, d_max: usize) -> Result<ScanReport<T>> {
    let reports = (2..=d_max)
        .into_par_iter()
        .map(|d| {
            let s = antisymmetric_subspace::<T>(d)?;
            violation_report(&s, p, SingleCopyMin::default())
        })
        .collect::<Result<Vec<_>>>()?;
    let minimal_violating_d = reports.iter().find(|r| r.verdict == Verdict::Violated).map(|r| r.d);
    Ok(ScanReport { p, d_max, reports, minimal_violating_d })
}
