//! Several uses of the antisymmetric channel: outputs of totally
//! antisymmetric and pairing inputs, and seesaw search over `P_a^{⊗n}`.
//!
//! Embedded states keep factors in copy order `(A₁, B₁, …, Aₙ, Bₙ)`; the
//! output is the reduction to the `B` factors, whose spectrum equals the
//! Schmidt spectrum across the `(A…) : (B…)` cut.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maxoverlap::{multipartite_max_product_overlap_basis, SeesawOptions};
use crate::renyi::{spectrum_entropy, RenyiOrder};
use crate::scalar::{CVec, Real, C};
use crate::subspace::antisymmetric_subspace;
use crate::tensor::{kron_vec, PureState, SchmidtSpectrum};

/// Largest embedded dimension `d^{2n}` handled without the large flag.
pub const DIMENSION_LIMIT: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    TotallyAntisymmetric,
    Pairing,
    Optimized,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct MultiCopyResult<T: Real> {
    pub n: usize,
    pub d: usize,
    pub input_kind: InputKind,
    pub p: RenyiOrder,
    pub entropy: T,
    /// `n` times the single-copy minimum, which is 1 bit for every order.
    pub single_copy_sum: T,
    pub spectrum: SchmidtSpectrum<T>,
    /// Seesaw convergence, for optimized inputs only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
}

fn antisym_dim(d: usize) -> usize {
    d * (d - 1) / 2
}

fn guard(d: usize, n: usize, large: bool) -> Result<()> {
    let dim = (d as u128).checked_pow(2 * n as u32).unwrap_or(u128::MAX);
    if !large && dim > DIMENSION_LIMIT as u128 {
        return Err(Error::DimensionGuard { dim: usize::try_from(dim).unwrap_or(usize::MAX), limit: DIMENSION_LIMIT });
    }
    Ok(())
}

fn check_d(d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("need d >= 3 for a nontrivial antisymmetric channel, got {d}")));
    }
    Ok(())
}

/// The normalized determinant state `(k!)^{-1/2} Σ_σ sgn(σ)|σ(0)…σ(k−1)⟩`
/// in `(C^k)^{⊗k}`.
pub fn totally_antisymmetric_input<T: Real>(k: usize) -> Result<PureState<T>> {
    if k == 0 || k > 10 {
        return Err(Error::InvalidArgument(format!("determinant state needs 1 <= k <= 10, got {k}")));
    }
    let len = k.pow(k as u32);
    let mut amps = CVec::<T>::zeros(len);
    for perm in (0..k).permutations(k) {
        let inversions = perm.iter().tuple_combinations().filter(|(a, b)| a > b).count();
        let index = perm.iter().fold(0, |acc, &x| acc * k + x);
        amps[index] = C::new(if inversions % 2 == 0 { T::one() } else { -T::one() }, T::zero());
    }
    PureState::normalized(amps, vec![k; k])
}

/// `Φ_k^{⊗⌊n/2⌋}` on consecutive copy pairs, times `e₀` for odd `n`.
///
/// Since the antisymmetric basis is real, `(W ⊗ W)Φ_k` is the conjugate-pair
/// state of `P_a`, and `W e₀ = (|01⟩ − |10⟩)/√2`.
pub fn pairing_input<T: Real>(d: usize, n: usize) -> Result<PureState<T>> {
    check_d(d)?;
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one copy".into()));
    }
    let k = antisym_dim(d);
    let mut phi = CVec::<T>::zeros(k * k);
    for i in 0..k {
        phi[i * k + i] = C::new(T::one(), T::zero());
    }
    let phi = phi.unscale(T::count(k).sqrt());
    let mut amps = CVec::<T>::from_element(1, C::new(T::one(), T::zero()));
    for _ in 0..n / 2 {
        amps = kron_vec(&amps, &phi);
    }
    if n % 2 == 1 {
        let mut e0 = CVec::<T>::zeros(k);
        e0[0] = C::new(T::one(), T::zero());
        amps = kron_vec(&amps, &e0);
    }
    PureState::normalized(amps, vec![k; n])
}

/// Embeds an input on `(C^k)^{⊗n}` through `W^{⊗n}`.
pub fn embed<T: Real>(d: usize, input: &PureState<T>, large: bool) -> Result<PureState<T>> {
    check_d(d)?;
    let k = antisym_dim(d);
    let n = input.dims().len();
    if input.dims().iter().any(|&x| x != k) {
        return Err(Error::DimensionMismatch(format!(
            "input factors {:?} must all equal d(d-1)/2 = {k}",
            input.dims()
        )));
    }
    guard(d, n, large)?;
    let w = antisymmetric_subspace::<T>(d)?.basis().clone();
    let mut state = input.clone();
    // Factor j of the input sits at position 2j once the earlier copies
    // have been split into (A, B).
    for j in 0..n {
        state = state.apply_to_factor(2 * j, &w, &[d, d])?;
    }
    Ok(state)
}

fn output_spectrum<T: Real>(embedded: &PureState<T>) -> Result<SchmidtSpectrum<T>> {
    let a_side: Vec<usize> = (0..embedded.dims().len()).step_by(2).collect();
    embedded.schmidt_spectrum(&a_side)
}

/// Output spectrum and `S_p` of `(Λ_a)^{⊗n}` on `input`.
pub fn multicopy_output_entropy<T: Real>(
    d: usize,
    input: &PureState<T>,
    input_kind: InputKind,
    p: RenyiOrder,
    large: bool,
) -> Result<MultiCopyResult<T>> {
    let n = input.dims().len();
    let spectrum = output_spectrum(&embed(d, input, large)?)?;
    Ok(MultiCopyResult {
        n,
        d,
        input_kind,
        p,
        entropy: spectrum_entropy(&spectrum, p),
        single_copy_sum: T::count(n),
        spectrum,
        converged: None,
    })
}

/// Seesaw search for the least `S_∞` output of `(Λ_a)^{⊗n}`.
///
/// The reported entropy is that of the input `W^{⊗n}†(a ⊗ b)` built from
/// the best product witness, so it is achieved and never below
/// `−log₂` of the overlap found.
pub fn multicopy_min_search<T: Real>(
    d: usize,
    n: usize,
    p: RenyiOrder,
    opts: &SeesawOptions,
    large: bool,
) -> Result<MultiCopyResult<T>> {
    check_d(d)?;
    if p != RenyiOrder::Infinity {
        return Err(Error::InvalidArgument("multi-copy search supports only p = inf".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one copy".into()));
    }
    guard(d, n, large)?;
    let k = antisym_dim(d);
    let total = k.pow(n as u32);
    let basis = (0..total)
        .map(|i| embed(d, &PureState::basis(vec![k; n], i)?, large))
        .collect::<Result<Vec<_>>>()?;
    let a_side: Vec<usize> = (0..2 * n).step_by(2).collect();
    let found = multipartite_max_product_overlap_basis(&basis, &a_side, opts)?;
    // Undo the grouping: witness_a lives on (A₁…Aₙ), witness_b on (B₁…Bₙ).
    let grouped = PureState::new(
        kron_vec(found.witness_a.amplitudes(), found.witness_b.amplitudes()),
        vec![d; 2 * n],
    )?;
    let mut inv = vec![0; 2 * n];
    for j in 0..n {
        inv[2 * j] = j;
        inv[2 * j + 1] = n + j;
    }
    let product = grouped.permute_factors(&inv)?;
    let coeffs = CVec::<T>::from_iterator(total, basis.iter().map(|b| b.inner(&product)));
    let input = PureState::normalized(coeffs, vec![k; n])?;
    let mut result = multicopy_output_entropy(d, &input, InputKind::Optimized, p, large)?;
    result.converged = Some(found.converged);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_orders() -> Vec<RenyiOrder> {
        vec![RenyiOrder::Zero, RenyiOrder::One, RenyiOrder::new(2.0).unwrap(), RenyiOrder::Infinity]
    }

    #[test]
    fn singlet_from_k2() {
        let s = totally_antisymmetric_input::<f64>(2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let a = s.amplitudes();
        assert!((a[1].re - r).abs() < 1e-15 && (a[2].re + r).abs() < 1e-15);
        assert!(a[0].norm() == 0.0 && a[3].norm() == 0.0);
    }

    #[test]
    fn determinant_is_antisymmetric() {
        let s = totally_antisymmetric_input::<f64>(3).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-14);
        assert_eq!(s.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 6);
        for perm in [[1, 0, 2], [0, 2, 1]] {
            let t = s.permute_factors(&perm).unwrap();
            assert!((t.amplitudes() + s.amplitudes()).norm() < 1e-14);
        }
    }

    #[test]
    fn three_copies_of_d3_give_flat_four_bits() {
        let input = totally_antisymmetric_input::<f64>(3).unwrap();
        for p in all_orders() {
            let r = multicopy_output_entropy(3, &input, InputKind::TotallyAntisymmetric, p, false).unwrap();
            assert!((r.entropy - 4.0).abs() < 1e-8, "{p}: {}", r.entropy);
            assert!(r.entropy > r.single_copy_sum);
            assert_eq!(r.spectrum.rank(1e-9), 16);
            assert!(r.spectrum.lambdas().iter().filter(|&&l| l > 1e-9).all(|l| (l - 1.0 / 16.0).abs() < 1e-9));
        }
    }

    #[test]
    fn single_copy_is_one_bit() {
        let mut rng = crate::tensor::seeded_rng(3);
        let input = crate::tensor::random_state::<f64, _>(&[3], &mut rng).unwrap();
        let r = multicopy_output_entropy(3, &input, InputKind::Optimized, RenyiOrder::One, false).unwrap();
        assert!((r.entropy - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pairing_matches_conjugate_pair() {
        let p = RenyiOrder::new(4.8).unwrap();
        let r = multicopy_output_entropy(3, &pairing_input::<f64>(3, 2).unwrap(), InputKind::Pairing, p, false).unwrap();
        assert!((r.entropy - 1.998_164_181_808_504_4).abs() < 1e-10);
        let embedded = embed(3, &pairing_input::<f64>(3, 2).unwrap(), false).unwrap();
        let psi = crate::conjpair::conjugate_pair_state(&antisymmetric_subspace::<f64>(3).unwrap());
        assert!((embedded.amplitudes() - psi.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn pairing_is_additive() {
        for p in all_orders() {
            let two = multicopy_output_entropy(3, &pairing_input::<f64>(3, 2).unwrap(), InputKind::Pairing, p, false)
                .unwrap()
                .entropy;
            for n in [3, 4] {
                let r = multicopy_output_entropy(3, &pairing_input::<f64>(3, n).unwrap(), InputKind::Pairing, p, false)
                    .unwrap();
                let expect = (n / 2) as f64 * two + (n % 2) as f64;
                assert!((r.entropy - expect).abs() < 1e-9, "{p} n={n}");
            }
        }
        let r = multicopy_output_entropy(3, &pairing_input::<f64>(3, 3).unwrap(), InputKind::Pairing, RenyiOrder::Infinity, false)
            .unwrap();
        assert!((r.entropy - (3f64.log2() + 1.0)).abs() < 1e-9);
    }

    #[test]
    fn guard_rejects_large_embeddings() {
        let input = totally_antisymmetric_input::<f64>(6).unwrap();
        let err = multicopy_output_entropy(4, &input, InputKind::TotallyAntisymmetric, RenyiOrder::One, false).unwrap_err();
        assert!(matches!(err, Error::DimensionGuard { dim: 16_777_216, .. }));
    }

    #[test]
    fn search_matches_pairing() {
        let opts = SeesawOptions { restarts: 8, ..Default::default() };
        let one = multicopy_min_search::<f64>(3, 1, RenyiOrder::Infinity, &opts, false).unwrap();
        assert!((one.entropy - 1.0).abs() < 1e-8);
        let two = multicopy_min_search::<f64>(3, 2, RenyiOrder::Infinity, &opts, false).unwrap();
        assert!(two.entropy <= 3f64.log2() + 1e-6, "{}", two.entropy);
        assert!(two.entropy >= -two.spectrum.lambda_max().log2() - 1e-9);
    }
}
