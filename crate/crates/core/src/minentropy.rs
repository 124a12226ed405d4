//! Minimum output Rényi entropy by multi-start optimization over pure inputs.
//!
//! Finite orders use projected gradient descent on the unit sphere. The
//! gradient of `F(ρ)` with `ρ = Λ(|x⟩⟨x|)` is `Λ†(∂F/∂ρ)·x`, which every
//! [`OutputMap`] supplies through [`OutputMap::pullback`]. `p = ∞` goes
//! through the product-overlap seesaw, and `p = 0` minimizes the output rank.
//! Every reported value is attained by the returned input, so it is an upper
//! bound on the true minimum.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maxoverlap::{ProductOverlap, SeesawOptions};
use crate::renyi::{binary_entropy, spectrum_entropy_eps, RenyiOrder, DEFAULT_RANK_EPS};
use crate::scalar::{vec_norm, CMat, CVec, Real, C};
use crate::subspace::{channel_from_subspace, Channel, Subspace, SubspaceKind};
use crate::tensor::{hermitian_eigh_unchecked, random_vector, seeded_rng, PureState, SchmidtSpectrum};

/// A completely positive map evaluated on pure inputs. Outputs need not be
/// normalized; entropies are always taken of `ρ / Tr ρ`.
pub trait OutputMap<T: Real>: Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    /// `Λ(|x⟩⟨x|)` for unnormalized `x`.
    fn output(&self, x: &CVec<T>) -> CMat<T>;
    /// `Λ†(g)·x`, the derivative of `Tr[g Λ(|x⟩⟨x|)]` with respect to `x̄`.
    fn pullback(&self, x: &CVec<T>, g: &CMat<T>) -> CVec<T>;
}

impl<T: Real> OutputMap<T> for Channel<T> {
    fn input_dim(&self) -> usize {
        Channel::input_dim(self)
    }

    fn output_dim(&self) -> usize {
        Channel::output_dim(self)
    }

    fn output(&self, x: &CVec<T>) -> CMat<T> {
        self.apply_pure(x)
    }

    fn pullback(&self, x: &CVec<T>, g: &CMat<T>) -> CVec<T> {
        let (da, db) = (self.traced_dim(), Channel::output_dim(self));
        let psi = self.isometry() * x;
        let m = CMat::<T>::from_fn(da, db, |a, b| psi[a * db + b]);
        let mg = m * g.transpose();
        let v = CVec::<T>::from_fn(da * db, |i, _| mg[(i / db, i % db)]);
        self.isometry().adjoint() * v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinEntropyOptions {
    /// `None` picks 32, or 64 for `p < 1`.
    pub restarts: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub rank_eps: f64,
}

impl Default for MinEntropyOptions {
    fn default() -> Self {
        Self { restarts: None, tol: 1e-10, max_iter: 1000, seed: 0, rank_eps: DEFAULT_RANK_EPS }
    }
}

impl MinEntropyOptions {
    pub fn restarts_for(&self, p: RenyiOrder) -> usize {
        self.restarts.unwrap_or(if p.value() < 1.0 { 64 } else { 32 }).max(1)
    }

    pub fn seesaw(&self) -> SeesawOptions {
        SeesawOptions {
            restarts: self.restarts.unwrap_or(32).max(1),
            tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct MinEntropyResult<T: Real> {
    pub p: RenyiOrder,
    pub value: T,
    pub argmin: PureState<T>,
    pub spectrum_at_argmin: SchmidtSpectrum<T>,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Differentiable objectives on the normalized output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Objective {
    Renyi(f64),
    VonNeumann,
    /// `−log₂ λ_max(ρ / Tr ρ)`.
    MinEntropy,
    /// Smallest eigenvalue of `ρ / Tr ρ`; drives inputs towards rank drops.
    MinEigenvalue,
}

impl Objective {
    fn for_order(p: RenyiOrder) -> Option<Self> {
        match p {
            RenyiOrder::One => Some(Self::VonNeumann),
            RenyiOrder::Finite(q) => Some(Self::Renyi(q)),
            RenyiOrder::Infinity => Some(Self::MinEntropy),
            RenyiOrder::Zero => None,
        }
    }

    /// Objective value and its gradient with respect to the unnormalized `ρ`.
    fn evaluate<T: Real>(self, rho: &CMat<T>) -> (T, CMat<T>) {
        let n = rho.nrows();
        let (mu, v) = hermitian_eigh_unchecked(rho);
        let t = mu.iter().fold(T::zero(), |a, &b| a + b);
        let floor = T::tol(1e-14) * t;
        let clamp = |m: T| if m > floor { m } else { floor };
        let spectral = |w: &dyn Fn(usize) -> T| {
            let mut g = CMat::<T>::zeros(n, n);
            for j in 0..n {
                let col = v.column(j);
                g.ger(C::new(w(j), T::zero()), &col, &col.map(|z| z.conj()), C::new(T::one(), T::zero()));
            }
            g
        };
        let eye = CMat::<T>::identity(n, n);
        let ln2 = T::lit(LN_2);
        match self {
            Self::Renyi(q) => {
                let qt = T::lit(q);
                let spec = SchmidtSpectrum::from_weights(mu.iter().copied()).expect("nonzero output");
                let value = spectrum_entropy_eps(&spec, RenyiOrder::Finite(q), T::zero());
                let sum = mu.iter().fold(T::zero(), |a, &m| a + clamp(m).powf(qt));
                let coef = qt / ((T::one() - qt) * ln2);
                let g = spectral(&|j| clamp(mu[j]).powf(qt - T::one()) / sum) - eye.unscale(t);
                (value, g * C::new(coef, T::zero()))
            }
            Self::VonNeumann => {
                let spec = SchmidtSpectrum::from_weights(mu.iter().copied()).expect("nonzero output");
                let value = spectrum_entropy_eps(&spec, RenyiOrder::One, T::zero());
                let logs: Vec<T> = mu.iter().map(|&m| (clamp(m) / t).ln()).collect();
                let mean = mu.iter().zip(&logs).fold(T::zero(), |a, (&m, &l)| a + (m / t) * l);
                let g = spectral(&|j| logs[j] - mean);
                (value, g * C::new(-T::one() / (t * ln2), T::zero()))
            }
            Self::MinEntropy => {
                let top = mu[0];
                let value = -(top / t).log2();
                let g = spectral(&|j| if j == 0 { T::one() / top } else { T::zero() }) - eye.unscale(t);
                (value, g * C::new(-T::one() / ln2, T::zero()))
            }
            Self::MinEigenvalue => {
                let last = n - 1;
                let q = mu[last] / t;
                let g = spectral(&|j| if j == last { T::one() } else { T::zero() }) - eye * C::new(q, T::zero());
                (q, g.unscale(t))
            }
        }
    }
}

/// Result of one local descent.
#[derive(Clone, Debug)]
pub struct Descent<T: Real> {
    pub x: CVec<T>,
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Projected gradient descent on the unit sphere from `x0`, with step
/// doubling on success and halving on failure.
pub fn descend<T: Real, M: OutputMap<T> + ?Sized>(
    map: &M,
    objective: Objective,
    x0: CVec<T>,
    tol: f64,
    max_iter: usize,
) -> Descent<T> {
    let tol = T::lit(tol);
    let min_step = T::lit(1e-14);
    let mut x = x0.unscale(vec_norm(&x0));
    let (mut value, mut grad) = objective.evaluate(&map.output(&x));
    let mut step = T::lit(0.5);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let g = map.pullback(&x, &grad);
        let radial = crate::scalar::inner(&x, &g);
        let tangent = &g - &x * radial;
        if vec_norm(&tangent) < T::tol(1e-13) {
            converged = true;
            break;
        }
        let mut accepted = false;
        while step > min_step {
            let trial = &x - tangent.scale(step);
            let trial = trial.unscale(vec_norm(&trial));
            let (tv, tg) = objective.evaluate(&map.output(&trial));
            if tv < value {
                let gain = value - tv;
                x = trial;
                value = tv;
                grad = tg;
                step *= T::lit(2.0);
                accepted = true;
                if gain < tol {
                    converged = true;
                }
                break;
            }
            step *= T::lit(0.5);
        }
        if !accepted {
            converged = true;
        }
        if converged {
            break;
        }
    }
    Descent { x, value, iterations, converged }
}

fn output_spectrum<T: Real, M: OutputMap<T> + ?Sized>(map: &M, x: &CVec<T>) -> SchmidtSpectrum<T> {
    let rho = map.output(x);
    SchmidtSpectrum::from_weights(crate::tensor::hermitian_spectrum_unchecked(&rho))
        .expect("nonzero channel output")
}

struct Candidate<T: Real> {
    x: CVec<T>,
    score: (T, T),
    converged: bool,
}

/// Minimum output Rényi entropy of a general map from the given warm starts
/// plus random restarts.
pub fn min_output_renyi_map<T: Real, M: OutputMap<T> + ?Sized>(
    map: &M,
    p: RenyiOrder,
    warm_starts: &[CVec<T>],
    opts: &MinEntropyOptions,
) -> Result<MinEntropyResult<T>> {
    let k = map.input_dim();
    if k == 0 {
        return Err(Error::InvalidArgument("map has no inputs".into()));
    }
    let restarts = opts.restarts_for(p);
    let mut starts: Vec<CVec<T>> = warm_starts.to_vec();
    starts.extend((0..restarts).map(|r| {
        let mut rng = seeded_rng(opts.seed.wrapping_add(r as u64));
        random_vector::<T, _>(k, &mut rng)
    }));
    minimize(map, p, starts, restarts, opts)
}

fn minimize<T: Real, M: OutputMap<T> + ?Sized>(
    map: &M,
    p: RenyiOrder,
    starts: Vec<CVec<T>>,
    restarts_used: usize,
    opts: &MinEntropyOptions,
) -> Result<MinEntropyResult<T>> {
    let k = map.input_dim();
    let eps = T::lit(opts.rank_eps);
    let score = |x: &CVec<T>| -> (T, T) {
        let spec = output_spectrum(map, x);
        match p {
            // Rank first, then a smooth tie-breaker towards lower entropy.
            RenyiOrder::Zero => (
                spectrum_entropy_eps(&spec, RenyiOrder::Zero, eps),
                spectrum_entropy_eps(&spec, RenyiOrder::Finite(0.5), T::zero()),
            ),
            _ => (spectrum_entropy_eps(&spec, p, eps), T::zero()),
        }
    };

    let candidates: Vec<Candidate<T>> = starts
        .into_par_iter()
        .flat_map_iter(|x0| {
            let runs: Vec<Descent<T>> = match Objective::for_order(p) {
                Some(obj) => vec![descend(map, obj, x0, opts.tol, opts.max_iter)],
                None => vec![
                    descend(map, Objective::MinEigenvalue, x0.clone(), opts.tol, opts.max_iter),
                    descend(map, Objective::Renyi(0.5), x0, opts.tol, opts.max_iter),
                ],
            };
            runs.into_iter().map(|d| Candidate { score: score(&d.x), x: d.x, converged: d.converged })
        })
        .collect();

    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.score < candidates[best].score {
            best = i;
        }
    }
    let winner = candidates.into_iter().nth(best).ok_or_else(|| Error::InvalidArgument("no starting points".into()))?;
    let spectrum = output_spectrum(map, &winner.x);
    Ok(MinEntropyResult {
        p,
        value: spectrum_entropy_eps(&spectrum, p, eps),
        argmin: PureState::normalized(winner.x, vec![k])?,
        spectrum_at_argmin: spectrum,
        restarts_used,
        converged: winner.converged,
    })
}

/// Input whose image is the subspace vector closest to the seesaw's best
/// product state; its output has the largest Schmidt coefficient found.
fn seesaw_warm_start<T: Real>(channel: &Channel<T>, opts: &MinEntropyOptions) -> Option<CVec<T>> {
    let s = Subspace::new(channel.traced_dim(), channel.output_dim(), channel.isometry().clone()).ok()?;
    let res = ProductOverlap::from_subspace(&s).maximize(&opts.seesaw());
    let prod = res.witness_a.tensor(&res.witness_b);
    let x = channel.isometry().adjoint() * prod.amplitudes();
    let n = vec_norm(&x);
    (n > T::tol(1e-12)).then(|| x.unscale(n))
}

/// Minimum output Rényi entropy `min_x S_p(Λ(|x⟩⟨x|))` of a subspace channel.
pub fn min_output_renyi<T: Real>(
    channel: &Channel<T>,
    p: RenyiOrder,
    opts: &MinEntropyOptions,
) -> Result<MinEntropyResult<T>> {
    let warm: Vec<CVec<T>> = seesaw_warm_start(channel, opts).into_iter().collect();
    if p.is_infinite() && !warm.is_empty() {
        // The multi-start seesaw already is the p = ∞ search; polish its answer.
        return minimize(channel, p, warm, opts.seesaw().restarts, opts);
    }
    min_output_renyi_map(channel, p, &warm, opts)
}

/// Certified lower bound on the single-copy minimum output entropy of the
/// antisymmetric channel: every antisymmetric vector has `a_max² ≤ 1/2`, so
/// its reduction is majorized by `(1/2, 1/2)` and `S_p ≥ 1` bit for all `p`.
pub fn antisym_min_entropy_bound(d: usize, _p: RenyiOrder) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("antisymmetric subspace needs d >= 2, got {d}")));
    }
    Ok(1.0)
}

/// Left-hand side of the von Neumann sufficient condition for a
/// `d`-dimensional subspace of `C^D ⊗ C^D`:
/// `2(1 − d/D²)·log₂D + h(d/D²)`, to be compared against 2.
pub fn vn_violation_condition<T: Real>(big_d: usize, d: usize) -> Result<T> {
    if big_d == 0 || d == 0 || d > big_d * big_d {
        return Err(Error::InvalidArgument(format!("need 1 <= d <= D^2, got D={big_d}, d={d}")));
    }
    let x = T::count(d) / T::count(big_d * big_d);
    Ok(T::lit(2.0) * (T::one() - x) * T::count(big_d).log2() + binary_entropy(x)?)
}

/// Minimum entanglement of a user-supplied subspace, measured by `S_p` of
/// the `B` reduction.
pub fn screen_subspace<T: Real>(
    s: &Subspace<T>,
    p: RenyiOrder,
    opts: &MinEntropyOptions,
) -> Result<MinEntropyResult<T>> {
    min_output_renyi(&channel_from_subspace(s), p, opts)
}

/// Certified single-copy lower bound, when one is known for the subspace.
pub fn certified_lower_bound<T: Real>(s: &Subspace<T>, p: RenyiOrder) -> Option<T> {
    match s.kind() {
        SubspaceKind::Antisymmetric { d } => antisym_min_entropy_bound(d, p).ok().map(T::lit),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{antisymmetric_subspace, parthasarathy_subspace, random_subspace};

    fn antisym_channel(d: usize) -> Channel<f64> {
        channel_from_subspace(&antisymmetric_subspace(d).unwrap())
    }

    fn fast() -> MinEntropyOptions {
        MinEntropyOptions { restarts: Some(6), ..Default::default() }
    }

    #[test]
    fn pullback_matches_finite_differences() {
        let mut rng = seeded_rng(4);
        let s = random_subspace::<f64, _>(2, 3, 4, &mut rng).unwrap();
        let ch = channel_from_subspace(&s);
        let x = random_vector::<f64, _>(4, &mut rng);
        let g = {
            let h = random_vector::<f64, _>(3, &mut rng);
            &h * h.adjoint() + CMat::<f64>::identity(3, 3)
        };
        let f = |y: &CVec<f64>| (g.clone() * ch.output(y)).trace().re;
        let grad = ch.pullback(&x, &g);
        let h = 1e-6;
        for i in 0..4 {
            for dir in [C::new(1.0, 0.0), C::new(0.0, 1.0)] {
                let mut xp = x.clone();
                xp[i] += dir * h;
                let mut xm = x.clone();
                xm[i] -= dir * h;
                let fd = (f(&xp) - f(&xm)) / (2.0 * h);
                // df = 2 Re⟨grad, dx⟩
                let analytic = 2.0 * (grad[i].conj() * dir).re;
                assert!((fd - analytic).abs() < 1e-6, "{fd} vs {analytic}");
            }
        }
    }

    #[test]
    fn objective_gradients_match_finite_differences() {
        let mut rng = seeded_rng(8);
        let s = random_subspace::<f64, _>(3, 3, 3, &mut rng).unwrap();
        let ch = channel_from_subspace(&s);
        let x = random_vector::<f64, _>(3, &mut rng);
        for obj in [Objective::Renyi(2.0), Objective::Renyi(0.5), Objective::VonNeumann, Objective::MinEntropy, Objective::MinEigenvalue] {
            let f = |y: &CVec<f64>| obj.evaluate(&ch.output(y)).0;
            let (_, g) = obj.evaluate(&ch.output(&x));
            let grad = ch.pullback(&x, &g);
            let h = 1e-6;
            for i in 0..3 {
                let mut xp = x.clone();
                xp[i] += C::new(h, 0.0);
                let mut xm = x.clone();
                xm[i] -= C::new(h, 0.0);
                let fd = (f(&xp) - f(&xm)) / (2.0 * h);
                assert!((fd - 2.0 * grad[i].re).abs() < 1e-5, "{obj:?}: {fd} vs {}", 2.0 * grad[i].re);
            }
        }
    }

    #[test]
    fn antisymmetric_d3_von_neumann_is_one_bit() {
        let r = min_output_renyi(&antisym_channel(3), RenyiOrder::One, &fast()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn antisymmetric_d6_min_entropy() {
        let r = min_output_renyi(&antisym_channel(6), RenyiOrder::Infinity, &MinEntropyOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
        let lam = crate::maxoverlap::subspace_lambda_max(&antisymmetric_subspace::<f64>(6).unwrap(), &SeesawOptions::default());
        assert!((r.value + lam.value.log2()).abs() < 1e-8);
    }

    #[test]
    fn identity_channel_has_zero_minimum() {
        let ch = channel_from_subspace(&Subspace::<f64>::full(3, 3).unwrap());
        for p in [RenyiOrder::Zero, RenyiOrder::Finite(0.5), RenyiOrder::One, RenyiOrder::Finite(2.0), RenyiOrder::Infinity] {
            let r = min_output_renyi(&ch, p, &fast()).unwrap();
            assert!(r.value.abs() < 1e-6, "{p}: {}", r.value);
        }
    }

    #[test]
    fn antisymmetric_minima_respect_bound() {
        for d in 3..=5 {
            for p in [RenyiOrder::Finite(0.5), RenyiOrder::One, RenyiOrder::Finite(2.0), RenyiOrder::Infinity, RenyiOrder::Zero] {
                let r = min_output_renyi(&antisym_channel(d), p, &fast()).unwrap();
                assert!(r.value >= 1.0 - 1e-6, "d={d} {p}: {}", r.value);
                assert!((r.value - 1.0).abs() < 1e-6, "d={d} {p}: {}", r.value);
            }
        }
    }

    #[test]
    fn result_value_recomputes_from_argmin() {
        let s = parthasarathy_subspace::<f64>(3).unwrap();
        let ch = channel_from_subspace(&s);
        let r = min_output_renyi(&ch, RenyiOrder::One, &fast()).unwrap();
        let spec = output_spectrum(&ch, r.argmin.amplitudes());
        let recomputed = crate::renyi::spectrum_entropy(&spec, RenyiOrder::One);
        assert!((recomputed - r.value).abs() < 1e-8);
        assert!(r.value > 1e-3, "no product vectors, so strictly positive: {}", r.value);
    }

    #[test]
    fn d2_antisymmetric_is_exact() {
        // One-dimensional input: the only state is the singlet.
        let ch = antisym_channel(2);
        let x = CVec::<f64>::from_element(1, C::new(1.0, 0.0));
        let direct = crate::renyi::spectrum_entropy(&output_spectrum(&ch, &x), RenyiOrder::Finite(2.0));
        let r = min_output_renyi(&ch, RenyiOrder::Finite(2.0), &fast()).unwrap();
        assert_eq!(r.value, direct);
        assert!((direct - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vn_condition_values() {
        assert!((vn_violation_condition::<f64>(2, 2).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(vn_violation_condition::<f64>(3, 9).unwrap(), 0.0);
        // mpmath: 0.69595642690609781816
        assert!((vn_violation_condition::<f64>(16, 243).unwrap() - 0.695_956_426_906_097_8).abs() < 1e-13);
        assert!(vn_violation_condition::<f64>(2, 5).is_err());
    }

    #[test]
    fn bound_is_one_bit() {
        assert_eq!(antisym_min_entropy_bound(7, RenyiOrder::Finite(3.0)).unwrap(), 1.0);
        assert!(antisym_min_entropy_bound(1, RenyiOrder::One).is_err());
    }
}
