//! Closed-form statistics of a heralded-SPDC boson-sampling source farm.
//!
//! Every function here is a pure function of its value-type arguments. The
//! photon-number law of a single down-converter is geometric with ratio
//! `tanh^2 r`, which gives closed forms for the truncation order, the
//! single-photon herald probability and the heralding fidelity.

use serde::{Deserialize, Serialize};

use crate::binomial;
use crate::error::{domain, Error, Result};

/// Largest tail mass allowed beyond the truncation order of a photon-number
/// series.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Default post-selection bound.
pub const DEFAULT_EPSILON: f64 = 0.5;
/// Default heralding-fidelity bound.
pub const DEFAULT_EPSILON_PRIME: f64 = 0.9;

/// Truncation targets a tenth of the tolerance so that summation rounding over
/// thousands of terms cannot push the kept mass below `1 - TAIL_TOLERANCE`.
const TAIL_TARGET: f64 = TAIL_TOLERANCE / 10.0;

const MAX_SERIES_TERMS: u64 = 100_000_000;
const SERIES_CUTOFF: f64 = 1e-17;

/// Squeezing of one down-converter together with the truncation order used
/// when its photon-number law is summed explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpdcParams {
    r: f64,
    s_max: u64,
}

impl SpdcParams {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(domain(format!("squeezing r must be finite and >= 0, got {r}")));
        }
        Ok(Self { r, s_max: truncation_order(r.tanh().powi(2)) })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Highest photon number kept when the series is summed term by term.
    /// The discarded mass `tanh^(2(s_max+1)) r` is below [`TAIL_TOLERANCE`].
    pub fn s_max(&self) -> u64 {
        self.s_max
    }

    /// `tanh^2 r`, the ratio between successive photon-number probabilities.
    pub fn ratio(&self) -> f64 {
        self.r.tanh().powi(2)
    }

    /// `1 / cosh^2 r`, the vacuum probability.
    pub fn vacuum(&self) -> f64 {
        (1.0 / self.r.cosh()).powi(2)
    }

    /// Mean photon number per mode, `sinh^2 r`.
    pub fn mean_photons(&self) -> f64 {
        self.r.sinh().powi(2)
    }
}

/// Smallest `s_max >= 1` with `ratio^(s_max + 1) < TAIL_TARGET`.
fn truncation_order(ratio: f64) -> u64 {
    if ratio <= 0.0 {
        return 1;
    }
    if ratio >= 1.0 {
        return u64::MAX;
    }
    let guess = (TAIL_TARGET.ln() / ratio.ln()).floor();
    if guess >= u64::MAX as f64 {
        return u64::MAX;
    }
    let mut s_max = (guess as u64).max(1);
    while s_max > 1 && ratio.powf(s_max as f64) < TAIL_TARGET {
        s_max -= 1;
    }
    while ratio.powf((s_max + 1) as f64) >= TAIL_TARGET {
        s_max += 1;
    }
    s_max
}

/// Number-resolving detector that loses each photon independently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    eta: f64,
}

impl DetectorModel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(domain(format!("detector efficiency must lie in [0, 1], got {eta}")));
        }
        Ok(Self { eta })
    }

    pub fn perfect() -> Self {
        Self { eta: 1.0 }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Size and components of the multiplexed architecture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArchitectureParams {
    /// Photons required at the interferometer input.
    pub n: u32,
    /// Down-converters operated in parallel.
    pub sources: u64,
    /// Interferometer modes.
    pub modes: usize,
    pub spdc: SpdcParams,
    pub herald_detector: DetectorModel,
    pub output_detector: DetectorModel,
}

impl ArchitectureParams {
    /// Builds an architecture with the default `n^2` interferometer modes.
    pub fn new(
        n: u32,
        sources: u64,
        spdc: SpdcParams,
        herald_detector: DetectorModel,
        output_detector: DetectorModel,
    ) -> Result<Self> {
        let modes = (n as usize).pow(2);
        Self::with_modes(n, sources, modes, spdc, herald_detector, output_detector)
    }

    pub fn with_modes(
        n: u32,
        sources: u64,
        modes: usize,
        spdc: SpdcParams,
        herald_detector: DetectorModel,
        output_detector: DetectorModel,
    ) -> Result<Self> {
        if n == 0 {
            return Err(domain("photon count n must be >= 1"));
        }
        if sources < n as u64 {
            return Err(domain(format!("need sources >= n, got sources = {sources}, n = {n}")));
        }
        if modes < n as usize {
            return Err(domain(format!("need modes >= n, got modes = {modes}, n = {n}")));
        }
        Ok(Self { n, sources, modes, spdc, herald_detector, output_detector })
    }
}

/// Lower bounds on the post-selection probability (`epsilon`) and on the
/// probability that every routed photon was heralded correctly
/// (`epsilon_prime`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceBounds {
    epsilon: f64,
    epsilon_prime: f64,
}

impl ConfidenceBounds {
    pub fn new(epsilon: f64, epsilon_prime: f64) -> Result<Self> {
        for (name, v) in [("epsilon", epsilon), ("epsilon_prime", epsilon_prime)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(domain(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        Ok(Self { epsilon, epsilon_prime })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn epsilon_prime(&self) -> f64 {
        self.epsilon_prime
    }
}

impl Default for ConfidenceBounds {
    fn default() -> Self {
        Self { epsilon: DEFAULT_EPSILON, epsilon_prime: DEFAULT_EPSILON_PRIME }
    }
}

/// Probability that a down-converter emits `s` pairs: `tanh^(2s) r / cosh^2 r`.
pub fn spdc_prob(params: &SpdcParams, s: u64) -> f64 {
    let ratio = params.ratio();
    if s == 0 {
        return params.vacuum();
    }
    if ratio == 0.0 {
        return 0.0;
    }
    params.vacuum() * ratio.powf(s as f64)
}

/// Probability that the detector reports `t` photons when `s` arrive.
pub fn detector_prob(det: &DetectorModel, t: u64, s: u64) -> Result<f64> {
    if t > s {
        return Err(domain(format!("detector cannot report more photons than arrive (t = {t}, s = {s})")));
    }
    Ok(binomial::pmf(s, t, det.eta))
}

/// Probability that the herald detector of one source reports `t` photons,
/// summed over every emitted photon number `i >= t`.
///
/// The series is summed until the remaining tail, bounded geometrically, is
/// below `1e-17` of the running sum.
pub fn herald_prob(params: &SpdcParams, det: &DetectorModel, t: u64) -> f64 {
    let eta = det.eta;
    let ratio = params.ratio();
    if t == 0 && eta == 0.0 {
        return 1.0;
    }
    if eta == 0.0 || (t > 0 && ratio == 0.0) {
        return 0.0;
    }
    let loss = 1.0 - eta;
    // Term i: C(i, t) eta^t loss^(i - t) ratio^i / cosh^2 r.
    let mut term = spdc_prob(params, t) * eta.powf(t as f64);
    let mut sum = term;
    let mut i = t;
    for _ in 0..MAX_SERIES_TERMS {
        let step = (i + 1) as f64 / (i + 1 - t) as f64 * loss * ratio;
        term *= step;
        sum += term;
        i += 1;
        let next = (i + 1) as f64 / (i + 1 - t) as f64 * loss * ratio;
        if next < 1.0 && term * next / (1.0 - next) <= sum * SERIES_CUTOFF {
            break;
        }
    }
    sum
}

/// Closed form of `herald_prob(params, det, 1)`:
/// `eta tanh^2 r / (cosh^2 r (1 - (1 - eta) tanh^2 r)^2)`.
pub fn herald_single_closed_form(params: &SpdcParams, det: &DetectorModel) -> f64 {
    let ratio = params.ratio();
    let denom = 1.0 - (1.0 - det.eta) * ratio;
    det.eta * ratio * params.vacuum() / (denom * denom)
}

/// Probability that at least `arch.n` of the `arch.sources` sources herald
/// exactly one photon.
pub fn prep_prob(arch: &ArchitectureParams) -> f64 {
    prep_prob_counts(arch.n as u64, arch.sources, &arch.spdc, &arch.herald_detector)
        .expect("architecture invariants guarantee sources >= n")
}

/// [`prep_prob`] for explicit counts; `n = 0` is allowed and gives 1.
pub fn prep_prob_counts(n: u64, sources: u64, spdc: &SpdcParams, herald: &DetectorModel) -> Result<f64> {
    if sources < n {
        return Err(domain(format!("need sources >= n, got sources = {sources}, n = {n}")));
    }
    let p = herald_single_closed_form(spdc, herald);
    Ok(binomial::upper_tail(sources, n, p))
}

/// Probability that all `n` photons survive output detection: `eta^n`.
pub fn post_select_prob(n: u32, det: &DetectorModel) -> f64 {
    det.eta.powi(n as i32)
}

/// Posterior probability that a source emitted `s` photons given that its
/// herald detector reported `t`.
pub fn corr_prob(params: &SpdcParams, det: &DetectorModel, s: u64, t: u64) -> Result<f64> {
    let likelihood = detector_prob(det, t, s)?;
    let evidence = herald_prob(params, det, t);
    if evidence <= 0.0 {
        return Err(Error::UndefinedPosterior { t });
    }
    Ok((likelihood * spdc_prob(params, s) / evidence).min(1.0))
}

/// Closed form of `corr_prob(params, det, 1, 1)`: `[1 - (1 - eta) tanh^2 r]^2`.
pub fn single_herald_fidelity(params: &SpdcParams, det: &DetectorModel) -> f64 {
    let base = 1.0 - (1.0 - det.eta) * params.ratio();
    base * base
}

/// Probability that `n` independent single-photon heralds are all correct.
pub fn par_prob(n: u32, params: &SpdcParams, det: &DetectorModel) -> f64 {
    single_herald_fidelity(params, det).powf(n as f64)
}

/// Detector efficiency at which post-selection of `n` photons succeeds with
/// probability exactly `epsilon`: `epsilon^(1/n)`.
pub fn eta_for_post(n: u32, bounds: &ConfidenceBounds) -> f64 {
    bounds.epsilon.powf(1.0 / n as f64)
}

/// Heralding correctness of `n` photons when every detector runs at
/// [`eta_for_post`]: `[1 + (epsilon^(1/n) - 1) tanh^2 r]^(2n)`.
pub fn par_prob_bounded(n: u32, params: &SpdcParams, bounds: &ConfidenceBounds) -> f64 {
    let nf = n as f64;
    let root_minus_one = (bounds.epsilon.ln() / nf).exp_m1();
    let base = 1.0 + root_minus_one * params.ratio();
    (2.0 * nf * base.ln()).exp()
}

/// Large-`n` limit of [`par_prob_bounded`]: `epsilon^(2 tanh^2 r)`.
pub fn par_prob_limit(params: &SpdcParams, bounds: &ConfidenceBounds) -> f64 {
    bounds.epsilon.powf(2.0 * params.ratio())
}

/// Detector efficiency at which `n` heralds are all correct with probability
/// `epsilon_prime`: `1 + (epsilon_prime^(1/2n) - 1) coth^2 r`.
///
/// Fails with [`Error::Infeasible`] when the value is negative, i.e. no
/// detector can reach the requested fidelity at this squeezing.
pub fn eta_from_fidelity(n: u32, params: &SpdcParams, bounds: &ConfidenceBounds) -> Result<f64> {
    if params.r == 0.0 {
        return Err(Error::SingularCoth);
    }
    if n == 0 {
        return Err(domain("photon count n must be >= 1"));
    }
    let root_minus_one = (bounds.epsilon_prime.ln() / (2.0 * n as f64)).exp_m1();
    let eta = 1.0 + root_minus_one / params.ratio();
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Infeasible { eta });
    }
    Ok(eta)
}

/// Post-selection probability at the efficiency of [`eta_from_fidelity`].
pub fn post_prob_given_fidelity(n: u32, params: &SpdcParams, bounds: &ConfidenceBounds) -> Result<f64> {
    let eta = eta_from_fidelity(n, params, bounds)?;
    Ok(post_select_prob(n, &DetectorModel { eta }))
}
