//! Trial-by-trial simulation of the multiplexed architecture.
//!
//! One trial: every source emits a geometric number of pairs, every herald
//! detector loses photons independently, the lowest-indexed `n` sources that
//! reported exactly one photon are routed to input modes `0..n` carrying
//! their true photon numbers, the resulting Fock state is propagated through
//! the interferometer by exact sampling, and the output detectors lose
//! photons again. The trial is post-selected when exactly `n` photons are
//! detected.

use std::collections::HashMap;
use std::ops::Add;
use std::sync::{Arc, Mutex};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{ArchitectureParams, DetectorModel, SpdcParams};
use crate::distribution::{output_distribution, Caps, OutputDistribution};
use crate::error::{domain, Result};
use crate::fock::FockConfiguration;
use crate::parallel;
use crate::rng;
use crate::unitary::Interferometer;

/// Number of pairs emitted by one source. Inverts the geometric CDF
/// `P(s >= k) = tanh^(2k) r` directly, so no truncation is involved.
pub fn sample_spdc<R: Rng + ?Sized>(params: &SpdcParams, rng: &mut R) -> u64 {
    let ratio = params.ratio();
    if ratio <= 0.0 {
        return 0;
    }
    // u in (0, 1]
    let u = 1.0 - rng.random::<f64>();
    let s = (u.ln() / ratio.ln()).floor();
    if s >= u64::MAX as f64 {
        u64::MAX
    } else {
        s as u64
    }
}

/// Photons surviving a detector when `s` arrive, one Bernoulli draw each.
pub fn sample_detection<R: Rng + ?Sized>(det: &DetectorModel, s: u64, rng: &mut R) -> u64 {
    let eta = det.eta();
    if eta >= 1.0 {
        return s;
    }
    if eta <= 0.0 {
        return 0;
    }
    (0..s).filter(|_| rng.random::<f64>() < eta).count() as u64
}

/// Everything that happened in one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub true_counts: Vec<u64>,
    pub herald_counts: Vec<u64>,
    /// Sources whose herald detector reported exactly one photon.
    pub heralded_indices: Vec<usize>,
    /// The sources routed into the interferometer; empty when preparation
    /// failed.
    pub routed_sources: Vec<usize>,
    /// Fock state entering the interferometer, `None` when preparation failed.
    pub input_config: Option<FockConfiguration>,
    /// Photon counts reported by the output detectors.
    pub output_config: Option<FockConfiguration>,
    pub post_selected: bool,
    /// Every routed source truly emitted one photon.
    pub input_correct: bool,
}

impl TrialRecord {
    pub fn prepared(&self) -> bool {
        self.input_config.is_some()
    }

    fn tally(&self) -> Tally {
        let contaminated = self.heralded_indices.iter().filter(|&&i| self.true_counts[i] != 1).count() as u64;
        Tally {
            trials: 1,
            prepared: self.prepared() as u64,
            input_correct: self.input_correct as u64,
            post_selected: self.post_selected as u64,
            correct_and_post_selected: (self.input_correct && self.post_selected) as u64,
            heralded_sources: self.heralded_indices.len() as u64,
            contaminated_heralds: contaminated,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    trials: u64,
    prepared: u64,
    input_correct: u64,
    post_selected: u64,
    correct_and_post_selected: u64,
    heralded_sources: u64,
    contaminated_heralds: u64,
}

impl Add for Tally {
    type Output = Tally;

    fn add(self, o: Tally) -> Tally {
        Tally {
            trials: self.trials + o.trials,
            prepared: self.prepared + o.prepared,
            input_correct: self.input_correct + o.input_correct,
            post_selected: self.post_selected + o.post_selected,
            correct_and_post_selected: self.correct_and_post_selected + o.correct_and_post_selected,
            heralded_sources: self.heralded_sources + o.heralded_sources,
            contaminated_heralds: self.contaminated_heralds + o.contaminated_heralds,
        }
    }
}

/// An empirical frequency with its binomial standard error
/// `sqrt(p (1 - p) / trials)`. Both are zero when `trials` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub std_error: f64,
}

impl Rate {
    pub fn new(successes: u64, trials: u64) -> Self {
        if trials == 0 {
            return Self { successes, trials, rate: 0.0, std_error: 0.0 };
        }
        let p = successes as f64 / trials as f64;
        Self { successes, trials, rate: p, std_error: (p * (1.0 - p) / trials as f64).sqrt() }
    }

    /// `(rate - expected) / std_error`; zero on exact agreement and infinite
    /// when a zero-variance estimate disagrees.
    pub fn z_score(&self, expected: f64) -> f64 {
        let diff = self.rate - expected;
        if diff == 0.0 {
            0.0
        } else if self.std_error == 0.0 {
            diff.signum() * f64::INFINITY
        } else {
            diff / self.std_error
        }
    }
}

/// Aggregated outcome of an ensemble of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub master_seed: u64,
    pub trials: u64,
    /// At least `n` sources heralded, over all trials.
    pub prep_success: Rate,
    /// Every routed source was correct, over prepared trials.
    pub par_correct: Rate,
    /// Post-selection succeeded, over prepared trials.
    pub post_select: Rate,
    /// Post-selection succeeded, over prepared trials with a correct input.
    pub post_select_given_correct: Rate,
    /// Input was correct, over post-selected trials.
    pub correct_given_post_selected: Rate,
    /// Heralded sources (t = 1) that did not emit exactly one photon.
    pub herald_contamination: Rate,
}

impl EnsembleStats {
    fn from_tally(master_seed: u64, t: Tally) -> Self {
        Self {
            master_seed,
            trials: t.trials,
            prep_success: Rate::new(t.prepared, t.trials),
            par_correct: Rate::new(t.input_correct, t.prepared),
            post_select: Rate::new(t.post_selected, t.prepared),
            post_select_given_correct: Rate::new(t.correct_and_post_selected, t.input_correct),
            correct_given_post_selected: Rate::new(t.correct_and_post_selected, t.post_selected),
            herald_contamination: Rate::new(t.contaminated_heralds, t.heralded_sources),
        }
    }
}

/// Runs trials of one architecture on one interferometer.
///
/// Output distributions are computed once per distinct input state and
/// shared between trials and threads.
pub struct Simulator {
    arch: ArchitectureParams,
    interferometer: Interferometer,
    caps: Caps,
    cache: Mutex<HashMap<FockConfiguration, Arc<OutputDistribution>>>,
}

impl Simulator {
    pub fn new(arch: ArchitectureParams, interferometer: Interferometer, caps: Caps) -> Result<Self> {
        if interferometer.dim() != arch.modes {
            return Err(domain(format!(
                "interferometer has {} modes but the architecture needs {}",
                interferometer.dim(),
                arch.modes
            )));
        }
        Ok(Self { arch, interferometer, caps, cache: Mutex::new(HashMap::new()) })
    }

    pub fn arch(&self) -> &ArchitectureParams {
        &self.arch
    }

    pub fn interferometer(&self) -> &Interferometer {
        &self.interferometer
    }

    fn distribution(&self, input: &FockConfiguration) -> Result<Arc<OutputDistribution>> {
        if let Some(d) = self.cache.lock().expect("cache poisoned").get(input) {
            return Ok(Arc::clone(d));
        }
        let dist = Arc::new(output_distribution(&self.interferometer, input, &self.caps)?);
        let mut cache = self.cache.lock().expect("cache poisoned");
        Ok(Arc::clone(cache.entry(input.clone()).or_insert(dist)))
    }

    pub fn run_trial<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TrialRecord> {
        let arch = &self.arch;
        let n = arch.n as usize;
        let true_counts: Vec<u64> = (0..arch.sources).map(|_| sample_spdc(&arch.spdc, rng)).collect();
        let herald_counts: Vec<u64> =
            true_counts.iter().map(|&s| sample_detection(&arch.herald_detector, s, rng)).collect();
        let heralded_indices: Vec<usize> =
            herald_counts.iter().enumerate().filter(|(_, &t)| t == 1).map(|(i, _)| i).collect();

        if heralded_indices.len() < n {
            return Ok(TrialRecord {
                true_counts,
                herald_counts,
                heralded_indices,
                routed_sources: Vec::new(),
                input_config: None,
                output_config: None,
                post_selected: false,
                input_correct: false,
            });
        }

        let routed_sources = heralded_indices[..n].to_vec();
        let mut occ = vec![0u32; arch.modes];
        for (mode, &src) in routed_sources.iter().enumerate() {
            occ[mode] = u32::try_from(true_counts[src])
                .map_err(|_| domain(format!("source {src} emitted too many photons")))?;
        }
        let input_config = FockConfiguration::new(occ);
        let input_correct = routed_sources.iter().all(|&i| true_counts[i] == 1);

        let dist = self.distribution(&input_config)?;
        let arriving = dist.sample(rng);
        let detected: Vec<u32> = arriving
            .occupations()
            .iter()
            .map(|&k| sample_detection(&arch.output_detector, k as u64, rng) as u32)
            .collect();
        let output_config = FockConfiguration::new(detected);
        let post_selected = output_config.total() as usize == n;

        Ok(TrialRecord {
            true_counts,
            herald_counts,
            heralded_indices,
            routed_sources,
            input_config: Some(input_config),
            output_config: Some(output_config),
            post_selected,
            input_correct,
        })
    }

    /// Trial `i` uses its own stream, [`rng::trial_stream`]`(master_seed, i)`,
    /// and counts are summed as integers, so the result does not depend on
    /// the number of workers.
    pub fn run_ensemble(&self, master_seed: u64, trials: u64) -> Result<EnsembleStats> {
        self.run_ensemble_with_workers(master_seed, trials, None)
    }

    pub fn run_ensemble_with_workers(
        &self,
        master_seed: u64,
        trials: u64,
        workers: Option<usize>,
    ) -> Result<EnsembleStats> {
        if trials == 0 {
            return Err(domain("trials must be >= 1"));
        }
        let tally = parallel::with_workers(workers, || {
            parallel::map_reduce(
                trials,
                |i| {
                    let mut rng = rng::trial_stream(master_seed, i);
                    self.run_trial(&mut rng).map(|rec| rec.tally())
                },
                || Ok(Tally::default()),
                |a, b| match (a, b) {
                    (Ok(a), Ok(b)) => Ok(a + b),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                },
            )
        })?;
        Ok(EnsembleStats::from_tally(master_seed, tally))
    }

    /// Like [`Simulator::run_ensemble`] but also returns every trial record,
    /// in trial order.
    pub fn run_ensemble_records(
        &self,
        master_seed: u64,
        trials: u64,
        workers: Option<usize>,
    ) -> Result<(EnsembleStats, Vec<TrialRecord>)> {
        if trials == 0 {
            return Err(domain("trials must be >= 1"));
        }
        let records = parallel::with_workers(workers, || {
            parallel::map_indexed(trials as usize, |i| {
                let mut rng = rng::trial_stream(master_seed, i as u64);
                self.run_trial(&mut rng)
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let tally = records.iter().map(TrialRecord::tally).fold(Tally::default(), Add::add);
        Ok((EnsembleStats::from_tally(master_seed, tally), records))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn spdc(r: f64) -> SpdcParams {
        SpdcParams::new(r).unwrap()
    }

    fn det(eta: f64) -> DetectorModel {
        DetectorModel::new(eta).unwrap()
    }

    #[test]
    fn zero_squeezing_emits_nothing() {
        let mut rng = stream(1, 0);
        assert!((0..1000).all(|_| sample_spdc(&spdc(0.0), &mut rng) == 0));
    }

    #[test]
    fn detection_extremes() {
        let mut rng = stream(2, 0);
        for s in 0..20 {
            assert_eq!(sample_detection(&det(1.0), s, &mut rng), s);
            assert_eq!(sample_detection(&det(0.0), s, &mut rng), 0);
        }
    }

    #[test]
    fn rate_edge_cases() {
        let r = Rate::new(0, 0);
        assert_eq!((r.rate, r.std_error), (0.0, 0.0));
        let r = Rate::new(1, 1);
        assert_eq!((r.rate, r.std_error), (1.0, 0.0));
        assert_eq!(r.z_score(1.0), 0.0);
        assert_eq!(r.z_score(0.5), f64::INFINITY);
        let r = Rate::new(30, 100);
        assert!((r.std_error - (0.3f64 * 0.7 / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_trial_ensemble_is_indicator() {
        let arch = ArchitectureParams::with_modes(2, 10, 4, spdc(0.5), det(0.9), det(0.9)).unwrap();
        let sim = Simulator::new(arch, crate::unitary::haar_unitary(4, 1).unwrap(), Caps::default()).unwrap();
        let stats = sim.run_ensemble(9, 1).unwrap();
        for r in [stats.prep_success, stats.par_correct, stats.post_select] {
            assert!(r.rate == 0.0 || r.rate == 1.0);
            assert!(r.trials <= 1);
        }
        assert!(sim.run_ensemble(9, 0).is_err());
    }

    #[test]
    fn interferometer_size_must_match() {
        let arch = ArchitectureParams::new(2, 10, spdc(0.5), det(0.9), det(0.9)).unwrap();
        assert!(Simulator::new(arch, Interferometer::identity(3).unwrap(), Caps::default()).is_err());
    }
}
