//! Exact output statistics of Fock states through an interferometer.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fock::{self, FockConfiguration};
use crate::parallel;
use crate::permanent::{self, DEFAULT_PERMANENT_CAP};
use crate::rng;
use crate::unitary::Interferometer;

pub const DEFAULT_ENUMERATION_CAP: u128 = 2_000_000;

/// Normalisation slack accepted for an enumerated distribution.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Resource limits for exact simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest permanent order evaluated.
    pub permanent: usize,
    /// Largest number of output configurations enumerated.
    pub enumeration: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Self { permanent: DEFAULT_PERMANENT_CAP, enumeration: DEFAULT_ENUMERATION_CAP }
    }
}

/// Transition amplitude `<output| U |input>`:
/// `Per(U[input rows, output cols]) / sqrt(prod in_i! prod out_j!)`, where
/// row `i` is repeated `in_i` times and column `j` is repeated `out_j` times.
pub fn output_amplitude(
    u: &Interferometer,
    input: &FockConfiguration,
    output: &FockConfiguration,
) -> Result<Complex64> {
    output_amplitude_with_cap(u, input, output, DEFAULT_PERMANENT_CAP)
}

pub fn output_amplitude_with_cap(
    u: &Interferometer,
    input: &FockConfiguration,
    output: &FockConfiguration,
    permanent_cap: usize,
) -> Result<Complex64> {
    check_modes(u, input)?;
    check_modes(u, output)?;
    if input.total() != output.total() {
        return Err(domain(format!(
            "photon number mismatch: input carries {}, output carries {}",
            input.total(),
            output.total()
        )));
    }
    let per =
        permanent::permanent_with_multiplicities(u.matrix(), input.occupations(), output.occupations(), permanent_cap)?;
    Ok(per / (input.factorial_product() * output.factorial_product()).sqrt())
}

fn check_modes(u: &Interferometer, c: &FockConfiguration) -> Result<()> {
    if c.modes() != u.dim() {
        return Err(domain(format!("configuration has {} modes but the interferometer has {}", c.modes(), u.dim())));
    }
    Ok(())
}

/// Probabilities of every output configuration for one input, in descending
/// lexicographic order of the configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDistribution {
    input: FockConfiguration,
    entries: Vec<(FockConfiguration, f64)>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl OutputDistribution {
    /// Rebuilds a distribution from stored entries, checking that they cover
    /// every configuration once, in order, and sum to one.
    pub fn from_entries(input: FockConfiguration, entries: Vec<(FockConfiguration, f64)>) -> Result<Self> {
        let n = input.total();
        let m = input.modes();
        let expected = fock::configuration_count(n, m).unwrap_or(u128::MAX);
        if entries.len() as u128 != expected {
            return Err(domain(format!(
                "distribution has {} entries, expected C(n+m-1, n) = {expected}",
                entries.len()
            )));
        }
        for (c, p) in &entries {
            if c.modes() != m || c.total() != n {
                return Err(domain(format!("entry {c} does not hold {n} photons in {m} modes")));
            }
            if !(*p >= 0.0 && *p <= 1.0 + NORMALIZATION_TOLERANCE) {
                return Err(domain(format!("entry {c} has invalid probability {p}")));
            }
        }
        if !entries.windows(2).all(|w| w[0].0 > w[1].0) {
            return Err(domain("entries are not in descending lexicographic order"));
        }
        let dist = Self::assemble(input, entries);
        let total = dist.total();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Normalization { total });
        }
        Ok(dist)
    }

    fn assemble(input: FockConfiguration, entries: Vec<(FockConfiguration, f64)>) -> Self {
        let mut acc = 0.0;
        let cumulative = entries
            .iter()
            .map(|(_, p)| {
                acc += p;
                acc
            })
            .collect();
        Self { input, entries, cumulative }
    }

    pub fn input(&self) -> &FockConfiguration {
        &self.input
    }

    pub fn entries(&self) -> &[(FockConfiguration, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn probability(&self, config: &FockConfiguration) -> f64 {
        self.entries.binary_search_by(|(c, _)| config.cmp(c)).map(|i| self.entries[i].1).unwrap_or(0.0)
    }

    /// Draws one configuration by inverting the cumulative distribution.
    /// Zero-probability entries are never returned.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &FockConfiguration {
        let u = rng.random::<f64>() * self.total();
        let mut idx = self.cumulative.partition_point(|&c| c <= u);
        if idx >= self.entries.len() {
            // u rounded onto the total; take the last entry with mass.
            idx = self.entries.iter().rposition(|(_, p)| *p > 0.0).expect("distribution has positive mass");
        }
        &self.entries[idx].0
    }
}

/// Enumerates every output configuration of `input` and its probability
/// `|amplitude|^2`.
pub fn output_distribution(u: &Interferometer, input: &FockConfiguration, caps: &Caps) -> Result<OutputDistribution> {
    check_modes(u, input)?;
    let n = input.total();
    if n as usize > caps.permanent {
        return Err(Error::ResourceLimit {
            what: "photon number (permanent order)",
            count: n as u128,
            cap: caps.permanent as u128,
        });
    }
    let configs = fock::enumerate(n, u.dim(), caps.enumeration)?;

    // Only the occupied input rows matter.
    let occupied: Vec<usize> = (0..u.dim()).filter(|&i| input.occupations()[i] > 0).collect();
    let row_mult: Vec<u32> = occupied.iter().map(|&i| input.occupations()[i]).collect();
    let rows = DMatrix::from_fn(occupied.len(), u.dim(), |a, j| u.matrix()[(occupied[a], j)]);
    let in_fact = input.factorial_product();
    let probs = parallel::map_slice(&configs, |out| {
        permanent::permanent_with_multiplicities(&rows, &row_mult, out.occupations(), caps.permanent)
            .map(|per| per.norm_sqr() / (in_fact * out.factorial_product()))
    });
    let mut entries = Vec::with_capacity(configs.len());
    for (c, p) in configs.into_iter().zip(probs) {
        entries.push((c, p?));
    }
    let dist = OutputDistribution::assemble(input.clone(), entries);
    let total = dist.total();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Normalization { total });
    }
    Ok(dist)
}

/// `count` samples drawn from stream [`rng::SAMPLE_STREAM`] of `seed`.
pub fn sample_output(dist: &OutputDistribution, seed: u64, count: usize) -> Vec<FockConfiguration> {
    let mut rng = rng::stream(seed, rng::SAMPLE_STREAM);
    (0..count).map(|_| dist.sample(&mut rng).clone()).collect()
}
