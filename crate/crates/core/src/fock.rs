//! Occupation-number configurations of photons over interferometer modes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Photon count per mode. Two configurations are equal iff their vectors are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FockConfiguration(Vec<u32>);

impl FockConfiguration {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    /// One photon in each of the first `n` of `modes` modes.
    pub fn standard_input(n: usize, modes: usize) -> Result<Self> {
        if n > modes {
            return Err(domain(format!("cannot place {n} single photons in {modes} modes")));
        }
        let mut occ = vec![0; modes];
        occ[..n].fill(1);
        Ok(Self(occ))
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn occupations(&self) -> &[u32] {
        &self.0
    }

    pub fn into_occupations(self) -> Vec<u32> {
        self.0
    }

    /// Mode indices with each mode repeated by its occupation.
    pub fn mode_list(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(mode, &k)| std::iter::repeat_n(mode, k as usize)).collect()
    }

    /// `prod_i occ_i!`.
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&k| (1..=k).map(f64::from).product::<f64>()).product()
    }
}

impl fmt::Display for FockConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Number of ways to place `photons` indistinguishable photons in `modes`
/// modes, `C(photons + modes - 1, photons)`. `None` on `u128` overflow.
pub fn configuration_count(photons: u32, modes: usize) -> Option<u128> {
    if modes == 0 {
        return Some(if photons == 0 { 1 } else { 0 });
    }
    let n = photons as u128 + modes as u128 - 1;
    let k = (photons as u128).min(modes as u128 - 1);
    let mut acc: u128 = 1;
    for j in 1..=k {
        acc = acc.checked_mul(n - k + j)? / j;
    }
    Some(acc)
}

/// All configurations of `photons` photons over `modes` modes, in descending
/// lexicographic order: `(n, 0, .., 0)` first and `(0, .., 0, n)` last.
pub fn enumerate(photons: u32, modes: usize, cap: u128) -> Result<Vec<FockConfiguration>> {
    let count = configuration_count(photons, modes).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::ResourceLimit { what: "output configurations", count, cap });
    }
    if modes == 0 {
        return Ok(if photons == 0 { vec![FockConfiguration(Vec::new())] } else { Vec::new() });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut occ = vec![0u32; modes];
    fill(&mut occ, 0, photons, &mut out);
    debug_assert_eq!(out.len() as u128, count);
    Ok(out)
}

fn fill(occ: &mut [u32], mode: usize, remaining: u32, out: &mut Vec<FockConfiguration>) {
    if mode + 1 == occ.len() {
        occ[mode] = remaining;
        out.push(FockConfiguration(occ.to_vec()));
        return;
    }
    for k in (0..=remaining).rev() {
        occ[mode] = k;
        fill(occ, mode + 1, remaining - k, out);
    }
    occ[mode] = 0;
}
