//! Sampling estimates of `min γ_i`, where `γ_i = ‖B‖_c / ‖B_i‖_c` compares an
//! expression's classical bound with that of its `i`-th block.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{check_cap, lhv_bound, StrategyEvaluator, DEFAULT_PARTY_CAP};
use crate::error::{Error, Result};
use crate::expr::{dimension, BellExpression};
use crate::rng::{substream, unit_vector, Purpose};

/// Samples whose block bound falls below this are skipped for that block.
pub const SKIP_EPS: f64 = 1e-9;

/// `‖B‖_c / ‖B_i‖_c` for 1-based `i`; infinite when block `i` is empty.
pub fn gamma_for(expr: &BellExpression, i: usize) -> Result<f64> {
    let block = expr.block(i)?;
    let full = lhv_bound(expr)?.value;
    if block.is_empty() {
        return Ok(f64::INFINITY);
    }
    Ok(full / lhv_bound(&block.to_expression())?.value)
}

/// All block ratios `γ_1 … γ_m`.
pub fn gammas(expr: &BellExpression) -> Result<Vec<f64>> {
    (1..=expr.parties()).map(|i| gamma_for(expr, i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaScanConfig {
    pub parties: usize,
    pub samples: u64,
    pub seed: u64,
    pub cap: usize,
}

impl GammaScanConfig {
    pub fn new(parties: usize, samples: u64, seed: u64) -> Self {
        GammaScanConfig { parties, samples, seed, cap: DEFAULT_PARTY_CAP }
    }

    /// Sample count used when none is given.
    pub fn default_samples(parties: usize) -> u64 {
        if parties <= 4 {
            10_000
        } else {
            1_000
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaEntry {
    /// 1-based block index.
    pub index: usize,
    pub gamma_min: Option<f64>,
    pub witness_sample: Option<u64>,
    pub witness: Option<Vec<f64>>,
    pub skipped: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaScanResult {
    pub parties: usize,
    pub samples: u64,
    pub seed: u64,
    pub entries: Vec<GammaEntry>,
}

impl GammaScanResult {
    pub fn entry(&self, i: usize) -> &GammaEntry {
        &self.entries[i - 1]
    }

    /// `γ_1 … γ_m` minima with unresolved entries as infinity.
    pub fn minima(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.gamma_min.unwrap_or(f64::INFINITY)).collect()
    }
}

/// The coefficient vector drawn for `sample`.
pub fn sample_vector(parties: usize, seed: u64, sample: u64) -> Vec<f64> {
    unit_vector(&mut substream(seed, Purpose::GammaSample, sample), dimension(parties))
}

/// `(‖B‖_c, [‖B_1‖_c … ‖B_m‖_c])` in a single pass over strategies.
pub fn block_bounds(parties: usize, coeffs: &[f64]) -> (f64, Vec<f64>) {
    let mut eval = StrategyEvaluator::new(parties);
    let mut blocks = vec![0.0; parties];
    let mut best = vec![0.0f64; parties];
    let mut full_best = 0.0f64;
    for bits in 0..1u64 << (2 * parties) {
        eval.load(bits);
        let full = eval.block_values(coeffs, &mut blocks);
        full_best = full_best.max(full.abs());
        for (b, v) in best.iter_mut().zip(&blocks) {
            *b = b.max(v.abs());
        }
    }
    (full_best, best)
}

#[derive(Clone, Copy)]
struct Min {
    gamma: f64,
    sample: u64,
}

#[derive(Clone)]
struct Acc {
    mins: Vec<Option<Min>>,
    skipped: Vec<u64>,
}

impl Acc {
    fn new(parties: usize) -> Self {
        Acc { mins: vec![None; parties], skipped: vec![0; parties] }
    }

    fn merge(mut self, other: Acc) -> Acc {
        for (a, b) in self.mins.iter_mut().zip(other.mins) {
            *a = match (*a, b) {
                (None, x) | (x, None) => x,
                (Some(x), Some(y)) => Some(if y.gamma < x.gamma || (y.gamma == x.gamma && y.sample < x.sample) { y } else { x }),
            };
        }
        for (a, b) in self.skipped.iter_mut().zip(other.skipped) {
            *a += b;
        }
        self
    }
}

/// Ratios of every sampled expression, for inspection; `None` marks a
/// skipped block.
pub fn sample_gammas(parties: usize, seed: u64, sample: u64) -> Vec<Option<f64>> {
    let coeffs = sample_vector(parties, seed, sample);
    let (full, blocks) = block_bounds(parties, &coeffs);
    blocks.iter().map(|&b| (b >= SKIP_EPS).then(|| full / b)).collect()
}

/// Sampled minima of `γ_1 … γ_m` over `samples` random unit coefficient
/// vectors.
///
/// Each sample contributes to every index; ties go to the lowest sample.
/// Entries where every sample was skipped carry `None`.
pub fn scan(config: &GammaScanConfig) -> Result<GammaScanResult> {
    let m = config.parties;
    if m < 2 {
        return Err(Error::Domain("at least two parties are required".into()));
    }
    check_cap(m, config.cap)?;
    if config.samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let acc = (0..config.samples)
        .into_par_iter()
        .fold(
            || Acc::new(m),
            |mut acc, sample| {
                for (i, g) in sample_gammas(m, config.seed, sample).into_iter().enumerate() {
                    match g {
                        None => acc.skipped[i] += 1,
                        Some(gamma) => {
                            let cand = Min { gamma, sample };
                            acc.mins[i] = Some(match acc.mins[i] {
                                Some(cur) if cur.gamma < gamma || (cur.gamma == gamma && cur.sample < sample) => cur,
                                _ => cand,
                            });
                        }
                    }
                }
                acc
            },
        )
        .reduce(|| Acc::new(m), Acc::merge);
    let entries = (0..m)
        .map(|i| GammaEntry {
            index: i + 1,
            gamma_min: acc.mins[i].map(|x| x.gamma),
            witness_sample: acc.mins[i].map(|x| x.sample),
            witness: acc.mins[i].map(|x| sample_vector(m, config.seed, x.sample)),
            skipped: acc.skipped[i],
        })
        .collect();
    Ok(GammaScanResult { parties: m, samples: config.samples, seed: config.seed, entries })
}

/// [`scan`] that fails when any index has no usable sample.
pub fn algorithm1(config: &GammaScanConfig) -> Result<GammaScanResult> {
    let result = scan(config)?;
    if let Some(e) = result.entries.iter().find(|e| e.gamma_min.is_none()) {
        return Err(Error::AllSamplesSkipped { index: e.index });
    }
    Ok(result)
}

/// Minima over the given coefficient vectors instead of random samples.
pub fn scan_vectors(parties: usize, vectors: &[Vec<f64>]) -> Result<Vec<GammaEntry>> {
    let mut acc = Acc::new(parties);
    for (k, v) in vectors.iter().enumerate() {
        if v.len() != dimension(parties) {
            return Err(Error::Domain(format!("vector {k} has length {}, expected {}", v.len(), dimension(parties))));
        }
        let (full, blocks) = block_bounds(parties, v);
        for (i, &b) in blocks.iter().enumerate() {
            if b < SKIP_EPS {
                acc.skipped[i] += 1;
            } else {
                let gamma = full / b;
                if acc.mins[i].map_or(true, |cur| gamma < cur.gamma) {
                    acc.mins[i] = Some(Min { gamma, sample: k as u64 });
                }
            }
        }
    }
    Ok((0..parties)
        .map(|i| GammaEntry {
            index: i + 1,
            gamma_min: acc.mins[i].map(|x| x.gamma),
            witness_sample: acc.mins[i].map(|x| x.sample),
            witness: acc.mins[i].map(|x| vectors[x.sample as usize].clone()),
            skipped: acc.skipped[i],
        })
        .collect())
}
