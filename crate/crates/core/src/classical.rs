//! Local-hidden-variable bounds.
//!
//! The classical maximum of `|<B>|` is attained at deterministic strategies,
//! so [`lhv_bound`] enumerates all `4^m` of them. Each strategy's value is
//! accumulated in canonical term order, which makes every reported number a
//! pure function of the expression: the same value comes back from
//! [`strategy_value`], from a block-wise scan, or from any thread layout.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{block_range, dimension, pattern_at, pow3, BellExpression};

/// Default largest party count for exhaustive enumeration.
pub const DEFAULT_PARTY_CAP: usize = 8;

const CHUNK: u64 = 1 << 10;

/// A ±1 outcome for each party and setting, packed as `2m` bits.
///
/// Bit `2k` holds party `k`'s setting-0 outcome and bit `2k + 1` its
/// setting-1 outcome (0-based parties); a set bit means −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    parties: usize,
    bits: u64,
}

impl DeterministicStrategy {
    pub fn from_bits(parties: usize, bits: u64) -> Result<Self> {
        if parties == 0 || parties > 31 {
            return Err(Error::Domain(format!("cannot encode a strategy for {parties} parties")));
        }
        if bits >= Self::count(parties) {
            return Err(Error::Domain(format!("strategy code {bits} out of range for {parties} parties")));
        }
        Ok(DeterministicStrategy { parties, bits })
    }

    /// Builds a strategy from `(setting-0, setting-1)` outcome pairs.
    pub fn from_outcomes(outcomes: &[(i8, i8)]) -> Result<Self> {
        let mut bits = 0u64;
        for (k, &(a0, a1)) in outcomes.iter().enumerate() {
            for (shift, a) in [(0, a0), (1, a1)] {
                match a {
                    1 => {}
                    -1 => bits |= 1 << (2 * k + shift),
                    _ => return Err(Error::Domain(format!("outcome {a} is not ±1"))),
                }
            }
        }
        DeterministicStrategy::from_bits(outcomes.len(), bits)
    }

    /// `4^m`.
    pub fn count(parties: usize) -> u64 {
        1u64 << (2 * parties)
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Outcome of `party` (0-based) under `setting`.
    pub fn outcome(&self, party: usize, setting: usize) -> f64 {
        if self.bits >> (2 * party + setting) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn outcomes(&self) -> Vec<(i8, i8)> {
        (0..self.parties).map(|k| (self.outcome(k, 0) as i8, self.outcome(k, 1) as i8)).collect()
    }
}

impl fmt::Display for DeterministicStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |x: f64| if x > 0.0 { '+' } else { '-' };
        for k in 0..self.parties {
            write!(f, "({}{})", sign(self.outcome(k, 0)), sign(self.outcome(k, 1)))?;
        }
        Ok(())
    }
}

/// Scratch space holding every correlator value of one strategy in lex order.
pub(crate) struct StrategyEvaluator {
    parties: usize,
    products: Vec<f64>,
}

impl StrategyEvaluator {
    pub(crate) fn new(parties: usize) -> Self {
        StrategyEvaluator { parties, products: vec![0.0; pow3(parties)] }
    }

    pub(crate) fn load(&mut self, bits: u64) {
        let p = &mut self.products;
        p[0] = 1.0;
        let mut width = 1;
        for party in (0..self.parties).rev() {
            let a0 = if bits >> (2 * party) & 1 == 1 { -1.0 } else { 1.0 };
            let a1 = if bits >> (2 * party + 1) & 1 == 1 { -1.0 } else { 1.0 };
            let (head, tail) = p.split_at_mut(width);
            for (dst, src) in tail[..width].iter_mut().zip(head.iter()) {
                *dst = a0 * src;
            }
            for (dst, src) in tail[width..2 * width].iter_mut().zip(head.iter()) {
                *dst = a1 * src;
            }
            width *= 3;
        }
    }

    /// Correlators of block `j` (1-based), aligned with its canonical slots.
    fn block_products(&self, j: usize) -> &[f64] {
        let start = pow3(self.parties - j);
        &self.products[start..3 * start]
    }

    /// `<B>` for the loaded strategy, summed in canonical order.
    pub(crate) fn value(&self, coeffs: &[f64]) -> f64 {
        let mut acc = 0.0;
        for j in 1..=self.parties {
            let range = block_range(self.parties, j);
            for (c, p) in coeffs[range].iter().zip(self.block_products(j)) {
                acc += c * p;
            }
        }
        acc
    }

    /// Per-block values written to `blocks`; returns the full value, which
    /// is bit-identical to [`StrategyEvaluator::value`].
    pub(crate) fn block_values(&self, coeffs: &[f64], blocks: &mut [f64]) -> f64 {
        let mut acc = 0.0;
        for j in 1..=self.parties {
            let range = block_range(self.parties, j);
            let mut block = 0.0;
            for (c, p) in coeffs[range].iter().zip(self.block_products(j)) {
                acc += c * p;
                block += c * p;
            }
            blocks[j - 1] = block;
        }
        acc
    }
}

/// `<B>` under a deterministic strategy.
pub fn strategy_value(expr: &BellExpression, strategy: &DeterministicStrategy) -> Result<f64> {
    if strategy.parties() != expr.parties() {
        return Err(Error::PartyMismatch { expected: expr.parties(), found: strategy.parties() });
    }
    let mut eval = StrategyEvaluator::new(expr.parties());
    eval.load(strategy.bits());
    Ok(eval.value(expr.coefficients()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBound {
    pub value: f64,
    pub witness: DeterministicStrategy,
    /// Sign of `<B>` at the witness.
    pub achieved_sign: i8,
}

#[derive(Clone, Copy)]
struct Best {
    abs: f64,
    signed: f64,
    bits: u64,
}

impl Best {
    fn better(self, other: Best) -> Best {
        if other.abs > self.abs || (other.abs == self.abs && other.bits < self.bits) {
            other
        } else {
            self
        }
    }
}

fn scan_range(parties: usize, coeffs: &[f64], range: std::ops::Range<u64>) -> Best {
    let mut eval = StrategyEvaluator::new(parties);
    let mut best = Best { abs: -1.0, signed: 0.0, bits: u64::MAX };
    for bits in range {
        eval.load(bits);
        let v = eval.value(coeffs);
        if v.abs() > best.abs {
            best = Best { abs: v.abs(), signed: v, bits };
        }
    }
    best
}

pub fn check_cap(parties: usize, cap: usize) -> Result<()> {
    if parties > cap {
        Err(Error::TooManyParties { parties, cap })
    } else {
        Ok(())
    }
}

/// Exact classical bound, `max_s |<B>_s|`, with the default party cap.
pub fn lhv_bound(expr: &BellExpression) -> Result<ClassicalBound> {
    lhv_bound_capped(expr, DEFAULT_PARTY_CAP)
}

/// Exact classical bound; ties go to the smallest strategy code.
pub fn lhv_bound_capped(expr: &BellExpression, cap: usize) -> Result<ClassicalBound> {
    if expr.is_zero() {
        return Err(Error::ZeroExpression);
    }
    let m = expr.parties();
    check_cap(m, cap)?;
    let total = DeterministicStrategy::count(m);
    let coeffs = expr.coefficients();
    let best = if total <= CHUNK {
        scan_range(m, coeffs, 0..total)
    } else {
        (0..total / CHUNK)
            .into_par_iter()
            .map(|c| scan_range(m, coeffs, c * CHUNK..(c + 1) * CHUNK))
            .reduce_with(Best::better)
            .expect("at least one chunk")
    };
    Ok(ClassicalBound {
        value: best.abs,
        witness: DeterministicStrategy { parties: m, bits: best.bits },
        achieved_sign: if best.signed < 0.0 { -1 } else { 1 },
    })
}

/// Closed-form classical value for full-correlation expressions.
///
/// Coefficients are paired over the last party's two settings; for every
/// prefix `p` of the first `m-1` settings, `odd(p) = α(p,0) + α(p,1)` and
/// `even(p) = α(p,0) - α(p,1)`. The result is
/// `max(Σ|odd(p)|, Σ|even(p)|)`. It upper-bounds [`lhv_bound`] and can
/// exceed it (three-party Mermin: 4 against 2).
pub fn closed_form_classical(expr: &BellExpression) -> Result<f64> {
    if !expr.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let m = expr.parties();
    let coeffs = expr.coefficients();
    let (mut odd, mut even) = (0.0, 0.0);
    for prefix in 0..(1usize << (m - 1)) {
        // lex digits: S0 = 1, S1 = 2 for prefix parties 1..m-1
        let mut lex = 0;
        for k in 0..m - 1 {
            lex = lex * 3 + 1 + (prefix >> (m - 2 - k) & 1);
        }
        // block 1: canonical index = lex - 3^(m-1)
        let s0 = 3 * lex + 1 - pow3(m - 1);
        let (a0, a1) = (coeffs[s0], coeffs[s0 + 1]);
        odd += (a0 + a1).abs();
        even += (a0 - a1).abs();
    }
    Ok(odd.max(even))
}

/// Explicit `±1` matrix of correlator values, one row per strategy.
///
/// [`StrategyMatrix::full`] is the `4^m × (3^m − 1)` matrix `M`;
/// [`StrategyMatrix::block`] is `M_j`, whose rows range over the strategies
/// of parties `j..m` and whose columns are block `j`'s slots. Entries are
/// computed term by term from the patterns, independently of the
/// incremental evaluator used by [`lhv_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyMatrix {
    parties: usize,
    first_party: usize,
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl StrategyMatrix {
    pub fn full(parties: usize) -> Result<Self> {
        check_cap(parties, 6)?;
        let cols = dimension(parties);
        Self::build(parties, 1, 0..cols)
    }

    pub fn block(parties: usize, j: usize) -> Result<Self> {
        check_cap(parties, 6)?;
        if j == 0 || j > parties {
            return Err(Error::PartyOutOfRange { index: j, parties });
        }
        Self::build(parties, j, block_range(parties, j))
    }

    fn build(parties: usize, first_party: usize, columns: std::ops::Range<usize>) -> Result<Self> {
        let active = parties + 1 - first_party;
        let rows = 1usize << (2 * active);
        let cols = columns.len();
        let patterns = columns.map(|c| pattern_at(parties, c)).collect::<Result<Vec<_>>>()?;
        let mut entries = Vec::with_capacity(rows * cols);
        for row in 0..rows as u64 {
            // row bits describe parties first_party..m; shift into place
            let strategy = DeterministicStrategy { parties, bits: row << (2 * (first_party - 1)) };
            for pattern in &patterns {
                let mut prod = 1i8;
                for (k, s) in pattern.symbols().iter().enumerate() {
                    if let Some(setting) = s.setting() {
                        prod *= strategy.outcome(k, setting) as i8;
                    }
                }
                entries.push(prod);
            }
        }
        Ok(StrategyMatrix { parties, first_party, rows, cols, entries })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn first_party(&self) -> usize {
        self.first_party
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[i8] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// `max_r |(M α)_r|`, each row summed in column order.
    pub fn max_abs_product(&self, alpha: &[f64]) -> f64 {
        assert_eq!(alpha.len(), self.cols, "coefficient vector length");
        (0..self.rows)
            .map(|r| {
                let mut acc = 0.0;
                for (&e, &a) in self.row(r).iter().zip(alpha) {
                    acc += a * f64::from(e);
                }
                acc.abs()
            })
            .fold(0.0, f64::max)
    }
}
