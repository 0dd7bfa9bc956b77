//! Two-setting, two-outcome Bell expressions with sub-correlations.
//!
//! A term assigns each party one of three symbols: absent (identity), the
//! observable for setting 0, or the observable for setting 1. Expressions
//! are stored as a dense coefficient vector of length `3^m - 1` in
//! *canonical order*:
//!
//! * block-major: block `j` (1-based) holds every pattern whose first
//!   present party is `j`, and has `2 * 3^(m-j)` slots;
//! * inside a block, patterns are ordered lexicographically by party `j`'s
//!   setting, then parties `j+1..m` with `absent < 0 < 1`.
//!
//! Blocks occupy contiguous ranges `[L(j-1), L(j))` with `L(0) = 0` and
//! `L(j) = 3^m - 3^(m-j)`.
//!
//! A second ordering, the *lex* order, reads a full pattern as a base-3
//! number with party 1 most significant (`absent = 0`, `S0 = 1`, `S1 = 2`).
//! The constant pattern sits at lex 0 and block `j` covers lex
//! `[3^(m-j), 3^(m-j+1))`, so converting between the two is an offset.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Neg, Range};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest party count an expression may have. Dense storage needs
/// `3^m` coefficients, so this is a memory bound, not an enumeration cap.
pub const MAX_PARTIES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Absent,
    S0,
    S1,
}

impl Symbol {
    pub fn digit(self) -> usize {
        match self {
            Symbol::Absent => 0,
            Symbol::S0 => 1,
            Symbol::S1 => 2,
        }
    }

    pub fn from_digit(d: usize) -> Symbol {
        match d {
            0 => Symbol::Absent,
            1 => Symbol::S0,
            2 => Symbol::S1,
            _ => panic!("base-3 digit out of range: {d}"),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Symbol::Absent => '_',
            Symbol::S0 => '0',
            Symbol::S1 => '1',
        }
    }

    pub fn from_char(c: char) -> Option<Symbol> {
        match c {
            '_' => Some(Symbol::Absent),
            '0' => Some(Symbol::S0),
            '1' => Some(Symbol::S1),
            _ => None,
        }
    }

    /// Setting index for a present symbol.
    pub fn setting(self) -> Option<usize> {
        match self {
            Symbol::Absent => None,
            Symbol::S0 => Some(0),
            Symbol::S1 => Some(1),
        }
    }

    pub fn swapped(self) -> Symbol {
        match self {
            Symbol::Absent => Symbol::Absent,
            Symbol::S0 => Symbol::S1,
            Symbol::S1 => Symbol::S0,
        }
    }
}

/// One term of a Bell expression: a symbol per party, not all absent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermPattern(Vec<Symbol>);

impl TermPattern {
    pub fn from_symbols(symbols: Vec<Symbol>) -> Result<Self> {
        let pattern = TermPattern(symbols);
        if pattern.0.is_empty() {
            return Err(Error::InvalidPattern { pattern: String::new(), reason: "empty pattern".into() });
        }
        if pattern.0.iter().all(|&s| s == Symbol::Absent) {
            return Err(Error::InvalidPattern {
                pattern: pattern.to_string(),
                reason: "every party is absent (constant term)".into(),
            });
        }
        Ok(pattern)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| {
                Symbol::from_char(c).ok_or_else(|| Error::InvalidPattern {
                    pattern: s.to_string(),
                    reason: format!("unexpected character `{c}` (allowed: _, 0, 1)"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TermPattern::from_symbols(symbols)
    }

    pub fn parties(&self) -> usize {
        self.0.len()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// 1-based index of the first present party.
    pub fn first_party(&self) -> usize {
        self.0.iter().position(|&s| s != Symbol::Absent).expect("validated pattern") + 1
    }

    pub fn is_full_correlation(&self) -> bool {
        self.0.iter().all(|&s| s != Symbol::Absent)
    }

    /// Base-3 value with party 1 most significant.
    pub(crate) fn lex(&self) -> usize {
        self.0.iter().fold(0, |acc, s| acc * 3 + s.digit())
    }
}

impl fmt::Display for TermPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for TermPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TermPattern::parse(s)
    }
}

pub fn pow3(k: usize) -> usize {
    3usize.pow(k as u32)
}

/// Number of canonical term slots, `3^m - 1`.
pub fn dimension(parties: usize) -> usize {
    pow3(parties) - 1
}

/// `ℓ_j = 2 * 3^(m-j)`.
pub fn block_len(parties: usize, j: usize) -> usize {
    2 * pow3(parties - j)
}

/// `L(j-1)`, the first canonical slot of block `j`.
pub fn block_offset(parties: usize, j: usize) -> usize {
    pow3(parties) - pow3(parties + 1 - j)
}

pub fn block_range(parties: usize, j: usize) -> Range<usize> {
    let start = block_offset(parties, j);
    start..start + block_len(parties, j)
}

pub(crate) fn canonical_of_lex(parties: usize, lex: usize) -> usize {
    debug_assert!(lex > 0 && lex < pow3(parties));
    // block j = m - floor(log3(lex))
    let mut width = 1;
    let mut j = parties;
    while lex >= 3 * width {
        width *= 3;
        j -= 1;
    }
    block_offset(parties, j) + (lex - width)
}

pub(crate) fn lex_of_canonical(parties: usize, index: usize) -> usize {
    let j = block_of_index(parties, index);
    pow3(parties - j) + index - block_offset(parties, j)
}

fn block_of_index(parties: usize, index: usize) -> usize {
    (1..=parties).find(|&j| index < block_offset(parties, j) + block_len(parties, j)).expect("index in range")
}

/// Canonical slot of `pattern` in an `m`-party coefficient vector.
pub fn term_index(pattern: &TermPattern, parties: usize) -> Result<usize> {
    if pattern.parties() != parties {
        return Err(Error::InvalidPattern {
            pattern: pattern.to_string(),
            reason: format!("expected {parties} symbols, found {}", pattern.parties()),
        });
    }
    Ok(canonical_of_lex(parties, pattern.lex()))
}

/// Inverse of [`term_index`].
pub fn pattern_at(parties: usize, index: usize) -> Result<TermPattern> {
    if index >= dimension(parties) {
        return Err(Error::Domain(format!("term index {index} out of range for {parties} parties")));
    }
    let mut lex = lex_of_canonical(parties, index);
    let mut symbols = vec![Symbol::Absent; parties];
    for slot in symbols.iter_mut().rev() {
        *slot = Symbol::from_digit(lex % 3);
        lex /= 3;
    }
    Ok(TermPattern(symbols))
}

fn check_parties(parties: usize) -> Result<()> {
    if parties == 0 {
        return Err(Error::Domain("an expression needs at least one party".into()));
    }
    if parties > MAX_PARTIES {
        return Err(Error::TooManyParties { parties, cap: MAX_PARTIES });
    }
    Ok(())
}

/// Real linear combination of correlators, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct BellExpression {
    parties: usize,
    coeffs: Vec<f64>,
}

impl BellExpression {
    /// Builds an expression from `(pattern, coefficient)` pairs. Repeated
    /// patterns are summed.
    pub fn new<S: AsRef<str>>(parties: usize, terms: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        check_parties(parties)?;
        let mut coeffs = vec![0.0; dimension(parties)];
        let mut seen = false;
        for (pattern, coeff) in terms {
            let pattern = TermPattern::parse(pattern.as_ref())?;
            coeffs[term_index(&pattern, parties)?] += coeff;
            seen = true;
        }
        if !seen {
            return Err(Error::EmptyTerms);
        }
        Ok(BellExpression { parties, coeffs })
    }

    /// Wraps a canonical coefficient vector.
    pub fn from_vector(parties: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_parties(parties)?;
        if coeffs.len() != dimension(parties) {
            return Err(Error::Domain(format!(
                "coefficient vector has length {}, expected {}",
                coeffs.len(),
                dimension(parties)
            )));
        }
        Ok(BellExpression { parties, coeffs })
    }

    pub fn zero(parties: usize) -> Result<Self> {
        check_parties(parties)?;
        Ok(BellExpression { parties, coeffs: vec![0.0; dimension(parties)] })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    /// Canonical coefficient vector.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn to_vector(&self) -> Vec<f64> {
        self.coeffs.clone()
    }

    pub fn coefficient(&self, pattern: &TermPattern) -> Result<f64> {
        Ok(self.coeffs[term_index(pattern, self.parties)?])
    }

    /// Nonzero terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (TermPattern, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| (pattern_at(self.parties, i).expect("index in range"), c))
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0.0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// True iff every nonzero term involves all parties.
    pub fn is_homogeneous(&self) -> bool {
        self.terms().all(|(p, _)| p.is_full_correlation())
    }

    pub fn block(&self, j: usize) -> Result<BlockView<'_>> {
        if j == 0 || j > self.parties {
            return Err(Error::PartyOutOfRange { index: j, parties: self.parties });
        }
        Ok(BlockView { parent: self, first_party: j })
    }

    pub fn blocks(&self) -> impl Iterator<Item = BlockView<'_>> {
        (1..=self.parties).map(move |j| BlockView { parent: self, first_party: j })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        BellExpression { parties: self.parties, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    /// Coefficients in lex order, length `3^m`, with the constant slot 0.
    pub fn lex_coefficients(&self) -> Vec<f64> {
        let mut lex = vec![0.0; pow3(self.parties)];
        for (i, &c) in self.coeffs.iter().enumerate() {
            lex[lex_of_canonical(self.parties, i)] = c;
        }
        lex
    }

    /// Relabels parties: the symbol of old party `k` moves to position
    /// `perm[k]` (both 0-based).
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..self.parties).collect::<Vec<_>>() {
            return Err(Error::Domain(format!("{perm:?} is not a permutation of 0..{}", self.parties)));
        }
        self.map_patterns(|symbols| {
            let mut out = vec![Symbol::Absent; symbols.len()];
            for (k, &s) in symbols.iter().enumerate() {
                out[perm[k]] = s;
            }
            out
        })
    }

    /// Exchanges the two settings of one party (0-based).
    pub fn swap_settings(&self, party: usize) -> Result<Self> {
        if party >= self.parties {
            return Err(Error::PartyOutOfRange { index: party + 1, parties: self.parties });
        }
        self.map_patterns(|symbols| {
            let mut out = symbols.to_vec();
            out[party] = out[party].swapped();
            out
        })
    }

    fn map_patterns(&self, f: impl Fn(&[Symbol]) -> Vec<Symbol>) -> Result<Self> {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let pattern = pattern_at(self.parties, i)?;
            let mapped = TermPattern::from_symbols(f(pattern.symbols()))?;
            coeffs[term_index(&mapped, self.parties)?] = c;
        }
        Ok(BellExpression { parties: self.parties, coeffs })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ExpressionFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_expression()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ExpressionFile::from(self)).expect("serializable")
    }
}

impl Neg for &BellExpression {
    type Output = BellExpression;

    fn neg(self) -> BellExpression {
        self.scaled(-1.0)
    }
}

impl fmt::Display for BellExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (pattern, c) in self.terms() {
            if first {
                write!(f, "{c}·[{pattern}]")?;
            } else if c < 0.0 {
                write!(f, " - {}·[{pattern}]", -c)?;
            } else {
                write!(f, " + {c}·[{pattern}]")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Sub-expression `B_j` of terms whose first present party is `j`.
#[derive(Debug, Clone, Copy)]
pub struct BlockView<'a> {
    parent: &'a BellExpression,
    first_party: usize,
}

impl<'a> BlockView<'a> {
    pub fn parent(&self) -> &'a BellExpression {
        self.parent
    }

    pub fn first_party(&self) -> usize {
        self.first_party
    }

    pub fn range(&self) -> Range<usize> {
        block_range(self.parent.parties, self.first_party)
    }

    /// The block's slice of the canonical vector.
    pub fn coefficients(&self) -> &'a [f64] {
        &self.parent.coeffs[self.range()]
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients().iter().all(|&c| c == 0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (TermPattern, f64)> + 'a {
        let parties = self.parent.parties;
        let start = self.range().start;
        self.coefficients()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(move |(i, &c)| (pattern_at(parties, start + i).expect("index in range"), c))
    }

    /// The block as a full expression (zeros outside the block).
    pub fn to_expression(&self) -> BellExpression {
        let mut coeffs = vec![0.0; self.parent.coeffs.len()];
        let range = self.range();
        coeffs[range.clone()].copy_from_slice(&self.parent.coeffs[range]);
        BellExpression { parties: self.parent.parties, coeffs }
    }
}

/// On-disk form: `{"parties": m, "terms": [{"pattern": "01", "coeff": 1.0}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpressionFile {
    pub parties: usize,
    pub terms: Vec<TermEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub pattern: String,
    pub coeff: f64,
}

impl ExpressionFile {
    pub fn into_expression(self) -> Result<BellExpression> {
        for (i, t) in self.terms.iter().enumerate() {
            if t.pattern.chars().count() != self.parties {
                return Err(Error::Parse(format!(
                    "terms[{i}].pattern `{}` has {} symbols, expected {}",
                    t.pattern,
                    t.pattern.chars().count(),
                    self.parties
                )));
            }
            TermPattern::parse(&t.pattern).map_err(|e| Error::Parse(format!("terms[{i}].pattern: {e}")))?;
        }
        BellExpression::new(self.parties, self.terms.into_iter().map(|t| (t.pattern, t.coeff)))
    }
}

impl From<&BellExpression> for ExpressionFile {
    fn from(expr: &BellExpression) -> Self {
        ExpressionFile {
            parties: expr.parties,
            terms: expr.terms().map(|(p, c)| TermEntry { pattern: p.to_string(), coeff: c }).collect(),
        }
    }
}

/// Mermin expression in its imaginary-part form: every full correlator with
/// an odd number `k` of setting-1 observables, weighted `(-1)^((k-1)/2)`.
pub fn mermin(parties: usize) -> Result<BellExpression> {
    if parties < 2 {
        return Err(Error::Domain("Mermin expressions need at least two parties".into()));
    }
    check_parties(parties)?;
    let mut terms = BTreeMap::new();
    for bits in 0..(1usize << parties) {
        let ones = bits.count_ones() as usize;
        if ones % 2 == 1 {
            let pattern: String = (0..parties).map(|k| if bits >> (parties - 1 - k) & 1 == 1 { '1' } else { '0' }).collect();
            let sign = if (ones - 1) / 2 % 2 == 0 { 1.0 } else { -1.0 };
            terms.insert(pattern, sign);
        }
    }
    BellExpression::new(parties, terms)
}

/// Literature expressions: `chsh`, `mermin` (three parties), `mermin:<m>`,
/// `ch`, `sasa`. Names are case-insensitive.
pub fn builtin(name: &str) -> Result<BellExpression> {
    let lower = name.trim().to_ascii_lowercase();
    match lower.as_str() {
        "chsh" => BellExpression::new(2, [("00", 1.0), ("01", 1.0), ("10", 1.0), ("11", -1.0)]),
        "mermin" => mermin(3),
        "ch" => BellExpression::new(2, [("1_", 1.0), ("_0", 1.0), ("01", 1.0), ("11", -1.0), ("10", -1.0), ("00", -1.0)]),
        "sasa" => BellExpression::new(4, [("0_10", 1.0), ("0_01", 1.0), ("1000", 1.0), ("1011", -1.0)]),
        other => match other.strip_prefix("mermin:").or_else(|| other.strip_prefix("mermin")) {
            Some(n) => {
                let parties: usize =
                    n.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| Error::UnknownBuiltin(name.to_string()))?;
                mermin(parties)
            }
            None => Err(Error::UnknownBuiltin(name.to_string())),
        },
    }
}
