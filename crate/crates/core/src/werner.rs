//! Werner states `ρ_v = (1-v)/2^m · I + v |Ψ><Ψ|`: separability thresholds,
//! undetectable angle ranges and detectability verdicts.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{check_cap, lhv_bound};
use crate::error::{Error, Result};
use crate::expr::BellExpression;
use crate::linalg::C64;
use crate::quantum::{seesaw_for_state, SeesawOptions, StateSeesawResult};
use crate::rng::{substream, unit_complex_vector, Purpose};

/// Amplitude pairs `(i, i_c)` with `f` below this are skipped in the
/// pure-state bound.
pub const PAIR_EPS: f64 = 1e-12;

/// Largest party count accepted by [`detect_visibility`].
pub const DETECT_PARTY_CAP: usize = 6;

/// Samples drawn from one substream by [`measure_monte_carlo`].
const MEASURE_CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum WernerFamily {
    /// `cos θ |0…0> + sin θ |1…1>`.
    Ghz {
        parties: usize,
        theta: f64,
    },
    Pure {
        amplitudes: Vec<C64>,
    },
}

impl WernerFamily {
    pub fn ghz(parties: usize, theta: f64) -> Result<Self> {
        if parties == 0 {
            return Err(Error::Domain("GHZ family needs at least one party".into()));
        }
        check_theta(theta)?;
        Ok(WernerFamily::Ghz { parties, theta })
    }

    pub fn pure(amplitudes: Vec<C64>) -> Result<Self> {
        let n = amplitudes.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Domain(format!("{n} amplitudes do not describe a qubit register")));
        }
        check_normalized(&amplitudes)?;
        Ok(WernerFamily::Pure { amplitudes })
    }

    pub fn parties(&self) -> usize {
        match self {
            WernerFamily::Ghz { parties, .. } => *parties,
            WernerFamily::Pure { amplitudes } => amplitudes.len().trailing_zeros() as usize,
        }
    }

    pub fn amplitudes(&self) -> Vec<C64> {
        match self {
            WernerFamily::Ghz { parties, theta } => ghz_amplitudes(*parties, *theta),
            WernerFamily::Pure { amplitudes } => amplitudes.clone(),
        }
    }
}

pub fn ghz_amplitudes(parties: usize, theta: f64) -> Vec<C64> {
    let mut a = vec![C64::new(0.0, 0.0); 1 << parties];
    a[0] = C64::new(theta.cos(), 0.0);
    a[(1 << parties) - 1] += C64::new(theta.sin(), 0.0);
    a
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::Domain(format!("theta = {theta} is outside (0, π/2)")))
    }
}

fn check_normalized(amplitudes: &[C64]) -> Result<()> {
    let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(())
}

fn register_parties(amplitudes: &[C64]) -> Result<usize> {
    let n = amplitudes.len();
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::Domain(format!("{n} amplitudes do not describe a register of at least two qubits")));
    }
    check_normalized(amplitudes)?;
    Ok(n.trailing_zeros() as usize)
}

fn check_gammas(gammas: &[f64], parties: usize) -> Result<()> {
    if parties < 2 {
        return Err(Error::Domain("at least two parties are required".into()));
    }
    if gammas.len() != parties - 1 {
        return Err(Error::Domain(format!("expected {} gamma values, got {}", parties - 1, gammas.len())));
    }
    if let Some(g) = gammas.iter().find(|g| g.is_nan() || **g <= 0.0) {
        return Err(Error::Domain(format!("gamma must be positive, got {g}")));
    }
    Ok(())
}

fn inverse_sum(gammas: &[f64]) -> f64 {
    gammas.iter().map(|g| 1.0 / g).sum()
}

/// Lower bound on the visibility above which a Bell expression with
/// classical bound `c1` and quantum bound `c2` can detect `ρ_v`.
pub fn visibility_lower_bound(parties: usize, c1: f64, c2: f64) -> Result<f64> {
    if !(c1 > 0.0 && c2 > c1) {
        return Err(Error::Domain(format!("need c2 > c1 > 0, got c1 = {c1}, c2 = {c2}")));
    }
    let d = 2f64.powi(parties as i32);
    Ok(((d * c1 - c1) / (d * c2 - c1)).clamp(0.0, 1.0))
}

/// Exact full-separability threshold of the GHZ Werner family.
pub fn ghz_separability_threshold(parties: usize, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok((1.0 / (2f64.powi(parties as i32 - 1) * (2.0 * theta).sin() + 1.0)).clamp(0.0, 1.0))
}

/// Open angle interval `(θ_l, θ_u)` and its measure `r = (θ_u - θ_l)/π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaRange {
    pub theta_l: f64,
    pub theta_u: f64,
    pub r: f64,
}

impl ThetaRange {
    fn from_sine(arg: f64) -> Self {
        let theta_l = 0.5 * arg.asin();
        let theta_u = PI - theta_l;
        ThetaRange { theta_l, theta_u, r: (theta_u - theta_l) / PI }
    }
}

/// GHZ angles whose Werner states no full-correlation expression detects
/// completely.
pub fn theorem1_homogeneous_range(parties: usize) -> Result<ThetaRange> {
    if parties < 2 {
        return Err(Error::Domain("at least two parties are required".into()));
    }
    Ok(ThetaRange::from_sine((2.0 * 3f64.sqrt() - 2.0) / (2f64.powi(parties as i32) - 1.0)))
}

/// Undetectable GHZ angles for an expression with block ratios `gammas`
/// (`γ_1 … γ_{m-1}`). `None` when no range is certified.
pub fn theorem1_general_range(parties: usize, gammas: &[f64]) -> Result<Option<ThetaRange>> {
    check_gammas(gammas, parties)?;
    let arg = 2.0 * 3f64.sqrt() * inverse_sum(gammas) / (2f64.powi(parties as i32) - 1.0);
    Ok((arg < 1.0).then(|| ThetaRange::from_sine(arg)))
}

/// The alternative headline form `Σ 1/γ_i < √12 (2^m - 1)`, which is weaker
/// than the condition used by [`theorem1_general_range`].
pub fn headline_gamma_condition(parties: usize, gammas: &[f64]) -> Result<bool> {
    check_gammas(gammas, parties)?;
    Ok(inverse_sum(gammas) < 12f64.sqrt() * (2f64.powi(parties as i32) - 1.0))
}

/// Upper bound on the full-separability threshold of a pure-state Werner
/// family.
pub fn lemma4_upper(amplitudes: &[C64]) -> Result<f64> {
    let m = register_parties(amplitudes)?;
    let n = amplitudes.len();
    let mask = n - 1;
    let p: Vec<f64> = amplitudes.iter().map(|z| z.norm_sqr()).collect();
    let d = 2f64.powi(m as i32);
    let mut best = f64::INFINITY;
    for i in (0..n).filter(|&i| i < i ^ mask) {
        let weight = p[i] + p[i ^ mask];
        if weight > 2.0 / d {
            continue;
        }
        for j in 0..n {
            let f = d * d * p[j] * p[j ^ mask] - d * d * p[i] * p[i ^ mask] + d * weight - 1.0;
            if f.abs() > PAIR_EPS {
                best = best.min(1.0 / f.abs().sqrt());
            }
        }
    }
    Ok(best.min(1.0))
}

/// Necessary condition for full separability of `ρ_v`:
/// `min_i √(ρ_ii ρ_{i_c i_c}) ≥ max_j |ρ_{j j_c}|`. `false` certifies
/// entanglement.
pub fn e3_separability_check(amplitudes: &[C64], v: f64) -> Result<bool> {
    let m = register_parties(amplitudes)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("v = {v} is outside [0, 1]")));
    }
    let n = amplitudes.len();
    let mask = n - 1;
    let noise = (1.0 - v) / 2f64.powi(m as i32);
    let diag = |i: usize| noise + v * amplitudes[i].norm_sqr();
    let lhs = (0..n).map(|i| (diag(i) * diag(i ^ mask)).sqrt()).fold(f64::INFINITY, f64::min);
    let rhs = (0..n).map(|j| v * (amplitudes[j] * amplitudes[j ^ mask].conj()).norm()).fold(0.0, f64::max);
    Ok(lhs >= rhs)
}

/// Smallest `v` at which the necessary condition fails, by bisection to
/// `1e-12`; `None` if it holds on all of `[0, 1]`.
pub fn e3_entanglement_onset(amplitudes: &[C64]) -> Result<Option<f64>> {
    if e3_separability_check(amplitudes, 1.0)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if e3_separability_check(amplitudes, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaCondition {
    pub inverse_sum: f64,
    /// `poly/√3 - 1`.
    pub headline_threshold: f64,
    pub headline_holds: bool,
    /// `(poly - 1)/√3`.
    pub derived_threshold: f64,
    pub derived_holds: bool,
    /// Follows the headline (stricter) form.
    pub verdict: bool,
}

pub fn theorem2_condition(parties: usize, gammas: &[f64], poly: f64) -> Result<GammaCondition> {
    check_gammas(gammas, parties)?;
    let s3 = 3f64.sqrt();
    if poly.is_nan() || poly <= s3 {
        return Err(Error::Domain(format!("poly value {poly} must exceed √3")));
    }
    let inverse_sum = inverse_sum(gammas);
    let headline_threshold = poly / s3 - 1.0;
    let derived_threshold = (poly - 1.0) / s3;
    let headline_holds = inverse_sum < headline_threshold;
    Ok(GammaCondition {
        inverse_sum,
        headline_threshold,
        headline_holds,
        derived_threshold,
        derived_holds: inverse_sum < derived_threshold,
        verdict: headline_holds,
    })
}

fn measure_threshold(parties: usize, poly: f64) -> f64 {
    (poly + 1.0) / 2f64.powi(parties as i32)
}

/// Claimed lower bound `(1 - c²)^{2^{m-1}}`, `c = (poly + 1)/2^m`, on the
/// fraction of pure states satisfying [`coherence_exceeds`].
pub fn measure_lower_bound(parties: usize, poly: f64) -> Result<f64> {
    let c = measure_threshold(parties, poly);
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("threshold c = {c} is outside (0, 1)")));
    }
    Ok((1.0 - c * c).powi(1 << (parties - 1)))
}

/// `max_j |α_j|² |α_{j_c}|² > c²`.
pub fn coherence_exceeds(amplitudes: &[C64], c: f64) -> bool {
    let mask = amplitudes.len() - 1;
    let best = (0..amplitudes.len()).map(|j| amplitudes[j].norm_sqr() * amplitudes[j ^ mask].norm_sqr()).fold(0.0, f64::max);
    best > c * c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub hits: u64,
    pub samples: u64,
    pub fraction: f64,
    /// Binomial standard error `√(p(1-p)/n)`.
    pub std_error: f64,
    pub threshold: f64,
}

/// Fraction of uniformly random pure states passing [`coherence_exceeds`].
pub fn measure_monte_carlo(parties: usize, poly: f64, samples: u64, seed: u64) -> Result<MeasureEstimate> {
    if parties == 0 {
        return Err(Error::Domain("at least one party is required".into()));
    }
    check_cap(parties, crate::classical::DEFAULT_PARTY_CAP * 2)?;
    if samples < 100 {
        return Err(Error::Domain(format!("at least 100 samples are required, got {samples}")));
    }
    let c = measure_threshold(parties, poly);
    let dim = 1usize << parties;
    let chunks = samples.div_ceil(MEASURE_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = substream(seed, Purpose::MeasureChunk, chunk);
            let n = MEASURE_CHUNK.min(samples - chunk * MEASURE_CHUNK);
            (0..n).filter(|_| coherence_exceeds(&unit_complex_vector(&mut rng, dim), c)).count() as u64
        })
        .sum();
    let fraction = hits as f64 / samples as f64;
    Ok(MeasureEstimate {
        hits,
        samples,
        fraction,
        std_error: (fraction * (1.0 - fraction) / samples as f64).sqrt(),
        threshold: c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectabilityReport {
    /// Below this visibility the state is fully separable: exact for GHZ
    /// families, an upper bound for general pure states.
    pub v_separable: f64,
    pub v_violation_lower: f64,
    pub undetectable: bool,
    pub theta_range: Option<ThetaRange>,
}

/// Verdict for an expression with classical bound `c1` and quantum bound
/// `c2`. For GHZ families, `gammas` selects the general angle range instead
/// of the full-correlation one.
pub fn detectability(family: &WernerFamily, c1: f64, c2: f64, gammas: Option<&[f64]>) -> Result<DetectabilityReport> {
    let m = family.parties();
    let v_violation_lower = visibility_lower_bound(m, c1, c2)?;
    let (v_separable, theta_range) = match family {
        WernerFamily::Ghz { parties, theta } => {
            let range = match gammas {
                None => Some(theorem1_homogeneous_range(*parties)?),
                Some(g) => theorem1_general_range(*parties, g)?,
            };
            (ghz_separability_threshold(*parties, *theta)?, range)
        }
        WernerFamily::Pure { amplitudes } => (lemma4_upper(amplitudes)?, None),
    };
    Ok(DetectabilityReport { v_separable, v_violation_lower, undetectable: v_violation_lower > v_separable, theta_range })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    /// Smallest visibility with a violation; `None` when even `v = 1` does
    /// not violate.
    pub threshold: Option<f64>,
    pub lhv: f64,
    pub witness: StateSeesawResult,
}

/// Empirical detection threshold: observables are optimized for the pure
/// state, then `|Tr(B ρ_v)|` is compared with the classical bound while `v`
/// is bisected to `1e-6`.
pub fn detect_visibility(expr: &BellExpression, family: &WernerFamily, seed: u64) -> Result<DetectionResult> {
    let m = expr.parties();
    check_cap(m, DETECT_PARTY_CAP)?;
    if family.parties() != m {
        return Err(Error::PartyMismatch { expected: m, found: family.parties() });
    }
    let lhv = lhv_bound(expr)?.value;
    let witness = seesaw_for_state(expr, &family.amplitudes(), &SeesawOptions { seed, ..Default::default() })?;
    let value = |v: f64| ((1.0 - v) * witness.normalized_trace + v * witness.expectation).abs();
    let threshold = if value(1.0) <= lhv {
        None
    } else if value(0.0) > lhv {
        Some(0.0)
    } else {
        let (mut lo, mut hi) = (0.0, 1.0);
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if value(mid) > lhv {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    };
    Ok(DetectionResult { threshold, lhv, witness })
}

/// Pure-state file: `{"parties": m, "amplitudes": [{"index": "01", "re": …, "im": …}]}`.
/// Omitted indices are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub parties: usize,
    pub amplitudes: Vec<AmplitudeEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeEntry {
    pub index: String,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl StateFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn into_amplitudes(self) -> Result<Vec<C64>> {
        let m = self.parties;
        if m == 0 || m > crate::expr::MAX_PARTIES {
            return Err(Error::Parse(format!("parties = {m} is outside 1..={}", crate::expr::MAX_PARTIES)));
        }
        let mut out = vec![C64::new(0.0, 0.0); 1 << m];
        let mut seen = vec![false; 1 << m];
        for (k, entry) in self.amplitudes.iter().enumerate() {
            let bad = |reason: &str| Error::Parse(format!("amplitudes[{k}].index `{}`: {reason}", entry.index));
            if entry.index.len() != m {
                return Err(bad(&format!("expected {m} bits")));
            }
            let idx = entry.index.chars().try_fold(0usize, |acc, ch| match ch {
                '0' => Some(acc << 1),
                '1' => Some(acc << 1 | 1),
                _ => None,
            });
            let idx = idx.ok_or_else(|| bad("bits must be 0 or 1"))?;
            if std::mem::replace(&mut seen[idx], true) {
                return Err(bad("duplicate index"));
            }
            out[idx] = C64::new(entry.re, entry.im);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{builtin, mermin};
    use std::f64::consts::FRAC_PI_4;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn visibility_bound_examples() {
        let v = visibility_lower_bound(2, 2.0, 2.0 * 2f64.sqrt()).unwrap();
        assert!(close(v, 6.0 / (8.0 * 2f64.sqrt() - 2.0), 1e-15));
        assert!(close(v, 0.644212, 1e-6));
        assert!(close(visibility_lower_bound(2, 1.0, 3f64.sqrt()).unwrap(), 3.0 / (4.0 * 3f64.sqrt() - 1.0), 1e-15));
        assert!(visibility_lower_bound(3, 5.0, 5.0 * (1.0 + 1e-12)).unwrap() > 1.0 - 1e-9);
        assert!(visibility_lower_bound(2, 2.0, 2.0).is_err());
        assert!(visibility_lower_bound(2, 0.0, 2.0).is_err());
    }

    #[test]
    fn ghz_threshold_examples() {
        assert_eq!(ghz_separability_threshold(2, FRAC_PI_4).unwrap(), 1.0 / 3.0);
        assert!(close(ghz_separability_threshold(3, FRAC_PI_4).unwrap(), 0.2, 1e-15));
        assert!(ghz_separability_threshold(2, 1e-12).unwrap() > 1.0 - 1e-9);
        for bad in [0.0, FRAC_PI_2, -0.1, 2.0, f64::NAN] {
            assert!(ghz_separability_threshold(2, bad).is_err());
        }
    }

    #[test]
    fn ranges() {
        let r = theorem1_homogeneous_range(2).unwrap();
        assert!(close(r.theta_l / PI, 0.0811, 5e-5));
        assert_eq!(r.theta_u, PI - r.theta_l);
        assert!(close(r.r, 0.8377, 2e-4));
        assert!(theorem1_homogeneous_range(1).is_err());
        let g = theorem1_general_range(3, &[1.0, 1.0]).unwrap().unwrap();
        assert!(close(g.theta_l / PI, 0.2272, 5e-5));
        assert!(close(g.r, 0.5456, 2e-4));
        assert_eq!(theorem1_general_range(2, &[1.0]).unwrap(), None);
        assert!(theorem1_general_range(3, &[1.0]).is_err());
        assert!(theorem1_general_range(3, &[1.0, 0.0]).is_err());
        let inf = theorem1_general_range(3, &[f64::INFINITY; 2]).unwrap().unwrap();
        assert_eq!(inf.theta_l, 0.0);
        assert!(headline_gamma_condition(3, &[1.0, 1.0]).unwrap());
    }

    #[test]
    fn upper_bound_examples() {
        let g2 = ghz_amplitudes(2, FRAC_PI_4);
        assert!(close(lemma4_upper(&g2).unwrap(), 1.0 / 3f64.sqrt(), 1e-12));
        let g3 = ghz_amplitudes(3, FRAC_PI_4);
        assert!(close(lemma4_upper(&g3).unwrap(), 1.0 / 15f64.sqrt(), 1e-12));
        let mut product = vec![C64::new(0.0, 0.0); 8];
        product[0] = C64::new(1.0, 0.0);
        assert_eq!(lemma4_upper(&product).unwrap(), 1.0);
        assert!(matches!(lemma4_upper(&[C64::new(1.0, 0.0); 4]), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn e3_examples() {
        let g2 = ghz_amplitudes(2, FRAC_PI_4);
        assert!(!e3_separability_check(&g2, 0.5).unwrap());
        assert!(e3_separability_check(&g2, 0.2).unwrap());
        assert!(e3_separability_check(&g2, 0.0).unwrap());
        let onset = e3_entanglement_onset(&g2).unwrap().unwrap();
        assert!(close(onset, 1.0 / 3.0, 1e-9));
    }

    #[test]
    fn theorem2_examples() {
        let t = theorem2_condition(3, &[1.0, 1.0], 6.0).unwrap();
        assert!(t.verdict && t.headline_holds && t.derived_holds);
        assert!(close(t.headline_threshold, 6.0 / 3f64.sqrt() - 1.0, 1e-15));
        let t = theorem2_condition(3, &[1.0, 1.0], 3.0).unwrap();
        assert!(!t.verdict);
        assert!(theorem2_condition(3, &[f64::INFINITY; 2], 1.8).unwrap().verdict);
        assert!(theorem2_condition(3, &[1.0, 1.0], 1.5).is_err());
    }

    #[test]
    fn measure_bound_examples() {
        assert!(close(measure_lower_bound(3, 3.0).unwrap(), 0.75f64.powi(4), 1e-15));
        assert!(close(measure_lower_bound(4, 4.0).unwrap(), (231.0f64 / 256.0).powi(8), 1e-15));
        assert!(measure_lower_bound(2, -1.0 + 1e-6).unwrap() > 1.0 - 1e-9);
        assert!(measure_lower_bound(2, 3.0).is_err());
    }

    #[test]
    fn coherence_boundary() {
        let g = ghz_amplitudes(3, FRAC_PI_4);
        assert!(!coherence_exceeds(&g, 0.5));
        assert!(coherence_exceeds(&g, 0.49));
        let est = measure_monte_carlo(2, 10.0, 1000, 1).unwrap();
        assert_eq!(est.hits, 0);
        assert!(measure_lower_bound(2, 10.0).is_err());
        assert!(measure_monte_carlo(2, 1.0, 99, 1).is_err());
    }

    #[test]
    fn measure_is_partition_independent() {
        let a = measure_monte_carlo(5, 1.0, 10_000, 3).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| measure_monte_carlo(5, 1.0, 10_000, 3).unwrap());
        assert_eq!(a, b);
        assert!(a.hits > 0);
    }

    #[test]
    fn detectability_verdicts() {
        let fam = WernerFamily::ghz(2, FRAC_PI_4).unwrap();
        let r = detectability(&fam, 2.0, 2.0 * 2f64.sqrt(), None).unwrap();
        assert_eq!(r.v_separable, 1.0 / 3.0);
        assert!(close(r.v_violation_lower, 0.644212, 1e-6));
        assert!(r.undetectable);
        let fam = WernerFamily::ghz(2, 0.05).unwrap();
        let r = detectability(&fam, 2.0, 2.0 * 3f64.sqrt(), Some(&[1.0])).unwrap();
        assert!(!r.undetectable);
        assert!(r.theta_range.is_none());
        let r = detectability(&WernerFamily::ghz(3, FRAC_PI_4).unwrap(), 2.0, 20.0, None).unwrap();
        assert!(!r.undetectable);
        let fam = WernerFamily::pure(ghz_amplitudes(2, FRAC_PI_4)).unwrap();
        let r = detectability(&fam, 2.0, 2.0 * 2f64.sqrt(), None).unwrap();
        assert!(close(r.v_separable, 1.0 / 3f64.sqrt(), 1e-12));
        assert!(r.theta_range.is_none());
    }

    #[test]
    fn detect_chsh_and_mermin() {
        let fam = WernerFamily::ghz(2, FRAC_PI_4).unwrap();
        let d = detect_visibility(&builtin("chsh").unwrap(), &fam, 0).unwrap();
        assert!(close(d.threshold.unwrap(), std::f64::consts::FRAC_1_SQRT_2, 1e-3));
        let fam = WernerFamily::ghz(3, FRAC_PI_4).unwrap();
        let d = detect_visibility(&mermin(3).unwrap(), &fam, 0).unwrap();
        assert!(close(d.threshold.unwrap(), 0.5, 5e-3), "{:?}", d.threshold);
        let fam = WernerFamily::ghz(2, 0.01).unwrap();
        let d = detect_visibility(&builtin("chsh").unwrap(), &fam, 0).unwrap();
        assert!(d.threshold.map_or(true, |v| v > 0.99));
    }

    #[test]
    fn state_file() {
        let text = r#"{"parties": 2, "amplitudes": [{"index": "00", "re": 0.6}, {"index": "11", "re": 0.0, "im": 0.8}]}"#;
        let a = StateFile::from_json(text).unwrap().into_amplitudes().unwrap();
        assert_eq!(a[3], C64::new(0.0, 0.8));
        assert!(WernerFamily::pure(a).is_ok());
        let bad = r#"{"parties": 2, "amplitudes": [{"index": "0", "re": 1.0}]}"#;
        let err = StateFile::from_json(bad).unwrap().into_amplitudes().unwrap_err();
        assert!(err.to_string().contains("amplitudes[0].index"));
        let dup = r#"{"parties": 1, "amplitudes": [{"index": "1", "re": 1.0}, {"index": "1", "re": 0.0}]}"#;
        assert!(StateFile::from_json(dup).unwrap().into_amplitudes().is_err());
        assert!(StateFile::from_json(r#"{"parties": 1}"#).is_err());
    }
}
