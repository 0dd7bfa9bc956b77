//! Quantum bounds: analytic upper bounds and a see-saw lower bound over
//! single-qubit observables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{check_cap, closed_form_classical, lhv_bound};
use crate::error::{Error, Result};
use crate::expr::{pow3, BellExpression};
use crate::linalg::{
    dominant_eigenpair, generic_vector, max_abs_eigenvalue, normalize, refine_dominant, ComplexMatrix, EigenOptions, Mat2, C64,
    IDENTITY2,
};
use crate::rng::{substream, unit_vector, Purpose};

/// Largest party count for which Bell operators are built.
pub const OPERATOR_PARTY_CAP: usize = 8;

/// A Hermitian qubit operator with eigenvalue `eig_plus` along `axis` and
/// `eig_minus` along `-axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitObservable {
    axis: [f64; 3],
    eig_plus: f64,
    eig_minus: f64,
}

impl QubitObservable {
    pub fn new(axis: [f64; 3], eig_plus: f64, eig_minus: f64) -> Result<Self> {
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("observable axis has norm {norm}, expected 1")));
        }
        if !(eig_plus.abs() <= 1.0 && eig_minus.abs() <= 1.0) {
            return Err(Error::Domain(format!("eigenvalues ({eig_plus}, {eig_minus}) outside [-1, 1]")));
        }
        Ok(QubitObservable { axis, eig_plus, eig_minus })
    }

    /// Projective `±1` observable along a (not necessarily normalized) axis.
    pub fn projective(axis: [f64; 3]) -> Result<Self> {
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Domain("zero observable axis".into()));
        }
        Self::new(axis.map(|x| x / norm), 1.0, -1.0)
    }

    /// `λ · I`.
    pub fn scalar(lambda: f64) -> Result<Self> {
        Self::new([0.0, 0.0, 1.0], lambda, lambda)
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn eig_plus(&self) -> f64 {
        self.eig_plus
    }

    pub fn eig_minus(&self) -> f64 {
        self.eig_minus
    }

    pub fn matrix(&self) -> Mat2 {
        let a0 = 0.5 * (self.eig_plus + self.eig_minus);
        let a1 = 0.5 * (self.eig_plus - self.eig_minus);
        let [x, y, z] = self.axis;
        [[C64::new(a0 + a1 * z, 0.0), C64::new(a1 * x, -a1 * y)], [C64::new(a1 * x, a1 * y), C64::new(a0 - a1 * z, 0.0)]]
    }

    /// The `‖A‖ ≤ 1` operator maximizing `Re Tr(A K)` for Hermitian `K`:
    /// the sign function of `K`. Degenerate directions keep `self`'s values.
    fn best_response(&self, k: &Mat2) -> QubitObservable {
        let k0 = 0.5 * (k[0][0].re + k[1][1].re);
        let kv = [k[0][1].re, -k[0][1].im, 0.5 * (k[0][0].re - k[1][1].re)];
        let len = kv.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sign_or = |x: f64, keep: f64| {
            if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                keep
            }
        };
        if len == 0.0 {
            let s = sign_or(k0, 0.0);
            if s == 0.0 {
                return *self;
            }
            return QubitObservable { axis: self.axis, eig_plus: s, eig_minus: s };
        }
        QubitObservable {
            axis: kv.map(|x| x / len),
            eig_plus: sign_or(k0 + len, self.eig_plus),
            eig_minus: sign_or(k0 - len, self.eig_minus),
        }
    }
}

/// Two observables (settings 0 and 1) per party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableAssignment {
    parties: Vec<[QubitObservable; 2]>,
}

impl ObservableAssignment {
    pub fn new(parties: Vec<[QubitObservable; 2]>) -> Self {
        ObservableAssignment { parties }
    }

    /// Projective observables along uniformly random axes.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, parties: usize) -> Self {
        let mut obs = || {
            let v = unit_vector(rng, 3);
            QubitObservable { axis: [v[0], v[1], v[2]], eig_plus: 1.0, eig_minus: -1.0 }
        };
        ObservableAssignment { parties: (0..parties).map(|_| [obs(), obs()]).collect() }
    }

    pub fn parties(&self) -> usize {
        self.parties.len()
    }

    pub fn get(&self, party: usize, setting: usize) -> &QubitObservable {
        &self.parties[party][setting]
    }

    pub fn observables(&self) -> &[[QubitObservable; 2]] {
        &self.parties
    }

    fn matrices(&self) -> Vec<[Mat2; 2]> {
        self.parties.iter().map(|p| [p[0].matrix(), p[1].matrix()]).collect()
    }
}

/// `Σ_lex c · O_1 ⊗ … ⊗ O_r` with party 1 as the most significant qubit.
/// `lex[0]` multiplies the identity.
fn build_operator(lex: &[f64], ops: &[[Mat2; 2]]) -> ComplexMatrix {
    if ops.is_empty() {
        return ComplexMatrix::from_real_diagonal(&[lex[0]]);
    }
    let third = lex.len() / 3;
    let mut out = ComplexMatrix::zeros(1 << ops.len());
    for d in 0..3 {
        let part = &lex[d * third..(d + 1) * third];
        if part.iter().all(|&c| c == 0.0) {
            continue;
        }
        let sub = build_operator(part, &ops[1..]);
        let a = if d == 0 { IDENTITY2 } else { ops[0][d - 1] };
        out.add_kron(&a, &sub);
    }
    out
}

pub fn bell_operator(expr: &BellExpression, obs: &ObservableAssignment) -> Result<ComplexMatrix> {
    let m = expr.parties();
    check_cap(m, OPERATOR_PARTY_CAP)?;
    if obs.parties() != m {
        return Err(Error::PartyMismatch { expected: m, found: obs.parties() });
    }
    Ok(build_operator(&expr.lex_coefficients(), &obs.matrices()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticUpper {
    /// `√3 ×` closed form.
    pub general: f64,
    /// `√(5/2) ×` closed form, for anticommuting observables.
    pub anticommuting: f64,
}

pub fn analytic_quantum_upper(expr: &BellExpression) -> Result<AnalyticUpper> {
    let c = closed_form_classical(expr)?;
    Ok(AnalyticUpper { general: 3f64.sqrt() * c, anticommuting: 2.5f64.sqrt() * c })
}

/// `√3 Σ 1/γ_i + 1`; infinite `γ_i` contribute nothing.
pub fn composite_ratio_upper(gammas: &[f64]) -> Result<f64> {
    if let Some(g) = gammas.iter().find(|g| g.is_nan() || **g <= 0.0) {
        return Err(Error::Domain(format!("gamma must be positive, got {g}")));
    }
    Ok(3f64.sqrt() * gammas.iter().map(|g| 1.0 / g).sum::<f64>() + 1.0)
}

#[derive(Debug, Clone, Copy)]
pub struct SeesawOptions {
    pub restarts: usize,
    /// A run stops once a full sweep improves the objective by less than this.
    pub tol: f64,
    pub seed: u64,
    pub max_sweeps: usize,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        SeesawOptions { restarts: 20, tol: 1e-12, seed: 0, max_sweeps: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeesawResult {
    /// Spectral radius of the Bell operator built from `witness`.
    pub value: f64,
    pub witness: ObservableAssignment,
    /// Pure state attaining the objective of the winning run.
    pub state: Vec<[f64; 2]>,
    pub restart: usize,
    /// `+1` if the run maximized `B`, `-1` if it maximized `-B`.
    pub sign: i8,
    /// Objective after initialization and after every sweep.
    pub trajectory: Vec<f64>,
}

impl SeesawResult {
    pub fn state_vector(&self) -> Vec<C64> {
        self.state.iter().map(|&[re, im]| C64::new(re, im)).collect()
    }
}

/// Per-party decomposition `B = I ⊗ R_A + A_0 ⊗ R_0 + A_1 ⊗ R_1`.
struct PartySplit {
    /// Lex coefficients over the remaining parties, one array per symbol.
    lex: [Vec<f64>; 3],
}

impl PartySplit {
    fn new(lex: &[f64], parties: usize, party: usize) -> Self {
        let low_len = pow3(parties - 1 - party);
        let rest = pow3(parties - 1);
        let split = |d: usize| {
            (0..rest)
                .map(|r| {
                    let (high, low) = (r / low_len, r % low_len);
                    lex[high * 3 * low_len + d * low_len + low]
                })
                .collect()
        };
        PartySplit { lex: [split(0), split(1), split(2)] }
    }

    /// `K_s[b][a] = <φ_a| R_s |φ_b>` where `ψ = Σ_a |a>_party ⊗ |φ_a>`.
    fn reduced(&self, ops: &[[Mat2; 2]], party: usize, psi: &[C64]) -> [Mat2; 3] {
        let m = ops.len();
        let others: Vec<[Mat2; 2]> = ops.iter().enumerate().filter(|&(k, _)| k != party).map(|(_, o)| *o).collect();
        let shift = m - 1 - party;
        let half = 1usize << (m - 1);
        let phi: [Vec<C64>; 2] = [0, 1].map(|a| {
            (0..half)
                .map(|t| {
                    let (high, low) = (t >> shift, t & ((1 << shift) - 1));
                    psi[(high << (shift + 1)) | (a << shift) | low]
                })
                .collect()
        });
        let mut out = [[[C64::new(0.0, 0.0); 2]; 2]; 3];
        let mut rphi = vec![C64::new(0.0, 0.0); half];
        for (s, lex) in self.lex.iter().enumerate() {
            if lex.iter().all(|&c| c == 0.0) {
                continue;
            }
            let r = build_operator(lex, &others);
            for b in 0..2 {
                r.mul_vec(&phi[b], &mut rphi);
                for a in 0..2 {
                    out[s][b][a] = phi[a].iter().zip(&rphi).map(|(x, y)| x.conj() * y).sum();
                }
            }
        }
        out
    }
}

fn scaled(k: &Mat2, sign: f64) -> Mat2 {
    k.map(|row| row.map(|z| z * sign))
}

fn inner_options() -> EigenOptions {
    EigenOptions { tol: 1e-11, max_iterations: 20_000 }
}

struct Run {
    value: f64,
    obs: ObservableAssignment,
    state: Vec<C64>,
    trajectory: Vec<f64>,
}

fn seesaw_run(
    expr: &BellExpression,
    lex: &[f64],
    splits: &[PartySplit],
    sign: f64,
    init: ObservableAssignment,
    opts: &SeesawOptions,
) -> Result<Run> {
    let mut obs = init;
    let b = build_operator(lex, &obs.matrices());
    let mut psi = generic_vector(b.dim());
    let mut objective = refine_dominant(&b, sign, &mut psi, inner_options()).rayleigh;
    let mut trajectory = vec![objective];
    for _ in 0..opts.max_sweeps {
        let before = objective;
        for (party, split) in splits.iter().enumerate() {
            let ops = obs.matrices();
            let k = split.reduced(&ops, party, &psi);
            for setting in 0..2 {
                obs.parties[party][setting] = obs.parties[party][setting].best_response(&scaled(&k[setting + 1], sign));
            }
            let b = build_operator(lex, &obs.matrices());
            normalize(&mut psi);
            objective = refine_dominant(&b, sign, &mut psi, inner_options()).rayleigh;
        }
        trajectory.push(objective);
        if objective - before < opts.tol {
            break;
        }
    }
    let value = max_abs_eigenvalue(&bell_operator(expr, &obs)?)?;
    Ok(Run { value, obs, state: psi, trajectory })
}

fn pick_best<T>(runs: Vec<Result<(usize, T)>>, value: impl Fn(&T) -> f64) -> Result<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for run in runs {
        let (idx, r) = run?;
        let better = match &best {
            None => true,
            Some((_, b)) => value(&r) > value(b),
        };
        if better {
            best = Some((idx, r));
        }
    }
    best.ok_or_else(|| Error::Domain("at least one restart is required".into()))
}

/// Lower bound on the quantum value by alternating optimization.
///
/// Each restart draws random projective observables, then repeatedly replaces
/// each party's pair by its best response to the current state and the state
/// by the dominant eigenvector of `±B`. Runs for both signs of `B` share the
/// restart's initial observables. One further start, with index
/// `opts.restarts`, uses the optimal deterministic strategy as scalar
/// observables, so the result never falls below the classical bound. Ties go
/// to the lowest restart index, `+B` first.
pub fn seesaw_lower(expr: &BellExpression, opts: &SeesawOptions) -> Result<SeesawResult> {
    let m = expr.parties();
    check_cap(m, OPERATOR_PARTY_CAP)?;
    if opts.restarts == 0 {
        return Err(Error::Domain("see-saw needs at least one restart".into()));
    }
    let classical = if expr.is_zero() { None } else { Some(classical_start(expr)?) };
    let lex = expr.lex_coefficients();
    let splits: Vec<PartySplit> = (0..m).map(|p| PartySplit::new(&lex, m, p)).collect();
    let starts = opts.restarts + usize::from(classical.is_some());
    let runs: Vec<Result<(usize, Run)>> = (0..2 * starts)
        .into_par_iter()
        .map(|task| {
            let restart = task / 2;
            let sign = if task % 2 == 0 { 1.0 } else { -1.0 };
            let init = match &classical {
                Some(c) if restart == opts.restarts => c.clone(),
                _ => ObservableAssignment::random(&mut substream(opts.seed, Purpose::SeesawRestart, restart as u64), m),
            };
            seesaw_run(expr, &lex, &splits, sign, init, opts).map(|r| (task, r))
        })
        .collect();
    let (task, run) = pick_best(runs, |r| r.value)?;
    Ok(SeesawResult {
        value: run.value,
        witness: run.obs,
        state: run.state.iter().map(|z| [z.re, z.im]).collect(),
        restart: task / 2,
        sign: if task % 2 == 0 { 1 } else { -1 },
        trajectory: run.trajectory,
    })
}

fn classical_start(expr: &BellExpression) -> Result<ObservableAssignment> {
    let witness = lhv_bound(expr)?.witness;
    let scalar = |x: i8| QubitObservable { axis: [0.0, 0.0, 1.0], eig_plus: f64::from(x), eig_minus: f64::from(x) };
    Ok(ObservableAssignment::new(witness.outcomes().into_iter().map(|(a0, a1)| [scalar(a0), scalar(a1)]).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSeesawResult {
    /// `|<Ψ|B|Ψ>|` at the witness.
    pub value: f64,
    /// `Tr(B) / 2^m` at the witness.
    pub normalized_trace: f64,
    /// `<Ψ|B|Ψ>` at the witness.
    pub expectation: f64,
    pub witness: ObservableAssignment,
    pub trajectory: Vec<f64>,
}

/// Maximizes `|<Ψ|B|Ψ>|` over observables for a fixed state.
pub fn seesaw_for_state(expr: &BellExpression, state: &[C64], opts: &SeesawOptions) -> Result<StateSeesawResult> {
    let m = expr.parties();
    check_cap(m, OPERATOR_PARTY_CAP)?;
    if state.len() != 1 << m {
        return Err(Error::PartyMismatch { expected: m, found: state.len().trailing_zeros() as usize });
    }
    if opts.restarts == 0 {
        return Err(Error::Domain("see-saw needs at least one restart".into()));
    }
    let lex = expr.lex_coefficients();
    let splits: Vec<PartySplit> = (0..m).map(|p| PartySplit::new(&lex, m, p)).collect();
    let runs: Vec<Result<(usize, StateSeesawResult)>> = (0..2 * opts.restarts)
        .into_par_iter()
        .map(|task| {
            let sign = if task % 2 == 0 { 1.0 } else { -1.0 };
            let mut rng = substream(opts.seed, Purpose::StateSeesaw, (task / 2) as u64);
            let mut obs = ObservableAssignment::random(&mut rng, m);
            let eval = |obs: &ObservableAssignment| {
                let b = build_operator(&lex, &obs.matrices());
                (b.expectation(state), b.trace().re / b.dim() as f64)
            };
            let mut objective = sign * eval(&obs).0;
            let mut trajectory = vec![objective];
            for _ in 0..opts.max_sweeps {
                let before = objective;
                for (party, split) in splits.iter().enumerate() {
                    let k = split.reduced(&obs.matrices(), party, state);
                    for setting in 0..2 {
                        obs.parties[party][setting] = obs.parties[party][setting].best_response(&scaled(&k[setting + 1], sign));
                    }
                }
                objective = sign * eval(&obs).0;
                trajectory.push(objective);
                if objective - before < opts.tol {
                    break;
                }
            }
            let (expectation, normalized_trace) = eval(&obs);
            Ok((task, StateSeesawResult { value: expectation.abs(), normalized_trace, expectation, witness: obs, trajectory }))
        })
        .collect();
    Ok(pick_best(runs, |r| r.value)?.1)
}

/// Spectral radius of `B` with its dominant eigenvector, for callers that
/// need the maximizing state.
pub fn dominant_state(b: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let top = dominant_eigenpair(b, 1.0, None, EigenOptions::default())?;
    let bottom = dominant_eigenpair(b, -1.0, None, EigenOptions::default())?;
    Ok(if top.value.abs() >= bottom.value.abs() { (top.value, top.vector) } else { (bottom.value, bottom.vector) })
}
