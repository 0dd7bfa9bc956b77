use std::f64::consts::PI;
use std::path::Path;

use werner_core::classical::DeterministicStrategy;
use werner_core::gamma::{gammas, scan};
use werner_core::quantum::{seesaw_lower, SeesawOptions, SeesawResult};
use werner_core::tables::{table1, table2, table3, RangeTable};
use werner_core::werner::{
    detect_visibility, detectability, e3_entanglement_onset, lemma4_upper, measure_lower_bound, measure_monte_carlo,
    theorem1_general_range, theorem1_homogeneous_range, theorem2_condition, StateFile, ThetaRange,
};
use werner_core::{
    analytic_quantum_upper, builtin, closed_form_classical, composite_ratio_upper, lhv_bound_capped, BellExpression, Error,
    GammaScanConfig, Warning, WernerFamily,
};

use crate::args::{
    BoundsArgs, Detector, ExamplesArgs, GammaArgs, GhzArgs, MeasureArgs, PureArgs, Table, TablesArgs, WernerCommand,
};
use crate::error::CliError;
use crate::report::{Report, Section, Value};

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Loads `builtin:NAME` or an expression file.
pub fn load_expression(arg: &str) -> Result<BellExpression> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return Ok(builtin(name)?);
    }
    let path = Path::new(arg);
    BellExpression::from_json(&read(path)?).map_err(|source| CliError::Input { path: path.to_owned(), source })
}

pub fn load_state(path: &Path) -> Result<WernerFamily> {
    let amplitudes = StateFile::from_json(&read(path)?)
        .and_then(StateFile::into_amplitudes)
        .map_err(|source| CliError::Input { path: path.to_owned(), source })?;
    Ok(WernerFamily::pure(amplitudes)?)
}

fn witness_string(w: &DeterministicStrategy) -> String {
    let sign = |x: i8| if x > 0 { '+' } else { '-' };
    w.outcomes().into_iter().map(|(a, b)| format!("{}{}", sign(a), sign(b))).collect::<Vec<_>>().join(" ")
}

fn range_cells(range: Option<ThetaRange>) -> [Value; 3] {
    match range {
        Some(r) => [Value::num(r.theta_l / PI), Value::num(r.theta_u / PI), Value::num(r.r)],
        None => [Value::text("-"), Value::text("-"), Value::text("-")],
    }
}

fn seesaw_witness_section(title: &str, r: &SeesawResult) -> Section {
    let mut s = Section::new(title, &["party", "setting", "x", "y", "z", "λ+", "λ-"]);
    for (k, pair) in r.witness.observables().iter().enumerate() {
        for (setting, o) in pair.iter().enumerate() {
            let [x, y, z] = o.axis();
            s.row(vec![
                Value::int(k + 1),
                Value::int(setting),
                Value::num(x),
                Value::num(y),
                Value::num(z),
                Value::num(o.eig_plus()),
                Value::num(o.eig_minus()),
            ]);
        }
    }
    s
}

pub fn bounds(args: &BoundsArgs) -> Result<Report> {
    let expr = load_expression(&args.expr)?;
    let m = expr.parties();
    let mut report = Report::new("bounds");
    report
        .input("expression", Value::text(&args.expr))
        .input("parties", Value::int(m))
        .input("terms", Value::int(expr.term_count()));

    let lhv = lhv_bound_capped(&expr, args.cap)?;
    let mut s = Section::key_value("bounds");
    s.entry("lhv bound", Value::num(lhv.value))
        .entry("lhv witness", Value::text(witness_string(&lhv.witness)))
        .entry("lhv achieved sign", Value::int(lhv.achieved_sign))
        .entry("homogeneous", expr.is_homogeneous().into());
    if args.closed_form && !expr.is_homogeneous() {
        return Err(Error::NotHomogeneous.into());
    }
    if expr.is_homogeneous() {
        let closed = closed_form_classical(&expr)?;
        let upper = analytic_quantum_upper(&expr)?;
        s.entry("closed form", Value::num(closed))
            .entry("quantum upper (√3 · closed form)", Value::num(upper.general))
            .entry("quantum upper, anticommuting (√(5/2) · closed form)", Value::num(upper.anticommuting))
            .entry("r_cq upper", Value::num(upper.general / lhv.value));
        if lhv.value < closed {
            report.warn(Warning::closed_form_gap(lhv.value, closed));
        }
    }
    let mut seesaw = None;
    if args.seesaw {
        let r = seesaw_lower(&expr, &SeesawOptions { restarts: args.restarts, seed: args.seed, ..Default::default() })?;
        s.entry("see-saw lower", Value::num(r.value))
            .entry("r_cq lower", Value::num(r.value / lhv.value))
            .entry("see-saw winning restart", Value::int(r.restart))
            .entry("see-saw sign", Value::int(r.sign))
            .entry("see-saw sweeps", Value::int(r.trajectory.len().saturating_sub(1)));
        report.seed = Some(args.seed);
        report.input("restarts", Value::int(args.restarts));
        seesaw = Some(r);
    }
    report.sections.push(s);
    report.sections.push(block_section(&expr, args.cap)?);
    if let Some(r) = &seesaw {
        report.sections.push(seesaw_witness_section("see-saw witness", r));
    }
    Ok(report)
}

fn block_section(expr: &BellExpression, cap: usize) -> Result<Section> {
    let g = gammas(expr)?;
    let mut s = Section::new("blocks", &["block", "terms", "block bound", "γ"]);
    for (block, gamma) in expr.blocks().zip(&g) {
        let bound = if block.is_empty() { 0.0 } else { lhv_bound_capped(&block.to_expression(), cap)?.value };
        s.row(vec![Value::int(block.first_party()), Value::int(block.terms().count()), Value::num(bound), Value::num(*gamma)]);
    }
    let m = expr.parties();
    if m >= 2 {
        s.row(vec![
            Value::text("composite √3 Σ_{i<m} 1/γ_i + 1"),
            Value::Null,
            Value::Null,
            Value::num(composite_ratio_upper(&g[..m - 1])?),
        ]);
    }
    s.row(vec![Value::text("composite √3 Σ_{i≤m} 1/γ_i + 1"), Value::Null, Value::Null, Value::num(composite_ratio_upper(&g)?)]);
    Ok(s)
}

fn range_table(title: &str, t: RangeTable) -> Section {
    let mut s = Section::new(title, &["m", "θ_l/π", "θ_u/π", "r", "printed θ_l/π", "printed θ_u/π", "printed r"]);
    for row in t.rows {
        let mut cells = vec![Value::int(row.parties)];
        cells.extend(range_cells(row.range));
        match row.printed {
            Some((l, u, r)) => cells.extend([Value::num(l), Value::num(u), Value::num(r)]),
            None => cells.extend([Value::text("-"), Value::text("-"), Value::text("-")]),
        }
        s.row(cells);
    }
    s
}

pub fn tables(args: &TablesArgs) -> Result<Report> {
    let mut report = Report::new("tables");
    match args.which {
        Table::I => {
            report.input("table", Value::text("I"));
            let t = table1()?;
            t.warnings.iter().cloned().for_each(|w| report.warn(w));
            report.sections.push(range_table("full-correlation undetectable ranges", t));
        }
        Table::III => {
            report.input("table", Value::text("III"));
            let t = table3()?;
            t.warnings.iter().cloned().for_each(|w| report.warn(w));
            report.warn(Warning::headline_constant());
            report.sections.push(range_table("undetectable ranges with γ_i = 1", t));
        }
        Table::II => {
            report.input("table", Value::text("II")).input("max m", Value::int(args.max_m));
            if let Some(n) = args.samples {
                report.input("samples", Value::int(n));
            }
            report.seed = Some(args.seed);
            let t = table2(args.max_m, args.samples, args.seed, args.force)?;
            let mut s =
                Section::new("sampled γ lower bounds", &["m", "i", "samples", "γ_i min", "printed", "witness sample", "skipped"]);
            for row in &t.rows {
                for (e, printed) in row.scan.entries.iter().zip(&row.printed) {
                    s.row(vec![
                        Value::int(row.scan.parties),
                        Value::int(e.index),
                        Value::int(row.scan.samples),
                        Value::opt_num(e.gamma_min),
                        Value::num(*printed),
                        e.witness_sample.map_or(Value::Null, Value::int),
                        Value::int(e.skipped),
                    ]);
                }
            }
            t.warnings.iter().cloned().for_each(|w| report.warn(w));
            report.sections.push(s);
        }
    }
    Ok(report)
}

fn detection(report: &mut Report, family: &WernerFamily, d: &Detector, gammas: Option<&[f64]>) -> Result<()> {
    let c2 = d.c2.unwrap_or(3f64.sqrt() * d.c1);
    report.input("c1", Value::num(d.c1)).input("c2", Value::num(c2));
    let r = detectability(family, d.c1, c2, gammas)?;
    let mut s = Section::key_value("detectability");
    s.entry("v separable", Value::num(r.v_separable))
        .entry("v violation lower", Value::num(r.v_violation_lower))
        .entry("undetectable", r.undetectable.into());
    if let Some(arg) = &d.detect {
        let expr = load_expression(arg)?;
        let found = detect_visibility(&expr, family, d.seed)?;
        report.input("detect", Value::text(arg));
        report.seed = Some(d.seed);
        s.entry("detect lhv bound", Value::num(found.lhv)).entry("detect threshold", Value::opt_num(found.threshold));
    }
    report.sections.push(s);
    if let WernerFamily::Ghz { theta, .. } = family {
        let mut s = Section::new("undetectable angle range", &["θ_l", "θ_u", "θ_l/π", "θ_u/π", "r", "θ inside"]);
        match r.theta_range {
            Some(range) => s.row(vec![
                Value::num(range.theta_l),
                Value::num(range.theta_u),
                Value::num(range.theta_l / PI),
                Value::num(range.theta_u / PI),
                Value::num(range.r),
                (range.theta_l < *theta && *theta < range.theta_u).into(),
            ]),
            None => s.row(vec![
                Value::text("-"),
                Value::text("-"),
                Value::text("-"),
                Value::text("-"),
                Value::text("-"),
                false.into(),
            ]),
        };
        report.sections.push(s);
    }
    Ok(())
}

fn pure_state_section(amplitudes: &[werner_core::C64]) -> Result<Section> {
    let mut s = Section::key_value("separability");
    s.entry("separable visibility upper bound", Value::num(lemma4_upper(amplitudes)?))
        .entry("coherence entanglement onset", Value::opt_num(e3_entanglement_onset(amplitudes)?));
    Ok(s)
}

pub fn werner(cmd: &WernerCommand) -> Result<Report> {
    match cmd {
        WernerCommand::Ghz(GhzArgs { m, theta, gammas, detector }) => {
            let family = WernerFamily::ghz(*m, *theta)?;
            let mut report = Report::new("werner ghz");
            report.input("parties", Value::int(*m)).input("theta", Value::num(*theta));
            if let Some(g) = gammas {
                report.input("gammas", Value::text(g.iter().map(f64::to_string).collect::<Vec<_>>().join(",")));
                report.warn(Warning::headline_constant());
            }
            detection(&mut report, &family, detector, gammas.as_deref())?;
            report.sections.push(pure_state_section(&family.amplitudes())?);
            Ok(report)
        }
        WernerCommand::Pure(PureArgs { state, detector }) => {
            let family = load_state(state)?;
            let mut report = Report::new("werner pure");
            report.input("state", Value::text(state.display().to_string())).input("parties", Value::int(family.parties()));
            report.sections.push(pure_state_section(&family.amplitudes())?);
            detection(&mut report, &family, detector, None)?;
            Ok(report)
        }
    }
}

pub fn measure(args: &MeasureArgs) -> Result<Report> {
    let poly = args.poly.unwrap_or(args.m as f64);
    let mut report = Report::new("measure");
    report.seed = Some(args.seed);
    report.input("parties", Value::int(args.m)).input("poly", Value::num(poly)).input("samples", Value::int(args.samples));
    let bound = measure_lower_bound(args.m, poly)?;
    let est = measure_monte_carlo(args.m, poly, args.samples, args.seed)?;
    let upper = est.fraction + 3.0 * est.std_error;
    let mut s = Section::key_value("measure");
    s.entry("threshold c", Value::num(est.threshold))
        .entry("hits", Value::int(est.hits))
        .entry("fraction", Value::num(est.fraction))
        .entry("std error", Value::num(est.std_error))
        .entry("fraction + 3σ", Value::num(upper))
        .entry("claimed lower bound", Value::num(bound))
        .entry("consistent", (upper >= bound).into());
    if upper < bound {
        report.warn(Warning::new(
            "measure-bound",
            format!(
                "sampled fraction {} + 3σ = {} is below the claimed lower bound {}",
                Value::num(est.fraction),
                Value::num(upper),
                Value::num(bound)
            ),
        ));
    }
    report.sections.push(s);
    Ok(report)
}

pub fn gamma(args: &GammaArgs) -> Result<Report> {
    let samples = args.samples.unwrap_or_else(|| GammaScanConfig::default_samples(args.m));
    let mut report = Report::new("gamma");
    report.seed = Some(args.seed);
    report.input("parties", Value::int(args.m)).input("samples", Value::int(samples));
    let result = scan(&GammaScanConfig { cap: args.cap, ..GammaScanConfig::new(args.m, samples, args.seed) })?;
    let mut s = Section::new("γ minima", &["i", "γ_i min", "witness sample", "skipped"]);
    for e in &result.entries {
        s.row(vec![
            Value::int(e.index),
            Value::opt_num(e.gamma_min),
            e.witness_sample.map_or(Value::Null, Value::int),
            Value::int(e.skipped),
        ]);
        if e.skipped > 0 {
            report.warn(Warning::gamma_skipped(e.index, e.skipped, samples));
        }
    }
    report.sections.push(s);
    Ok(report)
}

fn example_section(name: &str, expr: &BellExpression, args: &ExamplesArgs, report: &mut Report) -> Result<Section> {
    let m = expr.parties();
    let mut s = Section::key_value(name);
    let lhv = lhv_bound_capped(expr, werner_core::classical::DEFAULT_PARTY_CAP)?.value;
    s.entry("parties", Value::int(m)).entry("lhv bound", Value::num(lhv)).entry("homogeneous", expr.is_homogeneous().into());
    if expr.is_homogeneous() {
        let closed = closed_form_classical(expr)?;
        s.entry("closed form", Value::num(closed))
            .entry("quantum upper (√3 · closed form)", Value::num(analytic_quantum_upper(expr)?.general));
        if lhv < closed {
            report.warn(Warning::closed_form_gap(lhv, closed));
        }
    }
    let r = seesaw_lower(expr, &SeesawOptions { restarts: args.restarts, seed: args.seed, ..Default::default() })?;
    s.entry("see-saw lower", Value::num(r.value)).entry("r_cq lower", Value::num(r.value / lhv));
    let g = gammas(expr)?;
    let shown: Vec<String> = g.iter().map(|x| Value::num(*x).to_string()).collect();
    s.entry("γ", Value::text(format!("({})", shown.join(", "))))
        .entry("composite √3 Σ_{i<m} 1/γ_i + 1", Value::num(composite_ratio_upper(&g[..m - 1])?))
        .entry("composite √3 Σ_{i≤m} 1/γ_i + 1", Value::num(composite_ratio_upper(&g)?));
    let range =
        if expr.is_homogeneous() { Some(theorem1_homogeneous_range(m)?) } else { theorem1_general_range(m, &g[..m - 1])? };
    let [l, u, rr] = range_cells(range);
    s.entry("undetectable θ_l/π", l).entry("undetectable θ_u/π", u).entry("undetectable r", rr);
    let t2 = theorem2_condition(m, &g[..m - 1], m as f64)?;
    s.entry("Σ_{i<m} 1/γ_i", Value::num(t2.inverse_sum))
        .entry("measure condition threshold (poly = m)", Value::num(t2.headline_threshold))
        .entry("measure condition holds", t2.headline_holds.into())
        .entry("measure condition, alternative threshold", Value::num(t2.derived_threshold))
        .entry("measure condition, alternative holds", t2.derived_holds.into());
    Ok(s)
}

pub fn examples(args: &ExamplesArgs) -> Result<Report> {
    let mut report = Report::new("examples");
    report.seed = Some(args.seed);
    report.input("restarts", Value::int(args.restarts));
    for (title, name) in [("CHSH", "chsh"), ("Mermin(3)", "mermin"), ("CH", "ch"), ("SASA", "sasa")] {
        let expr = builtin(name)?;
        let s = example_section(title, &expr, args, &mut report)?;
        report.sections.push(s);
    }
    report.warn(Warning::headline_constant());
    Ok(report)
}
