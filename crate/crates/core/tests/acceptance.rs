use std::f64::consts::{FRAC_PI_4, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use werner_core::gamma::sample_gammas;
use werner_core::quantum::SeesawOptions;
use werner_core::tables::{table1, table2, table3};
use werner_core::werner::{
    detect_visibility, ghz_amplitudes, ghz_separability_threshold, lemma4_upper, measure_lower_bound, measure_monte_carlo,
    visibility_lower_bound,
};
use werner_core::{
    builtin, closed_form_classical, gamma_for, lhv_bound, mermin, seesaw_lower, BellExpression, StrategyMatrix, WernerFamily,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(start: Instant, limit: Duration, detail: String) -> Outcome {
    let elapsed = start.elapsed();
    check(elapsed < limit, format!("{detail}; {:.2?} (limit {:?})", elapsed, limit))
}

fn on_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn random_expression(rng: &mut ChaCha8Rng, parties: usize, homogeneous: bool) -> BellExpression {
    loop {
        let e = if homogeneous {
            let terms: Vec<(String, f64)> = (0..1usize << parties)
                .map(|bits| {
                    let pattern = (0..parties).map(|k| if bits >> (parties - 1 - k) & 1 == 1 { '1' } else { '0' }).collect();
                    (pattern, rng.random_range(-3.0..3.0))
                })
                .collect();
            BellExpression::new(parties, terms).unwrap()
        } else {
            let len = 3usize.pow(parties as u32) - 1;
            let v = (0..len).map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(-5.0..5.0) }).collect();
            BellExpression::from_vector(parties, v).unwrap()
        };
        if !e.is_zero() {
            return e;
        }
    }
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let t = table1().map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    for row in &t.rows {
        let range = row.range.ok_or(format!("m={} has no range", row.parties))?;
        let (l, _, r) = row.printed.unwrap();
        if (range.theta_l / PI - l).abs() > 5e-5 {
            bad.push(format!("m={} θ_l/π={:.6}", row.parties, range.theta_l / PI));
        }
        if range.theta_u != PI - range.theta_l {
            bad.push(format!("m={} θ_u≠π−θ_l", row.parties));
        }
        if row.parties != 3 && (range.r - r).abs() > 2e-4 {
            bad.push(format!("m={} r={:.4}%", row.parties, 100.0 * range.r));
        }
    }
    let names: Vec<&str> = t.warnings.iter().map(|w| w.name.as_str()).collect();
    if names != ["table1-m3-ratio"] {
        bad.push(format!("warnings {names:?}"));
    }
    if !bad.is_empty() {
        return Err(bad.join(", "));
    }
    within(start, Duration::from_secs(1), format!("5 rows match, warning: {}", t.warnings[0].message))
}

fn criterion2() -> Outcome {
    let start = Instant::now();
    let t = table3().map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    for row in &t.rows {
        match (row.range, row.printed) {
            (None, None) => {}
            (Some(range), Some((l, _, _))) if (range.theta_l / PI - l).abs() <= 5e-5 => {}
            (range, _) => bad.push(format!("m={} got {:?}", row.parties, range.map(|r| r.theta_l / PI))),
        }
    }
    if t.rows[0].parties != 2 || t.rows[0].range.is_some() {
        bad.push("m=2 range is not empty".into());
    }
    if !bad.is_empty() {
        return Err(bad.join(", "));
    }
    within(start, Duration::from_secs(1), "m=2 empty, m=3..6 θ_l/π within 5e-5".into())
}

fn criterion3() -> Outcome {
    let start = Instant::now();
    let ch = builtin("ch").map_err(|e| e.to_string())?;
    let full = lhv_bound(&ch).map_err(|e| e.to_string())?.value;
    let b1 = lhv_bound(&ch.block(1).unwrap().to_expression()).unwrap().value;
    let b2 = lhv_bound(&ch.block(2).unwrap().to_expression()).unwrap().value;
    let (g1, g2) = (gamma_for(&ch, 1).unwrap(), gamma_for(&ch, 2).unwrap());
    let detail = format!("‖B‖={full} ‖B1‖={b1} ‖B2‖={b2} γ1={g1} γ2={g2}");
    if full != 4.0 || b1 != 3.0 || b2 != 1.0 || g1 != 4.0 / 3.0 || g2 != 4.0 {
        return Err(detail);
    }
    within(start, Duration::from_secs(1), detail)
}

fn criterion4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..200 {
        let m = 1 + k % 3;
        let e = random_expression(&mut rng, m, false);
        let lhv = lhv_bound(&e).unwrap().value;
        let oracle = StrategyMatrix::full(m).unwrap().max_abs_product(e.coefficients());
        if lhv != oracle {
            return Err(format!("expression {k} (m={m}): {lhv} vs {oracle}"));
        }
    }
    within(start, Duration::from_secs(30), "200 expressions agree exactly".into())
}

fn criterion5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..200 {
        let m = 1 + k % 4;
        let e = random_expression(&mut rng, m, true);
        let (lhv, closed) = (lhv_bound(&e).unwrap().value, closed_form_classical(&e).unwrap());
        if lhv > closed + 1e-12 {
            return Err(format!("expression {k} (m={m}): {lhv} > {closed}"));
        }
    }
    let m3 = mermin(3).unwrap();
    let (lhv, closed) = (lhv_bound(&m3).unwrap().value, closed_form_classical(&m3).unwrap());
    if lhv != 2.0 || closed != 4.0 {
        return Err(format!("Mermin(3): lhv={lhv} closed={closed}"));
    }
    within(start, Duration::from_secs(60), "200 homogeneous expressions ordered; Mermin(3) lhv=2 closed=4".into())
}

fn seesaw_pair() -> (f64, f64) {
    let opts = SeesawOptions { restarts: 20, ..Default::default() };
    let chsh = seesaw_lower(&builtin("chsh").unwrap(), &opts).unwrap().value;
    let m3 = seesaw_lower(&mermin(3).unwrap(), &opts).unwrap().value;
    (chsh, m3)
}

fn criterion6() -> Outcome {
    let start = Instant::now();
    let (chsh, m3) = seesaw_pair();
    let root3 = 3f64.sqrt();
    let chsh_cf = closed_form_classical(&builtin("chsh").unwrap()).unwrap();
    let m3_cf = closed_form_classical(&mermin(3).unwrap()).unwrap();
    let detail = format!("CHSH={chsh:.9} Mermin(3)={m3:.9}");
    let ok = (chsh - 2.0 * 2f64.sqrt()).abs() <= 1e-3
        && (m3 - 4.0).abs() <= 1e-3
        && chsh <= root3 * chsh_cf + 1e-9
        && m3 <= root3 * m3_cf + 1e-9;
    if !ok {
        return Err(detail);
    }
    within(start, Duration::from_secs(60), detail)
}

fn criterion7() -> Outcome {
    let start = Instant::now();
    let exact = ghz_separability_threshold(2, FRAC_PI_4).unwrap();
    let family = WernerFamily::ghz(2, FRAC_PI_4).unwrap();
    let empirical = detect_visibility(&builtin("chsh").unwrap(), &family, 0).unwrap().threshold.ok_or("CHSH never violated")?;
    let lower = visibility_lower_bound(2, 2.0, 2.0 * 2f64.sqrt()).unwrap();
    let closed = 6.0 / (8.0 * 2f64.sqrt() - 2.0);
    let detail = format!("v*={exact} detect={empirical:.6} lower={lower:.9} (6/(8√2−2)={closed:.9})");
    let ok = exact == 1.0 / 3.0
        && (empirical - 1.0 / 2f64.sqrt()).abs() <= 1e-3
        && (lower - closed).abs() <= 1e-6
        && format!("{lower:.4}") == "0.6442"
        && lower <= empirical;
    if !ok {
        return Err(detail);
    }
    within(start, Duration::from_secs(120), detail)
}

fn criterion8() -> Outcome {
    let start = Instant::now();
    for m in 2..=4 {
        for k in 1..=50 {
            let theta = 0.5 * PI * k as f64 / 51.0;
            let upper = lemma4_upper(&ghz_amplitudes(m, theta)).unwrap();
            let exact = ghz_separability_threshold(m, theta).unwrap();
            if upper < exact {
                return Err(format!("m={m} θ={theta}: {upper} < {exact}"));
            }
        }
    }
    let v = lemma4_upper(&ghz_amplitudes(2, FRAC_PI_4)).unwrap();
    if (v - 1.0 / 3f64.sqrt()).abs() > 1e-9 {
        return Err(format!("GHZ(2, π/4) gives {v}"));
    }
    within(start, Duration::from_secs(10), format!("150 grid points dominate; GHZ(2, π/4) gives {v:.12}"))
}

fn table2_minima() -> Vec<Vec<f64>> {
    table2(4, Some(10_000), 0, false).unwrap().rows.iter().map(|r| r.scan.minima()).collect()
}

fn criterion9() -> Outcome {
    let start = Instant::now();
    for m in 2..=4 {
        for s in 0..10_000 {
            let g1 = sample_gammas(m, 0, s)[0];
            if g1.is_some_and(|g| g < 1.0 - 1e-12) {
                return Err(format!("m={m} sample {s}: γ1={g1:?}"));
            }
        }
    }
    let minima = table2_minima();
    for (row, m) in minima.iter().zip(2..) {
        if !(1.0..=1.05).contains(&row[0]) {
            return Err(format!("m={m}: γ1 minimum {}", row[0]));
        }
        if let Some(g) = row.iter().find(|&&g| g < 0.99) {
            return Err(format!("m={m}: γ minimum {g} below 0.99"));
        }
    }
    let shown: Vec<String> = minima
        .iter()
        .zip(2..)
        .map(|(r, m)| format!("m={m} {:?}", r.iter().map(|g| (g * 1e4).round() / 1e4).collect::<Vec<_>>()))
        .collect();
    within(start, Duration::from_secs(600), shown.join("; "))
}

fn criterion10() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for m in 2..=4 {
        let poly = m as f64;
        let est = measure_monte_carlo(m, poly, 100_000, 0).map_err(|e| e.to_string())?;
        let bound = measure_lower_bound(m, poly).unwrap();
        let upper = est.fraction + 3.0 * est.std_error;
        let pass = upper >= bound;
        ok &= pass;
        lines.push(format!("m={m}: {:.5} + 3σ = {upper:.5} vs bound {bound:.5}", est.fraction));
    }
    let detail = lines.join("; ");
    if !ok {
        return Err(detail);
    }
    within(start, Duration::from_secs(60), detail)
}

fn criterion11() -> Outcome {
    let seesaw = (on_threads(1, seesaw_pair), on_threads(4, seesaw_pair));
    let gamma = (on_threads(1, table2_minima), on_threads(4, table2_minima));
    let measure = |threads| on_threads(threads, || measure_monte_carlo(3, 3.0, 100_000, 0).unwrap());
    let measure = (measure(1), measure(4));
    let mut bad = Vec::new();
    if seesaw.0 != seesaw.1 {
        bad.push(format!("see-saw {:?} vs {:?}", seesaw.0, seesaw.1));
    }
    if gamma.0 != gamma.1 {
        bad.push("γ minima differ".into());
    }
    if measure.0 != measure.1 {
        bad.push(format!("measure {:?} vs {:?}", measure.0, measure.1));
    }
    check(
        bad.is_empty(),
        if bad.is_empty() { "see-saw, γ scan and measure identical on 1 and 4 threads".into() } else { bad.join(", ") },
    )
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 11] = [
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
        (9, criterion9),
        (10, criterion10),
        (11, criterion11),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
