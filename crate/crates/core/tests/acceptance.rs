//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Every reference value is produced here independently of the library
//! (closed forms, brute-force sums, exact rational arithmetic).

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use radop_core::berezin::{cross_validate, IterateOptions, ProfileOptions, TransformConfig};
use radop_core::spectrum::path_coverage_gap;
use radop_core::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let o = f();
    (o, start.elapsed())
}

fn within(limit_s: f64, elapsed: Duration) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn moment_oracle() -> Outcome {
    let cfg = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    for s in [0.0, 1.0, 2.0, 5.0] {
        let lambda = eigenvalues_of_symbol(&RadialSymbol::power(s).unwrap(), 201, &cfg).unwrap();
        for (n, v) in lambda.values().iter().enumerate() {
            let exact = (n as f64 + 1.0) / (n as f64 + s + 1.0);
            worst = worst.max(((v.re - exact) / exact).abs());
        }
    }
    outcome(
        worst <= 1e-9,
        format!("max relative error {worst:.2e} (limit 1e-9)"),
    )
}

fn hausdorff_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let len = rng.gen_range(2..60);
        let raw: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let l = EigenvalueSequence::new(raw).unwrap();
        let v = l.values();
        for k in 0..len {
            let h0 = hausdorff_value(&l, 0, k).unwrap();
            worst = worst.max((h0 - v[k].norm()).abs());
            if k >= 1 {
                let h1 = hausdorff_value(&l, 1, k).unwrap();
                let brute = (v[k] * k as f64 - v[k - 1] * k as f64 - v[k - 1]).norm();
                worst = worst.max((h1 - brute).abs() / brute.max(1.0));
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max discrepancy {worst:.2e} over 100 windows (limit 1e-12)"),
    )
}

/// Real windows with `(n+1)|x_{n+1} - x_n| <= 1`: half a bounded random
/// walk with steps `u/(n+1)`, half a log-oscillation of frequency <= 1.
fn d1_bounded_instance(seed: u64, len: usize) -> EigenvalueSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta: f64 = rng.gen_range(0.2..1.0);
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut walk = rng.gen_range(-1.0..1.0);
    let mut values = Vec::with_capacity(len);
    for n in 0..len {
        if n > 0 {
            walk += rng.gen_range(-1.0..1.0) / n as f64;
        }
        let osc = (beta * (n as f64 + 1.0).ln() + phase).sin();
        values.push(0.5 * walk + 0.5 * osc);
    }
    EigenvalueSequence::from_real(&values).unwrap()
}

fn greedy_construction() -> Outcome {
    let mut worst_dev: f64 = 0.0;
    let mut all_audits = true;
    let mut max_d1: f64 = 0.0;
    for seed in 0..10 {
        let x = d1_bounded_instance(100 + seed, 100_000);
        let d1 = d1_seminorm(&x).unwrap().value;
        max_d1 = max_d1.max(d1);
        let r = project_to_d2(&x, 0.1).unwrap();
        let audit = verify_approximation(&x, &r).unwrap();
        all_audits &= audit.delta_pass && audit.curvature_pass && audit.interval_nonempty;
        worst_dev = worst_dev.max(audit.sup_deviation);
    }
    outcome(
        max_d1 <= 1.0 && worst_dev <= 0.5 && all_audits,
        format!(
            "max input d1 {max_d1:.4}, max sup deviation {worst_dev:.4} (limit 0.5), audits {}",
            if all_audits { "all pass" } else { "FAILED" }
        ),
    )
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact `m(C, n)` and `E(C, n)` for integer `C`.
fn exact_block(c: i64, n: i64) -> (i64, BigRational, BigRational) {
    let budget = rat(1, n);
    let mut partial = BigRational::zero();
    let mut m = n;
    let mut e = BigRational::zero();
    loop {
        let k = m + 1;
        let next = &partial + rat(c, k * k);
        if next > budget {
            break;
        }
        partial = next;
        e += &budget - &partial;
        m = k;
    }
    let harmonic = ((n + 1)..=m).fold(BigRational::zero(), |acc, k| acc + rat(1, k));
    (m, e, harmonic)
}

fn block_machinery() -> Outcome {
    let small = find_m(8.0, 8).unwrap();
    let c = choose_c(0.1).unwrap();
    let ns: Vec<u64> = vec![
        84, 85, 86, 90, 95, 100, 120, 150, 200, 250, 300, 400, 500, 750, 1000, 1500, 2000, 3000,
        5000, 10_000,
    ];
    let mut ok = small == 9 && c == 84.0;
    let mut worst_e: f64 = 0.0;
    let mut worst_h: f64 = 0.0;
    for &n in &ns {
        let (m_exact, e_exact, h_exact) = exact_block(84, n as i64);
        let m = find_m(c, n).unwrap();
        let e = e_value(c, n, m).unwrap();
        let e_ref = e_exact.to_f64().unwrap();
        let h_ref = h_exact.to_f64().unwrap();
        ok &= m as i64 == m_exact;
        ok &= (e - e_ref).abs() <= 1e-12 * e_ref.max(1e-3);
        ok &= e_exact < rat(1, 10) && h_exact < rat(1, 10);
        worst_e = worst_e.max(e_ref);
        worst_h = worst_h.max(h_ref);
    }
    outcome(
        ok,
        format!(
            "find_m(8,8) = {small}; C(0.1) = {c}; over 20 n: max E = {worst_e:.4}, max harmonic block = {worst_h:.4} (limit 0.1)"
        ),
    )
}

fn gamma_equivalence() -> Outcome {
    let n = 10_000;
    let family = [
        (
            "1/(n+1)",
            EigenvalueSequence::from_real_fn(n, |k| 1.0 / (k as f64 + 1.0)).unwrap(),
        ),
        (
            "sin(ln(n+1))",
            EigenvalueSequence::from_real_fn(n, |k| (k as f64 + 1.0).ln().sin()).unwrap(),
        ),
        (
            "sin(2 ln(n+1))",
            EigenvalueSequence::from_real_fn(n, |k| (2.0 * (k as f64 + 1.0).ln()).sin()).unwrap(),
        ),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    let mut worst_roundtrip: f64 = 0.0;
    for (name, l) in &family {
        let r = norm_equivalence_check(l).unwrap();
        ok &= r.verdict == Verdict::Holds;
        details.push(format!("{name}: d2 {:.3} |gamma| {:.3}", r.d2, r.gamma_sup));
        let back = lambda_of_gamma(&gamma_of_lambda(l).unwrap(), l.values()[0]).unwrap();
        for (a, b) in back.values().iter().zip(l.values()) {
            worst_roundtrip = worst_roundtrip.max((a - b).norm() / b.norm().max(1e-300).max(1.0));
        }
    }
    ok &= worst_roundtrip <= 1e-12;
    outcome(
        ok,
        format!("{}; roundtrip {worst_roundtrip:.1e}", details.join("; ")),
    )
}

fn berezin_cross_validation() -> Outcome {
    let symbols = [
        ("1", RadialSymbol::constant(1.0).unwrap()),
        ("r^2", RadialSymbol::power(1.0).unwrap()),
        ("1{t>=1/2}", RadialSymbol::indicator_from(0.5).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    for (_, b) in &symbols {
        let rep = cross_validate(
            b,
            &[0, 1, 2],
            &[0.0, 0.3, 0.6, 0.9],
            400,
            &ProfileOptions::default(),
            &TransformConfig::trapezoid(),
        )
        .unwrap();
        worst = worst.max(rep.max_residual);
    }
    outcome(
        worst <= 1e-6,
        format!("max |series - quadrature| {worst:.2e} over 36 cases (limit 1e-6)"),
    )
}

fn laplacian_residuals() -> Outcome {
    let radii = [0.0, 0.3, 0.6, 0.9];
    let harmonic = EigenvalueSequence::from_real_fn(200, |k| 1.0 / (k as f64 + 1.0)).unwrap();
    let square =
        EigenvalueSequence::from_real_fn(200, |k| (k as f64 + 1.0) / (k as f64 + 2.0)).unwrap();
    let opts = ProfileOptions::default();
    let a = laplacian_identity_check(&harmonic, 0, &radii, &opts)
        .unwrap()
        .max_residual;
    let b = laplacian_identity_check(&square, 1, &radii, &opts)
        .unwrap()
        .max_residual;
    outcome(
        a.max(b) <= 1e-7,
        format!("1/(n+1), k=0: {a:.2e}; T_(r^2), k=1: {b:.2e} (limit 1e-7)"),
    )
}

struct Sweeps {
    harmonic: ConvergenceReport,
    alternating: ConvergenceReport,
}

fn sweeps() -> Sweeps {
    let opts = IterateOptions::default();
    let harmonic = EigenvalueSequence::from_real_fn(50, |k| 1.0 / (k as f64 + 1.0)).unwrap();
    let alternating =
        EigenvalueSequence::from_real_fn(50, |k| if k % 2 == 0 { 1.0 } else { -1.0 }).unwrap();
    Sweeps {
        harmonic: convergence_report(&harmonic, 30, 50, &opts).unwrap(),
        alternating: convergence_report(&alternating, 30, 50, &opts).unwrap(),
    }
}

fn convergence_harness(s: &Sweeps) -> Outcome {
    let h = &s.harmonic;
    let min_alt = s
        .alternating
        .rows
        .iter()
        .map(|r| r.deviation)
        .fold(f64::INFINITY, f64::min);
    outcome(
        h.final_deviation < 0.5 * h.initial_deviation && min_alt >= 0.5,
        format!(
            "1/(n+1): deviation {:.4} at k=0, {:.4} at k=30; (-1)^n: min deviation {min_alt:.4} (limit 0.5)",
            h.initial_deviation, h.final_deviation
        ),
    )
}

fn norm_contraction(s: &Sweeps) -> Outcome {
    let mut excess = f64::NEG_INFINITY;
    for rep in [&s.harmonic, &s.alternating] {
        for row in &rep.rows {
            excess = excess.max(row.sup_norm - rep.input_sup_norm);
        }
    }
    outcome(
        excess <= 1e-6,
        format!("max (iterate sup - input sup) {excess:.2e} over 62 iterates (limit 1e-6)"),
    )
}

fn averaged_symbol_bounds() -> Outcome {
    let cfg = QuadratureConfig::default();
    let mut ok = true;
    let mut details = Vec::new();
    for (name, b) in [
        ("1", RadialSymbol::constant(1.0).unwrap()),
        ("1{t>=1/2}", RadialSymbol::indicator_from(0.5).unwrap()),
    ] {
        let r = corollary_bounds_check(&b, 500, &cfg).unwrap();
        let c = r.lcon.constant;
        ok &= r.sup_norm <= c + r.tol;
        ok &= r.d2 <= 10.0 * c + r.tol;
        ok &= r.shifted_d2 <= 32.0 * b.sup_bound() + r.tol;
        details.push(format!(
            "{name}: C {c:.3}, sup {:.3}, d2 {:.3}, shifted d2 {:.3} (8||b|| clause {})",
            r.sup_norm,
            r.d2,
            r.shifted_d2,
            if r.clauses[2].holds { "holds" } else { "fails" }
        ));
    }
    outcome(ok, details.join("; "))
}

fn spectrum_generator() -> Outcome {
    let path = SpectrumPath::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
    let l = sequence_from_path(&path, 200_000, 1.0).unwrap();
    let d1 = d1_seminorm(&l).unwrap().value;
    let lp = limit_points(&l, 0.9, 0.01).unwrap();
    let points = lp.points();
    let gap = path_coverage_gap(&path, &points);
    let raw_gap = path_coverage_gap(&path, &l.values()[lp.tail_start..]);
    let connected = connectedness_check(&points, 0.05).unwrap();
    outcome(
        d1 <= 1.0 && gap < 0.02 && connected,
        format!(
            "d1 {d1:.15}; tail gap {gap:.4} over {} limit points (raw tail {raw_gap:.2e}); connected at 0.05: {connected}",
            points.len()
        ),
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome, Duration, Option<f64>)> = Vec::new();
    let mut run = |id: usize, name: &'static str, limit: Option<f64>, f: &dyn Fn() -> Outcome| {
        let (o, t) = timed(f);
        results.push((id, name, o, t, limit));
    };
    run(1, "moment oracle agreement", Some(5.0), &moment_oracle);
    run(2, "Hausdorff identities", None, &hausdorff_identities);
    run(
        3,
        "greedy d2 approximation",
        Some(10.0),
        &greedy_construction,
    );
    run(
        4,
        "block length and E(C,n) machinery",
        None,
        &block_machinery,
    );
    run(
        5,
        "gamma norm equivalence and roundtrip",
        None,
        &gamma_equivalence,
    );
    run(
        6,
        "Berezin series vs quadrature",
        Some(60.0),
        &berezin_cross_validation,
    );
    run(
        7,
        "invariant Laplacian identity residuals",
        None,
        &laplacian_residuals,
    );
    let start = Instant::now();
    let s = sweeps();
    let sweep_time = start.elapsed();
    let (o8, t8) = timed(|| convergence_harness(&s));
    results.push((8, "Berezin iterate convergence", o8, t8 + sweep_time, None));
    let (o9, t9) = timed(|| norm_contraction(&s));
    results.push((9, "iterate norm contraction", o9, t9, None));
    let (o10, t10) = timed(averaged_symbol_bounds);
    results.push((10, "averaged-symbol bounds", o10, t10, None));
    let (o11, t11) = timed(spectrum_generator);
    results.push((11, "essential spectrum generator", o11, t11, Some(5.0)));

    let mut failures = 0;
    for (id, name, o, t, limit) in &results {
        let time_ok = limit.is_none_or(|l| within(l, *t));
        let pass = o.pass && time_ok;
        if !pass {
            failures += 1;
        }
        let timing = match limit {
            Some(l) => format!("{:.2} s, limit {l} s", t.as_secs_f64()),
            None => format!("{:.2} s", t.as_secs_f64()),
        };
        println!(
            "[{}] criterion {id:>2} {name}: {} [{timing}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        results.len() - failures,
        results.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
