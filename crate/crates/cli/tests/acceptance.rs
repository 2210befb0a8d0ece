//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Run alone with `cargo test -p circumfeas-cli --test acceptance`.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circumfeas::bench::{run_suite, StopPolicy, SuiteOptions};
use circumfeas::instances::{gen_halfspace_pair, gen_line_pair, gen_suite, GeneratorConfig};
use circumfeas::methods::{run_with, RunOptions};
use circumfeas::regularity::audit::{run_audit, AuditCheck, AuditConfig};
use circumfeas::regularity::{
    dist_to_intersection, estimate_error_bound, estimate_rates, rate_bounds, tail_step_ratio, IntersectionOracle,
};
use circumfeas::{circumcenter3, circumcenter_residual, Degeneracy, MethodKind, Point64, StopReason, StoppingCriterion};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn pt(v: &[f64]) -> Point64 {
    Point64::new(v.to_vec()).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
}

/// Centralization, firm quasi-nonexpansiveness and the pCRM oracle on 1000 draws.
fn lemma_suite() -> Outcome {
    let started = Instant::now();
    let cfg = AuditConfig {
        seed: 1234,
        draws: 1000,
        checks: vec![AuditCheck::Centralized, AuditCheck::Qne, AuditCheck::Oracle],
        ..AuditConfig::default()
    };
    let report = match run_audit(&cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("audit error: {e}")),
    };
    let elapsed = started.elapsed();
    let parts: Vec<String> = report
        .checks
        .iter()
        .map(|c| format!("{} {}/{} ok ({} skipped)", c.check, c.evaluated - c.violations.len(), c.evaluated, c.skipped))
        .collect();
    let all_evaluated = report.checks.iter().all(|c| c.evaluated > 0);
    outcome(
        report.passed && all_evaluated && elapsed < Duration::from_secs(60),
        format!("{}; {:.1}s", parts.join(", "), elapsed.as_secs_f64()),
    )
}

fn circumcenter_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut worst_span = 0.0f64;
    let mut degenerate = 0;
    for _ in 0..10_000 {
        let n = rng.random_range(2..=10);
        let mut draw = || Point64::new((0..n).map(|_| rng.random_range(-10.0..10.0)).collect()).unwrap();
        let (z, v, w) = (draw(), draw(), draw());
        let r = circumcenter3(&z, &v, &w);
        if r.degeneracy != Degeneracy::Generic {
            degenerate += 1;
            continue;
        }
        let scale = 1.0 + r.center.dist(&z);
        worst = worst.max(circumcenter_residual(&r.center, &z, &v, &w) / scale);
        // Affine span: remove the components along v - z and w - z.
        let (a, b) = (&v - &z, &w - &z);
        let c = &r.center - &z;
        let (aa, ab, bb) = (a.dot(&a), a.dot(&b), b.dot(&b));
        let det = aa * bb - ab * ab;
        let (ca, cb) = (c.dot(&a), c.dot(&b));
        let s = (ca * bb - cb * ab) / det;
        let t = (cb * aa - ca * ab) / det;
        let off = c.axpy(-s, &a).axpy(-t, &b).norm();
        worst_span = worst_span.max(off / scale);
    }
    let hand = circumcenter3(&pt(&[0.0, 0.0]), &pt(&[2.0, 0.0]), &pt(&[1.0, 3.0])).center;
    let hand_err = hand.dist(&pt(&[1.0, 4.0 / 3.0]));
    outcome(
        worst <= 1e-9 && worst_span <= 1e-9 && hand_err <= 1e-12,
        format!(
            "max residual/scale {worst:.2e}, max off-span/scale {worst_span:.2e}, {degenerate} degenerate, hand example error {hand_err:.1e}"
        ),
    )
}

fn affine_one_step() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ok = 0;
    let mut worst = 0.0f64;
    for s in 0..100 {
        let (x, y, p) = gen_line_pair::<f64>(s).unwrap();
        let z0 = pt(&[rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0)]);
        let stop = [
            StoppingCriterion::DistanceToKnownSolution { eps: 1e-10, solution: p.clone() },
            StoppingCriterion::ProjectionBudget { max: 40 },
        ];
        let run = run_with(MethodKind::Ccrm, &x, &y, &z0, &stop, &RunOptions::default()).unwrap();
        let err = run.final_point().dist(&p);
        worst = worst.max(err);
        if run.iterations() == 1 && run.total_projections == 4 && err < 1e-10 {
            ok += 1;
        }
    }
    outcome(ok == 100, format!("{ok}/100 one-step solves, worst error {worst:.1e}"))
}

/// Largest per-step distance ratio in the second half of the run (0 after finite termination).
fn tail_ratio(x: &circumfeas::ConvexSet64, y: &circumfeas::ConvexSet64, method: MethodKind, z0: &Point64) -> f64 {
    // Fixed budget: a gap stop would fire at once when z0 already lies in X.
    let stop = [StoppingCriterion::ProjectionBudget { max: 400 }];
    let run = run_with(method, x, y, z0, &stop, &RunOptions::default()).unwrap();
    let d: Vec<f64> = run
        .iterates
        .iter()
        .map(|z| dist_to_intersection(x, y, &IntersectionOracle::Halfspaces, z).unwrap())
        .collect();
    tail_step_ratio(&d, 0.5, 1e-13).unwrap_or(0.0)
}

fn rate_bounds_check() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, angle) in [("pi/6", PI / 6.0), ("pi/4", PI / 4.0), ("pi/3", PI / 3.0)] {
        let (x, y, omega) = gen_halfspace_pair::<f64>(angle, 2, 0).unwrap();
        let b = rate_bounds(omega).unwrap();
        // Start on the far side of the apex, where MAP zigzags.
        let z0 = pt(&[-5.0, 1.0]);
        let map = tail_ratio(&x, &y, MethodKind::Map, &z0);
        let spm = tail_ratio(&x, &y, MethodKind::Spm, &z0);
        let ccrm = tail_ratio(&x, &y, MethodKind::Ccrm, &z0);
        let cos2 = angle.cos().powi(2);
        let pass = map <= b.map + 0.05
            && spm <= b.spm + 0.05
            && ccrm <= b.ccrm + 0.05
            && (map - cos2).abs() <= 0.02;
        ok &= pass;
        parts.push(format!(
            "{name}: MAP {map:.4}/{:.4} SPM {spm:.4}/{:.4} cCRM {ccrm:.4}/{:.4}",
            b.map, b.spm, b.ccrm
        ));
    }
    outcome(ok, parts.join("; "))
}

fn interior_benchmark() -> Outcome {
    let started = Instant::now();
    let insts = gen_suite(&GeneratorConfig::new(100, 30, 1.1, 1234)).unwrap();
    let methods = [MethodKind::Ccrm, MethodKind::Map, MethodKind::CrmProd];
    let report = run_suite(&insts, &methods, StopPolicy::interior(), &SuiteOptions { threads: Some(1), keep_traces: false })
        .unwrap();
    let cost = |m| report.records_for(m).map(|r| report.stat_cost(r)).collect::<Vec<f64>>();
    let (c, m, p) = (cost(MethodKind::Ccrm), cost(MethodKind::Map), cost(MethodKind::CrmProd));
    let ordered = (0..c.len()).filter(|&i| c[i] < m[i] && m[i] < p[i]).count();
    let (mc, mm, mp) = (median(c.clone()), median(m), median(p));
    let frac = ordered as f64 / c.len() as f64;
    outcome(
        frac >= 0.9 && mc <= 60.0 && mm >= 5.0 * mc && mp >= 5.0 * mc,
        format!(
            "ordering on {ordered}/{}; medians cCRM {mc} MAP {mm} CRMprod {mp}; {:.1}s",
            c.len(),
            started.elapsed().as_secs_f64()
        ),
    )
}

fn singleton_benchmark() -> Outcome {
    let insts = gen_suite(&GeneratorConfig::new(20, 15, 1.0, 1234)).unwrap();
    let methods = [MethodKind::Ccrm, MethodKind::Map, MethodKind::CrmProd];
    let policy = StopPolicy::singleton().with_budget(100_000);
    let report = run_suite(&insts, &methods, policy, &SuiteOptions { threads: None, keep_traces: true }).unwrap();
    let exhausted = |m| report.records_for(m).all(|r| r.stop_reason == StopReason::Budget.id());
    let solved = report.records_for(MethodKind::Ccrm).filter(|r| r.solved).count();
    let q = |m| -> Vec<f64> {
        report
            .records_for(m)
            .map(|r| {
                let d = r.residuals.as_ref().expect("traces kept");
                estimate_rates(d, 0.5).map(|e| e.q).unwrap_or(f64::NAN)
            })
            .collect()
    };
    let (qc, qm) = (q(MethodKind::Ccrm), q(MethodKind::Map));
    let qc_max = qc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let qm_min = qm.iter().copied().fold(f64::INFINITY, f64::min);
    let n = insts.len();
    outcome(
        exhausted(MethodKind::Map)
            && exhausted(MethodKind::CrmProd)
            && solved * 5 >= n * 4
            && qc.iter().all(|&v| v < 1.0)
            && qm.iter().all(|&v| v >= 0.99),
        format!(
            "MAP exhausted all: {}, CRMprod exhausted all: {}, cCRM solved {solved}/{n} (median {} projections); tail q cCRM max {qc_max:.4}, MAP min {qm_min:.6}",
            exhausted(MethodKind::Map),
            exhausted(MethodKind::CrmProd),
            report.stats_for(MethodKind::Ccrm).unwrap().stats.median
        ),
    )
}

fn error_bound_estimator() -> Outcome {
    let (x, y, _) = gen_halfspace_pair::<f64>(PI / 3.0, 2, 0).unwrap();
    let est = estimate_error_bound(&x, &y, &IntersectionOracle::Halfspaces, &pt(&[0.0, 0.0]), 0.1, 100_000, 1234)
        .unwrap();
    let target = (PI / 3.0).sin();
    outcome(
        (est.omega - target).abs() <= 2e-2,
        format!("estimated omega {:.4} vs sin(pi/3) = {target:.4} ({} samples)", est.omega, est.sample_count),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_circumfeas");
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let status = Command::new(bin)
            .args(["bench", "--suite", "interior", "--seed", "1234", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        if !status.status.success() {
            return outcome(false, format!("bench exited with {}", status.status));
        }
        files.push(std::fs::read(out.join("records.csv")).unwrap());
    }
    outcome(files[0] == files[1], format!("records.csv sizes {} and {} bytes", files[0].len(), files[1].len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("lemma suite", lemma_suite),
        ("circumcenter kernel", circumcenter_kernel),
        ("affine one-step", affine_one_step),
        ("rate bounds", rate_bounds_check),
        ("interior benchmark", interior_benchmark),
        ("singleton benchmark", singleton_benchmark),
        ("error-bound estimator", error_bound_estimator),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.passed {
            failed += 1;
        }
        println!("criterion {} [{name}]: {} - {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
