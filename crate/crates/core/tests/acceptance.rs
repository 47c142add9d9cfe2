//! End-to-end acceptance run: one PASS/FAIL line per criterion. Runs without
//! the test harness so the lines are never captured.

use std::sync::OnceLock;

use fsi_core::harness::{run_suite, SuiteReport, SUITES};
use fsi_core::io::report_json;
use fsi_core::stability::{
    alpha_bound, confinement_envelope, epsilon_choice, eta_rate, CheckResult, Status,
};
use fsi_core::{simulate, Grid, InputSignal, ProfileDescriptor, SolverConfig, SystemParams};

const WORKERS: usize = 4;

fn suites() -> &'static Vec<SuiteReport> {
    static CELL: OnceLock<Vec<SuiteReport>> = OnceLock::new();
    CELL.get_or_init(|| {
        SUITES
            .iter()
            .map(|name| run_suite(name, None, WORKERS).unwrap())
            .collect()
    })
}

fn suite(name: &str) -> &'static SuiteReport {
    suites().iter().find(|s| s.suite == name).unwrap()
}

fn suite_check<'a>(s: &'a SuiteReport, name: &str) -> &'a CheckResult {
    s.checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("{} has no check {name}", s.suite))
}

fn run_check<'a>(checks: &'a [CheckResult], name: &str) -> Option<&'a CheckResult> {
    checks.iter().find(|c| c.name == name)
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn rest(k: f64, h1: f64) -> SystemParams {
    SystemParams {
        spring_gain: k,
        target: h1,
        initial_position: h1,
        initial_velocity: 0.0,
        initial_profile: ProfileDescriptor::Zero,
    }
}

fn equilibrium() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    for k in [0.0, 1.0] {
        let p = rest(k, 0.25);
        let cfg = SolverConfig {
            t_end: 20.0,
            ..SolverConfig::default()
        };
        let traj = simulate(&p, &Grid::uniform(200), &cfg, &InputSignal::Zero).unwrap();
        for s in &traj.samples {
            worst.0 = worst.0.max(s.energy);
            worst.1 = worst.1.max((s.h - 0.25).abs());
        }
    }
    outcome(
        worst.0 <= 1e-12 && worst.1 <= 1e-12,
        format!("max E = {:e}, max |h - h1| = {:e}", worst.0, worst.1),
    )
}

fn odd_symmetry() -> Outcome {
    // sin(2π(y+1)/2) = -sin(πy) is odd about 0
    let p = SystemParams {
        spring_gain: 1.0,
        target: 0.0,
        initial_position: 0.0,
        initial_velocity: 0.0,
        initial_profile: ProfileDescriptor::SineMode {
            amplitude: 1.0,
            mode: 2,
        },
    };
    let cfg = SolverConfig {
        dt_max: 1e-3,
        t_end: 20.0,
        ..SolverConfig::default()
    };
    let traj = simulate(&p, &Grid::uniform(200), &cfg, &InputSignal::Zero).unwrap();
    let worst = traj.samples.iter().map(|s| s.h.abs()).fold(0.0, f64::max);
    outcome(
        traj.termination.is_completed() && worst <= 1e-8,
        format!("max |h| = {worst:e}"),
    )
}

fn data_list(s: &SuiteReport, key: &str) -> String {
    format!("{key} = {}", s.data[key])
}

fn energy_identity() -> Outcome {
    let s = suite("converge");
    let names = [
        "energy_identity_ratio",
        "factor1_plateau",
        "factor1_separation",
    ];
    let ok = names
        .iter()
        .all(|n| suite_check(s, n).status == Status::Pass);
    outcome(
        ok,
        format!(
            "{}; {}",
            data_list(s, "energy_residual"),
            data_list(s, "energy_residual_factor1")
        ),
    )
}

fn logmass_identity() -> Outcome {
    let s = suite("converge");
    let ok = ["logmass_order", "logmass_finest"]
        .iter()
        .all(|n| suite_check(s, n).status == Status::Pass);
    outcome(ok, data_list(s, "logmass_residual"))
}

const BOUNDS: [&str; 9] = [
    "a2_bound",
    "a1_bound",
    "a1_left_bound",
    "a1_right_bound",
    "p_bound",
    "trace_bound",
    "poincare",
    "norm_equivalence_lower",
    "norm_equivalence_upper",
];

fn pointwise_bounds() -> Outcome {
    let mut runs = 0;
    let mut failures = Vec::new();
    for s in suites() {
        for run in &s.runs {
            let Some(rep) = &run.report else {
                failures.push(format!("{}/{}: no report", s.suite, run.label));
                continue;
            };
            runs += 1;
            let k_positive = run.config.system.spring_gain > 0.0;
            for name in BOUNDS {
                let c = run_check(&rep.checks, name);
                let needed = k_positive || !name.starts_with("norm_equivalence");
                let ok = match c {
                    Some(c) if c.status == Status::Pass => true,
                    Some(c) if c.status == Status::Na => !needed,
                    _ => false,
                };
                if !ok {
                    failures.push(format!("{}/{}/{name}", s.suite, run.label));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{runs} runs, violations: {failures:?}"),
    )
}

fn confinement() -> Outcome {
    let mut l1_runs = 0;
    let mut other = 0;
    let mut failures = Vec::new();
    for s in suites() {
        for run in s.runs.iter().filter(|r| r.report.is_some()) {
            let rep = run.report.as_ref().unwrap();
            let l1 = run.config.signal.is_l1();
            if l1 {
                l1_runs += 1;
            } else {
                other += 1;
            }
            for name in [
                "alpha_lower",
                "alpha_upper",
                "envelope_lower",
                "envelope_upper",
            ] {
                let c = run_check(&rep.checks, name);
                let ok = match c {
                    Some(c) if name.starts_with("alpha") && !l1 => c.status == Status::Na,
                    Some(c) => c.status == Status::Pass,
                    None => false,
                };
                if !ok {
                    failures.push(format!("{}/{}/{name}", s.suite, run.label));
                }
            }
        }
    }
    outcome(
        failures.is_empty() && l1_runs > 0 && other > 0,
        format!("{l1_runs} integrable-input runs, {other} others, violations: {failures:?}"),
    )
}

fn iss_decay() -> Outcome {
    let s = suite("iss-sweep");
    let mut failures = Vec::new();
    let mut logged = 0;
    for run in &s.runs {
        let Some(rep) = &run.report else {
            failures.push(run.label.clone());
            continue;
        };
        let gating: &[&str] = if run.config.system.spring_gain > 0.0 {
            &["energy_decay", "lyapunov_decay"]
        } else {
            &["fluid_decay"]
        };
        for name in gating {
            if run_check(&rep.checks, name).map(|c| c.status) != Some(Status::Pass) {
                failures.push(format!("{}/{name}", run.label));
            }
        }
        logged += rep
            .checks
            .iter()
            .filter(|c| !c.gating && c.name.contains("literal"))
            .count();
    }
    outcome(
        failures.is_empty() && s.runs.len() == 24 && logged > 0,
        format!(
            "{} runs, {logged} literal-gain variants logged, violations: {failures:?}",
            s.runs.len()
        ),
    )
}

fn rate_certification() -> Outcome {
    let s = suite("iss-sweep");
    let mut ok = true;
    let mut ratios = Vec::new();
    for run in &s.runs {
        let k = run.config.system.spring_gain;
        if run.config.signal != InputSignal::Zero || ![0.5, 1.0, 5.0].contains(&k) {
            continue;
        }
        let rep = run.report.as_ref().unwrap();
        match (&rep.fit, rep.constants.eta) {
            (Some(fit), Some(eta)) => {
                ok &= fit.rate >= eta;
                ratios.push(format!("{}: {:.3e}", run.label, fit.rate / eta));
            }
            _ => {
                ok = false;
                ratios.push(format!("{}: no fit", run.label));
            }
        }
    }
    outcome(
        ok && ratios.len() == 6,
        format!("fitted/certified: {ratios:?}"),
    )
}

fn constant_formulas() -> Outcome {
    let eps = epsilon_choice(1.0, 1.0).unwrap();
    let eta = eta_rate(1.0, 1.0).unwrap();
    let p = rest(0.0, 0.0);
    let alpha = alpha_bound(&p, 0.0, 0.0).unwrap();
    let (c1, c2) = confinement_envelope(0.0, &p, 0.0, 0.0);
    let ok = (eps - 1.0 / 576.0).abs() <= 1e-15
        && (eta - 1.0 / 3072.0).abs() <= 1e-15
        && (alpha - 1.0).abs() <= 1e-15
        && (c1 - 2.0 / 3.0).abs() <= 1e-15
        && (c2 - 2.0 / 3.0).abs() <= 1e-15;
    outcome(
        ok,
        format!("eps = {eps:e}, eta = {eta:e}, alpha = {alpha}, c1 = {c1}, c2 = {c2}"),
    )
}

fn local_eiss() -> Outcome {
    let s = suite("local-eiss");
    let applicable: Vec<bool> = serde_json::from_value(s.data["applicable"].clone()).unwrap();
    let mut failures = Vec::new();
    for (run, app) in s.runs.iter().zip(&applicable) {
        let rep = run.report.as_ref().unwrap();
        let bound = run_check(&rep.checks, "local_position_bound").unwrap();
        let expected = if *app { Status::Pass } else { Status::Na };
        if bound.status != expected {
            failures.push(run.label.clone());
        }
    }
    let routing = s
        .checks
        .iter()
        .filter(|c| c.name.starts_with("routing/"))
        .all(|c| c.status == Status::Pass);
    let counts = (
        applicable.iter().filter(|a| **a).count(),
        applicable.iter().filter(|a| !**a).count(),
    );
    outcome(
        failures.is_empty() && routing && counts == (3, 2),
        format!("{counts:?} applicable/not, violations: {failures:?}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let s = suite("oracle-compare");
    let relevant: Vec<&CheckResult> = s
        .checks
        .iter()
        .filter(|c| c.name.ends_with("oracle_gap") || c.name.ends_with("oracle_order"))
        .collect();
    let ok = relevant.len() == 6 && relevant.iter().all(|c| c.status == Status::Pass);
    let gaps: Vec<String> = s.data.iter().map(|(k, v)| format!("{k} = {v}")).collect();
    outcome(ok, gaps.join("; "))
}

fn determinism() -> Outcome {
    let mut mismatched = Vec::new();
    for first in suites() {
        let a = report_json(first);
        for workers in [1, 3] {
            let again = run_suite(&first.suite, None, workers).unwrap();
            if report_json(&again) != a {
                mismatched.push(format!("{} (workers = {workers})", first.suite));
            }
        }
    }
    outcome(
        mismatched.is_empty(),
        format!(
            "{} suites rerun with 1 and 3 workers, mismatches: {mismatched:?}",
            SUITES.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("equilibrium fixed point", equilibrium),
        ("odd-symmetry confinement", odd_symmetry),
        ("energy identity", energy_identity),
        ("log-mass identity", logmass_identity),
        ("pointwise functional bounds", pointwise_bounds),
        ("confinement", confinement),
        ("ISS-type decay", iss_decay),
        ("rate certification", rate_certification),
        ("constant formulas", constant_formulas),
        ("local eISS", local_eiss),
        ("oracle equivalence", oracle_equivalence),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {name}: {tag} ({})", i + 1, o.detail);
        if !o.passed {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
