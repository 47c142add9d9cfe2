//! Predefined experiment suites and parallel sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::diagnostics::{
    energy_residual, energy_residual_with_source_factor, logmass_residual, max_abs, Trajectory,
};
use crate::error::{Error, Result};
use crate::io::Config;
use crate::oracle::{max_stable_dt, oracle_simulate};
use crate::params::{Grid, ProfileDescriptor, SolverConfig, SystemParams};
use crate::signal::InputSignal;
use crate::stability::{self, CheckResult, StabilityReport, Status};
use crate::stepper::simulate;

pub const SUITES: [&str; 5] = [
    "iss-sweep",
    "bounds-audit",
    "converge",
    "oracle-compare",
    "local-eiss",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub label: String,
    pub config: Config,
    pub report: Option<StabilityReport>,
    pub error: Option<String>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.report.as_ref().is_none_or(|r| r.passed())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub runs: Vec<RunReport>,
    /// Checks that span several runs (convergence orders, oracle gaps).
    pub checks: Vec<CheckResult>,
    pub data: Map<String, Value>,
}

impl SuiteReport {
    fn new(
        suite: &str,
        runs: Vec<RunReport>,
        checks: Vec<CheckResult>,
        data: Map<String, Value>,
    ) -> Self {
        let passed =
            runs.iter().all(RunReport::passed) && checks.iter().all(|c| !c.gating || c.passed());
        SuiteReport {
            suite: suite.to_string(),
            passed,
            runs,
            checks,
            data,
        }
    }

    /// Every check of every run plus the suite-level checks.
    pub fn all_checks(&self) -> impl Iterator<Item = (&str, &CheckResult)> {
        self.runs
            .iter()
            .flat_map(|r| {
                r.report
                    .iter()
                    .flat_map(move |rep| rep.checks.iter().map(move |c| (r.label.as_str(), c)))
            })
            .chain(self.checks.iter().map(|c| ("suite", c)))
    }
}

/// Simulates every configuration on a pool of `workers` threads. Results keep
/// the input order.
pub fn sweep(configs: &[Config], workers: usize) -> Vec<Result<Trajectory>> {
    let run = |c: &Config| simulate(&c.system, &c.grid, &c.solver, &c.signal);
    if workers <= 1 {
        return configs.iter().map(run).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| configs.par_iter().map(run).collect()),
        Err(_) => configs.iter().map(run).collect(),
    }
}

/// Recursively merges `patch` into `base`; non-object values replace.
pub fn merge_json(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                merge_json(b.entry(k.clone()).or_insert(Value::Null), v);
            }
        }
        (b, p) => *b = p.clone(),
    }
}

fn apply_overrides(
    configs: Vec<(String, Config)>,
    overrides: Option<&Value>,
) -> Result<Vec<(String, Config)>> {
    let Some(patch) = overrides else {
        return Ok(configs);
    };
    configs
        .into_iter()
        .map(|(label, c)| {
            let mut v = c.to_json();
            merge_json(&mut v, patch);
            Ok((label, Config::from_json(v)?))
        })
        .collect()
}

/// Runs a named suite. `overrides` is a partial configuration merged into
/// every configuration of the suite's matrix.
pub fn run_suite(name: &str, overrides: Option<&Value>, workers: usize) -> Result<SuiteReport> {
    match name {
        "iss-sweep" => Ok(evaluate_matrix(
            name,
            apply_overrides(iss_sweep_matrix(), overrides)?,
            Checks::Full,
            workers,
        )),
        "bounds-audit" => Ok(evaluate_matrix(
            name,
            apply_overrides(bounds_audit_matrix(), overrides)?,
            Checks::Bounds,
            workers,
        )),
        "local-eiss" => {
            let gallery = local_eiss_gallery();
            let expected: Vec<bool> = gallery.iter().map(|g| g.2).collect();
            let configs = apply_overrides(
                gallery.into_iter().map(|(l, c, _)| (l, c)).collect(),
                overrides,
            )?;
            Ok(local_eiss_suite(configs, Some(&expected), workers))
        }
        "converge" => {
            let (_, base) =
                apply_overrides(vec![("golden".into(), golden_config())], overrides)?.remove(0);
            converge(&base, 4, workers)
        }
        "oracle-compare" => {
            let configs = apply_overrides(oracle_compare_matrix(), overrides)?;
            oracle_compare(&configs, workers)
        }
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Checks {
    Full,
    Bounds,
    Local,
}

fn run_reports(
    configs: Vec<(String, Config)>,
    trajs: Vec<Result<Trajectory>>,
    kind: Checks,
) -> Vec<RunReport> {
    configs
        .into_iter()
        .zip(trajs)
        .map(|((label, config), traj)| match traj {
            Ok(t) => {
                let mut report = match kind {
                    Checks::Bounds => stability::bounds_audit(&t),
                    _ => stability::evaluate(&t),
                };
                if kind == Checks::Local {
                    report
                        .checks
                        .extend(stability::local_eiss_check(&t.params, &t.signal, &t));
                }
                RunReport {
                    label,
                    config,
                    report: Some(report),
                    error: None,
                }
            }
            Err(e) => RunReport {
                label,
                config,
                report: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

fn evaluate_matrix(
    name: &str,
    configs: Vec<(String, Config)>,
    kind: Checks,
    workers: usize,
) -> SuiteReport {
    let plain: Vec<Config> = configs.iter().map(|(_, c)| c.clone()).collect();
    let trajs = sweep(&plain, workers);
    let runs = run_reports(configs, trajs, kind);
    SuiteReport::new(name, runs, Vec::new(), Map::new())
}

/// Local exponential ISS runs; `expected` holds the expected applicability
/// of each configuration, when known.
pub fn local_eiss_suite(
    configs: Vec<(String, Config)>,
    expected: Option<&[bool]>,
    workers: usize,
) -> SuiteReport {
    let plain: Vec<Config> = configs.iter().map(|(_, c)| c.clone()).collect();
    let applicable: Vec<bool> = plain
        .iter()
        .map(|c| stability::local_eiss_applicable(&c.system, &c.signal).is_ok())
        .collect();
    let labels: Vec<String> = configs.iter().map(|(l, _)| l.clone()).collect();
    let trajs = sweep(&plain, workers);
    let runs = run_reports(configs, trajs, Checks::Local);
    let mut checks = Vec::new();
    if let Some(expected) = expected {
        for ((label, app), exp) in labels.iter().zip(&applicable).zip(expected) {
            checks.push(CheckResult {
                name: format!("routing/{label}"),
                margin: None,
                time: None,
                status: if app == exp {
                    Status::Pass
                } else {
                    Status::Fail
                },
                gating: true,
            });
        }
    }
    let mut data = Map::new();
    data.insert("applicable".into(), json!(applicable));
    SuiteReport::new("local-eiss", runs, checks, data)
}

fn config(system: SystemParams, signal: InputSignal, n: usize, dt: f64, t_end: f64) -> Config {
    Config {
        system,
        grid: Grid::uniform(n),
        solver: SolverConfig {
            dt_max: dt,
            t_end,
            ..SolverConfig::default()
        },
        signal,
    }
}

fn signal_label(s: &InputSignal) -> &'static str {
    match s {
        InputSignal::Zero => "zero",
        InputSignal::ExpDecay { .. } => "expdecay",
        InputSignal::RectPulse { .. } => "rectpulse",
        InputSignal::PowerTail { .. } => "powertail",
        InputSignal::Sampled { .. } => "sampled",
    }
}

fn sine(amplitude: f64, mode: u32) -> ProfileDescriptor {
    ProfileDescriptor::SineMode { amplitude, mode }
}

/// `K ∈ {0, 0.5, 1, 5}` × three inputs × two initial profiles, `h0 = 0.2`,
/// `h1 = 0`, `g0 = 0`, `n = 200`, `dt = 1e-3`, `T = 20`.
pub fn iss_sweep_matrix() -> Vec<(String, Config)> {
    let signals = [
        InputSignal::Zero,
        InputSignal::ExpDecay {
            a: 0.5,
            lambda: 1.0,
        },
        InputSignal::RectPulse {
            a: 1.0,
            t0: 0.0,
            t1: 2.0,
        },
    ];
    let profiles = [("zero", ProfileDescriptor::Zero), ("sine", sine(0.5, 1))];
    let mut out = Vec::new();
    for k in [0.0, 0.5, 1.0, 5.0] {
        for sig in &signals {
            for (pl, v0) in &profiles {
                let system = SystemParams {
                    spring_gain: k,
                    target: 0.0,
                    initial_position: 0.2,
                    initial_velocity: 0.0,
                    initial_profile: v0.clone(),
                };
                out.push((
                    format!("K={k}/u={}/v0={pl}", signal_label(sig)),
                    config(system, sig.clone(), 200, 1e-3, 20.0),
                ));
            }
        }
    }
    out
}

/// Simulates each configuration and audits functional bounds and
/// confinement.
pub fn bounds_audit_suite(configs: Vec<(String, Config)>, workers: usize) -> SuiteReport {
    evaluate_matrix("bounds-audit", configs, Checks::Bounds, workers)
}

/// Simulates and fully evaluates each configuration.
pub fn iss_suite(configs: Vec<(String, Config)>, workers: usize) -> SuiteReport {
    evaluate_matrix("iss-sweep", configs, Checks::Full, workers)
}

/// Confinement audit over integrable and non-integrable inputs.
pub fn bounds_audit_matrix() -> Vec<(String, Config)> {
    let signals = [
        InputSignal::PowerTail { a: 1.0, p: 0.75 },
        InputSignal::PowerTail { a: 0.5, p: 1.5 },
        InputSignal::Sampled {
            times: vec![0.0, 0.5, 1.5, 3.0],
            values: vec![1.0, -0.5, 0.25],
        },
    ];
    let mut out = Vec::new();
    for k in [2.0, 5.0] {
        for h0 in [-0.5, 0.6] {
            for sig in &signals {
                let system = SystemParams {
                    spring_gain: k,
                    target: 0.0,
                    initial_position: h0,
                    initial_velocity: 0.0,
                    initial_profile: ProfileDescriptor::Bump {
                        amplitude: 0.5,
                        center: -0.2,
                        width: 0.4,
                    },
                };
                out.push((
                    format!("K={k}/h0={h0}/u={}", signal_label(sig)),
                    config(system, sig.clone(), 200, 1e-3, 10.0),
                ));
            }
        }
    }
    out
}

/// Gallery of local exponential ISS cases with their expected applicability.
pub fn local_eiss_gallery() -> Vec<(String, Config, bool)> {
    let sys = |k: f64, h1: f64, h0: f64, g0: f64, v0: ProfileDescriptor| SystemParams {
        spring_gain: k,
        target: h1,
        initial_position: h0,
        initial_velocity: g0,
        initial_profile: v0,
    };
    let c = |s: SystemParams, u: InputSignal| config(s, u, 200, 1e-3, 20.0);
    vec![
        (
            "near-rest".into(),
            c(
                sys(1.0, 0.0, 0.1, 0.0, ProfileDescriptor::Zero),
                InputSignal::Zero,
            ),
            true,
        ),
        (
            "stiff-with-fluid".into(),
            c(sys(5.0, 0.3, 0.4, 0.0, sine(0.05, 1)), InputSignal::Zero),
            true,
        ),
        (
            "forced".into(),
            c(
                sys(2.0, -0.2, -0.35, 0.1, ProfileDescriptor::Zero),
                InputSignal::ExpDecay {
                    a: 0.2,
                    lambda: 1.0,
                },
            ),
            true,
        ),
        (
            "at-target".into(),
            c(
                sys(1.0, 0.0, 0.0, 0.0, ProfileDescriptor::Zero),
                InputSignal::Zero,
            ),
            false,
        ),
        (
            "near-wall".into(),
            c(
                sys(1.0, 0.9, 0.95, 0.0, ProfileDescriptor::Zero),
                InputSignal::Zero,
            ),
            false,
        ),
    ]
}

/// Reference case for the refinement studies: a sine profile whose trace at
/// the particle does not match the particle velocity, under a decaying push.
pub fn golden_config() -> Config {
    config(
        SystemParams {
            spring_gain: 1.0,
            target: 0.0,
            initial_position: 0.2,
            initial_velocity: 0.0,
            initial_profile: sine(0.5, 1),
        },
        InputSignal::ExpDecay {
            a: 0.5,
            lambda: 1.0,
        },
        80,
        4e-3,
        1.0,
    )
}

/// Explicit-solver values of `(h, g, E)` at `t = 1` for [`golden_config`],
/// computed once on 640 cells per side at 90% of the stability limit.
pub const GOLDEN: (f64, f64, f64) = (0.347349360597537, 0.06250837655256128, 0.12893286408797605);

/// Cases compared against the explicit reference solver.
pub fn oracle_compare_matrix() -> Vec<(String, Config)> {
    let golden = golden_config();
    let swing = Config {
        system: SystemParams {
            initial_velocity: 0.1,
            initial_profile: ProfileDescriptor::Zero,
            ..golden.system.clone()
        },
        signal: InputSignal::Zero,
        ..golden.clone()
    };
    let bump = Config {
        system: SystemParams {
            spring_gain: 2.0,
            target: 0.1,
            initial_position: -0.1,
            initial_velocity: 0.2,
            initial_profile: ProfileDescriptor::Bump {
                amplitude: 0.8,
                center: -0.3,
                width: 0.4,
            },
        },
        signal: InputSignal::RectPulse {
            a: 1.0,
            t0: 0.0,
            t1: 0.5,
        },
        ..golden.clone()
    };
    vec![
        ("golden".into(), golden),
        ("spring-swing".into(), swing),
        ("bump-pulse".into(), bump),
    ]
}

fn level_config(base: &Config, level: usize, stride: usize) -> Config {
    let f = 1usize << level;
    Config {
        grid: Grid {
            n_left: base.grid.n_left * f,
            n_right: base.grid.n_right * f,
        },
        solver: SolverConfig {
            dt_max: base.solver.dt_max / f as f64,
            sample_stride: stride,
            ..base.solver.clone()
        },
        ..base.clone()
    }
}

/// `log2` of consecutive ratios.
fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn min_check(name: &str, values: &[f64], threshold: f64) -> CheckResult {
    CheckResult::from_margins(name, true, values.iter().map(|v| (0.0, v - threshold)))
}

fn max_check(name: &str, values: &[f64], threshold: f64) -> CheckResult {
    CheckResult::from_margins(name, true, values.iter().map(|v| (0.0, threshold - v)))
}

/// Refinement study from `base`: `levels` simultaneous halvings of `Δξ` and
/// `dt`, plus a spatial sub-study on compatible data with `dt = Δξ²`.
///
/// The temporal order is measured against [`GOLDEN`] for the golden
/// configuration and from successive differences otherwise.
pub fn converge(base: &Config, levels: usize, workers: usize) -> Result<SuiteReport> {
    if levels < 3 {
        return Err(Error::domain("levels", "need at least 3 levels"));
    }
    let base = base.clone().validate()?;
    let mut configs: Vec<(String, Config)> = (0..levels)
        .map(|i| {
            let c = level_config(&base, i, 1);
            (
                format!("level-{i}/n={}/dt={}", c.grid.n_left, c.solver.dt_max),
                c,
            )
        })
        .collect();

    // spatial sub-study: compatible data, dt = Δξ²
    let compatible = SystemParams {
        initial_velocity: base
            .system
            .initial_profile
            .eval(base.system.initial_position),
        ..base.system.clone()
    };
    let spatial_levels = 4;
    for i in 0..spatial_levels {
        let n = 40usize << i;
        let mut c = config(
            compatible.clone(),
            base.signal.clone(),
            n,
            1.0 / (n * n) as f64,
            base.solver.t_end,
        );
        c.solver.sample_stride = usize::MAX / 2;
        configs.push((format!("spatial-{i}/n={n}"), c));
    }

    let plain: Vec<Config> = configs.iter().map(|(_, c)| c.clone()).collect();
    let trajs = sweep(&plain, workers);
    let mut re = Vec::new();
    let mut re1 = Vec::new();
    let mut rm = Vec::new();
    let mut h_end = Vec::new();
    for t in trajs.iter().take(levels).flatten() {
        re.push(max_abs(&energy_residual(t)));
        re1.push(max_abs(&energy_residual_with_source_factor(t, 1.0)));
        rm.push(max_abs(&logmass_residual(t)));
        h_end.push(t.last().h);
    }
    let h_spatial: Vec<f64> = trajs[levels..]
        .iter()
        .flatten()
        .map(|t| t.last().h)
        .collect();
    let runs = run_reports(configs, trajs, Checks::Full);
    if re.len() < levels || h_spatial.len() < spatial_levels {
        return Ok(SuiteReport::new("converge", runs, Vec::new(), Map::new()));
    }

    let re_ratios: Vec<f64> = re.windows(2).map(|w| w[1] / w[0]).collect();
    let rm_orders = orders(&rm);
    let diffs = |h: &[f64]| -> Vec<f64> { h.windows(2).map(|w| (w[1] - w[0]).abs()).collect() };
    // against the stored reference when there is one, else successive differences
    let reference = (base == golden_config()).then_some(GOLDEN.0);
    let temporal = match reference {
        Some(h) => orders(&h_end.iter().map(|x| (x - h).abs()).collect::<Vec<_>>()),
        None => orders(&diffs(&h_end)),
    };
    let spatial = orders(&diffs(&h_spatial));
    let finest = levels - 1;

    let mut checks = vec![
        max_check("energy_identity_ratio", &re_ratios, 0.6),
        min_check("logmass_order", &rm_orders, 0.9),
        max_check("logmass_finest", &rm[finest..], 1e-3),
        min_check("temporal_order", &temporal, 0.9),
        min_check("spatial_order", &spatial, 1.8),
    ];
    if base.signal.support_end() == Some(0.0) {
        checks.push(CheckResult::not_applicable("factor1_plateau", false));
        checks.push(CheckResult::not_applicable("factor1_separation", false));
    } else {
        checks.push(min_check("factor1_plateau", &[re1[finest] / re1[0]], 0.5));
        checks.push(min_check(
            "factor1_separation",
            &[re1[finest] / re[finest]],
            10.0,
        ));
    }

    let mut data = Map::new();
    data.insert("energy_residual".into(), json!(re));
    data.insert("energy_residual_factor1".into(), json!(re1));
    data.insert("logmass_residual".into(), json!(rm));
    data.insert("h_end".into(), json!(h_end));
    data.insert("h_reference".into(), json!(reference));
    data.insert("temporal_orders".into(), json!(temporal));
    data.insert("h_end_spatial".into(), json!(h_spatial));
    data.insert("spatial_orders".into(), json!(spatial));
    Ok(SuiteReport::new("converge", runs, checks, data))
}

/// Oracle resolution used for a stepper grid: same cells, step at 90% of the
/// explicit limit for particles within `|h| ≤ 0.45`.
fn oracle_dt(n: usize) -> f64 {
    0.9 * max_stable_dt(n, 0.45)
}

/// Linear interpolation of the oracle's `h` at the stepper's sample times.
fn max_gap(traj: &Trajectory, reference: &Trajectory) -> f64 {
    traj.samples
        .iter()
        .map(|s| (s.h - reference.h_at(s.t)).abs())
        .fold(0.0, f64::max)
}

/// Stepper against the explicit solver on the same grid, for three steps
/// sizes, plus a two-resolution agreement check against the finer oracle.
pub fn oracle_compare(configs: &[(String, Config)], workers: usize) -> Result<SuiteReport> {
    let n = 200;
    let dts = [1e-3, 5e-4, 2.5e-4];
    let coarse = (100, 2e-3);

    let mut runs_cfg: Vec<(String, Config)> = Vec::new();
    for (label, base) in configs {
        for &dt in &dts {
            let mut c = base.clone();
            c.grid = Grid::uniform(n);
            c.solver.dt_max = dt;
            c.solver.sample_stride = 1;
            runs_cfg.push((format!("{label}/n={n}/dt={dt}"), c));
        }
        let mut c = base.clone();
        c.grid = Grid::uniform(coarse.0);
        c.solver.dt_max = coarse.1;
        c.solver.sample_stride = 1;
        runs_cfg.push((format!("{label}/n={}/dt={}", coarse.0, coarse.1), c));
    }
    let plain: Vec<Config> = runs_cfg.iter().map(|(_, c)| c.clone()).collect();
    let trajs = sweep(&plain, workers);

    let oracle_run = |c: &Config| {
        let dt = oracle_dt(n);
        oracle_simulate(&c.system, n, dt, c.solver.t_end, &c.signal, 10)
    };
    let oracles: Vec<Result<Trajectory>> = if workers <= 1 {
        configs.iter().map(|(_, c)| oracle_run(c)).collect()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(|| configs.par_iter().map(|(_, c)| oracle_run(c)).collect()),
            Err(_) => configs.iter().map(|(_, c)| oracle_run(c)).collect(),
        }
    };

    let per = dts.len() + 1;
    let mut checks = Vec::new();
    let mut data = Map::new();
    for (k, ((label, base), oracle)) in configs.iter().zip(&oracles).enumerate() {
        let oracle = match oracle {
            Ok(o) if o.termination.is_completed() => o,
            Ok(o) => {
                checks.push(CheckResult {
                    name: format!("{label}/oracle"),
                    margin: None,
                    time: Some(o.last().t),
                    status: Status::Fail,
                    gating: true,
                });
                continue;
            }
            Err(e) => {
                data.insert(format!("{label}/oracle_error"), e.to_string().into());
                checks.push(CheckResult {
                    name: format!("{label}/oracle"),
                    margin: None,
                    time: None,
                    status: Status::Fail,
                    gating: true,
                });
                continue;
            }
        };
        let mine = &trajs[k * per..(k + 1) * per];
        let gaps: Vec<f64> = mine
            .iter()
            .map(|t| t.as_ref().map_or(f64::INFINITY, |t| max_gap(t, oracle)))
            .collect();
        let fine_gaps = &gaps[..dts.len()];
        checks.push(max_check(
            &format!("{label}/oracle_gap"),
            &fine_gaps[..1],
            5e-3,
        ));
        checks.push(min_check(
            &format!("{label}/oracle_order"),
            &orders(fine_gaps),
            0.9,
        ));
        let scale = 1.0 + base.system.initial_energy();
        let bound = |n: usize, dt: f64| 10.0 * (dt + (1.0 / n as f64).powi(2)) * scale;
        checks.push(CheckResult::from_margins(
            &format!("{label}/oracle_agreement"),
            true,
            [
                (0.0, bound(n, dts[0]) - gaps[0]),
                (0.0, bound(coarse.0, coarse.1) - gaps[dts.len()]),
            ],
        ));
        data.insert(format!("{label}/gaps"), json!(gaps));
    }
    let runs = run_reports(runs_cfg, trajs, Checks::Full);
    Ok(SuiteReport::new("oracle-compare", runs, checks, data))
}
