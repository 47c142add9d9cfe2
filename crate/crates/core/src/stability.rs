//! Explicit stability constants and the inequalities they certify.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{SampleRecord, Trajectory};
use crate::error::{Error, Result};
use crate::params::{SolverConfig, SystemParams};
use crate::signal::InputSignal;

/// Tolerance on check margins.
pub const TOLERANCE: f64 = 1e-9;

/// `C = 10 (S + √S)`, `S = ‖v0‖² + g0² + K (h1 - h0)² + ‖u‖²`.
pub fn c_global(params: &SystemParams, u_l2: f64) -> f64 {
    let s = params.initial_energy() + u_l2 * u_l2;
    10.0 * (s + s.sqrt())
}

/// Time-dependent wall distances `(c1, c2)` with `-1 + c1 ≤ h(t) ≤ 1 - c2`.
///
/// `c` is [`c_global`] and `u_l2_t` the input norm over `(0, t)`.
pub fn confinement_envelope(t: f64, params: &SystemParams, c: f64, u_l2_t: f64) -> (f64, f64) {
    let h0 = params.initial_position;
    let growth = (c + 2.0 * params.spring_gain * t + t.sqrt() * u_l2_t).exp();
    let c1 = 2.0 / (1.0 + 2f64.max((1.0 - h0) / (1.0 + h0)) * growth);
    let c2 = 2.0 / (1.0 + 2f64.max((1.0 + h0) / (1.0 - h0)) * growth);
    (c1, c2)
}

/// Uniform-in-time wall distance `α` with `-1 + α ≤ h(t) ≤ 1 - α`.
///
/// Both the initial and the target position enter through the larger of
/// their odds ratios, so the bound holds whichever side of `h1` the particle
/// starts on.
pub fn alpha_bound(params: &SystemParams, u_l2: f64, u_l1: f64) -> Result<f64> {
    if !u_l1.is_finite() {
        return Err(Error::NotApplicable(
            "input is not integrable on (0, ∞)".into(),
        ));
    }
    let h0 = params.initial_position;
    let h1 = params.target;
    let rest = (c_global(params, u_l2) + u_l1).exp();
    let c_up = ((1.0 + h0) / (1.0 - h0)).max((1.0 + h1) / (1.0 - h1)) * rest;
    let c_low = ((1.0 - h0) / (1.0 + h0)).max((1.0 - h1) / (1.0 + h1)) * rest;
    Ok((2.0 / (1.0 + c_up)).min(2.0 / (1.0 + c_low)))
}

fn require_spring(k: f64) -> Result<()> {
    if k > 0.0 {
        Ok(())
    } else {
        Err(Error::NotApplicable(
            "spring gain must be positive (K = 0 decays at rate 1/4)".into(),
        ))
    }
}

/// `ε = 1 / (16 (34 + 2 / (K α²)))`.
pub fn epsilon_choice(k: f64, alpha: f64) -> Result<f64> {
    require_spring(k)?;
    let eps = 1.0 / (16.0 * (34.0 + 2.0 / (k * alpha * alpha)));
    debug_assert!(eps <= (1.0f64 / 8.0).min(k / 8.0));
    Ok(eps)
}

/// `η = ¼ min{1 / (34 + 2 / (K α²)), 3 K ε / 4}`.
pub fn eta_rate(k: f64, alpha: f64) -> Result<f64> {
    let eps = epsilon_choice(k, alpha)?;
    let first = 1.0 / (34.0 + 2.0 / (k * alpha * alpha));
    Ok(0.25 * first.min(0.75 * k * eps))
}

/// Lyapunov weight for a run: the override when given, the certified choice
/// when `K > 0` and the input is integrable, otherwise zero.
pub fn lyapunov_eps(params: &SystemParams, sig: &InputSignal, cfg: &SolverConfig) -> f64 {
    if let Some(eps) = cfg.eps_override {
        return eps;
    }
    alpha_bound(params, sig.l2_norm(None), sig.l1_norm(None))
        .and_then(|a| epsilon_choice(params.spring_gain, a))
        .unwrap_or(0.0)
}

/// Local wall distance used near the target, `½ min(1 - h1, 1 + h1)`.
pub fn alpha_local(h1: f64) -> f64 {
    0.5 * (1.0 - h1).min(1.0 + h1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityConstants {
    pub c_global: f64,
    pub alpha: Option<f64>,
    pub eps: f64,
    pub eta: Option<f64>,
    pub alpha_local: f64,
    /// `min_t min(1 - h, 1 + h)` over the samples.
    pub measured_alpha: f64,
    pub u_l2: f64,
    /// `None` when the input is not integrable.
    pub u_l1: Option<f64>,
}

impl StabilityConstants {
    pub fn for_trajectory(traj: &Trajectory) -> Self {
        let p = &traj.params;
        let sig = &traj.signal;
        let u_l2 = sig.l2_norm(None);
        let u_l1 = sig.l1_norm(None);
        let alpha = alpha_bound(p, u_l2, u_l1).ok();
        let eta = if p.spring_gain > 0.0 {
            alpha.and_then(|a| eta_rate(p.spring_gain, a).ok())
        } else {
            Some(0.25)
        };
        let measured_alpha = traj
            .samples
            .iter()
            .fold(f64::INFINITY, |m, s| m.min((1.0 - s.h).min(1.0 + s.h)));
        StabilityConstants {
            c_global: c_global(p, u_l2),
            alpha,
            eps: traj.eps,
            eta,
            alpha_local: alpha_local(p.target),
            measured_alpha,
            u_l2,
            u_l1: u_l1.is_finite().then_some(u_l1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Na,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Worst margin over the samples; `None` when not applicable.
    pub margin: Option<f64>,
    /// Sample time of the worst margin.
    pub time: Option<f64>,
    pub status: Status,
    pub gating: bool,
}

impl CheckResult {
    pub fn not_applicable(name: &str, gating: bool) -> Self {
        CheckResult {
            name: name.to_string(),
            margin: None,
            time: None,
            status: Status::Na,
            gating,
        }
    }

    /// Folds per-sample margins `(t, margin)` into the worst one.
    pub fn from_margins(
        name: &str,
        gating: bool,
        margins: impl IntoIterator<Item = (f64, f64)>,
    ) -> Self {
        let mut worst: Option<(f64, f64)> = None;
        for (t, m) in margins {
            let m = if m.is_finite() { m } else { f64::MIN };
            if worst.is_none_or(|(_, w)| m < w) {
                worst = Some((t, m));
            }
        }
        match worst {
            None => CheckResult::not_applicable(name, gating),
            Some((t, m)) => CheckResult {
                name: name.to_string(),
                margin: Some(m),
                time: Some(t),
                status: if m >= -TOLERANCE {
                    Status::Pass
                } else {
                    Status::Fail
                },
                gating,
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Relative margin of `lhs ≤ rhs`, in `[-2, 2]`.
pub fn relative_margin(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (rhs - lhs) / scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub window: (f64, f64),
    /// RMS deviation of `ln E` from the fitted line.
    pub residual: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub constants: StabilityConstants,
    pub checks: Vec<CheckResult>,
    pub fit: Option<DecayFit>,
    pub meta: serde_json::Map<String, serde_json::Value>,
}

impl StabilityReport {
    /// True when no gating check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.gating || c.passed())
    }
}

/// Pointwise inequalities between the functionals, at every sample.
pub fn functional_bounds(traj: &Trajectory) -> Vec<CheckResult> {
    let s = &traj.samples;
    let quarter_pi_sq = std::f64::consts::PI.powi(2) / 4.0;
    let rel = |name: &str, f: &dyn Fn(&SampleRecord) -> (f64, f64)| {
        CheckResult::from_margins(
            name,
            true,
            s.iter().map(|r| {
                let (l, rh) = f(r);
                (r.t, relative_margin(l, rh))
            }),
        )
    };
    let mut out = vec![
        rel("a2_bound", &|r| (r.a2.abs(), 4.0 * r.diss)),
        rel("a1_bound", &|r| (r.a1.abs(), 12.0 * r.diss)),
        rel("a1_left_bound", &|r| (r.a1_left.abs(), 6.0 * r.diss_left)),
        rel("a1_right_bound", &|r| {
            (r.a1_right.abs(), 6.0 * r.diss_right)
        }),
        rel("p_bound", &|r| (r.p * r.p, 4.0 * (r.l2_v + r.g * r.g))),
        rel("trace_bound", &|r| (r.g * r.g, 2.0 * r.diss)),
        rel("poincare", &|r| (quarter_pi_sq * r.l2_v, r.diss)),
    ];
    if traj.params.spring_gain > 0.0 {
        out.push(rel("norm_equivalence_lower", &|r| {
            (0.25 * r.energy, r.v_eps)
        }));
        out.push(rel("norm_equivalence_upper", &|r| {
            (r.v_eps, 2.0 * r.energy)
        }));
    } else {
        out.push(CheckResult::not_applicable("norm_equivalence_lower", true));
        out.push(CheckResult::not_applicable("norm_equivalence_upper", true));
    }
    out
}

/// Uniform (`α`) and time-dependent (`c1`, `c2`) confinement of the particle.
pub fn confinement_checks(traj: &Trajectory, constants: &StabilityConstants) -> Vec<CheckResult> {
    let s = &traj.samples;
    let mut out = Vec::new();
    match constants.alpha {
        Some(a) => {
            out.push(CheckResult::from_margins(
                "alpha_lower",
                true,
                s.iter().map(|r| (r.t, r.h - (-1.0 + a))),
            ));
            out.push(CheckResult::from_margins(
                "alpha_upper",
                true,
                s.iter().map(|r| (r.t, (1.0 - a) - r.h)),
            ));
        }
        None => {
            out.push(CheckResult::not_applicable("alpha_lower", true));
            out.push(CheckResult::not_applicable("alpha_upper", true));
        }
    }
    out.push(CheckResult::from_margins(
        "envelope_lower",
        true,
        s.iter().map(|r| (r.t, r.h - (-1.0 + r.c1))),
    ));
    out.push(CheckResult::from_margins(
        "envelope_upper",
        true,
        s.iter().map(|r| (r.t, (1.0 - r.c2) - r.h)),
    ));
    out
}

/// Exponential decay estimates with input gains. Gating entries use gains 4
/// (energy) and 2 (Lyapunov functional) on `‖u‖²_{L²(0,t)}`; the variants with
/// gains 3/2, 1/2 and the unsquared norm are reported without gating.
pub fn iss_check(
    traj: &Trajectory,
    constants: &StabilityConstants,
    sig: &InputSignal,
) -> Vec<CheckResult> {
    let s = &traj.samples;
    let Some(first) = s.first() else {
        return Vec::new();
    };
    let u2 = |t: f64| sig.l2_norm_sq(Some(t));
    let u_inf = sig.l2_norm(None);
    let envelope = |name: &str,
                    gating: bool,
                    rate: f64,
                    factor: f64,
                    value: &dyn Fn(&SampleRecord) -> f64,
                    input: &dyn Fn(f64) -> f64| {
        let v0 = value(first);
        CheckResult::from_margins(
            name,
            gating,
            s.iter().map(|r| {
                let rhs = factor * (-rate * r.t).exp() * v0 + input(r.t);
                (r.t, relative_margin(value(r), rhs))
            }),
        )
    };
    let energy = |r: &SampleRecord| r.energy;
    let fluid = |r: &SampleRecord| r.l2_v + r.g * r.g;
    let lyap = |r: &SampleRecord| r.v_eps;

    if traj.params.spring_gain > 0.0 {
        let Some(eta) = constants.eta else {
            return [
                ("energy_decay", true),
                ("lyapunov_decay", true),
                ("energy_decay_literal", false),
                ("energy_decay_literal_unsquared", false),
                ("lyapunov_decay_literal", false),
            ]
            .iter()
            .map(|(n, g)| CheckResult::not_applicable(n, *g))
            .collect();
        };
        vec![
            envelope("energy_decay", true, eta, 16.0, &energy, &|t| 4.0 * u2(t)),
            envelope("lyapunov_decay", true, eta, 1.0, &lyap, &|t| 2.0 * u2(t)),
            envelope("energy_decay_literal", false, eta, 16.0, &energy, &|t| {
                1.5 * u2(t)
            }),
            envelope(
                "energy_decay_literal_unsquared",
                false,
                eta,
                16.0,
                &energy,
                &|_| 1.5 * u_inf,
            ),
            envelope("lyapunov_decay_literal", false, eta, 1.0, &lyap, &|t| {
                0.5 * u2(t)
            }),
        ]
    } else {
        vec![
            envelope("fluid_decay", true, 0.25, 1.0, &fluid, &|t| 4.0 * u2(t)),
            envelope("fluid_decay_literal", false, 0.25, 1.0, &fluid, &|t| {
                1.5 * u2(t)
            }),
            envelope(
                "fluid_decay_literal_unsquared",
                false,
                0.25,
                16.0,
                &fluid,
                &|_| 16.0 * u_inf,
            ),
        ]
    }
}

/// Whether the local exponential ISS hypotheses hold; `Err` explains why not.
pub fn local_eiss_applicable(params: &SystemParams, sig: &InputSignal) -> Result<()> {
    let d = (params.initial_position - params.target).abs();
    let h1 = params.target;
    let limit = (1.0 - h1).min(1.0 + h1) / (2.0 * 2f64.sqrt());
    if !(d > 0.0 && d < limit) {
        return Err(Error::NotApplicable(format!(
            "|h0 - h1| = {d} not in (0, {limit})"
        )));
    }
    let data = params.initial_profile.l2_norm_sq()
        + params.initial_velocity.powi(2)
        + sig.l2_norm_sq(None);
    let k_min = data / (d * d);
    if !(params.spring_gain > k_min) {
        return Err(Error::NotApplicable(format!(
            "K = {} not above {k_min}",
            params.spring_gain
        )));
    }
    Ok(())
}

/// Local position bound `|h - h1| ≤ √2 |h0 - h1|` and the local decay
/// envelope with the rate built from `α = ½ min(1 - h1, 1 + h1)`.
pub fn local_eiss_check(
    params: &SystemParams,
    sig: &InputSignal,
    traj: &Trajectory,
) -> Vec<CheckResult> {
    if local_eiss_applicable(params, sig).is_err() {
        return vec![
            CheckResult::not_applicable("local_position_bound", true),
            CheckResult::not_applicable("local_energy_decay", true),
        ];
    }
    let s = &traj.samples;
    let bound = 2f64.sqrt() * (params.initial_position - params.target).abs();
    let eta = eta_rate(params.spring_gain, alpha_local(params.target))
        .expect("applicability implies K > 0");
    let e0 = s[0].energy;
    vec![
        CheckResult::from_margins(
            "local_position_bound",
            true,
            s.iter().map(|r| (r.t, bound - (r.h - params.target).abs())),
        ),
        CheckResult::from_margins(
            "local_energy_decay",
            true,
            s.iter().map(|r| {
                let rhs = 16.0 * (-eta * r.t).exp() * e0 + 4.0 * sig.l2_norm_sq(Some(r.t));
                (r.t, relative_margin(r.energy, rhs))
            }),
        ),
    ]
}

/// Least-squares decay rate of `E` over the input-free tail of a trajectory.
pub fn fit_decay_rate(traj: &Trajectory) -> Result<DecayFit> {
    let tail_start = traj
        .signal
        .support_end()
        .ok_or_else(|| Error::InsufficientData("input never vanishes identically".into()))?;
    fit_decay_rate_after(&traj.samples, tail_start)
}

/// Decay fit over samples with `t ≥ t_start` and `E` above the noise floor.
pub fn fit_decay_rate_after(samples: &[SampleRecord], t_start: f64) -> Result<DecayFit> {
    let e0 = samples.first().map_or(0.0, |s| s.energy);
    let floor = 1e-12 * e0;
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.t >= t_start && s.energy > floor && s.energy > 0.0)
        .map(|s| (s.t, s.energy.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} usable samples, need 4",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = sty / stt;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - (my + slope * (p.0 - mt))).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        rate: -slope,
        window: (pts[0].0, pts[pts.len() - 1].0),
        residual,
        samples: pts.len(),
    })
}

/// All trajectory checks: run status, functional bounds, confinement and decay.
pub fn evaluate(traj: &Trajectory) -> StabilityReport {
    build_report(traj, true)
}

/// Like [`evaluate`] without the decay checks: completion, functional bounds
/// and confinement only.
pub fn bounds_audit(traj: &Trajectory) -> StabilityReport {
    build_report(traj, false)
}

fn build_report(traj: &Trajectory, with_decay: bool) -> StabilityReport {
    let constants = StabilityConstants::for_trajectory(traj);
    let mut checks = vec![CheckResult {
        name: "completed".into(),
        margin: None,
        time: Some(traj.last().t),
        status: if traj.termination.is_completed() {
            Status::Pass
        } else {
            Status::Fail
        },
        gating: true,
    }];
    checks.extend(functional_bounds(traj));
    checks.extend(confinement_checks(traj, &constants));
    if with_decay {
        checks.extend(iss_check(traj, &constants, &traj.signal));
    }

    let mut meta = serde_json::Map::new();
    meta.insert(
        "termination".into(),
        serde_json::to_value(&traj.termination).expect("termination serializes"),
    );
    let fit = match fit_decay_rate(traj) {
        Ok(f) => {
            if let Some(eta) = constants.eta {
                meta.insert("rate_sharpness".into(), (f.rate / eta).into());
            }
            Some(f)
        }
        Err(e) => {
            meta.insert("fit_error".into(), e.to_string().into());
            None
        }
    };
    StabilityReport {
        constants,
        checks,
        fit,
        meta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::Termination;
    use crate::params::{Grid, ProfileDescriptor};

    fn zero_params(k: f64, h0: f64, h1: f64) -> SystemParams {
        SystemParams {
            spring_gain: k,
            target: h1,
            initial_position: h0,
            initial_velocity: 0.0,
            initial_profile: ProfileDescriptor::Zero,
        }
    }

    #[test]
    fn c_global_examples() {
        assert_eq!(c_global(&zero_params(1.0, 0.0, 0.0), 0.0), 0.0);
        let p = SystemParams {
            initial_velocity: 1.0,
            ..zero_params(0.0, 0.0, 0.0)
        };
        assert_eq!(c_global(&p, 0.0), 20.0);
        assert!((c_global(&p, 3f64.sqrt()) - 60.0).abs() < 1e-12);
    }

    #[test]
    fn envelope_examples() {
        let p = zero_params(0.0, 0.0, 0.0);
        for t in [0.0, 1.0, 50.0] {
            let (c1, c2) = confinement_envelope(t, &p, 0.0, 0.0);
            assert!((c1 - 2.0 / 3.0).abs() < 1e-15);
            assert!((c2 - 2.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn alpha_examples() {
        let a = alpha_bound(&zero_params(1.0, 0.0, 0.0), 0.0, 0.0).unwrap();
        assert_eq!(a, 1.0);
        let a = alpha_bound(&zero_params(0.0, 0.0, 0.5), 0.0, 0.0).unwrap();
        assert!((a - 0.5).abs() < 1e-15);
        let pt = InputSignal::PowerTail { a: 1.0, p: 0.75 };
        assert!(matches!(
            alpha_bound(
                &zero_params(1.0, 0.0, 0.0),
                pt.l2_norm(None),
                pt.l1_norm(None)
            ),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn alpha_covers_start_beyond_target() {
        // at rest away from the target with K = 0 the particle never moves
        let a = alpha_bound(&zero_params(0.0, 0.2, 0.0), 0.0, 0.0).unwrap();
        assert!(0.2 <= 1.0 - a + 1e-15);
        let a = alpha_bound(&zero_params(0.0, -0.6, 0.1), 0.0, 0.0).unwrap();
        assert!(-1.0 + a <= -0.6 + 1e-15);
    }

    #[test]
    fn epsilon_and_eta_examples() {
        assert!((epsilon_choice(1.0, 1.0).unwrap() - 1.0 / 576.0).abs() < 1e-18);
        assert!((eta_rate(1.0, 1.0).unwrap() - 1.0 / 3072.0).abs() < 1e-18);
        let e = epsilon_choice(8.0, 1.0).unwrap();
        assert!((e - 1.0 / 548.0).abs() < 1e-18);
        assert!(e <= 0.125);
        assert!(epsilon_choice(0.0, 1.0).is_err());
        assert!(eta_rate(-1.0, 0.5).is_err());
    }

    #[test]
    fn local_eiss_routing() {
        let sig = InputSignal::Zero;
        assert!(local_eiss_applicable(&zero_params(1.0, 0.0, 0.0), &sig).is_err());
        assert!(local_eiss_applicable(&zero_params(1.0, 0.1, 0.0), &sig).is_ok());
        assert!(local_eiss_applicable(&zero_params(1.0, 0.95, 0.9), &sig).is_err());
        let p = SystemParams {
            initial_velocity: 0.5,
            ..zero_params(1.0, 0.1, 0.0)
        };
        // K must exceed 0.25 / 0.01 = 25
        assert!(local_eiss_applicable(&p, &sig).is_err());
    }

    fn synthetic(energies: impl Fn(f64) -> f64, sig: InputSignal) -> Trajectory {
        let samples = (0..=40)
            .map(|i| {
                let t = 0.1 * i as f64;
                SampleRecord {
                    t,
                    energy: energies(t),
                    ..SampleRecord::default()
                }
            })
            .collect();
        Trajectory {
            params: zero_params(1.0, 0.0, 0.0),
            grid: Grid::uniform(4),
            solver: SolverConfig::default(),
            signal: sig,
            eps: 0.0,
            samples,
            termination: Termination::Completed,
        }
    }

    #[test]
    fn fit_recovers_synthetic_rate() {
        let fit = fit_decay_rate(&synthetic(|t| (-2.0 * t).exp(), InputSignal::Zero)).unwrap();
        assert!((fit.rate - 2.0).abs() < 1e-6);
        assert!(fit.residual < 1e-10);
        assert_eq!(fit.samples, 41);
    }

    #[test]
    fn fit_uses_only_input_free_tail() {
        let sig = InputSignal::RectPulse {
            a: 1.0,
            t0: 0.0,
            t1: 2.0,
        };
        let traj = synthetic(|t| if t < 2.0 { 1.0 } else { (-(t - 2.0)).exp() }, sig);
        let fit = fit_decay_rate(&traj).unwrap();
        assert!((fit.rate - 1.0).abs() < 1e-9);
        assert!(fit.window.0 >= 2.0 - 1e-12);
    }

    #[test]
    fn fit_rejects_degenerate_data() {
        let eq = synthetic(|_| 0.0, InputSignal::Zero);
        assert!(matches!(
            fit_decay_rate(&eq),
            Err(Error::InsufficientData(_))
        ));
        let exp = synthetic(
            |t| (-t).exp(),
            InputSignal::ExpDecay {
                a: 1.0,
                lambda: 1.0,
            },
        );
        assert!(fit_decay_rate(&exp).is_err());
    }

    #[test]
    fn margins_and_status() {
        assert_eq!(relative_margin(0.0, 0.0), 0.0);
        assert_eq!(relative_margin(1.0, 2.0), 0.5);
        assert_eq!(relative_margin(2.0, 1.0), -0.5);
        let c = CheckResult::from_margins("x", true, [(0.0, 0.1), (1.0, -1e-12), (2.0, 0.3)]);
        assert_eq!(c.status, Status::Pass);
        assert_eq!(c.time, Some(1.0));
        let c = CheckResult::from_margins("x", true, [(0.0, 0.1), (1.0, f64::NAN)]);
        assert_eq!(c.status, Status::Fail);
    }
}
