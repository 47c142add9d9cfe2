//! Open-loop input signals `u(t)` with closed-form `L¹` and `L²` norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum InputSignal {
    #[default]
    Zero,
    /// `a e^{-λ t}`
    #[serde(rename = "expdecay")]
    ExpDecay { a: f64, lambda: f64 },
    /// `a` on `[t0, t1)`, zero elsewhere.
    #[serde(rename = "rectpulse")]
    RectPulse { a: f64, t0: f64, t1: f64 },
    /// `a / (1 + t)^p`, `p > 1/2`.
    #[serde(rename = "powertail")]
    PowerTail { a: f64, p: f64 },
    /// Zero-order hold: `values[i]` on `[times[i], times[i+1])`, zero outside
    /// `[times[0], times[last])`. `times` has one more entry than `values`.
    #[serde(rename = "sampled")]
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl InputSignal {
    pub fn validate(&self) -> Result<()> {
        match self {
            InputSignal::Zero => Ok(()),
            InputSignal::ExpDecay { a, lambda } => {
                finite("signal.a", *a)?;
                if !(*lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::domain("signal.lambda", "must be > 0"));
                }
                Ok(())
            }
            InputSignal::RectPulse { a, t0, t1 } => {
                finite("signal.a", *a)?;
                finite("signal.t1", *t1)?;
                if !(*t0 >= 0.0 && t0 < t1) {
                    return Err(Error::domain("signal.t0", "need 0 <= t0 < t1"));
                }
                Ok(())
            }
            InputSignal::PowerTail { a, p } => {
                finite("signal.a", *a)?;
                if !(*p > 0.5 && p.is_finite()) {
                    return Err(Error::domain("signal.p", "must be > 1/2"));
                }
                Ok(())
            }
            InputSignal::Sampled { times, values } => {
                if times.len() != values.len() + 1 || values.is_empty() {
                    return Err(Error::domain(
                        "signal.times",
                        "need len(times) = len(values) + 1 >= 2",
                    ));
                }
                if times.iter().chain(values).any(|x| !x.is_finite()) {
                    return Err(Error::domain("signal", "values must be finite"));
                }
                if times[0] < 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::domain(
                        "signal.times",
                        "must be nonnegative and strictly increasing",
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain("t", "signal evaluated at negative time"));
        }
        Ok(self.value(t))
    }

    /// Pointwise value for `t ≥ 0` (no domain check).
    pub(crate) fn value(&self, t: f64) -> f64 {
        match self {
            InputSignal::Zero => 0.0,
            InputSignal::ExpDecay { a, lambda } => a * (-lambda * t).exp(),
            InputSignal::RectPulse { a, t0, t1 } => {
                if t >= *t0 && t < *t1 {
                    *a
                } else {
                    0.0
                }
            }
            InputSignal::PowerTail { a, p } => a / (1.0 + t).powf(*p),
            InputSignal::Sampled { times, values } => {
                if t < times[0] || t >= times[times.len() - 1] {
                    return 0.0;
                }
                let k = times.partition_point(|&s| s <= t);
                values[k - 1]
            }
        }
    }

    /// Times where `u` may jump, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            InputSignal::RectPulse { t0, t1, .. } => vec![*t0, *t1],
            InputSignal::Sampled { times, .. } => times.clone(),
            _ => Vec::new(),
        }
    }

    /// Whether `‖u‖_{L¹(0,∞)}` is finite.
    pub fn is_l1(&self) -> bool {
        match self {
            InputSignal::PowerTail { p, .. } => *p > 1.0,
            _ => true,
        }
    }

    /// Time after which `u ≡ 0`, if any.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            InputSignal::Zero => Some(0.0),
            InputSignal::RectPulse { a, t1, .. } => Some(if *a == 0.0 { 0.0 } else { *t1 }),
            InputSignal::Sampled { times, .. } => Some(times[times.len() - 1]),
            InputSignal::ExpDecay { a, .. } | InputSignal::PowerTail { a, .. } => {
                if *a == 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
        }
    }

    /// `‖u‖_{L²(0,T)}`, or over `(0, ∞)` when `horizon` is `None`.
    pub fn l2_norm(&self, horizon: Option<f64>) -> f64 {
        self.l2_norm_sq(horizon).sqrt()
    }

    pub fn l2_norm_sq(&self, horizon: Option<f64>) -> f64 {
        let t_end = horizon.unwrap_or(f64::INFINITY).max(0.0);
        match self {
            InputSignal::Zero => 0.0,
            InputSignal::ExpDecay { a, lambda } => {
                // a²(1 - e^{-2λT}) / (2λ)
                a * a * (-(-2.0 * lambda * t_end).exp_m1()) / (2.0 * lambda)
            }
            InputSignal::RectPulse { a, t0, t1 } => a * a * overlap(*t0, *t1, t_end),
            InputSignal::PowerTail { a, p } => {
                // ∫₀ᵀ (1+t)^{-2p} dt = (1 - (1+T)^{1-2p}) / (2p - 1)
                let q = 2.0 * p - 1.0;
                let tail = if t_end.is_infinite() {
                    0.0
                } else {
                    (1.0 + t_end).powf(-q)
                };
                a * a * (1.0 - tail) / q
            }
            InputSignal::Sampled { times, values } => times
                .windows(2)
                .zip(values)
                .map(|(w, v)| v * v * overlap(w[0], w[1], t_end))
                .sum(),
        }
    }

    /// `‖u‖_{L¹(0,T)}`; `+∞` when the integral diverges.
    pub fn l1_norm(&self, horizon: Option<f64>) -> f64 {
        let t_end = horizon.unwrap_or(f64::INFINITY).max(0.0);
        match self {
            InputSignal::Zero => 0.0,
            InputSignal::ExpDecay { a, lambda } => a.abs() * (-(-lambda * t_end).exp_m1()) / lambda,
            InputSignal::RectPulse { a, t0, t1 } => a.abs() * overlap(*t0, *t1, t_end),
            InputSignal::PowerTail { a, p } => {
                if *a == 0.0 {
                    return 0.0;
                }
                let s = 1.0 + t_end;
                let q = p - 1.0;
                let integral = if q == 0.0 {
                    s.ln()
                } else if t_end.is_infinite() {
                    if q > 0.0 {
                        1.0 / q
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (1.0 - s.powf(-q)) / q
                };
                a.abs() * integral
            }
            InputSignal::Sampled { times, values } => times
                .windows(2)
                .zip(values)
                .map(|(w, v)| v.abs() * overlap(w[0], w[1], t_end))
                .sum(),
        }
    }

    /// `∫₀ᵀ u dt` in closed form.
    pub fn integral(&self, t_end: f64) -> f64 {
        match self {
            InputSignal::Zero => 0.0,
            InputSignal::ExpDecay { a, lambda } => a * (-(-lambda * t_end).exp_m1()) / lambda,
            InputSignal::RectPulse { a, t0, t1 } => a * overlap(*t0, *t1, t_end),
            InputSignal::PowerTail { a, p } => {
                let s = 1.0 + t_end;
                let q = p - 1.0;
                if q == 0.0 {
                    a * s.ln()
                } else {
                    a * (1.0 - s.powf(-q)) / q
                }
            }
            InputSignal::Sampled { times, values } => times
                .windows(2)
                .zip(values)
                .map(|(w, v)| v * overlap(w[0], w[1], t_end))
                .sum(),
        }
    }
}

/// Length of `[a, b) ∩ [0, t_end]`.
fn overlap(a: f64, b: f64, t_end: f64) -> f64 {
    (b.min(t_end) - a.max(0.0)).max(0.0)
}

fn finite(field: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(field, "must be finite"))
    }
}
