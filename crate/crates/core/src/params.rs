//! Physical parameters, initial data descriptors, discretization grid and the
//! solver state shared by every other module.
//!
//! The fluid occupies `(-1, h) ∪ (h, 1)`. Each side is mapped onto a fixed
//! reference interval (`ξ ∈ [-1, 0]` on the left, `ξ ∈ [0, 1]` on the right)
//! and discretized with uniform nodes. Node `nL` of the left grid and node `0`
//! of the right grid both sit on the particle and carry its velocity `g`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed-form or sampled initial fluid velocity on `(-1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileDescriptor {
    Zero,
    /// `amplitude * sin(mode * π (y + 1) / 2)`.
    #[serde(rename = "sine")]
    SineMode {
        amplitude: f64,
        mode: u32,
    },
    /// `amplitude * cos²(π (y - center) / (2 width))` on `|y - center| < width`.
    Bump {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Piecewise-linear interpolation of `(y, v)` pairs, zero outside `[y[0], y[last]]`.
    Samples {
        y: Vec<f64>,
        v: Vec<f64>,
    },
}

impl ProfileDescriptor {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProfileDescriptor::Zero => Ok(()),
            ProfileDescriptor::SineMode { amplitude, mode } => {
                if !amplitude.is_finite() {
                    return Err(Error::domain("initial_profile.amplitude", "must be finite"));
                }
                if *mode == 0 {
                    return Err(Error::domain(
                        "initial_profile.mode",
                        "must be a positive integer",
                    ));
                }
                Ok(())
            }
            ProfileDescriptor::Bump {
                amplitude,
                center,
                width,
            } => {
                if !amplitude.is_finite() || !center.is_finite() {
                    return Err(Error::domain(
                        "initial_profile",
                        "bump parameters must be finite",
                    ));
                }
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::domain("initial_profile.width", "must be > 0"));
                }
                Ok(())
            }
            ProfileDescriptor::Samples { y, v } => {
                if y.len() != v.len() || y.len() < 2 {
                    return Err(Error::domain(
                        "initial_profile.samples",
                        "y and v must have equal length >= 2",
                    ));
                }
                if y.iter().chain(v.iter()).any(|x| !x.is_finite()) {
                    return Err(Error::domain(
                        "initial_profile.samples",
                        "values must be finite",
                    ));
                }
                if y.windows(2).any(|p| p[1] <= p[0]) {
                    return Err(Error::domain(
                        "initial_profile.samples",
                        "y must be strictly increasing",
                    ));
                }
                if y[0] < -1.0 || y[y.len() - 1] > 1.0 {
                    return Err(Error::domain(
                        "initial_profile.samples",
                        "y must lie in [-1, 1]",
                    ));
                }
                Ok(())
            }
        }
    }

    /// Evaluates the profile; returns 0 at and beyond the walls `y = ±1`.
    pub fn eval(&self, y: f64) -> f64 {
        if y <= -1.0 || y >= 1.0 {
            return 0.0;
        }
        match self {
            ProfileDescriptor::Zero => 0.0,
            ProfileDescriptor::SineMode { amplitude, mode } => {
                amplitude * (*mode as f64 * PI * (y + 1.0) / 2.0).sin()
            }
            ProfileDescriptor::Bump {
                amplitude,
                center,
                width,
            } => {
                let s = (y - center) / width;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    let c = (PI * s / 2.0).cos();
                    amplitude * c * c
                }
            }
            ProfileDescriptor::Samples { y: ys, v: vs } => {
                let n = ys.len();
                if y < ys[0] || y > ys[n - 1] {
                    return 0.0;
                }
                // first index with ys[k] >= y
                let k = ys.partition_point(|&x| x < y);
                if k == 0 {
                    return vs[0];
                }
                let (y0, y1) = (ys[k - 1], ys[k]);
                let (v0, v1) = (vs[k - 1], vs[k]);
                v0 + (v1 - v0) * (y - y0) / (y1 - y0)
            }
        }
    }

    /// `∫₋₁¹ v0² dy` of the continuum profile.
    pub fn l2_norm_sq(&self) -> f64 {
        match self {
            ProfileDescriptor::Zero => 0.0,
            ProfileDescriptor::SineMode { amplitude, .. } => amplitude * amplitude,
            ProfileDescriptor::Bump {
                amplitude,
                center,
                width,
            } => {
                if center - width >= -1.0 && center + width <= 1.0 {
                    0.75 * amplitude * amplitude * width
                } else {
                    simpson(|y| self.eval(y).powi(2), -1.0, 1.0, 20_000)
                }
            }
            ProfileDescriptor::Samples { y, v } => y
                .windows(2)
                .zip(v.windows(2))
                .map(|(ys, vs)| {
                    (ys[1] - ys[0]) / 3.0 * (vs[0] * vs[0] + vs[0] * vs[1] + vs[1] * vs[1])
                })
                .sum(),
        }
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Physical constants and initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Feedback gain `K ≥ 0` of the spring force `K (h1 - h)`.
    #[serde(rename = "K")]
    pub spring_gain: f64,
    /// Target position `h1 ∈ (-1, 1)`.
    #[serde(rename = "h1")]
    pub target: f64,
    #[serde(rename = "h0")]
    pub initial_position: f64,
    #[serde(rename = "g0")]
    pub initial_velocity: f64,
    #[serde(rename = "v0")]
    pub initial_profile: ProfileDescriptor,
}

impl SystemParams {
    /// Returns the parameters unchanged if every invariant holds.
    pub fn validate(self) -> Result<Self> {
        if !(self.spring_gain >= 0.0 && self.spring_gain.is_finite()) {
            return Err(Error::domain("spring_gain", "spring_gain must be ≥ 0"));
        }
        if !(self.target.abs() < 1.0) {
            return Err(Error::domain("target", "target must lie in (−1,1)"));
        }
        if !(self.initial_position.abs() < 1.0) {
            return Err(Error::domain(
                "initial_position",
                "initial_position must lie in (−1,1)",
            ));
        }
        if !self.initial_velocity.is_finite() {
            return Err(Error::domain(
                "initial_velocity",
                "initial_velocity must be finite",
            ));
        }
        self.initial_profile.validate()?;
        Ok(self)
    }

    /// `‖v0‖² + g0² + K (h1 - h0)²`, the initial energy of the continuum data.
    pub fn initial_energy(&self) -> f64 {
        let d = self.target - self.initial_position;
        self.initial_profile.l2_norm_sq()
            + self.initial_velocity * self.initial_velocity
            + self.spring_gain * d * d
    }
}

/// Uniform node layout on the two reference intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(rename = "nL")]
    pub n_left: usize,
    #[serde(rename = "nR")]
    pub n_right: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid::uniform(200)
    }
}

impl Grid {
    pub const MIN_CELLS: usize = 4;

    pub fn new(n_left: usize, n_right: usize) -> Result<Self> {
        Grid { n_left, n_right }.validate()
    }

    pub fn uniform(n: usize) -> Self {
        Grid {
            n_left: n,
            n_right: n,
        }
    }

    pub fn validate(self) -> Result<Self> {
        if self.n_left < Self::MIN_CELLS {
            return Err(Error::domain("nL", "need at least 4 cells"));
        }
        if self.n_right < Self::MIN_CELLS {
            return Err(Error::domain("nR", "need at least 4 cells"));
        }
        Ok(self)
    }

    pub fn dxi_left(&self) -> f64 {
        1.0 / self.n_left as f64
    }

    pub fn dxi_right(&self) -> f64 {
        1.0 / self.n_right as f64
    }

    /// Reference coordinate of left node `i` (`-1` at the wall, `0` at the particle).
    pub fn xi_left(&self, i: usize) -> f64 {
        i as f64 / self.n_left as f64 - 1.0
    }

    /// Reference coordinate of right node `j` (`0` at the particle, `1` at the wall).
    pub fn xi_right(&self, j: usize) -> f64 {
        j as f64 / self.n_right as f64
    }
}

/// Discrete state of the coupled system at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub h: f64,
    pub g: f64,
    /// Left nodal values, `n_left + 1` entries; `w_left[0] = 0`, `w_left[n_left] = g`.
    pub w_left: Vec<f64>,
    /// Right nodal values, `n_right + 1` entries; `w_right[0] = g`, `w_right[n_right] = 0`.
    pub w_right: Vec<f64>,
}

impl State {
    /// Particle at rest at `h` in a fluid at rest.
    pub fn rest(grid: &Grid, h: f64) -> Self {
        State {
            t: 0.0,
            h,
            g: 0.0,
            w_left: vec![0.0; grid.n_left + 1],
            w_right: vec![0.0; grid.n_right + 1],
        }
    }

    pub fn grid(&self) -> Grid {
        Grid {
            n_left: self.w_left.len() - 1,
            n_right: self.w_right.len() - 1,
        }
    }

    /// Checks the Dirichlet, kinematic, confinement and finiteness invariants.
    pub fn check(&self) -> Result<()> {
        let nl = self.w_left.len() - 1;
        let nr = self.w_right.len() - 1;
        if self.w_left[0] != 0.0 || self.w_right[nr] != 0.0 {
            return Err(self.invalid("wall values must be zero"));
        }
        if self.w_left[nl] != self.g || self.w_right[0] != self.g {
            return Err(self.invalid("interface nodes must carry the particle velocity"));
        }
        if !(self.h.abs() < 1.0) {
            return Err(self.invalid("particle left (-1, 1)"));
        }
        let finite = self.t.is_finite()
            && self.g.is_finite()
            && self
                .w_left
                .iter()
                .chain(self.w_right.iter())
                .all(|x| x.is_finite());
        if !finite {
            return Err(self.invalid("non-finite value"));
        }
        Ok(())
    }

    fn invalid(&self, reason: &str) -> Error {
        Error::Numerical {
            t: self.t,
            h: self.h,
            reason: reason.to_string(),
        }
    }

    /// Writes `g` into both interface nodes and zeros into both wall nodes.
    pub fn enforce_constraints(&mut self) {
        let nl = self.w_left.len() - 1;
        let nr = self.w_right.len() - 1;
        self.w_left[0] = 0.0;
        self.w_right[nr] = 0.0;
        self.w_left[nl] = self.g;
        self.w_right[0] = self.g;
    }

    /// Distance from the particle to the nearest wall.
    pub fn wall_distance(&self) -> f64 {
        (1.0 - self.h).min(1.0 + self.h)
    }
}

/// Builds the discrete initial state: profile samples at interior nodes, `g0`
/// on the interface nodes (overriding `v0(h0)`), zeros at the walls.
pub fn initial_state(params: &SystemParams, grid: &Grid) -> State {
    let h0 = params.initial_position;
    let g0 = params.initial_velocity;
    let v0 = &params.initial_profile;
    let w_left = (0..=grid.n_left)
        .map(|i| v0.eval(h0 + grid.xi_left(i) * (1.0 + h0)))
        .collect();
    let w_right = (0..=grid.n_right)
        .map(|j| v0.eval(h0 + grid.xi_right(j) * (1.0 - h0)))
        .collect();
    let mut state = State {
        t: 0.0,
        h: h0,
        g: g0,
        w_left,
        w_right,
    };
    state.enforce_constraints();
    state
}

/// Time stepping and sampling controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub dt_max: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub sample_stride: usize,
    /// Abort threshold on `min(1 - h, 1 + h)`.
    pub boundary_guard: f64,
    /// Lyapunov weight; `None` selects the certified default.
    pub eps_override: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt_max: 1e-3,
            cfl: 0.4,
            t_end: 20.0,
            sample_stride: 10,
            boundary_guard: 1e-3,
            eps_override: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(self) -> Result<Self> {
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return Err(Error::domain("dt_max", "must be > 0"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::domain("cfl", "must lie in (0, 1]"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::domain("t_end", "must be > 0"));
        }
        if self.sample_stride == 0 {
            return Err(Error::domain("sample_stride", "must be a positive integer"));
        }
        if !(self.boundary_guard > 0.0 && self.boundary_guard < 1.0) {
            return Err(Error::domain("boundary_guard", "must lie in (0, 1)"));
        }
        if let Some(eps) = self.eps_override {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(Error::domain("eps_override", "must be ≥ 0"));
            }
        }
        Ok(self)
    }
}
