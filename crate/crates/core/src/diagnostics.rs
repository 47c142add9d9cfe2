//! Analytic functionals of a state and the identities they satisfy along a
//! trajectory.
//!
//! All functionals are evaluated in reference coordinates. With the
//! piecewise-linear weight `φ` equal to `1 + ξ` on the left and `1 - ξ` on the
//! right:
//!
//! ```text
//! P  = J_L ∫ (1+ξ) w_L dξ + J_R ∫ (1-ξ) w_R dξ + g
//! A1 = -g ∫ (1+ξ) w_L dξ + g ∫ (1-ξ) w_R dξ
//! A2 = ∫ (1+ξ) w_L ∂ξ w_L dξ + ∫ (1-ξ) w_R ∂ξ w_R dξ
//! ```

use serde::{Deserialize, Serialize};

use crate::params::{Grid, SolverConfig, State, SystemParams};
use crate::signal::InputSignal;
use crate::stability;
use crate::transform::{physical_integrals, PhysicalIntegrals};

/// Diagnostics of one sampled state plus running time integrals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SampleRecord {
    pub t: f64,
    pub h: f64,
    pub g: f64,
    pub energy: f64,
    pub p: f64,
    pub a1: f64,
    pub a2: f64,
    pub v_eps: f64,
    pub diss: f64,
    pub cum_diss: f64,
    pub cum_gu: f64,
    pub cum_u: f64,
    pub cum_spring: f64,
    pub c1: f64,
    pub c2: f64,
    // Fields below are not part of the CSV schema.
    pub u: f64,
    pub l2_v: f64,
    pub diss_left: f64,
    pub diss_right: f64,
    pub a1_left: f64,
    pub a1_right: f64,
    pub cum_a1: f64,
    pub cum_a2: f64,
}

impl SampleRecord {
    /// Column names of the CSV trajectory schema, in order.
    pub const CSV_COLUMNS: [&'static str; 15] = [
        "t",
        "h",
        "g",
        "E",
        "P",
        "A1",
        "A2",
        "V_eps",
        "diss",
        "cum_diss",
        "cum_gu",
        "cum_u",
        "cum_spring",
        "c1",
        "c2",
    ];

    pub fn csv_values(&self) -> [f64; 15] {
        [
            self.t,
            self.h,
            self.g,
            self.energy,
            self.p,
            self.a1,
            self.a2,
            self.v_eps,
            self.diss,
            self.cum_diss,
            self.cum_gu,
            self.cum_u,
            self.cum_spring,
            self.c1,
            self.c2,
        ]
    }

    pub fn from_csv_values(v: [f64; 15]) -> Self {
        SampleRecord {
            t: v[0],
            h: v[1],
            g: v[2],
            energy: v[3],
            p: v[4],
            a1: v[5],
            a2: v[6],
            v_eps: v[7],
            diss: v[8],
            cum_diss: v[9],
            cum_gu: v[10],
            cum_u: v[11],
            cum_spring: v[12],
            c1: v[13],
            c2: v[14],
            ..SampleRecord::default()
        }
    }
}

/// Why a simulation stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    WallProximity { t: f64, h: f64 },
    NumericalError { t: f64, h: f64, message: String },
}

impl Termination {
    pub fn is_completed(&self) -> bool {
        matches!(self, Termination::Completed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: SystemParams,
    pub grid: Grid,
    pub solver: SolverConfig,
    pub signal: InputSignal,
    /// Lyapunov weight used for `v_eps`.
    pub eps: f64,
    pub samples: Vec<SampleRecord>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> &SampleRecord {
        self.samples
            .last()
            .expect("trajectory has at least the initial sample")
    }

    /// Particle position at time `t`, linearly interpolated between samples.
    pub fn h_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        let k = s.partition_point(|r| r.t < t);
        if k == 0 {
            return s[0].h;
        }
        if k == s.len() {
            return s[s.len() - 1].h;
        }
        let (a, b) = (&s[k - 1], &s[k]);
        if b.t == a.t {
            return b.h;
        }
        a.h + (b.h - a.h) * (t - a.t) / (b.t - a.t)
    }
}

/// `E = ∫v² + g² + K (h - h1)²`.
pub fn energy(state: &State, params: &SystemParams) -> f64 {
    energy_from(physical_integrals(state).l2_v, state, params)
}

fn energy_from(l2_v: f64, state: &State, params: &SystemParams) -> f64 {
    let d = state.h - params.target;
    l2_v + state.g * state.g + params.spring_gain * d * d
}

/// Trapezoid sums `(∫(1+ξ) w_L dξ, ∫(1-ξ) w_R dξ)`.
fn weighted_means(state: &State) -> (f64, f64) {
    let grid = state.grid();
    let left = trapezoid(grid.n_left, grid.dxi_left(), |i| {
        (1.0 + grid.xi_left(i)) * state.w_left[i]
    });
    let right = trapezoid(grid.n_right, grid.dxi_right(), |j| {
        (1.0 - grid.xi_right(j)) * state.w_right[j]
    });
    (left, right)
}

fn trapezoid(n: usize, dxi: f64, f: impl Fn(usize) -> f64) -> f64 {
    let inner: f64 = (1..n).map(&f).sum();
    dxi * (inner + 0.5 * (f(0) + f(n)))
}

/// `P = ∫ φ v dy + g`.
pub fn p_functional(state: &State) -> f64 {
    let (ml, mr) = weighted_means(state);
    (1.0 + state.h) * ml + (1.0 - state.h) * mr + state.g
}

/// Left and right pieces of `A1 = ∫ v ∂φ/∂t dy`.
pub fn a1_parts(state: &State) -> (f64, f64) {
    let (ml, mr) = weighted_means(state);
    (-state.g * ml, state.g * mr)
}

pub fn a1_functional(state: &State) -> f64 {
    let (l, r) = a1_parts(state);
    l + r
}

/// `A2 = ∫ v v_y φ dy`, centered gradients inside, 3-point one-sided at the ends.
pub fn a2_functional(state: &State) -> f64 {
    let grid = state.grid();
    let left = trapezoid(grid.n_left, grid.dxi_left(), |i| {
        (1.0 + grid.xi_left(i)) * state.w_left[i] * gradient(&state.w_left, i, grid.dxi_left())
    });
    let right = trapezoid(grid.n_right, grid.dxi_right(), |j| {
        (1.0 - grid.xi_right(j)) * state.w_right[j] * gradient(&state.w_right, j, grid.dxi_right())
    });
    left + right
}

fn gradient(w: &[f64], i: usize, dxi: f64) -> f64 {
    let n = w.len() - 1;
    if i == 0 {
        (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * dxi)
    } else if i == n {
        (3.0 * w[n] - 4.0 * w[n - 1] + w[n - 2]) / (2.0 * dxi)
    } else {
        (w[i + 1] - w[i - 1]) / (2.0 * dxi)
    }
}

/// `V_ε = E - ε (h1 - h) P`.
pub fn lyapunov(state: &State, params: &SystemParams, eps: f64) -> f64 {
    lyapunov_from(
        energy(state, params),
        p_functional(state),
        state.h,
        params,
        eps,
    )
}

pub(crate) fn lyapunov_from(e: f64, p: f64, h: f64, params: &SystemParams, eps: f64) -> f64 {
    e - eps * (params.target - h) * p
}

/// Integrands evaluated on one state.
#[derive(Debug, Clone, Copy)]
struct Integrands {
    integrals: PhysicalIntegrals,
    energy: f64,
    p: f64,
    a1_left: f64,
    a1_right: f64,
    a2: f64,
    gu: f64,
    u: f64,
    spring: f64,
}

impl Integrands {
    fn new(state: &State, params: &SystemParams, u: f64) -> Self {
        let integrals = physical_integrals(state);
        let (a1_left, a1_right) = a1_parts(state);
        Integrands {
            integrals,
            energy: energy_from(integrals.l2_v, state, params),
            p: p_functional(state),
            a1_left,
            a1_right,
            a2: a2_functional(state),
            gu: state.g * u,
            u,
            spring: params.spring_gain * (params.target - state.h),
        }
    }
}

/// Running time integrals accumulated once per time step.
///
/// Terms the stepper treats implicitly (dissipation, `g u`, spring force)
/// use the end-of-step value with the input applied over the step; explicitly treated terms (`A1`, `A2`) use
/// the start-of-step value. This matches the quadrature implied by the time
/// discretization, so the discrete identities converge at the scheme's order
/// even for rough initial data.
#[derive(Debug, Clone)]
pub struct Accumulator {
    params: SystemParams,
    signal: InputSignal,
    eps: f64,
    c_global: f64,
    prev: Integrands,
    cum_diss: f64,
    cum_gu: f64,
    cum_u: f64,
    cum_spring: f64,
    cum_a1: f64,
    cum_a2: f64,
}

impl Accumulator {
    pub fn new(state: &State, params: &SystemParams, signal: &InputSignal, eps: f64) -> Self {
        let u0 = signal.value(state.t);
        Accumulator {
            params: params.clone(),
            signal: signal.clone(),
            eps,
            c_global: stability::c_global(params, signal.l2_norm(None)),
            prev: Integrands::new(state, params, u0),
            cum_diss: 0.0,
            cum_gu: 0.0,
            cum_u: 0.0,
            cum_spring: 0.0,
            cum_a1: 0.0,
            cum_a2: 0.0,
        }
    }

    /// Folds in one step of length `dt` ending at `state`, with input `u` at the step end.
    pub fn advance(&mut self, state: &State, u: f64, dt: f64) {
        let next = Integrands::new(state, &self.params, u);
        let prev = &self.prev;
        self.cum_diss += dt * next.integrals.diss;
        self.cum_gu += dt * next.gu;
        self.cum_u += dt * next.u;
        self.cum_spring += dt * next.spring;
        self.cum_a1 += dt * (prev.a1_left + prev.a1_right);
        self.cum_a2 += dt * prev.a2;
        self.prev = next;
    }

    /// Sample record of the most recently folded-in state.
    pub fn record(&self, state: &State) -> SampleRecord {
        let cur = &self.prev;
        let (c1, c2) = stability::confinement_envelope(
            state.t,
            &self.params,
            self.c_global,
            self.signal.l2_norm(Some(state.t)),
        );
        SampleRecord {
            t: state.t,
            h: state.h,
            g: state.g,
            energy: cur.energy,
            p: cur.p,
            a1: cur.a1_left + cur.a1_right,
            a2: cur.a2,
            v_eps: lyapunov_from(cur.energy, cur.p, state.h, &self.params, self.eps),
            diss: cur.integrals.diss,
            cum_diss: self.cum_diss,
            cum_gu: self.cum_gu,
            cum_u: self.cum_u,
            cum_spring: self.cum_spring,
            c1,
            c2,
            u: cur.u,
            l2_v: cur.integrals.l2_v,
            diss_left: cur.integrals.diss_left,
            diss_right: cur.integrals.diss_right,
            a1_left: cur.a1_left,
            a1_right: cur.a1_right,
            cum_a1: self.cum_a1,
            cum_a2: self.cum_a2,
        }
    }
}

/// `R_E(t) = E(t) - E(0) + 2∫∫v_y² - 2∫g u`.
pub fn energy_residual(traj: &Trajectory) -> Vec<f64> {
    energy_residual_with_source_factor(traj, 2.0)
}

/// Energy balance residual with an arbitrary weight on `∫ g u` (the factor-1
/// variant is kept for comparison).
pub fn energy_residual_with_source_factor(traj: &Trajectory, factor: f64) -> Vec<f64> {
    let e0 = traj.samples[0].energy;
    traj.samples
        .iter()
        .map(|s| s.energy - e0 + 2.0 * s.cum_diss - factor * s.cum_gu)
        .collect()
}

/// Residual of the log-mass identity obtained by testing with `(φ, 1)`:
///
/// ```text
/// ln((1+h)/(1+h0)) - ln((1-h)/(1-h0))
///     = ∫K(h1-h) + ∫u + P(0) - P(t) + ∫A1 - ∫A2
/// ```
pub fn logmass_residual(traj: &Trajectory) -> Vec<f64> {
    let s0 = &traj.samples[0];
    traj.samples
        .iter()
        .map(|s| {
            let lhs = ((1.0 + s.h) / (1.0 + s0.h)).ln() - ((1.0 - s.h) / (1.0 - s0.h)).ln();
            let rhs = s.cum_spring + s.cum_u + s0.p - s.p + s.cum_a1 - s.cum_a2;
            lhs - rhs
        })
        .collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{initial_state, ProfileDescriptor};
    use std::f64::consts::PI;

    fn params(k: f64, h1: f64) -> SystemParams {
        SystemParams {
            spring_gain: k,
            target: h1,
            initial_position: 0.0,
            initial_velocity: 0.0,
            initial_profile: ProfileDescriptor::Zero,
        }
    }

    fn tent(n: usize) -> State {
        let grid = Grid::uniform(n);
        let mut s = State::rest(&grid, 0.0);
        for i in 0..=n {
            s.w_left[i] = 1.0 + grid.xi_left(i);
            s.w_right[i] = 1.0 - grid.xi_right(i);
        }
        s.g = 1.0;
        s
    }

    #[test]
    fn energy_examples() {
        let p = params(1.0, 0.0);
        assert_eq!(energy(&State::rest(&Grid::uniform(8), 0.0), &p), 0.0);

        let p = params(4.0, 0.0);
        let s = State::rest(&Grid::uniform(8), 0.5);
        assert_eq!(energy(&s, &p), 1.0);
    }

    #[test]
    fn energy_of_sine_with_unit_velocity() {
        // ∫ sin² = 1 over (-1, 1) plus g² = 1; K = 0
        let p = SystemParams {
            initial_velocity: 1.0,
            initial_profile: ProfileDescriptor::SineMode {
                amplitude: 1.0,
                mode: 1,
            },
            ..params(0.0, 0.0)
        };
        let errs: Vec<f64> = [64usize, 128]
            .iter()
            .map(|&n| (energy(&initial_state(&p, &Grid::uniform(n)), &p) - 2.0).abs())
            .collect();
        assert!(errs[0] < 1e-3);
        assert!((errs[0] / errs[1]).log2() > 1.8, "{errs:?}");
    }

    #[test]
    fn p_of_tent_converges_to_five_thirds() {
        let errs: Vec<f64> = [32usize, 64]
            .iter()
            .map(|&n| (p_functional(&tent(n)) - 5.0 / 3.0).abs())
            .collect();
        assert!(errs[0] < 1e-3);
        assert!((errs[0] / errs[1]).log2() > 1.9);
    }

    #[test]
    fn odd_state_has_zero_p() {
        let p = SystemParams {
            initial_profile: ProfileDescriptor::SineMode {
                amplitude: 0.8,
                mode: 2,
            },
            ..params(1.0, 0.0)
        };
        let s = initial_state(&p, &Grid::uniform(40));
        assert!(p_functional(&s).abs() < 1e-15);
        assert!(a2_functional(&s).abs() < 1e-14);
    }

    #[test]
    fn a1_vanishes_without_particle_velocity() {
        let p = SystemParams {
            initial_profile: ProfileDescriptor::SineMode {
                amplitude: 0.8,
                mode: 1,
            },
            initial_position: 0.3,
            ..params(1.0, 0.0)
        };
        let s = initial_state(&p, &Grid::uniform(40));
        assert_eq!(a1_functional(&s), 0.0);
    }

    #[test]
    fn a2_of_tent_is_zero() {
        // left: ∫(1+ξ)(1+ξ)·1 = 1/3, right: ∫(1-ξ)(1-ξ)·(-1) = -1/3
        assert!(a2_functional(&tent(16)).abs() < 1e-14);
        assert_eq!(a2_functional(&State::rest(&Grid::uniform(8), 0.2)), 0.0);
    }

    #[test]
    fn a2_of_left_ramp() {
        // w_L = 1+ξ, w_R ≡ 0 except the interface node: the right integrand
        // (1-ξ) w w_ξ is nonzero only at the interface node, O(Δξ).
        // Left piece: ∫₋₁⁰ (1+ξ)² dξ = 1/3, exact for the trapezoid up to O(Δξ²).
        let n = 64;
        let grid = Grid::uniform(n);
        let mut s = State::rest(&grid, 0.0);
        for i in 0..=n {
            s.w_left[i] = 1.0 + grid.xi_left(i);
        }
        let left_only = {
            let mut t = s.clone();
            t.w_right[0] = 0.0;
            a2_functional(&t)
        };
        let dx = grid.dxi_left();
        let trap_exact = 1.0 / 3.0 + dx * dx / 6.0;
        assert!((left_only - trap_exact).abs() < 1e-13, "{left_only}");
    }

    #[test]
    fn lyapunov_reduces_to_energy() {
        let p = SystemParams {
            initial_velocity: 0.4,
            initial_position: 0.3,
            initial_profile: ProfileDescriptor::SineMode {
                amplitude: 0.5,
                mode: 1,
            },
            ..params(2.0, -0.1)
        };
        let s = initial_state(&p, &Grid::uniform(20));
        assert_eq!(lyapunov(&s, &p, 0.0), energy(&s, &p));
        let eps = 0.01;
        let expected = energy(&s, &p) - eps * (p.target - s.h) * p_functional(&s);
        assert_eq!(lyapunov(&s, &p, eps), expected);
    }

    #[test]
    fn pointwise_bounds_hold_for_random_like_state() {
        let grid = Grid::new(23, 31).unwrap();
        let mut s = State::rest(&grid, -0.35);
        for i in 1..grid.n_left {
            s.w_left[i] = (i as f64 * 1.7).sin() * 0.9;
        }
        for j in 1..grid.n_right {
            s.w_right[j] = (j as f64 * 0.77).cos() * 0.6;
        }
        s.g = 0.45;
        s.enforce_constraints();
        let pi = physical_integrals(&s);
        let (a1l, a1r) = a1_parts(&s);
        assert!(a2_functional(&s).abs() <= 4.0 * pi.diss);
        assert!(a1l.abs() <= 6.0 * pi.diss_left);
        assert!(a1r.abs() <= 6.0 * pi.diss_right);
        assert!(p_functional(&s).powi(2) <= 4.0 * (pi.l2_v + s.g * s.g));
        assert!(s.g * s.g <= 2.0 * pi.diss);
        assert!(pi.diss >= PI * PI / 4.0 * pi.l2_v);
    }

    #[test]
    fn csv_values_round_trip() {
        let r = SampleRecord {
            t: 0.5,
            h: 0.1,
            c2: 0.3,
            ..SampleRecord::default()
        };
        assert_eq!(SampleRecord::from_csv_values(r.csv_values()), r);
    }
}
