//! Fully explicit reference solver used to cross-check the IMEX stepper.
//!
//! Forward Euler in time on the reference-coordinate equations. Nothing here
//! is shared with the stepper's assembly: stencils, the interface slopes and
//! the particle update are written out independently.

use crate::diagnostics::{Accumulator, Termination, Trajectory};
use crate::error::{Error, Result};
use crate::params::{initial_state, Grid, SolverConfig, State, SystemParams};
use crate::signal::InputSignal;
use crate::stability;

/// Diffusion stability factor: `dt ≤ 0.2 Δξ² min(1 ∓ h)²`.
pub const STABILITY_FACTOR: f64 = 0.2;

/// Largest admissible explicit step at position `h` on `n` cells per side.
pub fn max_stable_dt(n: usize, h: f64) -> f64 {
    let dxi = 1.0 / n as f64;
    let j = (1.0 - h).min(1.0 + h);
    STABILITY_FACTOR * dxi * dxi * j * j
}

/// Derivative at `x = 0` of the quadratic through `(0, f0), (d, f1), (2d, f2)`.
fn end_slope(f0: f64, f1: f64, f2: f64, d: f64) -> f64 {
    // Lagrange basis derivatives at the first node: -3/(2d), 2/d, -1/(2d)
    (-1.5 * f0 + 2.0 * f1 - 0.5 * f2) / d
}

/// Interior tendency of one side. `speed(ξ)` is the mesh coefficient
/// multiplying `w_ξ`, `jac` the Jacobian.
fn side_tendency(w: &[f64], xi0: f64, d: f64, jac: f64, g_mesh: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = w.len() - 1;
    let mut out = vec![0.0; n + 1];
    for i in 1..n {
        let xi = xi0 + i as f64 * d;
        let (wm, wc, wp) = (w[i - 1], w[i], w[i + 1]);
        let dw = 0.5 * (wp - wm) / d;
        let ddw = (wp + wm - 2.0 * wc) / (d * d);
        out[i] = (g_mesh(xi) * dw - wc * dw) / jac + ddw / (jac * jac);
    }
    out
}

fn euler_step(state: &State, dt: f64, u: f64, params: &SystemParams, n: usize) -> State {
    let d = 1.0 / n as f64;
    let (h, g) = (state.h, state.g);
    let jl = 1.0 + h;
    let jr = 1.0 - h;
    let tl = side_tendency(&state.w_left, -1.0, d, jl, |xi| g * (1.0 + xi));
    let tr = side_tendency(&state.w_right, 0.0, d, jr, |xi| g * (1.0 - xi));

    let wl = &state.w_left;
    let wr = &state.w_right;
    // left slope read backwards from the interface: reverse orientation flips the sign
    let slope_l = -end_slope(wl[n], wl[n - 1], wl[n - 2], d);
    let slope_r = end_slope(wr[0], wr[1], wr[2], d);
    let force = slope_r / jr - slope_l / jl + params.spring_gain * (params.target - h) + u;

    let g_new = g + dt * force;
    let mut w_left: Vec<f64> = wl.iter().zip(&tl).map(|(w, t)| w + dt * t).collect();
    let mut w_right: Vec<f64> = wr.iter().zip(&tr).map(|(w, t)| w + dt * t).collect();
    w_left[0] = 0.0;
    w_left[n] = g_new;
    w_right[0] = g_new;
    w_right[n] = 0.0;
    State {
        t: state.t + dt,
        h: h + dt * g,
        g: g_new,
        w_left,
        w_right,
    }
}

/// Forward Euler run on `n` cells per side with fixed step `dt`, sampled every
/// `sample_stride` steps and at `t_end`.
///
/// Fails with [`Error::Stability`] naming the first step whose `dt` exceeds
/// [`max_stable_dt`].
pub fn oracle_simulate(
    params: &SystemParams,
    n: usize,
    dt: f64,
    t_end: f64,
    sig: &InputSignal,
    sample_stride: usize,
) -> Result<Trajectory> {
    let params = params.clone().validate()?;
    let grid = Grid::uniform(n).validate()?;
    sig.validate()?;
    let cfg = SolverConfig {
        dt_max: dt,
        t_end,
        sample_stride,
        ..SolverConfig::default()
    }
    .validate()?;

    let eps = stability::lyapunov_eps(&params, sig, &cfg);
    let mut state = initial_state(&params, &grid);
    let mut acc = Accumulator::new(&state, &params, sig, eps);
    let mut samples = vec![acc.record(&state)];
    let mut termination = Termination::Completed;
    let steps = (t_end / dt).ceil() as usize;

    for k in 0..steps {
        let limit = max_stable_dt(n, state.h);
        let t0 = k as f64 * dt;
        let t1 = if k + 1 == steps {
            t_end
        } else {
            (k + 1) as f64 * dt
        };
        let h_step = t1 - t0;
        if h_step > limit {
            return Err(Error::Stability {
                step: k,
                t: t0,
                dt: h_step,
                limit,
            });
        }
        let u = sig.value(t0);
        let mut next = euler_step(&state, h_step, u, &params, n);
        next.t = t1;
        if let Err(e) = next.check() {
            termination = crate::stepper::failure(&state, e);
            break;
        }
        state = next;
        acc.advance(&state, sig.value(t1), h_step);
        if (k + 1) % sample_stride == 0 || k + 1 == steps {
            samples.push(acc.record(&state));
        }
    }

    Ok(Trajectory {
        params,
        grid,
        solver: cfg,
        signal: sig.clone(),
        eps,
        samples,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ProfileDescriptor;
    use crate::transform::transformed_rhs;

    fn sine_params() -> SystemParams {
        SystemParams {
            spring_gain: 1.0,
            target: 0.0,
            initial_position: 0.2,
            initial_velocity: 0.3,
            initial_profile: ProfileDescriptor::SineMode {
                amplitude: 0.5,
                mode: 1,
            },
        }
    }

    #[test]
    fn end_slope_is_exact_on_quadratics() {
        let f = |x: f64| 2.0 - 3.0 * x + 5.0 * x * x;
        let d = 0.1;
        assert!((end_slope(f(0.0), f(d), f(2.0 * d), d) + 3.0).abs() < 1e-12);
    }

    #[test]
    fn tendency_agrees_with_transform_module() {
        let p = sine_params();
        let n = 24;
        let s = initial_state(&p, &Grid::uniform(n));
        let (rl, rr) = transformed_rhs(&s, 1e-3).unwrap();
        let d = 1.0 / n as f64;
        let tl = side_tendency(&s.w_left, -1.0, d, 1.0 + s.h, |xi| s.g * (1.0 + xi));
        let tr = side_tendency(&s.w_right, 0.0, d, 1.0 - s.h, |xi| s.g * (1.0 - xi));
        for i in 1..n {
            assert!((tl[i] - rl[i - 1]).abs() < 1e-9 * (1.0 + rl[i - 1].abs()));
            assert!((tr[i] - rr[i - 1]).abs() < 1e-9 * (1.0 + rr[i - 1].abs()));
        }
    }

    #[test]
    fn equilibrium_stays_at_rest() {
        let p = SystemParams {
            initial_position: 0.0,
            initial_velocity: 0.0,
            initial_profile: ProfileDescriptor::Zero,
            ..sine_params()
        };
        let traj = oracle_simulate(&p, 16, 1e-4, 0.5, &InputSignal::Zero, 100).unwrap();
        assert!(traj.samples.iter().all(|s| s.energy == 0.0 && s.h == 0.0));
    }

    #[test]
    fn odd_data_keeps_particle_centered() {
        let p = SystemParams {
            initial_position: 0.0,
            initial_velocity: 0.0,
            initial_profile: ProfileDescriptor::SineMode {
                amplitude: 0.8,
                mode: 2,
            },
            ..sine_params()
        };
        let n = 20;
        let traj = oracle_simulate(
            &p,
            n,
            0.8 * max_stable_dt(n, 0.0),
            0.5,
            &InputSignal::Zero,
            50,
        )
        .unwrap();
        assert!(traj.samples.iter().all(|s| s.h.abs() <= 1e-10));
    }

    #[test]
    fn unstable_step_is_rejected() {
        let n = 20;
        let err = oracle_simulate(
            &sine_params(),
            n,
            2.0 * max_stable_dt(n, 0.2),
            0.1,
            &InputSignal::Zero,
            10,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Stability { step: 0, .. }));
    }
}
