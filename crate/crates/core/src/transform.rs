//! Moving-domain to fixed-reference mapping.
//!
//! Left fluid: `y = h + ξ (1 + h)`, `ξ ∈ [-1, 0]`. Right fluid:
//! `y = h + ξ (1 - h)`, `ξ ∈ [0, 1]`. With `w(t, ξ) = v(t, y)` the Burgers
//! equation becomes, on the left,
//!
//! ```text
//! w_t = g (1 + ξ) / J · w_ξ  -  w w_ξ / J  +  w_ξξ / J²,    J = 1 + h
//! ```
//!
//! and on the right the same with `(1 - ξ)` and `J = 1 - h`.

use crate::error::{Error, Result};
use crate::params::{Grid, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Jacobians and mesh velocities of the two reference maps at a given `(h, g)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedCoefficients {
    pub jac_left: f64,
    pub jac_right: f64,
    pub g: f64,
}

impl TransformedCoefficients {
    pub fn new(h: f64, g: f64) -> Self {
        TransformedCoefficients {
            jac_left: 1.0 + h,
            jac_right: 1.0 - h,
            g,
        }
    }

    /// Mesh velocity in reference units on the left: `-g (1 + ξ) / (1 + h)`.
    pub fn mesh_velocity_left(&self, xi: f64) -> f64 {
        -self.g * (1.0 + xi) / self.jac_left
    }

    /// Mesh velocity in reference units on the right: `-g (1 - ξ) / (1 - h)`.
    pub fn mesh_velocity_right(&self, xi: f64) -> f64 {
        -self.g * (1.0 - xi) / self.jac_right
    }
}

/// Fails when the particle is within `guard` of either wall.
pub fn check_geometry(h: f64, guard: f64) -> Result<()> {
    let dist = (1.0 - h).min(1.0 + h);
    if dist.is_nan() || dist < guard {
        return Err(Error::Geometry { h, guard });
    }
    Ok(())
}

pub fn to_reference(y: f64, h: f64) -> Result<(Side, f64)> {
    if !(h.abs() < 1.0) {
        return Err(Error::Geometry { h, guard: 0.0 });
    }
    if !(-1.0..=1.0).contains(&y) {
        return Err(Error::domain("y", "must lie in [-1, 1]"));
    }
    if y <= h {
        Ok((Side::Left, (y - h) / (1.0 + h)))
    } else {
        Ok((Side::Right, (y - h) / (1.0 - h)))
    }
}

pub fn from_reference(side: Side, xi: f64, h: f64) -> f64 {
    match side {
        Side::Left => h + xi * (1.0 + h),
        Side::Right => h + xi * (1.0 - h),
    }
}

/// Explicit advection and mesh-motion terms at interior nodes, with the
/// Jacobians taken from `h`. Centered differences for `w_ξ`.
pub fn advection_terms(
    w_left: &[f64],
    w_right: &[f64],
    g: f64,
    h: f64,
    grid: &Grid,
) -> (Vec<f64>, Vec<f64>) {
    let jl = 1.0 + h;
    let jr = 1.0 - h;
    let dl = grid.dxi_left();
    let dr = grid.dxi_right();
    let left = (1..grid.n_left)
        .map(|i| {
            let xi = grid.xi_left(i);
            let wx = (w_left[i + 1] - w_left[i - 1]) / (2.0 * dl);
            (g * (1.0 + xi) - w_left[i]) * wx / jl
        })
        .collect();
    let right = (1..grid.n_right)
        .map(|j| {
            let xi = grid.xi_right(j);
            let wx = (w_right[j + 1] - w_right[j - 1]) / (2.0 * dr);
            (g * (1.0 - xi) - w_right[j]) * wx / jr
        })
        .collect();
    (left, right)
}

/// Full semi-discrete time derivative at interior nodes (advection, mesh
/// motion and diffusion), second-order central differences throughout.
pub fn transformed_rhs(state: &State, guard: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_geometry(state.h, guard)?;
    let grid = state.grid();
    let (mut left, mut right) =
        advection_terms(&state.w_left, &state.w_right, state.g, state.h, &grid);
    let dl = grid.dxi_left();
    let dr = grid.dxi_right();
    let kl = 1.0 / ((1.0 + state.h) * dl).powi(2);
    let kr = 1.0 / ((1.0 - state.h) * dr).powi(2);
    let w = &state.w_left;
    for (k, d) in left.iter_mut().enumerate() {
        let i = k + 1;
        *d += kl * (w[i + 1] - 2.0 * w[i] + w[i - 1]);
    }
    let w = &state.w_right;
    for (k, d) in right.iter_mut().enumerate() {
        let j = k + 1;
        *d += kr * (w[j + 1] - 2.0 * w[j] + w[j - 1]);
    }
    Ok((left, right))
}

/// One-sided reference slopes `(w_ξ(0⁻), w_ξ(0⁺))` from 3-point stencils.
pub fn interface_slopes(w_left: &[f64], w_right: &[f64], grid: &Grid) -> (f64, f64) {
    let n = grid.n_left;
    let sl = (3.0 * w_left[n] - 4.0 * w_left[n - 1] + w_left[n - 2]) / (2.0 * grid.dxi_left());
    let sr = (-3.0 * w_right[0] + 4.0 * w_right[1] - w_right[2]) / (2.0 * grid.dxi_right());
    (sl, sr)
}

/// Velocity-gradient jump `v_y(h⁺) - v_y(h⁻)` across the particle.
pub fn jump_vy(state: &State, guard: f64) -> Result<f64> {
    check_geometry(state.h, guard)?;
    let (sl, sr) = interface_slopes(&state.w_left, &state.w_right, &state.grid());
    Ok(sr / (1.0 - state.h) - sl / (1.0 + state.h))
}

/// Physical-domain integrals of a state, split by side.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhysicalIntegrals {
    /// `∫ v² dy`
    pub l2_v: f64,
    /// `∫ v_y² dy`
    pub diss: f64,
    pub l2_left: f64,
    pub l2_right: f64,
    pub diss_left: f64,
    pub diss_right: f64,
}

/// `∫v²` and `∫v_y²` of the piecewise-linear interpolant of the nodal values.
///
/// Both integrals are exact for that interpolant, so the discrete Poincaré
/// inequality `∫v_y² ≥ (π²/4) ∫v²` holds for every state.
pub fn physical_integrals(state: &State) -> PhysicalIntegrals {
    let grid = state.grid();
    let jl = 1.0 + state.h;
    let jr = 1.0 - state.h;
    let (l2l, dl) = side_integrals(&state.w_left, grid.dxi_left());
    let (l2r, dr) = side_integrals(&state.w_right, grid.dxi_right());
    let l2_left = jl * l2l;
    let l2_right = jr * l2r;
    let diss_left = dl / jl;
    let diss_right = dr / jr;
    PhysicalIntegrals {
        l2_v: l2_left + l2_right,
        diss: diss_left + diss_right,
        l2_left,
        l2_right,
        diss_left,
        diss_right,
    }
}

/// Reference-coordinate `(∫w² dξ, ∫w_ξ² dξ)` of a piecewise-linear function.
fn side_integrals(w: &[f64], dxi: f64) -> (f64, f64) {
    let mut mass = 0.0;
    let mut grad = 0.0;
    for p in w.windows(2) {
        let (a, b) = (p[0], p[1]);
        mass += a * a + a * b + b * b;
        grad += (b - a) * (b - a);
    }
    (mass * dxi / 3.0, grad / dxi)
}
