//! Tridiagonal systems with a single bordered row.

use std::fmt;

/// Failure of [`BorderedTridiagonalSystem::solve`].
#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    Dimension(String),
    ZeroPivot { row: usize },
    NonFinite,
    Residual { residual: f64, rhs_norm: f64 },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Dimension(s) => write!(f, "dimension mismatch: {s}"),
            SolveError::ZeroPivot { row } => write!(f, "zero pivot in row {row}"),
            SolveError::NonFinite => write!(f, "non-finite solution"),
            SolveError::Residual { residual, rhs_norm } => {
                write!(
                    f,
                    "solve residual {residual:e} too large (|b| = {rhs_norm:e})"
                )
            }
        }
    }
}

impl std::error::Error for SolveError {}

/// Relative residual accepted by [`BorderedTridiagonalSystem::solve`].
pub const RESIDUAL_TOL: f64 = 1e-10;

/// `A x = b` with `A` tridiagonal except for up to two entries of row
/// `border` sitting two places off the diagonal.
///
/// Row `i` reads `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1]`; `sub[0]` and
/// `sup[n-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderedTridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub border: usize,
    /// Coefficient of `x[border - 2]` in the bordered row.
    pub far_left: f64,
    /// Coefficient of `x[border + 2]` in the bordered row.
    pub far_right: f64,
}

impl BorderedTridiagonalSystem {
    pub fn zeros(n: usize, border: usize) -> Self {
        BorderedTridiagonalSystem {
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
            border,
            far_left: 0.0,
            far_right: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn check_dims(&self) -> Result<(), SolveError> {
        let n = self.len();
        if self.sub.len() != n || self.sup.len() != n {
            return Err(SolveError::Dimension(format!(
                "bands have lengths {}, {}, {}",
                self.sub.len(),
                n,
                self.sup.len()
            )));
        }
        let k = self.border;
        if k >= n || (self.far_left != 0.0 && k < 2) || (self.far_right != 0.0 && k + 2 >= n) {
            return Err(SolveError::Dimension(format!(
                "bordered row {k} out of range for size {n}"
            )));
        }
        Ok(())
    }

    /// `A x`, including the off-band entries.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y: Vec<f64> = (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.sup[i] * x[i + 1];
                }
                s
            })
            .collect();
        let k = self.border;
        if self.far_left != 0.0 {
            y[k] += self.far_left * x[k - 2];
        }
        if self.far_right != 0.0 {
            y[k] += self.far_right * x[k + 2];
        }
        y
    }

    /// Solves `A x = b`: folds the off-band entries into the band using the
    /// neighbouring rows, runs the Thomas algorithm, then verifies the
    /// residual against the original system.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SolveError> {
        self.check_dims()?;
        let n = self.len();
        if b.len() != n {
            return Err(SolveError::Dimension(format!(
                "rhs has length {}, system {n}",
                b.len()
            )));
        }
        let k = self.border;
        let mut sub = self.sub.clone();
        let mut diag = self.diag.clone();
        let mut sup = self.sup.clone();
        let mut rhs = b.to_vec();

        if self.far_left != 0.0 {
            // row k-1 couples x[k-2], x[k-1], x[k]
            let piv = sub[k - 1];
            if piv == 0.0 {
                return Err(SolveError::ZeroPivot { row: k - 1 });
            }
            let m = self.far_left / piv;
            sub[k] -= m * diag[k - 1];
            diag[k] -= m * sup[k - 1];
            rhs[k] -= m * rhs[k - 1];
        }
        if self.far_right != 0.0 {
            // row k+1 couples x[k], x[k+1], x[k+2]
            let piv = sup[k + 1];
            if piv == 0.0 {
                return Err(SolveError::ZeroPivot { row: k + 1 });
            }
            let m = self.far_right / piv;
            diag[k] -= m * sub[k + 1];
            sup[k] -= m * diag[k + 1];
            rhs[k] -= m * rhs[k + 1];
        }

        let x = thomas(&sub, &diag, &sup, &rhs)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::NonFinite);
        }
        let ax = self.apply(&x);
        let residual = ax
            .iter()
            .zip(b)
            .fold(0.0f64, |m, (a, bi)| m.max((a - bi).abs()));
        let rhs_norm = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual > RESIDUAL_TOL * rhs_norm {
            return Err(SolveError::Residual { residual, rhs_norm });
        }
        Ok(x)
    }
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 || !beta.is_finite() {
        return Err(SolveError::ZeroPivot { row: 0 });
    }
    c[0] = sup[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - sub[i] * c[i - 1];
        if beta == 0.0 || !beta.is_finite() {
            return Err(SolveError::ZeroPivot { row: i });
        }
        c[i] = sup[i] / beta;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / beta;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}
