//! Symmetric tridiagonal solves and generalized eigenpairs `A x = mu M x`
//! with `M` diagonal positive.

use std::ops::{Mul, Sub};

use crate::error::{Error, Result};

/// `L D L^T` factors of a symmetric tridiagonal matrix, for repeated solves.
#[derive(Debug, Clone)]
pub struct TridiagFactor {
    pivots: Vec<f64>,
    ratios: Vec<f64>,
}

impl TridiagFactor {
    pub fn new(diag: &[f64], off: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut pivots = Vec::with_capacity(n);
        let mut ratios = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n {
            let d = if i == 0 {
                diag[0]
            } else {
                diag[i] - off[i - 1] * ratios[i - 1]
            };
            if d == 0.0 || !d.is_finite() {
                return Err(Error::Convergence(format!("singular tridiagonal pivot at row {i}")));
            }
            pivots.push(d);
            if i + 1 < n {
                ratios.push(off[i] / d);
            }
        }
        Ok(Self { pivots, ratios })
    }

    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Overwrites `b` with the solution of `T x = b`.
    pub fn solve_in_place<T>(&self, b: &mut [T])
    where
        T: Copy + Mul<f64, Output = T> + Sub<Output = T>,
    {
        let n = self.pivots.len();
        for i in 1..n {
            b[i] = b[i] - b[i - 1] * self.ratios[i - 1];
        }
        for i in 0..n {
            b[i] = b[i] * (1.0 / self.pivots[i]);
        }
        for i in (0..n.saturating_sub(1)).rev() {
            b[i] = b[i] - b[i + 1] * self.ratios[i];
        }
    }
}

/// Number of generalized eigenvalues below `x` (Sylvester inertia of `A - x M`).
fn count_below(diag: &[f64], off: &[f64], mass: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let mut d = diag[i] - x * mass[i];
        if i > 0 {
            d -= off[i - 1] * off[i - 1] / q;
        }
        if d == 0.0 {
            d = -f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
        q = d;
    }
    count
}

/// The `index`-th (0-based) generalized eigenvalue of the positive
/// semidefinite pair `(A, M)` and an eigenvector normalized by `x^T M x = 1`.
pub fn generalized_eigenpair(diag: &[f64], off: &[f64], mass: &[f64], index: usize) -> Result<(f64, Vec<f64>)> {
    let n = diag.len();
    if index >= n {
        return Err(Error::Precondition(format!(
            "eigenvalue index {index} out of range for size {n}"
        )));
    }
    let mut lo = -1.0;
    while count_below(diag, off, mass, lo) > 0 {
        lo *= 2.0;
        if lo < -1e300 {
            return Err(Error::Convergence("no lower bracket for tridiagonal eigenvalue".into()));
        }
    }
    let mut hi = 1.0;
    while count_below(diag, off, mass, hi) <= index {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Convergence("no upper bracket for tridiagonal eigenvalue".into()));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
            break;
        }
        if count_below(diag, off, mass, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let value = 0.5 * (lo + hi);
    let vector = inverse_iteration(diag, off, mass, value)?;
    Ok((value, vector))
}

fn inverse_iteration(diag: &[f64], off: &[f64], mass: &[f64], shift: f64) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut shifted: Vec<f64> = (0..n).map(|i| diag[i] - shift * mass[i]).collect();
    let scale = shifted.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut factor = TridiagFactor::new(&shifted, off);
    for _ in 0..8 {
        if factor.is_ok() {
            break;
        }
        // exact singularity: nudge the shift
        for d in shifted.iter_mut() {
            *d += 1e-14 * scale;
        }
        factor = TridiagFactor::new(&shifted, off);
    }
    let factor = factor?;
    // deterministic start with components in every direction
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * ((i * 7919 % 101) as f64 / 101.0)).collect();
    for _ in 0..6 {
        let mut y: Vec<f64> = x.iter().zip(mass).map(|(a, m)| a * m).collect();
        factor.solve_in_place(&mut y);
        let norm = y.iter().zip(mass).map(|(a, m)| a * a * m).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Convergence(
                "inverse iteration produced a non-finite vector".into(),
            ));
        }
        x = y.into_iter().map(|a| a / norm).collect();
    }
    Ok(x)
}
