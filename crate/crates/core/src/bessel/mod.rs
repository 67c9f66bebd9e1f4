//! Real-order Bessel functions of the first kind, their zeros, and the roots
//! of the weighted Neumann condition `-(alpha/2) J_nu(x) + x J_nu'(x) = 0`.
//!
//! The Neumann roots are located branch by branch. Between consecutive zeros
//! of `J_nu` the logarithmic derivative `F_nu(x) = x J_nu'(x) / J_nu(x)` is
//! strictly decreasing: from `nu` at `x = 0+` down to `-inf` on the first
//! branch, and from `+inf` to `-inf` on every later one. Each branch therefore
//! holds at most one root of `F_nu(x) = alpha/2`, and bisection on the branch
//! finds it.

mod eval;
mod gamma;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub use gamma::gamma;

/// Order `nu >= 0` of a Bessel function.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::Domain(format!("Bessel order must be finite and >= 0, got {nu}")));
        }
        Ok(Self(nu))
    }

    pub fn nu(self) -> f64 {
        self.0
    }

    /// `nu_k = sqrt(beta^2/4 + k(k+N-2))`, the order of the `k`-th spherical
    /// harmonic mode for the weight `|x|^alpha` in dimension `N`.
    pub fn spherical_mode(dimension: usize, alpha: f64, k: usize) -> Result<Self> {
        let beta = dimension as f64 - 2.0 + alpha;
        let k = k as f64;
        Self::new((0.25 * beta * beta + k * (k + dimension as f64 - 2.0)).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    ZeroOfJ,
    RobinRoot,
}

/// A located root with its final bracket and residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub order: BesselOrder,
    pub kind: RootKind,
    pub index: usize,
    /// Only set for [`RootKind::RobinRoot`].
    pub alpha: Option<f64>,
    pub value: f64,
    pub bracket: (f64, f64),
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselConfig {
    /// Bound on root residuals.
    pub root_tol: f64,
    /// Target relative accuracy of function values.
    pub eval_tol: f64,
    /// Step of the sign-change scan that brackets zeros of `J_nu`.
    pub scan_step: f64,
    /// Scan steps before giving up on a bracket.
    pub max_scan_steps: usize,
    /// Branch endpoints are pulled inward by this fraction of the branch width.
    pub branch_shrink: f64,
}

impl Default for BesselConfig {
    fn default() -> Self {
        Self {
            root_tol: 1e-12,
            eval_tol: 1e-10,
            scan_step: 0.5,
            max_scan_steps: 10_000,
            branch_shrink: 1e-8,
        }
    }
}

fn check_arg(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "Bessel argument must be finite and >= 0, got {x}"
        )));
    }
    Ok(())
}

/// `J_nu(x)`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(eval::jv(order.0, x))
}

/// `J_nu'(x)` through `x J_nu' = nu J_nu - x J_{nu+1}`. At `x = 0` returns
/// the limit of the differentiated series (`+inf` for `0 < nu < 1`).
pub fn bessel_j_prime(order: BesselOrder, x: f64) -> Result<f64> {
    check_arg(x)?;
    let nu = order.0;
    if x == 0.0 {
        return Ok(if nu == 0.0 || nu > 1.0 {
            0.0
        } else if nu == 1.0 {
            0.5
        } else {
            f64::INFINITY
        });
    }
    Ok(nu / x * eval::jv(nu, x) - eval::jv(nu + 1.0, x))
}

/// `J_mu(x)` for any real order, including negative ones.
pub fn bessel_j_signed(mu: f64, x: f64) -> Result<f64> {
    check_arg(x)?;
    if !mu.is_finite() {
        return Err(Error::Domain(format!("Bessel order must be finite, got {mu}")));
    }
    Ok(eval::jv(mu, x))
}

fn y_noninteger(nu: f64, x: f64) -> f64 {
    let (s, c) = (nu * PI).sin_cos();
    (eval::jv(nu, x) * c - eval::jv(-nu, x)) / s
}

/// Order offset used to approach integer orders of `Y_nu`.
pub const Y_INTEGER_EPS: f64 = 1e-6;

/// `Y_nu(x) = (J_nu cos(nu pi) - J_{-nu}) / sin(nu pi)`; at integer orders the
/// limit is taken by symmetric offsets `nu +- eps`, `nu +- 2 eps` and one
/// Richardson step.
pub fn bessel_y(order: BesselOrder, x: f64) -> Result<f64> {
    check_arg(x)?;
    if x == 0.0 {
        return Err(Error::Domain("Y_nu is singular at x = 0".into()));
    }
    let nu = order.0;
    if nu != nu.round() {
        return Ok(y_noninteger(nu, x));
    }
    let sym = |e: f64| 0.5 * (y_noninteger(nu + e, x) + y_noninteger(nu - e, x));
    let e = Y_INTEGER_EPS;
    Ok((4.0 * sym(e) - sym(2.0 * e)) / 3.0)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `k`-th positive zero of `J_nu`.
pub fn bessel_zero(order: BesselOrder, k: usize) -> Result<RootRecord> {
    bessel_zero_with(order, k, &BesselConfig::default())
}

pub fn bessel_zero_with(order: BesselOrder, k: usize, cfg: &BesselConfig) -> Result<RootRecord> {
    if k == 0 {
        return Err(Error::Precondition("zero index k must be >= 1".into()));
    }
    let nu = order.0;
    let j = |x: f64| eval::jv(nu, x);
    // No zero of J_nu lies below nu (nor below j_{0,1} > 2.4 when nu is small).
    let mut lo = nu.max(1.0);
    let mut flo = j(lo);
    let mut found = 0;
    for _ in 0..cfg.max_scan_steps {
        let hi = lo + cfg.scan_step;
        let fhi = j(hi);
        if fhi == 0.0 || (fhi > 0.0) != (flo > 0.0) {
            found += 1;
            if found == k {
                let value = if fhi == 0.0 { hi } else { bisect(j, lo, hi) };
                let residual = j(value);
                if residual.abs() > cfg.root_tol {
                    return Err(Error::Convergence(format!(
                        "zero {k} of J_{nu}: residual {residual:e} above tolerance"
                    )));
                }
                return Ok(RootRecord {
                    order,
                    kind: RootKind::ZeroOfJ,
                    index: k,
                    alpha: None,
                    value,
                    bracket: (lo, hi + cfg.scan_step * f64::from(u8::from(fhi == 0.0))),
                    residual,
                });
            }
        }
        lo = hi;
        flo = fhi;
    }
    Err(Error::Convergence(format!(
        "no bracket for zero {k} of J_{nu} after {} scan steps",
        cfg.max_scan_steps
    )))
}

/// Positive zeros `j_{nu,1} < ... < j_{nu,count}`.
pub fn bessel_zeros(order: BesselOrder, count: usize) -> Result<Vec<RootRecord>> {
    (1..=count).map(|k| bessel_zero(order, k)).collect()
}

/// `F_nu(x) = x J_nu'(x) / J_nu(x)`, evaluated as `nu - x J_{nu+1}(x) / J_nu(x)`.
pub fn f_nu(order: BesselOrder, x: f64) -> Result<f64> {
    f_nu_with(order, x, &BesselConfig::default())
}

pub fn f_nu_with(order: BesselOrder, x: f64, cfg: &BesselConfig) -> Result<f64> {
    check_arg(x)?;
    if x == 0.0 {
        return Err(Error::Domain("F_nu requires x > 0".into()));
    }
    let nu = order.0;
    let jn = eval::jv(nu, x);
    if jn.abs() < 1e-6 {
        // close to a zero: locate it and compare distances
        let (lo, hi) = (x - 0.1 * x.min(1.0), x + 0.1 * x.min(1.0));
        let (flo, fhi) = (eval::jv(nu, lo), eval::jv(nu, hi));
        if (flo > 0.0) != (fhi > 0.0) || jn == 0.0 {
            let z = bisect(|t| eval::jv(nu, t), lo, hi);
            if (z - x).abs() <= cfg.root_tol * x.max(1.0) {
                return Err(Error::Pole { nu, x });
            }
        }
    }
    Ok(nu - x * eval::jv(nu + 1.0, x) / jn)
}

fn robin_residual(nu: f64, alpha: f64, x: f64) -> f64 {
    // -(alpha/2) J + x J' = (nu - alpha/2) J - x J_{nu+1}
    (nu - 0.5 * alpha) * eval::jv(nu, x) - x * eval::jv(nu + 1.0, x)
}

/// `k`-th positive root of `-(alpha/2) J_nu(x) + x J_nu'(x) = 0`.
pub fn robin_root(order: BesselOrder, alpha: f64, k: usize) -> Result<RootRecord> {
    robin_root_with(order, alpha, k, &BesselConfig::default())
}

pub fn robin_root_with(order: BesselOrder, alpha: f64, k: usize, cfg: &BesselConfig) -> Result<RootRecord> {
    if k == 0 {
        return Err(Error::Precondition("root index k must be >= 1".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be finite, got {alpha}")));
    }
    let nu = order.0;
    let level = 0.5 * alpha;
    // F_nu(0+) = nu; a level at (or, by rounding, numerically at) nu leaves
    // no root on the first branch.
    let first_branch_has_root = level < nu - 1e-12 * nu.max(1.0);
    let mut found = 0;
    let mut left = 0.0;
    let mut zero_index = 1;
    loop {
        let right = bessel_zero_with(order, zero_index, cfg)?.value;
        let has_root = zero_index > 1 || first_branch_has_root;
        if has_root {
            found += 1;
            if found == k {
                let width = right - left;
                let lo = left + cfg.branch_shrink * width;
                let hi = right - cfg.branch_shrink * width;
                // F_nu - alpha/2 is decreasing on the branch; J_nu keeps its sign.
                let g = |x: f64| nu - x * eval::jv(nu + 1.0, x) / eval::jv(nu, x) - level;
                if !(g(lo) > 0.0 && g(hi) < 0.0) {
                    return Err(Error::Convergence(format!(
                        "branch ({left}, {right}) of F_{nu} does not straddle {level}"
                    )));
                }
                let value = bisect(g, lo, hi);
                let residual = robin_residual(nu, alpha, value);
                if residual.abs() > cfg.root_tol * value.max(1.0) {
                    return Err(Error::Convergence(format!(
                        "robin root {k} of order {nu}: residual {residual:e} above tolerance"
                    )));
                }
                return Ok(RootRecord {
                    order,
                    kind: RootKind::RobinRoot,
                    index: k,
                    alpha: Some(alpha),
                    value,
                    bracket: (lo, hi),
                    residual,
                });
            }
        }
        left = right;
        zero_index += 1;
    }
}
