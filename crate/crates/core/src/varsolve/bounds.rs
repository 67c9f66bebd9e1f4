//! Explicit competitors: the shrunk Dirichlet bump, the logarithmic plateau
//! function, and the half-plateau competitor of the antisymmetry-breaking
//! argument.

use serde::{Deserialize, Serialize};

use super::form::QuotientForm;
use super::ops::{halfdisk_dirichlet_min, pd_radial_min, pm_antisym_min, pm_min};
use super::{rayleigh_value, RayleighParams, ScanRecord, SolverSettings};
use crate::bessel::{bessel_j, bessel_zero, gamma, BesselOrder};
use crate::error::{hypothesis, Error, Result};
use crate::grid::{GridFunction, PolarGrid};

/// Radial Dirichlet ground state `U` of the unweighted `p`-Laplacian on the
/// unit ball, normalized by `U(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGroundState {
    pub dimension: usize,
    pub p: f64,
    /// First Dirichlet eigenvalue of `-Delta_p` on the unit ball.
    pub eigenvalue: f64,
    profile: Profile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Profile {
    /// `Gamma(nu+1) (2/(j r))^nu J_nu(j r)`.
    Bessel {
        nu: f64,
        j: f64,
    },
    Sampled {
        radii: Vec<f64>,
        values: Vec<f64>,
    },
}

impl RadialGroundState {
    /// `U(r)`, zero for `r >= 1`.
    pub fn value(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        match &self.profile {
            Profile::Bessel { nu, j } => {
                let x = j * r;
                if x < 1e-8 {
                    return 1.0;
                }
                let order = BesselOrder::new(*nu).expect("nonnegative order");
                gamma(nu + 1.0) * (2.0 / x).powf(*nu) * bessel_j(order, x).expect("finite argument")
            }
            Profile::Sampled { radii, values } => {
                if r <= radii[0] {
                    return values[0];
                }
                let i = radii.partition_point(|&x| x <= r).min(radii.len() - 1);
                let (r0, r1) = (radii[i - 1], radii[i]);
                let t = (r - r0) / (r1 - r0);
                values[i - 1] * (1.0 - t) + values[i] * t
            }
        }
    }
}

/// Dirichlet ground state on the unit ball: closed form for `p = 2`, radial
/// descent on the grid of `settings` otherwise.
pub fn dirichlet_ground_state(dimension: usize, p: f64, settings: &SolverSettings) -> Result<RadialGroundState> {
    if p == 2.0 {
        let nu = dimension as f64 / 2.0 - 1.0;
        let j = bessel_zero(BesselOrder::new(nu)?, 1)?.value;
        return Ok(RadialGroundState {
            dimension,
            p,
            eigenvalue: j * j,
            profile: Profile::Bessel { nu, j },
        });
    }
    let params = RayleighParams::new(dimension, p, p, 0.0, 0.0)?;
    let res = pd_radial_min(&params, settings)?;
    let radii = res.minimizer.grid.radii().to_vec();
    let mut values = res.minimizer.values;
    let sup = values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let sign = if values[0] < 0.0 { -1.0 } else { 1.0 };
    values.iter_mut().for_each(|x| *x *= sign / sup);
    Ok(RadialGroundState {
        dimension,
        p,
        eigenvalue: res.value,
        profile: Profile::Sampled { radii, values },
    })
}

/// Quotient of `U_gamma(x) = U(gamma |x - x^gamma|)`, `x^gamma = (1 - 1/gamma, 0)`,
/// on `grid`; an upper bound for `lambda_gamma`.
pub fn bump_bound(params: &RayleighParams, u: &RadialGroundState, grid: &PolarGrid, min_nodes: usize) -> Result<f64> {
    let ctx = "shrinking bump competitor";
    if !(params.gamma >= 3.0) {
        return Err(hypothesis(format!("gamma >= 3 (gamma = {})", params.gamma), ctx));
    }
    if params.dimension != 2 || grid.is_radial() {
        return Err(hypothesis("N = 2 on a disk grid", ctx));
    }
    if u.p != params.p || u.dimension != params.dimension {
        return Err(Error::Precondition(format!(
            "ground state built for (N, p) = ({}, {}), quotient uses ({}, {})",
            u.dimension, u.p, params.dimension, params.p
        )));
    }
    let g = params.gamma;
    let center = 1.0 - 1.0 / g;
    let mut inside = 0;
    let f = GridFunction::from_fn(grid, true, |r, t| {
        let (x, y) = (r * t.cos() - center, r * t.sin());
        let d = (x * x + y * y).sqrt();
        if d * g < 1.0 {
            u.value(g * d)
        } else {
            0.0
        }
    });
    for i in 0..=grid.m() {
        for j in 0..grid.k() {
            let (x, y) = grid.point(i, j);
            if ((x - center).powi(2) + y * y).sqrt() * g < 1.0 {
                inside += 1;
            }
        }
    }
    if inside < min_nodes {
        return Err(Error::Resolution(format!(
            "bump support of radius 1/{g} contains {inside} grid nodes, need {min_nodes}"
        )));
    }
    rayleigh_value(params, &f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBumpDomain {
    Disk,
    UpperHalfDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogBump {
    pub value: f64,
    /// `int |grad w_q|^2 |x|^alpha dx` on the grid.
    pub energy: f64,
    /// `int |w_q|^q |x|^alpha dx` on the grid.
    pub q_sum: f64,
    /// False when the plateau radius `R e^{-q}` is below the local grid
    /// spacing; the plateau is then carried by the node nearest `x0`.
    pub plateau_resolved: bool,
}

/// Quotient of `w_q = q` on `|x - x0| <= R e^{-q}`, `ln(R / |x - x0|)` on the
/// ring up to `R`, and zero outside.
pub fn log_bump_quotient(
    params: &RayleighParams,
    radius: f64,
    x0: (f64, f64),
    domain: LogBumpDomain,
    grid: &PolarGrid,
) -> Result<LogBump> {
    if params.dimension != 2 || grid.is_radial() {
        return Err(hypothesis("N = 2 on a disk grid", "logarithmic plateau competitor"));
    }
    let q = params.q;
    let r0 = (x0.0 * x0.0 + x0.1 * x0.1).sqrt();
    if !(radius > 0.0) || r0 + 2.0 * radius > 1.0 {
        return Err(Error::Precondition(format!(
            "B_2R(x0) must lie in the disk (R = {radius}, |x0| = {r0})"
        )));
    }
    if domain == LogBumpDomain::UpperHalfDisk && x0.1 < 2.0 * radius {
        return Err(Error::Precondition(format!(
            "B_2R(x0) must lie in the upper half-disk (R = {radius}, x0 = {x0:?})"
        )));
    }
    if r0 <= 2.0 * radius {
        return Err(Error::Precondition(format!(
            "the origin must lie outside B_2R(x0) (R = {radius}, |x0| = {r0})"
        )));
    }
    let plateau = radius * (-q).exp();
    let w = |d: f64| {
        if d <= plateau {
            q
        } else if d < radius {
            (radius / d).ln()
        } else {
            0.0
        }
    };
    let mut f = GridFunction::from_fn(grid, true, |r, t| {
        w(((r * t.cos() - x0.0).powi(2) + (r * t.sin() - x0.1).powi(2)).sqrt())
    });
    let ring = grid.nearest_ring(r0);
    let radii = grid.radii();
    let h = if ring < grid.m() {
        radii[ring + 1] - radii[ring]
    } else {
        radii[ring] - radii[ring - 1]
    };
    let spacing = h.max(r0 * grid.dtheta());
    let plateau_resolved = plateau >= spacing;
    if !plateau_resolved {
        let t0 = x0.1.atan2(x0.0).rem_euclid(2.0 * std::f64::consts::PI);
        let j = ((t0 / grid.dtheta()).round() as usize) % grid.k();
        f.values[grid.index(ring, j)] = q;
    }
    let form = QuotientForm::new(grid, 2.0, q, params.alpha, params.alpha, true);
    let energy = form.energy(&f.values);
    let q_sum = form.q_sum(&f.values);
    Ok(LogBump {
        value: energy / q_sum.powf(2.0 / q),
        energy,
        q_sum,
        plateau_resolved,
    })
}

/// One row of the antisymmetry-breaking scan at fixed `q`.
///
/// Quantities: `lambda` (mean-zero minimum), `lambda_as` (odd-in-`x_2`
/// minimum), `lambda_half` (half-disk Dirichlet minimum), the odd-extension
/// bound `2^{1-2/q} lambda_half`, the bound with factor `2^{1-q/2}`, and the
/// half-plateau competitor `ubar` built from the odd minimizer `v` scaled to
/// unit energy (`ubar = v` for `x_2 > 0`, zero below), its shift
/// `utilde = ubar - d` and the triangle-inequality bound on `R(utilde)`.
pub fn break_certificate_row(params: &RayleighParams, settings: &SolverSettings) -> ScanRecord {
    let mut rec = ScanRecord::new(*params);
    let mut errors = Vec::new();
    let ctx = "antisymmetry-breaking scan";
    if params.dimension != 2 || !(params.alpha > -2.0 && params.alpha < 0.0) {
        rec.fail(&hypothesis(
            format!(
                "N = 2 and -2 < alpha < 0 (N = {}, alpha = {})",
                params.dimension, params.alpha
            ),
            ctx,
        ));
        return rec;
    }
    let q = params.q;
    let full = pm_min(params, settings);
    let anti = pm_antisym_min(params, settings);
    let half = halfdisk_dirichlet_min(params, settings);
    if let Ok(r) = &full {
        rec.set("lambda", r.value);
        rec.set("lambda_err", r.diagnostics.error_estimate);
        if let Some(res) = r.diagnostics.euler_residual {
            rec.set("lambda_euler_residual", res);
        }
    }
    if let Ok(r) = &anti {
        rec.set("lambda_as", r.value);
        rec.set("lambda_as_err", r.diagnostics.error_estimate);
    }
    if let Ok(r) = &half {
        rec.set("lambda_half", r.value);
        rec.set("lambda_half_err", r.diagnostics.error_estimate);
        rec.set("odd_extension_bound", 2f64.powf(1.0 - 2.0 / q) * r.value);
        rec.set("power_factor_bound", 2f64.powf(1.0 - q / 2.0) * r.value);
    }
    if let (Ok(f), Ok(a)) = (&full, &anti) {
        let err = f.diagnostics.error_estimate + a.diagnostics.error_estimate;
        rec.set("margin", a.value - f.value);
        rec.set("combined_err", err);
        rec.flag("antisym_broken", f.value < a.value && a.value - f.value >= 3.0 * err);
        rec.flag("subset_monotone", f.value <= a.value + err);
    }
    if let (Ok(a), Ok(h)) = (&anti, &half) {
        let err = a.diagnostics.error_estimate + h.diagnostics.error_estimate;
        rec.flag(
            "odd_extension_bound_holds",
            a.value <= 2f64.powf(1.0 - 2.0 / q) * h.value + err,
        );
        rec.flag(
            "power_factor_bound_holds",
            a.value <= 2f64.powf(1.0 - q / 2.0) * h.value + err,
        );
    }
    if let Ok(a) = &anti {
        let grid = &a.minimizer.grid;
        let form = QuotientForm::new(grid, 2.0, q, params.alpha, params.alpha, false);
        let mut v = a.minimizer.values.clone();
        let e = form.energy(&v);
        v.iter_mut().for_each(|x| *x /= e.sqrt());
        let k = grid.k();
        let mut ubar = v.clone();
        for i in 0..=grid.m() {
            for j in k / 2 + 1..k {
                ubar[i * k + j] = 0.0;
            }
        }
        let energy = form.energy(&ubar);
        let qsum = form.q_sum(&ubar);
        rec.set("ubar_energy", energy);
        rec.set("ubar_qsum", qsum);
        rec.set("ubar_qsum_expected", 0.5 * a.value.powf(-q / 2.0));
        let measure: f64 = form.masses().iter().sum::<f64>() * k as f64;
        let integral = form.weighted_mean(&ubar) * measure;
        let d = integral / measure;
        let utilde: Vec<f64> = ubar.iter().map(|x| x - d).collect();
        rec.set("ubar_integral", integral);
        match form.value(&utilde) {
            Ok(c) => {
                rec.set("competitor", c);
                if let Ok(f) = &full {
                    rec.flag("competitor_bound_holds", f.value <= c + f.diagnostics.error_estimate);
                }
                let bracket = 1.0 - integral.abs() * measure.powf(1.0 / q - 1.0) * a.value.sqrt();
                rec.flag("chain_conclusive", bracket > 0.0);
                if bracket > 0.0 {
                    let bound = 0.5f64.powf(1.0 - 2.0 / q) * a.value / (bracket * bracket);
                    rec.set("chain_bound", bound);
                    rec.flag("chain_holds", c <= bound * (1.0 + 1e-10));
                }
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    for r in [&full, &anti, &half] {
        if let Err(e) = r {
            errors.push(e.to_string());
        }
    }
    if !errors.is_empty() {
        rec.error = Some(errors.join("; "));
    }
    rec
}

/// [`break_certificate_row`] over a sequence of parameters, in order.
pub fn break_certificate(params: &[RayleighParams], settings: &SolverSettings) -> Vec<ScanRecord> {
    params.iter().map(|p| break_certificate_row(p, settings)).collect()
}
