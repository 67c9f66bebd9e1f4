use super::form::QuotientForm;
use super::nonlinear::{Constraint, Problem, Symmetry};
use super::{RayleighParams, SolverSettings, SpectralResult};
use crate::error::{hypothesis, Error, Result};
use crate::grid::PolarGrid;

fn radial_problem(
    grid: &PolarGrid,
    p: f64,
    q: f64,
    energy_alpha: f64,
    mass_gamma: f64,
    settings: &SolverSettings,
) -> Result<SpectralResult> {
    let form = QuotientForm::new(grid, p, q, energy_alpha, mass_gamma, true);
    Problem::new(form, Constraint::Dirichlet, Symmetry::None, energy_alpha)?.minimize(settings)
}

/// Radial Dirichlet minimum `lambda_gamma^rad` on a radial grid.
pub fn pd_radial_min(params: &RayleighParams, settings: &SolverSettings) -> Result<SpectralResult> {
    params.validate_dirichlet(settings.q_cap)?;
    let grid = settings.radial_grid(params.dimension)?;
    radial_problem(&grid, params.p, params.q, params.alpha, params.gamma, settings)
}

/// `lambda_gamma^rad` computed after the change of variable
/// `z = r^s`, `s = (gamma+N)/(alpha+N)`, which turns the mass weight into
/// `z^alpha` and the energy weight into
/// `z^{alpha - (gamma-alpha)(N+alpha-p)/(gamma+N)}` with the factor
/// `s^{p-1+p/q}` in front.
pub fn pd_radial_min_substituted(params: &RayleighParams, settings: &SolverSettings) -> Result<SpectralResult> {
    params.validate_dirichlet(settings.q_cap)?;
    let n = params.dimension as f64;
    let (p, q, a, g) = (params.p, params.q, params.alpha, params.gamma);
    let s = (g + n) / (a + n);
    let energy_alpha = a - (g - a) * (n + a - p) / (g + n);
    if !(energy_alpha > -n) {
        return Err(Error::Precondition(format!(
            "substituted energy weight exponent {energy_alpha} is not integrable"
        )));
    }
    let grid = settings.radial_grid(params.dimension)?;
    let mut result = radial_problem(&grid, p, q, energy_alpha, a, settings)?;
    let factor = s.powf(p - 1.0 + p / q);
    result.value *= factor;
    result.diagnostics.error_estimate *= factor;
    Ok(result)
}

/// Lower bound `((gamma+N)/(alpha+N))^{p-1+p/q} lambda_alpha^rad` for
/// `lambda_gamma^rad`, given `lambda_alpha^rad`. Needs `N + alpha >= p`; at
/// `N + alpha = p` the bound is an identity.
pub fn radial_lower_bound(params: &RayleighParams, lambda_alpha_rad: f64) -> Result<f64> {
    let n = params.dimension as f64;
    if !(n + params.alpha - params.p >= 0.0) {
        return Err(hypothesis(
            format!("N + alpha >= p (N + alpha - p = {})", n + params.alpha - params.p),
            "radial weight comparison",
        ));
    }
    if !(params.gamma >= params.alpha) {
        return Err(hypothesis("gamma >= alpha", "radial weight comparison"));
    }
    Ok(((params.gamma + n) / (params.alpha + n)).powf(params.p - 1.0 + params.p / params.q) * lambda_alpha_rad)
}

fn require_plane(params: &RayleighParams, context: &str) -> Result<()> {
    if params.dimension != 2 {
        return Err(hypothesis(format!("N = 2 (N = {})", params.dimension), context));
    }
    Ok(())
}

/// Dirichlet minimum `lambda_gamma` over all grid functions on the disk.
pub fn pd_full_min(params: &RayleighParams, settings: &SolverSettings) -> Result<SpectralResult> {
    params.validate_dirichlet(settings.q_cap)?;
    require_plane(params, "two-dimensional grid solve")?;
    let grid = settings.disk_grid()?;
    let form = QuotientForm::new(&grid, params.p, params.q, params.alpha, params.gamma, true);
    Problem::new(form, Constraint::Dirichlet, Symmetry::None, params.alpha)?.minimize(settings)
}

fn mean_zero_min(params: &RayleighParams, settings: &SolverSettings, symmetry: Symmetry) -> Result<SpectralResult> {
    params.validate_mean_zero(settings.q_cap)?;
    require_plane(params, "mean-zero grid solve")?;
    let grid = settings.disk_grid()?;
    let form = QuotientForm::new(&grid, 2.0, params.q, params.alpha, params.alpha, false);
    let mut result = Problem::new(form, Constraint::MeanZero, symmetry, params.alpha)?.minimize(settings)?;
    let sup = result.minimizer.values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mean = result.diagnostics.weighted_mean;
    if mean.abs() > settings.constraint_tol * sup {
        return Err(Error::Constraint {
            mean,
            tol: settings.constraint_tol * sup,
        });
    }
    let euler = pm_euler_residual(&result, params)?;
    result.diagnostics.euler_residual = Some(euler.residual);
    result.diagnostics.multiplier = Some(euler.multiplier);
    Ok(result)
}

/// Mean-zero minimum `lambda_{alpha,q}` (for `q = 2`, twice the first
/// nonzero weighted Neumann eigenvalue in the `lambda` convention of the
/// Euler equation; the returned value is the quotient minimum itself).
pub fn pm_min(params: &RayleighParams, settings: &SolverSettings) -> Result<SpectralResult> {
    mean_zero_min(params, settings, Symmetry::None)
}

/// Mean-zero minimum over functions odd in `x_2`.
pub fn pm_antisym_min(params: &RayleighParams, settings: &SolverSettings) -> Result<SpectralResult> {
    mean_zero_min(params, settings, Symmetry::OddX2)
}

/// Dirichlet minimum `lambda^0_{alpha,q}(B+)` on the upper half-disk.
///
/// Computed as the odd-in-`x_2` Dirichlet minimum on the full disk `R_odd`,
/// using `lambda^0(B+) = 2^{2/q - 1} R_odd`. The returned minimizer is the odd
/// extension.
pub fn halfdisk_dirichlet_min(params: &RayleighParams, settings: &SolverSettings) -> Result<SpectralResult> {
    let ctx = "half-disk Dirichlet problem";
    require_plane(params, ctx)?;
    if !(params.alpha > -2.0 && params.alpha < 0.0) {
        return Err(hypothesis(format!("-2 < alpha < 0 (alpha = {})", params.alpha), ctx));
    }
    if params.p != 2.0 || params.gamma != params.alpha {
        return Err(hypothesis("p = 2 and gamma = alpha", ctx));
    }
    if params.q < 2.0 {
        return Err(hypothesis(format!("q >= 2 (q = {})", params.q), ctx));
    }
    let grid = settings.disk_grid()?;
    let form = QuotientForm::new(&grid, 2.0, params.q, params.alpha, params.alpha, true);
    let mut result = Problem::new(form, Constraint::Dirichlet, Symmetry::OddX2, params.alpha)?.minimize(settings)?;
    let factor = 2f64.powf(2.0 / params.q - 1.0);
    result.value *= factor;
    result.diagnostics.error_estimate *= factor;
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerResidual {
    /// Max-norm of the strong-form residual divided by the max-norm of the
    /// nonlinear term `Lambda |u|^{q-1}`.
    pub residual: f64,
    /// Max-norm of the strong-form residual.
    pub absolute: f64,
    /// Least-squares multiplier of the constraint term.
    pub multiplier: f64,
    /// Quotient value of the normalized function.
    pub value: f64,
}

/// Residual of the discrete Euler system
/// `A u = Lambda M |u|^{q-2} u + mu M 1` for `||u||_q = 1`, where `A` is the
/// energy operator (`E(u) = u^T A u`) and `M` the lumped weighted masses.
pub fn pm_euler_residual(result: &SpectralResult, params: &RayleighParams) -> Result<EulerResidual> {
    let grid = &result.minimizer.grid;
    let form = QuotientForm::new(grid, 2.0, params.q, params.alpha, params.alpha, false);
    let mut u = result.minimizer.values.clone();
    let norm = form.q_norm(&u);
    if !(norm > 0.0) {
        return Err(Error::ZeroDenominator { norm });
    }
    u.iter_mut().for_each(|x| *x /= norm);
    let value = form.energy(&u);
    let mut au = vec![0.0; u.len()];
    form.energy_gradient(&u, &mut au);
    let mut load = vec![0.0; u.len()];
    form.nonlinear_load(&u, &mut load);
    let k = grid.k();
    let mass = form.masses();
    let mut r: Vec<f64> = au.iter().zip(&load).map(|(a, l)| 0.5 * a - value * l).collect();
    let mass_total: f64 = mass.iter().sum::<f64>() * k as f64;
    let multiplier = r.iter().sum::<f64>() / mass_total;
    let mut absolute = 0.0_f64;
    let mut scale = 0.0_f64;
    for (i, m) in mass.iter().enumerate() {
        for idx in i * k..(i + 1) * k {
            r[idx] -= multiplier * m;
            absolute = absolute.max((r[idx] / m).abs());
            scale = scale.max((value * load[idx] / m).abs());
        }
    }
    Ok(EulerResidual {
        residual: if scale > 0.0 { absolute / scale } else { absolute },
        absolute,
        multiplier,
        value,
    })
}
