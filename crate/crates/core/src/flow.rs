//! Semi-implicit spectral steppers for the AT and WCH phase-field models.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{dirichlet_integral, laplacian, with_spectral, FourierSymbol, ScalarField};
use crate::measure::geodesic_penalty;
use crate::potential::{self, PotentialKind, OBSTACLE};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub eps: f64,
    pub dt: f64,
    pub sigma: f64,
    /// Geodesic penalty weight (the same parameter is also called `c_eps`).
    pub lambda: f64,
    /// Positive floor added to the geodesic weight.
    pub delta: f64,
    /// Stabilizer overrides; `None` picks the bounds of [`pick_stabilizers`].
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub kernel_width: f64,
    pub level: f64,
}

impl ModelParams {
    /// Defaults used by the reproduction presets on an `n`-point grid.
    pub fn reproduction(n: usize, model: PotentialKind) -> Self {
        Self::for_eps(Self::default_eps(n, model), n, model)
    }

    /// `4h` for AT, `2h` for WCH.
    pub fn default_eps(n: usize, model: PotentialKind) -> f64 {
        let h = 1.0 / n as f64;
        match model {
            PotentialKind::AmbrosioTortorelli => 4.0 * h,
            PotentialKind::WillmoreCahnHilliard => 2.0 * h,
        }
    }

    /// Reproduction defaults with every eps-dependent value derived from `eps`.
    pub fn for_eps(eps: f64, n: usize, model: PotentialKind) -> Self {
        let h = 1.0 / n as f64;
        match model {
            PotentialKind::AmbrosioTortorelli => ModelParams {
                eps,
                dt: eps * eps,
                sigma: 0.0,
                lambda: 3.0 * eps,
                delta: eps * eps,
                alpha: None,
                beta: None,
                kernel_width: 2.0 * h,
                level: model.default_level(),
            },
            PotentialKind::WillmoreCahnHilliard => ModelParams {
                eps,
                dt: 10.0 * eps * eps,
                sigma: 1.0 / (eps * eps),
                lambda: 5.0 * eps.powi(4),
                delta: 0.25 * eps.powi(4),
                alpha: None,
                beta: None,
                kernel_width: 2.0 * h,
                level: model.default_level(),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eps", self.eps),
            ("dt", self.dt),
            ("lambda", self.lambda),
            ("delta", self.delta),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::param("sigma", format!("must be nonnegative, got {}", self.sigma)));
        }
        if !(self.kernel_width >= 0.0) {
            return Err(Error::param("kernel_width", "must be nonnegative"));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if let Some(v) = v {
                if !(v >= 0.0) {
                    return Err(Error::param(name, format!("must be nonnegative, got {v}")));
                }
            }
        }
        if self.delta / self.lambda > 0.1 {
            log::warn!("delta/lambda = {} is not small", self.delta / self.lambda);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyReport {
    pub iteration: usize,
    pub dirichlet: f64,
    pub potential: f64,
    pub willmore: f64,
    pub geodesic: f64,
    pub total: f64,
    pub alpha: f64,
    pub beta: f64,
}

pub const ENERGY_CSV_HEADER: &str = "iter,dirichlet,potential,willmore,geodesic,total,alpha,beta";

impl EnergyReport {
    fn new(dirichlet: f64, potential: f64, willmore: f64, geodesic: f64) -> Self {
        EnergyReport {
            dirichlet,
            potential,
            willmore,
            geodesic,
            total: dirichlet + potential + willmore + geodesic,
            ..Default::default()
        }
    }

    pub fn with_geodesic(mut self, geodesic: f64) -> Self {
        self.geodesic = geodesic;
        self.total = self.dirichlet + self.potential + self.willmore + geodesic;
        self
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            self.iteration,
            self.dirichlet,
            self.potential,
            self.willmore,
            self.geodesic,
            self.total,
            self.alpha,
            self.beta
        )
    }
}

impl fmt::Display for EnergyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iter {}: total {:.6e} (dirichlet {:.4e}, potential {:.4e}, willmore {:.4e}, geodesic {:.4e})",
            self.iteration, self.total, self.dirichlet, self.potential, self.willmore, self.geodesic
        )
    }
}

/// `int eps |grad u|^2 + (1 - u)^2 / (4 eps)`.
pub fn at_energy(u: &ScalarField, params: &ModelParams) -> EnergyReport {
    let eps = params.eps;
    let dir = eps * dirichlet_integral(u);
    let pot = u.map(|x| potential::v(x) / eps).integral();
    EnergyReport::new(dir, pot, 0.0, 0.0)
}

fn check_obstacle(u: &ScalarField) -> Result<()> {
    match u.values().iter().position(|&x| x > OBSTACLE) {
        Some(index) => Err(Error::ObstacleViolation {
            index,
            value: u.values()[index],
        }),
        None => Ok(()),
    }
}

/// `int eps/2 |grad u|^2 + W(u)/eps + sigma/(2 eps) int (eps lap u - W'(u)/eps)^2`.
pub fn wch_energy(u: &ScalarField, params: &ModelParams) -> Result<EnergyReport> {
    check_obstacle(u)?;
    let eps = params.eps;
    let dir = 0.5 * eps * dirichlet_integral(u);
    let pot = u.map(|x| potential::w(x) / eps).integral();
    let lap = laplacian(u);
    let mu2: f64 = lap
        .values()
        .iter()
        .zip(u.values())
        .map(|(&l, &x)| {
            let mu = eps * l - potential::w_prime_unchecked(x) / eps;
            mu * mu
        })
        .sum::<f64>()
        * u.spec().cell_volume();
    Ok(EnergyReport::new(dir, pot, 0.5 * params.sigma / eps * mu2, 0.0))
}

/// Model energy plus the geodesic penalty for a fixed mollified weight.
pub fn total_energy(
    u: &ScalarField,
    omega: Option<&ScalarField>,
    params: &ModelParams,
    model: PotentialKind,
) -> Result<EnergyReport> {
    let base = match model {
        PotentialKind::AmbrosioTortorelli => at_energy(u, params),
        PotentialKind::WillmoreCahnHilliard => wch_energy(u, params)?,
    };
    let geo = match omega {
        Some(w) => geodesic_penalty(w, u, params, model)?,
        None => 0.0,
    };
    Ok(base.with_geodesic(geo))
}

/// Convex-concave splitting bounds; overrides in `params` win.
pub fn pick_stabilizers(
    omega: &ScalarField,
    u: &ScalarField,
    params: &ModelParams,
    model: PotentialKind,
) -> (f64, f64) {
    let w_sup = omega.max().max(0.0);
    let (alpha, beta) = match model {
        PotentialKind::AmbrosioTortorelli => (2.0 / params.lambda * w_sup, 0.0),
        PotentialKind::WillmoreCahnHilliard => {
            let e2 = params.eps * params.eps;
            // |W''| on the feasible set [u_min, 1/4]: W''(1/4) = -2.
            let s = 2.0f64.max((1.0 - 12.0 * u.min()).abs());
            let alpha = s / e2 * (1.0 + params.sigma * s / e2) + 32.0 / (params.eps * params.lambda) * w_sup;
            (alpha, 2.0 * params.sigma * s / e2)
        }
    };
    (params.alpha.unwrap_or(alpha), params.beta.unwrap_or(beta))
}

fn check_step_inputs(u: &ScalarField, omega: &ScalarField, params: &ModelParams) -> Result<()> {
    u.spec().check_same(&omega.spec())?;
    params.validate()?;
    if let Some(i) = omega.values().iter().position(|&w| w < 0.0) {
        return Err(Error::param("omega", format!("negative weight at node {i}")));
    }
    Ok(())
}

fn solve_symbol(rhs: &ScalarField, inv: impl Fn([f64; 3]) -> f64) -> ScalarField {
    let spec = rhs.spec();
    let sym = FourierSymbol::from_fn(spec, |k| 1.0 / inv(k));
    let mut out = vec![0.0; spec.len()];
    with_spectral(spec, |s| {
        let mut buf = Vec::new();
        s.apply(rhs.values(), sym.values(), &mut buf, &mut out);
    });
    ScalarField::from_values(spec, out).expect("spectral solve produced non-finite values")
}

/// One step of `u_t = 2 eps lap u - V'(u)/eps - (2/lambda) omega u`, stabilized by `alpha`.
pub fn at_step(u: &ScalarField, omega: &ScalarField, params: &ModelParams) -> Result<ScalarField> {
    check_step_inputs(u, omega, params)?;
    let (alpha, _) = pick_stabilizers(omega, u, params, PotentialKind::AmbrosioTortorelli);
    Ok(at_step_with(u, omega, params, alpha))
}

pub(crate) fn at_step_with(u: &ScalarField, omega: &ScalarField, params: &ModelParams, alpha: f64) -> ScalarField {
    let (eps, dt, lam) = (params.eps, params.dt, params.lambda);
    let rhs = u
        .zip_map(omega, |x, w| x + dt * (0.5 / eps - (2.0 / lam * w - alpha) * x))
        .expect("specs checked");
    solve_symbol(&rhs, |k| {
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        1.0 + dt * (2.0 * eps * k2 + 0.5 / eps + alpha)
    })
}

/// One stabilized step of the WCH flow with geodesic forcing, followed by the obstacle clamp.
pub fn wch_step(u: &ScalarField, omega: &ScalarField, params: &ModelParams) -> Result<ScalarField> {
    check_step_inputs(u, omega, params)?;
    let (alpha, beta) = pick_stabilizers(omega, u, params, PotentialKind::WillmoreCahnHilliard);
    Ok(wch_step_with(u, omega, params, alpha, beta))
}

pub(crate) fn wch_step_with(
    u: &ScalarField,
    omega: &ScalarField,
    params: &ModelParams,
    alpha: f64,
    beta: f64,
) -> ScalarField {
    wch_step_raw(u, omega, params, alpha, beta).map(|x| x.min(OBSTACLE))
}

#[doc(hidden)]
pub fn wch_step_raw(
    u: &ScalarField,
    omega: &ScalarField,
    params: &ModelParams,
    alpha: f64,
    beta: f64,
) -> ScalarField {
    let (eps, dt, sigma, lam) = (params.eps, params.dt, params.sigma, params.lambda);
    let e2 = eps * eps;
    let wp = u.map(potential::w_prime_unchecked);
    let lap_u = laplacian(u);
    let lap_wp = laplacian(&wp);
    let spec = u.spec();
    let vals: Vec<f64> = (0..spec.len())
        .map(|i| {
            let x = u.values()[i];
            let f1 = wp.values()[i] / e2;
            let f2 = potential::w_second_unchecked(x) / e2;
            let lu = lap_u.values()[i];
            let bracket = -f1 + sigma * (lap_wp.values()[i] / e2 + f2 * (lu - f1)) + alpha * x - beta * lu
                - 8.0 / (eps * lam) * omega.values()[i] * (4.0 * x - 1.0);
            x + dt * eps * bracket
        })
        .collect();
    let g = ScalarField::from_values(spec, vals).expect("finite explicit term");
    solve_symbol(&g, |k| {
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        1.0 + eps * dt * (k2 + sigma * k2 * k2 + alpha + beta * k2)
    })
}
