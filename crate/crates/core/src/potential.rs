//! Double-well and obstacle potentials with their optimal 1D profiles.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::ScalarField;

/// Upper end of the obstacle potential's finite domain.
pub const OBSTACLE: f64 = 0.25;

/// Which length functional drives the phase field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PotentialKind {
    /// Ambrosio-Tortorelli: `V(s) = (1 - s)^2 / 4`, well at 1, interface at 0.
    AmbrosioTortorelli,
    /// Willmore-Cahn-Hilliard: obstacle potential `W`, well at 0, interface at 1/4.
    WillmoreCahnHilliard,
}

impl PotentialKind {
    /// Iso value used to extract a surface from the phase field.
    pub fn default_level(self) -> f64 {
        match self {
            PotentialKind::AmbrosioTortorelli => 0.5,
            PotentialKind::WillmoreCahnHilliard => 3.0 / 16.0,
        }
    }

    /// The field entering the geodesic weight: `u` for AT, `1 - 4u` for WCH.
    pub fn geodesic_phase(self, u: f64) -> f64 {
        match self {
            PotentialKind::AmbrosioTortorelli => u,
            PotentialKind::WillmoreCahnHilliard => 1.0 - 4.0 * u,
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PotentialKind::AmbrosioTortorelli => "at",
            PotentialKind::WillmoreCahnHilliard => "wch",
        })
    }
}

impl FromStr for PotentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "at" | "ambrosio-tortorelli" => Ok(PotentialKind::AmbrosioTortorelli),
            "wch" | "willmore-cahn-hilliard" => Ok(PotentialKind::WillmoreCahnHilliard),
            other => Err(Error::param("model", format!("unknown model `{other}` (expected at|wch)"))),
        }
    }
}

pub fn v(s: f64) -> f64 {
    0.25 * (1.0 - s) * (1.0 - s)
}

pub fn v_prime(s: f64) -> f64 {
    -0.5 * (1.0 - s)
}

/// Obstacle potential. Returns `+inf` beyond the obstacle.
pub fn w(s: f64) -> f64 {
    if s > OBSTACLE {
        f64::INFINITY
    } else {
        s * s * (0.5 - 2.0 * s)
    }
}

/// `W'(s)`. Only defined on the feasible set `s <= 1/4`.
pub fn w_prime(s: f64) -> Result<f64> {
    check_feasible(s)?;
    Ok(w_prime_unchecked(s))
}

/// `W''(s)`. Only defined on the feasible set `s <= 1/4`.
pub fn w_second(s: f64) -> Result<f64> {
    check_feasible(s)?;
    Ok(w_second_unchecked(s))
}

fn check_feasible(s: f64) -> Result<()> {
    if s > OBSTACLE {
        Err(Error::ObstacleViolation { index: 0, value: s })
    } else {
        Ok(())
    }
}

/// Polynomial branch of `W'`, for callers that have already projected onto `s <= 1/4`.
#[inline]
pub(crate) fn w_prime_unchecked(s: f64) -> f64 {
    s - 6.0 * s * s
}

#[inline]
pub(crate) fn w_second_unchecked(s: f64) -> f64 {
    1.0 - 12.0 * s
}

/// Standard phase-field profile `q(s) = (1 - tanh(s/2)) / 2`.
pub fn profile_q(s: f64) -> f64 {
    0.5 * (1.0 - (0.5 * s).tanh())
}

/// `y = -q'`, the WCH optimal profile.
pub fn profile_y(s: f64) -> f64 {
    let t = (0.5 * s).tanh();
    0.25 * (1.0 - t * t)
}

/// `y'(s)`.
pub fn profile_y_prime(s: f64) -> f64 {
    let t = (0.5 * s).tanh();
    -0.25 * t * (1.0 - t * t)
}

/// Expected equilibrium profile of the phase field given the distance to the interface.
pub fn expected_profile(dist: &ScalarField, eps: f64, kind: PotentialKind) -> Result<ScalarField> {
    if !(eps > 0.0) {
        return Err(Error::param("eps", format!("must be positive, got {eps}")));
    }
    if let Some(i) = dist.values().iter().position(|&d| d < 0.0) {
        return Err(Error::param("dist", format!("negative distance at node {i}")));
    }
    Ok(match kind {
        PotentialKind::WillmoreCahnHilliard => dist.map(|d| {
            let t = (d / (2.0 * eps)).tanh();
            0.25 * (1.0 - t * t)
        }),
        PotentialKind::AmbrosioTortorelli => dist.map(|d| 1.0 - (-d / (2.0 * eps)).exp()),
    })
}
