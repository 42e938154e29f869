//! Potential definition, the first-order system right-hand side, spectral
//! point bookkeeping, and the exact z = 0 fundamental solution.
//!
//! The operator acts through the 2x2 system
//!
//! ```text
//! phi_x = (-i z sigma3 + Q(x)) phi,   Q(x) = ((0, q(x)), (-q(x), 0)),
//! ```
//!
//! with the real even potential q(x) = A dn(x; m) of period 2K(m). Only the
//! focusing sign is supported; the construction rejects anything else.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_elliptic_k, jacobi_functions, EllipticParameter};
use crate::{C64, Error, Result};

/// Pauli matrix sigma1 = ((0,1),(1,0)).
pub fn sigma1() -> Matrix2<C64> {
    Matrix2::new(
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
    )
}

/// Pauli matrix sigma2 = ((0,-i),(i,0)).
pub fn sigma2() -> Matrix2<C64> {
    Matrix2::new(
        C64::new(0.0, 0.0),
        C64::new(0.0, -1.0),
        C64::new(0.0, 1.0),
        C64::new(0.0, 0.0),
    )
}

/// Pauli matrix sigma3 = ((1,0),(0,-1)).
pub fn sigma3() -> Matrix2<C64> {
    Matrix2::new(
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(-1.0, 0.0),
    )
}

/// The potential q(x) = A dn(x; m) with its period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    amplitude: f64,
    m: EllipticParameter,
    period: f64,
}

impl PotentialSpec {
    /// Builds the potential; the amplitude must be positive and finite.
    pub fn new(amplitude: f64, m: EllipticParameter) -> Result<Self> {
        if !amplitude.is_finite() || amplitude <= 0.0 {
            return Err(Error::Domain(format!(
                "amplitude must be positive and finite, got {amplitude}"
            )));
        }
        let period = 2.0 * complete_elliptic_k(m);
        Ok(Self {
            amplitude,
            m,
            period,
        })
    }

    /// The amplitude A.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// The elliptic parameter m.
    pub fn parameter(&self) -> EllipticParameter {
        self.m
    }

    /// Minimal period of the potential, 2K(m).
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Evaluates q(x) = A dn(x; m); the value lies in [A sqrt(1-m), A].
    pub fn potential(&self, x: f64) -> f64 {
        self.amplitude * jacobi_functions(x, self.m).dn
    }
}

/// A spectral parameter z; the energy lambda = z^2 is always derived from z
/// so the two can never disagree about the square-root branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    /// Spectral parameter of the first-order system.
    #[serde(with = "crate::complex_parts")]
    pub z: C64,
}

impl SpectralPoint {
    /// Wraps a spectral parameter.
    pub fn new(z: C64) -> Self {
        Self { z }
    }

    /// The associated energy lambda = z^2.
    pub fn lambda(&self) -> C64 {
        self.z * self.z
    }
}

/// Classification of a Floquet exponent in the 2 pi periodic variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FloquetKind {
    /// nu is an integer: eigenfunction periodic over one period.
    Periodic,
    /// nu is a half odd integer: eigenfunction changes sign over one period.
    Antiperiodic,
    /// Anything else.
    Generic,
}

/// A Floquet exponent with its periodicity class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloquetExponent {
    /// Exponent in the 2 pi periodic variable.
    pub nu: f64,
    /// Periodic, antiperiodic, or neither.
    pub kind: FloquetKind,
}

impl FloquetExponent {
    /// Classifies nu: integer -> periodic, integer + 1/2 -> antiperiodic.
    pub fn new(nu: f64) -> Self {
        let frac = nu - nu.floor();
        let kind = if frac.min(1.0 - frac) <= 1e-12 {
            FloquetKind::Periodic
        } else if (frac - 0.5).abs() <= 1e-12 {
            FloquetKind::Antiperiodic
        } else {
            FloquetKind::Generic
        };
        Self { nu, kind }
    }
}

/// Right-hand side of the first-order system at one point:
/// returns (-i z sigma3 + Q(x)) phi. Linear in phi.
pub fn zs_rhs(spec: &PotentialSpec, z: C64, phi: &Vector2<C64>, x: f64) -> Vector2<C64> {
    let q = spec.potential(x);
    let iz = Complex64::new(0.0, 1.0) * z;
    Vector2::new(-iz * phi[0] + q * phi[1], -q * phi[0] + iz * phi[1])
}

/// Exact fundamental solution at z = 0: a rotation by the accumulated phase
/// A am(x; m),
///
/// ```text
/// Phi(x; 0) = (( cos(A am x), sin(A am x)),
///              (-sin(A am x), cos(A am x))).
/// ```
///
/// It is the identity at x = 0 and equals (-1)^A times the identity at
/// x = 2K when A is an integer.
pub fn zero_energy_fundamental(spec: &PotentialSpec, x: f64) -> Matrix2<f64> {
    let theta = spec.amplitude * jacobi_functions(x, spec.parameter()).am;
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, -s, c)
}
