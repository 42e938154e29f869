//! Jacobi elliptic functions from scratch.
//!
//! The complete integral K(m) comes from the arithmetic-geometric mean,
//! and am/sn/cn/dn come from the descending Landen staircase driven by the
//! same AGM scale. Convention: everything takes the parameter m = k^2,
//! with 0 <= m < 1.
//!
//! ```text
//! K(m) = pi / (2 agm(1, sqrt(1-m)))
//! sn(x) = sin(am(x)),  cn(x) = cos(am(x)),  dn(x) = sqrt(1 - m sn^2(x))
//! ```
//!
//! am is quasi-periodic, am(x + 2K) = am(x) + pi, so large arguments are
//! range-reduced to one period before the staircase runs.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// AGM iteration cap; quadratic convergence needs ~8 steps for any m < 1.
const AGM_MAX_ITER: usize = 32;

/// Elliptic parameter m = k^2, validated to 0 <= m < 1.
///
/// m = 1 is rejected: the period 2K(m) diverges there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct EllipticParameter {
    m: f64,
}

impl EllipticParameter {
    /// Validates and wraps the parameter.
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() || !(0.0..1.0).contains(&m) {
            return Err(Error::Domain(format!(
                "elliptic parameter must satisfy 0 <= m < 1, got {m}"
            )));
        }
        Ok(Self { m })
    }

    /// The raw parameter value.
    pub fn value(self) -> f64 {
        self.m
    }
}

impl<'de> Deserialize<'de> for EllipticParameter {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let m = f64::deserialize(deserializer)?;
        EllipticParameter::new(m).map_err(serde::de::Error::custom)
    }
}

/// One evaluation of the Jacobi functions at a real argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticValues {
    /// Argument the functions were evaluated at.
    pub x: f64,
    /// Amplitude am(x; m) in radians.
    pub am: f64,
    /// sn(x; m) = sin(am).
    pub sn: f64,
    /// cn(x; m) = cos(am).
    pub cn: f64,
    /// dn(x; m), positive for m < 1.
    pub dn: f64,
}

/// Complete elliptic integral of the first kind, K(m).
///
/// Relative error is at the rounding level (well below 1e-13): the AGM
/// converges quadratically and is run to fixed point.
pub fn complete_elliptic_k(m: EllipticParameter) -> f64 {
    let mut a = 1.0f64;
    let mut b = (1.0 - m.value()).sqrt();
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        a = an;
        b = bn;
    }
    std::f64::consts::PI / (2.0 * a)
}

/// Jacobi amplitude and the three basic functions at a real argument.
///
/// The argument is reduced by x = 2nK + r with r in [-K, K], the staircase
/// evaluates am(r), and quasi-periodicity restores am(x) = n pi + am(r).
pub fn jacobi_functions(x: f64, m: EllipticParameter) -> EllipticValues {
    assert!(x.is_finite(), "jacobi_functions requires finite x, got {x}");
    let mv = m.value();
    if mv == 0.0 {
        return EllipticValues {
            x,
            am: x,
            sn: x.sin(),
            cn: x.cos(),
            dn: 1.0,
        };
    }

    let k = complete_elliptic_k(m);
    let n = (x / (2.0 * k)).round();
    let r = x - 2.0 * n * k;
    let am_r = amplitude_staircase(r, mv);

    let am = n * std::f64::consts::PI + am_r;
    // sin/cos of n*pi + am_r without forming the large angle
    let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
    let sn = sign * am_r.sin();
    let cn = sign * am_r.cos();
    let dn = (1.0 - mv * sn * sn).sqrt();

    EllipticValues { x, am, sn, cn, dn }
}

/// am(r; m) for |r| <= K via the AGM phase staircase.
///
/// Scales: a_0 = 1, b_0 = sqrt(1-m), c_0 = sqrt(m); then
/// a_{i+1} = (a_i+b_i)/2, b_{i+1} = sqrt(a_i b_i), c_{i+1} = (a_i-b_i)/2.
/// Phase: phi_N = 2^N a_N r, then downwards
/// phi_{i-1} = (phi_i + asin((c_i/a_i) sin phi_i)) / 2, and am = phi_0.
fn amplitude_staircase(r: f64, m: f64) -> f64 {
    let mut a = vec![1.0f64];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();

    let mut level = 0;
    while level < AGM_MAX_ITER {
        let an = 0.5 * (a[level] + b);
        let cn = 0.5 * (a[level] - b);
        b = (a[level] * b).sqrt();
        a.push(an);
        c.push(cn);
        level += 1;
        if cn.abs() <= f64::EPSILON * an {
            break;
        }
    }

    let mut phi = (1u64 << level) as f64 * a[level] * r;
    for i in (1..=level).rev() {
        let s = (c[i] / a[i]) * phi.sin();
        phi = 0.5 * (phi + s.clamp(-1.0, 1.0).asin());
    }
    phi
}
