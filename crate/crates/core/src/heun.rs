//! Scalar second-order equation behind the half-infinite recurrence
//! families.
//!
//! After separating the zero-energy structure out of the first-order system,
//! the remaining spectral problem is equivalent to a scalar equation
//!
//! ```text
//!   zeta^2 F(zeta) y'' + zeta G(zeta) y' + H(zeta; lambda) y = 0
//! ```
//!
//! with polynomial coefficients of degree two. It has four regular singular
//! points: zeta = 0 and zeta = infinity, plus two movable points on the
//! negative real axis that depend only on the elliptic parameter m. Series
//! solutions about 0 and about infinity have coefficients governed by the
//! same three-term recurrences that define the `To*` and `Tinf*` tridiagonal
//! families, so this module provides a third, independent route to their
//! eigenvalues:
//!
//! * [`singular_points`] locates the movable singular points,
//! * [`frobenius_exponent_table`] lists the local power-law exponents,
//! * [`frobenius_series_sum`] evaluates a truncated series solution with
//!   convergence diagnostics based on the coefficient ratio,
//! * [`perron_residual`] evaluates a continued-fraction mismatch whose sign
//!   changes bracket the eigenvalues of the half-infinite matrices.
//!
//! The ratio diagnostics rest on the minimal-solution dichotomy: for generic
//! lambda the coefficient ratio c_{n+1}/c_n tends to the larger
//! characteristic root (the reciprocal of the inner singular point), while at
//! an eigenvalue the coefficients follow the minimal solution and the ratio
//! drops to the smaller root (the reciprocal of the outer point), enlarging
//! the disk of convergence.

use serde::{Deserialize, Serialize};

use crate::elliptic::EllipticParameter;
use crate::tridiag::{heun_coefficients, FamilyTag, RecurrenceFamily};
use crate::{C64, Error, Result};

/// The two movable regular singular points of the scalar equation.
///
/// Both lie on the negative real axis for every m in (0, 1) and are mutual
/// reciprocals. The other two singular points sit fixed at zero and
/// infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularPoints {
    /// Inner point, in (-1, 0).
    pub zeta1: f64,
    /// Outer point, in (-inf, -1); the exact reciprocal of `zeta1`.
    pub zeta2: f64,
}

/// Locates the movable singular points for one elliptic parameter.
///
/// The closed form (m - 2 +- 2 sqrt(1 - m)) / m suffers catastrophic
/// cancellation on the inner root when m is small, so the outer root is
/// computed first (its numerator adds two negative terms) and the inner one
/// is taken as the exact reciprocal.
///
/// At m = 0 the movable points collapse onto 0 and infinity and the scalar
/// equation degenerates to an equidimensional one, so that case is a domain
/// error.
pub fn singular_points(m: EllipticParameter) -> Result<SingularPoints> {
    let mv = m.value();
    if mv == 0.0 {
        return Err(Error::Domain(
            "singular points merge with 0 and infinity at m = 0; the scalar equation \
             degenerates and has no movable singular points"
                .into(),
        ));
    }
    let zeta2 = (mv - 2.0 - 2.0 * (1.0 - mv).sqrt()) / mv;
    Ok(SingularPoints {
        zeta1: 1.0 / zeta2,
        zeta2,
    })
}

/// Values of the three coefficient polynomials of the scalar equation at one
/// point zeta.
///
/// ```text
/// F(zeta) = -m zeta^2 + (2m - 4) zeta - m
/// G(zeta) = -(3/2) m zeta^2 + (2m - 4) zeta - m/2
/// H(zeta) = (A/4)(A+1) m zeta^2 + (lambda + A^2 (1 - m/2)) zeta + (A/4)(A-1) m
/// ```
///
/// Only H depends on the spectral parameter lambda and the amplitude A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeunCoefficients {
    /// Leading coefficient F(zeta); vanishes exactly at the two movable
    /// singular points.
    pub f: C64,
    /// First-order coefficient G(zeta).
    pub g: C64,
    /// Zeroth-order coefficient H(zeta; lambda, A).
    pub h: C64,
}

impl HeunCoefficients {
    /// Residual zeta^2 F y'' + zeta G y' + H y of a candidate solution
    /// triple; zero for exact solutions of the scalar equation.
    pub fn residual(&self, zeta: C64, y: C64, dy: C64, ddy: C64) -> C64 {
        zeta * zeta * self.f * ddy + zeta * self.g * dy + self.h * y
    }
}

/// Evaluates the coefficient polynomials of the scalar equation.
pub fn ode_coefficients(
    amplitude: f64,
    m: EllipticParameter,
    lambda: f64,
    zeta: C64,
) -> HeunCoefficients {
    let a = amplitude;
    let mv = m.value();
    let z2 = zeta * zeta;
    let f = -mv * z2 + (2.0 * mv - 4.0) * zeta - mv;
    let g = -1.5 * mv * z2 + (2.0 * mv - 4.0) * zeta - 0.5 * mv;
    let h = 0.25 * a * (a + 1.0) * mv * z2
        + (lambda + a * a * (1.0 - 0.5 * mv)) * zeta
        + 0.25 * a * (a - 1.0) * mv;
    HeunCoefficients { f, g, h }
}

/// Frobenius exponents of the scalar equation at its four regular singular
/// points.
///
/// The exponents at the movable points do not depend on the amplitude; the
/// ones at zero and at infinity do.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusExponents {
    /// At zeta = 0: (A/2, -(A-1)/2).
    pub at0: (f64, f64),
    /// At the inner movable point: (0, 1/2).
    pub at1: (f64, f64),
    /// At the outer movable point: (0, -1/2).
    pub at2: (f64, f64),
    /// At infinity: (A/2, -(A+1)/2).
    pub at_inf: (f64, f64),
}

impl FrobeniusExponents {
    /// All eight exponents, ordered (at0, at1, at2, at_inf) with the first
    /// branch of each pair before the second.
    pub fn all(&self) -> [f64; 8] {
        [
            self.at0.0,
            self.at0.1,
            self.at1.0,
            self.at1.1,
            self.at2.0,
            self.at2.1,
            self.at_inf.0,
            self.at_inf.1,
        ]
    }

    /// Flags the exponents that are integers, in the order of [`Self::all`].
    /// For even integer amplitudes the leading exponents at zero and at
    /// infinity are integers.
    pub fn integer_mask(&self) -> [bool; 8] {
        self.all().map(is_near_integer)
    }

    /// Flags the exponents that are odd multiples of one half, in the order
    /// of [`Self::all`].
    pub fn half_integer_mask(&self) -> [bool; 8] {
        self.all()
            .map(|x| is_near_integer(2.0 * x) && !is_near_integer(x))
    }

    /// True when the two exponents at some singular point differ by an
    /// integer, the degenerate case in which the second local solution can
    /// pick up a logarithm. This happens exactly at half-integer amplitudes
    /// and never for integer ones; the module only reports the situation, it
    /// does not build logarithmic solutions.
    pub fn resonant(&self) -> bool {
        [self.at0, self.at1, self.at2, self.at_inf]
            .iter()
            .any(|pair| is_near_integer(pair.0 - pair.1))
    }
}

fn is_near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= 1e-9
}

/// Frobenius exponents for one amplitude (expects A > 0).
pub fn frobenius_exponent_table(amplitude: f64) -> FrobeniusExponents {
    let a = amplitude;
    FrobeniusExponents {
        at0: (0.5 * a, -0.5 * (a - 1.0)),
        at1: (0.0, 0.5),
        at2: (0.0, -0.5),
        at_inf: (0.5 * a, -0.5 * (a + 1.0)),
    }
}

/// Leading exponent of the series solution built by one half-infinite
/// family: the branch of the exponent table each family's recurrence
/// realizes.
pub fn family_exponent(fam: &RecurrenceFamily) -> f64 {
    assert!(
        fam.tag.is_half_infinite(),
        "series exponents exist only for the half-infinite families, got {:?}",
        fam.tag
    );
    let a = fam.amplitude;
    match fam.tag {
        FamilyTag::ToMinus | FamilyTag::TinfMinus => 0.5 * a,
        FamilyTag::ToPlus => -0.5 * (a - 1.0),
        FamilyTag::TinfPlus => -0.5 * (a + 1.0),
        FamilyTag::Bnu => unreachable!(),
    }
}

/// Continued-fraction eigenvalue residual of a half-infinite family.
///
/// Rows n >= 1 of the eigenvalue recurrence are rescaled by 1/n^2 so the
/// three coefficient sequences approach finite limits whose characteristic
/// roots are exactly the two movable singular points. The backward pass
///
/// ```text
///   r_n = -d_n / (e_n + f_n r_{n+1}),    r_{depth+1} = zeta1
/// ```
///
/// seeded with the smaller root produces the coefficient ratio a decaying
/// (minimal) solution must have, while the boundary relation of row 0 pins
/// the ratio the series solution actually has. The residual is the mismatch
/// (e_0 + f_0 r_1) / f_0 between the two; it vanishes exactly when lambda is
/// an eigenvalue, and its sign changes bracket the spectrum.
///
/// A vanishing coupling splits the matrix into a finite head block plus a
/// tail. Every row that starts a block contributes its own boundary mismatch
/// as one factor of the returned product, so roots of the residual still
/// enumerate the full spectrum in those reducible cases (the head-block
/// couplings of the `*Minus` families vanish identically, and half-integer
/// amplitudes cut the `ToPlus` and `TinfMinus` families as well).
///
/// Depth controls only the truncation of the continued fraction; the
/// backward pass contracts toward its fixed point geometrically, so modest
/// depths already give fully converged residuals away from poles.
pub fn perron_residual(fam: &RecurrenceFamily, lambda: f64, depth: usize) -> Result<f64> {
    if !fam.tag.is_half_infinite() {
        return Err(Error::Domain(
            "the continued-fraction residual is defined for the half-infinite families only"
                .into(),
        ));
    }
    if depth == 0 {
        return Err(Error::Domain(
            "continued-fraction depth must be at least 1".into(),
        ));
    }
    if !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "spectral parameter must be finite, got {lambda}"
        )));
    }
    let seed = singular_points(fam.m)?.zeta1;

    let mut d = vec![0.0; depth + 1];
    let mut e = vec![0.0; depth + 1];
    let mut f = vec![0.0; depth + 1];
    for n in 0..=depth {
        let (sub, diag, sup) = heun_coefficients(fam, n);
        let scale = if n == 0 { 1.0 } else { 1.0 / ((n * n) as f64) };
        d[n] = sub * scale;
        e[n] = (diag - lambda) * scale;
        f[n] = sup * scale;
    }

    // Backward pass. A vanishing f_n severs the influence of the tail on
    // row n, which the product f_n * r_{n+1} must respect even when the
    // tail ratio has blown up (0 * inf would poison the sweep with NaN).
    let mut r = vec![0.0; depth + 2];
    r[depth + 1] = seed;
    let mut bad_level = None;
    for n in (1..=depth).rev() {
        let den = if f[n] == 0.0 {
            e[n]
        } else {
            e[n] + f[n] * r[n + 1]
        };
        if d[n] == 0.0 {
            r[n] = 0.0;
        } else {
            if den == 0.0 {
                bad_level = Some(n);
            }
            r[n] = -d[n] / den;
        }
    }

    // Boundary mismatch of every block. Row 0 always starts one; row n >= 1
    // starts one when its coupling to row n - 1 vanishes (either the sub
    // entry of row n or the sup entry of row n - 1 is an exact zero). When a
    // block start is itself decoupled from the tail (f_n = 0) the factor is
    // left unnormalized.
    let mut residual = 1.0;
    for n in 0..=depth {
        let starts_block = n == 0 || d[n] == 0.0 || f[n - 1] == 0.0;
        if !starts_block {
            continue;
        }
        let mismatch = if f[n] == 0.0 {
            e[n]
        } else {
            (e[n] + f[n] * r[n + 1]) / f[n]
        };
        residual *= mismatch;
    }
    if !residual.is_finite() {
        return Err(Error::SmallDenominator {
            level: bad_level.unwrap_or(0),
        });
    }
    Ok(residual)
}

/// Bracket and bisect the continued-fraction residual around a candidate
/// eigenvalue, returning the refined root.
///
/// The residual changes sign at eigenvalues, but poles of the continued
/// fraction interlace the spectrum and can sit arbitrarily close to a root
/// (a pole sits within 1e-3 of the 5th `ToMinus` eigenvalue at A=2, m=0.5
/// while the eigenvalue itself is a clean zero). A fixed bracket therefore
/// cannot work: the half-width shrinks by factors of 10 until the endpoint
/// signs differ, which eventually excludes every pole because the candidate
/// is strictly closer to the root than to any pole. A bisection result is
/// accepted only when the residual there is smaller than at the bracket
/// endpoints, which rejects the sign changes poles produce. Returns `None`
/// when no certified sign change exists down to a half-width of 1e-12,
/// meaning the candidate is not near a simple root.
pub fn localize_root(fam: &RecurrenceFamily, guess: f64, depth: usize) -> Result<Option<f64>> {
    let scale = 1.0 + guess.abs();
    let mut half = 1e-3 * scale;
    let floor = 1e-12 * scale;
    while half >= floor {
        let (mut lo, mut hi) = (guess - half, guess + half);
        let mut flo = perron_residual(fam, lo, depth)?;
        let fhi = perron_residual(fam, hi, depth)?;
        let smallest_end = flo.abs().min(fhi.abs());
        if flo * fhi < 0.0 {
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fmid = perron_residual(fam, mid, depth)?;
                if fmid == 0.0 {
                    return Ok(Some(mid));
                }
                if flo * fmid < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fmid;
                }
            }
            let root = 0.5 * (lo + hi);
            if perron_residual(fam, root, depth)?.abs() <= smallest_end {
                return Ok(Some(root));
            }
        }
        half /= 10.0;
    }
    Ok(None)
}

/// Truncated Frobenius series of one half-infinite family.
///
/// Builds c_0 = 1, c_1 from the boundary relation of row 0, and the rest
/// from the three-term recurrence, accumulating the terms c_n w^n directly
/// (w = zeta for the inner-point families, w = 1/zeta for the families at
/// infinity) so that large coefficients and small powers cancel before they
/// can overflow on their own. Returns
///
/// * the partial sum including the prefactor zeta^rho for the family's
///   leading exponent, taken on the principal branch (cut along the negative
///   real axis, which contains both movable singular points; evaluation on
///   the unit circle should avoid zeta = -1),
/// * a geometric tail estimate from the last term and its growth factor,
///   infinite when the terms are not decaying yet, which signals that zeta
///   sits at or beyond the estimated disk of convergence,
/// * the bare coefficient ratio |c_{n_max} / c_{n_max-1}|, the minimal-
///   solution diagnostic (near 1/|zeta1| generically, near 1/|zeta2| on an
///   eigenvalue).
///
/// Terms that overflow despite the combined accumulation mean the series
/// genuinely diverges at this zeta and are reported as a numerical error.
pub fn frobenius_series_sum(
    fam: &RecurrenceFamily,
    lambda: f64,
    zeta: C64,
    n_max: usize,
) -> Result<(C64, f64, f64)> {
    if !fam.tag.is_half_infinite() {
        return Err(Error::Domain(
            "Frobenius series exist only for the half-infinite families".into(),
        ));
    }
    if n_max < 2 {
        return Err(Error::Domain(format!(
            "series order must be at least 2, got {n_max}"
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "spectral parameter must be finite, got {lambda}"
        )));
    }
    let rho = family_exponent(fam);
    let inner = matches!(fam.tag, FamilyTag::ToMinus | FamilyTag::ToPlus);
    if zeta == C64::new(0.0, 0.0) {
        if !inner {
            return Err(Error::Domain(
                "the expansion about infinity is undefined at zeta = 0".into(),
            ));
        }
        // 0^rho * (c_0 + 0 + ...) with c_0 = 1.
        return if rho == 0.0 {
            Ok((C64::new(1.0, 0.0), 0.0, 0.0))
        } else if rho > 0.0 {
            Ok((C64::new(0.0, 0.0), 0.0, 0.0))
        } else {
            Err(Error::Domain(
                "negative leading exponent diverges at zeta = 0".into(),
            ))
        };
    }

    let w = if inner { zeta } else { zeta.inv() };
    let (_, diag0, sup0) = heun_coefficients(fam, 0);
    if sup0 == 0.0 {
        return Err(Error::SmallDenominator { level: 0 });
    }
    let w2 = w * w;
    let mut prev = C64::new(1.0, 0.0);
    let mut cur = C64::new((lambda - diag0) / sup0, 0.0) * w;
    let mut sum = prev + cur;
    for n in 1..n_max {
        let (sub, diag, sup) = heun_coefficients(fam, n);
        if sup == 0.0 {
            return Err(Error::SmallDenominator { level: n });
        }
        let next = -(sub * w2 * prev + (diag - lambda) * w * cur) / sup;
        if !next.re.is_finite() || !next.im.is_finite() {
            return Err(Error::Numerical(format!(
                "series terms overflowed at order {n}; zeta lies outside the disk of convergence"
            )));
        }
        sum += next;
        prev = cur;
        cur = next;
    }

    let growth = if prev.norm() == 0.0 {
        0.0
    } else {
        cur.norm() / prev.norm()
    };
    let ratio_estimate = if prev.norm() == 0.0 {
        0.0
    } else {
        growth / w.norm()
    };
    let tail_estimate = if growth < 1.0 {
        cur.norm() * growth / (1.0 - growth)
    } else {
        f64::INFINITY
    };
    Ok((zeta.powf(rho) * sum, tail_estimate, ratio_estimate))
}
