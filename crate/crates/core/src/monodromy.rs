//! Monodromy matrix of the first-order system over one period, the Floquet
//! discriminant, and the symmetry diagnostics that validate it.
//!
//! The fundamental matrix solves Phi_x = L(x; z) Phi with
//! L = -i z sigma3 + Q(x) and Phi(x_from) = I. Integration uses an embedded
//! Dormand-Prince 5(4) pair with PI step control; both tolerances equal the
//! caller's `tol` (default 1e-11 upstream).
//!
//! For the monodromy at base point 0 the matrix decomposes as
//!
//! ```text
//! M = Delta I + c sigma3 - i s sigma2,  Delta^2 = 1 + c^2 - s^2,
//! ```
//!
//! with Delta = tr M / 2, c = (M11 - M22)/2, s = (M21 - M12)/2. The m = 0
//! limit has the closed form M = cos(w pi) I - i sin(w pi)/w (z sigma3 -
//! A sigma2) with w^2 = z^2 + A^2, used as an oracle.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::operator::PotentialSpec;
use crate::{C64, Error, Result};

/// Default integrator tolerance when callers do not override it.
pub const DEFAULT_TOL: f64 = 1e-11;

/// Smallest step factor before the integrator reports underflow.
const MIN_STEP_FACTOR: f64 = 1e-14;

/// Monodromy matrix over one period together with its trace data.
#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyData {
    /// Spectral parameter.
    pub z: C64,
    /// Base point the period starts at.
    pub x0: f64,
    /// Transfer matrix over [x0, x0 + period].
    pub matrix: Matrix2<C64>,
    /// Floquet discriminant, half the trace; independent of x0.
    pub delta: C64,
    /// Diagonal asymmetry (M11 - M22)/2; populated only for x0 = 0.
    pub c: Option<C64>,
    /// Off-diagonal antisymmetry (M21 - M12)/2; populated only for x0 = 0.
    pub s: Option<C64>,
    /// Estimated error: determinant drift, plus a refinement difference
    /// when the caller asked for one.
    pub est_error: f64,
}

impl MonodromyData {
    /// |det M - 1|, the raw consistency residual.
    pub fn det_drift(&self) -> f64 {
        let det = self.matrix[(0, 0)] * self.matrix[(1, 1)]
            - self.matrix[(0, 1)] * self.matrix[(1, 0)];
        (det - C64::new(1.0, 0.0)).norm()
    }
}

/// System matrix L(x; z) = -i z sigma3 + Q(x).
#[inline]
fn system_matrix(spec: &PotentialSpec, z: C64, x: f64) -> Matrix2<C64> {
    let q = spec.potential(x);
    let iz = Complex64::new(0.0, 1.0) * z;
    Matrix2::new(-iz, C64::from(q), C64::from(-q), iz)
}

/// Fundamental matrix Phi(x_to) with Phi(x_from) = I, integrated adaptively.
///
/// The local error per step is held at `tol` (absolute and relative), which
/// keeps the global determinant drift within about 10 tol over one period.
pub fn fundamental_solution(
    spec: &PotentialSpec,
    z: C64,
    x_from: f64,
    x_to: f64,
    tol: f64,
) -> Result<Matrix2<C64>> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if x_from == x_to {
        return Ok(Matrix2::identity());
    }

    let span = x_to - x_from;
    let dir = span.signum();
    let mut x = x_from;
    let mut y = Matrix2::<C64>::identity();
    let mut h = dir * (span.abs() / 50.0).min(0.1);
    let mut err_prev: f64 = 1.0;

    // Dormand-Prince 5(4) tableau
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A2: [f64; 1] = [1.0 / 5.0];
    const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
    const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
    const A5: [f64; 4] = [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
    ];
    const A6: [f64; 5] = [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ];
    const B5: [f64; 6] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    // Slivers below this scale are dropped; they perturb the result far
    // below any admissible tolerance.
    let span_scale = 4.0 * f64::EPSILON * (x_from.abs() + x_to.abs() + 1.0);

    loop {
        let remaining = x_to - x;
        if remaining.abs() <= span_scale {
            break;
        }
        let final_step = h.abs() >= remaining.abs();
        if final_step {
            h = remaining;
        }
        if !final_step && h.abs() < MIN_STEP_FACTOR * (1.0 + x.abs()) {
            return Err(Error::Numerical(format!(
                "step size underflow at x = {x} for z = {z} (tol = {tol:e})"
            )));
        }

        let k1 = system_matrix(spec, z, x) * y;
        let k2 = system_matrix(spec, z, x + C[0] * h) * (y + k1.scale(A2[0] * h));
        let k3 = system_matrix(spec, z, x + C[1] * h)
            * (y + (k1.scale(A3[0]) + k2.scale(A3[1])).scale(h));
        let k4 = system_matrix(spec, z, x + C[2] * h)
            * (y + (k1.scale(A4[0]) + k2.scale(A4[1]) + k3.scale(A4[2])).scale(h));
        let k5 = system_matrix(spec, z, x + C[3] * h)
            * (y + (k1.scale(A5[0]) + k2.scale(A5[1]) + k3.scale(A5[2]) + k4.scale(A5[3])).scale(h));
        let k6 = system_matrix(spec, z, x + C[4] * h)
            * (y + (k1.scale(A6[0])
                + k2.scale(A6[1])
                + k3.scale(A6[2])
                + k4.scale(A6[3])
                + k5.scale(A6[4]))
            .scale(h));

        let y5 = y
            + (k1.scale(B5[0]) + k3.scale(B5[2]) + k4.scale(B5[3]) + k5.scale(B5[4])
                + k6.scale(B5[5]))
            .scale(h);
        let k7 = system_matrix(spec, z, x + h) * y5;
        let y4 = y
            + (k1.scale(B4[0])
                + k3.scale(B4[2])
                + k4.scale(B4[3])
                + k5.scale(B4[4])
                + k6.scale(B4[5])
                + k7.scale(B4[6]))
            .scale(h);

        // scaled RMS error over the four complex entries
        let mut acc = 0.0;
        for idx in 0..4 {
            let (r, c) = (idx / 2, idx % 2);
            let e = (y5[(r, c)] - y4[(r, c)]).norm();
            let scale = tol + tol * y[(r, c)].norm().max(y5[(r, c)].norm());
            acc += (e / scale) * (e / scale);
        }
        let err = (acc / 4.0).sqrt().max(1e-30);

        if err <= 1.0 {
            x += h;
            y = y5;
            let fac = 0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= fac.clamp(0.2, 5.0);
            err_prev = err;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }

    Ok(y)
}

/// Monodromy matrix over [x0, x0 + period] and its discriminant data.
///
/// Delta = tr M / 2 is base-point independent; the (c, s) split is reported
/// only at x0 = 0 where the matrix has the symmetric normalization.
pub fn monodromy(spec: &PotentialSpec, z: C64, x0: f64, tol: f64) -> Result<MonodromyData> {
    let matrix = fundamental_solution(spec, z, x0, x0 + spec.period(), tol)?;
    Ok(assemble(z, x0, matrix))
}

/// Like [`monodromy`], but re-integrates at tol/10 and folds the entrywise
/// difference into `est_error` as a refinement check.
pub fn monodromy_refined(
    spec: &PotentialSpec,
    z: C64,
    x0: f64,
    tol: f64,
) -> Result<MonodromyData> {
    let coarse = monodromy(spec, z, x0, tol)?;
    let fine = fundamental_solution(spec, z, x0, x0 + spec.period(), tol / 10.0)?;
    let diff = (coarse.matrix - fine).norm();
    Ok(MonodromyData {
        est_error: coarse.est_error.max(diff),
        ..coarse
    })
}

fn assemble(z: C64, x0: f64, matrix: Matrix2<C64>) -> MonodromyData {
    let delta = 0.5 * (matrix[(0, 0)] + matrix[(1, 1)]);
    let (c, s) = if x0 == 0.0 {
        (
            Some(0.5 * (matrix[(0, 0)] - matrix[(1, 1)])),
            Some(0.5 * (matrix[(1, 0)] - matrix[(0, 1)])),
        )
    } else {
        (None, None)
    };
    let mut data = MonodromyData {
        z,
        x0,
        matrix,
        delta,
        c,
        s,
        est_error: 0.0,
    };
    data.est_error = data.det_drift();
    data
}

/// Floquet discriminant Delta(z) at base point 0.
pub fn floquet_discriminant(spec: &PotentialSpec, z: C64, tol: f64) -> Result<C64> {
    Ok(monodromy(spec, z, 0.0, tol)?.delta)
}

/// Exact monodromy for the constant potential (m = 0, period pi):
///
/// ```text
/// M(z) = cos(w pi) I - i sin(w pi)/w (z sigma3 - A sigma2),  w = sqrt(z^2 + A^2).
/// ```
///
/// Both cos(w pi) and sin(w pi)/w are entire in w^2; near w = 0 they are
/// evaluated by a 6-term Taylor series so the removable point z^2 + A^2 = 0
/// is exact. The error field is zero: the expression is closed form.
pub fn closed_form_m0(amplitude: f64, z: C64) -> MonodromyData {
    let u = z * z + amplitude * amplitude;
    let pi = std::f64::consts::PI;
    let (cos_wpi, sinc_wpi) = if u.norm() < 1e-8 {
        // cos(pi sqrt(u)) and sin(pi sqrt(u))/sqrt(u) as series in v = pi^2 u
        let v = u * (pi * pi);
        let mut cos_acc = C64::new(0.0, 0.0);
        let mut sinc_acc = C64::new(0.0, 0.0);
        let mut term = C64::new(1.0, 0.0);
        for k in 0..6u32 {
            let f2k = (1..=2 * k).map(f64::from).product::<f64>();
            let f2k1 = f2k * f64::from(2 * k + 1);
            cos_acc += term / f2k;
            sinc_acc += term / f2k1;
            term *= -v;
        }
        (cos_acc, sinc_acc * pi)
    } else {
        let w = u.sqrt();
        ((w * pi).cos(), (w * pi).sin() / w)
    };

    let m11 = cos_wpi - Complex64::new(0.0, 1.0) * sinc_wpi * z;
    let m22 = cos_wpi + Complex64::new(0.0, 1.0) * sinc_wpi * z;
    let m12 = sinc_wpi * amplitude;
    let matrix = Matrix2::new(m11, m12, -m12, m22);

    MonodromyData {
        z,
        x0: 0.0,
        matrix,
        delta: cos_wpi,
        c: Some(-Complex64::new(0.0, 1.0) * z * sinc_wpi),
        s: Some(-amplitude * sinc_wpi),
        est_error: 0.0,
    }
}

/// Residuals of the structural identities at one sample point.
#[derive(Debug, Clone, Copy)]
pub struct SymmetrySample {
    /// The sample z.
    pub z: C64,
    /// |det M(z) - 1|.
    pub det_drift: f64,
    /// Max entry of conj(M(conj z)) - sigma2 M(z) sigma2.
    pub schwarz: f64,
    /// |Delta(-z) - Delta(z)|.
    pub evenness: f64,
    /// |s(-z) - s(z)|.
    pub even_s: f64,
    /// |c(-z) + c(z)|.
    pub odd_c: f64,
    /// Realness residuals on the axes: on the real axis Delta and s must be
    /// real and c imaginary; on the imaginary axis all three must be real.
    /// Zero off the axes.
    pub axis: f64,
    /// Largest of the residuals above.
    pub worst: f64,
}

/// Symmetry validation over a list of sample points.
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    /// Tolerance the report was judged against.
    pub tol: f64,
    /// Per-sample residuals.
    pub samples: Vec<SymmetrySample>,
    /// Indices into `samples` whose worst residual exceeds the tolerance.
    pub violations: Vec<usize>,
    /// Largest residual over the whole run.
    pub max_residual: f64,
}

/// Checks det M = 1, the Schwarz reflection conj(M(conj z)) = sigma2 M(z)
/// sigma2, evenness of Delta and s, oddness of c, and axis realness, at each
/// sample. Integration runs at DEFAULT_TOL so residuals near 1e-9 are
/// meaningful.
pub fn symmetry_report(
    spec: &PotentialSpec,
    z_samples: &[C64],
    tol: f64,
) -> Result<SymmetryReport> {
    let mut samples = Vec::with_capacity(z_samples.len());
    let mut violations = Vec::new();
    let mut max_residual = 0.0f64;

    for (idx, &z) in z_samples.iter().enumerate() {
        assert!(
            z.re.is_finite() && z.im.is_finite(),
            "symmetry samples must be finite"
        );
        let at = monodromy(spec, z, 0.0, DEFAULT_TOL)?;
        let at_neg = monodromy(spec, -z, 0.0, DEFAULT_TOL)?;
        let at_conj = monodromy(spec, z.conj(), 0.0, DEFAULT_TOL)?;

        let m = &at.matrix;
        // sigma2 M sigma2 = ((M22, -M21), (-M12, M11))
        let schwarz = [
            (at_conj.matrix[(0, 0)].conj() - m[(1, 1)]).norm(),
            (at_conj.matrix[(0, 1)].conj() + m[(1, 0)]).norm(),
            (at_conj.matrix[(1, 0)].conj() + m[(0, 1)]).norm(),
            (at_conj.matrix[(1, 1)].conj() - m[(0, 0)]).norm(),
        ]
        .into_iter()
        .fold(0.0f64, f64::max);

        let c = at.c.expect("x0 = 0 populates c");
        let s = at.s.expect("x0 = 0 populates s");
        let axis = if z.im == 0.0 {
            at.delta.im.abs().max(s.im.abs()).max(c.re.abs())
        } else if z.re == 0.0 {
            at.delta.im.abs().max(s.im.abs()).max(c.im.abs())
        } else {
            0.0
        };

        let sample = SymmetrySample {
            z,
            det_drift: at.det_drift(),
            schwarz,
            evenness: (at_neg.delta - at.delta).norm(),
            even_s: (at_neg.s.expect("x0 = 0") - s).norm(),
            odd_c: (at_neg.c.expect("x0 = 0") + c).norm(),
            axis,
            worst: 0.0,
        };
        let worst = sample
            .det_drift
            .max(sample.schwarz)
            .max(sample.evenness)
            .max(sample.even_s)
            .max(sample.odd_c)
            .max(sample.axis);
        let sample = SymmetrySample { worst, ..sample };

        if worst > tol {
            violations.push(idx);
        }
        max_residual = max_residual.max(worst);
        samples.push(sample);
    }

    Ok(SymmetryReport {
        tol,
        samples,
        violations,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EllipticParameter;
    use crate::operator::zero_energy_fundamental;

    fn spec(a: f64, m: f64) -> PotentialSpec {
        PotentialSpec::new(a, EllipticParameter::new(m).expect("valid m")).expect("valid spec")
    }

    #[test]
    fn empty_interval_is_identity() {
        let s = spec(1.0, 0.5);
        let f = fundamental_solution(&s, C64::new(0.3, 0.1), 0.7, 0.7, 1e-11)
            .expect("integration succeeds");
        assert_eq!(f, Matrix2::identity());
    }

    #[test]
    fn matches_constant_potential_exponential() {
        // m = 0: Phi(pi) must equal the closed form on a z grid
        for a in [1.0, 2.0] {
            let s = spec(a, 0.0);
            for &z in &[
                C64::new(0.0, 0.0),
                C64::new(0.7, 0.0),
                C64::new(0.0, 0.9),
                C64::new(1.3, -0.4),
                C64::new(-2.0, 1.5),
            ] {
                let num = fundamental_solution(&s, z, 0.0, std::f64::consts::PI, 1e-11)
                    .expect("integration succeeds");
                let exact = closed_form_m0(a, z).matrix;
                let dev = (num - exact).norm();
                assert!(dev <= 1e-9, "A={a}, z={z}: deviation {dev:e}");
            }
        }
    }

    #[test]
    fn matches_zero_energy_solution() {
        let s = spec(2.0, 0.7);
        for &x in &[0.4, 1.1, s.period()] {
            let num = fundamental_solution(&s, C64::new(0.0, 0.0), 0.0, x, 1e-11)
                .expect("integration succeeds");
            let exact = zero_energy_fundamental(&s, x);
            let mut dev = 0.0f64;
            for r in 0..2 {
                for c in 0..2 {
                    dev = dev.max((num[(r, c)] - C64::from(exact[(r, c)])).norm());
                }
            }
            assert!(dev <= 1e-9, "x={x}: deviation {dev:e}");
        }
    }

    #[test]
    fn discriminant_reference_points() {
        // constant potential, A=2, z=0: Delta = cos(2 pi) = 1
        let d = monodromy(&spec(2.0, 0.0), C64::new(0.0, 0.0), 0.0, 1e-11)
            .expect("integration succeeds");
        assert!((d.delta - C64::from(1.0)).norm() <= 1e-9);

        // A=1, m=0.5, z=0: Delta = cos(pi) = -1
        let d = monodromy(&spec(1.0, 0.5), C64::new(0.0, 0.0), 0.0, 1e-11)
            .expect("integration succeeds");
        assert!((d.delta - C64::from(-1.0)).norm() <= 1e-9, "Delta = {}", d.delta);

        // integer A: Delta(0) = (-1)^A for any m
        for a in 1..=3 {
            let d = monodromy(&spec(a as f64, 0.35), C64::new(0.0, 0.0), 0.0, 1e-11)
                .expect("integration succeeds");
            let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
            assert!((d.delta - C64::from(sign)).norm() <= 1e-9, "A={a}");
        }
    }

    #[test]
    fn closed_form_reference_points() {
        let d = closed_form_m0(1.0, C64::new(0.0, 0.0));
        assert!((d.delta - C64::from(-1.0)).norm() < 1e-14);
        assert!(d.s.expect("populated").norm() < 1e-14);
        assert!(d.c.expect("populated").norm() < 1e-14);

        // removable point z^2 + A^2 = 0
        let d = closed_form_m0(2.0, C64::new(0.0, 2.0));
        assert!((d.delta - C64::from(1.0)).norm() < 1e-12);
        let s = d.s.expect("populated");
        assert!(
            (s - C64::from(-2.0 * std::f64::consts::PI)).norm() < 1e-10,
            "s = {s}"
        );

        let d = closed_form_m0(1.0, C64::new(3.0f64.sqrt(), 0.0));
        assert!((d.delta - C64::from(1.0)).norm() < 1e-12);
    }

    #[test]
    fn closed_form_series_agrees_with_direct_branch() {
        // straddle the series switch at |z^2 + A^2| = 1e-8
        let a = 2.0;
        for &eps in &[1e-5, 9e-5] {
            let z = C64::new(0.0, 2.0) + C64::new(eps, eps);
            let u = z * z + a * a;
            let d = closed_form_m0(a, z);
            let w = u.sqrt();
            let direct = (w * std::f64::consts::PI).cos();
            assert!(
                (d.delta - direct).norm() < 1e-10,
                "eps={eps}: {} vs {direct}",
                d.delta
            );
        }
    }

    #[test]
    fn determinant_drift_is_controlled() {
        let s = spec(2.0, 0.5);
        for &z in &[C64::new(0.5, 0.0), C64::new(0.0, 1.5), C64::new(1.0, 1.0)] {
            let d = monodromy(&s, z, 0.0, 1e-11).expect("integration succeeds");
            assert!(d.det_drift() <= 1e-10, "z={z}: drift {:e}", d.det_drift());
        }
    }

    #[test]
    fn base_point_invariance_of_delta() {
        let s = spec(1.0, 0.5);
        for i in 0..20 {
            let t = i as f64 / 19.0;
            let z = C64::new(-1.5 + 3.0 * t, (0.8 * (t - 0.5)).sin() * 0.9);
            let d0 = monodromy(&s, z, 0.0, 1e-11).expect("integration succeeds");
            for &x0 in &[0.3, 1.1] {
                let d = monodromy(&s, z, x0, 1e-11).expect("integration succeeds");
                assert!(d.c.is_none() && d.s.is_none());
                let dev = (d.delta - d0.delta).norm();
                assert!(dev <= 1e-8, "z={z}, x0={x0}: {dev:e}");
            }
        }
    }

    #[test]
    fn delta_approaches_cosine_for_large_real_z() {
        let s = spec(1.0, 0.6);
        let period = s.period();
        let mut prev = f64::INFINITY;
        let mut z_abs = 40.0 / period;
        for _ in 0..3 {
            let delta = floquet_discriminant(&s, C64::new(z_abs, 0.0), 1e-12)
                .expect("integration succeeds");
            let residual = (delta - C64::from((z_abs * period).cos())).norm();
            assert!(
                residual < prev,
                "residual {residual:e} did not shrink (prev {prev:e}) at |z| = {z_abs}"
            );
            prev = residual;
            z_abs *= 2.0;
        }
    }

    #[test]
    fn delta_leaves_unit_band_outside_strip() {
        let s = spec(1.0, 0.5);
        for &z in &[
            C64::new(0.0, 1.2),
            C64::new(0.0, -1.05),
            C64::new(0.4, 1.3),
            C64::new(-0.8, -1.7),
        ] {
            let delta = floquet_discriminant(&s, z, 1e-11).expect("integration succeeds");
            let inside = delta.im.abs() <= 1e-9 && delta.re.abs() <= 1.0 + 1e-9;
            assert!(!inside, "Delta({z}) = {delta} landed in [-1, 1]");
        }
    }

    #[test]
    fn decomposition_reconstructs_monodromy() {
        let s = spec(2.0, 0.5);
        for &z in &[C64::new(0.7, 0.0), C64::new(0.0, 0.9), C64::new(0.3, 0.4)] {
            let d = monodromy(&s, z, 0.0, 1e-11).expect("integration succeeds");
            let c = d.c.expect("populated");
            let sv = d.s.expect("populated");
            let m = d.matrix;
            let residual = [
                (m[(0, 0)] - (d.delta + c)).norm(),
                (m[(1, 1)] - (d.delta - c)).norm(),
                (m[(0, 1)] + sv).norm(),
                (m[(1, 0)] - sv).norm(),
            ]
            .into_iter()
            .fold(0.0f64, f64::max);
            assert!(residual <= 1e-9, "z={z}: reconstruction residual {residual:e}");

            let quad = d.delta * d.delta - (C64::from(1.0) + c * c - sv * sv);
            assert!(quad.norm() <= 1e-8, "z={z}: trace identity residual {quad:e}");
        }
    }

    #[test]
    fn symmetry_report_is_clean_on_mixed_samples() {
        let s = spec(1.0, 0.5);
        let samples = [
            C64::new(0.7, 0.0),
            C64::new(-0.7, 0.0),
            C64::new(0.0, 0.45),
            C64::new(0.6, 0.3),
            C64::new(-0.6, -0.3),
        ];
        let report = symmetry_report(&s, &samples, 1e-9).expect("integration succeeds");
        assert!(
            report.violations.is_empty(),
            "violations at {:?}, max residual {:e}",
            report.violations,
            report.max_residual
        );
        assert!(report.max_residual <= 1e-9);
    }

    #[test]
    fn refinement_error_is_small() {
        let s = spec(1.0, 0.5);
        let d = monodromy_refined(&s, C64::new(0.4, 0.2), 0.0, 1e-10)
            .expect("integration succeeds");
        assert!(d.est_error <= 1e-8, "est_error {:e}", d.est_error);
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        let s = spec(1.0, 0.5);
        assert!(fundamental_solution(&s, C64::new(0.0, 0.0), 0.0, 1.0, 0.0).is_err());
        assert!(fundamental_solution(&s, C64::new(0.0, 0.0), 0.0, 1.0, -1e-9).is_err());
    }
}
