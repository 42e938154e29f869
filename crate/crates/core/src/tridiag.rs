//! The five tridiagonal operator families behind the eigenvalue problem, with
//! truncation, symmetrization, eigensolvers, and structural checks.
//!
//! Expanding the periodic eigenfunctions in Fourier modes turns the spectral
//! problem into a bi-infinite three-term recurrence, the `Bnu` family, indexed
//! by the Floquet offset nu. Expanding the equivalent scalar second-order ODE
//! in Frobenius series about its inner singular point (the `To*` families) or
//! about infinity (the `Tinf*` families) gives four half-infinite recurrences,
//! one per exponent branch. Each recurrence reads
//!
//! ```text
//! sub_n c_{n-1} + diag_n c_n + sup_n c_{n+1} = lambda c_n,   lambda = z^2,
//! ```
//!
//! so eigenvalues of the truncated operators approximate points of the Lax
//! spectrum through lambda = z^2.
//!
//! Three of the half-infinite families admit an exact diagonal similarity to a
//! real symmetric matrix; those run through a hand-written implicit-shift QL
//! solver. `ToPlus` (and generally `Bnu`) have sign-indefinite off-diagonal
//! products, so they fall back to a balanced dense solver. Keeping the two
//! paths independent lets the symmetrizable families cross-check the dense
//! solver and vice versa.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::elliptic::EllipticParameter;
use crate::{C64, Error, Result};

/// First truncation size tried by [`converged_eigenvalues`].
pub const N_START: usize = 32;

/// Largest truncation size before [`converged_eigenvalues`] gives up.
pub const N_MAX: usize = 4096;

/// Which of the five recurrence families a [`RecurrenceFamily`] denotes.
///
/// `Bnu` is the bi-infinite Fourier-mode family. The other four are the
/// half-infinite Frobenius families: `To*` expand about the inner singular
/// point of the scalar ODE, `Tinf*` about infinity; `Minus`/`Plus` selects
/// the exponent branch (A/2 versus -(A-1)/2 at the inner point, A/2 versus
/// -(A+1)/2 at infinity).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyTag {
    /// Bi-infinite Fourier-mode recurrence with offset nu.
    Bnu,
    /// Inner-point expansion, exponent A/2.
    ToMinus,
    /// Inner-point expansion, exponent -(A-1)/2.
    ToPlus,
    /// Expansion at infinity, exponent A/2.
    TinfMinus,
    /// Expansion at infinity, exponent -(A+1)/2.
    TinfPlus,
}

impl FamilyTag {
    /// True for the four half-infinite Frobenius families.
    pub fn is_half_infinite(self) -> bool {
        !matches!(self, FamilyTag::Bnu)
    }
}

/// One recurrence family at fixed potential parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceFamily {
    /// Which family.
    pub tag: FamilyTag,
    /// Floquet offset; meaningful only when `tag` is `Bnu`.
    pub nu: f64,
    /// Potential amplitude A.
    pub amplitude: f64,
    /// Elliptic parameter m.
    pub m: EllipticParameter,
}

impl RecurrenceFamily {
    /// Fourier-mode family with the offset normalized into [0, 1).
    ///
    /// Shifting nu by an integer relabels the rows of the bi-infinite
    /// operator without changing it, so the canonical representative keeps
    /// nu in [0, 1).
    pub fn bnu(amplitude: f64, nu: f64, m: EllipticParameter) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::Domain(format!("offset nu must be finite, got {nu}")));
        }
        Self::bnu_pinned(amplitude, nu - nu.floor(), m)
    }

    /// Fourier-mode family with nu kept exactly as given.
    ///
    /// Used when a particular row labeling matters, such as pinning
    /// nu = A/2 so the reducibility zeros land on explicit rows.
    pub fn bnu_pinned(amplitude: f64, nu: f64, m: EllipticParameter) -> Result<Self> {
        check_amplitude(amplitude)?;
        if !nu.is_finite() {
            return Err(Error::Domain(format!("offset nu must be finite, got {nu}")));
        }
        Ok(Self {
            tag: FamilyTag::Bnu,
            nu,
            amplitude,
            m,
        })
    }

    /// One of the four half-infinite Frobenius families.
    pub fn heun(tag: FamilyTag, amplitude: f64, m: EllipticParameter) -> Result<Self> {
        if tag == FamilyTag::Bnu {
            return Err(Error::Domain(
                "the Fourier-mode family needs an offset; use bnu or bnu_pinned".into(),
            ));
        }
        check_amplitude(amplitude)?;
        Ok(Self {
            tag,
            nu: 0.0,
            amplitude,
            m,
        })
    }
}

fn check_amplitude(amplitude: f64) -> Result<()> {
    if !amplitude.is_finite() || amplitude <= 0.0 {
        return Err(Error::Domain(format!(
            "amplitude must be positive and finite, got {amplitude}"
        )));
    }
    Ok(())
}

/// Finite window of a recurrence family as a tridiagonal matrix.
///
/// `sub[k]` couples row k+1 to column k, `sup[k]` couples row k to column
/// k+1. Entries come straight from the coefficient generators, so structural
/// zeros are exact. For the half-infinite families row k is recurrence index
/// k; for `Bnu` the window is centered, row k is recurrence index k - N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalSlice {
    /// Matrix dimension.
    pub size: usize,
    /// Sub-diagonal, length `size - 1`.
    pub sub: Vec<f64>,
    /// Diagonal, length `size`.
    pub diag: Vec<f64>,
    /// Super-diagonal, length `size - 1`.
    pub sup: Vec<f64>,
    /// Boundary relation of the first row: (diag[0], sup[0]).
    pub first_row_pair: (f64, f64),
}

/// Eigenvalues of one truncation, sorted by (real part, imaginary part).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenList {
    /// Eigenvalues in (re, im) order.
    #[serde(with = "crate::complex_parts::vec")]
    pub values: Vec<C64>,
    /// Truncation parameter that produced them.
    pub n_used: usize,
    /// How many leading values passed the doubling Cauchy test; zero for a
    /// single fixed-size solve.
    pub converged_count: usize,
}

/// Fourier-mode coefficients (alpha_n, beta_n, gamma_n) at row n.
///
/// ```text
/// alpha_n = -m/4 [A - (2n + 2nu - 2)][A + (2n + 2nu - 1)]
/// beta_n  = (1 - m/2) [(2n + 2nu)^2 - A^2]
/// gamma_n = -m/4 [A - (2n + 2nu + 2)][A + (2n + 2nu + 1)]
/// ```
///
/// alpha is the sub-diagonal entry, beta the diagonal, gamma the
/// super-diagonal.
pub fn bnu_coefficients(fam: &RecurrenceFamily, n: i64) -> (f64, f64, f64) {
    assert!(
        fam.tag == FamilyTag::Bnu,
        "bnu_coefficients requires the Fourier-mode family, got {:?}",
        fam.tag
    );
    let a = fam.amplitude;
    let m = fam.m.value();
    let t = 2.0 * n as f64 + 2.0 * fam.nu;
    let alpha = -0.25 * m * (a - (t - 2.0)) * (a + (t - 1.0));
    let beta = (1.0 - 0.5 * m) * (t * t - a * a);
    let gamma = -0.25 * m * (a - (t + 2.0)) * (a + (t + 1.0));
    (alpha, beta, gamma)
}

/// Frobenius-family coefficients (sub_n, diag_n, sup_n) at row n >= 0.
///
/// The boundary relation of row 0 uses only (diag_0, sup_0); the sub_0 value
/// is still returned for completeness but never enters a matrix.
pub fn heun_coefficients(fam: &RecurrenceFamily, n: usize) -> (f64, f64, f64) {
    assert!(
        fam.tag.is_half_infinite(),
        "heun_coefficients requires a Frobenius family, got {:?}",
        fam.tag
    );
    let a = fam.amplitude;
    let h = 0.5 * fam.m.value();
    let nf = n as f64;
    match fam.tag {
        FamilyTag::ToMinus => (
            h * (nf - 1.0) * (2.0 * a + 2.0 * nf - 1.0),
            (1.0 - h) * ((a + 2.0 * nf) * (a + 2.0 * nf) - a * a),
            h * (nf + 1.0) * (2.0 * a + 2.0 * nf + 1.0),
        ),
        FamilyTag::ToPlus => (
            -h * nf * (2.0 * a - 2.0 * nf + 1.0),
            (1.0 - h) * ((2.0 * nf + 1.0 - a) * (2.0 * nf + 1.0 - a) - a * a),
            -h * (nf + 1.0) * (2.0 * a - 2.0 * nf - 3.0),
        ),
        FamilyTag::TinfMinus => (
            -h * (nf - 1.0) * (2.0 * a - 2.0 * nf + 1.0),
            (1.0 - h) * ((2.0 * nf - a) * (2.0 * nf - a) - a * a),
            -h * (nf + 1.0) * (2.0 * a - 2.0 * nf - 1.0),
        ),
        FamilyTag::TinfPlus => (
            h * nf * (2.0 * a + 2.0 * nf - 1.0),
            (1.0 - h) * ((2.0 * nf + 1.0 + a) * (2.0 * nf + 1.0 + a) - a * a),
            h * (nf + 1.0) * (2.0 * a + 2.0 * nf + 3.0),
        ),
        FamilyTag::Bnu => unreachable!(),
    }
}

/// Truncated window of a family.
///
/// Half-infinite families keep rows 0..n (an n x n matrix); the Fourier
/// family keeps the centered window -n..=n (a (2n+1) x (2n+1) matrix).
pub fn truncate(fam: &RecurrenceFamily, n: usize) -> Result<TridiagonalSlice> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "truncation size must be at least 2, got {n}"
        )));
    }
    let (size, lo) = match fam.tag {
        FamilyTag::Bnu => (2 * n + 1, -(n as i64)),
        _ => (n, 0),
    };
    let mut sub = Vec::with_capacity(size - 1);
    let mut diag = Vec::with_capacity(size);
    let mut sup = Vec::with_capacity(size - 1);
    for i in 0..size {
        let row = lo + i as i64;
        let (s, d, p) = match fam.tag {
            FamilyTag::Bnu => bnu_coefficients(fam, row),
            _ => heun_coefficients(fam, row as usize),
        };
        if i > 0 {
            sub.push(s);
        }
        diag.push(d);
        if i + 1 < size {
            sup.push(p);
        }
    }
    let first_row_pair = (diag[0], sup[0]);
    Ok(TridiagonalSlice {
        size,
        sub,
        diag,
        sup,
        first_row_pair,
    })
}

/// Diagonal similarity onto a symmetric matrix with off-diagonal entries
/// sqrt(sub_k * sup_k); the spectrum is preserved exactly.
///
/// A zero product acts as a block cut: the original matrix is then block
/// triangular and the symmetrized one block diagonal with the same blocks,
/// so the spectrum is still preserved. A negative product means no real
/// similarity exists; the error reports the slice row index k+1 of the
/// offending pair, which equals the recurrence index for the half-infinite
/// families.
pub fn symmetrize(slice: &TridiagonalSlice) -> Result<TridiagonalSlice> {
    let mut off = Vec::with_capacity(slice.sub.len());
    for (k, (&s, &p)) in slice.sub.iter().zip(&slice.sup).enumerate() {
        let product = s * p;
        if product < 0.0 {
            return Err(Error::NegativeProduct { index: k + 1 });
        }
        off.push(product.sqrt());
    }
    let first_row_pair = (slice.diag[0], off.first().copied().unwrap_or(0.0));
    Ok(TridiagonalSlice {
        size: slice.size,
        sub: off.clone(),
        diag: slice.diag.clone(),
        sup: off,
        first_row_pair,
    })
}

/// All eigenvalues of the symmetric tridiagonal matrix (diag, off) by the
/// implicit-shift QL iteration, ascending.
///
/// Exact zeros on the off-diagonal deflate immediately, so an isolated zero
/// diagonal block survives as the exact eigenvalue 0.
fn symmetric_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n, "off-diagonal length must be size - 1");
    let mut d = diag.to_vec();
    let mut e = Vec::with_capacity(n);
    e.extend_from_slice(off);
    e.push(0.0);

    for l in 0..n {
        let mut sweeps = 0usize;
        loop {
            // find the block end: first negligible subdiagonal at or after l
            let mut m_end = l;
            while m_end < n - 1 {
                let dd = d[m_end].abs() + d[m_end + 1].abs();
                if e[m_end].abs() <= f64::EPSILON * dd {
                    break;
                }
                m_end += 1;
            }
            if m_end == l {
                break;
            }
            sweeps += 1;
            if sweeps > 64 {
                return Err(Error::Numerical(format!(
                    "QL iteration stalled at row {l} of a {n} x {n} matrix"
                )));
            }

            // Wilkinson-style shift from the leading 2x2, then one implicit
            // QL sweep of plane rotations from the block end back to l
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m_end] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m_end).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m_end] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m_end] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Parlett-Reinsch balancing by powers of two; a similarity, so eigenvalues
/// are unchanged while row and column norms equalize.
fn balance_in_place(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix: f64 = 2.0;
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c: f64 = 0.0;
            let mut r: f64 = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let s = c + r;
                let mut f = 1.0;
                let mut g = r / radix;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let ginv = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= ginv;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// All eigenvalues of a slice via the balanced dense solver, in (re, im)
/// order. This is the fallback for families without a real symmetrization
/// and the independent cross-check for those with one.
pub fn dense_eigenvalues(slice: &TridiagonalSlice) -> Vec<C64> {
    let n = slice.size;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = slice.diag[i];
        if i + 1 < n {
            a[(i, i + 1)] = slice.sup[i];
            a[(i + 1, i)] = slice.sub[i];
        }
    }
    balance_in_place(&mut a);
    let mut values: Vec<C64> = a.complex_eigenvalues().iter().copied().collect();
    sort_by_re_im(&mut values);
    values
}

fn sort_by_re_im(values: &mut [C64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// All eigenvalues of the size-n truncation.
///
/// Symmetrizable slices go through the QL path and come back exactly real;
/// the rest go through the dense path and keep whatever imaginary parts the
/// solver reports, so reality is observable rather than enforced.
pub fn eigenvalues_truncated(fam: &RecurrenceFamily, n: usize) -> Result<EigenList> {
    let slice = truncate(fam, n)?;
    let mut values = match symmetrize(&slice) {
        Ok(sym) => symmetric_tridiagonal_eigenvalues(&sym.diag, &sym.sub)?
            .into_iter()
            .map(C64::from)
            .collect::<Vec<_>>(),
        Err(Error::NegativeProduct { .. }) => dense_eigenvalues(&slice),
        Err(e) => return Err(e),
    };
    sort_by_re_im(&mut values);
    Ok(EigenList {
        values,
        n_used: n,
        converged_count: 0,
    })
}

/// The k eigenvalues of smallest modulus, returned in (re, im) order.
fn k_smallest_by_modulus(values: &[C64], k: usize) -> Vec<C64> {
    let mut picked = values.to_vec();
    picked.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then(a.re.total_cmp(&b.re))
            .then(a.im.total_cmp(&b.im))
    });
    picked.truncate(k.min(picked.len()));
    sort_by_re_im(&mut picked);
    picked
}

/// Largest distance from any member of `prev` to its nearest neighbor in
/// `cur`; ties in the pairing are immaterial because only the max matters.
fn pairing_movement(prev: &[C64], cur: &[C64]) -> f64 {
    prev.iter()
        .map(|p| {
            cur.iter()
                .map(|c| (p - c).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// The k smallest-modulus eigenvalues, with the truncation size doubled from
/// 32 until they stop moving by more than `tol` between doublings.
pub fn converged_eigenvalues(fam: &RecurrenceFamily, k: usize, tol: f64) -> Result<EigenList> {
    if k == 0 {
        return Err(Error::Domain("need at least one eigenvalue requested".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }

    let mut n = N_START;
    let mut prev = k_smallest_by_modulus(&eigenvalues_truncated(fam, n)?.values, k);
    let mut movement = f64::INFINITY;
    while n < N_MAX {
        n *= 2;
        let cur = k_smallest_by_modulus(&eigenvalues_truncated(fam, n)?.values, k);
        movement = pairing_movement(&prev, &cur);
        if movement < tol {
            return Ok(EigenList {
                values: cur,
                n_used: n,
                converged_count: k,
            });
        }
        prev = cur;
    }
    Err(Error::NoConvergence {
        k,
        n_used: n,
        movement,
    })
}

/// Eigenvalue-reality certificate for the `ToPlus` truncation: the transpose
/// must be irreducibly diagonally dominant and the off-diagonal products must
/// carry the same signs as the neighboring diagonal products.
///
/// Only integer amplitudes qualify; the certificate's hypotheses fail
/// structurally otherwise, so non-integer input is a domain error rather
/// than a `false`.
pub fn veselic_check(fam: &RecurrenceFamily, n: usize) -> Result<bool> {
    if fam.tag != FamilyTag::ToPlus {
        return Err(Error::Domain(format!(
            "the reality certificate applies to ToPlus only, got {:?}",
            fam.tag
        )));
    }
    let a = fam.amplitude;
    if (a - a.round()).abs() > 1e-9 || a.round() < 1.0 {
        return Err(Error::Domain(format!(
            "the reality certificate requires a positive integer amplitude, got {a}"
        )));
    }
    let slice = truncate(fam, n)?;

    // irreducibility: every coupling in the window must be nonzero
    if slice.sub.iter().chain(&slice.sup).any(|&v| v == 0.0) {
        return Ok(false);
    }

    // transpose row dominance: row k of the transpose holds sup[k-1] and
    // sub[k]; require >= everywhere and strict somewhere
    let mut strict = false;
    for k in 0..slice.size {
        let mut offsum = 0.0;
        if k > 0 {
            offsum += slice.sup[k - 1].abs();
        }
        if k < slice.size - 1 {
            offsum += slice.sub[k].abs();
        }
        let dk = slice.diag[k].abs();
        if dk < offsum {
            return Ok(false);
        }
        if dk > offsum {
            strict = true;
        }
    }
    if !strict {
        return Ok(false);
    }

    // sign condition: sign(sub_k * sup_{k-1}) = sign(diag_k * diag_{k-1})
    for k in 1..slice.size {
        let offprod = slice.sub[k - 1] * slice.sup[k - 1];
        let diagprod = slice.diag[k] * slice.diag[k - 1];
        if offprod == 0.0 || diagprod == 0.0 || (offprod > 0.0) != (diagprod > 0.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which entry of a Fourier-mode row an integer zero lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntryKind {
    /// Sub-diagonal (alpha) zero.
    Sub,
    /// Diagonal (beta) zero.
    Diag,
    /// Super-diagonal (gamma) zero.
    Sup,
}

/// Integer rows where a Fourier-mode coefficient vanishes identically, as
/// (entry, row) pairs sorted by row then entry.
///
/// The closed-form zero conditions are
///
/// ```text
/// alpha_n = 0  at n = A/2 + 1 - nu   or  n = -A/2 + 1/2 - nu
/// gamma_n = 0  at n = A/2 - 1 - nu   or  n = -A/2 - 1/2 - nu
/// beta_n  = 0  at n = -nu + A/2      or  n = -nu - A/2
/// ```
///
/// and only integer solutions produce an actual zero entry. An empty list
/// means the bi-infinite operator is irreducible.
pub fn reducibility_indices(amplitude: f64, nu: f64) -> Vec<(EntryKind, i64)> {
    let half = amplitude / 2.0;
    let candidates = [
        (EntryKind::Sub, half + 1.0 - nu),
        (EntryKind::Sub, -half + 0.5 - nu),
        (EntryKind::Sup, half - 1.0 - nu),
        (EntryKind::Sup, -half - 0.5 - nu),
        (EntryKind::Diag, -nu + half),
        (EntryKind::Diag, -nu - half),
    ];
    let mut found: Vec<(EntryKind, i64)> = candidates
        .into_iter()
        .filter(|(_, x)| (x - x.round()).abs() <= 1e-9)
        .map(|(kind, x)| (kind, x.round() as i64))
        .collect();
    found.sort_by_key(|&(kind, n)| (n, kind));
    found.dedup();
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(v: f64) -> EllipticParameter {
        EllipticParameter::new(v).expect("valid parameter")
    }

    fn heun_fam(tag: FamilyTag, a: f64, mv: f64) -> RecurrenceFamily {
        RecurrenceFamily::heun(tag, a, m(mv)).expect("valid family")
    }

    const HEUN_TAGS: [FamilyTag; 4] = [
        FamilyTag::ToMinus,
        FamilyTag::ToPlus,
        FamilyTag::TinfMinus,
        FamilyTag::TinfPlus,
    ];

    #[test]
    fn fourier_coefficients_reference_values() {
        // alpha_0 vanishes for A=1, nu=0
        let fam = RecurrenceFamily::bnu(1.0, 0.0, m(0.5)).expect("valid");
        let (alpha, _, _) = bnu_coefficients(&fam, 0);
        assert_eq!(alpha, 0.0);

        // beta_0 vanishes when 2nu = A
        let fam = RecurrenceFamily::bnu_pinned(2.0, 1.0, m(0.3)).expect("valid");
        let (_, beta, _) = bnu_coefficients(&fam, 0);
        assert_eq!(beta, 0.0);

        // hand-evaluated alpha_1 at A=2, nu=0.5, m=0.8
        let fam = RecurrenceFamily::bnu_pinned(2.0, 0.5, m(0.8)).expect("valid");
        let (alpha, _, _) = bnu_coefficients(&fam, 1);
        assert!((alpha + 0.8).abs() < 1e-14, "alpha_1 = {alpha}");
    }

    #[test]
    fn offset_normalization_wraps_into_unit_interval() {
        let fam = RecurrenceFamily::bnu(1.0, 2.75, m(0.5)).expect("valid");
        assert!((fam.nu - 0.75).abs() < 1e-12);
        let fam = RecurrenceFamily::bnu(1.0, -0.25, m(0.5)).expect("valid");
        assert!((fam.nu - 0.75).abs() < 1e-12);
        // pinned keeps the caller's labeling
        let fam = RecurrenceFamily::bnu_pinned(3.0, 1.5, m(0.5)).expect("valid");
        assert_eq!(fam.nu, 1.5);
    }

    #[test]
    fn frobenius_coefficients_reference_values() {
        let fam = heun_fam(FamilyTag::ToMinus, 1.0, 0.5);
        let (_, r0, s0) = heun_coefficients(&fam, 0);
        assert_eq!(r0, 0.0);
        assert!((s0 - 0.75).abs() < 1e-15, "s0 = {s0}");
        // row 1 sub entry is a structural zero: first column of the window
        let (p1, _, _) = heun_coefficients(&fam, 1);
        assert_eq!(p1, 0.0);

        let fam = heun_fam(FamilyTag::TinfPlus, 1.0, 0.5);
        let (_, y0, z0) = heun_coefficients(&fam, 0);
        assert!((y0 - 2.25).abs() < 1e-15, "y0 = {y0}");
        assert!((z0 - 1.25).abs() < 1e-15, "z0 = {z0}");

        let fam = heun_fam(FamilyTag::TinfMinus, 2.0, 0.5);
        let (_, y0, _) = heun_coefficients(&fam, 0);
        assert_eq!(y0, 0.0);
        let (x1, _, _) = heun_coefficients(&fam, 1);
        assert_eq!(x1, 0.0);
    }

    #[test]
    fn off_diagonal_product_flips_sign_exactly_at_integer_amplitude() {
        for a in 1..=4u32 {
            let fam = heun_fam(FamilyTag::ToPlus, a as f64, 0.5);
            for n in 1..20usize {
                let (sub_n, _, _) = heun_coefficients(&fam, n);
                let (_, _, sup_prev) = heun_coefficients(&fam, n - 1);
                let product = sub_n * sup_prev;
                if n == a as usize {
                    assert!(product < 0.0, "A={a}, n={n}: product {product}");
                } else {
                    assert!(product > 0.0, "A={a}, n={n}: product {product}");
                }
            }
        }
    }

    #[test]
    fn truncation_shapes_and_structural_zeros() {
        // first column of the ToMinus window is identically zero
        let fam = heun_fam(FamilyTag::ToMinus, 1.0, 0.5);
        let slice = truncate(&fam, 3).expect("valid size");
        assert_eq!(slice.size, 3);
        assert_eq!(slice.diag[0], 0.0);
        assert_eq!(slice.sub[0], 0.0);
        assert_eq!(slice.first_row_pair, (0.0, 0.75));

        // smallest window reproduces the generators entrywise
        let fam = heun_fam(FamilyTag::TinfMinus, 2.0, 0.5);
        let slice = truncate(&fam, 2).expect("valid size");
        let (_, y0, z0) = heun_coefficients(&fam, 0);
        let (x1, y1, _) = heun_coefficients(&fam, 1);
        assert_eq!(slice.diag, vec![y0, y1]);
        assert_eq!(slice.sup, vec![z0]);
        assert_eq!(slice.sub, vec![x1]);

        // centered Fourier window: row k holds recurrence index k - n
        let fam = RecurrenceFamily::bnu(1.0, 0.0, m(0.5)).expect("valid");
        let slice = truncate(&fam, 5).expect("valid size");
        assert_eq!(slice.size, 11);
        for i in 0..11 {
            let global = i as i64 - 5;
            let (alpha, beta, gamma) = bnu_coefficients(&fam, global);
            assert_eq!(slice.diag[i], beta, "row {global}");
            if i > 0 {
                assert_eq!(slice.sub[i - 1], alpha, "row {global}");
            }
            if i < 10 {
                assert_eq!(slice.sup[i], gamma, "row {global}");
            }
        }
        // the alpha zero at recurrence index 0 sits at slice row 5
        assert_eq!(slice.sub[4], 0.0);

        assert!(truncate(&fam, 1).is_err());
    }

    #[test]
    fn symmetrization_succeeds_and_preserves_spectrum() {
        let fam = heun_fam(FamilyTag::TinfPlus, 2.0, 0.5);
        let slice = truncate(&fam, 50).expect("valid size");
        let sym = symmetrize(&slice).expect("products nonnegative");
        assert_eq!(sym.sub, sym.sup);

        let from_ql = symmetric_tridiagonal_eigenvalues(&sym.diag, &sym.sub).expect("converges");
        let from_dense = dense_eigenvalues(&slice);
        let scale = 1.0 + from_ql.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        for (ql, dn) in from_ql.iter().zip(&from_dense) {
            assert!(
                (C64::from(*ql) - dn).norm() <= 1e-10 * scale,
                "ql {ql} vs dense {dn}"
            );
        }
    }

    #[test]
    fn symmetrization_fails_at_the_amplitude_row() {
        for a in [2usize, 3] {
            let fam = heun_fam(FamilyTag::ToPlus, a as f64, 0.5);
            let slice = truncate(&fam, 50).expect("valid size");
            match symmetrize(&slice) {
                Err(Error::NegativeProduct { index }) => {
                    assert_eq!(index, a, "A={a}");
                }
                other => panic!("expected a negative-product failure, got {other:?}"),
            }
        }
    }

    #[test]
    fn symmetrization_of_diagonal_slice_is_identity() {
        // m=0 makes every coupling vanish identically
        let fam = heun_fam(FamilyTag::ToPlus, 2.0, 0.0);
        let slice = truncate(&fam, 6).expect("valid size");
        assert!(slice.sub.iter().all(|&v| v == 0.0));
        let sym = symmetrize(&slice).expect("zero products are fine");
        assert_eq!(sym, slice);
    }

    #[test]
    fn ql_path_matches_dense_path_on_symmetrizable_families() {
        for tag in [FamilyTag::ToMinus, FamilyTag::TinfMinus, FamilyTag::TinfPlus] {
            let fam = heun_fam(tag, 2.0, 0.7);
            let list = eigenvalues_truncated(&fam, 40).expect("solver converges");
            let dense = dense_eigenvalues(&truncate(&fam, 40).expect("valid size"));
            let scale = 1.0 + list.values.iter().fold(0.0f64, |a, v| a.max(v.norm()));
            for (ql, dn) in list.values.iter().zip(&dense) {
                assert!(
                    (ql - dn).norm() <= 1e-9 * scale,
                    "{tag:?}: ql {ql} vs dense {dn}"
                );
            }
        }
    }

    #[test]
    fn truncated_spectra_reference_structure() {
        // the inner-point A/2 family always contains the exact eigenvalue 0
        for a in [1.0, 2.0] {
            let fam = heun_fam(FamilyTag::ToMinus, a, 0.5);
            let list = eigenvalues_truncated(&fam, 32).expect("solver converges");
            assert!(
                list.values.iter().any(|v| v.norm() == 0.0),
                "A={a}: no exact zero in {:?}",
                &list.values[..3]
            );
        }

        // the infinity -(A+1)/2 family is nonnegative
        let fam = heun_fam(FamilyTag::TinfPlus, 1.0, 0.5);
        let list = eigenvalues_truncated(&fam, 64).expect("solver converges");
        assert!(list.values.iter().all(|v| v.re >= -1e-10));

        // the inner-point -(A-1)/2 family: all real and distinct
        let fam = heun_fam(FamilyTag::ToPlus, 3.0, 0.5);
        let list = eigenvalues_truncated(&fam, 64).expect("solver converges");
        assert_eq!(list.values.len(), 64);
        let scale = 1.0 + list.values.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        for v in &list.values {
            assert!(v.im.abs() <= 1e-8 * scale, "nonreal eigenvalue {v}");
        }
        for pair in list.values.windows(2) {
            assert!(
                pair[1].re - pair[0].re > 1e-8 * scale,
                "eigenvalues not distinct: {} vs {}",
                pair[0],
                pair[1]
            );
        }
    }

    #[test]
    fn reality_holds_across_the_parameter_grid() {
        for tag in HEUN_TAGS {
            for a in 1..=5u32 {
                for mv in [0.1, 0.5, 0.9] {
                    for n in [32usize, 128] {
                        let fam = heun_fam(tag, a as f64, mv);
                        let list = eigenvalues_truncated(&fam, n).expect("solver converges");
                        let radius =
                            list.values.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
                        let worst =
                            list.values.iter().fold(0.0f64, |acc, v| acc.max(v.im.abs()));
                        assert!(
                            worst <= 1e-8 * (1.0 + radius),
                            "{tag:?}, A={a}, m={mv}, N={n}: max |Im| = {worst:e}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn nonnegativity_across_the_parameter_grid() {
        for tag in [FamilyTag::ToMinus, FamilyTag::TinfPlus] {
            for a in 1..=5u32 {
                for mv in [0.1, 0.5, 0.9] {
                    let fam = heun_fam(tag, a as f64, mv);
                    let list = eigenvalues_truncated(&fam, 64).expect("solver converges");
                    let radius = list.values.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
                    let min_re = list.values.iter().fold(f64::INFINITY, |acc, v| acc.min(v.re));
                    assert!(
                        min_re >= -1e-9 * (1.0 + radius),
                        "{tag:?}, A={a}, m={mv}: min Re = {min_re:e}"
                    );
                }
            }
        }
    }

    #[test]
    fn diagonal_limit_reproduces_integer_spacing() {
        // at m=0 every family is diagonal: lambda = k^2 - A^2 with k stepping
        // by 2 through the family's own arithmetic progression
        let a = 2.0;
        let cases = [
            (FamilyTag::ToMinus, 2i64, 2),  // k = A + 2n
            (FamilyTag::ToPlus, -1, 2),     // k = 2n + 1 - A
            (FamilyTag::TinfMinus, -2, 2),  // k = 2n - A
            (FamilyTag::TinfPlus, 3, 2),    // k = 2n + 1 + A
        ];
        for (tag, k0, step) in cases {
            let fam = heun_fam(tag, a, 0.0);
            let list = converged_eigenvalues(&fam, 5, 1e-9).expect("diagonal case converges");
            let mut expected: Vec<f64> = (0..64)
                .map(|n| {
                    let k = (k0 + step * n) as f64;
                    k * k - a * a
                })
                .collect();
            expected.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
            expected.truncate(5);
            expected.sort_by(f64::total_cmp);
            for (got, want) in list.values.iter().zip(&expected) {
                assert!(
                    (got - C64::from(*want)).norm() <= 1e-7,
                    "{tag:?}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn small_m_limit_is_continuous() {
        // A=2: the two smallest ToPlus eigenvalues collapse to the double
        // point -3 as m -> 0
        let fam = heun_fam(FamilyTag::ToPlus, 2.0, 1e-6);
        let list = converged_eigenvalues(&fam, 2, 1e-8).expect("near-diagonal case converges");
        for v in &list.values {
            assert!((v - C64::from(-3.0)).norm() < 1e-4, "value {v}");
        }
    }

    #[test]
    fn converged_zero_stays_exact() {
        let fam = heun_fam(FamilyTag::ToMinus, 1.0, 0.5);
        let list = converged_eigenvalues(&fam, 3, 1e-8).expect("converges");
        assert_eq!(list.converged_count, 3);
        assert!(list.n_used >= 64);
        assert_eq!(list.values[0], C64::from(0.0));
    }

    #[test]
    fn fourier_window_splits_into_blocks_at_pinned_offset() {
        // at nu = A/2 the column through recurrence index 0 vanishes, so the
        // centered window decomposes exactly into the two one-sided blocks
        // plus the eigenvalue 0
        for a in [1.0, 2.0] {
            let fam = RecurrenceFamily::bnu_pinned(a, a / 2.0, m(0.5)).expect("valid");
            let half = 24usize;
            let full = truncate(&fam, half).expect("valid size");

            // the three structural zeros that cut the column
            let center = half; // slice row of recurrence index 0
            assert_eq!(full.diag[center], 0.0);
            assert_eq!(full.sub[center], 0.0); // row center+1 <- column center
            assert_eq!(full.sup[center - 1], 0.0); // row center-1 -> column center

            let side = |lo: i64, hi: i64| -> TridiagonalSlice {
                let size = (hi - lo + 1) as usize;
                let mut sub = Vec::new();
                let mut diag = Vec::new();
                let mut sup = Vec::new();
                for (i, row) in (lo..=hi).enumerate() {
                    let (al, be, ga) = bnu_coefficients(&fam, row);
                    if i > 0 {
                        sub.push(al);
                    }
                    diag.push(be);
                    if i + 1 < size {
                        sup.push(ga);
                    }
                }
                let first_row_pair = (diag[0], sup[0]);
                TridiagonalSlice {
                    size,
                    sub,
                    diag,
                    sup,
                    first_row_pair,
                }
            };

            let mut union = dense_eigenvalues(&side(-(half as i64), -1));
            union.extend(dense_eigenvalues(&side(1, half as i64)));
            union.push(C64::from(0.0));

            let full_values = dense_eigenvalues(&full);
            let a_side = k_smallest_by_modulus(&full_values, 10);
            let b_side = k_smallest_by_modulus(&union, 10);
            for (x, y) in a_side.iter().zip(&b_side) {
                assert!((x - y).norm() <= 1e-7, "A={a}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn reality_certificate_reference_cases() {
        for a in 1..=5u32 {
            let fam = heun_fam(FamilyTag::ToPlus, a as f64, 0.5);
            assert!(veselic_check(&fam, 100).expect("integer amplitude"), "A={a}");
        }
        let fam = heun_fam(FamilyTag::ToPlus, 1.0, 0.99);
        assert!(veselic_check(&fam, 100).expect("integer amplitude"));

        let fam = heun_fam(FamilyTag::ToPlus, 2.5, 0.5);
        assert!(matches!(veselic_check(&fam, 100), Err(Error::Domain(_))));

        let fam = heun_fam(FamilyTag::ToMinus, 2.0, 0.5);
        assert!(matches!(veselic_check(&fam, 100), Err(Error::Domain(_))));
    }

    #[test]
    fn reducibility_reference_cases() {
        // A=2, nu=1: zeros on both diagonal candidates and both couplings
        let found = reducibility_indices(2.0, 1.0);
        assert!(found.contains(&(EntryKind::Sup, -1)));
        assert!(found.contains(&(EntryKind::Diag, 0)));
        assert!(found.contains(&(EntryKind::Diag, -2)));
        assert!(found.contains(&(EntryKind::Sub, 1)));
        assert_eq!(found.len(), 4);

        // A=3, nu=(1-A)/2: the block-split pattern
        let found = reducibility_indices(3.0, -1.0);
        assert_eq!(found, vec![(EntryKind::Sup, -1), (EntryKind::Sub, 0)]);

        // no integer solutions
        assert!(reducibility_indices(2.5, 0.0).is_empty());
    }

    #[test]
    fn reducibility_indices_match_brute_force_scan() {
        for &(a, nu) in &[(1.0, 0.0), (2.0, 1.0), (3.0, -1.0), (4.0, 2.0), (1.0, 0.5)] {
            let fam = RecurrenceFamily::bnu_pinned(a, nu, m(0.5)).expect("valid");
            let found = reducibility_indices(a, nu);
            for n in -12..=12i64 {
                let (alpha, beta, gamma) = bnu_coefficients(&fam, n);
                let expect_alpha = found.contains(&(EntryKind::Sub, n));
                let expect_beta = found.contains(&(EntryKind::Diag, n));
                let expect_gamma = found.contains(&(EntryKind::Sup, n));
                assert_eq!(alpha == 0.0, expect_alpha, "alpha at A={a}, nu={nu}, n={n}");
                assert_eq!(beta == 0.0, expect_beta, "beta at A={a}, nu={nu}, n={n}");
                assert_eq!(gamma == 0.0, expect_gamma, "gamma at A={a}, nu={nu}, n={n}");
            }
        }
    }

    #[test]
    fn family_constructors_validate_input() {
        assert!(RecurrenceFamily::heun(FamilyTag::Bnu, 1.0, m(0.5)).is_err());
        assert!(RecurrenceFamily::heun(FamilyTag::ToPlus, 0.0, m(0.5)).is_err());
        assert!(RecurrenceFamily::heun(FamilyTag::ToPlus, -1.0, m(0.5)).is_err());
        assert!(RecurrenceFamily::bnu(1.0, f64::NAN, m(0.5)).is_err());
        assert!(converged_eigenvalues(&heun_fam(FamilyTag::ToPlus, 1.0, 0.5), 0, 1e-8).is_err());
        assert!(converged_eigenvalues(&heun_fam(FamilyTag::ToPlus, 1.0, 0.5), 2, 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ql_agrees_with_dense_solver_on_random_symmetric_matrices(
            diag in prop::collection::vec(-5.0f64..5.0, 2..12),
            seed in prop::collection::vec(-3.0f64..3.0, 11),
        ) {
            let n = diag.len();
            let off: Vec<f64> = seed[..n - 1].to_vec();
            let slice = TridiagonalSlice {
                size: n,
                sub: off.clone(),
                diag: diag.clone(),
                sup: off.clone(),
                first_row_pair: (diag[0], off[0]),
            };
            let ql = symmetric_tridiagonal_eigenvalues(&diag, &off).expect("converges");
            let dense = dense_eigenvalues(&slice);
            let scale = 1.0 + ql.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for (q, d) in ql.iter().zip(&dense) {
                prop_assert!((C64::from(*q) - d).norm() <= 1e-9 * scale,
                    "ql {} vs dense {}", q, d);
            }
        }

        #[test]
        fn symmetrization_preserves_dense_spectrum(
            diag in prop::collection::vec(-5.0f64..5.0, 2..10),
            subs in prop::collection::vec(-2.0f64..2.0, 9),
            ratios in prop::collection::vec(0.1f64..3.0, 9),
        ) {
            let n = diag.len();
            let sub: Vec<f64> = subs[..n - 1].to_vec();
            let sup: Vec<f64> = sub.iter().zip(&ratios).map(|(s, r)| s * r).collect();
            let slice = TridiagonalSlice {
                size: n,
                sub,
                diag: diag.clone(),
                sup: sup.clone(),
                first_row_pair: (diag[0], sup[0]),
            };
            let sym = symmetrize(&slice).expect("products nonnegative by construction");
            let original = dense_eigenvalues(&slice);
            let transformed = dense_eigenvalues(&sym);
            let scale = 1.0 + original.iter().fold(0.0f64, |a, v| a.max(v.norm()));
            for (x, y) in original.iter().zip(&transformed) {
                prop_assert!((x - y).norm() <= 1e-8 * scale, "{} vs {}", x, y);
            }
        }

        #[test]
        fn reported_reducibility_rows_really_vanish(
            a2 in 1u32..10, nu4 in -8i32..8,
        ) {
            let a = a2 as f64 / 2.0;
            let nu = nu4 as f64 / 4.0;
            let fam = RecurrenceFamily::bnu_pinned(a, nu, m(0.5)).expect("valid");
            for (kind, n) in reducibility_indices(a, nu) {
                let (alpha, beta, gamma) = bnu_coefficients(&fam, n);
                let value = match kind {
                    EntryKind::Sub => alpha,
                    EntryKind::Diag => beta,
                    EntryKind::Sup => gamma,
                };
                prop_assert!(value.abs() <= 1e-9, "{:?} at n={} is {}", kind, n, value);
            }
        }
    }
}
