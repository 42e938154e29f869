//! Spectral toolkit for the non-self-adjoint Dirac (Zakharov-Shabat) operator
//! with the elliptic potential q(x) = A dn(x; m).
//!
//! The crate computes the Floquet discriminant, periodic/antiperiodic
//! eigenvalues, band and gap structure, and Dirichlet spectrum of
//!
//! ```text
//! phi_x = (-i z sigma3 + Q(x)) phi,   Q = ((0, q), (-q, 0)),   q = A dn(x; m)
//! ```
//!
//! by three independent routes that are cross-validated against each other:
//!
//! 1. direct integration of the monodromy matrix over one period,
//! 2. truncations of five tridiagonal operators (a bi-infinite Fourier
//!    recurrence and four half-infinite series recurrences),
//! 3. continued-fraction minimal-solution detection for the same recurrences.
//!
//! Everything is built on from-scratch Jacobi elliptic primitives in
//! [`elliptic`]. All operations are pure functions; the crate holds no
//! global state.

pub mod elliptic;
pub mod heun;
pub mod monodromy;
pub mod operator;
pub mod spectrum;
pub mod tridiag;

pub use elliptic::{EllipticParameter, EllipticValues};
pub use monodromy::MonodromyData;
pub use operator::{FloquetExponent, FloquetKind, PotentialSpec, SpectralPoint};
pub use spectrum::{BandEdge, DirichletRecord, SpectrumReport};
pub use tridiag::{EigenList, RecurrenceFamily};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Errors reported by the numerical routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument was outside the supported domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Diagonal symmetrization hit a negative sub*sup product and the
    /// similarity transform does not exist. `index` is the recurrence index
    /// n of the offending off-diagonal pair (n-1, n).
    #[error("symmetrization impossible: sub*sup < 0 at recurrence index {index}")]
    NegativeProduct { index: usize },

    /// Eigenvalue truncations kept moving after the size cap was reached.
    #[error(
        "eigenvalues not converged: k={k}, N reached {n_used}, last movement {movement:.3e}"
    )]
    NoConvergence { k: usize, n_used: usize, movement: f64 },

    /// A continued-fraction denominator vanished during backward recursion.
    #[error("continued fraction denominator near zero at level {level}")]
    SmallDenominator { level: usize },

    /// An iteration failed to reach its target accuracy.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Serde adapter fixing the interchange form of a complex number to a
/// `{re, im}` object instead of the `[re, im]` tuple the scalar type uses
/// natively. Apply with `#[serde(with = "complex_parts")]` on `C64` fields
/// and `#[serde(with = "complex_parts::vec")]` on `Vec<C64>` fields.
pub mod complex_parts {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &C64, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        Parts { re: z.re, im: z.im }.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<C64, D::Error> {
        let p = Parts::deserialize(deserializer)?;
        Ok(C64::new(p.re, p.im))
    }

    /// The same adapter for vectors of complex numbers.
    pub mod vec {
        use super::{Parts, C64};
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(
            zs: &[C64],
            serializer: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let parts: Vec<Parts> = zs.iter().map(|z| Parts { re: z.re, im: z.im }).collect();
            parts.serialize(serializer)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            deserializer: D,
        ) -> std::result::Result<Vec<C64>, D::Error> {
            let parts = Vec::<Parts>::deserialize(deserializer)?;
            Ok(parts.into_iter().map(|p| C64::new(p.re, p.im)).collect())
        }
    }
}
