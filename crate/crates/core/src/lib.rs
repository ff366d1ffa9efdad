//! Secret multiplication from Fourier series and Parseval's identity.
//!
//! Players mask their secrets with random functions; nodes receive Fourier
//! coefficients of the masked functions and output partial inner products
//! whose sum is the product of the secrets. The crate provides the exact
//! protocol over a prime field, the real-valued identities behind it, the
//! finite-field DFT used by the `n`-party variant, and a deterministic
//! simulator with statistical secrecy checks.

pub mod analytic;
pub mod dft;
pub mod field;
pub mod protocol;
pub mod simnet;
pub mod tagged;

pub use field::{FieldElement, FieldError, PrimeField};
pub use tagged::{TaggedError, TaggedScalar};
