//! Real-valued Fourier series on `(-l, l)`: mask functions, coefficients,
//! convergent sums and the Parseval-type identities the protocols rely on.

use thiserror::Error;

pub mod masks;
pub mod parseval;
pub mod quadrature;
pub mod series;
pub mod sums;

pub use masks::{QuarterWaveParams, QuarterWaveZeros};
pub use parseval::{
    adjudicate_convolution_law, convolution_coeffs, normalization_three, parseval_three, parseval_two,
    parseval_two_recast, ConvolutionLaw, LawAdjudication, NormalizedMaskPair, Summation,
};
pub use quadrature::HalfIntervalRule;
pub use series::{fourier_coeffs, integrate, FourierCoeffs, SeriesFunction, Term, Wave};
pub use sums::{convergent_sum, omega};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("half period must be positive and finite, got {0}")]
    InvalidHalfPeriod(f64),
    #[error("functions live on different domains: l = {0} vs l = {1}")]
    DomainMismatch(f64, f64),
    #[error("truncation order must be at least 1")]
    ZeroOrder,
    #[error("series has a pole at integer argument {0}")]
    Pole(f64),
    #[error("sum is degenerate for gamma = {0}, delta = {1} (gamma^2 = delta^2)")]
    DegenerateSum(f64, f64),
    #[error("masks are degenerate: normalization integral {0} is too close to zero")]
    DegenerateMasks(f64),
    #[error("exponent split must lie in (0, 1), got {0}")]
    InvalidExponent(f64),
}
