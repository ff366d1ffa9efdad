//! The quarter-wave mask family `τ₁ sin(πx/4l) + τ₃ cos(3πx/4l)` and
//! `σ₁ sin(3πx/4l) + σ₃ cos(πx/4l)`, with closed-form coefficients, plus a
//! generator for random two-term masks.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use serde::Serialize;

use super::parseval::{signed_power, NormalizedMaskPair, DEGENERATE_THRESHOLD};
use super::series::{FourierCoeffs, SeriesFunction, Term};
use super::AnalyticError;

/// `4√2/(3π)`: constant coefficient of `cos(3πx/4l)`.
pub const ALICE_ZERO_FACTOR: f64 = 4.0 * SQRT_2 / (3.0 * PI);
/// `4√2/π`: constant coefficient of `cos(πx/4l)`.
pub const BOB_ZERO_FACTOR: f64 = 4.0 * SQRT_2 / PI;
/// `3π/16`, the common value of both node sums per unit product of zeros.
pub const NODE_FACTOR: f64 = 3.0 * PI / 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarterWaveParams {
    pub tau1: f64,
    pub tau3: f64,
    pub sigma1: f64,
    pub sigma3: f64,
    pub half_period: f64,
}

/// The four scalars a node needs: `(a₀, â₀)` from Alice, `(α₀, α̂₀)` from Bob.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarterWaveZeros {
    pub a0: f64,
    pub a0_hat: f64,
    pub alpha0: f64,
    pub alpha0_hat: f64,
}

impl QuarterWaveParams {
    pub fn new(tau1: f64, tau3: f64, sigma1: f64, sigma3: f64, half_period: f64) -> Result<Self, AnalyticError> {
        if !(half_period > 0.0 && half_period.is_finite()) {
            return Err(AnalyticError::InvalidHalfPeriod(half_period));
        }
        Ok(Self {
            tau1,
            tau3,
            sigma1,
            sigma3,
            half_period,
        })
    }

    /// Each parameter uniform in `[lo, hi)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64, half_period: f64) -> Result<Self, AnalyticError> {
        let mut draw = || rng.gen_range(lo..hi);
        let (t1, t3, s1, s3) = (draw(), draw(), draw(), draw());
        Self::new(t1, t3, s1, s3, half_period)
    }

    fn quarter(&self) -> f64 {
        PI / (4.0 * self.half_period)
    }

    pub fn phi(&self) -> SeriesFunction {
        let w = self.quarter();
        SeriesFunction::new(
            vec![Term::sin(self.tau1, w), Term::cos(self.tau3, 3.0 * w)],
            self.half_period,
        )
        .expect("half period checked at construction")
    }

    pub fn psi(&self) -> SeriesFunction {
        let w = self.quarter();
        SeriesFunction::new(
            vec![Term::sin(self.sigma1, 3.0 * w), Term::cos(self.sigma3, w)],
            self.half_period,
        )
        .expect("half period checked at construction")
    }

    /// `η = π / (2(τ₁σ₁ + τ₃σ₃))`.
    pub fn eta(&self) -> Result<f64, AnalyticError> {
        let inv = 2.0 * (self.tau1 * self.sigma1 + self.tau3 * self.sigma3) / PI;
        if inv.abs() < DEGENERATE_THRESHOLD {
            return Err(AnalyticError::DegenerateMasks(inv));
        }
        Ok(1.0 / inv)
    }

    pub fn normalized(&self, q: f64) -> Result<NormalizedMaskPair, AnalyticError> {
        NormalizedMaskPair::new(&self.phi(), &self.psi(), q)
    }

    /// Closed-form zeros of `f = a·η^q·φ` and `g = b·η^(1-q)·ψ`.
    pub fn zeros(&self, a: f64, b: f64, q: f64) -> Result<QuarterWaveZeros, AnalyticError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(AnalyticError::InvalidExponent(q));
        }
        let eta = self.eta()?;
        let na = signed_power(eta, q, true);
        let nb = signed_power(eta, 1.0 - q, false);
        Ok(QuarterWaveZeros {
            a0: ALICE_ZERO_FACTOR * a * self.tau3 * na,
            a0_hat: ALICE_ZERO_FACTOR * a * self.tau1 * na,
            alpha0: BOB_ZERO_FACTOR * b * self.sigma3 * nb,
            alpha0_hat: BOB_ZERO_FACTOR * b * self.sigma1 * nb,
        })
    }
}

fn sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `aₙ = 9(-1)ⁿa₀/(9 - 16n²)`, `bₙ = 12(-1)ⁿn·â₀/(1 - 16n²)`.
pub fn alice_closed_form(a0: f64, a0_hat: f64, order: usize) -> FourierCoeffs {
    let (mut cos, mut sin) = (Vec::with_capacity(order), Vec::with_capacity(order));
    for n in 1..=order {
        let (nf, s) = (n as f64, sign(n));
        cos.push(9.0 * s * a0 / (9.0 - 16.0 * nf * nf));
        sin.push(12.0 * s * nf * a0_hat / (1.0 - 16.0 * nf * nf));
    }
    FourierCoeffs::new(a0, cos, sin)
}

/// `αₙ = (-1)ⁿα₀/(1 - 16n²)`, `βₙ = 4(-1)ⁿn·α̂₀/(9 - 16n²)`.
pub fn bob_closed_form(alpha0: f64, alpha0_hat: f64, order: usize) -> FourierCoeffs {
    let (mut cos, mut sin) = (Vec::with_capacity(order), Vec::with_capacity(order));
    for n in 1..=order {
        let (nf, s) = (n as f64, sign(n));
        cos.push(s * alpha0 / (1.0 - 16.0 * nf * nf));
        sin.push(4.0 * s * nf * alpha0_hat / (9.0 - 16.0 * nf * nf));
    }
    FourierCoeffs::new(alpha0, cos, sin)
}

/// Upper bound on the truncation error of `a₀α₀/2 + Σ aₙαₙ + Σ bₙβₙ` at
/// `order` terms. Every summand is at most `(256/105)` times its large-`n`
/// form, which gives `(3/16)(256/105)|â₀α̂₀|/N + (9/256)(256/105)|a₀α₀|/(3N³)`.
pub fn quarter_wave_tail_bound(z: &QuarterWaveZeros, order: usize) -> f64 {
    if order == 0 {
        return f64::INFINITY;
    }
    let n = order as f64;
    let c = 256.0 / 105.0;
    (3.0 / 16.0) * c * (z.a0_hat * z.alpha0_hat).abs() / n
        + (9.0 / 256.0) * c * (z.a0 * z.alpha0).abs() / (3.0 * n * n * n)
}

/// `ξ₁ sin(ξ₂x) + ξ₃ cos(ξ₄x)` with amplitudes uniform in `[-1, 1)` and
/// angular frequencies uniform in `(0.1, 3)·π/l`.
pub fn random_two_term_mask<R: Rng + ?Sized>(rng: &mut R, half_period: f64) -> Result<SeriesFunction, AnalyticError> {
    let k = PI / half_period;
    let terms = vec![
        Term::sin(rng.gen_range(-1.0..1.0), k * rng.gen_range(0.1..3.0)),
        Term::cos(rng.gen_range(-1.0..1.0), k * rng.gen_range(0.1..3.0)),
    ];
    SeriesFunction::new(terms, half_period)
}

/// Sum of one to three harmonic cosines `cₖ cos(kπx/l)`, possibly with a
/// constant. These have finitely many nonzero coefficients.
pub fn random_harmonic_cosine_mask<R: Rng + ?Sized>(rng: &mut R, half_period: f64) -> Result<SeriesFunction, AnalyticError> {
    let k = PI / half_period;
    let count = rng.gen_range(1..=3);
    let terms = (0..count)
        .map(|_| Term::cos(rng.gen_range(-1.0..1.0), k * rng.gen_range(0..=4) as f64))
        .collect();
    SeriesFunction::new(terms, half_period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::series::fourier_coeffs;
    use crate::analytic::sums::convergent_sum;

    fn unit() -> QuarterWaveParams {
        QuarterWaveParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn unit_parameters() {
        let p = unit();
        assert!((p.eta().unwrap() - PI / 4.0).abs() < 1e-15);
        let pair = p.normalized(0.5).unwrap();
        assert!((pair.normalization().unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn closed_forms_match_integrals() {
        let p = QuarterWaveParams::new(0.7, 1.9, -1.2, 0.4, 1.3).unwrap();
        let (a, b, q) = (2.5, -3.0, 0.5);
        let z = p.zeros(a, b, q).unwrap();
        let pair = p.normalized(q).unwrap();
        let f = pair.alice_mask.scale(a);
        let g = pair.bob_mask.scale(b);
        let fc = fourier_coeffs(&f, 60).unwrap();
        let gc = fourier_coeffs(&g, 60).unwrap();
        let fa = alice_closed_form(z.a0, z.a0_hat, 60);
        let gb = bob_closed_form(z.alpha0, z.alpha0_hat, 60);
        let close = |x: f64, y: f64| (x - y).abs() < 1e-12 * (1.0 + y.abs());
        assert!(close(fc.a0, fa.a0) && close(gc.a0, gb.a0));
        for n in 1..=60 {
            assert!(close(fc.a(n), fa.a(n)), "a_{n}");
            assert!(close(fc.b(n), fa.b(n)), "b_{n}");
            assert!(close(gc.a(n), gb.a(n)), "alpha_{n}");
            assert!(close(gc.b(n), gb.b(n)), "beta_{n}");
        }
    }

    #[test]
    fn node_sums_in_closed_form() {
        let z = unit().zeros(3.0, 5.0, 0.5).unwrap();
        let s = convergent_sum(0.75, 0.25, false).unwrap();
        let w = convergent_sum(0.75, 0.25, true).unwrap();
        let s1 = z.a0 * z.alpha0 * (0.5 + 9.0 / 256.0 * s);
        let s2 = 3.0 / 16.0 * z.a0_hat * z.alpha0_hat * w;
        assert!((s1 - NODE_FACTOR * z.a0 * z.alpha0).abs() < 1e-12);
        assert!((s2 - NODE_FACTOR * z.a0_hat * z.alpha0_hat).abs() < 1e-12);
        assert!((s1 + s2 - 15.0).abs() < 1e-12);
    }

    #[test]
    fn tail_bound_dominates_truncation_error() {
        let z = unit().zeros(1.0, 1.0, 0.5).unwrap();
        for order in [10, 100, 1000] {
            let fa = alice_closed_form(z.a0, z.a0_hat, order);
            let gb = bob_closed_form(z.alpha0, z.alpha0_hat, order);
            let lhs = fa.a0 * gb.a0 / 2.0
                + (1..=order).map(|n| fa.a(n) * gb.a(n) + fa.b(n) * gb.b(n)).sum::<f64>();
            let err = (lhs - 1.0).abs();
            let bound = quarter_wave_tail_bound(&z, order);
            assert!(err <= bound, "order {order}: {err} > {bound}");
            assert!(err > bound / 10.0);
        }
    }

    #[test]
    fn degenerate_and_bad_exponent() {
        let p = QuarterWaveParams::new(1.0, 1.0, 1.0, -1.0, 1.0).unwrap();
        assert!(matches!(p.eta(), Err(AnalyticError::DegenerateMasks(_))));
        assert!(unit().zeros(1.0, 1.0, 0.0).is_err());
    }
}
