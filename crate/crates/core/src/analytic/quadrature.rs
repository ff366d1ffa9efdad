//! Spatial-domain oracle for convolution integrals.
//!
//! `(v ⋆ w)(x) = (1/l) ∫_{-l}^{l} v(y) w_p(x - y) dy` where `w_p` is the
//! `2l`-periodic extension of `w|[-l, l)`. For `x` fixed the integral splits
//! where `x - y` crosses `±l`; on each piece the integrand is a product of
//! sinusoids and is integrated in closed form. The outer integral over `x` is
//! Gauss–Legendre on `[-l, 0]` and `[0, l]`, the two intervals on which the
//! convolution is analytic.
//!
//! Nothing here goes through Fourier coefficients, so it cross-checks the
//! coefficient-space formulas independently.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use super::series::{sinc, SeriesFunction};
use super::AnalyticError;

/// Default number of Gauss–Legendre nodes per half interval.
pub const DEFAULT_NODES: usize = 128;

/// `∫_{y0}^{y1} cos(k y + c) dy`.
fn int_cos(k: f64, c: f64, y0: f64, y1: f64) -> f64 {
    let h = 0.5 * (y1 - y0);
    let mid = 0.5 * (y1 + y0);
    2.0 * h * (k * mid + c).cos() * sinc(k * h)
}

/// `∫_{y0}^{y1} v(y) w(z - y) dy` for the closed-form pieces.
fn piece(v: &SeriesFunction, w: &SeriesFunction, z: f64, y0: f64, y1: f64) -> f64 {
    if y1 <= y0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for s in v.terms() {
        let (a, alpha, phi) = s.phase_form();
        for t in w.terms() {
            let (b, beta, psi) = t.phase_form();
            // cos(αy + φ) cos(β(z - y) + ψ)
            let c0 = phi + beta * z + psi;
            let c1 = phi - beta * z - psi;
            acc += 0.5
                * a
                * b
                * (int_cos(alpha - beta, c0, y0, y1) + int_cos(alpha + beta, c1, y0, y1));
        }
    }
    acc
}

/// Value of the periodic convolution `(v ⋆ w)(x)` for `x ∈ [-l, l]`.
pub fn convolve_at(v: &SeriesFunction, w: &SeriesFunction, x: f64) -> f64 {
    let l = v.half_period();
    let total = if x >= 0.0 {
        // y < x - l  ⇒  x - y > l, use w(x - y - 2l).
        piece(v, w, x - 2.0 * l, -l, x - l) + piece(v, w, x, x - l, l)
    } else {
        // y > x + l  ⇒  x - y < -l, use w(x - y + 2l).
        piece(v, w, x, -l, x + l) + piece(v, w, x + 2.0 * l, x + l, l)
    };
    total / l
}

/// Reusable Gauss–Legendre rule over `(-l, l)` split at zero.
pub struct HalfIntervalRule {
    rule: GaussLegendre,
}

impl HalfIntervalRule {
    pub fn new(nodes: usize) -> Self {
        let degree = NonZeroUsize::new(nodes.max(1)).expect("at least one node");
        Self {
            rule: GaussLegendre::new(degree),
        }
    }

    /// `(1/l) ∫_{-l}^{l} f(x) dx`.
    pub fn mean<F: FnMut(f64) -> f64>(&self, l: f64, mut f: F) -> f64 {
        (self.rule.integrate(-l, 0.0, &mut f) + self.rule.integrate(0.0, l, &mut f)) / l
    }
}

impl Default for HalfIntervalRule {
    fn default() -> Self {
        Self::new(DEFAULT_NODES)
    }
}

/// `(1/l) ∫ u(x) (v ⋆ w)(x) dx` by quadrature.
pub fn inner_with_convolution(
    u: &SeriesFunction,
    v: &SeriesFunction,
    w: &SeriesFunction,
    rule: &HalfIntervalRule,
) -> Result<f64, AnalyticError> {
    u.same_domain(v)?;
    u.same_domain(w)?;
    let l = u.half_period();
    Ok(rule.mean(l, |x| u.eval(x) * convolve_at(v, w, x)))
}

/// Fourier coefficients of `v ⋆ w` up to `order`, computed from sampled
/// values of the convolution rather than from the coefficients of `v`, `w`.
pub fn convolution_coeffs_by_quadrature(
    v: &SeriesFunction,
    w: &SeriesFunction,
    order: usize,
    rule: &HalfIntervalRule,
) -> Result<super::FourierCoeffs, AnalyticError> {
    v.same_domain(w)?;
    if order == 0 {
        return Err(AnalyticError::ZeroOrder);
    }
    let l = v.half_period();
    let k = std::f64::consts::PI / l;
    let a0 = rule.mean(l, |x| convolve_at(v, w, x));
    let mut cos = Vec::with_capacity(order);
    let mut sin = Vec::with_capacity(order);
    for n in 1..=order {
        let w_n = n as f64 * k;
        cos.push(rule.mean(l, |x| convolve_at(v, w, x) * (w_n * x).cos()));
        sin.push(rule.mean(l, |x| convolve_at(v, w, x) * (w_n * x).sin()));
    }
    Ok(super::FourierCoeffs::new(a0, cos, sin))
}
