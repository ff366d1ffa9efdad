//! Finite trigonometric sums on `(-l, l)` and their Fourier coefficients.

use std::f64::consts::PI;

use serde::Serialize;

use super::sums::pairwise_sum;
use super::AnalyticError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Wave {
    Sin,
    Cos,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub amplitude: f64,
    pub wave: Wave,
    /// Angular frequency in radians per unit length.
    pub frequency: f64,
}

impl Term {
    pub fn sin(amplitude: f64, frequency: f64) -> Self {
        Self {
            amplitude,
            wave: Wave::Sin,
            frequency,
        }
    }

    pub fn cos(amplitude: f64, frequency: f64) -> Self {
        Self {
            amplitude,
            wave: Wave::Cos,
            frequency,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.wave {
            Wave::Sin => self.amplitude * (self.frequency * x).sin(),
            Wave::Cos => self.amplitude * (self.frequency * x).cos(),
        }
    }

    /// `(amplitude, frequency, phase)` with `term(x) = amplitude·cos(frequency·x + phase)`.
    pub(crate) fn phase_form(&self) -> (f64, f64, f64) {
        match self.wave {
            Wave::Cos => (self.amplitude, self.frequency, 0.0),
            Wave::Sin => (self.amplitude, self.frequency, -PI / 2.0),
        }
    }
}

/// A finite sum of sines and cosines, viewed on `(-l, l)` and extended
/// periodically with period `2l` wherever a periodic function is needed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesFunction {
    terms: Vec<Term>,
    half_period: f64,
}

impl SeriesFunction {
    pub fn new(terms: Vec<Term>, half_period: f64) -> Result<Self, AnalyticError> {
        if !(half_period > 0.0 && half_period.is_finite()) {
            return Err(AnalyticError::InvalidHalfPeriod(half_period));
        }
        Ok(Self { terms, half_period })
    }

    pub fn zero(half_period: f64) -> Result<Self, AnalyticError> {
        Self::new(Vec::new(), half_period)
    }

    /// `cos(nπx/l)`, the n-th harmonic (n = 0 gives the constant 1).
    pub fn harmonic_cos(n: usize, half_period: f64) -> Result<Self, AnalyticError> {
        Self::new(
            vec![Term::cos(1.0, n as f64 * PI / half_period)],
            half_period,
        )
    }

    pub fn harmonic_sin(n: usize, half_period: f64) -> Result<Self, AnalyticError> {
        Self::new(
            vec![Term::sin(1.0, n as f64 * PI / half_period)],
            half_period,
        )
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// Value of the `2l`-periodic extension of `f|[-l, l)`.
    pub fn eval_periodic(&self, x: f64) -> f64 {
        let l = self.half_period;
        self.eval((x + l).rem_euclid(2.0 * l) - l)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    amplitude: t.amplitude * k,
                    ..*t
                })
                .collect(),
            half_period: self.half_period,
        }
    }

    /// `½(f(x) + f(-x))`: drops every sine term.
    pub fn even_part(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .copied()
                .filter(|t| t.wave == Wave::Cos)
                .collect(),
            half_period: self.half_period,
        }
    }

    pub fn same_domain(&self, other: &Self) -> Result<(), AnalyticError> {
        if (self.half_period - other.half_period).abs() <= 1e-15 * self.half_period {
            Ok(())
        } else {
            Err(AnalyticError::DomainMismatch(
                self.half_period,
                other.half_period,
            ))
        }
    }
}

/// `sin(u)/u` with the removable singularity filled in.
pub(crate) fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 + u2 * u2 / 120.0
    } else {
        u.sin() / u
    }
}

/// `(1/l) ∫_{-l}^{l} cos(kx) dx`.
fn mean_cos(k: f64, l: f64) -> f64 {
    2.0 * sinc(k * l)
}

/// `(1/l) ∫_{-l}^{l} s(x) t(x) dx` for two single terms.
fn term_product(s: &Term, t: &Term, l: f64) -> f64 {
    let diff = mean_cos(s.frequency - t.frequency, l);
    let sum = mean_cos(s.frequency + t.frequency, l);
    let shape = match (s.wave, t.wave) {
        (Wave::Cos, Wave::Cos) => 0.5 * (diff + sum),
        (Wave::Sin, Wave::Sin) => 0.5 * (diff - sum),
        // Odd integrand on a symmetric interval.
        _ => 0.0,
    };
    s.amplitude * t.amplitude * shape
}

/// `(1/l) ∫_{-l}^{l} f(x) g(x) dx`, integrated term by term in closed form.
pub fn integrate(f: &SeriesFunction, g: &SeriesFunction) -> Result<f64, AnalyticError> {
    f.same_domain(g)?;
    let l = f.half_period;
    Ok(f.terms
        .iter()
        .flat_map(|s| g.terms.iter().map(move |t| term_product(s, t, l)))
        .sum())
}

/// Coefficients `(a₀, aₙ, bₙ)` of `f = a₀/2 + Σ aₙ cos(nπx/l) + Σ bₙ sin(nπx/l)`.
///
/// `cos[n - 1]` holds `aₙ` and `sin[n - 1]` holds `bₙ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierCoeffs {
    pub a0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl FourierCoeffs {
    pub fn new(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        assert_eq!(cos.len(), sin.len(), "cos and sin vectors must align");
        Self { a0, cos, sin }
    }

    pub fn order(&self) -> usize {
        self.cos.len()
    }

    /// `aₙ` for `n >= 1`, zero past the truncation order.
    pub fn a(&self, n: usize) -> f64 {
        self.cos.get(n.wrapping_sub(1)).copied().unwrap_or(0.0)
    }

    pub fn b(&self, n: usize) -> f64 {
        self.sin.get(n.wrapping_sub(1)).copied().unwrap_or(0.0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let k = order.min(self.order());
        Self::new(self.a0, self.cos[..k].to_vec(), self.sin[..k].to_vec())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(
            self.a0 * k,
            self.cos.iter().map(|v| v * k).collect(),
            self.sin.iter().map(|v| v * k).collect(),
        )
    }

    /// Partial sum of the series at `x`.
    pub fn eval(&self, x: f64, half_period: f64) -> f64 {
        let w = PI / half_period;
        let terms: Vec<f64> = (1..=self.order())
            .map(|n| {
                let t = n as f64 * w * x;
                self.a(n) * t.cos() + self.b(n) * t.sin()
            })
            .collect();
        self.a0 / 2.0 + pairwise_sum(&terms)
    }
}

pub fn fourier_coeffs(f: &SeriesFunction, order: usize) -> Result<FourierCoeffs, AnalyticError> {
    if order == 0 {
        return Err(AnalyticError::ZeroOrder);
    }
    let l = f.half_period;
    let mean = |probe: Term| -> f64 { f.terms.iter().map(|s| term_product(s, &probe, l)).sum() };
    let a0 = mean(Term::cos(1.0, 0.0));
    let mut cos = Vec::with_capacity(order);
    let mut sin = Vec::with_capacity(order);
    for n in 1..=order {
        let w = n as f64 * PI / l;
        cos.push(mean(Term::cos(1.0, w)));
        sin.push(mean(Term::sin(1.0, w)));
    }
    Ok(FourierCoeffs::new(a0, cos, sin))
}
