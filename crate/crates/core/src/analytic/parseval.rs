//! Parseval-type identities in coefficient space, and their spatial-domain
//! counterparts.

use serde::Serialize;

use super::quadrature::{convolution_coeffs_by_quadrature, inner_with_convolution, HalfIntervalRule};
use super::series::{fourier_coeffs, integrate, FourierCoeffs, SeriesFunction};
use super::sums::pairwise_sum;
use super::AnalyticError;

/// Threshold under which a normalization integral is treated as zero.
pub const DEGENERATE_THRESHOLD: f64 = 1e-9;

/// Coefficient law used to form the coefficients of `f ⋆ g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvolutionLaw {
    /// `c₀ = a₀α₀`, `cₙ = aₙαₙ - bₙβₙ`, `dₙ = aₙβₙ + bₙαₙ`.
    Standard,
    /// `c₀ = a₀α₀/2`, `cₙ = aₙαₙ - aₙβₙ`, `dₙ = bₙαₙ + bₙβₙ`, as printed in
    /// the original derivation. Kept for comparison against the oracle.
    Printed,
}

impl ConvolutionLaw {
    pub fn name(&self) -> &'static str {
        match self {
            ConvolutionLaw::Standard => "standard",
            ConvolutionLaw::Printed => "printed",
        }
    }
}

/// Coefficients of `f ⋆ g` under the normalization `(1/l) ∫ f(y) g(x - y) dy`.
pub fn convolution_coeffs(f: &FourierCoeffs, g: &FourierCoeffs, law: ConvolutionLaw) -> FourierCoeffs {
    let order = f.order().min(g.order());
    let (a0, cos, sin) = match law {
        ConvolutionLaw::Standard => (
            f.a0 * g.a0,
            (1..=order).map(|n| f.a(n) * g.a(n) - f.b(n) * g.b(n)).collect(),
            (1..=order).map(|n| f.a(n) * g.b(n) + f.b(n) * g.a(n)).collect(),
        ),
        ConvolutionLaw::Printed => (
            f.a0 * g.a0 / 2.0,
            (1..=order).map(|n| f.a(n) * g.a(n) - f.a(n) * g.b(n)).collect(),
            (1..=order).map(|n| f.b(n) * g.a(n) + f.b(n) * g.b(n)).collect(),
        ),
    };
    FourierCoeffs::new(a0, cos, sin)
}

/// How a node turns a truncated coefficient dot product into a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Summation {
    /// Plain partial sum up to the truncation order.
    Truncated,
    /// Partial sums at `N` and `N/2` combined to cancel a `C/N` tail:
    /// `(N·S_N - M·S_M)/(N - M)`.
    #[default]
    Extrapolated,
}

/// `constant + Σ_{n=1..N} terms[n-1]` under the given summation mode.
pub fn sum_series(constant: f64, terms: &[f64], mode: Summation) -> f64 {
    let n = terms.len();
    let full = constant + pairwise_sum(terms);
    match mode {
        Summation::Truncated => full,
        Summation::Extrapolated => {
            let m = n / 2;
            if m == 0 {
                return full;
            }
            let half = constant + pairwise_sum(&terms[..m]);
            let (nf, mf) = (n as f64, m as f64);
            (nf * full - mf * half) / (nf - mf)
        }
    }
}

/// `A·α` of the two-input identity: `a₀α₀/2 + Σ aₙαₙ`.
pub fn cosine_dot(f: &FourierCoeffs, g: &FourierCoeffs, mode: Summation) -> f64 {
    let order = f.order().min(g.order());
    let terms: Vec<f64> = (1..=order).map(|n| f.a(n) * g.a(n)).collect();
    sum_series(f.a0 * g.a0 / 2.0, &terms, mode)
}

/// `B·β`: `Σ bₙβₙ`.
pub fn sine_dot(f: &FourierCoeffs, g: &FourierCoeffs, mode: Summation) -> f64 {
    let order = f.order().min(g.order());
    let terms: Vec<f64> = (1..=order).map(|n| f.b(n) * g.b(n)).collect();
    sum_series(0.0, &terms, mode)
}

/// Both sides of `A·α + B·β = (1/l) ∫ f g`; the left side is the plain
/// truncated sum.
pub fn parseval_two(
    fc: &FourierCoeffs,
    gc: &FourierCoeffs,
    f: &SeriesFunction,
    g: &SeriesFunction,
) -> Result<(f64, f64), AnalyticError> {
    let lhs = cosine_dot(fc, gc, Summation::Truncated) + sine_dot(fc, gc, Summation::Truncated);
    Ok((lhs, integrate(f, g)?))
}

/// `½a₀α₀ + ½(A+B)·(α+β) + ½(A-B)·(α-β)` with `A, B` starting at `n = 1`.
pub fn parseval_two_recast(f: &FourierCoeffs, g: &FourierCoeffs) -> f64 {
    let order = f.order().min(g.order());
    let plus: Vec<f64> = (1..=order)
        .map(|n| (f.a(n) + f.b(n)) * (g.a(n) + g.b(n)))
        .collect();
    let minus: Vec<f64> = (1..=order)
        .map(|n| (f.a(n) - f.b(n)) * (g.a(n) - g.b(n)))
        .collect();
    0.5 * f.a0 * g.a0 + 0.5 * pairwise_sum(&plus) + 0.5 * pairwise_sum(&minus)
}

/// The two node shares of the three-input identity:
/// `(½a₀α₀γ₀ + ½Σ(aₙ+bₙ)(αₙ+βₙ)(γₙ+ϱₙ), ½Σ(aₙ-bₙ)(αₙ-βₙ)(γₙ-ϱₙ))`.
pub fn three_input_shares(f: &FourierCoeffs, g: &FourierCoeffs, h: &FourierCoeffs) -> (f64, f64) {
    let order = f.order().min(g.order()).min(h.order());
    let plus: Vec<f64> = (1..=order)
        .map(|n| (f.a(n) + f.b(n)) * (g.a(n) + g.b(n)) * (h.a(n) + h.b(n)))
        .collect();
    let minus: Vec<f64> = (1..=order)
        .map(|n| (f.a(n) - f.b(n)) * (g.a(n) - g.b(n)) * (h.a(n) - h.b(n)))
        .collect();
    (
        0.5 * f.a0 * g.a0 * h.a0 + 0.5 * pairwise_sum(&plus),
        0.5 * pairwise_sum(&minus),
    )
}

/// Right-hand side of the three-input identity, by quadrature:
/// `⟨f, g⋆h⟩ + ⟨g, f⋆h⟩ + ⟨h, f⋆g⟩ - 2⟨ĥ_c, f̂_c⋆ĝ_c⟩`, with `⟨u, v⟩ = (1/l)∫uv`
/// and `û_c` the even part.
pub fn three_input_integrals(
    f: &SeriesFunction,
    g: &SeriesFunction,
    h: &SeriesFunction,
    rule: &HalfIntervalRule,
) -> Result<f64, AnalyticError> {
    let (fe, ge, he) = (f.even_part(), g.even_part(), h.even_part());
    Ok(inner_with_convolution(f, g, h, rule)?
        + inner_with_convolution(g, f, h, rule)?
        + inner_with_convolution(h, f, g, rule)?
        - 2.0 * inner_with_convolution(&he, &fe, &ge, rule)?)
}

/// Both sides of the generalized three-input identity: the truncated
/// coefficient form and the four convolution integrals.
pub fn parseval_three(
    fc: &FourierCoeffs,
    gc: &FourierCoeffs,
    hc: &FourierCoeffs,
    f: &SeriesFunction,
    g: &SeriesFunction,
    h: &SeriesFunction,
) -> Result<(f64, f64), AnalyticError> {
    let (s1, s2) = three_input_shares(fc, gc, hc);
    let rhs = three_input_integrals(f, g, h, &HalfIntervalRule::default())?;
    Ok((s1 + s2, rhs))
}

/// `η⁻¹` for three masks: the four-integral combination above applied to
/// `φ₁, φ₂, φ₃`. Errors when it vanishes.
pub fn normalization_three(
    phi1: &SeriesFunction,
    phi2: &SeriesFunction,
    phi3: &SeriesFunction,
) -> Result<f64, AnalyticError> {
    let inv = three_input_integrals(phi1, phi2, phi3, &HalfIntervalRule::default())?;
    if inv.abs() < DEGENERATE_THRESHOLD {
        return Err(AnalyticError::DegenerateMasks(inv));
    }
    Ok(inv)
}

/// `sign(η)·|η|^q`, so that products of shares with exponents summing to one
/// recover `η` even when it is negative.
pub fn signed_power(eta: f64, q: f64, carries_sign: bool) -> f64 {
    let mag = eta.abs().powf(q);
    if carries_sign && eta < 0.0 {
        -mag
    } else {
        mag
    }
}

/// Two masks scaled by `η^q` and `η^(1-q)`, with `η⁻¹ = (1/l) ∫ φ ψ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedMaskPair {
    pub alice_mask: SeriesFunction,
    pub bob_mask: SeriesFunction,
    pub eta: f64,
    pub q: f64,
}

impl NormalizedMaskPair {
    pub fn new(phi: &SeriesFunction, psi: &SeriesFunction, q: f64) -> Result<Self, AnalyticError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(AnalyticError::InvalidExponent(q));
        }
        let inv = integrate(phi, psi)?;
        if inv.abs() < DEGENERATE_THRESHOLD {
            return Err(AnalyticError::DegenerateMasks(inv));
        }
        let eta = 1.0 / inv;
        Ok(Self {
            alice_mask: phi.scale(signed_power(eta, q, true)),
            bob_mask: psi.scale(signed_power(eta, 1.0 - q, false)),
            eta,
            q,
        })
    }

    /// `(1/l) ∫ φ̃ ψ̃`, which is one by construction.
    pub fn normalization(&self) -> Result<f64, AnalyticError> {
        integrate(&self.alice_mask, &self.bob_mask)
    }
}

/// Outcome of checking both coefficient laws against the quadrature oracle.
#[derive(Debug, Clone, Serialize)]
pub struct LawAdjudication {
    pub pairs: usize,
    pub order: usize,
    pub tolerance: f64,
    pub standard_max_residual: f64,
    pub printed_max_residual: f64,
    /// The law whose residual stays within `tolerance` on every pair.
    pub matched: Option<ConvolutionLaw>,
}

fn max_coeff_diff(x: &FourierCoeffs, y: &FourierCoeffs) -> f64 {
    let mut worst = (x.a0 - y.a0).abs();
    for n in 1..=x.order().max(y.order()) {
        worst = worst.max((x.a(n) - y.a(n)).abs()).max((x.b(n) - y.b(n)).abs());
    }
    worst
}

/// Compares [`convolution_coeffs`] under both laws with coefficients of the
/// convolution obtained by quadrature, for every pair and `n <= order`.
pub fn adjudicate_convolution_law(
    pairs: &[(SeriesFunction, SeriesFunction)],
    order: usize,
    tolerance: f64,
) -> Result<LawAdjudication, AnalyticError> {
    let rule = HalfIntervalRule::default();
    let (mut standard, mut printed) = (0.0f64, 0.0f64);
    for (f, g) in pairs {
        let oracle = convolution_coeffs_by_quadrature(f, g, order, &rule)?;
        let (fc, gc) = (fourier_coeffs(f, order)?, fourier_coeffs(g, order)?);
        standard = standard.max(max_coeff_diff(&convolution_coeffs(&fc, &gc, ConvolutionLaw::Standard), &oracle));
        printed = printed.max(max_coeff_diff(&convolution_coeffs(&fc, &gc, ConvolutionLaw::Printed), &oracle));
    }
    let matched = if standard <= tolerance {
        Some(ConvolutionLaw::Standard)
    } else if printed <= tolerance {
        Some(ConvolutionLaw::Printed)
    } else {
        None
    };
    Ok(LawAdjudication {
        pairs: pairs.len(),
        order,
        tolerance,
        standard_max_residual: standard,
        printed_max_residual: printed,
        matched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::series::Term;
    use std::f64::consts::PI;

    fn cos1() -> SeriesFunction {
        SeriesFunction::harmonic_cos(1, 1.0).unwrap()
    }

    #[test]
    fn harmonic_cosine_convolution() {
        let c = fourier_coeffs(&cos1(), 6).unwrap();
        let phi = convolution_coeffs(&c, &c, ConvolutionLaw::Standard);
        assert!(phi.a0.abs() < 1e-15);
        assert!((phi.a(1) - 1.0).abs() < 1e-13);
        for n in 2..=6 {
            assert!(phi.a(n).abs() < 1e-13 && phi.b(n).abs() < 1e-13);
        }
    }

    #[test]
    fn sine_with_cosine_gives_pure_sine() {
        let s = fourier_coeffs(&SeriesFunction::harmonic_sin(1, 1.0).unwrap(), 4).unwrap();
        let c = fourier_coeffs(&cos1(), 4).unwrap();
        let phi = convolution_coeffs(&s, &c, ConvolutionLaw::Standard);
        assert!(phi.a(1).abs() < 1e-13);
        assert!((phi.b(1) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn constant_convolution() {
        // f = K, g = M: (1/l)∫ K M dy = 2KM, so c₀ = 4KM = a₀α₀.
        let (k, m) = (1.5, -0.7);
        let f = SeriesFunction::new(vec![Term::cos(k, 0.0)], 1.0).unwrap();
        let g = SeriesFunction::new(vec![Term::cos(m, 0.0)], 1.0).unwrap();
        let (fc, gc) = (fourier_coeffs(&f, 2).unwrap(), fourier_coeffs(&g, 2).unwrap());
        let phi = convolution_coeffs(&fc, &gc, ConvolutionLaw::Standard);
        assert!((phi.a0 / 2.0 - 2.0 * k * m).abs() < 1e-14);
        let printed = convolution_coeffs(&fc, &gc, ConvolutionLaw::Printed);
        assert!((printed.a0 / 2.0 - k * m).abs() < 1e-14);
    }

    #[test]
    fn parseval_two_trivial_cases() {
        let c = cos1();
        let cc = fourier_coeffs(&c, 4).unwrap();
        let (l, r) = parseval_two(&cc, &cc, &c, &c).unwrap();
        assert!((l - 1.0).abs() < 1e-13 && (r - 1.0).abs() < 1e-13);
        let s = SeriesFunction::harmonic_sin(1, 1.0).unwrap();
        let sc = fourier_coeffs(&s, 4).unwrap();
        let (l, r) = parseval_two(&sc, &cc, &s, &c).unwrap();
        assert!(l.abs() < 1e-13 && r == 0.0);
    }

    #[test]
    fn recast_reduces_and_polarizes() {
        let f = FourierCoeffs::new(0.3, vec![1.0, -2.0, 0.5], vec![0.0; 3]);
        let g = FourierCoeffs::new(-1.1, vec![0.2, 0.4, 3.0], vec![0.0; 3]);
        let standard = cosine_dot(&f, &g, Summation::Truncated);
        assert!((parseval_two_recast(&f, &g) - standard).abs() < 1e-14);
        let h = FourierCoeffs::new(0.8, vec![1.0, 2.0], vec![-0.5, 0.25]);
        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        let expected = h.a0 * h.a0 / 2.0 + sq(&h.cos) + sq(&h.sin);
        assert!((parseval_two_recast(&h, &h) - expected).abs() < 1e-14);
    }

    #[test]
    fn extrapolation_removes_inverse_n_tail() {
        // Σ 1/n² = π²/6; plain truncation is off by ~1/N.
        let terms: Vec<f64> = (1..=1000).map(|n| 1.0 / (n as f64 * n as f64)).collect();
        let exact = PI * PI / 6.0;
        let plain = sum_series(0.0, &terms, Summation::Truncated);
        let fast = sum_series(0.0, &terms, Summation::Extrapolated);
        assert!((plain - exact).abs() > 9e-4);
        assert!((fast - exact).abs() < 1e-6);
    }

    #[test]
    fn normalized_pair_contract() {
        let phi = SeriesFunction::new(vec![Term::sin(1.0, PI / 4.0), Term::cos(1.0, 3.0 * PI / 4.0)], 1.0).unwrap();
        let psi = SeriesFunction::new(vec![Term::sin(1.0, 3.0 * PI / 4.0), Term::cos(1.0, PI / 4.0)], 1.0).unwrap();
        let pair = NormalizedMaskPair::new(&phi, &psi, 0.5).unwrap();
        assert!((pair.eta - PI / 4.0).abs() < 1e-13);
        assert!((pair.normalization().unwrap() - 1.0).abs() < 1e-13);
        // Negative normalization still multiplies back to η.
        let pair = NormalizedMaskPair::new(&phi, &psi.scale(-2.0), 0.3).unwrap();
        assert!(pair.eta < 0.0);
        assert!((pair.normalization().unwrap() - 1.0).abs() < 1e-13);
        assert!(NormalizedMaskPair::new(&phi, &psi, 1.0).is_err());
        let zero = SeriesFunction::zero(1.0).unwrap();
        assert!(matches!(
            NormalizedMaskPair::new(&phi, &zero, 0.5),
            Err(AnalyticError::DegenerateMasks(_))
        ));
    }

    #[test]
    fn three_input_pure_cosines() {
        let c = cos1();
        let cc = fourier_coeffs(&c, 8).unwrap();
        let (l, r) = parseval_three(&cc, &cc, &cc, &c, &c, &c).unwrap();
        assert!((l - 1.0).abs() < 1e-12, "lhs {l}");
        assert!((r - 1.0).abs() < 1e-12, "rhs {r}");
        assert!((normalization_three(&c, &c, &c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_input_zero_and_degenerate() {
        let c = cos1();
        let z = SeriesFunction::zero(1.0).unwrap();
        let cc = fourier_coeffs(&c, 8).unwrap();
        let zc = fourier_coeffs(&z, 8).unwrap();
        let (l, r) = parseval_three(&cc, &cc, &zc, &c, &c, &z).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        assert!(matches!(
            normalization_three(&c, &z, &c),
            Err(AnalyticError::DegenerateMasks(_))
        ));
    }
}
