//! Closed forms for `Σ 1/(γ² - n²)` and the two rational sums built from it.

use std::f64::consts::PI;

use super::AnalyticError;

const INTEGER_EPS: f64 = 1e-12;

/// Pairwise (cascade) summation. The result depends only on the slice, not on
/// how it was produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

fn check_not_integer(x: f64) -> Result<(), AnalyticError> {
    if !x.is_finite() || (x - x.round()).abs() < INTEGER_EPS {
        Err(AnalyticError::Pole(x))
    } else {
        Ok(())
    }
}

/// `Ω(γ) = Σ_{n≥1} 1/(γ² - n²) = π cot(πγ)/(2γ) - 1/(2γ²)`.
pub fn omega(gamma: f64) -> Result<f64, AnalyticError> {
    check_not_integer(gamma)?;
    let cot = 1.0 / (PI * gamma).tan();
    Ok(PI / (2.0 * gamma) * cot - 1.0 / (2.0 * gamma * gamma))
}

/// `Σ 1/((γ²-n²)(δ²-n²))`, or with an extra `n²` in the numerator when
/// `weighted`, via partial fractions in terms of [`omega`].
pub fn convergent_sum(gamma: f64, delta: f64, weighted: bool) -> Result<f64, AnalyticError> {
    check_not_integer(gamma)?;
    check_not_integer(delta)?;
    let (g2, d2) = (gamma * gamma, delta * delta);
    if (d2 - g2).abs() < INTEGER_EPS * (1.0 + g2) {
        return Err(AnalyticError::DegenerateSum(gamma, delta));
    }
    let (wg, wd) = if weighted { (g2, d2) } else { (1.0, 1.0) };
    Ok((wg * omega(gamma)? - wd * omega(delta)?) / (d2 - g2))
}

/// Partial sum of `Ω(γ)` over `n = 1..=terms`.
pub fn omega_partial(gamma: f64, terms: usize) -> f64 {
    let g2 = gamma * gamma;
    let xs: Vec<f64> = (1..=terms)
        .map(|n| {
            let n2 = (n as f64) * (n as f64);
            1.0 / (g2 - n2)
        })
        .collect();
    pairwise_sum(&xs)
}

pub fn convergent_sum_partial(gamma: f64, delta: f64, weighted: bool, terms: usize) -> f64 {
    let (g2, d2) = (gamma * gamma, delta * delta);
    let xs: Vec<f64> = (1..=terms)
        .map(|n| {
            let n2 = (n as f64) * (n as f64);
            let num = if weighted { n2 } else { 1.0 };
            num / ((g2 - n2) * (d2 - n2))
        })
        .collect();
    pairwise_sum(&xs)
}

/// Upper bound on the tail `|Ω(γ) - omega_partial(γ, terms)|`, valid once
/// `terms >= 2|γ|` (then `n² - γ² >= 3n²/4`).
pub fn omega_tail_bound(gamma: f64, terms: usize) -> f64 {
    let n = terms as f64;
    if n < 2.0 * gamma.abs() || terms == 0 {
        return f64::INFINITY;
    }
    4.0 / (3.0 * n)
}

/// Same for [`convergent_sum_partial`].
pub fn convergent_sum_tail_bound(gamma: f64, delta: f64, weighted: bool, terms: usize) -> f64 {
    let n = terms as f64;
    if n < 2.0 * gamma.abs().max(delta.abs()) || terms == 0 {
        return f64::INFINITY;
    }
    // Each factor n² - c² >= 3n²/4.
    let k = 16.0 / 9.0;
    if weighted {
        k / n
    } else {
        k / (3.0 * n * n * n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_half_and_quarter() {
        assert!((omega(0.5).unwrap() + 2.0).abs() < 1e-12);
        assert!((omega(0.25).unwrap() - (2.0 * PI - 8.0)).abs() < 1e-12);
        assert!((omega(0.25).unwrap() + 1.71681).abs() < 1e-5);
        assert!((omega_partial(0.5, 100_000) + 2.0).abs() < 1e-4);
        assert!((omega_partial(0.25, 100_000) - (2.0 * PI - 8.0)).abs() < 1e-4);
    }

    #[test]
    fn poles_and_degenerate_pairs() {
        assert_eq!(omega(1.0), Err(AnalyticError::Pole(1.0)));
        assert_eq!(omega(0.0), Err(AnalyticError::Pole(0.0)));
        assert!(convergent_sum(2.0, 0.5, true).is_err());
        assert!(matches!(
            convergent_sum(0.75, 0.75, false),
            Err(AnalyticError::DegenerateSum(..))
        ));
    }

    #[test]
    fn three_quarter_quarter_sums() {
        let w = convergent_sum(0.75, 0.25, true).unwrap();
        assert!((w - PI).abs() < 1e-12);
        let u = convergent_sum(0.75, 0.25, false).unwrap();
        assert!((u - (16.0 * PI / 3.0 - 128.0 / 9.0)).abs() < 1e-12);
        assert!((u - 2.532939).abs() < 1e-6);
        // Node-side factors: 1/2 + (9/256) S = 3π/16 and (3/16) W = 3π/16.
        assert!((0.5 + 9.0 / 256.0 * u - 3.0 * PI / 16.0).abs() < 1e-12);
        assert!((3.0 / 16.0 * w - 3.0 * PI / 16.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_in_gamma_delta() {
        for weighted in [false, true] {
            let a = convergent_sum(1.3, 0.4, weighted).unwrap();
            let b = convergent_sum(0.4, 1.3, weighted).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
