//! Real-valued two- and three-party protocols over truncated Fourier series.

use serde::Serialize;

use super::ProtocolError;
use crate::analytic::parseval::{cosine_dot, signed_power, sine_dot, three_input_shares};
use crate::analytic::{fourier_coeffs, normalization_three, FourierCoeffs, NormalizedMaskPair, SeriesFunction, Summation};

/// Node outputs of a real-valued run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticOutcome {
    pub s1: f64,
    pub s2: f64,
}

impl AnalyticOutcome {
    pub fn sum(&self) -> f64 {
        self.s1 + self.s2
    }
}

/// Player side: coefficients of `secret·mask` up to `order`.
pub fn player_coefficients(secret: f64, mask: &SeriesFunction, order: usize) -> Result<FourierCoeffs, ProtocolError> {
    Ok(fourier_coeffs(&mask.scale(secret), order)?)
}

/// Node 1 gets `(a₀, A)` and `(α₀, α)`; outputs `a₀α₀/2 + A·α`.
pub fn node1_output_2p(f: &FourierCoeffs, g: &FourierCoeffs, mode: Summation) -> f64 {
    cosine_dot(f, g, mode)
}

/// Node 2 gets `B` and `β`; outputs `B·β`.
pub fn node2_output_2p(f: &FourierCoeffs, g: &FourierCoeffs, mode: Summation) -> f64 {
    sine_dot(f, g, mode)
}

/// Two-party run: `f = a·φ̃`, `g = b·ψ̃`, node sums over `order` harmonics.
pub fn run_2p_analytic(
    a: f64,
    b: f64,
    params: &NormalizedMaskPair,
    order: usize,
    mode: Summation,
) -> Result<AnalyticOutcome, ProtocolError> {
    let f = player_coefficients(a, &params.alice_mask, order)?;
    let g = player_coefficients(b, &params.bob_mask, order)?;
    Ok(AnalyticOutcome {
        s1: node1_output_2p(&f, &g, mode),
        s2: node2_output_2p(&f, &g, mode),
    })
}

/// Three masks scaled by `η^q₁`, `η^q₂`, `η^(1-q₁-q₂)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedMaskTriple {
    pub masks: [SeriesFunction; 3],
    pub eta: f64,
    pub q1: f64,
    pub q2: f64,
}

impl NormalizedMaskTriple {
    pub fn new(raw: &[SeriesFunction; 3], q1: f64, q2: f64) -> Result<Self, ProtocolError> {
        if !(q1 > 0.0 && q2 > 0.0 && q1 + q2 < 1.0) {
            return Err(ProtocolError::InvalidParams(format!(
                "need q1, q2 > 0 and q1 + q2 < 1, got {q1}, {q2}"
            )));
        }
        let eta = 1.0 / normalization_three(&raw[0], &raw[1], &raw[2])?;
        Ok(Self {
            masks: [
                raw[0].scale(signed_power(eta, q1, true)),
                raw[1].scale(signed_power(eta, q2, false)),
                raw[2].scale(signed_power(eta, 1.0 - q1 - q2, false)),
            ],
            eta,
            q1,
            q2,
        })
    }
}

/// Three-party run: node 1 outputs `½a₀α₀γ₀ + ½(A+B)·(α+β)·(γ+ϱ)`, node 2
/// outputs `½(A-B)·(α-β)·(γ-ϱ)`.
pub fn run_3p_analytic(
    secrets: [f64; 3],
    masks: &NormalizedMaskTriple,
    order: usize,
) -> Result<AnalyticOutcome, ProtocolError> {
    let f = player_coefficients(secrets[0], &masks.masks[0], order)?;
    let g = player_coefficients(secrets[1], &masks.masks[1], order)?;
    let h = player_coefficients(secrets[2], &masks.masks[2], order)?;
    let (s1, s2) = three_input_shares(&f, &g, &h);
    Ok(AnalyticOutcome { s1, s2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{QuarterWaveParams, Term};
    use std::f64::consts::PI;

    fn unit_pair(q: f64) -> NormalizedMaskPair {
        QuarterWaveParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap().normalized(q).unwrap()
    }

    #[test]
    fn three_times_five() {
        let out = run_2p_analytic(3.0, 5.0, &unit_pair(0.5), 10_000, Summation::Extrapolated).unwrap();
        assert!((out.sum() - 15.0).abs() < 1e-6, "{}", out.sum());
        let out = run_2p_analytic(0.0, 5.0, &unit_pair(0.5), 100, Summation::Extrapolated).unwrap();
        assert_eq!(out.sum(), 0.0);
    }

    #[test]
    fn node_values_match_closed_form() {
        let p = QuarterWaveParams::new(1.3, 0.6, 0.9, 1.7, 1.0).unwrap();
        let z = p.zeros(2.0, -1.5, 0.5).unwrap();
        let out = run_2p_analytic(2.0, -1.5, &p.normalized(0.5).unwrap(), 4000, Summation::Extrapolated).unwrap();
        let node = 3.0 * PI / 16.0;
        assert!((out.s1 - node * z.a0 * z.alpha0).abs() < 1e-9);
        assert!((out.s2 - node * z.a0_hat * z.alpha0_hat).abs() < 1e-6);
    }

    #[test]
    fn exponent_split_does_not_matter() {
        let results: Vec<f64> = [0.25, 0.5, 0.75]
            .iter()
            .map(|q| run_2p_analytic(3.0, 5.0, &unit_pair(*q), 2000, Summation::Extrapolated).unwrap().sum())
            .collect();
        assert!((results[0] - results[1]).abs() < 1e-10);
        assert!((results[2] - results[1]).abs() < 1e-10);
    }

    #[test]
    fn truncated_error_shrinks_with_order() {
        let pair = unit_pair(0.5);
        let mut last = f64::INFINITY;
        for order in [16, 32, 64, 128, 256, 512] {
            let err = (run_2p_analytic(3.0, 5.0, &pair, order, Summation::Truncated).unwrap().sum() - 15.0).abs();
            assert!(err < last, "order {order}: {err} >= {last}");
            last = err;
        }
    }

    #[test]
    fn three_party_pure_cosines() {
        let c = SeriesFunction::harmonic_cos(1, 1.0).unwrap();
        let masks = NormalizedMaskTriple::new(&[c.clone(), c.clone(), c], 1.0 / 3.0, 1.0 / 3.0).unwrap();
        assert!((masks.eta - 1.0).abs() < 1e-12);
        let out = run_3p_analytic([1.0, 1.0, 1.0], &masks, 50).unwrap();
        assert!((out.sum() - 1.0).abs() < 1e-10);
        let out = run_3p_analytic([1.0, 2.0, 0.0], &masks, 50).unwrap();
        assert_eq!(out.sum(), 0.0);
    }

    #[test]
    fn three_party_general_masks() {
        let m = |a: f64, w: f64, b: f64, v: f64| {
            SeriesFunction::new(vec![Term::sin(a, w), Term::cos(b, v)], 1.0).unwrap()
        };
        let raw = [m(0.8, 1.1, 0.6, 2.3), m(-0.5, 2.7, 0.9, 0.7), m(0.4, 1.9, -0.7, 1.4)];
        let masks = NormalizedMaskTriple::new(&raw, 0.2, 0.5).unwrap();
        let out = run_3p_analytic([2.0, -3.0, 1.5], &masks, 1000).unwrap();
        assert!((out.sum() + 9.0).abs() < 1e-3, "{}", out.sum());
        assert!(NormalizedMaskTriple::new(&raw, 0.6, 0.5).is_err());
    }
}
