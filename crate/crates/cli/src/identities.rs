//! The real-valued identity suite behind `verify-identities`.

use std::f64::consts::PI;

use parseval_mpc::analytic::masks::{
    alice_closed_form, bob_closed_form, quarter_wave_tail_bound, random_harmonic_cosine_mask, random_two_term_mask,
};
use parseval_mpc::analytic::parseval::three_input_shares;
use parseval_mpc::analytic::sums::{convergent_sum_partial, convergent_sum_tail_bound, omega_partial, omega_tail_bound};
use parseval_mpc::analytic::{
    adjudicate_convolution_law, convergent_sum, convolution_coeffs, fourier_coeffs, integrate, omega, parseval_three,
    parseval_two, parseval_two_recast, AnalyticError, ConvolutionLaw, QuarterWaveParams, SeriesFunction, Summation,
};
use parseval_mpc::protocol::run_2p_analytic;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub identity: &'static str,
    pub description: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Reported only; never fails the suite.
    pub informational: bool,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub detail: serde_json::Value,
}

impl Check {
    fn new(identity: &'static str, description: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            identity,
            description,
            residual,
            tolerance,
            passed: residual <= tolerance,
            informational: false,
            detail: serde_json::Value::Null,
        }
    }

    fn within(mut self, ok: bool) -> Self {
        self.passed = ok;
        self
    }

    fn with(mut self, detail: serde_json::Value) -> Self {
        self.detail = detail;
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub order: usize,
    pub triple_order: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Non-integer draw in `(0, 5)` at least `0.01` from every integer.
pub fn non_integer<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let x: f64 = rng.gen_range(0.0..5.0);
        if (x - x.round()).abs() >= 0.01 {
            return x;
        }
    }
}

/// Floating-point allowance added to analytic tail bounds.
const ROUNDOFF: f64 = 1e-12;

fn max_over<T>(items: impl IntoIterator<Item = T>, mut f: impl FnMut(T) -> Result<f64, AnalyticError>) -> Result<f64, AnalyticError> {
    items.into_iter().try_fold(0.0f64, |m, x| Ok(m.max(f(x)?)))
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<Check>, Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let l = 1.0;
    let mut checks = Vec::new();

    // Harmonics are orthonormal under (1/l)∫.
    let mut ortho = 0.0f64;
    for n in 0..=20 {
        for m in 0..=20 {
            let (cn, cm) = (SeriesFunction::harmonic_cos(n, l)?, SeriesFunction::harmonic_cos(m, l)?);
            let (sn, sm) = (SeriesFunction::harmonic_sin(n, l)?, SeriesFunction::harmonic_sin(m, l)?);
            let delta = |same: bool| if same && n > 0 { 1.0 } else { 0.0 };
            let cc = integrate(&cn, &cm)? - if n == m { if n == 0 { 2.0 } else { 1.0 } } else { 0.0 };
            ortho = ortho
                .max(cc.abs())
                .max((integrate(&sn, &sm)? - delta(n == m)).abs())
                .max(integrate(&sn, &cm)?.abs());
        }
    }
    checks.push(Check::new("orthonormality", "harmonic sin/cos pairs for n, n' <= 20", ortho, 1e-12));

    let quarter = SeriesFunction::new(vec![parseval_mpc::analytic::Term::sin(1.0, PI / (4.0 * l))], l)?;
    let q = integrate(&quarter, &quarter)?;
    checks.push(
        Check::new("quarter-wave-square", "(1/l)∫ sin²(πx/4l) = 1 - 2/π", (q - (1.0 - 2.0 / PI)).abs(), 1e-12)
            .with(json!({ "value": q })),
    );

    // Closed-form mask coefficients vs coefficients by integration.
    let mut coeff = 0.0f64;
    for _ in 0..cfg.trials {
        let p = QuarterWaveParams::random(&mut rng, 0.5, 2.0, l)?;
        let (a, b) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let Ok(pair) = p.normalized(0.5) else { continue };
        let z = p.zeros(a, b, 0.5)?;
        let f = fourier_coeffs(&pair.alice_mask.scale(a), 200)?;
        let g = fourier_coeffs(&pair.bob_mask.scale(b), 200)?;
        let fa = alice_closed_form(z.a0, z.a0_hat, 200);
        let gb = bob_closed_form(z.alpha0, z.alpha0_hat, 200);
        coeff = coeff.max((f.a0 - fa.a0).abs()).max((g.a0 - gb.a0).abs());
        for n in 1..=200 {
            coeff = coeff
                .max((f.a(n) - fa.a(n)).abs())
                .max((f.b(n) - fa.b(n)).abs())
                .max((g.a(n) - gb.a(n)).abs())
                .max((g.b(n) - gb.b(n)).abs());
        }
    }
    checks.push(Check::new(
        "closed-form-coefficients",
        "closed-form mask coefficients vs integration, n <= 200",
        coeff,
        1e-9,
    ));

    // Convergent sums: closed form vs partial sums.
    let terms = cfg.order * 10;
    let mut omega_res = 0.0f64;
    let mut omega_tol = 0.0f64;
    let mut sum_res = 0.0f64;
    let mut sum_tol = 0.0f64;
    let (mut omega_within, mut sum_within) = (true, true);
    for _ in 0..cfg.trials {
        let (g, d) = loop {
            let (g, d) = (non_integer(&mut rng), non_integer(&mut rng));
            if (g - d).abs() >= 0.01 {
                break (g, d);
            }
        };
        let (r, t) = ((omega(g)? - omega_partial(g, terms)).abs(), omega_tail_bound(g, terms) + ROUNDOFF);
        omega_within &= r <= t;
        omega_res = omega_res.max(r);
        omega_tol = omega_tol.max(t);
        for w in [false, true] {
            let r = (convergent_sum(g, d, w)? - convergent_sum_partial(g, d, w, terms)).abs();
            let t = convergent_sum_tail_bound(g, d, w, terms) + ROUNDOFF;
            sum_within &= r <= t;
            sum_res = sum_res.max(r);
            sum_tol = sum_tol.max(t);
        }
    }
    // Tolerances are per-draw tail bounds; the largest is reported.
    checks.push(
        Check::new("omega-series", "Ω(γ) closed form vs partial sum, random γ", omega_res, omega_tol)
            .within(omega_within)
            .with(json!({ "terms": terms })),
    );
    checks.push(
        Check::new("convergent-sums", "two-pole sums closed form vs partial sum, random (γ, δ)", sum_res, sum_tol)
            .within(sum_within)
            .with(json!({ "terms": terms })),
    );
    let half = omega(0.5)?;
    checks.push(Check::new("omega-half", "Ω(1/2) = -2", (half + 2.0).abs(), 1e-6).with(json!({ "value": half })));
    let weighted = convergent_sum(0.75, 0.25, true)?;
    checks.push(
        Check::new("weighted-sum", "Σ n²/((9/16 - n²)(1/16 - n²)) = π", (weighted - PI).abs(), 1e-6).with(json!({
            "value": weighted,
            "partial": convergent_sum_partial(0.75, 0.25, true, terms),
            "three_sixteenths_times_value": 3.0 / 16.0 * weighted,
        })),
    );
    let unweighted = convergent_sum(0.75, 0.25, false)?;
    let target = (3.0 * PI / 16.0 - 0.5) * 256.0 / 9.0;
    checks.push(
        Check::new(
            "unweighted-sum",
            "Σ 1/((9/16 - n²)(1/16 - n²)) = (3π/16 - 1/2)·256/9 = 16π/3 - 128/9",
            (unweighted - target).abs().max((unweighted - (16.0 * PI / 3.0 - 128.0 / 9.0)).abs()),
            1e-6,
        )
        .with(json!({
            "value": unweighted,
            "closed_form": target,
            "partial": convergent_sum_partial(0.75, 0.25, false, terms),
        })),
    );

    // Two-input Parseval on the quarter-wave masks, against the tail bound.
    let mut par_res = 0.0f64;
    let mut par_tol = 0.0f64;
    let mut norm_res = 0.0f64;
    let mut recast = 0.0f64;
    let mut e2e = 0.0f64;
    let mut par_within = true;
    for _ in 0..cfg.trials {
        let p = QuarterWaveParams::random(&mut rng, 0.5, 2.0, l)?;
        let Ok(pair) = p.normalized(0.5) else { continue };
        let (a, b) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let (f, g) = (pair.alice_mask.scale(a), pair.bob_mask.scale(b));
        let z = p.zeros(a, b, 0.5)?;
        let (fc, gc) = (alice_closed_form(z.a0, z.a0_hat, cfg.order), bob_closed_form(z.alpha0, z.alpha0_hat, cfg.order));
        let (lhs, rhs) = parseval_two(&fc, &gc, &f, &g)?;
        let bound = quarter_wave_tail_bound(&z, cfg.order) + ROUNDOFF;
        par_within &= (lhs - rhs).abs() <= bound;
        par_res = par_res.max((lhs - rhs).abs());
        par_tol = par_tol.max(bound);
        norm_res = norm_res.max((pair.normalization()? - 1.0).abs());
        recast = recast.max((parseval_two_recast(&fc, &gc) - lhs).abs() / (1.0 + lhs.abs()));
        let out = run_2p_analytic(a, b, &pair, cfg.order, Summation::Extrapolated)?;
        e2e = e2e.max((out.sum() - a * b).abs());
    }
    checks.push(Check::new("normalization", "(1/l)∫ φ̃ψ̃ = 1", norm_res, 1e-12));
    checks.push(
        Check::new("parseval-two", "A·α + B·β = (1/l)∫fg within the truncation tail bound", par_res, par_tol)
            .within(par_within)
            .with(json!({ "order": cfg.order })),
    );
    checks.push(Check::new("parseval-recast", "sum/difference form equals the plain dot product", recast, 1e-12));
    checks.push(
        Check::new("two-party-end-to-end", "node outputs sum to ab (extrapolated tail)", e2e, 1e-4)
            .with(json!({ "order": cfg.order })),
    );

    // Convolution coefficients: which law matches the integration oracle.
    let pairs: Vec<(SeriesFunction, SeriesFunction)> = (0..cfg.trials)
        .map(|_| Ok((random_two_term_mask(&mut rng, l)?, random_two_term_mask(&mut rng, l)?)))
        .collect::<Result<_, AnalyticError>>()?;
    let law = adjudicate_convolution_law(&pairs, 20, 1e-6)?;
    checks.push(
        Check::new(
            "convolution-law",
            "convolution coefficients of the oracle-matching law vs integration",
            law.standard_max_residual.min(law.printed_max_residual),
            1e-6,
        )
        .with(json!({
            "matched": law.matched.map(|m| m.name()),
            "standard_max_residual": law.standard_max_residual,
            "printed_max_residual": law.printed_max_residual,
        })),
    );
    let mut printed = Check::new(
        "convolution-law-printed",
        "the alternative printed coefficient law vs integration",
        law.printed_max_residual,
        1e-6,
    );
    printed.informational = true;
    checks.push(printed);

    let comm = max_over(&pairs, |(f, g)| {
        let (fc, gc) = (fourier_coeffs(f, 50)?, fourier_coeffs(g, 50)?);
        let (x, y) = (
            convolution_coeffs(&fc, &gc, ConvolutionLaw::Standard),
            convolution_coeffs(&gc, &fc, ConvolutionLaw::Standard),
        );
        Ok((0..=50).fold((x.a0 - y.a0).abs(), |m, n| {
            if n == 0 {
                m
            } else {
                m.max((x.a(n) - y.a(n)).abs()).max((x.b(n) - y.b(n)).abs())
            }
        }))
    })?;
    checks.push(Check::new("convolution-commutativity", "coefficients of f⋆g and g⋆f", comm, 1e-15));

    // Three-input identity: random masks and the pure-cosine subfamily.
    let mut three = Vec::new();
    for _ in 0..cfg.trials {
        let (f, g, h) = (
            random_two_term_mask(&mut rng, l)?,
            random_two_term_mask(&mut rng, l)?,
            random_two_term_mask(&mut rng, l)?,
        );
        let (fc, gc, hc) = (
            fourier_coeffs(&f, cfg.triple_order)?,
            fourier_coeffs(&g, cfg.triple_order)?,
            fourier_coeffs(&h, cfg.triple_order)?,
        );
        let (lhs, rhs) = parseval_three(&fc, &gc, &hc, &f, &g, &h)?;
        three.push((lhs, rhs));
    }
    let three_res = three.iter().fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    checks.push(
        Check::new("three-input", "coefficient form vs the four convolution integrals, random masks", three_res, 1e-4)
            .with(json!({ "order": cfg.triple_order, "lhs_rhs": three })),
    );
    let cos_res = max_over(0..cfg.trials, |_| {
        let (f, g, h) = (
            random_harmonic_cosine_mask(&mut rng, l)?,
            random_harmonic_cosine_mask(&mut rng, l)?,
            random_harmonic_cosine_mask(&mut rng, l)?,
        );
        let (fc, gc, hc) = (fourier_coeffs(&f, 8)?, fourier_coeffs(&g, 8)?, fourier_coeffs(&h, 8)?);
        let (lhs, rhs) = parseval_three(&fc, &gc, &hc, &f, &g, &h)?;
        let (s1, s2) = three_input_shares(&fc, &gc, &hc);
        debug_assert!((s1 + s2 - lhs).abs() < 1e-15);
        Ok((lhs - rhs).abs())
    })?;
    checks.push(Check::new("three-input-cosine", "three-input identity on harmonic cosine masks", cos_res, 1e-10));

    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let checks = run_suite(&SuiteConfig {
            order: 2000,
            triple_order: 200,
            trials: 3,
            seed: 1,
        })
        .unwrap();
        for c in &checks {
            assert!(c.passed || c.informational, "{}: {} > {}", c.identity, c.residual, c.tolerance);
        }
    }

    #[test]
    fn non_integer_draws_avoid_poles() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let x = non_integer(&mut rng);
            assert!(x > 0.0 && x < 5.0 && (x - x.round()).abs() >= 0.01);
        }
    }
}
