//! Histograms of view components and the two-sample chi-squared test.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{trial_seed, SimError};
use crate::field::PrimeField;
use crate::protocol::{run_2p_exact_direct, AdversaryView, NormalizationMode, OfflineConfig, ViewComponent};

/// Largest prime that still gets one bin per field value.
pub const PER_VALUE_LIMIT: u64 = 1021;
/// Bucket count for larger primes.
pub const BUCKETS: usize = 256;
/// Minimum average count per bin for the chi-squared approximation.
pub const MIN_AVERAGE_COUNT: f64 = 100.0;
pub const SIGNIFICANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Binning {
    /// One bin per residue `0..p`.
    PerValue { modulus: u64 },
    /// `count` equal-width buckets of `0..p`.
    Buckets { modulus: u64, count: usize },
}

impl Binning {
    pub fn for_prime(p: u64) -> Self {
        if p <= PER_VALUE_LIMIT {
            Binning::PerValue { modulus: p }
        } else {
            Binning::Buckets {
                modulus: p,
                count: BUCKETS,
            }
        }
    }

    pub fn bins(&self) -> usize {
        match *self {
            Binning::PerValue { modulus } => modulus as usize,
            Binning::Buckets { count, .. } => count,
        }
    }

    pub fn bin_of(&self, value: u64) -> usize {
        match *self {
            Binning::PerValue { .. } => value as usize,
            Binning::Buckets { modulus, count } => ((value as u128 * count as u128) / modulus as u128) as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViewHistogram {
    pub component: ViewComponent,
    pub binning: Binning,
    pub bins: Vec<u64>,
    pub total: u64,
}

impl ViewHistogram {
    pub fn new(component: ViewComponent, binning: Binning) -> Self {
        Self {
            component,
            binning,
            bins: vec![0; binning.bins()],
            total: 0,
        }
    }

    pub fn record(&mut self, value: u64) {
        self.bins[self.binning.bin_of(value)] += 1;
        self.total += 1;
    }

    pub fn record_view(&mut self, view: &AdversaryView) {
        self.record(view.component(self.component).value());
    }

    /// Adds another histogram over the same component and binning.
    pub fn merge(&mut self, other: &Self) -> Result<(), SimError> {
        if self.component != other.component || self.binning != other.binning {
            return Err(SimError::IncompatibleHistograms);
        }
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquaredResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

impl ChiSquaredResult {
    pub fn rejects(&self, significance: f64) -> bool {
        self.p_value < significance
    }
}

/// Two-sample chi-squared test of homogeneity with pooled expectations.
/// Bins empty in both samples are dropped; `df = nonempty bins - 1`.
pub fn independence_test(a: &ViewHistogram, b: &ViewHistogram) -> Result<ChiSquaredResult, SimError> {
    if a.component != b.component || a.binning != b.binning {
        return Err(SimError::IncompatibleHistograms);
    }
    let bins = a.binning.bins() as f64;
    for h in [a, b] {
        if (h.total as f64) / bins < MIN_AVERAGE_COUNT {
            return Err(SimError::TooFewCounts {
                total: h.total,
                bins: a.binning.bins(),
            });
        }
    }
    let (ra, rb) = (a.total as f64, b.total as f64);
    let n = ra + rb;
    let mut statistic = 0.0;
    let mut used = 0usize;
    for (&x, &y) in a.bins.iter().zip(&b.bins) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        used += 1;
        let (ea, eb) = (ra * col / n, rb * col / n);
        statistic += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    if used < 2 {
        return Ok(ChiSquaredResult {
            statistic: 0.0,
            degrees_of_freedom: 0,
            p_value: 1.0,
        });
    }
    let df = used - 1;
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    Ok(ChiSquaredResult {
        statistic,
        degrees_of_freedom: df,
        p_value: dist.sf(statistic),
    })
}

/// Settings for the secrecy experiment: the views produced under two fixed
/// secret pairs are compared component by component.
#[derive(Debug, Clone, Serialize)]
pub struct SecrecyConfig {
    pub prime: u64,
    pub trials: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub first: (u64, u64),
    pub second: (u64, u64),
    pub mode: NormalizationMode,
    pub components: Vec<ViewComponent>,
    /// Negative control: pin `τ₃` to this value.
    pub fixed_tau3: Option<u64>,
}

impl SecrecyConfig {
    pub fn new(prime: u64, trials: usize, repetitions: usize, seed: u64) -> Self {
        Self {
            prime,
            trials,
            repetitions,
            seed,
            first: (1, 1),
            second: (2, 2),
            mode: NormalizationMode::Exponent,
            components: ViewComponent::ALL.to_vec(),
            fixed_tau3: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentSummary {
    pub component: ViewComponent,
    pub rejections: usize,
    pub repetitions: usize,
    pub rejection_rate: f64,
    pub min_p_value: f64,
    pub median_p_value: f64,
    /// The test from the first repetition, with its histograms.
    pub first: ChiSquaredResult,
    pub histograms: (ViewHistogram, ViewHistogram),
}

#[derive(Debug, Clone, Serialize)]
pub struct SecrecyReport {
    pub config: SecrecyConfig,
    pub significance: f64,
    pub components: Vec<ComponentSummary>,
    /// Runs executed; each was checked for purity and exactness.
    pub runs_checked: u64,
}

impl SecrecyReport {
    pub fn summary(&self, c: ViewComponent) -> Option<&ComponentSummary> {
        self.components.iter().find(|s| s.component == c)
    }
}

fn collect(
    field: PrimeField,
    secrets: (u64, u64),
    trials: usize,
    base: u64,
    cfg: &OfflineConfig,
    components: &[ViewComponent],
) -> Result<Vec<ViewHistogram>, SimError> {
    let binning = Binning::for_prime(field.modulus());
    let mut hists: Vec<ViewHistogram> = components.iter().map(|c| ViewHistogram::new(*c, binning)).collect();
    let (a, b) = (field.element(secrets.0), field.element(secrets.1));
    let expected = a * b;
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(base, i as u64));
        let run = run_2p_exact_direct(field, a, b, &mut rng, cfg)?;
        if run.reconstructed != expected {
            return Err(SimError::InvariantViolation(format!(
                "trial {i}: reconstructed {} instead of {}",
                run.reconstructed, expected
            )));
        }
        let view = AdversaryView::from_run(&run)?;
        for h in hists.iter_mut() {
            h.record_view(&view);
        }
    }
    Ok(hists)
}

/// Runs `repetitions` independent experiments of `trials` runs per secret
/// pair and tests each component for a difference in distribution.
pub fn secrecy_experiment(cfg: &SecrecyConfig) -> Result<SecrecyReport, SimError> {
    let field = PrimeField::new(cfg.prime).map_err(|e| SimError::Config(e.to_string()))?;
    for s in [cfg.first.0, cfg.first.1, cfg.second.0, cfg.second.1] {
        if s >= cfg.prime {
            return Err(SimError::Config(format!("secret {s} is not below the prime {}", cfg.prime)));
        }
    }
    if cfg.trials == 0 || cfg.repetitions == 0 {
        return Err(SimError::Config("trials and repetitions must be positive".into()));
    }
    let offline = OfflineConfig {
        mode: cfg.mode,
        forced: None,
        fixed_tau3: cfg.fixed_tau3,
    };
    let mut p_values: Vec<Vec<f64>> = vec![Vec::new(); cfg.components.len()];
    let mut firsts: Vec<Option<(ChiSquaredResult, ViewHistogram, ViewHistogram)>> = vec![None; cfg.components.len()];
    for r in 0..cfg.repetitions as u64 {
        // Two disjoint seed streams per repetition.
        let base_a = trial_seed(cfg.seed, 2 * r);
        let base_b = trial_seed(cfg.seed, 2 * r + 1);
        let ha = collect(field, cfg.first, cfg.trials, base_a, &offline, &cfg.components)?;
        let hb = collect(field, cfg.second, cfg.trials, base_b, &offline, &cfg.components)?;
        for (k, (x, y)) in ha.into_iter().zip(hb).enumerate() {
            let t = independence_test(&x, &y)?;
            p_values[k].push(t.p_value);
            if firsts[k].is_none() {
                firsts[k] = Some((t, x, y));
            }
        }
    }
    let components = cfg
        .components
        .iter()
        .zip(p_values)
        .zip(firsts)
        .map(|((c, mut ps), first)| {
            let rejections = ps.iter().filter(|p| **p < SIGNIFICANCE).count();
            ps.sort_by(f64::total_cmp);
            let (t, x, y) = first.expect("at least one repetition");
            ComponentSummary {
                component: *c,
                rejections,
                repetitions: cfg.repetitions,
                rejection_rate: rejections as f64 / cfg.repetitions as f64,
                min_p_value: ps[0],
                median_p_value: ps[ps.len() / 2],
                first: t,
                histograms: (x, y),
            }
        })
        .collect();
    Ok(SecrecyReport {
        config: cfg.clone(),
        significance: SIGNIFICANCE,
        components,
        runs_checked: 2 * (cfg.trials as u64) * (cfg.repetitions as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn hist_from(values: impl Iterator<Item = u64>, binning: Binning) -> ViewHistogram {
        let mut h = ViewHistogram::new(ViewComponent::A0, binning);
        values.for_each(|v| h.record(v));
        h
    }

    #[test]
    fn binning_rules() {
        assert_eq!(Binning::for_prime(101).bins(), 101);
        assert_eq!(Binning::for_prime(1021).bins(), 1021);
        let b = Binning::for_prime(65537);
        assert_eq!(b.bins(), 256);
        assert_eq!(b.bin_of(0), 0);
        assert_eq!(b.bin_of(65536), 255);
    }

    #[test]
    fn identical_histograms_do_not_reject() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = Binning::for_prime(101);
        let h = hist_from((0..20_000).map(|_| rng.gen_range(0..101)), b);
        let t = independence_test(&h, &h).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.degrees_of_freedom, 100);
        assert!((t.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn known_statistic() {
        // 2x2 table [[210, 190], [190, 210]]: χ² = 2.
        let b = Binning::PerValue { modulus: 2 };
        let mut x = ViewHistogram::new(ViewComponent::A0, b);
        let mut y = ViewHistogram::new(ViewComponent::A0, b);
        x.bins = vec![210, 190];
        x.total = 400;
        y.bins = vec![190, 210];
        y.total = 400;
        let t = independence_test(&x, &y).unwrap();
        assert!((t.statistic - 2.0).abs() < 1e-12);
        assert_eq!(t.degrees_of_freedom, 1);
        assert!((t.p_value - 0.157299207050285).abs() < 1e-9);
    }

    #[test]
    fn shifted_distribution_rejects() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = Binning::for_prime(101);
        let x = hist_from((0..20_000).map(|_| rng.gen_range(0..101)), b);
        let y = hist_from((0..20_000).map(|_| rng.gen_range(0..60)), b);
        assert!(independence_test(&x, &y).unwrap().p_value < 1e-12);
    }

    #[test]
    fn precondition_and_compatibility() {
        let b = Binning::for_prime(101);
        let small = hist_from(0..100, b);
        assert!(matches!(independence_test(&small, &small), Err(SimError::TooFewCounts { .. })));
        let big = hist_from((0..20_000).map(|v| v % 101), b);
        let mut other = big.clone();
        other.component = ViewComponent::S1;
        assert!(matches!(independence_test(&big, &other), Err(SimError::IncompatibleHistograms)));
        let mut merged = big.clone();
        merged.merge(&big).unwrap();
        assert_eq!(merged.total, 40_000);
        assert_eq!(merged.bins.iter().sum::<u64>(), merged.total);
    }

    #[test]
    fn small_experiment_and_control() {
        let mut cfg = SecrecyConfig::new(101, 20_000, 3, 7);
        cfg.components = ViewComponent::SHARES.to_vec();
        let report = secrecy_experiment(&cfg).unwrap();
        assert_eq!(report.runs_checked, 120_000);
        for s in &report.components {
            assert_eq!(s.histograms.0.total, 20_000);
        }
        cfg.fixed_tau3 = Some(1);
        cfg.repetitions = 1;
        cfg.components = vec![ViewComponent::A0];
        let report = secrecy_experiment(&cfg).unwrap();
        assert!(report.components[0].first.p_value < 1e-6);
    }
}
