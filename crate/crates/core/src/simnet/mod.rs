//! Deterministic simulation: configs, per-trial seeds, batches of runs and
//! the statistical secrecy experiment.
//!
//! Trial `i` of a batch seeded with `s` uses the `i`-th output (zero-based)
//! of a splitmix64 generator started at `s`, i.e.
//! `mix(s + (i + 1)·0x9E3779B97F4A7C15)`, and seeds a `ChaCha8Rng` with it.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod sim;
pub mod stats;

pub use sim::{SimOutcome, Simulator};
pub use stats::{
    independence_test, secrecy_experiment, Binning, ChiSquaredResult, ComponentSummary, SecrecyConfig, SecrecyReport,
    ViewHistogram,
};

use crate::analytic::masks::random_two_term_mask;
use crate::analytic::{QuarterWaveParams, Summation};
use crate::field::{FieldElement, PrimeField};
use crate::protocol::{
    round_robin_partition, run_2p_analytic_transcript, run_2p_exact, run_3p_analytic_transcript, run_np_discrete,
    trusty_offline_np, ForcedParams, NormalizationMode, NormalizedMaskTriple, OfflineConfig, ProtocolError,
    ProtocolKind, Transcript, Value,
};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `i` in a batch seeded with `base`.
pub fn trial_seed(base: u64, i: u64) -> u64 {
    splitmix64(base.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN)))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("histograms differ in component or binning")]
    IncompatibleHistograms,
    #[error("{total} samples over {bins} bins is below the minimum average count")]
    TooFewCounts { total: u64, bins: usize },
}

fn default_prime() -> u64 {
    101
}

fn default_trials() -> usize {
    1
}

/// A batch of runs of one protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_prime")]
    pub prime: u64,
    pub protocol: ProtocolKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Integers below `prime` for the exact protocols, reals otherwise.
    pub secrets: Vec<f64>,
    #[serde(default)]
    pub mode: NormalizationMode,
    /// Harmonics per player in the real-valued protocols.
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub nodes: Option<usize>,
    #[serde(default)]
    pub length: Option<usize>,
    #[serde(default)]
    pub force_params: Option<ForcedParams>,
    /// Alice's share of the normalization exponent in the two-party
    /// real-valued run.
    #[serde(default)]
    pub q: Option<f64>,
}

pub const DEFAULT_ORDER: usize = 1000;
pub const DEFAULT_LENGTH: usize = 8;
pub const DEFAULT_NODES: usize = 2;

impl SimConfig {
    pub fn new(protocol: ProtocolKind, prime: u64, secrets: Vec<f64>) -> Self {
        Self {
            prime,
            protocol,
            seed: 0,
            trials: 1,
            secrets,
            mode: NormalizationMode::Exponent,
            order: None,
            nodes: None,
            length: None,
            force_params: None,
            q: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self, SimError> {
        serde_json::from_str(s).map_err(|e| SimError::Config(e.to_string()))
    }

    fn is_exact(&self) -> bool {
        matches!(self.protocol, ProtocolKind::TwoPartyExact | ProtocolKind::NPartyDiscrete)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::Config("trials must be at least 1".into()));
        }
        let arity_ok = match self.protocol {
            ProtocolKind::TwoPartyExact | ProtocolKind::TwoPartyAnalytic => self.secrets.len() == 2,
            ProtocolKind::ThreePartyAnalytic => self.secrets.len() == 3,
            ProtocolKind::NPartyDiscrete => self.secrets.len() >= 2,
        };
        if !arity_ok {
            return Err(SimError::Config(format!(
                "{} secrets do not fit protocol {}",
                self.secrets.len(),
                self.protocol.name()
            )));
        }
        if self.is_exact() {
            PrimeField::new(self.prime).map_err(|e| SimError::Config(e.to_string()))?;
            for &s in &self.secrets {
                if !(s >= 0.0 && s.fract() == 0.0 && s < self.prime as f64) {
                    return Err(SimError::Config(format!("secret {s} is not an integer in 0..{}", self.prime)));
                }
            }
        } else if self.secrets.iter().any(|s| !s.is_finite()) {
            return Err(SimError::Config("secrets must be finite".into()));
        }
        if self.force_params.is_some() && self.protocol != ProtocolKind::TwoPartyExact {
            return Err(SimError::Config("force_params only applies to two-party-exact".into()));
        }
        if let Some(q) = self.q {
            if !(q > 0.0 && q < 1.0) {
                return Err(SimError::Config(format!("q must lie in (0, 1), got {q}")));
            }
        }
        if self.order == Some(0) {
            return Err(SimError::Config("order must be positive".into()));
        }
        Ok(())
    }

    fn field_secrets(&self, field: PrimeField) -> Vec<FieldElement> {
        self.secrets.iter().map(|s| field.element(*s as u64)).collect()
    }
}

/// Checks what can be checked from the transcript alone: every exact node
/// output is pure and the reconstruction equals the product of the secrets.
pub fn verify_exact(t: &Transcript, secrets: &[FieldElement]) -> Result<(), SimError> {
    let Some(field) = secrets.first().map(|s| s.field()) else {
        return Err(SimError::Config("no secrets".into()));
    };
    for o in &t.outputs {
        if let Value::Tagged(x) = &o.value {
            if !x.is_pure() {
                return Err(SimError::InvariantViolation(format!(
                    "{} output carries π^({}/2)·√2^{}",
                    o.node,
                    x.pi_halves(),
                    x.sqrt2_exponent()
                )));
            }
        }
    }
    let expected = secrets.iter().fold(field.one(), |acc, s| acc * *s);
    match t.reconstructed_field() {
        Some(x) if x == expected => Ok(()),
        other => Err(SimError::InvariantViolation(format!(
            "reconstructed {other:?} instead of {expected}"
        ))),
    }
}

/// `|reconstructed − Π secrets|` for the real-valued protocols.
pub fn real_residual(t: &Transcript, secrets: &[f64]) -> Option<f64> {
    t.reconstructed_real().map(|x| (x - secrets.iter().product::<f64>()).abs())
}

/// Runs `cfg.trials` independent trials. The exact protocols are verified
/// trial by trial; the real-valued ones are returned as they are and their
/// residuals can be read with [`real_residual`].
pub fn run_trials(cfg: &SimConfig) -> Result<Vec<Transcript>, SimError> {
    cfg.validate()?;
    (0..cfg.trials as u64)
        .map(|i| run_one(cfg, trial_seed(cfg.seed, i)))
        .collect()
}

fn run_one(cfg: &SimConfig, seed: u64) -> Result<Transcript, SimError> {
    let order = cfg.order.unwrap_or(DEFAULT_ORDER);
    match cfg.protocol {
        ProtocolKind::TwoPartyExact => {
            let field = PrimeField::new(cfg.prime).map_err(|e| SimError::Config(e.to_string()))?;
            let secrets = cfg.field_secrets(field);
            let offline = OfflineConfig {
                mode: cfg.mode,
                forced: cfg.force_params,
                fixed_tau3: None,
            };
            let t = run_2p_exact(field, secrets[0], secrets[1], seed, &offline)?;
            verify_exact(&t, &secrets)?;
            Ok(t)
        }
        ProtocolKind::NPartyDiscrete => {
            let field = PrimeField::new(cfg.prime).map_err(|e| SimError::Config(e.to_string()))?;
            let secrets = cfg.field_secrets(field);
            let length = cfg.length.unwrap_or(DEFAULT_LENGTH);
            let nodes = cfg.nodes.unwrap_or(DEFAULT_NODES);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let params = trusty_offline_np(field, secrets.len(), length, round_robin_partition(length, nodes), &mut rng)?;
            let t = run_np_discrete(&secrets, &params, seed)?;
            verify_exact(&t, &secrets)?;
            Ok(t)
        }
        ProtocolKind::TwoPartyAnalytic => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pair = loop {
                let p = QuarterWaveParams::random(&mut rng, 0.5, 2.0, PI).map_err(ProtocolError::from)?;
                if let Ok(pair) = p.normalized(cfg.q.unwrap_or(0.5)) {
                    break pair;
                }
            };
            Ok(run_2p_analytic_transcript(
                cfg.secrets[0],
                cfg.secrets[1],
                &pair,
                order,
                Summation::Extrapolated,
                seed,
            )?)
        }
        ProtocolKind::ThreePartyAnalytic => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let triple = loop {
                let raw = [
                    random_two_term_mask(&mut rng, PI).map_err(ProtocolError::from)?,
                    random_two_term_mask(&mut rng, PI).map_err(ProtocolError::from)?,
                    random_two_term_mask(&mut rng, PI).map_err(ProtocolError::from)?,
                ];
                if let Ok(t) = NormalizedMaskTriple::new(&raw, 1.0 / 3.0, 1.0 / 3.0) {
                    break t;
                }
            };
            let secrets = [cfg.secrets[0], cfg.secrets[1], cfg.secrets[2]];
            Ok(run_3p_analytic_transcript(secrets, &triple, order, seed)?)
        }
    }
}
