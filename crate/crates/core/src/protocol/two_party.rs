//! Exact two-party multiplication over `F_p`.
//!
//! Masks are `φ = τ₁ sin(πx/4l) + τ₃ cos(3πx/4l)` and
//! `ψ = σ₁ sin(3πx/4l) + σ₃ cos(πx/4l)`. Every real constant that appears in
//! their Fourier coefficients is a rational times a power of π and √2, so the
//! whole computation lives in `F_p` once those two are carried as formal
//! exponents:
//!
//! * `η = π / (2(τ₁σ₁ + τ₃σ₃))` has core `inv(2Σ)` and `π^1`;
//! * `a₀ = (4√2/3π)·a·τ₃·η^(1/2)`, `â₀` the same with `τ₁`;
//! * `α₀ = (4√2/π)·b·σ₃·η^(1/2)`, `α̂₀` the same with `σ₁`;
//! * node `i` outputs `(3π/16)` times the product of its two shares.
//!
//! π exponents are stored in half-units, so `η^(1/2)` carries `pi_halves = 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::field::{FieldElement, PrimeField};
use crate::tagged::TaggedScalar;

/// How Trusty splits `η` between the two players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    /// Both players get `η^(1/2)`; needs `inv(2Σ)` to be a square.
    #[default]
    Exponent,
    /// Alice gets `u·π`, Bob gets `inv(2Σ)·u⁻¹` for a uniform unit `u`.
    Multiplicative,
}

impl NormalizationMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exponent" => Some(Self::Exponent),
            "multiplicative" => Some(Self::Multiplicative),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Exponent => "exponent",
            Self::Multiplicative => "multiplicative",
        }
    }
}

/// Mask parameters fixed in advance instead of drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForcedParams {
    pub tau1: u64,
    pub tau3: u64,
    pub sigma1: u64,
    pub sigma3: u64,
    /// Square root of `inv(2Σ)` to use instead of the canonical one.
    pub rho: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct OfflineConfig {
    pub mode: NormalizationMode,
    pub forced: Option<ForcedParams>,
    /// Pins `τ₃` to this value on every draw. Breaks secrecy on purpose and
    /// exists for negative-control experiments only.
    pub fixed_tau3: Option<u64>,
}

/// What Trusty sends to one player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlayerPacket {
    /// `τ₁` for Alice, `σ₁` for Bob.
    pub sin_param: FieldElement,
    /// `τ₃` for Alice, `σ₃` for Bob.
    pub cos_param: FieldElement,
    pub eta: TaggedScalar,
    /// This player's share of the normalization.
    pub norm: TaggedScalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OfflineParams2P {
    pub tau1: FieldElement,
    pub tau3: FieldElement,
    pub sigma1: FieldElement,
    pub sigma3: FieldElement,
    /// `inv(2(τ₁σ₁ + τ₃σ₃))`.
    pub eta_core: FieldElement,
    /// `ρ² = eta_core`; present in exponent mode.
    pub rho: Option<FieldElement>,
    pub mode: NormalizationMode,
    pub alice_packet: PlayerPacket,
    pub bob_packet: PlayerPacket,
    /// Draws rejected before these parameters were accepted.
    pub resamples: u32,
}

impl OfflineParams2P {
    /// `η` as a tagged scalar: core `eta_core`, one power of π.
    pub fn eta(&self) -> TaggedScalar {
        self.alice_packet.eta
    }
}

fn eta_tag(core: FieldElement) -> TaggedScalar {
    TaggedScalar::new(core, 2, 0)
}

/// `inv(2(τ₁σ₁ + τ₃σ₃))`, or `None` when the sum vanishes.
fn eta_core(t1: FieldElement, t3: FieldElement, s1: FieldElement, s3: FieldElement) -> Option<FieldElement> {
    let two = t1.field().element(2);
    (two * (t1 * s1 + t3 * s3)).inv().ok()
}

fn build(
    field: PrimeField,
    (t1, t3, s1, s3): (FieldElement, FieldElement, FieldElement, FieldElement),
    eta_core: FieldElement,
    rho: Option<FieldElement>,
    alice_unit: Option<FieldElement>,
    mode: NormalizationMode,
    resamples: u32,
) -> OfflineParams2P {
    let eta = eta_tag(eta_core);
    let (norm_a, norm_b) = match mode {
        NormalizationMode::Exponent => {
            let half = TaggedScalar::new(rho.expect("exponent mode has a root"), 1, 0);
            (half, half)
        }
        NormalizationMode::Multiplicative => {
            let u = alice_unit.unwrap_or_else(|| field.one());
            let u_inv = u.inv().expect("unit");
            (TaggedScalar::new(u, 2, 0), TaggedScalar::new(eta_core * u_inv, 0, 0))
        }
    };
    OfflineParams2P {
        tau1: t1,
        tau3: t3,
        sigma1: s1,
        sigma3: s3,
        eta_core,
        rho,
        mode,
        alice_packet: PlayerPacket {
            sin_param: t1,
            cos_param: t3,
            eta,
            norm: norm_a,
        },
        bob_packet: PlayerPacket {
            sin_param: s1,
            cos_param: s3,
            eta,
            norm: norm_b,
        },
        resamples,
    }
}

fn forced_params(field: PrimeField, f: &ForcedParams, mode: NormalizationMode) -> Result<OfflineParams2P, ProtocolError> {
    let p = field.modulus();
    let check = |name: &str, v: u64| -> Result<FieldElement, ProtocolError> {
        if v == 0 || v >= p {
            Err(ProtocolError::InvalidParams(format!("{name} = {v} must lie in [1, {p})")))
        } else {
            Ok(field.element(v))
        }
    };
    let t1 = check("tau1", f.tau1)?;
    let t3 = check("tau3", f.tau3)?;
    let s1 = check("sigma1", f.sigma1)?;
    let s3 = check("sigma3", f.sigma3)?;
    let core = eta_core(t1, t3, s1, s3)
        .ok_or_else(|| ProtocolError::InvalidParams("tau1*sigma1 + tau3*sigma3 vanishes".into()))?;
    let rho = match mode {
        NormalizationMode::Exponent => {
            let canonical = core.sqrt().ok_or_else(|| {
                ProtocolError::InvalidParams(format!("eta core {core} is not a square mod {p}"))
            })?;
            match f.rho {
                None => Some(canonical),
                Some(r) => {
                    let r = check("rho", r)?;
                    if r * r != core {
                        return Err(ProtocolError::InvalidParams(format!("rho = {r} does not square to {core}")));
                    }
                    Some(r)
                }
            }
        }
        NormalizationMode::Multiplicative => {
            if f.rho.is_some() {
                return Err(ProtocolError::InvalidParams("rho only applies in exponent mode".into()));
            }
            None
        }
    };
    Ok(build(field, (t1, t3, s1, s3), core, rho, None, mode, 0))
}

/// Trusty's offline phase: draws `τ₁, τ₃, σ₁, σ₃` uniformly from `F_p \ {0}`,
/// rejecting draws where `2Σ = 0` or (in exponent mode) `inv(2Σ)` has no
/// square root.
pub fn trusty_offline_2p<R: Rng + ?Sized>(
    field: PrimeField,
    rng: &mut R,
    cfg: &OfflineConfig,
) -> Result<OfflineParams2P, ProtocolError> {
    if field.modulus() <= 3 {
        return Err(ProtocolError::InvalidParams("the two-party protocol needs p > 3".into()));
    }
    if let Some(f) = &cfg.forced {
        return forced_params(field, f, cfg.mode);
    }
    let fixed = match cfg.fixed_tau3 {
        Some(v) if v == 0 || v >= field.modulus() => {
            return Err(ProtocolError::InvalidParams(format!("fixed tau3 = {v} out of range")))
        }
        Some(v) => Some(field.element(v)),
        None => None,
    };
    let mut resamples = 0;
    loop {
        let t1 = field.random_nonzero(rng);
        let t3 = field.random_nonzero(rng);
        let s1 = field.random_nonzero(rng);
        let s3 = field.random_nonzero(rng);
        let t3 = fixed.unwrap_or(t3);
        if let Some(core) = eta_core(t1, t3, s1, s3) {
            match cfg.mode {
                NormalizationMode::Exponent => {
                    if let Some(rho) = core.sqrt() {
                        return Ok(build(field, (t1, t3, s1, s3), core, Some(rho), None, cfg.mode, resamples));
                    }
                }
                NormalizationMode::Multiplicative => {
                    let u = field.random_nonzero(rng);
                    return Ok(build(field, (t1, t3, s1, s3), core, None, Some(u), cfg.mode, resamples));
                }
            }
        }
        resamples += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Player2P {
    Alice,
    Bob,
}

impl Player2P {
    /// Public constant in front of `secret·param·norm`: `4√2/(3π)` for Alice,
    /// `4√2/π` for Bob.
    pub fn constant(&self, field: PrimeField) -> TaggedScalar {
        let core = match self {
            Player2P::Alice => field.element(4) * field.element(3).inv().expect("p > 3"),
            Player2P::Bob => field.element(4),
        };
        TaggedScalar::new(core, -2, 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlayerShare2P {
    /// `a₀` (Alice) or `α₀` (Bob).
    pub to_node1: TaggedScalar,
    /// `â₀` (Alice) or `α̂₀` (Bob).
    pub to_node2: TaggedScalar,
}

impl PlayerShare2P {
    /// The shares with the public constant divided out, e.g. `a·τ₃·ρ`.
    pub fn folded(&self, who: Player2P) -> (FieldElement, FieldElement) {
        let c = who.constant(self.to_node1.core().field()).core().inv().expect("unit");
        (self.to_node1.core() * c, self.to_node2.core() * c)
    }
}

/// A player's online phase: `to_node1 = C·secret·cos_param·norm`,
/// `to_node2 = C·secret·sin_param·norm`.
pub fn player_online_2p(who: Player2P, secret: FieldElement, packet: &PlayerPacket) -> Result<PlayerShare2P, ProtocolError> {
    let m = secret.modulus();
    let pieces = [packet.sin_param, packet.cos_param, packet.eta.core(), packet.norm.core()];
    if pieces.iter().any(|x| x.modulus() != m) {
        return Err(ProtocolError::MalformedMessage("packet and secret live in different fields".into()));
    }
    if packet.sin_param.is_zero() || packet.cos_param.is_zero() || packet.norm.core().is_zero() {
        return Err(ProtocolError::MalformedMessage("packet carries a zero mask parameter".into()));
    }
    let field = secret.field();
    let base = who.constant(field).tagged_mul(&packet.norm)?.scale(secret);
    Ok(PlayerShare2P {
        to_node1: base.scale(packet.cos_param),
        to_node2: base.scale(packet.sin_param),
    })
}

/// `3π/16` as a tagged scalar.
pub fn node_constant(field: PrimeField) -> TaggedScalar {
    TaggedScalar::new(field.element(3) * field.element(16).inv().expect("p > 2"), 2, 0)
}

/// Node output `(3π/16)·share_a·share_b`, which must be free of π and √2.
pub fn node_output_2p(share_a: &TaggedScalar, share_b: &TaggedScalar) -> Result<TaggedScalar, ProtocolError> {
    let field = share_a.core().field();
    let s = node_constant(field).tagged_mul(share_a)?.tagged_mul(share_b)?;
    if !s.is_pure() {
        return Err(ProtocolError::Impure {
            pi_halves: s.pi_halves(),
            sqrt2: s.sqrt2_exponent(),
        });
    }
    Ok(s)
}

/// Sum of the node outputs.
pub fn reconstruct(outputs: &[FieldElement]) -> Result<FieldElement, ProtocolError> {
    let first = outputs.first().ok_or(ProtocolError::NoOutputs)?;
    outputs[1..].iter().try_fold(*first, |acc, x| {
        acc.try_add(*x)
            .map_err(|_| ProtocolError::MalformedMessage("outputs from different fields".into()))
    })
}

/// Result of a two-party run computed without messages or transcripts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Exact2PRun {
    pub params: OfflineParams2P,
    pub alice: PlayerShare2P,
    pub bob: PlayerShare2P,
    pub s1: TaggedScalar,
    pub s2: TaggedScalar,
    pub reconstructed: FieldElement,
}

/// The whole protocol as plain function calls.
pub fn run_2p_exact_direct<R: Rng + ?Sized>(
    field: PrimeField,
    a: FieldElement,
    b: FieldElement,
    rng: &mut R,
    cfg: &OfflineConfig,
) -> Result<Exact2PRun, ProtocolError> {
    let params = trusty_offline_2p(field, rng, cfg)?;
    let alice = player_online_2p(Player2P::Alice, a, &params.alice_packet)?;
    let bob = player_online_2p(Player2P::Bob, b, &params.bob_packet)?;
    let s1 = node_output_2p(&alice.to_node1, &bob.to_node1)?;
    let s2 = node_output_2p(&alice.to_node2, &bob.to_node2)?;
    let reconstructed = reconstruct(&[s1.reveal()?, s2.reveal()?])?;
    Ok(Exact2PRun {
        params,
        alice,
        bob,
        s1,
        s2,
        reconstructed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f101() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    fn worked(rho: Option<u64>) -> OfflineConfig {
        OfflineConfig {
            forced: Some(ForcedParams {
                tau1: 2,
                tau3: 7,
                sigma1: 11,
                sigma3: 13,
                rho,
            }),
            ..Default::default()
        }
    }

    #[test]
    fn worked_offline_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = trusty_offline_2p(f101(), &mut rng, &worked(None)).unwrap();
        assert_eq!(p.eta_core.value(), 80);
        assert_eq!(p.rho.unwrap().value(), 22);
        assert_eq!(p.eta().exponents(), (2, 0));
        let p = trusty_offline_2p(f101(), &mut rng, &worked(Some(79))).unwrap();
        assert_eq!(p.rho.unwrap().value(), 79);
        assert!(trusty_offline_2p(f101(), &mut rng, &worked(Some(23))).is_err());
    }

    #[test]
    fn worked_run() {
        let f = f101();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let run = run_2p_exact_direct(f, f.element(3), f.element(5), &mut rng, &worked(Some(79))).unwrap();
        let (a0, a0h) = run.alice.folded(Player2P::Alice);
        let (al0, al0h) = run.bob.folded(Player2P::Bob);
        assert_eq!((a0.value(), a0h.value()), (43, 70));
        assert_eq!((al0.value(), al0h.value()), (85, 2));
        assert_eq!(run.s1.reveal().unwrap().value(), 38);
        assert_eq!(run.s2.reveal().unwrap().value(), 78);
        assert_eq!(run.reconstructed.value(), 15);
        // The canonical root gives the same outputs.
        let run22 = run_2p_exact_direct(f, f.element(3), f.element(5), &mut rng, &worked(None)).unwrap();
        assert_eq!((run22.s1, run22.s2), (run.s1, run.s2));
    }

    #[test]
    fn folded_node_output_is_twice_the_product() {
        let f = f101();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let (a, b) = (f.random(&mut rng), f.random(&mut rng));
            for mode in [NormalizationMode::Exponent, NormalizationMode::Multiplicative] {
                let cfg = OfflineConfig { mode, ..Default::default() };
                let run = run_2p_exact_direct(f, a, b, &mut rng, &cfg).unwrap();
                let (x1, x2) = run.alice.folded(Player2P::Alice);
                let (y1, y2) = run.bob.folded(Player2P::Bob);
                let two = f.element(2);
                assert_eq!(run.s1.core(), two * x1 * y1);
                assert_eq!(run.s2.core(), two * x2 * y2);
                assert_eq!(run.reconstructed, a * b);
            }
        }
    }

    #[test]
    fn impure_combination_is_rejected() {
        let f = f101();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = trusty_offline_2p(f, &mut rng, &OfflineConfig::default()).unwrap();
        let alice = player_online_2p(Player2P::Alice, f.element(3), &p.alice_packet).unwrap();
        let stray = TaggedScalar::new(f.element(1), 1, 0);
        assert!(matches!(
            node_output_2p(&alice.to_node1, &stray),
            Err(ProtocolError::Impure { .. })
        ));
    }

    #[test]
    fn zero_secret_gives_zero_shares() {
        let f = f101();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let run = run_2p_exact_direct(f, f.zero(), f.element(7), &mut rng, &OfflineConfig::default()).unwrap();
        assert!(run.alice.to_node1.core().is_zero() && run.alice.to_node2.core().is_zero());
        assert!(run.reconstructed.is_zero());
    }

    #[test]
    fn seeded_draws_are_deterministic() {
        let f = PrimeField::new(65537).unwrap();
        let cfg = OfflineConfig::default();
        let p1 = trusty_offline_2p(f, &mut ChaCha8Rng::seed_from_u64(5), &cfg).unwrap();
        let p2 = trusty_offline_2p(f, &mut ChaCha8Rng::seed_from_u64(5), &cfg).unwrap();
        assert_eq!(p1, p2);
        let rho = p1.rho.unwrap();
        let two = f.element(2);
        assert_eq!(rho * rho * two * (p1.tau1 * p1.sigma1 + p1.tau3 * p1.sigma3), f.one());
    }

    #[test]
    fn fixed_tau3_control() {
        let f = f101();
        let cfg = OfflineConfig {
            fixed_tau3: Some(5),
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert_eq!(trusty_offline_2p(f, &mut rng, &cfg).unwrap().tau3.value(), 5);
        }
    }

    #[test]
    fn rejects_small_primes_and_bad_forced_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(trusty_offline_2p(PrimeField::new(3).unwrap(), &mut rng, &OfflineConfig::default()).is_err());
        let mut cfg = worked(None);
        cfg.forced.as_mut().unwrap().tau1 = 0;
        assert!(trusty_offline_2p(f101(), &mut rng, &cfg).is_err());
        // 1·1 + 10·10 = 101 ≡ 0.
        let cfg = OfflineConfig {
            forced: Some(ForcedParams {
                tau1: 1,
                tau3: 10,
                sigma1: 1,
                sigma3: 10,
                rho: None,
            }),
            ..Default::default()
        };
        assert!(trusty_offline_2p(f101(), &mut rng, &cfg).is_err());
    }
}
