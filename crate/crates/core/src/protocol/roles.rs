//! Trusty, player and node state machines, and runners producing transcripts.
//!
//! Every role reacts only to messages addressed to it. Round 0 is Trusty's
//! offline broadcast, round 1 the players' shares; nodes send nothing and
//! expose their value through [`Role::output`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::analytic::NormalizedMaskTriple;
use super::nparty::{node_output_np, player_payload_np, NPartyDiscreteParams};
use super::transcript::{Message, ProtocolKind, RoleId, Transcript, Value};
use super::two_party::{
    node_output_2p, player_online_2p, reconstruct, trusty_offline_2p, OfflineConfig, OfflineParams2P, Player2P,
    PlayerPacket,
};
use super::ProtocolError;
use crate::analytic::parseval::sum_series;
use crate::analytic::{fourier_coeffs, NormalizedMaskPair, SeriesFunction, Summation};
use crate::dft::DftSequence;
use crate::field::{FieldElement, PrimeField};
use crate::simnet::Simulator;
use crate::tagged::TaggedScalar;

pub trait Role {
    fn id(&self) -> RoleId;

    /// Messages sent before anything is received.
    fn start(&mut self) -> Result<Vec<Message>, ProtocolError> {
        Ok(Vec::new())
    }

    fn receive(&mut self, msg: &Message) -> Result<Vec<Message>, ProtocolError>;

    /// The value this role publishes once it has everything it needs.
    fn output(&self) -> Option<Value> {
        None
    }

    /// Rejected parameter draws, for roles that sample.
    fn resamples(&self) -> u32 {
        0
    }
}

fn unexpected(role: RoleId, msg: &Message) -> ProtocolError {
    ProtocolError::MalformedMessage(format!("{role} did not expect `{}` from {}", msg.label, msg.from))
}

// Exact two-party protocol.

const ALICE: RoleId = RoleId::Player(0);
const BOB: RoleId = RoleId::Player(1);
const NODE1: RoleId = RoleId::Node(0);
const NODE2: RoleId = RoleId::Node(1);

fn share_names(who: Player2P) -> (&'static str, &'static str) {
    match who {
        Player2P::Alice => ("a0", "a0_hat"),
        Player2P::Bob => ("alpha0", "alpha0_hat"),
    }
}

fn param_names(who: Player2P) -> (&'static str, &'static str) {
    match who {
        Player2P::Alice => ("tau1", "tau3"),
        Player2P::Bob => ("sigma1", "sigma3"),
    }
}

pub struct Trusty2P {
    field: PrimeField,
    rng: ChaCha8Rng,
    cfg: OfflineConfig,
    params: Option<OfflineParams2P>,
}

impl Trusty2P {
    pub fn new(field: PrimeField, seed: u64, cfg: OfflineConfig) -> Self {
        Self {
            field,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cfg,
            params: None,
        }
    }
}

fn packet_message(to: RoleId, who: Player2P, p: &PlayerPacket) -> Message {
    let (s, c) = param_names(who);
    Message::new(RoleId::Trusty, to, "offline")
        .with(s, Value::Field(p.sin_param))
        .with(c, Value::Field(p.cos_param))
        .with("eta", Value::Tagged(p.eta))
        .with("norm", Value::Tagged(p.norm))
}

impl Role for Trusty2P {
    fn id(&self) -> RoleId {
        RoleId::Trusty
    }

    fn start(&mut self) -> Result<Vec<Message>, ProtocolError> {
        let p = trusty_offline_2p(self.field, &mut self.rng, &self.cfg)?;
        self.params = Some(p);
        Ok(vec![
            packet_message(ALICE, Player2P::Alice, &p.alice_packet),
            packet_message(BOB, Player2P::Bob, &p.bob_packet),
        ])
    }

    fn receive(&mut self, msg: &Message) -> Result<Vec<Message>, ProtocolError> {
        Err(unexpected(self.id(), msg))
    }

    fn resamples(&self) -> u32 {
        self.params.map(|p| p.resamples).unwrap_or(0)
    }
}

pub struct Player2PRole {
    who: Player2P,
    secret: FieldElement,
}

impl Player2PRole {
    pub fn new(who: Player2P, secret: FieldElement) -> Self {
        Self { who, secret }
    }
}

impl Role for Player2PRole {
    fn id(&self) -> RoleId {
        match self.who {
            Player2P::Alice => ALICE,
            Player2P::Bob => BOB,
        }
    }

    fn receive(&mut self, msg: &Message) -> Result<Vec<Message>, ProtocolError> {
        if msg.from != RoleId::Trusty || msg.label != "offline" {
            return Err(unexpected(self.id(), msg));
        }
        let (s, c) = param_names(self.who);
        let packet = PlayerPacket {
            sin_param: msg.field(s)?,
            cos_param: msg.field(c)?,
            eta: msg.tagged("eta")?,
            norm: msg.tagged("norm")?,
        };
        let share = player_online_2p(self.who, self.secret, &packet)?;
        let (n1, n2) = share_names(self.who);
        Ok(vec![
            Message::new(self.id(), NODE1, "share").with(n1, Value::Tagged(share.to_node1)),
            Message::new(self.id(), NODE2, "share").with(n2, Value::Tagged(share.to_node2)),
        ])
    }
}

pub struct Node2PRole {
    index: usize,
    from_alice: Option<TaggedScalar>,
    from_bob: Option<TaggedScalar>,
    out: Option<TaggedScalar>,
}

impl Node2PRole {
    pub fn new(index: usize) -> Self {
        Self {
            index,
            from_alice: None,
            from_bob: None,
            out: None,
        }
    }
}

impl Role for Node2PRole {
    fn id(&self) -> RoleId {
        RoleId::Node(self.index)
    }

    fn receive(&mut self, msg: &Message) -> Result<Vec<Message>, ProtocolError> {
        let pick = |who| {
            let (n1, n2) = share_names(who);
            if self.index == 0 {
                n1
            } else {
                n2
            }
        };
        match msg.from {
            ALICE => self.from_alice = Some(msg.tagged(pick(Player2P::Alice))?),
            BOB => self.from_bob = Some(msg.tagged(pick(Player2P::Bob))?),
            _ => return Err(unexpected(self.id(), msg)),
        }
        if let (Some(a), Some(b)) = (self.from_alice, self.from_bob) {
            self.out = Some(node_output_2p(&a, &b)?);
        }
        Ok(Vec::new())
    }

    fn output(&self) -> Option<Value> {
        self.out.map(Value::Tagged)
    }
}

fn zero_flags(any_zero: bool) -> Vec<String> {
    if any_zero {
        vec!["zero-secret".to_string()]
    } else {
        Vec::new()
    }
}

/// Full two-party exact run through the simulator.
pub fn run_2p_exact(
    field: PrimeField,
    a: FieldElement,
    b: FieldElement,
    seed: u64,
    cfg: &OfflineConfig,
) -> Result<Transcript, ProtocolError> {
    for s in [a, b] {
        if s.modulus() != field.modulus() {
            return Err(ProtocolError::InvalidParams("secret lives in a different field".into()));
        }
    }
    let outcome = Simulator::new(vec![
        Box::new(Trusty2P::new(field, seed, *cfg)),
        Box::new(Player2PRole::new(Player2P::Alice, a)),
        Box::new(Player2PRole::new(Player2P::Bob, b)),
        Box::new(Node2PRole::new(0)),
        Box::new(Node2PRole::new(1)),
    ])
    .run()?;
    let revealed = outcome
        .outputs
        .iter()
        .map(|o| match &o.value {
            Value::Tagged(t) => Ok(t.reveal()?),
            _ => Err(ProtocolError::MalformedMessage("node output is not a field value".into())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Transcript {
        protocol: ProtocolKind::TwoPartyExact,
        prime: Some(field.modulus()),
        seed,
        rounds: outcome.rounds,
        outputs: outcome.outputs,
        reconstructed: Value::Field(reconstruct(&revealed)?),
        resamples: outcome.resamples,
        flags: zero_flags(a.is_zero() || b.is_zero()),
    })
}

/// The passive adversary's view of a two-party exact run: the four shares
/// with their public constants divided out, `η`, and the node outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct AdversaryView {
    pub a0: FieldElement,
    pub alpha0: FieldElement,
    pub a0_hat: FieldElement,
    pub alpha0_hat: FieldElement,
    pub eta: TaggedScalar,
    pub s1: FieldElement,
    pub s2: FieldElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewComponent {
    A0,
    Alpha0,
    A0Hat,
    Alpha0Hat,
    S1,
    S2,
}

impl ViewComponent {
    pub const ALL: [ViewComponent; 6] = [
        ViewComponent::A0,
        ViewComponent::Alpha0,
        ViewComponent::A0Hat,
        ViewComponent::Alpha0Hat,
        ViewComponent::S1,
        ViewComponent::S2,
    ];

    /// The components the secrecy theorem speaks about.
    pub const SHARES: [ViewComponent; 4] = [
        ViewComponent::A0,
        ViewComponent::Alpha0,
        ViewComponent::A0Hat,
        ViewComponent::Alpha0Hat,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ViewComponent::A0 => "a0",
            ViewComponent::Alpha0 => "alpha0",
            ViewComponent::A0Hat => "a0_hat",
            ViewComponent::Alpha0Hat => "alpha0_hat",
            ViewComponent::S1 => "s1",
            ViewComponent::S2 => "s2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl AdversaryView {
    pub fn component(&self, c: ViewComponent) -> FieldElement {
        match c {
            ViewComponent::A0 => self.a0,
            ViewComponent::Alpha0 => self.alpha0,
            ViewComponent::A0Hat => self.a0_hat,
            ViewComponent::Alpha0Hat => self.alpha0_hat,
            ViewComponent::S1 => self.s1,
            ViewComponent::S2 => self.s2,
        }
    }

    pub fn from_run(run: &super::two_party::Exact2PRun) -> Result<Self, ProtocolError> {
        let (a0, a0_hat) = run.alice.folded(Player2P::Alice);
        let (alpha0, alpha0_hat) = run.bob.folded(Player2P::Bob);
        Ok(Self {
            a0,
            alpha0,
            a0_hat,
            alpha0_hat,
            eta: run.params.eta(),
            s1: run.s1.reveal()?,
            s2: run.s2.reveal()?,
        })
    }
}

fn fold_share(t: &Transcript, from: RoleId, to: RoleId, name: &str, who: Player2P) -> Result<FieldElement, ProtocolError> {
    let msg = t.find(from, to).ok_or(ProtocolError::IncompleteTranscript)?;
    let share = msg.tagged(name)?;
    let c = who.constant(share.core().field()).core().inv().expect("unit");
    Ok(share.core() * c)
}

pub fn adversary_view(t: &Transcript) -> Result<AdversaryView, ProtocolError> {
    if t.protocol != ProtocolKind::TwoPartyExact {
        return Err(ProtocolError::IncompleteTranscript);
    }
    let out = |node| match t.output_of(node) {
        Some(Value::Tagged(x)) => Ok(x.reveal()?),
        _ => Err(ProtocolError::IncompleteTranscript),
    };
    let eta = t
        .find(RoleId::Trusty, ALICE)
        .ok_or(ProtocolError::IncompleteTranscript)?
        .tagged("eta")?;
    Ok(AdversaryView {
        a0: fold_share(t, ALICE, NODE1, "a0", Player2P::Alice)?,
        alpha0: fold_share(t, BOB, NODE1, "alpha0", Player2P::Bob)?,
        a0_hat: fold_share(t, ALICE, NODE2, "a0_hat", Player2P::Alice)?,
        alpha0_hat: fold_share(t, BOB, NODE2, "alpha0_hat", Player2P::Bob)?,
        eta,
        s1: out(NODE1)?,
        s2: out(NODE2)?,
    })
}

// Real-valued protocols.

/// Hands out pre-built masks and `η`.
pub struct TrustyAnalytic {
    masks: Vec<SeriesFunction>,
    eta: f64,
}

impl TrustyAnalytic {
    pub fn new(masks: Vec<SeriesFunction>, eta: f64) -> Self {
        Self { masks, eta }
    }
}

impl Role for TrustyAnalytic {
    fn id(&self) -> RoleId {
        RoleId::Trusty
    }

    fn start(&mut self) -> Result<Vec<Message>, ProtocolError> {
        Ok(self
            .masks
            .iter()
            .enumerate()
            .map(|(i, m)| {
                Message::new(RoleId::Trusty, RoleId::Player(i), "offline")
                    .with("mask", Value::Mask(m.clone()))
                    .with("eta", Value::Real(self.eta))
            })
            .collect())
    }

    fn receive(&mut self, msg: &Message) -> Result<Vec<Message>, ProtocolError> {
        Err(unexpected(self.id(), msg))
    }
}

/// How a real-valued player splits its coefficients between the two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticSplit {
    /// Node 1: `(a₀, A)`; node 2: `B`.
    CosineSine,
    /// Node 1: `(a₀, A + B)`; node 2: `A - B`.
    SumDifference,
}

pub struct PlayerAnalytic {
    index: usize,
    secret: f64,
    order: usize,
    split: AnalyticSplit,
}

impl PlayerAnalytic {
    pub fn new(index: usize, secret: f64, order: usize, split: AnalyticSplit) -> Self {
        Self {
            index,
            secret,
            order,
            split,
        }
    }
}

impl Role for PlayerAnalytic {
    fn id(&self) -> RoleId {
        RoleId::Player(self.index)
    }

    fn receive(&mut self, msg: &Message) -> Result<Vec<Message>, ProtocolError> {
        if msg.from != RoleId::Trusty || msg.label != "offline" {
            return Err(unexpected(self.id(), msg));
        }
        let c = fourier_coeffs(&msg.mask("mask")?.scale(self.secret), self.order)?;
        let (first, second) = match self.split {
            AnalyticSplit::CosineSine => (c.cos.clone(), c.sin.clone()),
            AnalyticSplit::SumDifference => (
                c.cos.iter().zip(&c.sin).map(|(a, b)| a + b).collect(),
                c.cos.iter().zip(&c.sin).map(|(a, b)| a - b).collect(),
            ),
        };
        Ok(vec![
            Message::new(self.id(), NODE1, "share")
                .with("zero", Value::Real(c.a0))
                .with("coeffs", Value::RealVector(first)),
            Message::new(self.id(), NODE2, "share").with("coeffs", Value::RealVector(second)),
        ])
    }
}

/// Multiplies the players' vectors entrywise and sums: with two players this
/// is the dot product, with three the triple product. Node 1 also adds the
/// constant term.
pub struct NodeAnalytic {
    index: usize,
    players: usize,
    /// Factor in front of the sum; the product of zeros always gets ½.
    factor: f64,
    mode: Summation,
    received: Vec<Option<(f64, Vec<f64>)>>,
    out: Option<f64>,
}

impl NodeAnalytic {
    pub fn new(index: usize, players: usize, factor: f64, mode: Summation) -> Self {
        Self {
            index,
            players,
            factor,
            mode,
            received: vec![None; players],
            out: None,
        }
    }

    fn finish(&self) -> f64 {
        let parts: Vec<&(f64, Vec<f64>)> = self.received.iter().map(|r| r.as_ref().expect("complete")).collect();
        let len = parts.iter().map(|p| p.1.len()).min().unwrap_or(0);
        let terms: Vec<f64> = (0..len)
            .map(|n| self.factor * parts.iter().fold(1.0, |acc, p| acc * p.1[n]))
            .collect();
        let constant = if self.index == 0 {
            0.5 * parts.iter().fold(1.0, |acc, p| acc * p.0)
        } else {
            0.0
        };
        sum_series(constant, &terms, self.mode)
    }
}

impl Role for NodeAnalytic {
    fn id(&self) -> RoleId {
        RoleId::Node(self.index)
    }

    fn receive(&mut self, msg: &Message) -> Result<Vec<Message>, ProtocolError> {
        let RoleId::Player(i) = msg.from else {
            return Err(unexpected(self.id(), msg));
        };
        if i >= self.players {
            return Err(unexpected(self.id(), msg));
        }
        let zero = if self.index == 0 { msg.real("zero")? } else { 0.0 };
        self.received[i] = Some((zero, msg.real_vector("coeffs")?.to_vec()));
        if self.received.iter().all(|r| r.is_some()) {
            self.out = Some(self.finish());
        }
        Ok(Vec::new())
    }

    fn output(&self) -> Option<Value> {
        self.out.map(Value::Real)
    }
}

fn finish_real(kind: ProtocolKind, seed: u64, outcome: crate::simnet::SimOutcome, any_zero: bool) -> Result<Transcript, ProtocolError> {
    let sum = outcome
        .outputs
        .iter()
        .map(|o| match o.value {
            Value::Real(x) => Ok(x),
            _ => Err(ProtocolError::MalformedMessage("node output is not real".into())),
        })
        .sum::<Result<f64, _>>()?;
    Ok(Transcript {
        protocol: kind,
        prime: None,
        seed,
        rounds: outcome.rounds,
        outputs: outcome.outputs,
        reconstructed: Value::Real(sum),
        resamples: outcome.resamples,
        flags: zero_flags(any_zero),
    })
}

/// Real-valued two-party run through the simulator.
pub fn run_2p_analytic_transcript(
    a: f64,
    b: f64,
    pair: &NormalizedMaskPair,
    order: usize,
    mode: Summation,
    seed: u64,
) -> Result<Transcript, ProtocolError> {
    let outcome = Simulator::new(vec![
        Box::new(TrustyAnalytic::new(vec![pair.alice_mask.clone(), pair.bob_mask.clone()], pair.eta)),
        Box::new(PlayerAnalytic::new(0, a, order, AnalyticSplit::CosineSine)),
        Box::new(PlayerAnalytic::new(1, b, order, AnalyticSplit::CosineSine)),
        Box::new(NodeAnalytic::new(0, 2, 1.0, mode)),
        Box::new(NodeAnalytic::new(1, 2, 1.0, mode)),
    ])
    .run()?;
    finish_real(ProtocolKind::TwoPartyAnalytic, seed, outcome, a == 0.0 || b == 0.0)
}

/// Real-valued three-party run through the simulator.
pub fn run_3p_analytic_transcript(
    secrets: [f64; 3],
    masks: &NormalizedMaskTriple,
    order: usize,
    seed: u64,
) -> Result<Transcript, ProtocolError> {
    let mut roles: Vec<Box<dyn Role>> = vec![Box::new(TrustyAnalytic::new(masks.masks.to_vec(), masks.eta))];
    for (i, s) in secrets.iter().enumerate() {
        roles.push(Box::new(PlayerAnalytic::new(i, *s, order, AnalyticSplit::SumDifference)));
    }
    roles.push(Box::new(NodeAnalytic::new(0, 3, 0.5, Summation::Truncated)));
    roles.push(Box::new(NodeAnalytic::new(1, 3, 0.5, Summation::Truncated)));
    let outcome = Simulator::new(roles).run()?;
    finish_real(ProtocolKind::ThreePartyAnalytic, seed, outcome, secrets.contains(&0.0))
}

// Exact n-party protocol.

pub struct TrustyNP {
    params: NPartyDiscreteParams,
}

impl Role for TrustyNP {
    fn id(&self) -> RoleId {
        RoleId::Trusty
    }

    fn start(&mut self) -> Result<Vec<Message>, ProtocolError> {
        let p = &self.params;
        Ok(p.masks
            .iter()
            .zip(&p.eta_shares)
            .enumerate()
            .map(|(i, (u, e))| {
                Message::new(RoleId::Trusty, RoleId::Player(i), "offline")
                    .with(
                        "mask",
                        Value::FieldVector {
                            indices: (0..u.len()).collect(),
                            values: u.values().to_vec(),
                        },
                    )
                    .with("eta_share", Value::Field(*e))
            })
            .collect())
    }

    fn receive(&mut self, msg: &Message) -> Result<Vec<Message>, ProtocolError> {
        Err(unexpected(self.id(), msg))
    }

    fn resamples(&self) -> u32 {
        self.params.resamples
    }
}

pub struct PlayerNP {
    index: usize,
    secret: FieldElement,
    root: FieldElement,
    partition: Vec<Vec<usize>>,
}

impl Role for PlayerNP {
    fn id(&self) -> RoleId {
        RoleId::Player(self.index)
    }

    fn receive(&mut self, msg: &Message) -> Result<Vec<Message>, ProtocolError> {
        if msg.from != RoleId::Trusty || msg.label != "offline" {
            return Err(unexpected(self.id(), msg));
        }
        let (indices, values) = msg.field_vector("mask")?;
        if indices.iter().enumerate().any(|(k, i)| k != *i) {
            return Err(unexpected(self.id(), msg));
        }
        let mask = DftSequence::new(values.to_vec(), self.root)?;
        let eta_share = msg.field("eta_share")?;
        Ok(self
            .partition
            .iter()
            .enumerate()
            .map(|(j, part)| {
                Message::new(self.id(), RoleId::Node(j), "share").with(
                    "payload",
                    Value::FieldVector {
                        indices: part.clone(),
                        values: player_payload_np(self.secret, eta_share, &mask, part),
                    },
                )
            })
            .collect())
    }
}

pub struct NodeNP {
    index: usize,
    field: PrimeField,
    indices: Vec<usize>,
    received: Vec<Option<Vec<FieldElement>>>,
    out: Option<FieldElement>,
}

impl Role for NodeNP {
    fn id(&self) -> RoleId {
        RoleId::Node(self.index)
    }

    fn receive(&mut self, msg: &Message) -> Result<Vec<Message>, ProtocolError> {
        let RoleId::Player(i) = msg.from else {
            return Err(unexpected(self.id(), msg));
        };
        let (indices, values) = msg.field_vector("payload")?;
        if i >= self.received.len() || indices != self.indices.as_slice() {
            return Err(unexpected(self.id(), msg));
        }
        self.received[i] = Some(values.to_vec());
        if self.received.iter().all(|r| r.is_some()) {
            let refs: Vec<&[FieldElement]> = self.received.iter().map(|r| r.as_deref().expect("complete")).collect();
            self.out = Some(node_output_np(self.field, &refs)?);
        }
        Ok(Vec::new())
    }

    fn output(&self) -> Option<Value> {
        self.out.map(Value::Field)
    }
}

/// Exact `k`-player run through the simulator.
pub fn run_np_discrete(secrets: &[FieldElement], params: &NPartyDiscreteParams, seed: u64) -> Result<Transcript, ProtocolError> {
    params.check()?;
    if secrets.len() != params.players() {
        return Err(ProtocolError::InvalidParams(format!(
            "{} secrets for {} players",
            secrets.len(),
            params.players()
        )));
    }
    let field = params.eta.field();
    let root = params.masks[0].root();
    let mut roles: Vec<Box<dyn Role>> = vec![Box::new(TrustyNP { params: params.clone() })];
    for (i, s) in secrets.iter().enumerate() {
        roles.push(Box::new(PlayerNP {
            index: i,
            secret: *s,
            root,
            partition: params.partition.clone(),
        }));
    }
    for (j, part) in params.partition.iter().enumerate() {
        roles.push(Box::new(NodeNP {
            index: j,
            field,
            indices: part.clone(),
            received: vec![None; secrets.len()],
            out: None,
        }));
    }
    let outcome = Simulator::new(roles).run()?;
    let outputs = outcome
        .outputs
        .iter()
        .map(|o| match o.value {
            Value::Field(x) => Ok(x),
            _ => Err(ProtocolError::MalformedMessage("node output is not a field value".into())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Transcript {
        protocol: ProtocolKind::NPartyDiscrete,
        prime: Some(field.modulus()),
        seed,
        rounds: outcome.rounds,
        outputs: outcome.outputs,
        reconstructed: Value::Field(reconstruct(&outputs)?),
        resamples: outcome.resamples,
        flags: zero_flags(secrets.iter().any(|s| s.is_zero())),
    })
}
