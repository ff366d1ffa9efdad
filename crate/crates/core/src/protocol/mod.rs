//! The multiplication protocols: the exact two-party scheme over `F_p`, the
//! real-valued two- and three-party schemes, and the exact `k`-player scheme
//! in the DFT domain, as plain functions and as message-passing roles.

use thiserror::Error;

pub mod analytic;
pub mod nparty;
pub mod roles;
pub mod transcript;
pub mod two_party;

pub use analytic::{run_2p_analytic, run_3p_analytic, AnalyticOutcome, NormalizedMaskTriple};
pub use nparty::{
    round_robin_partition, run_np_direct, trusty_offline_np, validate_partition, NPartyDiscreteParams, NodePartition,
};
pub use roles::{
    adversary_view, run_2p_analytic_transcript, run_2p_exact, run_3p_analytic_transcript, run_np_discrete,
    AdversaryView, Role, ViewComponent,
};
pub use transcript::{Entry, Message, NodeOutput, ProtocolKind, RoleId, Round, Transcript, Value};
pub use two_party::{
    node_output_2p, player_online_2p, reconstruct, run_2p_exact_direct, trusty_offline_2p, Exact2PRun, ForcedParams,
    NormalizationMode, OfflineConfig, OfflineParams2P, Player2P, PlayerPacket, PlayerShare2P,
};

use crate::analytic::AnalyticError;
use crate::dft::DftError;
use crate::field::FieldError;
use crate::tagged::TaggedError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed message: {0}")]
    MalformedMessage(String),
    #[error("protocol violation: output carries π^({pi_halves}/2)·√2^{sqrt2}")]
    Impure { pi_halves: i32, sqrt2: i32 },
    #[error("no node outputs to reconstruct from")]
    NoOutputs,
    #[error("transcript is missing messages or outputs")]
    IncompleteTranscript,
    #[error("invalid node partition: {0}")]
    InvalidPartition(String),
    #[error("message addressed to unknown role {0}")]
    UnknownRole(String),
    #[error("simulation stopped with {0} node(s) still waiting for input")]
    Stalled(usize),
    #[error(transparent)]
    Tagged(#[from] TaggedError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Dft(#[from] DftError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}
