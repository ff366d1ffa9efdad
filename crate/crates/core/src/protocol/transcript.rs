//! Messages, payloads and the run transcript.
//!
//! The JSON form is canonical: struct fields serialize in declaration order,
//! field elements as decimal strings, and nothing depends on hash ordering.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use super::ProtocolError;
use crate::analytic::SeriesFunction;
use crate::field::FieldElement;
use crate::tagged::TaggedScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RoleId {
    Trusty,
    /// Zero-based internally, displayed one-based.
    Player(usize),
    Node(usize),
}

impl fmt::Display for RoleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleId::Trusty => write!(f, "trusty"),
            RoleId::Player(i) => write!(f, "player-{}", i + 1),
            RoleId::Node(j) => write!(f, "node-{}", j + 1),
        }
    }
}

impl Serialize for RoleId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Tagged(TaggedScalar),
    Field(FieldElement),
    /// A slice of a coefficient vector, with the indices it covers.
    FieldVector {
        indices: Vec<usize>,
        values: Vec<FieldElement>,
    },
    Real(f64),
    RealVector(Vec<f64>),
    Mask(SeriesFunction),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Message {
    pub from: RoleId,
    pub to: RoleId,
    pub label: String,
    pub payload: Vec<Entry>,
}

impl Message {
    pub fn new(from: RoleId, to: RoleId, label: &str) -> Self {
        Self {
            from,
            to,
            label: label.to_string(),
            payload: Vec::new(),
        }
    }

    pub fn with(mut self, name: &str, value: Value) -> Self {
        self.payload.push(Entry {
            name: name.to_string(),
            value,
        });
        self
    }

    pub fn get(&self, name: &str) -> Result<&Value, ProtocolError> {
        self.payload
            .iter()
            .find(|e| e.name == name)
            .map(|e| &e.value)
            .ok_or_else(|| self.malformed(name))
    }

    fn malformed(&self, name: &str) -> ProtocolError {
        ProtocolError::MalformedMessage(format!("{} from {}: missing or mistyped `{name}`", self.label, self.from))
    }

    pub fn field(&self, name: &str) -> Result<FieldElement, ProtocolError> {
        match self.get(name)? {
            Value::Field(x) => Ok(*x),
            _ => Err(self.malformed(name)),
        }
    }

    pub fn tagged(&self, name: &str) -> Result<TaggedScalar, ProtocolError> {
        match self.get(name)? {
            Value::Tagged(x) => Ok(*x),
            _ => Err(self.malformed(name)),
        }
    }

    pub fn field_vector(&self, name: &str) -> Result<(&[usize], &[FieldElement]), ProtocolError> {
        match self.get(name)? {
            Value::FieldVector { indices, values } if indices.len() == values.len() => Ok((indices, values)),
            _ => Err(self.malformed(name)),
        }
    }

    pub fn real(&self, name: &str) -> Result<f64, ProtocolError> {
        match self.get(name)? {
            Value::Real(x) => Ok(*x),
            _ => Err(self.malformed(name)),
        }
    }

    pub fn real_vector(&self, name: &str) -> Result<&[f64], ProtocolError> {
        match self.get(name)? {
            Value::RealVector(x) => Ok(x),
            _ => Err(self.malformed(name)),
        }
    }

    pub fn mask(&self, name: &str) -> Result<&SeriesFunction, ProtocolError> {
        match self.get(name)? {
            Value::Mask(x) => Ok(x),
            _ => Err(self.malformed(name)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Round {
    pub round: usize,
    pub messages: Vec<Message>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeOutput {
    pub node: RoleId,
    pub value: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    TwoPartyExact,
    TwoPartyAnalytic,
    ThreePartyAnalytic,
    NPartyDiscrete,
}

impl ProtocolKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::TwoPartyExact => "two-party-exact",
            ProtocolKind::TwoPartyAnalytic => "two-party-analytic",
            ProtocolKind::ThreePartyAnalytic => "three-party-analytic",
            ProtocolKind::NPartyDiscrete => "n-party-discrete",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            ProtocolKind::TwoPartyExact,
            ProtocolKind::TwoPartyAnalytic,
            ProtocolKind::ThreePartyAnalytic,
            ProtocolKind::NPartyDiscrete,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// Everything that crossed the simulated network in one run, plus the node
/// outputs and their sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    pub protocol: ProtocolKind,
    /// Absent for the real-valued protocols.
    pub prime: Option<u64>,
    pub seed: u64,
    pub rounds: Vec<Round>,
    pub outputs: Vec<NodeOutput>,
    pub reconstructed: Value,
    pub resamples: u32,
    /// Notes such as `zero-secret`, which mark runs whose shares are
    /// visibly degenerate.
    pub flags: Vec<String>,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcripts always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts always serialize")
    }

    pub fn messages(&self) -> impl Iterator<Item = (usize, &Message)> {
        self.rounds
            .iter()
            .flat_map(|r| r.messages.iter().map(move |m| (r.round, m)))
    }

    pub fn find(&self, from: RoleId, to: RoleId) -> Option<&Message> {
        self.messages().map(|(_, m)| m).find(|m| m.from == from && m.to == to)
    }

    pub fn output_of(&self, node: RoleId) -> Option<&Value> {
        self.outputs.iter().find(|o| o.node == node).map(|o| &o.value)
    }

    /// The reconstruction as a field element, for the exact protocols.
    pub fn reconstructed_field(&self) -> Option<FieldElement> {
        match &self.reconstructed {
            Value::Field(x) => Some(*x),
            _ => None,
        }
    }

    pub fn reconstructed_real(&self) -> Option<f64> {
        match &self.reconstructed {
            Value::Real(x) => Some(*x),
            _ => None,
        }
    }
}
