//! FIFO message delivery between roles.
//!
//! Each protocol here has one offline and one online round, so delivery
//! order inside a round carries no meaning; messages are simply delivered in
//! the order they were sent. A message produced while handling a round-`r`
//! message belongs to round `r + 1`.

use std::collections::VecDeque;

use crate::protocol::{Message, NodeOutput, ProtocolError, Role, RoleId, Round};

/// Hard cap on deliveries, so a misbehaving role cannot loop forever.
pub const MAX_DELIVERIES: usize = 1 << 20;

pub struct Simulator {
    roles: Vec<Box<dyn Role>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub rounds: Vec<Round>,
    /// One entry per node, in the order the nodes were registered.
    pub outputs: Vec<NodeOutput>,
    pub resamples: u32,
}

impl Simulator {
    pub fn new(roles: Vec<Box<dyn Role>>) -> Self {
        Self { roles }
    }

    fn index_of(&self, id: RoleId) -> Result<usize, ProtocolError> {
        self.roles
            .iter()
            .position(|r| r.id() == id)
            .ok_or_else(|| ProtocolError::UnknownRole(id.to_string()))
    }

    pub fn run(mut self) -> Result<SimOutcome, ProtocolError> {
        let mut queue: VecDeque<(usize, Message)> = VecDeque::new();
        for role in self.roles.iter_mut() {
            queue.extend(role.start()?.into_iter().map(|m| (0, m)));
        }
        let mut rounds: Vec<Round> = Vec::new();
        let mut delivered = 0;
        while let Some((round, msg)) = queue.pop_front() {
            delivered += 1;
            if delivered > MAX_DELIVERIES {
                return Err(ProtocolError::MalformedMessage("delivery limit exceeded".into()));
            }
            let to = self.index_of(msg.to)?;
            let replies = self.roles[to].receive(&msg)?;
            queue.extend(replies.into_iter().map(|m| (round + 1, m)));
            while rounds.len() <= round {
                rounds.push(Round {
                    round: rounds.len(),
                    messages: Vec::new(),
                });
            }
            rounds[round].messages.push(msg);
        }
        let mut outputs = Vec::new();
        let mut waiting = 0;
        for role in &self.roles {
            if let RoleId::Node(_) = role.id() {
                match role.output() {
                    Some(value) => outputs.push(NodeOutput { node: role.id(), value }),
                    None => waiting += 1,
                }
            }
        }
        if waiting > 0 {
            return Err(ProtocolError::Stalled(waiting));
        }
        let resamples = self.roles.iter().map(|r| r.resamples()).sum();
        Ok(SimOutcome {
            rounds,
            outputs,
            resamples,
        })
    }
}
