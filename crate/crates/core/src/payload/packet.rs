use std::fmt;

use num_traits::Zero;

use crate::linalg::Rational;
use crate::NodeId;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Priority {
    #[default]
    Low,
    High,
}

/// A packet: a payload vector in `D = Q^d` plus routing metadata that the
/// linear structure never sees.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Packet {
    pub payload: Vec<Rational>,
    pub destination: Option<NodeId>,
    pub priority: Priority,
}

impl Packet {
    /// The empty slot.
    pub fn zero(d: usize) -> Self {
        Self {
            payload: vec![Rational::zero(); d],
            destination: None,
            priority: Priority::Low,
        }
    }

    pub fn new(payload: Vec<Rational>) -> Self {
        Self {
            payload,
            destination: None,
            priority: Priority::Low,
        }
    }

    pub fn with_destination(mut self, destination: NodeId) -> Self {
        self.destination = Some(destination);
        self
    }

    pub fn with_priority(mut self, priority: Priority) -> Self {
        self.priority = priority;
        self
    }

    pub fn dim(&self) -> usize {
        self.payload.len()
    }

    /// Zero payload and no metadata.
    pub fn is_zero(&self) -> bool {
        self.destination.is_none() && self.priority == Priority::Low && self.payload.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for Packet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.payload.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))?;
        if let Some(d) = self.destination {
            write!(f, "->{d}")?;
        }
        if self.priority == Priority::High {
            write!(f, "!")?;
        }
        Ok(())
    }
}

/// A buffer of `n` zero packets.
pub fn zero_buffer(n: usize, d: usize) -> Vec<Packet> {
    vec![Packet::zero(d); n]
}
