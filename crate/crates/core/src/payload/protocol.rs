use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use super::packet::{Packet, Priority};
use crate::linalg::{rational, Rational};
use crate::NodeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("unknown protocol `{0}`")]
    Unknown(String),
    #[error("protocol `{name}` is not a selection with permutation: {reason}")]
    NotASelection { name: String, reason: String },
    #[error("buffer length must be at least 2, got {0}")]
    ShortBuffer(usize),
}

/// Slot choice `p(i)` for each output position: `Some(j)` selects input `x_{j+1}`,
/// `None` is an empty slot.
pub type IndexFn = dyn Fn(NodeId, &[Packet]) -> Vec<Option<usize>> + Send + Sync;

/// A user-supplied receive queue function given by its index map.
#[derive(Clone)]
pub struct CustomProtocol {
    name: String,
    index: Arc<IndexFn>,
}

impl fmt::Debug for CustomProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProtocol")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

impl PartialEq for CustomProtocol {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.index, &other.index)
    }
}

/// Receive queue functions `q : Dⁿ → Dⁿ⁻¹`.
#[derive(Clone, Debug, PartialEq)]
pub enum Protocol {
    ForwardNothing,
    ForwardEverything,
    ForwardWithQueueManagement,
    ForwardForOthers,
    ForwardForOthersPriority,
    Custom(CustomProtocol),
}

impl Protocol {
    pub const BUILTIN: [Protocol; 5] = [
        Protocol::ForwardNothing,
        Protocol::ForwardEverything,
        Protocol::ForwardWithQueueManagement,
        Protocol::ForwardForOthers,
        Protocol::ForwardForOthersPriority,
    ];

    /// Registers a custom protocol after probing it on buffers of length
    /// `n` with packets of dimension `d` for self id `me`.
    pub fn custom(
        name: impl Into<String>,
        index: impl Fn(NodeId, &[Packet]) -> Vec<Option<usize>> + Send + Sync + 'static,
        n: usize,
        d: usize,
    ) -> Result<Self, ProtocolError> {
        let custom = CustomProtocol {
            name: name.into(),
            index: Arc::new(index),
        };
        let protocol = Protocol::Custom(custom);
        protocol.check_selection(n, d)?;
        Ok(protocol)
    }

    pub fn name(&self) -> &str {
        match self {
            Protocol::ForwardNothing => "forward-nothing",
            Protocol::ForwardEverything => "forward-everything",
            Protocol::ForwardWithQueueManagement => "forward-with-queue-management",
            Protocol::ForwardForOthers => "forward-for-others",
            Protocol::ForwardForOthersPriority => "forward-for-others-priority",
            Protocol::Custom(c) => &c.name,
        }
    }

    /// Whether `q` is one fixed projection independent of the inputs.
    pub fn is_linear(&self) -> bool {
        matches!(self, Protocol::ForwardNothing | Protocol::ForwardEverything)
    }

    /// The input-independent index map of a linear protocol.
    pub fn fixed_indices(&self, n: usize) -> Option<Vec<Option<usize>>> {
        match self {
            Protocol::ForwardNothing => Some((1..n).map(Some).collect()),
            Protocol::ForwardEverything => Some(std::iter::once(0).chain(2..n).map(Some).collect()),
            _ => None,
        }
    }

    /// `p(1), …, p(n−1)` for node `me` on buffer `x`.
    pub fn indices(&self, me: NodeId, x: &[Packet]) -> Vec<Option<usize>> {
        let n = x.len();
        let for_me = x[0].destination == Some(me);
        match self {
            Protocol::ForwardNothing | Protocol::ForwardEverything => self.fixed_indices(n).expect("linear"),
            Protocol::ForwardWithQueueManagement => queue_managed(x),
            Protocol::ForwardForOthers if for_me => Protocol::ForwardNothing.indices(me, x),
            Protocol::ForwardForOthers => queue_managed(x),
            Protocol::ForwardForOthersPriority if for_me => Protocol::ForwardNothing.indices(me, x),
            Protocol::ForwardForOthersPriority if x[0].priority == Priority::High => {
                (2..n).chain(std::iter::once(0)).map(Some).collect()
            }
            Protocol::ForwardForOthersPriority => queue_managed(x),
            Protocol::Custom(c) => (c.index)(me, x),
        }
    }

    /// Applies the receive queue function.
    pub fn receive_queue(&self, me: NodeId, x: &[Packet]) -> Vec<Packet> {
        let d = x[0].dim();
        self.indices(me, x)
            .into_iter()
            .map(|i| i.map_or_else(|| Packet::zero(d), |i| x[i].clone()))
            .collect()
    }

    /// Probes the index map on a family of buffers: the output must have
    /// `n−1` slots selecting distinct inputs.
    pub fn check_selection(&self, n: usize, d: usize) -> Result<(), ProtocolError> {
        if n < 2 {
            return Err(ProtocolError::ShortBuffer(n));
        }
        let fail = |reason: String| ProtocolError::NotASelection {
            name: self.name().to_string(),
            reason,
        };
        for x in probe_buffers(n, d) {
            for me in [0, 1] {
                let idx = self.indices(me, &x);
                if idx.len() != n - 1 {
                    return Err(fail(format!("{} output slots for n={n}", idx.len())));
                }
                let mut seen = BTreeSet::new();
                for i in idx.into_iter().flatten() {
                    if i >= n {
                        return Err(fail(format!("index {i} out of range")));
                    }
                    if !seen.insert(i) {
                        return Err(fail(format!("input {i} selected twice")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `x₁` replaces the transmit slot `x_i` with the highest empty `i`; with no
/// empty slot it replaces `x₂`.
fn queue_managed(x: &[Packet]) -> Vec<Option<usize>> {
    let n = x.len();
    let target = (1..n).rev().find(|&i| x[i].is_zero()).unwrap_or(1);
    (1..n).map(|i| Some(if i == target { 0 } else { i })).collect()
}

/// Buffers mixing empty and occupied slots, with every destination and
/// priority combination on `x₁`.
fn probe_buffers(n: usize, d: usize) -> Vec<Vec<Packet>> {
    let full = Packet::new(vec![Rational::one(); d]);
    let mut out = Vec::new();
    for mask in 0u32..(1 << (n - 1)).min(64) {
        for head in [
            Packet::zero(d),
            full.clone(),
            full.clone().with_destination(0),
            full.clone().with_destination(1).with_priority(Priority::High),
            full.clone().with_destination(0).with_priority(Priority::High),
        ] {
            let mut x = vec![head];
            for i in 1..n {
                let occupied = mask & (1 << ((i - 1) % 32)) != 0;
                x.push(if occupied {
                    Packet::new(vec![rational(i as i64 + 1); d])
                } else {
                    Packet::zero(d)
                });
            }
            out.push(x);
        }
    }
    out
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "forward-nothing" | "fn" => Ok(Protocol::ForwardNothing),
            "forward-everything" | "fe" => Ok(Protocol::ForwardEverything),
            "forward-with-queue-management" | "fwqm" => Ok(Protocol::ForwardWithQueueManagement),
            "forward-for-others" | "ffo" => Ok(Protocol::ForwardForOthers),
            "forward-for-others-priority" | "ffop" => Ok(Protocol::ForwardForOthersPriority),
            _ => Err(ProtocolError::Unknown(s.to_string())),
        }
    }
}

/// `zy + (1−z)x` for a boolean `z`: `x` when `z` is false, `y` when true.
pub fn switching_map(z: bool, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let z = if z { Rational::one() } else { Rational::zero() };
    let one_minus_z = Rational::one() - &z;
    x.iter().zip(y).map(|(xi, yi)| &z * yi + &one_minus_z * xi).collect()
}
