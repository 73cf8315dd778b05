//! The data payload sheaf `𝒟` over a time-dependent link complex: node
//! state, receive buffer and transmit queue over vertices, queues carried
//! across temporal edges, packets on links. Also the receive queue protocols,
//! schedule-driven simulation and the throughput bound `dim H⁰(𝒫)`.

mod bound;
mod packet;
mod protocol;
mod schedule;
mod sheaf;
mod simulate;

use thiserror::Error;

use crate::activation::ActivationError;
use crate::NodeId;

pub use bound::{fixed_activation_subsheaf, throughput_bound, FixedActivation, Route};
pub use packet::{zero_buffer, Packet, Priority};
pub use protocol::{switching_map, CustomProtocol, IndexFn, Protocol, ProtocolError};
pub use schedule::{Schedule, ScheduleSections};
pub use sheaf::{effective_state, CellKind, PayloadSheaf, PayloadValue};
pub use simulate::{simulate, InitialState, Injection};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PayloadError {
    #[error("need packet dimension d >= 1 and buffer length n >= 2, got d={d}, n={n}")]
    Parameters { d: usize, n: usize },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("time {0} lies outside the window")]
    OutOfWindow(i64),
    #[error("node {0} is not in the network")]
    UnknownNode(NodeId),
    #[error("schedule at t={time}: {source}")]
    InvalidSchedule { time: i64, source: ActivationError },
    #[error("injection at node {node}, t={time}, slot {slot}: {reason}")]
    InjectionConflict {
        node: NodeId,
        time: i64,
        slot: usize,
        reason: String,
    },
    #[error("initial state of node {node}: {reason}")]
    InitialState { node: NodeId, reason: String },
    #[error("no consistent section: restriction {face} -> {coface} fails")]
    Inconsistent { face: String, coface: String },
    #[error("protocol `{0}` is not linear; the fixed-activation subsheaf needs forward-nothing or forward-everything")]
    NonlinearProtocol(String),
    #[error("packet has dimension {found}, expected {expected}")]
    PacketDim { expected: usize, found: usize },
}
