use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::packet::Packet;
use super::protocol::Protocol;
use super::PayloadError;
use crate::activation::{ActivationSheaf, Activity};
use crate::complex::{CellId, SimplicialComplex};
use crate::linalg::Rational;
use crate::sheaf::CellSheaf;
use crate::temporal::{GroupingSheaf, TimeComplex, TimedNode};
use crate::NodeId;

/// A stalk value of the data payload sheaf.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PayloadValue {
    /// Previous and current transmitter seen by the node, receive buffer
    /// `x₁` and transmit queue `x₂, …, xₙ` (exiting at `xₙ`).
    Vertex {
        prev: Activity,
        cur: Activity,
        buffer: Vec<Packet>,
    },
    /// Edge `((a,t),(a,t+1))`: a state and the `n−1` queue slots carried over.
    Temporal { state: Activity, queue: Vec<Packet> },
    /// Any other cell: the node using it and the packet on it.
    Link { state: Activity, packet: Packet },
}

impl PayloadValue {
    /// The all-idle, all-zero value of the given shape.
    pub fn zero_like(&self) -> Self {
        match self {
            PayloadValue::Vertex { buffer, .. } => PayloadValue::Vertex {
                prev: Activity::Idle,
                cur: Activity::Idle,
                buffer: vec![Packet::zero(buffer[0].dim()); buffer.len()],
            },
            PayloadValue::Temporal { queue, .. } => PayloadValue::Temporal {
                state: Activity::Idle,
                queue: queue.iter().map(|p| Packet::zero(p.dim())).collect(),
            },
            PayloadValue::Link { packet, .. } => PayloadValue::Link {
                state: Activity::Idle,
                packet: Packet::zero(packet.dim()),
            },
        }
    }
}

impl fmt::Display for PayloadValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: &[Packet]| xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        match self {
            PayloadValue::Vertex { prev, cur, buffer } => write!(f, "{prev} {cur} | {}", list(buffer)),
            PayloadValue::Temporal { state, queue } => write!(f, "{state} | {}", list(queue)),
            PayloadValue::Link { state, packet } => write!(f, "{state} | {packet}"),
        }
    }
}

/// What kind of cell of the time-dependent complex a cell is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    Vertex {
        node: NodeId,
        time: i64,
    },
    /// Edge from `(node, time)` to `(node, time + 1)`.
    Temporal {
        node: NodeId,
        time: i64,
    },
    /// Within-slice cell of dimension at least 1.
    Link {
        time: i64,
    },
}

/// `cur` as seen by the activation sheaf: a node holding nothing to send is
/// idle even when scheduled.
pub fn effective_state(me: NodeId, cur: Activity, buffer: &[Packet]) -> Activity {
    match cur {
        Activity::Node(m) if m == me && buffer[buffer.len() - 1].is_zero() => Activity::Idle,
        other => other,
    }
}

/// The data payload sheaf over a time-dependent link complex.
#[derive(Clone, Debug)]
pub struct PayloadSheaf {
    tc: Arc<TimeComplex>,
    d: usize,
    n: usize,
    protocol: Protocol,
    kinds: Vec<CellKind>,
    /// Node states allowed over each cell, without `⊥`; for vertices, the
    /// `cur` states.
    states: Vec<BTreeSet<NodeId>>,
    /// `prev` states allowed over each vertex.
    prev_states: Vec<BTreeSet<NodeId>>,
    slices: Vec<ActivationSheaf>,
}

impl PayloadSheaf {
    pub fn new(tc: Arc<TimeComplex>, d: usize, n: usize, protocol: Protocol) -> Result<Self, PayloadError> {
        if n < 2 || d < 1 {
            return Err(PayloadError::Parameters { d, n });
        }
        protocol.check_selection(n, d)?;
        let window = tc.window();
        let slices: Vec<ActivationSheaf> = window
            .times()
            .map(|t| ActivationSheaf::new(tc.timeslice(t).expect("in window").clone()))
            .collect();
        let x = tc.complex();
        let slice_stalk = |t: i64, cell: CellId| -> BTreeSet<NodeId> {
            let (time, local) = tc.slice_cell(cell).expect("within-slice cell");
            debug_assert_eq!(time, t);
            slices[(t - window.start()) as usize].stalk(local).clone()
        };
        let vertex_stalk = |node: NodeId, t: i64| slice_stalk(t, tc.vertex(node, t).expect("vertex"));
        let mut kinds = Vec::with_capacity(x.len());
        let mut states = Vec::with_capacity(x.len());
        let mut prev_states = Vec::with_capacity(x.len());
        for (id, cell) in x.cells().iter().enumerate() {
            let vs = cell.vertices();
            if vs.len() == 1 {
                let TimedNode { node, time } = vs[0];
                kinds.push(CellKind::Vertex { node, time });
                states.push(vertex_stalk(node, time));
                let prev_time = if time > window.start() { time - 1 } else { time };
                prev_states.push(vertex_stalk(node, prev_time));
            } else if tc.is_temporal(id) {
                let TimedNode { node, time } = vs[0];
                kinds.push(CellKind::Temporal { node, time });
                states.push(vertex_stalk(node, time));
                prev_states.push(BTreeSet::new());
            } else {
                let time = vs[0].time;
                kinds.push(CellKind::Link { time });
                states.push(slice_stalk(time, id));
                prev_states.push(BTreeSet::new());
            }
        }
        Ok(Self {
            tc,
            d,
            n,
            protocol,
            kinds,
            states,
            prev_states,
            slices,
        })
    }

    pub fn time_complex(&self) -> &TimeComplex {
        &self.tc
    }

    pub fn time_complex_arc(&self) -> &Arc<TimeComplex> {
        &self.tc
    }

    pub fn packet_dim(&self) -> usize {
        self.d
    }

    pub fn buffer_len(&self) -> usize {
        self.n
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    pub fn kind(&self, cell: CellId) -> CellKind {
        self.kinds[cell]
    }

    /// States allowed over a cell besides `⊥` (`cur` for vertices).
    pub fn states(&self, cell: CellId) -> &BTreeSet<NodeId> {
        &self.states[cell]
    }

    pub fn prev_states(&self, vertex: CellId) -> &BTreeSet<NodeId> {
        &self.prev_states[vertex]
    }

    fn allowed(set: &BTreeSet<NodeId>, s: Activity) -> bool {
        s.node().is_none_or(|m| set.contains(&m))
    }

    fn packets_ok(&self, ps: &[Packet], len: usize) -> bool {
        ps.len() == len && ps.iter().all(|p| p.dim() == self.d)
    }

    fn zero(&self) -> Packet {
        Packet::zero(self.d)
    }

    /// Restriction from vertex `(a,t)` to the edge toward `(a,t+1)`.
    pub fn forward(&self, me: NodeId, cur: Activity, x: &[Packet]) -> (Activity, Vec<Packet>) {
        let n = self.n;
        match cur {
            Activity::Node(m) if m == me && !x[n - 1].is_zero() => {
                let mut q = x[1..n - 1].to_vec();
                q.push(self.zero());
                (cur, q)
            }
            Activity::Node(m) if m != me => (cur, self.protocol.receive_queue(me, x)),
            _ => (Activity::Idle, x[1..].to_vec()),
        }
    }

    /// Restriction from vertex `(a,t+1)` to the edge from `(a,t)`.
    pub fn backward(&self, me: NodeId, prev: Activity, x: &[Packet]) -> (Activity, Vec<Packet>) {
        match prev {
            Activity::Node(m) if m == me => {
                let mut q = x[2..].to_vec();
                q.push(self.zero());
                (prev, q)
            }
            _ => (prev, x[1..].to_vec()),
        }
    }

    /// Restriction from vertex `a` to a within-slice edge whose node states
    /// are `edge_states`.
    pub fn to_link(
        &self,
        me: NodeId,
        cur: Activity,
        x: &[Packet],
        edge_states: &BTreeSet<NodeId>,
    ) -> (Activity, Packet) {
        let n = self.n;
        match cur {
            Activity::Node(m) if m == me && !x[n - 1].is_zero() => (cur, x[n - 1].clone()),
            Activity::Node(m) if m != me && edge_states.contains(&m) => (cur, x[0].clone()),
            _ => (Activity::Idle, self.zero()),
        }
    }

    /// Restriction between within-slice cells of dimension at least 1.
    pub fn link_to_link(
        &self,
        state: Activity,
        packet: &Packet,
        coface_states: &BTreeSet<NodeId>,
    ) -> (Activity, Packet) {
        match state {
            Activity::Node(m) if coface_states.contains(&m) => (state, packet.clone()),
            _ => (Activity::Idle, self.zero()),
        }
    }

    /// Node of a vertex cell; panics on other cells.
    pub fn vertex_node(&self, cell: CellId) -> NodeId {
        match self.kinds[cell] {
            CellKind::Vertex { node, .. } => node,
            _ => panic!("cell {cell} is not a vertex"),
        }
    }

    /// The activation sheaf of the time-`t` slice, which `𝒟` contains as a
    /// subsheaf via [`PayloadSheaf::project`].
    pub fn activation_subsheaf(&self, t: i64) -> Result<&ActivationSheaf, PayloadError> {
        let w = self.tc.window();
        if !w.contains(t) {
            return Err(PayloadError::OutOfWindow(t));
        }
        Ok(&self.slices[(t - w.start()) as usize])
    }

    /// The surjection `A_t(a)` onto the activation stalk: the effective
    /// current state over vertices, the state over other within-slice cells.
    /// `None` for temporal edges.
    pub fn project(&self, cell: CellId, value: &PayloadValue) -> Option<Activity> {
        match (self.kinds[cell], value) {
            (CellKind::Vertex { node, .. }, PayloadValue::Vertex { cur, buffer, .. }) => {
                Some(effective_state(node, *cur, buffer))
            }
            (CellKind::Link { .. }, PayloadValue::Link { state, .. }) => Some(*state),
            _ => None,
        }
    }

    /// Checks `A_t(b) ∘ 𝒟(a⊂b) = A_t𝒟(a⊂b) ∘ A_t(a)` at one value over a
    /// within-slice incidence.
    pub fn morphism_commutes(&self, face: CellId, coface: CellId, value: &PayloadValue) -> bool {
        let (Some(t), Some(_)) = (self.tc.slice_time(face), self.tc.slice_time(coface)) else {
            return true;
        };
        let Some(restricted) = self.restrict(face, coface, value) else {
            return false;
        };
        let act = self.activation_subsheaf(t).expect("slice time in window");
        let (_, local) = self.tc.slice_cell(coface).expect("within-slice");
        let lhs = self.project(coface, &restricted);
        let rhs = self.project(face, value).map(|s| act.restrict_value(local, s));
        lhs.is_some() && lhs == rhs
    }

    /// Every stalk value over `cell` whose packets have payload coordinates
    /// drawn from `coords` and no metadata.
    pub fn stalk_samples(&self, cell: CellId, coords: &[Rational]) -> Vec<PayloadValue> {
        let packets: Vec<Packet> = crate::temporal::words(coords, self.d)
            .into_iter()
            .map(Packet::new)
            .collect();
        let with_idle = |set: &BTreeSet<NodeId>| -> Vec<Activity> {
            std::iter::once(Activity::Idle)
                .chain(set.iter().map(|&m| Activity::Node(m)))
                .collect()
        };
        let states = with_idle(&self.states[cell]);
        match self.kinds[cell] {
            CellKind::Vertex { .. } => {
                let prevs = with_idle(&self.prev_states[cell]);
                let buffers = crate::temporal::words(&packets, self.n);
                let mut out = Vec::new();
                for &prev in &prevs {
                    for &cur in &states {
                        for buffer in &buffers {
                            out.push(PayloadValue::Vertex {
                                prev,
                                cur,
                                buffer: buffer.clone(),
                            });
                        }
                    }
                }
                out
            }
            CellKind::Temporal { .. } => {
                let queues = crate::temporal::words(&packets, self.n - 1);
                states
                    .iter()
                    .flat_map(|&state| {
                        queues.iter().map(move |q| PayloadValue::Temporal {
                            state,
                            queue: q.clone(),
                        })
                    })
                    .collect()
            }
            CellKind::Link { .. } => states
                .iter()
                .flat_map(|&state| {
                    packets.iter().map(move |p| PayloadValue::Link {
                        state,
                        packet: p.clone(),
                    })
                })
                .collect(),
        }
    }

    /// The 2-term grouping sheaf of a node's thread, valued in the states
    /// the node can see, and the projection onto it.
    pub fn node_thread_subsheaf(&self, node: NodeId) -> Result<GroupingSheaf<Activity>, PayloadError> {
        if !self.tc.nodes().contains(&node) {
            return Err(PayloadError::UnknownNode(node));
        }
        let mut alphabet: BTreeSet<Activity> = BTreeSet::from([Activity::Idle]);
        for t in self.tc.window().times() {
            let v = self.tc.vertex(node, t).expect("vertex");
            alphabet.extend(self.states[v].iter().map(|&m| Activity::Node(m)));
            alphabet.extend(self.prev_states[v].iter().map(|&m| Activity::Node(m)));
        }
        Ok(GroupingSheaf::new(2, alphabet.into_iter().collect(), self.tc.window()).expect("depth 2"))
    }

    /// Projection of a thread cell's value onto the thread grouping sheaf:
    /// `[effective cur, prev]` over vertices, `[state]` over temporal edges.
    pub fn thread_projection(&self, cell: CellId, value: &PayloadValue) -> Option<Vec<Activity>> {
        match (self.kinds[cell], value) {
            (CellKind::Vertex { node, .. }, PayloadValue::Vertex { prev, cur, buffer }) => {
                Some(vec![effective_state(node, *cur, buffer), *prev])
            }
            (CellKind::Temporal { .. }, PayloadValue::Temporal { state, .. }) => Some(vec![*state]),
            _ => None,
        }
    }

    /// Cells of one node's thread in time order, alternating vertex and
    /// temporal edge.
    pub fn thread_cells(&self, node: NodeId) -> Vec<CellId> {
        let w = self.tc.window();
        let mut out = Vec::new();
        for t in w.times() {
            out.push(self.tc.vertex(node, t).expect("vertex"));
            if t < w.end() {
                out.push(self.tc.temporal_edge(node, t).expect("temporal edge"));
            }
        }
        out
    }
}

impl CellSheaf for PayloadSheaf {
    type Vertex = TimedNode;
    type Value = PayloadValue;

    fn base(&self) -> &SimplicialComplex<TimedNode> {
        self.tc.complex()
    }

    fn in_stalk(&self, cell: CellId, value: &PayloadValue) -> bool {
        let states = &self.states[cell];
        match (self.kinds[cell], value) {
            (CellKind::Vertex { .. }, PayloadValue::Vertex { prev, cur, buffer }) => {
                Self::allowed(&self.prev_states[cell], *prev)
                    && Self::allowed(states, *cur)
                    && self.packets_ok(buffer, self.n)
            }
            (CellKind::Temporal { .. }, PayloadValue::Temporal { state, queue }) => {
                Self::allowed(states, *state) && self.packets_ok(queue, self.n - 1)
            }
            (CellKind::Link { .. }, PayloadValue::Link { state, packet }) => {
                Self::allowed(states, *state) && packet.dim() == self.d
            }
            _ => false,
        }
    }

    fn restrict(&self, face: CellId, coface: CellId, value: &PayloadValue) -> Option<PayloadValue> {
        match (self.kinds[face], self.kinds[coface], value) {
            (
                CellKind::Vertex { node, time },
                CellKind::Temporal { .. },
                PayloadValue::Vertex { prev, cur, buffer },
            ) => {
                if buffer.len() != self.n {
                    return None;
                }
                let edge_start = self.base().cell(coface).vertices()[0].time;
                let (state, queue) = if edge_start == time {
                    self.forward(node, *cur, buffer)
                } else {
                    self.backward(node, *prev, buffer)
                };
                Some(PayloadValue::Temporal { state, queue })
            }
            (CellKind::Vertex { node, .. }, CellKind::Link { .. }, PayloadValue::Vertex { cur, buffer, .. }) => {
                if buffer.len() != self.n {
                    return None;
                }
                let (state, packet) = self.to_link(node, *cur, buffer, &self.states[coface]);
                Some(PayloadValue::Link { state, packet })
            }
            (CellKind::Link { .. }, CellKind::Link { .. }, PayloadValue::Link { state, packet }) => {
                let (state, packet) = self.link_to_link(*state, packet, &self.states[coface]);
                Some(PayloadValue::Link { state, packet })
            }
            _ => None,
        }
    }
}
