use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use super::schedule::Schedule;
use super::sheaf::{CellKind, PayloadSheaf};
use super::PayloadError;
use crate::activation::Activity;
use crate::complex::CellId;
use crate::linalg::{Rational, SparseMatrix};
use crate::sheaflin::VectorSheaf;
use crate::temporal::TimedNode;
use crate::NodeId;

/// The subsheaf `𝒫` of `𝒟` with every state component fixed by a schedule:
/// stalks `Dⁿ`, `Dⁿ⁻¹` and `D`, restrictions the branch of each `𝒟`
/// restriction picked by the fixed states.
///
/// A scheduled node uses the transmitting branch whatever its queue exit
/// holds; an empty exit then sends the zero packet.
#[derive(Clone, Debug)]
pub struct FixedActivation {
    sheaf: VectorSheaf<TimedNode>,
    /// Per cell: `cur` over vertices, the edge state over temporal edges,
    /// `s_t` elsewhere.
    states: Vec<Activity>,
    /// Per vertex: the schedule's state one slice earlier (`⊥` at the start).
    prev: Vec<Activity>,
    n: usize,
    d: usize,
}

/// Output slot `i` of a restriction reads input slot `pick[i]` (or is zero);
/// each slot is a block of `d` coordinates.
fn slot_selection(in_slots: usize, pick: &[Option<usize>], d: usize) -> SparseMatrix {
    let coords: Vec<Option<usize>> = pick
        .iter()
        .flat_map(|p| (0..d).map(move |k| p.map(|s| s * d + k)))
        .collect();
    SparseMatrix::selection(in_slots * d, &coords)
}

/// Slot picks of the `𝒟` restriction `face ⊂ coface` with the states fixed.
pub(crate) fn fixed_picks(
    ps: &PayloadSheaf,
    face: CellId,
    coface: CellId,
    states: &[Activity],
    prev: &[Activity],
) -> Vec<Option<usize>> {
    let n = ps.buffer_len();
    let x = ps.time_complex().complex();
    match (ps.kind(face), ps.kind(coface)) {
        (CellKind::Vertex { node, time }, CellKind::Temporal { .. }) => {
            if x.cell(coface).vertices()[0].time == time {
                match states[face] {
                    Activity::Node(m) if m == node => (1..n - 1).map(Some).chain([None]).collect(),
                    Activity::Node(_) => ps.protocol().fixed_indices(n).expect("linear protocol"),
                    Activity::Idle => (1..n).map(Some).collect(),
                }
            } else if prev[face] == Activity::Node(node) {
                (2..n).map(Some).chain([None]).collect()
            } else {
                (1..n).map(Some).collect()
            }
        }
        (CellKind::Vertex { node, .. }, CellKind::Link { .. }) => match states[face] {
            Activity::Node(m) if m == node => vec![Some(n - 1)],
            Activity::Node(m) if ps.states(coface).contains(&m) => vec![Some(0)],
            _ => vec![None],
        },
        (CellKind::Link { .. }, CellKind::Link { .. }) => match states[face] {
            Activity::Node(m) if ps.states(coface).contains(&m) => vec![Some(0)],
            _ => vec![None],
        },
        other => panic!("no restriction between {other:?}"),
    }
}

/// Number of packet slots over a cell.
pub(crate) fn slots(ps: &PayloadSheaf, cell: CellId) -> usize {
    match ps.kind(cell) {
        CellKind::Vertex { .. } => ps.buffer_len(),
        CellKind::Temporal { .. } => ps.buffer_len() - 1,
        CellKind::Link { .. } => 1,
    }
}

/// Fixes the state components of `𝒟` to the schedule's sections.
pub fn fixed_activation_subsheaf(ps: &PayloadSheaf, schedule: &Schedule) -> Result<FixedActivation, PayloadError> {
    if !ps.protocol().is_linear() {
        return Err(PayloadError::NonlinearProtocol(ps.protocol().name().to_string()));
    }
    let tc = ps.time_complex();
    let sections = schedule.sections(tc)?;
    let x = tc.complex();
    let start = tc.window().start();
    let mut states = Vec::with_capacity(x.len());
    let mut prev = Vec::with_capacity(x.len());
    for c in 0..x.len() {
        match ps.kind(c) {
            CellKind::Temporal { node, time } => {
                states.push(sections.node_state(tc, node, time));
                prev.push(Activity::Idle);
            }
            CellKind::Vertex { node, time } => {
                states.push(sections.state(tc, c).expect("vertex in a slice"));
                prev.push(if time > start {
                    sections.node_state(tc, node, time - 1)
                } else {
                    Activity::Idle
                });
            }
            CellKind::Link { .. } => {
                states.push(sections.state(tc, c).expect("link in a slice"));
                prev.push(Activity::Idle);
            }
        }
    }
    let (d, n) = (ps.packet_dim(), ps.buffer_len());
    let dims: Vec<usize> = (0..x.len()).map(|c| slots(ps, c) * d).collect();
    let restrictions: Vec<_> = x
        .incidences()
        .map(|(f, c)| {
            let pick = fixed_picks(ps, f, c, &states, &prev);
            ((f, c), slot_selection(slots(ps, f), &pick, d))
        })
        .collect();
    let sheaf = VectorSheaf::new(Arc::clone(tc.complex_arc()), dims, restrictions).expect("shapes follow the stalks");
    Ok(FixedActivation {
        sheaf,
        states,
        prev,
        n,
        d,
    })
}

/// `dim H⁰(𝒫)`.
pub fn throughput_bound(p: &VectorSheaf<TimedNode>) -> usize {
    p.global_section_space().len()
}

/// A section of `𝒫` carrying one packet, with the hops it makes.
#[derive(Clone, Debug)]
pub struct Route {
    /// Value per cell of the time-dependent complex.
    pub values: Vec<Vec<Rational>>,
    /// `(transmitter, time)` for each time the packet is on a link.
    pub hops: Vec<(NodeId, i64)>,
}

impl FixedActivation {
    pub fn sheaf(&self) -> &VectorSheaf<TimedNode> {
        &self.sheaf
    }

    pub fn state(&self, cell: CellId) -> Activity {
        self.states[cell]
    }

    pub fn prev(&self, vertex: CellId) -> Activity {
        self.prev[vertex]
    }

    pub fn throughput_bound(&self) -> usize {
        throughput_bound(&self.sheaf)
    }

    /// Places `payload` in transmit slot `x_slot` of `origin` at `time`, zero
    /// data everywhere else, and pushes it forward through the fixed
    /// restrictions. Before `time` everything is zero, so the slot must be
    /// free: any transmit slot at the window start, otherwise `x₂` right
    /// after `origin` transmitted.
    pub fn route_section(
        &self,
        ps: &PayloadSheaf,
        origin: NodeId,
        time: i64,
        slot: usize,
        payload: Vec<Rational>,
    ) -> Result<Route, PayloadError> {
        let tc = ps.time_complex();
        let x = tc.complex();
        let (n, d) = (self.n, self.d);
        let window = tc.window();
        if !tc.nodes().contains(&origin) {
            return Err(PayloadError::UnknownNode(origin));
        }
        if !window.contains(time) {
            return Err(PayloadError::OutOfWindow(time));
        }
        if payload.len() != d {
            return Err(PayloadError::PacketDim {
                expected: d,
                found: payload.len(),
            });
        }
        let origin_v = tc.vertex(origin, time).expect("vertex");
        let free = (2..=n).contains(&slot)
            && (time == window.start() || (slot == 2 && self.prev[origin_v] == Activity::Node(origin)));
        if !free {
            return Err(PayloadError::InjectionConflict {
                node: origin,
                time,
                slot,
                reason: "slot is not free".into(),
            });
        }

        let zeros = |len: usize| vec![Rational::zero(); len];
        let mut values: Vec<Vec<Rational>> = (0..x.len()).map(|c| zeros(self.sheaf.dim(c))).collect();
        let mut buffers: BTreeMap<NodeId, Vec<Rational>> = tc.nodes().iter().map(|&m| (m, zeros(n * d))).collect();
        let mut hops = Vec::new();
        for t in window.times() {
            if t == time {
                let b = buffers.get_mut(&origin).expect("origin");
                b[(slot - 1) * d..slot * d].clone_from_slice(&payload);
            }
            let mut received = BTreeMap::new();
            for &a in tc.nodes() {
                let v = tc.vertex(a, t).expect("vertex");
                if let Activity::Node(m) = self.states[v] {
                    if m != a {
                        received.insert(a, buffers[&m][(n - 1) * d..].to_vec());
                    } else if buffers[&a][(n - 1) * d..].iter().any(|c| !c.is_zero()) {
                        hops.push((a, t));
                    }
                }
            }
            for (a, packet) in received {
                buffers.get_mut(&a).expect("node")[..d].clone_from_slice(&packet);
            }
            for (&a, b) in &buffers {
                values[tc.vertex(a, t).expect("vertex")] = b.clone();
            }
            for k in 1..=x.dim().unwrap_or(0) {
                for c in x.ids_of_dim(k) {
                    if ps.kind(c) == (CellKind::Link { time: t }) {
                        let face = x.faces(c)[0];
                        values[c] = self.sheaf.restriction(face, c).expect("incidence").apply(&values[face]);
                    }
                }
            }
            if t < window.end() {
                for &a in tc.nodes() {
                    let v = tc.vertex(a, t).expect("vertex");
                    let e = tc.temporal_edge(a, t).expect("temporal edge");
                    let queue = self.sheaf.restriction(v, e).expect("incidence").apply(&values[v]);
                    let mut next = zeros(d);
                    if self.states[e] == Activity::Node(a) {
                        next.extend(zeros(d));
                        next.extend_from_slice(&queue[..(n - 2) * d]);
                    } else {
                        next.extend_from_slice(&queue);
                    }
                    values[e] = queue;
                    buffers.insert(a, next);
                }
            }
        }
        Ok(Route { values, hops })
    }
}
