use std::collections::BTreeMap;

use super::packet::{zero_buffer, Packet};
use super::schedule::Schedule;
use super::sheaf::{CellKind, PayloadSheaf, PayloadValue};
use super::PayloadError;
use crate::activation::Activity;
use crate::sheaf::{check_section, CellSheaf, Violation};
use crate::NodeId;

/// A node's state at the start of the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialState {
    pub prev: Activity,
    pub buffer: Vec<Packet>,
}

/// A packet placed into transmit slot `x_slot` (`2 ≤ slot ≤ n`) of a node at
/// time `time`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Injection {
    pub node: NodeId,
    pub time: i64,
    pub slot: usize,
    pub packet: Packet,
}

/// Runs the schedule forward and returns a global section of `𝒟`, one value
/// per cell of the time-dependent complex.
///
/// Slots are free at the start of the window and, after a node transmits,
/// slot `x₂`; injections may only fill free, empty slots. A scheduled node
/// whose queue exit `xₙ` is empty stays silent, and its neighbours see an idle
/// channel.
pub fn simulate(
    ps: &PayloadSheaf,
    schedule: &Schedule,
    initial: &BTreeMap<NodeId, InitialState>,
    injections: &[Injection],
) -> Result<Vec<PayloadValue>, PayloadError> {
    let tc = ps.time_complex();
    let (d, n) = (ps.packet_dim(), ps.buffer_len());
    let window = tc.window();
    let sections = schedule.sections(tc)?;
    let x = tc.complex();

    let mut injected: BTreeMap<(i64, NodeId), Vec<&Injection>> = BTreeMap::new();
    for inj in injections {
        if !tc.nodes().contains(&inj.node) {
            return Err(PayloadError::UnknownNode(inj.node));
        }
        if !window.contains(inj.time) {
            return Err(PayloadError::OutOfWindow(inj.time));
        }
        if !(2..=n).contains(&inj.slot) {
            return Err(conflict(inj, format!("slot must lie in 2..={n}")));
        }
        if inj.packet.dim() != d {
            return Err(PayloadError::PacketDim {
                expected: d,
                found: inj.packet.dim(),
            });
        }
        injected.entry((inj.time, inj.node)).or_default().push(inj);
    }

    // per node: prev state, buffer, whether x₂ was vacated by a transmission
    let mut live: BTreeMap<NodeId, (Activity, Vec<Packet>, bool)> = BTreeMap::new();
    for &node in tc.nodes() {
        let init = initial.get(&node);
        let prev = init.map_or(Activity::Idle, |s| s.prev);
        let buffer = init.map_or_else(|| zero_buffer(n, d), |s| s.buffer.clone());
        if buffer.len() != n || buffer.iter().any(|p| p.dim() != d) {
            return Err(PayloadError::InitialState {
                node,
                reason: format!("buffer must hold {n} packets of dimension {d}"),
            });
        }
        live.insert(node, (prev, buffer, false));
    }
    if let Some(&node) = initial.keys().find(|k| !tc.nodes().contains(k)) {
        return Err(PayloadError::UnknownNode(node));
    }

    let mut values: Vec<Option<PayloadValue>> = vec![None; x.len()];
    for t in window.times() {
        let first = t == window.start();
        for (&node, (_, buffer, fresh)) in live.iter_mut() {
            for inj in injected.get(&(t, node)).into_iter().flatten() {
                let i = inj.slot - 1;
                if !(first || (*fresh && i == 1)) {
                    return Err(conflict(inj, "slot is not free".into()));
                }
                if !buffer[i].is_zero() {
                    return Err(conflict(inj, "slot is occupied".into()));
                }
                buffer[i] = inj.packet.clone();
            }
        }

        let sends = |m: NodeId, live: &BTreeMap<NodeId, (Activity, Vec<Packet>, bool)>| !live[&m].1[n - 1].is_zero();
        let mut cur = BTreeMap::new();
        for &node in tc.nodes() {
            let c = match sections.node_state(tc, node, t) {
                Activity::Node(m) if m != node && !sends(m, &live) => Activity::Idle,
                s => s,
            };
            cur.insert(node, c);
        }
        for (&node, &c) in &cur {
            if let Activity::Node(m) = c {
                if m != node {
                    let tail = live[&m].1[n - 1].clone();
                    let slot = &mut live.get_mut(&node).expect("node").1[0];
                    if first && !slot.is_zero() && *slot != tail {
                        return Err(PayloadError::InitialState {
                            node,
                            reason: format!("receive buffer conflicts with the packet from {m}"),
                        });
                    }
                    *slot = tail;
                }
            }
        }
        for (&node, (prev, buffer, _)) in &live {
            let v = tc.vertex(node, t).expect("vertex");
            values[v] = Some(PayloadValue::Vertex {
                prev: *prev,
                cur: cur[&node],
                buffer: buffer.clone(),
            });
        }

        for k in 1..=x.dim().unwrap_or(0) {
            for c in x.ids_of_dim(k) {
                if ps.kind(c) != (CellKind::Link { time: t }) {
                    continue;
                }
                let face = x.faces(c)[0];
                let from = values[face].as_ref().expect("faces are filled first");
                values[c] = ps.restrict(face, c, from);
            }
        }

        if t < window.end() {
            for (&node, entry) in live.iter_mut() {
                let v = tc.vertex(node, t).expect("vertex");
                let e = tc.temporal_edge(node, t).expect("temporal edge");
                let (state, queue) = ps.forward(node, cur[&node], &entry.1);
                let vacated = state == Activity::Node(node);
                let mut next = vec![Packet::zero(d)];
                if vacated {
                    next.push(Packet::zero(d));
                    next.extend_from_slice(&queue[..n - 2]);
                } else {
                    next.extend_from_slice(&queue);
                }
                debug_assert!(values[v].is_some());
                values[e] = Some(PayloadValue::Temporal { state, queue });
                *entry = (state, next, vacated);
            }
        }
    }

    let values: Vec<PayloadValue> = values.into_iter().map(|v| v.expect("every cell assigned")).collect();
    check_section(ps, &values).map_err(|v| describe_violation(ps, v))?;
    Ok(values)
}

fn conflict(inj: &Injection, reason: String) -> PayloadError {
    PayloadError::InjectionConflict {
        node: inj.node,
        time: inj.time,
        slot: inj.slot,
        reason,
    }
}

pub(crate) fn describe_violation<S: CellSheaf + ?Sized>(sheaf: &S, v: Violation) -> PayloadError
where
    S::Vertex: std::fmt::Display,
{
    let name = |c| {
        let parts: Vec<String> = sheaf
            .base()
            .cell(c)
            .vertices()
            .iter()
            .map(ToString::to_string)
            .collect();
        format!("[{}]", parts.join(","))
    };
    match v {
        Violation::Mismatch { face, coface } => PayloadError::Inconsistent {
            face: name(face),
            coface: name(coface),
        },
        Violation::OutOfStalk { cell } => PayloadError::Inconsistent {
            face: name(cell),
            coface: name(cell),
        },
        Violation::WrongLength { expected, found } => PayloadError::Inconsistent {
            face: format!("{expected} cells"),
            coface: format!("{found} values"),
        },
    }
}
