use std::collections::BTreeMap;
use std::sync::Arc;

use sheafnet::activation::{ActivationError, Activity};
use sheafnet::complex::{Cell, Graph};
use sheafnet::linalg::{rational, Rational};
use sheafnet::payload::{
    fixed_activation_subsheaf, simulate, CellKind, InitialState, Injection, Packet, PayloadError, PayloadSheaf,
    PayloadValue, Protocol, Schedule,
};
use sheafnet::sheaf::{check_section, CellSheaf};
use sheafnet::temporal::{TimeComplex, TimeWindow, TimedNode};
use sheafnet::NodeId;

use Activity::{Idle, Node};

fn p(v: i64) -> Packet {
    Packet::new(vec![rational(v)])
}

fn buf(vs: &[i64]) -> Vec<Packet> {
    vs.iter().map(|&v| p(v)).collect()
}

fn tc(nodes: &[NodeId], edges: &[(NodeId, NodeId)], window: (i64, i64)) -> Arc<TimeComplex> {
    let g = Graph::new(nodes.iter().copied(), edges.iter().copied()).unwrap();
    Arc::new(TimeComplex::repeated(&g, TimeWindow::new(window.0, window.1).unwrap()))
}

fn path3(window: (i64, i64)) -> Arc<TimeComplex> {
    tc(&[1, 2, 3], &[(1, 2), (2, 3)], window)
}

fn cell(ps: &PayloadSheaf, vs: &[(NodeId, i64)]) -> usize {
    let c = Cell::new(vs.iter().map(|&(n, t)| TimedNode::new(n, t)).collect()).unwrap();
    ps.time_complex().complex().id(&c).unwrap()
}

fn vertex(prev: Activity, cur: Activity, b: &[i64]) -> PayloadValue {
    PayloadValue::Vertex {
        prev,
        cur,
        buffer: buf(b),
    }
}

fn temporal(state: Activity, q: &[i64]) -> PayloadValue {
    PayloadValue::Temporal { state, queue: buf(q) }
}

fn link(state: Activity, v: i64) -> PayloadValue {
    PayloadValue::Link { state, packet: p(v) }
}

#[test]
fn temporal_restriction_branches() {
    let ps = PayloadSheaf::new(path3((0, 1)), 1, 3, Protocol::ForwardEverything).unwrap();
    let (v0, v1, e) = (cell(&ps, &[(2, 0)]), cell(&ps, &[(2, 1)]), cell(&ps, &[(2, 0), (2, 1)]));
    let r = |face, value| ps.restrict(face, e, &value).unwrap();
    assert_eq!(r(v0, vertex(Idle, Node(2), &[5, 6, 7])), temporal(Node(2), &[6, 0]));
    assert_eq!(r(v0, vertex(Idle, Node(1), &[5, 6, 7])), temporal(Node(1), &[5, 7]));
    assert_eq!(r(v0, vertex(Idle, Node(2), &[5, 6, 0])), temporal(Idle, &[6, 0]));
    assert_eq!(r(v0, vertex(Idle, Idle, &[5, 6, 7])), temporal(Idle, &[6, 7]));
    assert_eq!(r(v1, vertex(Node(2), Idle, &[5, 6, 7])), temporal(Node(2), &[7, 0]));
    assert_eq!(r(v1, vertex(Node(1), Node(2), &[5, 6, 7])), temporal(Node(1), &[6, 7]));
    assert_eq!(r(v1, vertex(Idle, Idle, &[5, 6, 7])), temporal(Idle, &[6, 7]));
}

#[test]
fn vertex_to_link_branches() {
    let ps = PayloadSheaf::new(path3((0, 0)), 1, 3, Protocol::ForwardNothing).unwrap();
    let v = cell(&ps, &[(2, 0)]);
    let e12 = cell(&ps, &[(1, 0), (2, 0)]);
    let r = |value| ps.restrict(v, e12, &value).unwrap();
    assert_eq!(r(vertex(Idle, Node(2), &[5, 6, 7])), link(Node(2), 7));
    assert_eq!(r(vertex(Idle, Node(1), &[5, 6, 7])), link(Node(1), 5));
    // node 3 cannot be heard on [1,2]
    assert_eq!(r(vertex(Idle, Node(3), &[5, 6, 7])), link(Idle, 0));
    assert_eq!(r(vertex(Idle, Node(2), &[5, 6, 0])), link(Idle, 0));
    assert_eq!(r(vertex(Idle, Idle, &[5, 6, 7])), link(Idle, 0));
}

#[test]
fn link_to_link_branches() {
    let tc = tc(&[1, 2, 3, 4], &[(1, 2), (1, 3), (2, 3), (1, 4), (2, 4)], (0, 0));
    let ps = PayloadSheaf::new(tc, 1, 3, Protocol::ForwardNothing).unwrap();
    let e = cell(&ps, &[(1, 0), (2, 0)]);
    let tri = cell(&ps, &[(1, 0), (2, 0), (3, 0)]);
    let r = |value| ps.restrict(e, tri, &value).unwrap();
    assert_eq!(r(link(Node(3), 4)), link(Node(3), 4));
    assert_eq!(r(link(Node(4), 4)), link(Idle, 0));
    assert_eq!(r(link(Idle, 4)), link(Idle, 0));
}

#[test]
fn two_node_forward_everything_hop() {
    let tc = tc(&[0, 1], &[(0, 1)], (0, 1));
    let ps = PayloadSheaf::new(tc, 1, 3, Protocol::ForwardEverything).unwrap();
    let schedule = Schedule::idle().with(0, [0]);
    let inj = Injection {
        node: 0,
        time: 0,
        slot: 3,
        packet: p(9),
    };
    let values = simulate(&ps, &schedule, &BTreeMap::new(), &[inj]).unwrap();
    assert_eq!(values[cell(&ps, &[(1, 0)])], vertex(Idle, Node(0), &[9, 0, 0]));
    assert_eq!(values[cell(&ps, &[(0, 0), (1, 0)])], link(Node(0), 9));
    assert_eq!(values[cell(&ps, &[(1, 1)])], vertex(Node(0), Idle, &[0, 9, 0]));
    assert_eq!(values[cell(&ps, &[(0, 1)])], vertex(Node(0), Idle, &[0, 0, 0]));
}

#[test]
fn idle_schedule_gives_the_zero_section() {
    let ps = PayloadSheaf::new(path3((0, 2)), 2, 3, Protocol::ForwardWithQueueManagement).unwrap();
    let values = simulate(&ps, &Schedule::idle(), &BTreeMap::new(), &[]).unwrap();
    for v in &values {
        assert_eq!(*v, v.zero_like());
    }
}

#[test]
fn packet_crosses_the_path_in_two_hops() {
    let ps = PayloadSheaf::new(path3((0, 1)), 1, 2, Protocol::ForwardEverything).unwrap();
    let schedule = Schedule::idle().with(0, [1]).with(1, [2]);
    let inj = Injection {
        node: 1,
        time: 0,
        slot: 2,
        packet: p(4),
    };
    let values = simulate(&ps, &schedule, &BTreeMap::new(), &[inj]).unwrap();
    assert_eq!(values[cell(&ps, &[(3, 1)])], vertex(Idle, Node(2), &[4, 0]));
    assert_eq!(values[cell(&ps, &[(2, 1)])], vertex(Node(1), Node(2), &[0, 4]));
}

#[test]
fn interfering_schedule_names_node_two() {
    let ps = PayloadSheaf::new(path3((0, 0)), 1, 2, Protocol::ForwardNothing).unwrap();
    let err = simulate(&ps, &Schedule::idle().with(0, [1, 3]), &BTreeMap::new(), &[]).unwrap_err();
    match err {
        PayloadError::InvalidSchedule {
            time: 0,
            source: ActivationError::Interference { cell, .. },
        } => assert_eq!(cell, "[2]"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn injections_need_free_empty_slots() {
    let ps = PayloadSheaf::new(path3((0, 2)), 1, 3, Protocol::ForwardNothing).unwrap();
    let inj = |time, slot| Injection {
        node: 1,
        time,
        slot,
        packet: p(1),
    };
    let none = BTreeMap::new();
    let idle = Schedule::idle();
    assert!(matches!(
        simulate(&ps, &idle, &none, &[inj(1, 2)]),
        Err(PayloadError::InjectionConflict { .. })
    ));
    assert!(matches!(
        simulate(&ps, &idle, &none, &[inj(0, 2), inj(0, 2)]),
        Err(PayloadError::InjectionConflict { .. })
    ));
    assert!(matches!(
        simulate(&ps, &idle, &none, &[inj(0, 1)]),
        Err(PayloadError::InjectionConflict { .. })
    ));
    // transmitting at t=0 frees x₂ at t=1
    let sends = Schedule::idle().with(0, [1]);
    simulate(&ps, &sends, &none, &[inj(0, 3), inj(1, 2)]).unwrap();
}

#[test]
fn initial_state_is_respected() {
    let ps = PayloadSheaf::new(path3((0, 1)), 1, 3, Protocol::ForwardNothing).unwrap();
    let initial = BTreeMap::from([(
        2,
        InitialState {
            prev: Node(1),
            buffer: buf(&[0, 5, 6]),
        },
    )]);
    let values = simulate(&ps, &Schedule::idle().with(0, [2]), &initial, &[]).unwrap();
    assert_eq!(values[cell(&ps, &[(1, 0)])], vertex(Idle, Node(2), &[6, 0, 0]));
    assert_eq!(values[cell(&ps, &[(2, 1)])], vertex(Node(2), Idle, &[0, 0, 5]));
    let mut bad = initial.clone();
    bad.insert(
        1,
        InitialState {
            prev: Idle,
            buffer: buf(&[3, 0, 0]),
        },
    );
    assert!(matches!(
        simulate(&ps, &Schedule::idle().with(0, [2]), &bad, &[]),
        Err(PayloadError::InitialState { node: 1, .. })
    ));
}

#[test]
fn silent_transmitter_leaves_channel_idle() {
    let ps = PayloadSheaf::new(path3((0, 1)), 1, 2, Protocol::ForwardEverything).unwrap();
    let values = simulate(&ps, &Schedule::idle().with(0, [2]), &BTreeMap::new(), &[]).unwrap();
    assert_eq!(values[cell(&ps, &[(2, 0)])], vertex(Idle, Node(2), &[0, 0]));
    assert_eq!(values[cell(&ps, &[(1, 0)])], vertex(Idle, Idle, &[0, 0]));
    assert_eq!(values[cell(&ps, &[(2, 1)])], vertex(Idle, Idle, &[0, 0]));
}

#[test]
fn activation_subsheaf_matches_the_slice() {
    let ps = PayloadSheaf::new(path3((0, 1)), 1, 2, Protocol::ForwardNothing).unwrap();
    let tc = ps.time_complex();
    for t in [0, 1] {
        let act = ps.activation_subsheaf(t).unwrap();
        let slice = tc.timeslice(t).unwrap();
        for local in 0..slice.len() {
            let c = tc.lift(t, local).unwrap();
            assert_eq!(ps.states(c), act.stalk(local));
        }
    }
    assert_eq!(ps.activation_subsheaf(2).unwrap_err(), PayloadError::OutOfWindow(2));
}

#[test]
fn morphism_commutes_on_sampled_values() {
    let coords = [rational(0), rational(1)];
    let tcs = [
        path3((0, 0)),
        tc(&[1, 2, 3, 4], &[(1, 2), (1, 3), (2, 3), (1, 4), (2, 4)], (0, 0)),
    ];
    for tc in tcs {
        let ps = PayloadSheaf::new(tc, 1, 3, Protocol::ForwardForOthersPriority).unwrap();
        for (face, coface) in ps.time_complex().complex().incidences() {
            for value in ps.stalk_samples(face, &coords) {
                assert!(
                    ps.morphism_commutes(face, coface, &value),
                    "{face}->{coface} at {value}"
                );
            }
        }
    }
}

#[test]
fn thread_projection_is_a_grouping_section() {
    let ps = PayloadSheaf::new(path3((0, 2)), 1, 2, Protocol::ForwardEverything).unwrap();
    let schedule = Schedule::idle().with(0, [1]).with(1, [2]).with(2, [3]);
    let inj = Injection {
        node: 1,
        time: 0,
        slot: 2,
        packet: p(1),
    };
    let values = simulate(&ps, &schedule, &BTreeMap::new(), &[inj]).unwrap();
    for node in [1, 2, 3] {
        let gs = ps.node_thread_subsheaf(node).unwrap();
        let projected: Vec<Vec<Activity>> = ps
            .thread_cells(node)
            .into_iter()
            .map(|c| ps.thread_projection(c, &values[c]).unwrap())
            .collect();
        // thread cells alternate vertex, edge; grouping cells list vertices first
        let m = gs.window().len();
        let mut ordered = Vec::new();
        ordered.extend(projected.iter().step_by(2).cloned());
        ordered.extend(projected.iter().skip(1).step_by(2).cloned());
        assert_eq!(ordered.len(), 2 * m - 1);
        check_section(&gs, &ordered).unwrap();
    }
    assert_eq!(ps.node_thread_subsheaf(9).unwrap_err(), PayloadError::UnknownNode(9));
}

#[test]
fn fixed_activation_shapes() {
    let ps = PayloadSheaf::new(path3((0, 1)), 2, 3, Protocol::ForwardEverything).unwrap();
    let p = fixed_activation_subsheaf(&ps, &Schedule::idle().with(0, [2])).unwrap();
    p.sheaf().check_functoriality().unwrap();
    for c in 0..ps.time_complex().complex().len() {
        let expected = match ps.kind(c) {
            CellKind::Vertex { .. } => 6,
            CellKind::Temporal { .. } => 4,
            CellKind::Link { .. } => 2,
        };
        assert_eq!(p.sheaf().dim(c), expected);
    }
    let nonlinear = PayloadSheaf::new(path3((0, 1)), 1, 3, Protocol::ForwardForOthers).unwrap();
    assert!(matches!(
        fixed_activation_subsheaf(&nonlinear, &Schedule::idle()),
        Err(PayloadError::NonlinearProtocol(_))
    ));
}

#[test]
fn single_idle_node_bound() {
    let ps = PayloadSheaf::new(tc(&[1], &[], (0, 1)), 1, 2, Protocol::ForwardNothing).unwrap();
    let p = fixed_activation_subsheaf(&ps, &Schedule::idle()).unwrap();
    assert_eq!(p.throughput_bound(), 3);
}

#[test]
fn idle_bound_is_per_node_sliding_window() {
    // each idle node keeps its queue: n−1 shared slots plus one receive slot per time
    for (k, m, n, d) in [(1, 3, 3, 1), (2, 2, 2, 2), (3, 3, 3, 1)] {
        let nodes: Vec<NodeId> = (0..k).collect();
        let ps = PayloadSheaf::new(tc(&nodes, &[], (0, m - 1)), d, n, Protocol::ForwardNothing).unwrap();
        let p = fixed_activation_subsheaf(&ps, &Schedule::idle()).unwrap();
        let per_node = (n - 1) + m as usize;
        assert_eq!(p.throughput_bound(), k as usize * per_node * d);
    }
}

#[test]
fn route_generator_two_hops() {
    let ps = PayloadSheaf::new(path3((0, 2)), 1, 2, Protocol::ForwardEverything).unwrap();
    let schedule = Schedule::idle().with(0, [1]).with(1, [2]);
    let p = fixed_activation_subsheaf(&ps, &schedule).unwrap();
    let route = p.route_section(&ps, 1, 0, 2, vec![rational(1)]).unwrap();
    assert_eq!(route.hops, vec![(1, 0), (2, 1)]);
    assert!(p.sheaf().is_section(&route.values));
    let v = ps.time_complex().vertex(3, 1).unwrap();
    assert_eq!(route.values[v], vec![rational(1), Rational::from_integer(0.into())]);
    assert!(p.route_section(&ps, 1, 1, 2, vec![rational(1)]).is_ok());
    assert!(matches!(
        p.route_section(&ps, 2, 1, 2, vec![rational(1)]),
        Err(PayloadError::InjectionConflict { .. })
    ));
}

#[test]
fn bound_shrinks_when_links_are_added() {
    let schedule = Schedule::idle().with(0, [1]);
    let bound = |edges: &[(NodeId, NodeId)]| {
        let ps = PayloadSheaf::new(tc(&[1, 2, 3], edges, (0, 1)), 1, 2, Protocol::ForwardEverything).unwrap();
        fixed_activation_subsheaf(&ps, &schedule).unwrap().throughput_bound()
    };
    let none = bound(&[]);
    let one = bound(&[(1, 2)]);
    let two = bound(&[(1, 2), (1, 3)]);
    assert!(none >= one && one >= two, "{none} {one} {two}");
}
