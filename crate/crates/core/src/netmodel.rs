//! Network descriptions: nodes, directed signal levels and the decode
//! threshold, and the link graphs and link complexes they induce.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thiserror::Error;

use crate::complex::{Graph, SimplicialComplex};
use crate::temporal::TimeWindow;
use crate::NodeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("threshold must be finite, got {0}")]
    NonFiniteThreshold(f64),
    #[error("signal level from {from} to {to} must be finite, got {level}")]
    NonFiniteLevel { from: NodeId, to: NodeId, level: f64 },
    #[error("node {0} is not declared")]
    UnknownNode(NodeId),
    #[error("node {0} is declared twice")]
    DuplicateNode(NodeId),
    #[error("radius of node {node} must be positive and finite, got {radius}")]
    InvalidRadius { node: NodeId, radius: f64 },
}

/// Signal level of one transmitter at one receiver: an optional level valid
/// at every time, overridden by per-time levels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SignalLevel {
    pub constant: Option<f64>,
    pub timed: BTreeMap<i64, f64>,
}

impl SignalLevel {
    pub fn at(&self, t: Option<i64>) -> Option<f64> {
        match t {
            Some(t) => self.timed.get(&t).copied().or(self.constant),
            None => self.constant,
        }
    }
}

/// Disk coverage model: a node at `(x, y)` reaching everything within `radius`
/// (meters).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

/// Nodes, the partial signal table `s_i(n_j, t)` and the global threshold.
///
/// A missing entry means the receiver lies outside the transmitter's coverage.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkDescription {
    nodes: BTreeSet<NodeId>,
    signals: BTreeMap<(NodeId, NodeId), SignalLevel>,
    threshold: f64,
    geometry: Option<BTreeMap<NodeId, Disk>>,
    window: Option<TimeWindow>,
}

impl NetworkDescription {
    pub fn new(nodes: impl IntoIterator<Item = NodeId>, threshold: f64) -> Result<Self, NetError> {
        if !threshold.is_finite() {
            return Err(NetError::NonFiniteThreshold(threshold));
        }
        let mut set = BTreeSet::new();
        for n in nodes {
            if !set.insert(n) {
                return Err(NetError::DuplicateNode(n));
            }
        }
        Ok(Self {
            nodes: set,
            signals: BTreeMap::new(),
            threshold,
            geometry: None,
            window: None,
        })
    }

    fn check_pair(&self, from: NodeId, to: NodeId, level: f64) -> Result<(), NetError> {
        for n in [from, to] {
            if !self.nodes.contains(&n) {
                return Err(NetError::UnknownNode(n));
            }
        }
        if !level.is_finite() {
            return Err(NetError::NonFiniteLevel { from, to, level });
        }
        Ok(())
    }

    /// Sets `s_from(n_to)` for all times.
    pub fn set_signal(&mut self, from: NodeId, to: NodeId, level: f64) -> Result<(), NetError> {
        self.check_pair(from, to, level)?;
        self.signals.entry((from, to)).or_default().constant = Some(level);
        Ok(())
    }

    /// Sets `s_from(n_to, t)`.
    pub fn set_timed_signal(&mut self, from: NodeId, to: NodeId, t: i64, level: f64) -> Result<(), NetError> {
        self.check_pair(from, to, level)?;
        self.signals.entry((from, to)).or_default().timed.insert(t, level);
        Ok(())
    }

    pub fn with_signal(mut self, from: NodeId, to: NodeId, level: f64) -> Result<Self, NetError> {
        self.set_signal(from, to, level)?;
        Ok(self)
    }

    /// Sets both directions to the same constant level.
    pub fn with_symmetric_signal(self, a: NodeId, b: NodeId, level: f64) -> Result<Self, NetError> {
        self.with_signal(a, b, level)?.with_signal(b, a, level)
    }

    pub fn with_window(mut self, window: TimeWindow) -> Self {
        self.window = Some(window);
        self
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn set_threshold(&mut self, threshold: f64) -> Result<(), NetError> {
        if !threshold.is_finite() {
            return Err(NetError::NonFiniteThreshold(threshold));
        }
        self.threshold = threshold;
        Ok(())
    }

    pub fn geometry(&self) -> Option<&BTreeMap<NodeId, Disk>> {
        self.geometry.as_ref()
    }

    pub fn window(&self) -> Option<TimeWindow> {
        self.window
    }

    pub fn signals(&self) -> &BTreeMap<(NodeId, NodeId), SignalLevel> {
        &self.signals
    }

    /// `s_from(n_to, t)`, or `None` outside coverage.
    pub fn level(&self, from: NodeId, to: NodeId, t: Option<i64>) -> Option<f64> {
        self.signals.get(&(from, to)).and_then(|s| s.at(t))
    }

    /// Both directions strictly above threshold.
    pub fn linked(&self, a: NodeId, b: NodeId, t: Option<i64>) -> bool {
        let above = |x: Option<f64>| x.is_some_and(|v| v > self.threshold);
        a != b && above(self.level(a, b, t)) && above(self.level(b, a, t))
    }

    /// The link graph at time `t` (or from the time-independent levels).
    pub fn link_graph(&self, t: Option<i64>) -> Graph<NodeId> {
        let mut graph = Graph::new(self.nodes.iter().copied(), []).expect("no edges yet");
        for &a in &self.nodes {
            for &b in self.nodes.range(a + 1..) {
                if self.linked(a, b, t) {
                    graph.add_edge(a, b).expect("declared, distinct nodes");
                }
            }
        }
        graph
    }

    /// Clique complex of the link graph.
    pub fn link_complex(&self, t: Option<i64>) -> SimplicialComplex<NodeId> {
        SimplicialComplex::clique_complex(&self.link_graph(t))
    }
}

/// Signal table from the disk coverage model: `s_i(n_j) = T + 1` when `n_j`
/// lies within radius of `n_i`, absent otherwise, with `T = 0`. Levels are
/// time-independent; `window` records the time range of interest.
pub fn disk_signals(
    disks: &BTreeMap<NodeId, Disk>,
    window: Option<TimeWindow>,
) -> Result<NetworkDescription, NetError> {
    const THRESHOLD: f64 = 0.0;
    for (&node, disk) in disks {
        if !(disk.radius.is_finite() && disk.radius > 0.0) {
            return Err(NetError::InvalidRadius {
                node,
                radius: disk.radius,
            });
        }
    }
    let mut net = NetworkDescription::new(disks.keys().copied(), THRESHOLD)?;
    for (&i, di) in disks {
        for (&j, dj) in disks {
            if i != j && (di.x - dj.x).hypot(di.y - dj.y) <= di.radius {
                net.set_signal(i, j, THRESHOLD + 1.0)?;
            }
        }
    }
    net.geometry = Some(disks.clone());
    net.window = window;
    Ok(net)
}

/// `n` nodes (ids `0..n`) placed uniformly in a `side`×`side` square with
/// radii drawn uniformly from `radius`.
pub fn random_disk_network<R: Rng + ?Sized>(
    rng: &mut R,
    n: u32,
    side: f64,
    radius: std::ops::RangeInclusive<f64>,
) -> Result<NetworkDescription, NetError> {
    let disks = (0..n)
        .map(|id| {
            let disk = Disk {
                x: rng.random_range(0.0..=side),
                y: rng.random_range(0.0..=side),
                radius: rng.random_range(radius.clone()),
            };
            (id, disk)
        })
        .collect();
    disk_signals(&disks, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_net() -> NetworkDescription {
        NetworkDescription::new([1, 2, 3], 0.5)
            .unwrap()
            .with_symmetric_signal(1, 2, 1.0)
            .unwrap()
            .with_symmetric_signal(2, 3, 1.0)
            .unwrap()
    }

    #[test]
    fn path_network_gives_path_graph() {
        let g = path_net().link_graph(None);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 2), (2, 3)]);
        assert_eq!(path_net().link_complex(None).len(), 5);
    }

    #[test]
    fn weak_signals_give_no_edges() {
        let net = NetworkDescription::new([1, 2], 0.5)
            .unwrap()
            .with_symmetric_signal(1, 2, 0.5)
            .unwrap();
        assert_eq!(net.link_graph(None).edges().count(), 0);
    }

    #[test]
    fn one_way_signal_is_not_a_link() {
        let net = NetworkDescription::new([1, 2], 0.5)
            .unwrap()
            .with_signal(1, 2, 2.0)
            .unwrap()
            .with_signal(2, 1, 0.4)
            .unwrap();
        assert_eq!(net.link_graph(None).edges().count(), 0);
    }

    #[test]
    fn three_mutual_links_fill_a_triangle() {
        let net = NetworkDescription::new([1, 2, 3], 0.0)
            .unwrap()
            .with_symmetric_signal(1, 2, 1.0)
            .unwrap()
            .with_symmetric_signal(1, 3, 1.0)
            .unwrap()
            .with_symmetric_signal(2, 3, 1.0)
            .unwrap();
        assert_eq!(net.link_complex(None).dim(), Some(2));
    }

    #[test]
    fn timed_levels_override_constant_ones() {
        let mut net = path_net();
        net.set_timed_signal(1, 2, 4, 0.1).unwrap();
        assert!(net.linked(1, 2, Some(3)));
        assert!(!net.linked(1, 2, Some(4)));
        assert!(net.linked(1, 2, None));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(matches!(
            NetworkDescription::new([1], f64::NAN),
            Err(NetError::NonFiniteThreshold(_))
        ));
        assert!(matches!(
            NetworkDescription::new([1, 1], 0.0),
            Err(NetError::DuplicateNode(1))
        ));
        assert!(matches!(
            NetworkDescription::new([1], 0.0).unwrap().with_signal(1, 9, 1.0),
            Err(NetError::UnknownNode(9))
        ));
    }

    fn disks(spec: &[(NodeId, f64, f64)]) -> BTreeMap<NodeId, Disk> {
        spec.iter()
            .map(|&(n, x, r)| (n, Disk { x, y: 0.0, radius: r }))
            .collect()
    }

    #[test]
    fn disk_model_examples() {
        let collinear = disk_signals(&disks(&[(0, 0.0, 1.0), (1, 1.0, 1.0), (2, 2.0, 1.0)]), None).unwrap();
        assert_eq!(
            collinear.link_graph(None).edges().collect::<Vec<_>>(),
            vec![(0, 1), (1, 2)]
        );

        let stacked = disk_signals(&disks(&[(0, 0.0, 1.0), (1, 0.0, 1.0), (2, 0.0, 1.0)]), None).unwrap();
        assert_eq!(stacked.link_graph(None).edges().count(), 3);

        let sparse = disk_signals(&disks(&[(0, 0.0, 0.5), (1, 1.0, 0.5)]), None).unwrap();
        assert_eq!(sparse.link_graph(None).edges().count(), 0);

        assert!(matches!(
            disk_signals(&disks(&[(0, 0.0, 0.0)]), None),
            Err(NetError::InvalidRadius { .. })
        ));
    }

    #[test]
    fn disk_levels_apply_at_every_time() {
        let net = disk_signals(&disks(&[(0, 0.0, 1.0), (1, 1.0, 1.0)]), None).unwrap();
        assert!(net.linked(0, 1, Some(-7)));
        assert!(net.linked(0, 1, Some(12)));
    }
}
