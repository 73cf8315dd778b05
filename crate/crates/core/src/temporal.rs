//! Time-dependent link complexes over a finite window and grouping sheaves.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{Cell, CellId, Graph, SimplicialComplex};
use crate::linalg::SparseMatrix;
use crate::netmodel::NetworkDescription;
use crate::sheaf::{CellSheaf, FiniteStalks};
use crate::sheaflin::VectorSheaf;
use crate::NodeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TemporalError {
    #[error("time window [{start}, {end}] is empty")]
    EmptyWindow { start: i64, end: i64 },
    #[error("time {0} lies outside the window")]
    OutOfWindow(i64),
    #[error("grouping depth must be at least 1")]
    ZeroDepth,
    #[error("sequence has length {found}, expected {expected}")]
    SequenceLength { expected: usize, found: usize },
}

/// Inclusive, nonempty integer time interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TimeWindow {
    start: i64,
    end: i64,
}

impl TimeWindow {
    pub fn new(start: i64, end: i64) -> Result<Self, TemporalError> {
        if start > end {
            return Err(TemporalError::EmptyWindow { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: i64) -> bool {
        (self.start..=self.end).contains(&t)
    }

    pub fn times(&self) -> std::ops::RangeInclusive<i64> {
        self.start..=self.end
    }

    fn check(&self, t: i64) -> Result<(), TemporalError> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(TemporalError::OutOfWindow(t))
        }
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// A vertex `(n, t)` of a time-dependent complex. Orders by time, then node,
/// so each timeslice occupies a contiguous run of vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimedNode {
    pub time: i64,
    pub node: NodeId,
}

impl TimedNode {
    pub fn new(node: NodeId, time: i64) -> Self {
        Self { time, node }
    }
}

impl fmt::Display for TimedNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.node, self.time)
    }
}

/// Per-timeslice link complexes glued by temporal edges
/// `{(n,t),(n,t+1)}` along each node's thread.
#[derive(Clone, Debug)]
pub struct TimeComplex {
    window: TimeWindow,
    nodes: BTreeSet<NodeId>,
    complex: Arc<SimplicialComplex<TimedNode>>,
    slices: BTreeMap<i64, Arc<SimplicialComplex<NodeId>>>,
}

impl TimeComplex {
    /// Clique complex of the time-dependent link graph of `net` on `window`.
    pub fn time_dependent_link_complex(net: &NetworkDescription, window: TimeWindow) -> Self {
        let graphs = window.times().map(|t| (t, net.link_graph(Some(t)))).collect();
        Self::from_link_graphs(window, graphs)
    }

    /// The same link graph repeated over every time of the window.
    pub fn repeated(graph: &Graph<NodeId>, window: TimeWindow) -> Self {
        Self::from_link_graphs(window, window.times().map(|t| (t, graph.clone())).collect())
    }

    /// Builds from one link graph per time; all graphs must share the node set.
    pub fn from_link_graphs(window: TimeWindow, graphs: BTreeMap<i64, Graph<NodeId>>) -> Self {
        assert!(window.times().all(|t| graphs.contains_key(&t)), "one graph per time");
        let nodes: BTreeSet<NodeId> = graphs[&window.start].vertices().collect();
        let vertices = window
            .times()
            .flat_map(|t| nodes.iter().map(move |&n| TimedNode::new(n, t)));
        let mut graph = Graph::new(vertices, []).expect("distinct vertices");
        for (&t, g) in graphs.range(window.start..=window.end) {
            assert_eq!(
                g.vertices().collect::<BTreeSet<_>>(),
                nodes,
                "node set changes at t={t}"
            );
            for (a, b) in g.edges() {
                graph
                    .add_edge(TimedNode::new(a, t), TimedNode::new(b, t))
                    .expect("declared");
            }
            if t < window.end {
                for &n in &nodes {
                    graph
                        .add_edge(TimedNode::new(n, t), TimedNode::new(n, t + 1))
                        .expect("declared");
                }
            }
        }
        let complex = Arc::new(SimplicialComplex::clique_complex(&graph));
        let slices = window
            .times()
            .map(|t| {
                let slice = complex.induced(|v| v.time == t).map_vertices(|v| v.node);
                (t, Arc::new(slice))
            })
            .collect();
        Self {
            window,
            nodes,
            complex,
            slices,
        }
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn complex(&self) -> &SimplicialComplex<TimedNode> {
        &self.complex
    }

    pub fn complex_arc(&self) -> &Arc<SimplicialComplex<TimedNode>> {
        &self.complex
    }

    /// The time-`t` slice relabeled to node ids.
    pub fn timeslice(&self, t: i64) -> Result<&Arc<SimplicialComplex<NodeId>>, TemporalError> {
        self.window.check(t)?;
        Ok(&self.slices[&t])
    }

    pub fn vertex(&self, node: NodeId, t: i64) -> Option<CellId> {
        self.complex.vertex_id(TimedNode::new(node, t))
    }

    /// The edge `{(n,t),(n,t+1)}`.
    pub fn temporal_edge(&self, node: NodeId, t: i64) -> Option<CellId> {
        let cell = Cell::new(vec![TimedNode::new(node, t), TimedNode::new(node, t + 1)]).ok()?;
        self.complex.id(&cell)
    }

    pub fn is_temporal(&self, cell: CellId) -> bool {
        let vs = self.complex.cell(cell).vertices();
        vs.len() == 2 && vs[0].time != vs[1].time
    }

    /// The time of a within-slice cell; `None` for temporal edges.
    pub fn slice_time(&self, cell: CellId) -> Option<i64> {
        let vs = self.complex.cell(cell).vertices();
        (vs[0].time == vs[vs.len() - 1].time).then_some(vs[0].time)
    }

    /// Id of a within-slice cell inside its timeslice.
    pub fn slice_cell(&self, cell: CellId) -> Option<(i64, CellId)> {
        let t = self.slice_time(cell)?;
        let vs = self.complex.cell(cell).vertices().iter().map(|v| v.node).collect();
        let id = self.slices[&t].id(&Cell::new(vs).expect("distinct nodes"))?;
        Some((t, id))
    }

    /// Id in the full complex of cell `id` of the time-`t` slice.
    pub fn lift(&self, t: i64, id: CellId) -> Option<CellId> {
        let slice = self.slices.get(&t)?;
        let vs = slice
            .cell(id)
            .vertices()
            .iter()
            .map(|&n| TimedNode::new(n, t))
            .collect();
        self.complex.id(&Cell::new(vs).expect("distinct vertices"))
    }

    pub fn temporal_edge_ids(&self) -> impl Iterator<Item = CellId> + '_ {
        self.complex.ids_of_dim(1).filter(|&c| self.is_temporal(c))
    }
}

/// Path complex on the integers of a window: vertices `t`, edges `(t, t+1)`.
pub fn path_complex(window: TimeWindow) -> SimplicialComplex<i64> {
    if window.len() == 1 {
        return SimplicialComplex::from_maximal_cells([vec![window.start]]).expect("single vertex");
    }
    SimplicialComplex::from_maximal_cells(window.times().take(window.len() - 1).map(|t| vec![t, t + 1]))
        .expect("edges of distinct integers")
}

/// `σ₋`: drops the first component.
pub fn sigma_minus<T: Clone>(x: &[T]) -> Vec<T> {
    x[1..].to_vec()
}

/// `σ₊`: drops the last component.
pub fn sigma_plus<T: Clone>(x: &[T]) -> Vec<T> {
    x[..x.len() - 1].to_vec()
}

/// The `n`-term grouping sheaf over a window with a finite alphabet: stalks
/// `Aⁿ` on vertices and `Aⁿ⁻¹` on edges; vertex `t` restricts to the edge
/// `(t,t+1)` by `σ₊` and vertex `t+1` by `σ₋`.
///
/// Data enters at the first component and leaves at the last.
#[derive(Clone, Debug)]
pub struct GroupingSheaf<T> {
    depth: usize,
    alphabet: Vec<T>,
    window: TimeWindow,
    base: SimplicialComplex<i64>,
}

impl<T: Clone + PartialEq + fmt::Debug> GroupingSheaf<T> {
    pub fn new(depth: usize, alphabet: Vec<T>, window: TimeWindow) -> Result<Self, TemporalError> {
        if depth == 0 {
            return Err(TemporalError::ZeroDepth);
        }
        Ok(Self {
            depth,
            alphabet,
            window,
            base: path_complex(window),
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn alphabet(&self) -> &[T] {
        &self.alphabet
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    fn stalk_len(&self, cell: CellId) -> usize {
        self.depth + 1 - self.base.cell(cell).vertices().len()
    }

    /// The section determined by a sequence `y` of length `m+n−1`, oldest
    /// element first: `v_t[i] = y[t − t₀ + n − 1 − i]`.
    pub fn section_from_sequence(&self, y: &[T]) -> Result<Vec<Vec<T>>, TemporalError> {
        let expected = self.window.len() + self.depth - 1;
        if y.len() != expected {
            return Err(TemporalError::SequenceLength {
                expected,
                found: y.len(),
            });
        }
        Ok(self
            .base
            .cells()
            .iter()
            .map(|cell| {
                let k = (cell.vertices()[0] - self.window.start) as usize;
                let len = self.depth + 1 - cell.vertices().len();
                let newest = k + self.depth - 1;
                (0..len).map(|i| y[newest - i].clone()).collect()
            })
            .collect())
    }

    /// The sequence a section encodes, oldest first.
    pub fn sequence_of_section(&self, values: &[Vec<T>]) -> Vec<T> {
        let first = self.base.vertex_id(self.window.start).expect("window start");
        let mut y: Vec<T> = values[first].iter().rev().cloned().collect();
        for t in self.window.times().skip(1) {
            let v = self.base.vertex_id(t).expect("window time");
            y.push(values[v][0].clone());
        }
        y
    }

    /// `|A|^(m+n−1)`, or `None` on overflow.
    pub fn section_count(&self) -> Option<u128> {
        let exp = u32::try_from(self.window.len() + self.depth - 1).ok()?;
        (self.alphabet.len() as u128).checked_pow(exp)
    }
}

impl<T: Clone + PartialEq + fmt::Debug> CellSheaf for GroupingSheaf<T> {
    type Vertex = i64;
    type Value = Vec<T>;

    fn base(&self) -> &SimplicialComplex<i64> {
        &self.base
    }

    fn in_stalk(&self, cell: CellId, value: &Vec<T>) -> bool {
        value.len() == self.stalk_len(cell) && value.iter().all(|x| self.alphabet.contains(x))
    }

    fn restrict(&self, face: CellId, coface: CellId, value: &Vec<T>) -> Option<Vec<T>> {
        if value.len() != self.depth {
            return None;
        }
        let t = self.base.cell(face).vertices()[0];
        let edge = self.base.cell(coface).vertices();
        Some(if edge[0] == t {
            sigma_plus(value)
        } else {
            sigma_minus(value)
        })
    }
}

impl<T: Clone + PartialEq + fmt::Debug> FiniteStalks for GroupingSheaf<T> {
    fn stalk_elements(&self, cell: CellId) -> Vec<Vec<T>> {
        words(&self.alphabet, self.stalk_len(cell))
    }
}

/// All words of length `len`, lexicographic in alphabet order.
pub fn words<T: Clone>(alphabet: &[T], len: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |a| {
                    let mut w = w.clone();
                    w.push(a.clone());
                    w
                })
            })
            .collect();
    }
    out
}

/// The grouping sheaf with alphabet `Q^d`: vertex stalks of dimension `n·d`,
/// edge stalks `(n−1)·d`, restrictions the block projections `σ±`.
pub fn grouping_vector_sheaf(depth: usize, d: usize, window: TimeWindow) -> Result<VectorSheaf<i64>, TemporalError> {
    if depth == 0 {
        return Err(TemporalError::ZeroDepth);
    }
    let base = Arc::new(path_complex(window));
    let dims: Vec<usize> = base
        .cells()
        .iter()
        .map(|c| (depth + 1 - c.vertices().len()) * d)
        .collect();
    let restrictions: Vec<_> = base
        .incidences()
        .map(|(v, e)| {
            let skip = if base.cell(e).vertices()[0] == base.cell(v).vertices()[0] {
                0
            } else {
                d
            };
            let pick: Vec<Option<usize>> = (0..(depth - 1) * d).map(|i| Some(i + skip)).collect();
            ((v, e), SparseMatrix::selection(depth * d, &pick))
        })
        .collect();
    Ok(VectorSheaf::new(base, dims, restrictions).expect("projection shapes"))
}
