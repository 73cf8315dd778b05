//! The activation sheaf of a link complex.
//!
//! The stalk over a cell lists the nodes sharing a coface with it, plus the
//! idle value `⊥`. Restrictions keep a node if it is still in the target
//! stalk and send it to `⊥` otherwise. Global sections are exactly the sets
//! of nodes that can transmit together without interfering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{Cell, CellId, ComplexError, SimplicialComplex};
use crate::sheaf::{CellSheaf, FiniteStalks};
use crate::NodeId;

/// A stalk value of the activation sheaf: idle (`⊥`) or a transmitting node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Activity {
    #[default]
    Idle,
    Node(NodeId),
}

impl Activity {
    pub fn node(self) -> Option<NodeId> {
        match self {
            Activity::Idle => None,
            Activity::Node(n) => Some(n),
        }
    }

    pub fn is_idle(self) -> bool {
        self == Activity::Idle
    }
}

impl From<Option<NodeId>> for Activity {
    fn from(n: Option<NodeId>) -> Self {
        n.map_or(Activity::Idle, Activity::Node)
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activity::Idle => f.write_str("⊥"),
            Activity::Node(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActivationError {
    #[error("section is not defined on every cell")]
    PartialSection,
    #[error("section has {found} values for {expected} cells")]
    WrongLength { expected: usize, found: usize },
    #[error("value {value} is not in the stalk over cell {cell}")]
    InvalidValue { cell: String, value: Activity },
    #[error("not a global section: restriction from {face} to {coface} disagrees")]
    NotASection { face: String, coface: String },
    #[error("node {0} has an empty active region")]
    EmptyActiveRegion(NodeId),
    #[error("{0} is not a facet")]
    NotAFacet(String),
    #[error("node {0} is not a vertex of the complex")]
    UnknownNode(NodeId),
    #[error("nodes {first} and {second} interfere at cell {cell}")]
    Interference {
        cell: String,
        first: NodeId,
        second: NodeId,
    },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A partial or total assignment of activation values, indexed by cell id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Section {
    values: Vec<Option<Activity>>,
}

impl Section {
    /// Unassigned on all `len` cells.
    pub fn partial(len: usize) -> Self {
        Self {
            values: vec![None; len],
        }
    }

    pub fn total(values: Vec<Activity>) -> Self {
        Self {
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn idle(len: usize) -> Self {
        Self::total(vec![Activity::Idle; len])
    }

    pub fn set(&mut self, cell: CellId, value: Activity) {
        self.values[cell] = Some(value);
    }

    pub fn get(&self, cell: CellId) -> Option<Activity> {
        self.values[cell]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn raw(&self) -> &[Option<Activity>] {
        &self.values
    }

    /// Cells where the assignment is defined.
    pub fn domain(&self) -> BTreeSet<CellId> {
        (0..self.values.len()).filter(|&c| self.values[c].is_some()).collect()
    }

    /// Cells carrying a non-idle value.
    pub fn support(&self) -> BTreeSet<CellId> {
        (0..self.values.len())
            .filter(|&c| matches!(self.values[c], Some(Activity::Node(_))))
            .collect()
    }

    pub fn values(&self) -> Option<Vec<Activity>> {
        self.values.iter().copied().collect()
    }
}

/// The activation sheaf over a complex whose vertices are nodes.
#[derive(Clone, Debug)]
pub struct ActivationSheaf {
    base: Arc<SimplicialComplex<NodeId>>,
    stalks: Vec<BTreeSet<NodeId>>,
}

impl ActivationSheaf {
    pub fn new(base: Arc<SimplicialComplex<NodeId>>) -> Self {
        let stalks = (0..base.len())
            .map(|c| {
                base.star_of(c)
                    .into_iter()
                    .flat_map(|d| base.cell(d).vertices().to_vec())
                    .collect()
            })
            .collect();
        Self { base, stalks }
    }

    pub fn base_arc(&self) -> &Arc<SimplicialComplex<NodeId>> {
        &self.base
    }

    /// Nodes in the stalk over `cell`, without `⊥`.
    pub fn stalk(&self, cell: CellId) -> &BTreeSet<NodeId> {
        &self.stalks[cell]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.base.vertices()
    }

    /// Restriction along any face relation `face ⊆ coface` (reflexive).
    pub fn restrict_value(&self, coface: CellId, value: Activity) -> Activity {
        match value {
            Activity::Node(n) if self.stalks[coface].contains(&n) => value,
            _ => Activity::Idle,
        }
    }

    fn describe(&self, cell: CellId) -> String {
        format!("{:?}", self.base.cell(cell))
    }

    fn node_cell(&self, n: NodeId) -> Result<CellId, ActivationError> {
        self.base.vertex_id(n).ok_or(ActivationError::UnknownNode(n))
    }

    /// The closure of the star of a node's vertex: where its transmission is
    /// decodable or blocks the channel.
    pub fn reach(&self, n: NodeId) -> Result<BTreeSet<CellId>, ActivationError> {
        let v = self.node_cell(n)?;
        Ok(self.base.closure_ids(&self.base.star_of(v)))
    }

    /// Whether `s` satisfies every restriction `c ⊆ d` (any codimension).
    pub fn is_global_section(&self, s: &Section) -> Result<bool, ActivationError> {
        match self.check_global_section(s) {
            Ok(()) => Ok(true),
            Err(ActivationError::NotASection { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Like [`Self::is_global_section`], naming the first failing incidence.
    pub fn check_global_section(&self, s: &Section) -> Result<(), ActivationError> {
        if s.len() != self.base.len() {
            return Err(ActivationError::WrongLength {
                expected: self.base.len(),
                found: s.len(),
            });
        }
        let values = s.values().ok_or(ActivationError::PartialSection)?;
        for (cell, &value) in values.iter().enumerate() {
            if !self.in_stalk(cell, &value) {
                return Err(ActivationError::InvalidValue {
                    cell: self.describe(cell),
                    value,
                });
            }
        }
        for d in 0..self.base.len() {
            for c in self.base.closure_of(d) {
                if self.restrict_value(d, values[c]) != values[d] {
                    return Err(ActivationError::NotASection {
                        face: self.describe(c),
                        coface: self.describe(d),
                    });
                }
            }
        }
        Ok(())
    }

    /// The assignment that puts each listed transmitter on the closure of its
    /// star and `⊥` elsewhere. Fails when two transmitters claim a cell.
    pub fn section_from_transmitters(&self, transmitters: &BTreeSet<NodeId>) -> Result<Section, ActivationError> {
        let mut claims: BTreeMap<CellId, NodeId> = BTreeMap::new();
        for &n in transmitters {
            for c in self.reach(n)? {
                if let Some(first) = claims.insert(c, n) {
                    return Err(ActivationError::Interference {
                        cell: self.describe(c),
                        first,
                        second: n,
                    });
                }
            }
        }
        let mut values = vec![Activity::Idle; self.base.len()];
        for (c, n) in claims {
            values[c] = Activity::Node(n);
        }
        let section = Section::total(values);
        self.check_global_section(&section)?;
        Ok(section)
    }

    /// The nodes `n` with `s([n]) = n`.
    pub fn transmitters(&self, s: &Section) -> BTreeSet<NodeId> {
        self.nodes()
            .filter(|&n| {
                let v = self.base.vertex_id(n).expect("vertex");
                s.get(v) == Some(Activity::Node(n))
            })
            .collect()
    }

    /// All global sections, ordered lexicographically by transmitter set.
    ///
    /// Two transmitters are compatible exactly when their reaches are
    /// disjoint, so the sections are the independent sets of that conflict
    /// graph; each candidate is still validated before it is returned.
    pub fn enumerate_global_sections(&self) -> Vec<Section> {
        let nodes: Vec<NodeId> = self.nodes().collect();
        let reach: Vec<BTreeSet<CellId>> = nodes.iter().map(|&n| self.reach(n).expect("vertex of base")).collect();
        let conflict: Vec<Vec<bool>> = (0..nodes.len())
            .map(|i| {
                (0..nodes.len())
                    .map(|j| i != j && !reach[i].is_disjoint(&reach[j]))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        self.independent_sets(&nodes, &conflict, 0, &mut chosen, &mut out);
        out
    }

    fn independent_sets(
        &self,
        nodes: &[NodeId],
        conflict: &[Vec<bool>],
        from: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Section>,
    ) {
        let set: BTreeSet<NodeId> = chosen.iter().map(|&i| nodes[i]).collect();
        if let Ok(section) = self.section_from_transmitters(&set) {
            out.push(section);
        }
        for next in from..nodes.len() {
            if chosen.iter().all(|&i| !conflict[i][next]) {
                chosen.push(next);
                self.independent_sets(nodes, conflict, next + 1, chosen, out);
                chosen.pop();
            }
        }
    }

    /// `{a : s(a) = n}`.
    pub fn active_region(&self, s: &Section, n: NodeId) -> Result<BTreeSet<CellId>, ActivationError> {
        self.check_global_section(s)?;
        Ok((0..self.base.len())
            .filter(|&c| s.get(c) == Some(Activity::Node(n)))
            .collect())
    }

    /// The star over the active region of `n`.
    pub fn region_of_influence(&self, s: &Section, n: NodeId) -> Result<BTreeSet<CellId>, ActivationError> {
        let active = self.active_region(s, n)?;
        if active.is_empty() {
            return Err(ActivationError::EmptyActiveRegion(n));
        }
        Ok(self.base.star_ids(&active))
    }
}

/// The star over the closure of a facet.
pub fn region_of_influence_facet<V: crate::complex::Vertex>(
    x: &SimplicialComplex<V>,
    facet: &Cell<V>,
) -> Result<BTreeSet<CellId>, ActivationError> {
    let id = x
        .id(facet)
        .ok_or_else(|| ComplexError::UnknownCell(format!("{facet:?}")))?;
    if !x.cofaces(id).is_empty() {
        return Err(ActivationError::NotAFacet(format!("{facet:?}")));
    }
    Ok(x.star_ids(&x.closure_of(id)))
}

impl CellSheaf for ActivationSheaf {
    type Vertex = NodeId;
    type Value = Activity;

    fn base(&self) -> &SimplicialComplex<NodeId> {
        &self.base
    }

    fn in_stalk(&self, cell: CellId, value: &Activity) -> bool {
        match value {
            Activity::Idle => true,
            Activity::Node(n) => self.stalks[cell].contains(n),
        }
    }

    fn restrict(&self, _face: CellId, coface: CellId, value: &Activity) -> Option<Activity> {
        Some(self.restrict_value(coface, *value))
    }
}

impl FiniteStalks for ActivationSheaf {
    fn stalk_elements(&self, cell: CellId) -> Vec<Activity> {
        std::iter::once(Activity::Idle)
            .chain(self.stalks[cell].iter().map(|&n| Activity::Node(n)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sheaf::{blocked_cells, extend_section};

    fn path() -> ActivationSheaf {
        ActivationSheaf::new(Arc::new(
            SimplicialComplex::from_maximal_cells([vec![1, 2], vec![2, 3]]).unwrap(),
        ))
    }

    fn id(a: &ActivationSheaf, vs: &[NodeId]) -> CellId {
        a.base().id(&Cell::new(vs.to_vec()).unwrap()).unwrap()
    }

    fn ids(a: &ActivationSheaf, cells: &[&[NodeId]]) -> BTreeSet<CellId> {
        cells.iter().map(|c| id(a, c)).collect()
    }

    #[test]
    fn stalks_list_nodes_sharing_a_coface() {
        let a = path();
        assert_eq!(a.stalk(id(&a, &[2])), &BTreeSet::from([1, 2, 3]));
        assert_eq!(a.stalk(id(&a, &[1, 2])), &BTreeSet::from([1, 2]));
        assert_eq!(a.stalk(id(&a, &[1])), &BTreeSet::from([1, 2]));
        let lone = ActivationSheaf::new(Arc::new(SimplicialComplex::from_maximal_cells([vec![1]]).unwrap()));
        assert_eq!(lone.stalk(0), &BTreeSet::from([1]));
    }

    fn assign(a: &ActivationSheaf, pairs: &[(&[NodeId], Activity)]) -> Section {
        let mut s = Section::partial(a.base().len());
        for (cell, v) in pairs {
            s.set(id(a, cell), *v);
        }
        s
    }

    #[test]
    fn node_one_transmitting_is_a_global_section() {
        let a = path();
        let n = Activity::Node;
        let s = assign(
            &a,
            &[
                (&[1], n(1)),
                (&[2], n(1)),
                (&[3], Activity::Idle),
                (&[1, 2], n(1)),
                (&[2, 3], Activity::Idle),
            ],
        );
        assert!(a.is_global_section(&s).unwrap());
        assert!(a.is_global_section(&Section::idle(5)).unwrap());
    }

    #[test]
    fn nodes_one_and_three_interfere_at_node_two() {
        let a = path();
        let n = Activity::Node;
        for middle in a.stalk_elements(id(&a, &[2])) {
            for e12 in a.stalk_elements(id(&a, &[1, 2])) {
                for e23 in a.stalk_elements(id(&a, &[2, 3])) {
                    let s = assign(
                        &a,
                        &[
                            (&[1], n(1)),
                            (&[2], middle),
                            (&[3], n(3)),
                            (&[1, 2], e12),
                            (&[2, 3], e23),
                        ],
                    );
                    assert!(!a.is_global_section(&s).unwrap());
                }
            }
        }
        let partial = assign(&a, &[(&[1], n(1)), (&[3], n(3)), (&[1, 2], n(1)), (&[2, 3], n(3))]);
        assert_eq!(blocked_cells(&a, partial.raw()), vec![id(&a, &[2])]);
        assert!(extend_section(&a, partial.raw()).is_none());

        let err = a.section_from_transmitters(&BTreeSet::from([1, 3])).unwrap_err();
        assert_eq!(
            err,
            ActivationError::Interference {
                cell: "[2]".into(),
                first: 1,
                second: 3
            }
        );
    }

    #[test]
    fn out_of_stalk_value_is_an_error() {
        let a = path();
        let mut s = Section::idle(5);
        s.set(id(&a, &[1, 2]), Activity::Node(3));
        assert!(matches!(
            a.is_global_section(&s),
            Err(ActivationError::InvalidValue { .. })
        ));
        assert_eq!(
            a.is_global_section(&Section::partial(5)),
            Err(ActivationError::PartialSection)
        );
    }

    fn transmitter_sets(a: &ActivationSheaf) -> Vec<Vec<NodeId>> {
        a.enumerate_global_sections()
            .iter()
            .map(|s| a.transmitters(s).into_iter().collect())
            .collect()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(transmitter_sets(&path()), vec![vec![], vec![1], vec![2], vec![3]]);
        let lone = ActivationSheaf::new(Arc::new(SimplicialComplex::from_maximal_cells([vec![1]]).unwrap()));
        assert_eq!(lone.enumerate_global_sections().len(), 2);
        let pair = ActivationSheaf::new(Arc::new(
            SimplicialComplex::from_maximal_cells([vec![1], vec![2]]).unwrap(),
        ));
        assert_eq!(transmitter_sets(&pair), vec![vec![], vec![1], vec![1, 2], vec![2]]);
    }

    #[test]
    fn active_regions_and_influence() {
        let a = path();
        let one = a.section_from_transmitters(&BTreeSet::from([1])).unwrap();
        assert_eq!(a.active_region(&one, 1).unwrap(), ids(&a, &[&[1], &[2], &[1, 2]]));
        assert_eq!(a.active_region(&one, 3).unwrap(), BTreeSet::new());
        assert_eq!(
            a.region_of_influence(&one, 1).unwrap(),
            ids(&a, &[&[1], &[2], &[1, 2], &[2, 3]])
        );
        assert_eq!(one.support().len(), 3);
        assert!(matches!(
            a.region_of_influence(&one, 3),
            Err(ActivationError::EmptyActiveRegion(3))
        ));

        let two = a.section_from_transmitters(&BTreeSet::from([2])).unwrap();
        assert_eq!(a.active_region(&two, 2).unwrap().len(), 5);
        assert_eq!(a.region_of_influence(&two, 2).unwrap().len(), 5);
        assert!(Section::idle(5).support().is_empty());

        let mut bad = Section::idle(5);
        bad.set(id(&a, &[1]), Activity::Node(1));
        assert!(matches!(
            a.active_region(&bad, 1),
            Err(ActivationError::NotASection { .. })
        ));
    }

    #[test]
    fn facet_regions_of_influence() {
        let a = path();
        let x = a.base();
        let f12 = Cell::new(vec![1, 2]).unwrap();
        assert_eq!(
            region_of_influence_facet(x, &f12).unwrap(),
            ids(&a, &[&[1], &[2], &[1, 2], &[2, 3]])
        );
        let f23 = Cell::new(vec![2, 3]).unwrap();
        assert_eq!(
            region_of_influence_facet(x, &f23).unwrap(),
            ids(&a, &[&[2], &[3], &[1, 2], &[2, 3]])
        );
        assert!(matches!(
            region_of_influence_facet(x, &Cell::vertex(2)),
            Err(ActivationError::NotAFacet(_))
        ));
        let lone = SimplicialComplex::from_maximal_cells([vec![1u32], vec![2]]).unwrap();
        assert_eq!(region_of_influence_facet(&lone, &Cell::vertex(1)).unwrap().len(), 1);
    }

    #[test]
    fn isolated_transmitters_support_is_union_of_stars() {
        let x = SimplicialComplex::from_maximal_cells([vec![1u32, 2], vec![3, 4]]).unwrap();
        let a = ActivationSheaf::new(Arc::new(x));
        let s = a.section_from_transmitters(&BTreeSet::from([1, 3])).unwrap();
        let expected: BTreeSet<CellId> = a.reach(1).unwrap().union(&a.reach(3).unwrap()).copied().collect();
        assert_eq!(s.support(), expected);
    }
}
