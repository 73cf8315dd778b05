//! Abstract simplicial complexes: cells, face/coface indices, closure, star,
//! facets, clique complexes and oriented incidence.
//!
//! The face relation is reflexive everywhere in this crate: a cell is a face
//! (and a coface) of itself. "Proper" is spelled out where it matters.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Debug};
use std::hash::Hash;
use std::ops::Range;

use thiserror::Error;

/// Vertex labels: opaque, totally ordered, cheap to copy.
pub trait Vertex: Copy + Ord + Hash + Debug {}

impl<T: Copy + Ord + Hash + Debug> Vertex for T {}

/// Index of a cell inside one [`SimplicialComplex`].
pub type CellId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("invalid cell {0}: a cell needs at least one vertex and no repeats")]
    InvalidCell(String),
    #[error("cell {0} is not in the complex")]
    UnknownCell(String),
    #[error("{face} is not a codimension-1 face of {coface}")]
    InvalidIncidence { face: String, coface: String },
    #[error("edge {0} references an undeclared vertex")]
    UnknownVertex(String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(String),
}

/// A cell: a nonempty, strictly increasing list of vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cell<V> {
    vertices: Vec<V>,
}

impl<V: Vertex> Cell<V> {
    /// Sorts the given vertices. Fails on an empty list or a repeated vertex.
    pub fn new(mut vertices: Vec<V>) -> Result<Self, ComplexError> {
        vertices.sort();
        let repeated = vertices.windows(2).any(|w| w[0] == w[1]);
        if vertices.is_empty() || repeated {
            return Err(ComplexError::InvalidCell(format!("{vertices:?}")));
        }
        Ok(Self { vertices })
    }

    pub fn vertex(v: V) -> Self {
        Self { vertices: vec![v] }
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn contains(&self, v: &V) -> bool {
        self.vertices.binary_search(v).is_ok()
    }

    /// Reflexive face test: every vertex of `self` is a vertex of `other`.
    pub fn is_face_of(&self, other: &Cell<V>) -> bool {
        self.vertices.len() <= other.vertices.len() && self.vertices.iter().all(|v| other.contains(v))
    }

    /// The codimension-1 faces, in order of the removed vertex index.
    pub fn boundary(&self) -> impl Iterator<Item = Cell<V>> + '_ {
        let n = if self.vertices.len() > 1 {
            self.vertices.len()
        } else {
            0
        };
        (0..n).map(move |skip| Cell {
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect(),
        })
    }

    /// Every nonempty subset of the vertex set, the cell itself included.
    pub fn all_faces(&self) -> Vec<Cell<V>> {
        let k = self.vertices.len();
        (1u64..(1u64 << k))
            .map(|mask| Cell {
                vertices: (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.vertices[i])
                    .collect(),
            })
            .collect()
    }

    fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.vertices
            .len()
            .cmp(&other.vertices.len())
            .then_with(|| self.vertices.cmp(&other.vertices))
    }
}

/// Cells order by dimension first, then lexicographically by vertex list.
impl<V: Vertex> Ord for Cell<V> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_cmp(other)
    }
}

impl<V: Vertex> PartialOrd for Cell<V> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<V: Debug> Debug for Cell<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.vertices.iter()).finish()
    }
}

impl<V: fmt::Display> fmt::Display for Cell<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

/// Orientation sign of a codimension-1 incidence: `(-1)^j` where `j` is the
/// position in `coface` (sorted order) of the vertex missing from `face`.
pub fn incidence_sign<V: Vertex>(face: &Cell<V>, coface: &Cell<V>) -> Result<i32, ComplexError> {
    let invalid = || ComplexError::InvalidIncidence {
        face: format!("{face:?}"),
        coface: format!("{coface:?}"),
    };
    if face.vertices.len() + 1 != coface.vertices.len() || !face.is_face_of(coface) {
        return Err(invalid());
    }
    let j = coface
        .vertices
        .iter()
        .position(|v| !face.contains(v))
        .ok_or_else(invalid)?;
    Ok(if j % 2 == 0 { 1 } else { -1 })
}

/// A finite simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph<V> {
    adjacency: BTreeMap<V, BTreeSet<V>>,
}

impl<V: Vertex> Graph<V> {
    pub fn new(
        vertices: impl IntoIterator<Item = V>,
        edges: impl IntoIterator<Item = (V, V)>,
    ) -> Result<Self, ComplexError> {
        let mut graph = Self {
            adjacency: vertices.into_iter().map(|v| (v, BTreeSet::new())).collect(),
        };
        for (u, v) in edges {
            graph.add_edge(u, v)?;
        }
        Ok(graph)
    }

    pub fn add_edge(&mut self, u: V, v: V) -> Result<(), ComplexError> {
        if u == v {
            return Err(ComplexError::SelfLoop(format!("{u:?}")));
        }
        if !self.adjacency.contains_key(&u) || !self.adjacency.contains_key(&v) {
            return Err(ComplexError::UnknownVertex(format!("{{{u:?},{v:?}}}")));
        }
        self.adjacency.get_mut(&u).unwrap().insert(v);
        self.adjacency.get_mut(&v).unwrap().insert(u);
        Ok(())
    }

    pub fn vertices(&self) -> impl Iterator<Item = V> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn neighbors(&self, v: &V) -> impl Iterator<Item = V> + '_ {
        self.adjacency.get(v).into_iter().flatten().copied()
    }

    pub fn has_edge(&self, u: &V, v: &V) -> bool {
        self.adjacency.get(u).is_some_and(|n| n.contains(v))
    }

    /// Each undirected edge once, as `(smaller, larger)`.
    pub fn edges(&self) -> impl Iterator<Item = (V, V)> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(&u, ns)| ns.range(u..).map(move |&v| (u, v)))
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// All cliques (nonempty), each as a sorted vertex list.
    pub fn cliques(&self) -> Vec<Vec<V>> {
        let mut out = Vec::new();
        for v in self.vertices() {
            let candidates: Vec<V> = self.adjacency[&v].range(v..).copied().collect();
            self.extend_clique(&mut vec![v], &candidates, &mut out);
        }
        out
    }

    fn extend_clique(&self, clique: &mut Vec<V>, candidates: &[V], out: &mut Vec<Vec<V>>) {
        out.push(clique.clone());
        for (i, &w) in candidates.iter().enumerate() {
            let next: Vec<V> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|u| self.has_edge(&w, u))
                .collect();
            clique.push(w);
            self.extend_clique(clique, &next, out);
            clique.pop();
        }
    }
}

/// An immutable abstract simplicial complex.
///
/// Cells are stored sorted by dimension and then lexicographically, so a
/// [`CellId`] is stable for a given cell set and cells of one dimension are
/// contiguous.
#[derive(Clone, Debug)]
pub struct SimplicialComplex<V> {
    cells: Vec<Cell<V>>,
    index: HashMap<Cell<V>, CellId>,
    faces: Vec<Vec<CellId>>,
    cofaces: Vec<Vec<CellId>>,
    by_dim: Vec<Range<CellId>>,
}

impl<V: Vertex> SimplicialComplex<V> {
    pub fn empty() -> Self {
        Self::from_closed_set(BTreeSet::new())
    }

    /// The smallest complex containing every listed vertex set.
    pub fn from_maximal_cells<I, C>(maximal: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = V>,
    {
        let mut cells = BTreeSet::new();
        for vs in maximal {
            let cell = Cell::new(vs.into_iter().collect())?;
            cells.extend(cell.all_faces());
        }
        Ok(Self::from_closed_set(cells))
    }

    /// Contains a vertex set exactly when it is a clique of `graph`.
    pub fn clique_complex(graph: &Graph<V>) -> Self {
        let cells = graph.cliques().into_iter().map(|vertices| Cell { vertices }).collect();
        Self::from_closed_set(cells)
    }

    fn from_closed_set(set: BTreeSet<Cell<V>>) -> Self {
        let cells: Vec<Cell<V>> = set.into_iter().collect();
        let index: HashMap<Cell<V>, CellId> = cells.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut faces = vec![Vec::new(); cells.len()];
        let mut cofaces = vec![Vec::new(); cells.len()];
        for (id, cell) in cells.iter().enumerate() {
            for face in cell.boundary() {
                let fid = index[&face];
                faces[id].push(fid);
                cofaces[fid].push(id);
            }
        }
        for list in faces.iter_mut().chain(cofaces.iter_mut()) {
            list.sort_unstable();
        }
        let mut by_dim: Vec<Range<CellId>> = Vec::new();
        for (id, cell) in cells.iter().enumerate() {
            let d = cell.dim();
            if by_dim.len() <= d {
                by_dim.resize(d + 1, id..id);
            }
            by_dim[d].end = id + 1;
        }
        Self {
            cells,
            index,
            faces,
            cofaces,
            by_dim,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell<V>] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> &Cell<V> {
        &self.cells[id]
    }

    pub fn id(&self, cell: &Cell<V>) -> Option<CellId> {
        self.index.get(cell).copied()
    }

    pub fn vertex_id(&self, v: V) -> Option<CellId> {
        self.id(&Cell::vertex(v))
    }

    pub fn contains(&self, cell: &Cell<V>) -> bool {
        self.index.contains_key(cell)
    }

    /// Highest cell dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    /// Ids of the `k`-cells (a contiguous range, empty past the top dimension).
    pub fn ids_of_dim(&self, k: usize) -> Range<CellId> {
        self.by_dim
            .get(k)
            .cloned()
            .unwrap_or(self.cells.len()..self.cells.len())
    }

    pub fn vertices(&self) -> impl Iterator<Item = V> + '_ {
        self.cells[self.ids_of_dim(0)].iter().map(|c| c.vertices[0])
    }

    /// Codimension-1 faces of a cell.
    pub fn faces(&self, id: CellId) -> &[CellId] {
        &self.faces[id]
    }

    /// Codimension-1 cofaces of a cell.
    pub fn cofaces(&self, id: CellId) -> &[CellId] {
        &self.cofaces[id]
    }

    /// All `(face, coface)` pairs of codimension 1, ordered by coface.
    pub fn incidences(&self) -> impl Iterator<Item = (CellId, CellId)> + '_ {
        self.faces
            .iter()
            .enumerate()
            .flat_map(|(d, fs)| fs.iter().map(move |&c| (c, d)))
    }

    pub fn closure_ids(&self, ids: &BTreeSet<CellId>) -> BTreeSet<CellId> {
        self.saturate(ids, &self.faces)
    }

    pub fn star_ids(&self, ids: &BTreeSet<CellId>) -> BTreeSet<CellId> {
        self.saturate(ids, &self.cofaces)
    }

    fn saturate(&self, ids: &BTreeSet<CellId>, step: &[Vec<CellId>]) -> BTreeSet<CellId> {
        let mut out = ids.clone();
        let mut stack: Vec<CellId> = ids.iter().copied().collect();
        while let Some(id) = stack.pop() {
            for &next in &step[id] {
                if out.insert(next) {
                    stack.push(next);
                }
            }
        }
        out
    }

    /// Every cell of which `id` is a face (reflexive).
    pub fn star_of(&self, id: CellId) -> BTreeSet<CellId> {
        self.star_ids(&BTreeSet::from([id]))
    }

    /// Every face of `id` (reflexive).
    pub fn closure_of(&self, id: CellId) -> BTreeSet<CellId> {
        self.closure_ids(&BTreeSet::from([id]))
    }

    pub fn is_closed_ids(&self, ids: &BTreeSet<CellId>) -> bool {
        ids.iter().all(|&id| self.faces[id].iter().all(|f| ids.contains(f)))
    }

    pub fn facet_ids(&self) -> Vec<CellId> {
        (0..self.cells.len())
            .filter(|&id| self.cofaces[id].is_empty())
            .collect()
    }

    pub fn ids_of(&self, cells: &BTreeSet<Cell<V>>) -> Result<BTreeSet<CellId>, ComplexError> {
        cells
            .iter()
            .map(|c| self.id(c).ok_or_else(|| ComplexError::UnknownCell(format!("{c:?}"))))
            .collect()
    }

    pub fn cells_of(&self, ids: &BTreeSet<CellId>) -> BTreeSet<Cell<V>> {
        ids.iter().map(|&id| self.cells[id].clone()).collect()
    }

    /// The smallest subcomplex containing `cells`.
    pub fn closure(&self, cells: &BTreeSet<Cell<V>>) -> Result<BTreeSet<Cell<V>>, ComplexError> {
        Ok(self.cells_of(&self.closure_ids(&self.ids_of(cells)?)))
    }

    /// All cells having at least one face in `cells`.
    pub fn star(&self, cells: &BTreeSet<Cell<V>>) -> Result<BTreeSet<Cell<V>>, ComplexError> {
        Ok(self.cells_of(&self.star_ids(&self.ids_of(cells)?)))
    }

    pub fn is_closed(&self, cells: &BTreeSet<Cell<V>>) -> Result<bool, ComplexError> {
        Ok(self.is_closed_ids(&self.ids_of(cells)?))
    }

    /// Cells with no proper coface, in canonical order.
    pub fn facets(&self) -> Vec<Cell<V>> {
        self.facet_ids().into_iter().map(|id| self.cells[id].clone()).collect()
    }

    /// The 1-skeleton as a graph.
    pub fn graph(&self) -> Graph<V> {
        let edges = self.cells[self.ids_of_dim(1)]
            .iter()
            .map(|c| (c.vertices[0], c.vertices[1]));
        Graph::new(self.vertices(), edges).expect("1-skeleton of a complex is a simple graph")
    }

    /// Relabels vertices through an injective map.
    pub fn map_vertices<W: Vertex>(&self, f: impl Fn(V) -> W) -> SimplicialComplex<W> {
        let cells = self
            .cells
            .iter()
            .map(|c| Cell::new(c.vertices.iter().map(|&v| f(v)).collect()).expect("injective relabeling"))
            .collect();
        SimplicialComplex::from_closed_set(cells)
    }

    /// The full subcomplex on the vertices accepted by `keep`.
    pub fn induced(&self, keep: impl Fn(&V) -> bool) -> Self {
        let cells = self
            .cells
            .iter()
            .filter(|c| c.vertices.iter().all(&keep))
            .cloned()
            .collect();
        Self::from_closed_set(cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(cells: &[&[u32]]) -> BTreeSet<Cell<u32>> {
        cells.iter().map(|c| Cell::new(c.to_vec()).unwrap()).collect()
    }

    fn path() -> SimplicialComplex<u32> {
        SimplicialComplex::from_maximal_cells([vec![1, 2], vec![2, 3]]).unwrap()
    }

    #[test]
    fn maximal_cells_close_downward() {
        let x = path();
        assert_eq!(
            x.cells().iter().cloned().collect::<BTreeSet<_>>(),
            set(&[&[1], &[2], &[3], &[1, 2], &[2, 3]])
        );
        let single = SimplicialComplex::from_maximal_cells([vec![1u32]]).unwrap();
        assert_eq!(single.len(), 1);
        let tri = SimplicialComplex::from_maximal_cells([vec![1u32, 2, 3]]).unwrap();
        assert_eq!(tri.len(), 7);
        assert_eq!(tri.ids_of_dim(0).len(), 3);
        assert_eq!(tri.ids_of_dim(1).len(), 3);
        assert_eq!(tri.ids_of_dim(2).len(), 1);
    }

    #[test]
    fn repeated_vertex_is_invalid() {
        let err = SimplicialComplex::from_maximal_cells([vec![1u32, 1]]).unwrap_err();
        assert!(matches!(err, ComplexError::InvalidCell(_)));
        assert!(Cell::<u32>::new(vec![]).is_err());
    }

    #[test]
    fn clique_complex_examples() {
        let g = Graph::new([1u32, 2, 3], [(1, 2), (2, 3)]).unwrap();
        let x = SimplicialComplex::clique_complex(&g);
        assert_eq!(x.len(), 5);
        assert_eq!(x.dim(), Some(1));

        let g = Graph::new([1u32, 2, 3], [(1, 2), (1, 3), (2, 3)]).unwrap();
        let x = SimplicialComplex::clique_complex(&g);
        assert!(x.contains(&Cell::new(vec![1, 2, 3]).unwrap()));

        let g = Graph::new([1u32, 2, 3, 4], []).unwrap();
        let x = SimplicialComplex::clique_complex(&g);
        assert_eq!(x.len(), 4);
        assert_eq!(x.facets().len(), 4);
    }

    #[test]
    fn graph_rejects_bad_edges() {
        assert!(matches!(
            Graph::new([1u32, 2], [(1, 1)]),
            Err(ComplexError::SelfLoop(_))
        ));
        assert!(matches!(
            Graph::new([1u32, 2], [(1, 3)]),
            Err(ComplexError::UnknownVertex(_))
        ));
    }

    #[test]
    fn closure_examples() {
        let x = path();
        assert_eq!(x.closure(&set(&[&[1, 2]])).unwrap(), set(&[&[1], &[2], &[1, 2]]));
        assert_eq!(x.closure(&set(&[&[2]])).unwrap(), set(&[&[2]]));
        assert_eq!(x.closure(&set(&[&[1, 2], &[2, 3]])).unwrap().len(), 5);
        assert!(matches!(x.closure(&set(&[&[1, 3]])), Err(ComplexError::UnknownCell(_))));
    }

    #[test]
    fn star_examples() {
        let x = path();
        assert_eq!(x.star(&set(&[&[2]])).unwrap(), set(&[&[2], &[1, 2], &[2, 3]]));
        assert_eq!(
            x.star(&set(&[&[1], &[2], &[1, 2]])).unwrap(),
            set(&[&[1], &[2], &[1, 2], &[2, 3]])
        );
        assert_eq!(x.star(&set(&[&[3]])).unwrap(), set(&[&[3], &[2, 3]]));
    }

    #[test]
    fn facet_examples() {
        assert_eq!(
            path().facets(),
            set(&[&[1, 2], &[2, 3]]).into_iter().collect::<Vec<_>>()
        );
        let tri = SimplicialComplex::from_maximal_cells([vec![1u32, 2, 3]]).unwrap();
        assert_eq!(tri.facets(), vec![Cell::new(vec![1, 2, 3]).unwrap()]);
    }

    #[test]
    fn incidence_sign_follows_sorted_order() {
        let e = Cell::new(vec![1u32, 2]).unwrap();
        assert_eq!(incidence_sign(&Cell::vertex(2), &e).unwrap(), 1);
        assert_eq!(incidence_sign(&Cell::vertex(1), &e).unwrap(), -1);
        assert!(matches!(
            incidence_sign(&Cell::vertex(3), &e),
            Err(ComplexError::InvalidIncidence { .. })
        ));
        let t = Cell::new(vec![1u32, 2, 3]).unwrap();
        assert!(incidence_sign(&Cell::vertex(1), &t).is_err());
    }

    #[test]
    fn signs_square_to_zero_on_a_simplex() {
        // For each vertex v and triangle t, the signed count of paths v < e < t vanishes.
        let tri = SimplicialComplex::from_maximal_cells([vec![1u32, 2, 3]]).unwrap();
        let t = tri.ids_of_dim(2).start;
        for v in tri.ids_of_dim(0) {
            let total: i32 = tri
                .faces(t)
                .iter()
                .filter(|e| tri.faces(**e).contains(&v))
                .map(|&e| {
                    incidence_sign(tri.cell(v), tri.cell(e)).unwrap()
                        * incidence_sign(tri.cell(e), tri.cell(t)).unwrap()
                })
                .sum();
            assert_eq!(total, 0);
        }
    }

    #[test]
    fn closedness_examples() {
        let x = path();
        assert!(x.is_closed(&set(&[&[3]])).unwrap());
        assert!(!x.is_closed(&set(&[&[1, 2]])).unwrap());
        assert!(x.is_closed(&x.cells().iter().cloned().collect()).unwrap());
    }

    #[test]
    fn face_and_coface_indices_agree() {
        let x = SimplicialComplex::from_maximal_cells([vec![1u32, 2, 3, 4], vec![4, 5]]).unwrap();
        for id in 0..x.len() {
            for &f in x.faces(id) {
                assert!(x.cofaces(f).contains(&id));
            }
            for &c in x.cofaces(id) {
                assert!(x.faces(c).contains(&id));
            }
        }
    }
}
