//! Sheaves of finite-dimensional rational vector spaces, their cochain
//! complexes and cohomology.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::activation::ActivationSheaf;
use crate::complex::{incidence_sign, CellId, SimplicialComplex, Vertex};
use crate::linalg::{rational, row_reduce, Rational, SparseMatrix};
use crate::NodeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SheafError {
    #[error("expected {expected} stalk dimensions, got {found}")]
    WrongDimCount { expected: usize, found: usize },
    #[error("cells {face} -> {coface} are not a codimension-1 incidence")]
    InvalidIncidence { face: CellId, coface: CellId },
    #[error("restriction {face} -> {coface} is {rows}x{cols}, expected {want_rows}x{want_cols}")]
    ShapeMismatch {
        face: CellId,
        coface: CellId,
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("missing restriction {face} -> {coface}")]
    MissingRestriction { face: CellId, coface: CellId },
    #[error("restrictions from {face} to {coface} depend on the path taken")]
    NotFunctorial { face: CellId, coface: CellId },
}

/// A cellular sheaf of vector spaces: a stalk dimension per cell and a
/// restriction matrix (`dim(coface) × dim(face)`) per codimension-1 incidence.
#[derive(Clone, Debug)]
pub struct VectorSheaf<V> {
    base: Arc<SimplicialComplex<V>>,
    dims: Vec<usize>,
    restrictions: HashMap<(CellId, CellId), SparseMatrix>,
    labels: Vec<Option<Vec<NodeId>>>,
}

impl<V: Vertex> VectorSheaf<V> {
    /// Incidences with a zero-dimensional end may be omitted.
    pub fn new(
        base: Arc<SimplicialComplex<V>>,
        dims: Vec<usize>,
        restrictions: impl IntoIterator<Item = ((CellId, CellId), SparseMatrix)>,
    ) -> Result<Self, SheafError> {
        if dims.len() != base.len() {
            return Err(SheafError::WrongDimCount {
                expected: base.len(),
                found: dims.len(),
            });
        }
        let mut map = HashMap::new();
        for ((face, coface), m) in restrictions {
            if coface >= base.len() || !base.faces(coface).contains(&face) {
                return Err(SheafError::InvalidIncidence { face, coface });
            }
            if m.nrows() != dims[coface] || m.ncols() != dims[face] {
                return Err(SheafError::ShapeMismatch {
                    face,
                    coface,
                    rows: m.nrows(),
                    cols: m.ncols(),
                    want_rows: dims[coface],
                    want_cols: dims[face],
                });
            }
            map.insert((face, coface), m);
        }
        for (face, coface) in base.incidences() {
            if let std::collections::hash_map::Entry::Vacant(slot) = map.entry((face, coface)) {
                if dims[face] == 0 || dims[coface] == 0 {
                    slot.insert(SparseMatrix::zeros(dims[coface], dims[face]));
                } else {
                    return Err(SheafError::MissingRestriction { face, coface });
                }
            }
        }
        let labels = vec![None; base.len()];
        Ok(Self {
            base,
            dims,
            restrictions: map,
            labels,
        })
    }

    /// The constant sheaf with stalk `Q^dim` and identity restrictions.
    pub fn constant(base: Arc<SimplicialComplex<V>>, dim: usize) -> Self {
        let dims = vec![dim; base.len()];
        let restrictions: Vec<_> = base
            .incidences()
            .map(|inc| (inc, SparseMatrix::identity(dim)))
            .collect();
        Self::new(base, dims, restrictions).expect("identity restrictions fit")
    }

    pub fn zero(base: Arc<SimplicialComplex<V>>) -> Self {
        let dims = vec![0; base.len()];
        Self::new(base, dims, []).expect("zero sheaf")
    }

    pub fn with_labels(mut self, labels: Vec<Option<Vec<NodeId>>>) -> Self {
        assert_eq!(labels.len(), self.base.len());
        self.labels = labels;
        self
    }

    pub fn base(&self) -> &SimplicialComplex<V> {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<SimplicialComplex<V>> {
        &self.base
    }

    pub fn dim(&self, cell: CellId) -> usize {
        self.dims[cell]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self, cell: CellId) -> Option<&[NodeId]> {
        self.labels[cell].as_deref()
    }

    /// Restriction matrix along a codimension-1 incidence.
    pub fn restriction(&self, face: CellId, coface: CellId) -> Option<&SparseMatrix> {
        self.restrictions.get(&(face, coface))
    }

    /// Composite restriction along any face relation, following the chain
    /// that drops vertices from the front. Identity on the diagonal.
    pub fn composite(&self, face: CellId, coface: CellId) -> Option<SparseMatrix> {
        if face == coface {
            return Some(SparseMatrix::identity(self.dims[face]));
        }
        let c = self.base.cell(face);
        let e = self.base.cell(coface);
        if !c.is_face_of(e) {
            return None;
        }
        let step = self
            .base
            .faces(coface)
            .iter()
            .copied()
            .find(|&d| c.is_face_of(self.base.cell(d)))?;
        let lower = self.composite(face, step)?;
        Some(self.restrictions[&(step, coface)].mul(&lower))
    }

    /// Every codimension-2 square commutes exactly.
    pub fn check_functoriality(&self) -> Result<(), SheafError> {
        for e in 0..self.base.len() {
            let mut by_face: BTreeMap<CellId, Vec<SparseMatrix>> = BTreeMap::new();
            for &d in self.base.faces(e) {
                for &c in self.base.faces(d) {
                    let path = self.restrictions[&(d, e)].mul(&self.restrictions[&(c, d)]);
                    by_face.entry(c).or_default().push(path);
                }
            }
            for (c, paths) in by_face {
                if paths.windows(2).any(|w| w[0] != w[1]) {
                    return Err(SheafError::NotFunctorial { face: c, coface: e });
                }
            }
        }
        Ok(())
    }

    /// Offsets of each `k`-cell's stalk inside `C^k`.
    fn offsets(&self, k: usize) -> (Vec<usize>, usize) {
        let mut offsets = Vec::new();
        let mut total = 0;
        for id in self.base.ids_of_dim(k) {
            offsets.push(total);
            total += self.dims[id];
        }
        (offsets, total)
    }

    /// `dim C^k` for `k = 0..=dim X`.
    pub fn cochain_dims(&self) -> Vec<usize> {
        (0..self.levels()).map(|k| self.offsets(k).1).collect()
    }

    fn levels(&self) -> usize {
        self.base.dim().map_or(0, |d| d + 1)
    }

    /// The coboundary `δ^k : C^k → C^{k+1}`; block `(d, c)` is
    /// `sign(c, d) · restriction(c, d)`.
    pub fn coboundary(&self, k: usize) -> SparseMatrix {
        let (col_off, ncols) = self.offsets(k);
        let (row_off, nrows) = self.offsets(k + 1);
        let mut delta = SparseMatrix::zeros(nrows, ncols);
        let k_start = self.base.ids_of_dim(k).start;
        let k1 = self.base.ids_of_dim(k + 1);
        for d in k1.clone() {
            for &c in self.base.faces(d) {
                let sign = incidence_sign(self.base.cell(c), self.base.cell(d)).expect("codim-1 incidence");
                let block = self.restrictions[&(c, d)].scale(&rational(sign.into()));
                delta.add_block(row_off[d - k1.start], col_off[c - k_start], &block);
            }
        }
        delta
    }

    pub fn cochain_complex(&self) -> CochainComplex {
        let levels = self.levels();
        CochainComplex {
            dims: self.cochain_dims(),
            deltas: (0..levels).map(|k| self.coboundary(k)).collect(),
        }
    }

    /// `dim H^k` for `k = 0..=dim X`; empty for the empty complex.
    pub fn cohomology_dims(&self) -> Vec<usize> {
        self.cochain_complex().cohomology_dims()
    }

    /// A basis of `H^0 = ker δ^0`, as vectors over `C^0`, in reduced row
    /// echelon form.
    pub fn global_section_space(&self) -> Vec<Vec<Rational>> {
        let delta = self.coboundary(0);
        if delta.nrows() == 0 {
            let n = delta.ncols();
            let identity: Vec<Vec<Rational>> = (0..n)
                .map(|i| (0..n).map(|j| rational((i == j).into())).collect())
                .collect();
            return row_reduce(&identity);
        }
        delta.kernel()
    }

    /// Extends a 0-cochain to every cell through the composite restrictions.
    /// The result is a global section exactly when the 0-cochain is a cocycle.
    pub fn extend_cochain(&self, c0: &[Rational]) -> Vec<Vec<Rational>> {
        let (offsets, total) = self.offsets(0);
        assert_eq!(c0.len(), total, "0-cochain length");
        let vertices = self.base.ids_of_dim(0);
        (0..self.base.len())
            .map(|cell| {
                let v = vertices
                    .clone()
                    .find(|&v| self.base.cell(v).is_face_of(self.base.cell(cell)))
                    .expect("every cell has a vertex");
                let local = &c0[offsets[v - vertices.start]..][..self.dims[v]];
                self.composite(v, cell).expect("vertex is a face").apply(local)
            })
            .collect()
    }

    /// Whether a per-cell assignment satisfies every restriction.
    pub fn is_section(&self, values: &[Vec<Rational>]) -> bool {
        values.len() == self.base.len()
            && values.iter().enumerate().all(|(c, v)| v.len() == self.dims[c])
            && self
                .base
                .incidences()
                .all(|(c, d)| self.restrictions[&(c, d)].apply(&values[c]) == values[d])
    }
}

/// Cochain spaces and coboundaries of a sheaf.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    pub dims: Vec<usize>,
    pub deltas: Vec<SparseMatrix>,
}

impl CochainComplex {
    /// `δ^{k+1} δ^k = 0` for every `k`.
    pub fn squares_to_zero(&self) -> bool {
        self.deltas.windows(2).all(|w| w[1].mul(&w[0]).is_zero())
    }

    pub fn cohomology_dims(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.deltas.iter().map(SparseMatrix::rank).collect();
        (0..self.dims.len())
            .map(|k| {
                let below = if k == 0 { 0 } else { ranks[k - 1] };
                self.dims[k] - ranks[k] - below
            })
            .collect()
    }
}

/// The vector activation sheaf: stalk over `c` has basis the nodes of the
/// activation stalk over `c`, restrictions are basis projections.
pub fn vector_activation_sheaf(base: Arc<SimplicialComplex<NodeId>>) -> VectorSheaf<NodeId> {
    let act = ActivationSheaf::new(base.clone());
    let labels: Vec<Vec<NodeId>> = (0..base.len())
        .map(|c| act.stalk(c).iter().copied().collect())
        .collect();
    let dims = labels.iter().map(Vec::len).collect();
    let restrictions: Vec<_> = base
        .incidences()
        .map(|(c, d)| {
            let pick: Vec<Option<usize>> = labels[d]
                .iter()
                .map(|n| labels[c].iter().position(|m| m == n))
                .collect();
            ((c, d), SparseMatrix::selection(labels[c].len(), &pick))
        })
        .collect();
    VectorSheaf::new(base, dims, restrictions)
        .expect("projection shapes match stalks")
        .with_labels(labels.into_iter().map(Some).collect())
}

/// Whether every entry of a cochain is zero.
pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Cell;

    fn path() -> Arc<SimplicialComplex<NodeId>> {
        Arc::new(SimplicialComplex::from_maximal_cells([vec![1, 2], vec![2, 3]]).unwrap())
    }

    #[test]
    fn vector_activation_dims_on_the_path() {
        let x = path();
        let s = vector_activation_sheaf(x.clone());
        let dim_of = |vs: &[NodeId]| s.dim(x.id(&Cell::new(vs.to_vec()).unwrap()).unwrap());
        assert_eq!(
            [
                dim_of(&[1]),
                dim_of(&[2]),
                dim_of(&[3]),
                dim_of(&[1, 2]),
                dim_of(&[2, 3])
            ],
            [2, 3, 2, 2, 2]
        );
        let lone = vector_activation_sheaf(Arc::new(SimplicialComplex::from_maximal_cells([vec![1]]).unwrap()));
        assert_eq!(lone.dims(), &[1]);
    }

    #[test]
    fn projection_drops_unreachable_node() {
        let x = path();
        let s = vector_activation_sheaf(x.clone());
        let v2 = x.vertex_id(2).unwrap();
        let e12 = x.id(&Cell::new(vec![1, 2]).unwrap()).unwrap();
        assert_eq!(s.labels(v2).unwrap(), &[1, 2, 3]);
        let r = s.restriction(v2, e12).unwrap();
        assert_eq!(r, &SparseMatrix::from_dense(&[vec![1, 0, 0], vec![0, 1, 0]]));
    }

    #[test]
    fn constant_sheaf_coboundary_is_signed_incidence() {
        let s = VectorSheaf::constant(path(), 1);
        // rows [1,2],[2,3]; columns 1,2,3
        assert_eq!(
            s.coboundary(0),
            SparseMatrix::from_dense(&[vec![-1, 1, 0], vec![0, -1, 1]])
        );
        assert_eq!(s.coboundary(1).nrows(), 0);
        assert_eq!(s.coboundary(1).ncols(), 2);
        assert_eq!(s.cohomology_dims(), vec![1, 0]);
    }

    #[test]
    fn coboundaries_compose_to_zero_on_the_triangle() {
        let tri = Arc::new(SimplicialComplex::from_maximal_cells([vec![1, 2, 3]]).unwrap());
        let s = vector_activation_sheaf(tri);
        s.check_functoriality().unwrap();
        let cc = s.cochain_complex();
        assert!(cc.squares_to_zero());
        assert_eq!(cc.cohomology_dims(), vec![3, 0, 0]);
    }

    #[test]
    fn activation_cohomology_counts_nodes() {
        assert_eq!(vector_activation_sheaf(path()).cohomology_dims(), vec![3, 0]);
        let two_edges = Arc::new(SimplicialComplex::from_maximal_cells([vec![1, 2], vec![3, 4]]).unwrap());
        assert_eq!(vector_activation_sheaf(two_edges).cohomology_dims(), vec![4, 0]);
    }

    #[test]
    fn global_sections_are_node_indicators() {
        let x = path();
        let s = vector_activation_sheaf(x.clone());
        let basis = s.global_section_space();
        assert_eq!(basis.len(), 3);
        for (n, v) in [1, 2, 3].into_iter().zip(&basis) {
            let cells = s.extend_cochain(v);
            assert!(s.is_section(&cells));
            for (c, value) in cells.iter().enumerate() {
                let labels = s.labels(c).unwrap();
                let expected: Vec<Rational> = labels.iter().map(|&m| rational((m == n).into())).collect();
                assert_eq!(value, &expected);
            }
        }
        assert!(VectorSheaf::zero(x).global_section_space().is_empty());
    }

    #[test]
    fn construction_errors() {
        let x = path();
        assert!(matches!(
            VectorSheaf::new(x.clone(), vec![1; 4], []),
            Err(SheafError::WrongDimCount { .. })
        ));
        assert!(matches!(
            VectorSheaf::new(x.clone(), vec![1; 5], []),
            Err(SheafError::MissingRestriction { .. })
        ));
        assert!(matches!(
            VectorSheaf::new(x.clone(), vec![1; 5], [((0, 1), SparseMatrix::identity(1))]),
            Err(SheafError::InvalidIncidence { .. })
        ));
        let e12 = x.id(&Cell::new(vec![1, 2]).unwrap()).unwrap();
        assert!(matches!(
            VectorSheaf::new(x, vec![1; 5], [((0, e12), SparseMatrix::identity(2))]),
            Err(SheafError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn non_functorial_sheaf_is_detected() {
        let tri = Arc::new(SimplicialComplex::from_maximal_cells([vec![1u32, 2, 3]]).unwrap());
        let t = tri.ids_of_dim(2).start;
        let e = tri.faces(t)[0];
        let restrictions: Vec<_> = tri
            .incidences()
            .map(|(c, d)| {
                let m = if (c, d) == (e, t) {
                    SparseMatrix::zeros(1, 1)
                } else {
                    SparseMatrix::identity(1)
                };
                ((c, d), m)
            })
            .collect();
        let s = VectorSheaf::new(tri, vec![1; 7], restrictions).unwrap();
        assert!(matches!(s.check_functoriality(), Err(SheafError::NotFunctorial { .. })));
    }
}
