//! Set-valued cellular sheaves and section checking.

use std::fmt::Debug;

use crate::complex::{CellId, SimplicialComplex, Vertex};

/// A cellular sheaf with stalks given by membership tests and restriction
/// functions along codimension-1 incidences.
///
/// Restrictions along longer chains are composites; implementations are
/// expected to be functorial, so checking codimension-1 incidences suffices.
pub trait CellSheaf {
    type Vertex: Vertex;
    type Value: Clone + PartialEq + Debug;

    fn base(&self) -> &SimplicialComplex<Self::Vertex>;

    fn in_stalk(&self, cell: CellId, value: &Self::Value) -> bool;

    /// Restriction from `face` to `coface` (codimension 1). `None` when the
    /// value has the wrong shape for the face stalk.
    fn restrict(&self, face: CellId, coface: CellId, value: &Self::Value) -> Option<Self::Value>;
}

/// A sheaf whose stalks can be listed.
pub trait FiniteStalks: CellSheaf {
    fn stalk_elements(&self, cell: CellId) -> Vec<Self::Value>;
}

/// Why an assignment fails to be a section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Assignment length differs from the number of cells.
    WrongLength {
        expected: usize,
        found: usize,
    },
    OutOfStalk {
        cell: CellId,
    },
    Mismatch {
        face: CellId,
        coface: CellId,
    },
}

/// Checks a total assignment against every stalk and codimension-1
/// restriction. Reports the first failure in cell order.
pub fn check_section<S: CellSheaf + ?Sized>(sheaf: &S, values: &[S::Value]) -> Result<(), Violation> {
    let base = sheaf.base();
    if values.len() != base.len() {
        return Err(Violation::WrongLength {
            expected: base.len(),
            found: values.len(),
        });
    }
    if let Some(cell) = (0..base.len()).find(|&c| !sheaf.in_stalk(c, &values[c])) {
        return Err(Violation::OutOfStalk { cell });
    }
    for (face, coface) in base.incidences() {
        if sheaf.restrict(face, coface, &values[face]).as_ref() != Some(&values[coface]) {
            return Err(Violation::Mismatch { face, coface });
        }
    }
    Ok(())
}

/// Like [`check_section`] for a partial assignment: only incidences with both
/// ends assigned are checked.
pub fn check_local_section<S: CellSheaf + ?Sized>(sheaf: &S, values: &[Option<S::Value>]) -> Result<(), Violation> {
    let base = sheaf.base();
    if values.len() != base.len() {
        return Err(Violation::WrongLength {
            expected: base.len(),
            found: values.len(),
        });
    }
    for (cell, value) in values.iter().enumerate() {
        if let Some(v) = value {
            if !sheaf.in_stalk(cell, v) {
                return Err(Violation::OutOfStalk { cell });
            }
        }
    }
    for (face, coface) in base.incidences() {
        if let (Some(a), Some(b)) = (&values[face], &values[coface]) {
            if sheaf.restrict(face, coface, a).as_ref() != Some(b) {
                return Err(Violation::Mismatch { face, coface });
            }
        }
    }
    Ok(())
}

/// Completes a partial assignment to a global section by backtracking over
/// the unassigned stalks, in cell order. `None` when no completion exists.
pub fn extend_section<S: FiniteStalks + ?Sized>(sheaf: &S, partial: &[Option<S::Value>]) -> Option<Vec<S::Value>> {
    check_local_section(sheaf, partial).ok()?;
    let mut work = partial.to_vec();
    let free: Vec<CellId> = (0..work.len()).filter(|&c| work[c].is_none()).collect();
    if backtrack(sheaf, &mut work, &free) {
        Some(work.into_iter().map(|v| v.expect("assigned")).collect())
    } else {
        None
    }
}

fn backtrack<S: FiniteStalks + ?Sized>(sheaf: &S, work: &mut [Option<S::Value>], free: &[CellId]) -> bool {
    let Some((&cell, rest)) = free.split_first() else {
        return true;
    };
    for candidate in sheaf.stalk_elements(cell) {
        work[cell] = Some(candidate);
        if locally_consistent(sheaf, work, cell) && backtrack(sheaf, work, rest) {
            return true;
        }
    }
    work[cell] = None;
    false
}

fn locally_consistent<S: CellSheaf + ?Sized>(sheaf: &S, work: &[Option<S::Value>], cell: CellId) -> bool {
    let base = sheaf.base();
    let value = work[cell].as_ref().expect("just assigned");
    let up = base.cofaces(cell).iter().all(|&d| match &work[d] {
        Some(w) => sheaf.restrict(cell, d, value).as_ref() == Some(w),
        None => true,
    });
    let down = base.faces(cell).iter().all(|&f| match &work[f] {
        Some(w) => sheaf.restrict(f, cell, w).as_ref() == Some(value),
        None => true,
    });
    up && down
}

/// Unassigned cells for which no stalk value agrees with the already
/// assigned neighbours.
pub fn blocked_cells<S: FiniteStalks + ?Sized>(sheaf: &S, partial: &[Option<S::Value>]) -> Vec<CellId> {
    let mut work = partial.to_vec();
    let mut blocked = Vec::new();
    for cell in 0..partial.len() {
        if partial[cell].is_some() {
            continue;
        }
        let ok = sheaf.stalk_elements(cell).into_iter().any(|candidate| {
            work[cell] = Some(candidate);
            locally_consistent(sheaf, &work, cell)
        });
        work[cell] = None;
        if !ok {
            blocked.push(cell);
        }
    }
    blocked
}
