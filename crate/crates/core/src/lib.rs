//! Cellular sheaf models of a single-channel CSMA/CD wireless network.
//!
//! Link complexes are built from thresholded signal levels ([`netmodel`]),
//! interference-free transmitter sets are the global sections of the
//! activation sheaf ([`activation`]), cohomology is computed exactly over the
//! rationals ([`sheaflin`]), and packet flow over time is carried by the data
//! payload sheaf on a time-dependent link complex ([`temporal`], [`payload`]).

pub mod activation;
pub mod complex;
pub mod linalg;
pub mod netmodel;
pub mod payload;
pub mod sheaf;
pub mod sheaflin;
pub mod temporal;

/// Node identifiers.
pub type NodeId = u32;

pub use activation::{ActivationSheaf, Activity, Section};
pub use complex::{Cell, CellId, Graph, SimplicialComplex};
pub use linalg::{Rational, SparseMatrix};
pub use netmodel::NetworkDescription;
pub use sheaflin::VectorSheaf;
pub use temporal::{TimeComplex, TimeWindow, TimedNode};
