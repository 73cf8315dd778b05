use std::collections::{BTreeMap, BTreeSet};

use super::PayloadError;
use crate::activation::{Activity, Section};
use crate::temporal::TimeComplex;
use crate::NodeId;

/// Transmitter sets per timeslice; times not listed are idle.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    slices: BTreeMap<i64, BTreeSet<NodeId>>,
}

impl Schedule {
    pub fn idle() -> Self {
        Self::default()
    }

    pub fn set(&mut self, t: i64, transmitters: impl IntoIterator<Item = NodeId>) {
        self.slices.insert(t, transmitters.into_iter().collect());
    }

    pub fn with(mut self, t: i64, transmitters: impl IntoIterator<Item = NodeId>) -> Self {
        self.set(t, transmitters);
        self
    }

    pub fn transmitters(&self, t: i64) -> BTreeSet<NodeId> {
        self.slices.get(&t).cloned().unwrap_or_default()
    }

    pub fn slices(&self) -> &BTreeMap<i64, BTreeSet<NodeId>> {
        &self.slices
    }

    /// The activation section of every slice in the window.
    pub fn sections(&self, tc: &TimeComplex) -> Result<ScheduleSections, PayloadError> {
        let window = tc.window();
        if let Some(&t) = self.slices.keys().find(|t| !window.contains(**t)) {
            return Err(PayloadError::OutOfWindow(t));
        }
        let mut sections = BTreeMap::new();
        for t in window.times() {
            let transmitters = self.transmitters(t);
            if let Some(&n) = transmitters.iter().find(|n| !tc.nodes().contains(n)) {
                return Err(PayloadError::UnknownNode(n));
            }
            let slice = tc.timeslice(t).expect("in window").clone();
            let sheaf = crate::activation::ActivationSheaf::new(slice);
            let section = sheaf
                .section_from_transmitters(&transmitters)
                .map_err(|source| PayloadError::InvalidSchedule { time: t, source })?;
            sections.insert(t, section);
        }
        Ok(ScheduleSections { sections })
    }
}

/// Validated per-slice activation sections.
#[derive(Clone, Debug)]
pub struct ScheduleSections {
    sections: BTreeMap<i64, Section>,
}

impl ScheduleSections {
    pub fn section(&self, t: i64) -> &Section {
        &self.sections[&t]
    }

    /// `s_t` on a cell of the full complex; `None` for temporal edges.
    pub fn state(&self, tc: &TimeComplex, cell: crate::complex::CellId) -> Option<Activity> {
        let (t, local) = tc.slice_cell(cell)?;
        self.sections[&t].get(local)
    }

    /// `s_t([node])`.
    pub fn node_state(&self, tc: &TimeComplex, node: NodeId, t: i64) -> Activity {
        let v = tc.vertex(node, t).expect("vertex in window");
        self.state(tc, v).expect("vertex is within a slice")
    }
}
