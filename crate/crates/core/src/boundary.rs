//! Expressions of interior qubits as XORs of upper-right boundary qubits.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::layout::{Layout, QubitId};

/// One row per interior qubit: a 1 on that qubit's column, all other 1s on
/// boundary columns. Every row lies in the rowspace of the plaquette matrix
/// it was computed from.
#[derive(Debug, Clone)]
pub struct BoundaryMap {
    labels: Vec<QubitId>,
    rows: BTreeMap<QubitId, BitVector>,
}

impl BoundaryMap {
    /// Interior columns (everything not in `boundary`) are ordered first by
    /// ascending label.
    pub fn recompute(p: &BitMatrix, boundary: &BTreeSet<QubitId>) -> Result<Self> {
        let interior: Vec<QubitId> = p.labels().iter().copied().filter(|l| !boundary.contains(l)).collect();
        Self::recompute_ordered(p, &interior, boundary, &BTreeSet::new())
    }

    /// Pivots on `interior` in the given order, then on non-pinned boundary
    /// columns, then on pinned columns. Pinned columns therefore never occur
    /// in an interior qubit's expression.
    pub fn recompute_ordered(
        p: &BitMatrix,
        interior: &[QubitId],
        boundary: &BTreeSet<QubitId>,
        pinned: &BTreeSet<QubitId>,
    ) -> Result<Self> {
        let col = |l: &QubitId| p.column_of(*l).ok_or(Error::UnknownLabel(*l));
        let mut order = Vec::with_capacity(p.ncols());
        for l in interior {
            order.push(col(l)?);
        }
        let rest: Vec<QubitId> = p
            .labels()
            .iter()
            .copied()
            .filter(|l| boundary.contains(l) && !interior.contains(l))
            .collect();
        for l in rest.iter().filter(|l| !pinned.contains(l)) {
            order.push(col(l)?);
        }
        for l in rest.iter().filter(|l| pinned.contains(l)) {
            order.push(col(l)?);
        }
        let e = p.echelon(&order);
        let by_pivot: BTreeMap<usize, &BitVector> = e.pivots().iter().copied().zip(e.rows()).collect();
        let mut rows = BTreeMap::new();
        for l in interior {
            let c = col(l)?;
            let row = by_pivot.get(&c).ok_or(Error::UnreachableInterior(*l))?;
            rows.insert(*l, (*row).clone());
        }
        Ok(Self {
            labels: p.labels().to_vec(),
            rows,
        })
    }

    /// Boundary map of a layout. Interior qubits are pivoted by descending
    /// taxicab distance from the top-right corner; pins go last.
    pub fn for_layout(layout: &Layout) -> Result<Self> {
        let p = layout.as_constraint_matrix();
        let boundary: BTreeSet<QubitId> = layout.boundary().into_iter().collect();
        let (Some(h), Some(w)) = (layout.max_row(), layout.max_col()) else {
            return Ok(Self {
                labels: p.labels().to_vec(),
                rows: BTreeMap::new(),
            });
        };
        let mut interior: Vec<(i64, QubitId)> = layout
            .interior()
            .into_iter()
            .map(|id| {
                let pos = layout.qubit(id).expect("interior qubit exists").pos;
                ((w - pos.col) + (h - pos.row), id)
            })
            .collect();
        interior.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let interior: Vec<QubitId> = interior.into_iter().map(|(_, id)| id).collect();
        let pinned: BTreeSet<QubitId> = layout.pins().iter().copied().collect();
        Self::recompute_ordered(&p, &interior, &boundary, &pinned)
    }

    pub fn labels(&self) -> &[QubitId] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, interior: QubitId) -> Option<&BitVector> {
        self.rows.get(&interior)
    }

    pub fn rows(&self) -> impl Iterator<Item = (QubitId, &BitVector)> {
        self.rows.iter().map(|(k, v)| (*k, v))
    }

    /// The boundary qubits an interior qubit maps to.
    pub fn expression(&self, interior: QubitId) -> Option<BTreeSet<QubitId>> {
        self.rows.get(&interior).map(|r| {
            r.ones()
                .map(|i| self.labels[i])
                .filter(|&l| l != interior)
                .collect()
        })
    }

    /// Adds the rows of all interior qubits present in `c`; the result is
    /// supported on boundary columns only.
    pub fn to_boundary_form(&self, c: &BitVector) -> BitVector {
        let mut out = c.clone();
        for (l, row) in &self.rows {
            let i = self.labels.iter().position(|x| x == l).expect("row label is a column");
            if c.get(i) {
                out ^= row;
            }
        }
        out
    }
}
