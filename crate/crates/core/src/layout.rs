//! Qubits on an integer grid and plaquettes on its unit cells.
//!
//! Row 0 is the bottom row; layouts grow toward larger rows and columns. A
//! plaquette sits on the cell whose lower-left lattice point is `cell`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::problem::TermId;

pub type QubitId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub col: i64,
    pub row: i64,
}

impl Position {
    pub const fn new(col: i64, row: i64) -> Self {
        Self { col, row }
    }

    pub fn up(self) -> Self {
        Self::new(self.col, self.row + 1)
    }

    pub fn right(self) -> Self {
        Self::new(self.col + 1, self.row)
    }

    pub fn transpose(self) -> Self {
        Self::new(self.row, self.col)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.col, self.row)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitKind {
    Parity(TermId),
    FreeAncilla,
    /// Pinned to the +1 state by a single-body constraint.
    FixedAncilla,
}

impl QubitKind {
    pub fn is_ancilla(self) -> bool {
        !matches!(self, QubitKind::Parity(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    LowerLeft,
    LowerRight,
    UpperLeft,
    UpperRight,
}

impl Corner {
    pub const ALL: [Corner; 4] = [
        Corner::LowerLeft,
        Corner::LowerRight,
        Corner::UpperLeft,
        Corner::UpperRight,
    ];

    pub fn of(self, cell: Position) -> Position {
        match self {
            Corner::LowerLeft => cell,
            Corner::LowerRight => cell.right(),
            Corner::UpperLeft => cell.up(),
            Corner::UpperRight => cell.right().up(),
        }
    }
}

/// Plaquette shapes, named by the cell corner a triangle leaves out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Square,
    /// Leaves out the lower-left corner. Never placed: a qubit in that corner
    /// could not be expressed through the upper-right boundary.
    TriMissingLL,
    TriMissingUL,
    TriMissingLR,
}

impl Shape {
    pub fn missing(self) -> Option<Corner> {
        match self {
            Shape::Square => None,
            Shape::TriMissingLL => Some(Corner::LowerLeft),
            Shape::TriMissingUL => Some(Corner::UpperLeft),
            Shape::TriMissingLR => Some(Corner::LowerRight),
        }
    }

    pub fn corners(self) -> impl Iterator<Item = Corner> {
        let missing = self.missing();
        Corner::ALL.into_iter().filter(move |c| Some(*c) != missing)
    }

    pub fn corner_positions(self, cell: Position) -> impl Iterator<Item = Position> {
        self.corners().map(move |c| c.of(cell))
    }

    /// Mirror image across the main diagonal.
    pub fn transpose(self) -> Self {
        match self {
            Shape::TriMissingUL => Shape::TriMissingLR,
            Shape::TriMissingLR => Shape::TriMissingUL,
            s => s,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Shape::Square => "square",
            Shape::TriMissingLL => "tri_missing_ll",
            Shape::TriMissingUL => "tri_missing_ul",
            Shape::TriMissingLR => "tri_missing_lr",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "square" => Shape::Square,
            "tri_missing_ll" => Shape::TriMissingLL,
            "tri_missing_ul" => Shape::TriMissingUL,
            "tri_missing_lr" => Shape::TriMissingLR,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Constraint(usize),
    Filler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Plaquette {
    pub cell: Position,
    pub shape: Shape,
    pub group: Group,
}

impl Plaquette {
    pub fn corner_positions(&self) -> impl Iterator<Item = Position> {
        self.shape.corner_positions(self.cell)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Qubit {
    pub id: QubitId,
    pub pos: Position,
    pub kind: QubitKind,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layout {
    qubits: BTreeMap<QubitId, Qubit>,
    by_pos: BTreeMap<Position, QubitId>,
    plaquettes: Vec<Plaquette>,
    cells: BTreeSet<Position>,
    pins: Vec<QubitId>,
    next_id: QubitId,
}

impl Layout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_qubit(&mut self, pos: Position, kind: QubitKind) -> Result<QubitId> {
        if pos.col < 0 || pos.row < 0 {
            return Err(Error::Decompose(format!("negative position {pos}")));
        }
        if self.by_pos.contains_key(&pos) {
            return Err(Error::Occupied(pos));
        }
        let id = self.next_id;
        self.insert_qubit(Qubit { id, pos, kind });
        Ok(id)
    }

    fn insert_qubit(&mut self, q: Qubit) {
        self.by_pos.insert(q.pos, q.id);
        self.qubits.insert(q.id, q);
        if q.kind == QubitKind::FixedAncilla {
            self.pins.push(q.id);
        }
        self.next_id = self.next_id.max(q.id + 1);
    }

    /// Inserts a qubit with a caller-chosen id (used when loading files).
    pub fn add_qubit_with_id(&mut self, id: QubitId, pos: Position, kind: QubitKind) -> Result<()> {
        if self.by_pos.contains_key(&pos) {
            return Err(Error::Occupied(pos));
        }
        if self.qubits.contains_key(&id) {
            return Err(Error::Decompose(format!("duplicate qubit id {id}")));
        }
        self.insert_qubit(Qubit { id, pos, kind });
        Ok(())
    }

    pub fn add_plaquette(&mut self, cell: Position, shape: Shape, group: Group) -> Result<()> {
        if shape == Shape::TriMissingLL {
            return Err(Error::ForbiddenOrientation(cell));
        }
        if self.cells.contains(&cell) {
            return Err(Error::CellCollision(cell));
        }
        for corner in shape.corner_positions(cell) {
            if !self.by_pos.contains_key(&corner) {
                return Err(Error::MissingCorner { cell, corner });
            }
        }
        self.cells.insert(cell);
        self.plaquettes.push(Plaquette { cell, shape, group });
        Ok(())
    }

    pub fn remove_plaquette(&mut self, index: usize) -> Plaquette {
        let p = self.plaquettes.remove(index);
        self.cells.remove(&p.cell);
        p
    }

    /// Removes a qubit that no plaquette touches.
    pub fn remove_qubit(&mut self, id: QubitId) -> Result<Qubit> {
        let q = *self.qubits.get(&id).ok_or(Error::UnknownQubit(id))?;
        if self.plaquettes.iter().any(|p| p.corner_positions().any(|c| c == q.pos)) {
            return Err(Error::Decompose(format!("qubit {id} is still used by a plaquette")));
        }
        self.qubits.remove(&id);
        self.by_pos.remove(&q.pos);
        self.pins.retain(|&p| p != id);
        Ok(q)
    }

    pub fn qubit(&self, id: QubitId) -> Option<&Qubit> {
        self.qubits.get(&id)
    }

    pub fn qubit_at(&self, pos: Position) -> Option<QubitId> {
        self.by_pos.get(&pos).copied()
    }

    pub fn qubits(&self) -> impl Iterator<Item = &Qubit> {
        self.qubits.values()
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    pub fn pins(&self) -> &[QubitId] {
        &self.pins
    }

    pub fn has_cell(&self, cell: Position) -> bool {
        self.cells.contains(&cell)
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    /// Qubit placed for each term.
    pub fn parity_qubits(&self) -> BTreeMap<TermId, QubitId> {
        self.qubits
            .values()
            .filter_map(|q| match q.kind {
                QubitKind::Parity(t) => Some((t, q.id)),
                _ => None,
            })
            .collect()
    }

    pub fn count_kind(&self, pred: impl Fn(QubitKind) -> bool) -> usize {
        self.qubits.values().filter(|q| pred(q.kind)).count()
    }

    pub fn max_row(&self) -> Option<i64> {
        self.qubits.values().map(|q| q.pos.row).max()
    }

    pub fn max_col(&self) -> Option<i64> {
        self.qubits.values().map(|q| q.pos.col).max()
    }

    /// Occupied columns of row `row`, ascending.
    pub fn row_cols(&self, row: i64) -> Vec<i64> {
        self.by_pos.keys().filter(|p| p.row == row).map(|p| p.col).collect()
    }

    /// Occupied rows of column `col`, ascending.
    pub fn col_rows(&self, col: i64) -> Vec<i64> {
        let mut rows: Vec<i64> = self
            .by_pos
            .range(Position::new(col, i64::MIN)..=Position::new(col, i64::MAX))
            .map(|(p, _)| p.row)
            .collect();
        rows.sort_unstable();
        rows
    }

    /// The upper-right staircase: qubits on the top row or the right column
    /// of the bounding box, clockwise from the upper-left to the lower-right.
    pub fn boundary(&self) -> Vec<QubitId> {
        let (Some(h), Some(w)) = (self.max_row(), self.max_col()) else {
            return Vec::new();
        };
        let mut out: Vec<QubitId> = self
            .row_cols(h)
            .into_iter()
            .map(|c| self.by_pos[&Position::new(c, h)])
            .collect();
        for r in self.col_rows(w).into_iter().rev() {
            if r != h {
                out.push(self.by_pos[&Position::new(w, r)]);
            }
        }
        out
    }

    /// Non-boundary qubits on the bottom row or left column. Growth never
    /// returns to them.
    pub fn frozen(&self) -> Vec<QubitId> {
        let boundary: BTreeSet<QubitId> = self.boundary().into_iter().collect();
        let min_row = self.qubits.values().map(|q| q.pos.row).min();
        let min_col = self.qubits.values().map(|q| q.pos.col).min();
        self.qubits
            .values()
            .filter(|q| !boundary.contains(&q.id))
            .filter(|q| Some(q.pos.row) == min_row || Some(q.pos.col) == min_col)
            .map(|q| q.id)
            .collect()
    }

    pub fn interior(&self) -> Vec<QubitId> {
        let boundary: BTreeSet<QubitId> = self.boundary().into_iter().collect();
        self.qubits.keys().filter(|id| !boundary.contains(id)).copied().collect()
    }

    /// Column labels of the plaquette matrix: ancillas first, then parity
    /// qubits, each group by ascending id.
    pub fn column_labels(&self) -> Vec<QubitId> {
        let (anc, par): (Vec<&Qubit>, Vec<&Qubit>) = self.qubits.values().partition(|q| q.kind.is_ancilla());
        anc.into_iter().chain(par).map(|q| q.id).collect()
    }

    fn column_index(&self) -> BTreeMap<QubitId, usize> {
        self.column_labels().into_iter().enumerate().map(|(i, id)| (id, i)).collect()
    }

    pub fn plaquette_vector(&self, p: &Plaquette) -> BitVector {
        let index = self.column_index();
        self.plaquette_vector_with(&index, p)
    }

    fn plaquette_vector_with(&self, index: &BTreeMap<QubitId, usize>, p: &Plaquette) -> BitVector {
        BitVector::from_indices(
            index.len(),
            p.corner_positions().map(|pos| index[&self.by_pos[&pos]]),
        )
    }

    /// One row per plaquette followed by one single-bit row per pin.
    pub fn as_constraint_matrix(&self) -> BitMatrix {
        let labels = self.column_labels();
        let index = self.column_index();
        let mut m = BitMatrix::with_labels(labels).expect("qubit ids are unique");
        for p in &self.plaquettes {
            m.push_row(self.plaquette_vector_with(&index, p)).expect("width");
        }
        for pin in &self.pins {
            m.push_row(BitVector::from_indices(index.len(), [index[pin]])).expect("width");
        }
        m
    }

    /// Ids of all ancilla qubits (free and fixed).
    pub fn ancillas(&self) -> BTreeSet<QubitId> {
        self.qubits.values().filter(|q| q.kind.is_ancilla()).map(|q| q.id).collect()
    }

    /// Number of plaquettes touching each occupied position.
    pub fn coverage(&self) -> BTreeMap<Position, usize> {
        let mut out = BTreeMap::new();
        for p in &self.plaquettes {
            for c in p.corner_positions() {
                *out.entry(c).or_insert(0) += 1;
            }
        }
        out
    }
}
