//! Plaquette decomposition of boundary-form constraints.
//!
//! A constraint given by boundary qubits plus a few unplaced terms is realized
//! in a fresh strip outside the boundary: a row above the top edge, a column
//! right of the right edge, or an L-shaped shell around the corner. Inside the
//! strip, constraint qubits are covered an odd number of times by the group's
//! plaquettes and every other qubit an even number of times. New qubits that
//! appear twice are free ancillas; the strip's end positions hold new terms
//! or fixed ancillas.
//!
//! Cells of the strip outside the group's span get filler squares. Each filler
//! run is anchored on the free ancilla farthest from the group, so fillers add
//! exactly as many free ancillas as plaquettes and imply no constraint.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::layout::{Group, Layout, Position, QubitId, QubitKind, Shape};
use crate::problem::TermId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    Top,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Growth {
    Top,
    Right,
    Corner,
}

/// Everything one layer adds to the layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementPlan {
    pub growth: Growth,
    pub group: Group,
    /// Parity qubits appended to the initial row before any plaquette exists.
    pub seed_row: Vec<(Position, TermId)>,
    pub new_parity_qubits: Vec<(Position, TermId)>,
    pub free_ancillas: Vec<Position>,
    pub fixed_ancillas: Vec<Position>,
    pub plaquettes: Vec<(Position, Shape)>,
    pub filler_plaquettes: Vec<(Position, Shape)>,
    pub filler_ancillas: Vec<Position>,
}

impl PlacementPlan {
    fn new(growth: Growth, group: Group) -> Self {
        Self {
            growth,
            group,
            seed_row: Vec::new(),
            new_parity_qubits: Vec::new(),
            free_ancillas: Vec::new(),
            fixed_ancillas: Vec::new(),
            plaquettes: Vec::new(),
            filler_plaquettes: Vec::new(),
            filler_ancillas: Vec::new(),
        }
    }

    /// Qubits this plan adds, including seeded ones.
    pub fn qubit_count(&self) -> usize {
        self.seed_row.len()
            + self.new_parity_qubits.len()
            + self.free_ancillas.len()
            + self.fixed_ancillas.len()
            + self.filler_ancillas.len()
    }

    pub fn ancilla_count(&self) -> usize {
        self.free_ancillas.len() + self.fixed_ancillas.len() + self.filler_ancillas.len()
    }

    pub fn plaquette_count(&self) -> usize {
        self.plaquettes.len() + self.filler_plaquettes.len()
    }

    pub fn apply(&self, layout: &mut Layout) -> Result<()> {
        for &(pos, t) in self.seed_row.iter().chain(&self.new_parity_qubits) {
            layout.add_qubit(pos, QubitKind::Parity(t))?;
        }
        for &pos in &self.fixed_ancillas {
            layout.add_qubit(pos, QubitKind::FixedAncilla)?;
        }
        for &pos in self.free_ancillas.iter().chain(&self.filler_ancillas) {
            layout.add_qubit(pos, QubitKind::FreeAncilla)?;
        }
        for &(cell, shape) in &self.plaquettes {
            layout.add_plaquette(cell, shape, self.group)?;
        }
        for &(cell, shape) in &self.filler_plaquettes {
            layout.add_plaquette(cell, shape, Group::Filler)?;
        }
        Ok(())
    }

    /// XOR of the group's plaquettes with the plan's pin rows, as a set of
    /// qubit ids of `applied` (the layout after [`apply`](Self::apply)).
    pub fn realized(&self, applied: &Layout) -> BTreeSet<QubitId> {
        let mut acc = BTreeSet::new();
        let mut toggle = |id: QubitId| {
            if !acc.remove(&id) {
                acc.insert(id);
            }
        };
        for &(cell, shape) in &self.plaquettes {
            for pos in shape.corner_positions(cell) {
                toggle(applied.qubit_at(pos).expect("corner occupied"));
            }
        }
        for &pos in &self.fixed_ancillas {
            toggle(applied.qubit_at(pos).expect("pin placed"));
        }
        acc
    }
}

/// Top row `[start, end]` at `line`, or the right column in transposed
/// coordinates. `along` runs along the edge, `line + 1` is the new strip.
#[derive(Debug, Clone, Copy)]
struct Frame {
    edge: Edge,
    line: i64,
    start: i64,
    end: i64,
}

impl Frame {
    fn of(layout: &Layout, edge: Edge) -> Result<Self> {
        let (Some(h), Some(w)) = (layout.max_row(), layout.max_col()) else {
            return Err(Error::Decompose("layout is empty".into()));
        };
        let (line, end, run) = match edge {
            Edge::Top => (h, w, layout.row_cols(h)),
            Edge::Right => (w, h, layout.col_rows(w)),
        };
        let start = run[0];
        let contiguous = run.iter().enumerate().all(|(i, &u)| u == start + i as i64);
        if !contiguous || *run.last().expect("non-empty run") != end {
            return Err(Error::Decompose(format!(
                "{edge:?} edge is not a contiguous run ending at the corner"
            )));
        }
        Ok(Self { edge, line, start, end })
    }

    fn pos(&self, along: i64, out: i64) -> Position {
        match self.edge {
            Edge::Top => Position::new(along, self.line + out),
            Edge::Right => Position::new(self.line + out, along),
        }
    }

    fn cell(&self, along: i64) -> Position {
        self.pos(along, 0)
    }

    fn shape(&self, top_frame: Shape) -> Shape {
        match self.edge {
            Edge::Top => top_frame,
            Edge::Right => top_frame.transpose(),
        }
    }

    fn growth(&self) -> Growth {
        match self.edge {
            Edge::Top => Growth::Top,
            Edge::Right => Growth::Right,
        }
    }

    /// Along-edge coordinates of `qubits`, which must all lie on this edge.
    fn locate(&self, layout: &Layout, qubits: &[QubitId]) -> Result<BTreeSet<i64>> {
        qubits
            .iter()
            .map(|&id| {
                let q = layout.qubit(id).ok_or(Error::UnknownQubit(id))?;
                let (line, along) = match self.edge {
                    Edge::Top => (q.pos.row, q.pos.col),
                    Edge::Right => (q.pos.col, q.pos.row),
                };
                if line != self.line || along < self.start || along > self.end {
                    return Err(Error::Decompose(format!(
                        "qubit {id} at {} is not on the {:?} edge",
                        q.pos, self.edge
                    )));
                }
                Ok(along)
            })
            .collect()
    }
}

/// Endpoint slot of a group: receives a new term or a fixed ancilla.
#[derive(Debug, Clone, Copy)]
struct Endpoint {
    pos: Position,
    /// If pinned, the index into the plan's plaquettes whose shape can drop
    /// this corner, and the shape it becomes.
    collapse: Option<(usize, Shape)>,
}

fn fill_endpoints(plan: &mut PlacementPlan, endpoints: &[Endpoint], new_terms: &[TermId]) {
    // Terms go to endpoints that cannot collapse first, in slot order.
    let mut order: Vec<usize> = (0..endpoints.len()).collect();
    order.sort_by_key(|&i| (endpoints[i].collapse.is_some(), i));
    let mut terms = new_terms.iter();
    let mut assigned: Vec<Option<TermId>> = vec![None; endpoints.len()];
    for i in order {
        if let Some(&t) = terms.next() {
            assigned[i] = Some(t);
        }
    }
    for (ep, term) in endpoints.iter().zip(assigned) {
        match (term, ep.collapse) {
            (Some(t), _) => plan.new_parity_qubits.push((ep.pos, t)),
            (None, Some((idx, shape))) => plan.plaquettes[idx].1 = shape,
            (None, None) => plan.fixed_ancillas.push(ep.pos),
        }
    }
}

fn edge_walk(layout: &Layout, frame: Frame, c_boundary: &[QubitId], new_terms: &[TermId], group: Group) -> Result<PlacementPlan> {
    if new_terms.len() > 2 {
        return Err(Error::Decompose(format!(
            "{} new terms on one edge (at most 2)",
            new_terms.len()
        )));
    }
    let along = frame.locate(layout, c_boundary)?;
    let (Some(&left), Some(&right)) = (along.first(), along.last()) else {
        return Err(Error::Decompose("constraint has no boundary qubit".into()));
    };
    let single = left == right;
    let end = if single {
        if left == frame.end {
            return Err(Error::Decompose("single boundary qubit at the corner".into()));
        }
        left + 1
    } else {
        right
    };
    for u in frame.start..frame.end {
        if layout.has_cell(frame.cell(u)) {
            return Err(Error::CellCollision(frame.cell(u)));
        }
    }

    let mut plan = PlacementPlan::new(frame.growth(), group);
    for q in left..end {
        let next = q + 1;
        let shape = if single || (next != end && along.contains(&next)) {
            Shape::TriMissingLR
        } else {
            Shape::Square
        };
        plan.plaquettes.push((frame.cell(q), frame.shape(shape)));
    }
    for q in left + 1..end {
        plan.free_ancillas.push(frame.pos(q, 1));
    }
    let left_pos = frame.pos(left, 1);
    let right_pos = frame.pos(end, 1);
    match *new_terms {
        [t0, t1] => {
            plan.new_parity_qubits.push((left_pos, t0));
            plan.new_parity_qubits.push((right_pos, t1));
        }
        [t] => {
            plan.new_parity_qubits.push((right_pos, t));
            pin_or_collapse(&mut plan, frame, left, left_pos);
        }
        _ => {
            pin_or_collapse(&mut plan, frame, left, left_pos);
            plan.fixed_ancillas.push(right_pos);
        }
    }

    for u in frame.start..left {
        plan.filler_plaquettes.push((frame.cell(u), Shape::Square));
        plan.filler_ancillas.push(frame.pos(u, 1));
    }
    for u in end..frame.end {
        plan.filler_plaquettes.push((frame.cell(u), Shape::Square));
        plan.filler_ancillas.push(frame.pos(u + 1, 1));
    }
    Ok(plan)
}

/// A pinned left endpoint at the start of the edge is dropped by turning the
/// first square into a triangle, which leaves the position empty.
fn pin_or_collapse(plan: &mut PlacementPlan, frame: Frame, left: i64, pos: Position) {
    if left == frame.start && plan.plaquettes[0].1 == Shape::Square {
        plan.plaquettes[0].1 = frame.shape(Shape::TriMissingUL);
    } else {
        plan.fixed_ancillas.push(pos);
    }
}

/// Realizes a constraint on top-edge boundary qubits plus at most two new
/// terms in a new row above the layout.
pub fn decompose_top(layout: &Layout, c_boundary: &[QubitId], new_terms: &[TermId], group: Group) -> Result<PlacementPlan> {
    edge_walk(layout, Frame::of(layout, Edge::Top)?, c_boundary, new_terms, group)
}

/// Mirror image of [`decompose_top`] for the right edge.
pub fn decompose_right(layout: &Layout, c_boundary: &[QubitId], new_terms: &[TermId], group: Group) -> Result<PlacementPlan> {
    edge_walk(layout, Frame::of(layout, Edge::Right)?, c_boundary, new_terms, group)
}

/// Realizes a constraint whose boundary qubits may lie on both edges in an
/// L-shaped shell. The corner cell is always a square; its three outer
/// corners (above the top arm's start, diagonal, right of the right arm's
/// start) are the group's endpoints, so up to three new terms fit.
pub fn decompose_corner(
    layout: &Layout,
    c_top: &[QubitId],
    c_right: &[QubitId],
    new_terms: &[TermId],
    group: Group,
) -> Result<PlacementPlan> {
    if new_terms.len() > 3 {
        return Err(Error::Decompose(format!(
            "{} new terms around the corner (at most 3)",
            new_terms.len()
        )));
    }
    let top = Frame::of(layout, Edge::Top)?;
    let right = Frame::of(layout, Edge::Right)?;
    let (w, h) = (top.end, right.end);
    let corner = Position::new(w, h);
    let corner_id = layout.qubit_at(corner).expect("corner is occupied");

    let mut corner_hits = 0;
    let mut t_cols = BTreeSet::new();
    for u in top.locate(layout, &c_top.iter().copied().filter(|&q| q != corner_id).collect::<Vec<_>>())? {
        t_cols.insert(u);
    }
    let mut r_rows = BTreeSet::new();
    for u in right.locate(layout, &c_right.iter().copied().filter(|&q| q != corner_id).collect::<Vec<_>>())? {
        r_rows.insert(u);
    }
    for &q in c_top.iter().chain(c_right) {
        if q == corner_id {
            corner_hits += 1;
        }
    }
    let corner_in = corner_hits % 2 == 1;
    let top_start = t_cols.first().copied().unwrap_or(w);
    let right_start = r_rows.first().copied().unwrap_or(h);
    let top_arm = top_start < w;
    let right_arm = right_start < h;
    if !corner_in && !top_arm && !right_arm {
        return Err(Error::Decompose("empty constraint on the corner shell".into()));
    }
    for u in top.start..w {
        if layout.has_cell(top.cell(u)) {
            return Err(Error::CellCollision(top.cell(u)));
        }
    }
    for u in right.start..h {
        if layout.has_cell(right.cell(u)) {
            return Err(Error::CellCollision(right.cell(u)));
        }
    }
    if layout.has_cell(corner) {
        return Err(Error::CellCollision(corner));
    }

    // How many arm end cells keep the corner qubit: total coverage including
    // the corner cell must be odd exactly when the corner is in the constraint.
    let (top_keeps, right_keeps) = match (corner_in, top_arm, right_arm) {
        (true, true, true) => (true, true),
        (true, _, _) => (false, false),
        (false, true, _) => (true, false),
        (false, false, _) => (false, true),
    };

    let mut plan = PlacementPlan::new(Growth::Corner, group);
    let mut first_top = None;
    for q in top_start..w {
        let next = q + 1;
        let keeps_next = if next == w { top_keeps } else { !t_cols.contains(&next) };
        let shape = if keeps_next { Shape::Square } else { Shape::TriMissingLR };
        if q == top_start {
            first_top = Some(plan.plaquettes.len());
        }
        plan.plaquettes.push((top.cell(q), shape));
    }
    for q in top_start + 1..=w {
        if top_arm {
            plan.free_ancillas.push(top.pos(q, 1));
        }
    }
    let mut first_right = None;
    for q in right_start..h {
        let next = q + 1;
        let keeps_next = if next == h { right_keeps } else { !r_rows.contains(&next) };
        let shape = if keeps_next { Shape::Square } else { Shape::TriMissingUL };
        if q == right_start {
            first_right = Some(plan.plaquettes.len());
        }
        plan.plaquettes.push((right.cell(q), shape));
    }
    for q in right_start + 1..=h {
        if right_arm {
            plan.free_ancillas.push(right.pos(q, 1));
        }
    }
    plan.plaquettes.push((corner, Shape::Square));

    let collapse_top = first_top
        .filter(|&i| top_start == top.start && plan.plaquettes[i].1 == Shape::Square)
        .map(|i| (i, Shape::TriMissingUL));
    let collapse_right = first_right
        .filter(|&i| right_start == right.start && plan.plaquettes[i].1 == Shape::Square)
        .map(|i| (i, Shape::TriMissingLR));
    let endpoints = [
        Endpoint {
            pos: Position::new(w + 1, h + 1),
            collapse: None,
        },
        Endpoint {
            pos: top.pos(top_start, 1),
            collapse: collapse_top,
        },
        Endpoint {
            pos: right.pos(right_start, 1),
            collapse: collapse_right,
        },
    ];
    fill_endpoints(&mut plan, &endpoints, new_terms);

    for u in top.start..top_start {
        plan.filler_plaquettes.push((top.cell(u), Shape::Square));
        plan.filler_ancillas.push(top.pos(u, 1));
    }
    for u in right.start..right_start {
        plan.filler_plaquettes.push((right.cell(u), Shape::Square));
        plan.filler_ancillas.push(right.pos(u, 1));
    }
    Ok(plan)
}

/// Adds one degree of freedom: a new parity qubit at the start of a fresh
/// row (or column) and a full strip of squares whose remaining new positions
/// are free ancillas. The strip has one more qubit than plaquettes.
pub fn add_degree_of_freedom(layout: &Layout, edge: Edge, term: TermId) -> Result<PlacementPlan> {
    let mut plan = PlacementPlan::new(
        match edge {
            Edge::Top => Growth::Top,
            Edge::Right => Growth::Right,
        },
        Group::Filler,
    );
    if layout.is_empty() {
        plan.new_parity_qubits.push((Position::new(0, 0), term));
        return Ok(plan);
    }
    let frame = Frame::of(layout, edge)?;
    plan.new_parity_qubits.push((frame.pos(frame.start, 1), term));
    for u in frame.start..frame.end {
        if layout.has_cell(frame.cell(u)) {
            return Err(Error::CellCollision(frame.cell(u)));
        }
        plan.filler_plaquettes.push((frame.cell(u), Shape::Square));
        plan.filler_ancillas.push(frame.pos(u + 1, 1));
    }
    Ok(plan)
}

/// Length of the top row and of the right column.
pub fn edge_lengths(layout: &Layout) -> Option<(usize, usize)> {
    let h = layout.max_row()?;
    let w = layout.max_col()?;
    Some((layout.row_cols(h).len(), layout.col_rows(w).len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryMap;
    use std::collections::BTreeMap;

    fn row_layout(n: i64) -> (Layout, Vec<QubitId>) {
        let mut l = Layout::new();
        let ids = (0..n)
            .map(|c| l.add_qubit(Position::new(c, 0), QubitKind::Parity(c as usize)).unwrap())
            .collect();
        (l, ids)
    }

    /// Checks the plan invariants and returns the applied layout.
    fn check(layout: &Layout, plan: &PlacementPlan, boundary: &[QubitId]) -> Layout {
        let mut after = layout.clone();
        plan.apply(&mut after).unwrap();
        assert_eq!(plan.free_ancillas.len() + 1, plan.plaquettes.len(), "{plan:?}");
        assert_eq!(plan.filler_ancillas.len(), plan.filler_plaquettes.len());
        let mut expected: BTreeSet<QubitId> = boundary.iter().copied().collect();
        for &(pos, _) in &plan.new_parity_qubits {
            expected.insert(after.qubit_at(pos).unwrap());
        }
        assert_eq!(plan.realized(&after), expected, "{plan:?}");
        let mut counts: BTreeMap<Position, usize> = BTreeMap::new();
        for &(cell, shape) in &plan.plaquettes {
            assert_ne!(shape, Shape::TriMissingLL);
            for p in shape.corner_positions(cell) {
                *counts.entry(p).or_default() += 1;
            }
        }
        for p in &plan.free_ancillas {
            assert_eq!(counts[p], 2);
        }
        for p in &plan.fixed_ancillas {
            assert!(counts[p] == 1 || counts[p] == 2);
        }
        BoundaryMap::for_layout(&after).expect("interior stays expressible");
        after
    }

    #[test]
    fn three_boundary_qubits_no_new_terms() {
        let (l, ids) = row_layout(3);
        let plan = decompose_top(&l, &ids, &[], Group::Constraint(0)).unwrap();
        assert_eq!(
            plan.plaquettes,
            vec![(Position::new(0, 0), Shape::TriMissingLR), (Position::new(1, 0), Shape::Square)]
        );
        assert_eq!(plan.free_ancillas, vec![Position::new(1, 1)]);
        assert_eq!(plan.fixed_ancillas.len(), 2);
        check(&l, &plan, &ids);
    }

    #[test]
    fn adjacent_pair_with_one_new_term_is_a_triangle() {
        let (l, ids) = row_layout(2);
        let plan = decompose_top(&l, &ids, &[7], Group::Constraint(0)).unwrap();
        assert_eq!(plan.plaquettes, vec![(Position::new(0, 0), Shape::TriMissingUL)]);
        assert!(plan.fixed_ancillas.is_empty() && plan.free_ancillas.is_empty());
        check(&l, &plan, &ids);
    }

    #[test]
    fn five_qubit_constraint_with_two_new_terms() {
        // a, b, d on a top row of width 4 plus new x and y
        let (l, ids) = row_layout(4);
        let c = [ids[0], ids[1], ids[3]];
        let plan = decompose_top(&l, &c, &[10, 11], Group::Constraint(0)).unwrap();
        assert_eq!(plan.plaquettes.len(), 3);
        assert_eq!(plan.free_ancillas.len(), 2);
        assert!(plan.fixed_ancillas.is_empty());
        check(&l, &plan, &c);
    }

    #[test]
    fn fillers_cover_the_rest_of_the_row() {
        let (l, ids) = row_layout(6);
        let c = [ids[2], ids[3]];
        let plan = decompose_top(&l, &c, &[20, 21], Group::Constraint(0)).unwrap();
        assert_eq!(plan.filler_plaquettes.len(), 4);
        let after = check(&l, &plan, &c);
        // the whole old row is now interior
        let boundary: BTreeSet<_> = after.boundary().into_iter().collect();
        assert!(ids[..5].iter().all(|q| !boundary.contains(q)));
    }

    #[test]
    fn single_boundary_qubit_uses_a_triangle() {
        let (l, ids) = row_layout(3);
        let plan = decompose_top(&l, &[ids[1]], &[5, 6], Group::Constraint(0)).unwrap();
        assert_eq!(plan.plaquettes, vec![(Position::new(1, 0), Shape::TriMissingLR)]);
        check(&l, &plan, &[ids[1]]);
    }

    #[test]
    fn too_many_new_terms_is_an_error() {
        let (l, ids) = row_layout(3);
        assert!(decompose_top(&l, &ids, &[1, 2, 3], Group::Constraint(0)).is_err());
    }

    #[test]
    fn off_edge_qubit_is_an_error() {
        let (mut l, ids) = row_layout(2);
        let up = l.add_qubit(Position::new(0, 1), QubitKind::FreeAncilla).unwrap();
        l.add_qubit(Position::new(1, 1), QubitKind::FreeAncilla).unwrap();
        l.add_plaquette(Position::new(0, 0), Shape::Square, Group::Filler).unwrap();
        assert!(decompose_top(&l, &[ids[0], up], &[], Group::Constraint(0)).is_err());
    }

    /// Square layout of side `n` with all qubits placed and filled with
    /// filler squares, so every edge is available.
    fn grid(n: i64) -> (Layout, BTreeMap<(i64, i64), QubitId>) {
        let mut l = Layout::new();
        let mut ids = BTreeMap::new();
        for r in 0..n {
            for c in 0..n {
                ids.insert((c, r), l.add_qubit(Position::new(c, r), QubitKind::Parity((r * n + c) as usize)).unwrap());
            }
        }
        for r in 0..n - 1 {
            for c in 0..n - 1 {
                l.add_plaquette(Position::new(c, r), Shape::Square, Group::Filler).unwrap();
            }
        }
        (l, ids)
    }

    #[test]
    fn right_edge_is_the_transpose() {
        let (l, ids) = grid(3);
        let c = [ids[&(2, 0)], ids[&(2, 1)], ids[&(2, 2)]];
        let plan = decompose_right(&l, &c, &[], Group::Constraint(0)).unwrap();
        assert_eq!(
            plan.plaquettes,
            vec![(Position::new(2, 0), Shape::TriMissingUL), (Position::new(2, 1), Shape::Square)]
        );
        check(&l, &plan, &c);
        let pair = [ids[&(2, 0)], ids[&(2, 1)]];
        let plan = decompose_right(&l, &pair, &[99], Group::Constraint(0)).unwrap();
        assert_eq!(plan.plaquettes, vec![(Position::new(2, 0), Shape::TriMissingLR)]);
        check(&l, &plan, &pair);
    }

    #[test]
    fn corner_with_corner_qubit_included() {
        // a, b on top; c the corner; d on the right
        let (l, ids) = grid(4);
        let (a, b, c, d) = (ids[&(1, 3)], ids[&(2, 3)], ids[&(3, 3)], ids[&(3, 1)]);
        let plan = decompose_corner(&l, &[a, b, c], &[d], &[], Group::Constraint(0)).unwrap();
        let after = check(&l, &plan, &[a, b, c, d]);
        let cov = after
            .plaquettes()
            .iter()
            .filter(|p| p.group == Group::Constraint(0))
            .flat_map(|p| p.corner_positions().collect::<Vec<_>>())
            .filter(|&p| p == Position::new(3, 3))
            .count();
        assert_eq!(cov, 3);
    }

    #[test]
    fn corner_with_corner_qubit_excluded() {
        let (l, ids) = grid(4);
        let (a, d) = (ids[&(2, 3)], ids[&(3, 2)]);
        let plan = decompose_corner(&l, &[a], &[d], &[40, 41, 42], Group::Constraint(0)).unwrap();
        let after = check(&l, &plan, &[a, d]);
        let cov = after
            .plaquettes()
            .iter()
            .filter(|p| p.group == Group::Constraint(0))
            .filter(|p| p.corner_positions().any(|q| q == Position::new(3, 3)))
            .count();
        assert_eq!(cov, 2);
        assert_eq!(plan.new_parity_qubits.len(), 3);
    }

    #[test]
    fn corner_with_empty_right_arm_matches_top_counts() {
        let (l, ids) = grid(3);
        let c = [ids[&(0, 2)], ids[&(2, 2)]];
        let top = decompose_top(&l, &c, &[], Group::Constraint(0)).unwrap();
        check(&l, &top, &c);
        let corner = decompose_corner(&l, &c, &[ids[&(2, 2)]], &[], Group::Constraint(0));
        // corner listed on both edges cancels: the constraint excludes it
        check(&l, &corner.unwrap(), &[ids[&(0, 2)]]);
        let corner = decompose_corner(&l, &c, &[], &[], Group::Constraint(0)).unwrap();
        check(&l, &corner, &c);
    }

    #[test]
    fn degree_of_freedom_strip() {
        let (l, _) = grid(4);
        let plan = add_degree_of_freedom(&l, Edge::Top, 77).unwrap();
        assert_eq!(plan.filler_plaquettes.len(), 3);
        assert_eq!(plan.qubit_count(), 4);
        let mut after = l.clone();
        plan.apply(&mut after).unwrap();
        BoundaryMap::for_layout(&after).unwrap();

        let (l, _) = grid(2);
        let plan = add_degree_of_freedom(&l, Edge::Right, 5).unwrap();
        assert_eq!(plan.filler_plaquettes.len(), 1);
        assert_eq!(plan.qubit_count(), 2);
    }

    #[test]
    fn random_edge_constraints_satisfy_invariants() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(2..6);
            let (l, ids) = grid(n);
            let edge_top = rng.gen_bool(0.5);
            let mut c: Vec<QubitId> = (0..n)
                .filter(|_| rng.gen_bool(0.5))
                .map(|u| if edge_top { ids[&(u, n - 1)] } else { ids[&(n - 1, u)] })
                .collect();
            if c.is_empty() {
                c.push(if edge_top { ids[&(0, n - 1)] } else { ids[&(n - 1, 0)] });
            }
            let k = rng.gen_range(0..=2);
            let terms: Vec<TermId> = (100..100 + k).collect();
            let corner = ids[&(n - 1, n - 1)];
            let res = if edge_top {
                decompose_top(&l, &c, &terms, Group::Constraint(0))
            } else {
                decompose_right(&l, &c, &terms, Group::Constraint(0))
            };
            match res {
                Ok(plan) => {
                    check(&l, &plan, &c);
                }
                Err(e) => assert!(c == vec![corner], "{e} {c:?} {edge_top}"),
            }
        }
    }

    #[test]
    fn random_corner_constraints_satisfy_invariants() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let n = rng.gen_range(2..6);
            let (l, ids) = grid(n);
            let top: Vec<QubitId> = (0..n).filter(|_| rng.gen_bool(0.4)).map(|u| ids[&(u, n - 1)]).collect();
            let right: Vec<QubitId> = (0..n - 1).filter(|_| rng.gen_bool(0.4)).map(|u| ids[&(n - 1, u)]).collect();
            let k = rng.gen_range(0..=3);
            let terms: Vec<TermId> = (100..100 + k).collect();
            let all: Vec<QubitId> = top.iter().chain(&right).copied().collect();
            match decompose_corner(&l, &top, &right, &terms, Group::Constraint(0)) {
                Ok(plan) => {
                    check(&l, &plan, &all);
                }
                Err(_) => assert!(all.is_empty()),
            }
        }
    }
}
