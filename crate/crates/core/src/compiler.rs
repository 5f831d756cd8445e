//! The compilation loop.
//!
//! Each step picks a constraint of the problem not yet implied by the
//! layout, rewrites it through the boundary map, and grows one strip of
//! plaquettes that realizes it. When no constraint fits, a single term is
//! placed on its own to open up the boundary.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::boundary::BoundaryMap;
use crate::decompose::{add_degree_of_freedom, decompose_corner, decompose_right, decompose_top, edge_lengths, Edge, PlacementPlan};
use crate::error::{Error, Result};
use crate::format::LayoutDoc;
use crate::gf2::{BitMatrix, BitVector};
use crate::layout::{Group, Layout, Position, QubitId, QubitKind};
use crate::problem::{ProblemSpec, TermId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Greedy,
    Beam(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompilerConfig {
    pub strategy: Strategy,
    /// Largest number of basis rows XORed together to form a candidate.
    pub candidate_combination_depth: usize,
    pub max_layers: usize,
    pub rng_seed: u64,
    pub trim: bool,
}

impl Default for CompilerConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Greedy,
            candidate_combination_depth: 2,
            max_layers: 512,
            rng_seed: 0,
            trim: true,
        }
    }
}

impl CompilerConfig {
    pub fn validate(&self) -> Result<()> {
        if let Strategy::Beam(0) = self.strategy {
            return Err(Error::Config("beam width must be at least 1".into()));
        }
        if self.candidate_combination_depth == 0 {
            return Err(Error::Config("candidate depth must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    pub plaquettes: usize,
    pub free_ancillas: usize,
    pub fixed_ancillas: usize,
    pub layers: usize,
}

impl Stats {
    pub fn ancillas(&self) -> usize {
        self.free_ancillas + self.fixed_ancillas
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Constraint(usize),
    DegreeOfFreedom(TermId),
}

/// One layer of growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub kind: StepKind,
    /// Dimension of the constraints implied after this step.
    pub implied_dim: usize,
    pub plaquettes: usize,
    pub free_ancillas: usize,
    pub fixed_ancillas: usize,
    pub filler_plaquettes: usize,
    pub filler_ancillas: usize,
    /// Plaquettes and qubits in the layout after this step.
    pub plaquettes_total: usize,
    pub qubits_total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledLayout {
    pub layout: Layout,
    /// Realized constraint of each group, over term ids.
    pub groups: BTreeMap<usize, BitVector>,
    pub stats: Stats,
    pub problem: ProblemSpec,
    pub steps: Vec<Step>,
}

impl CompiledLayout {
    pub fn to_doc(&self) -> LayoutDoc {
        LayoutDoc::from_layout(&self.layout, &self.problem)
    }

    pub fn to_json(&self) -> String {
        self.to_doc().to_json()
    }

    fn refresh_stats(&mut self) {
        self.stats.plaquettes = self.layout.plaquettes().len();
        self.stats.free_ancillas = self.layout.count_kind(|k| k == QubitKind::FreeAncilla);
        self.stats.fixed_ancillas = self.layout.count_kind(|k| k == QubitKind::FixedAncilla);
    }
}

/// Ancillas added, group plaquettes, qubits added, then the constraint's
/// terms. Lower is better.
pub type Score = (usize, usize, usize, Vec<TermId>);

#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub constraint: BitVector,
    pub plan: PlacementPlan,
    pub score: Score,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Choice {
    Place(Placement),
    AddDegreeOfFreedom { term: TermId, edge: Edge },
}

/// Constraints over term ids implied by a layout's plaquettes and pins.
pub fn implied_constraints(layout: &Layout, num_terms: usize) -> BitMatrix {
    let p = layout.as_constraint_matrix();
    let reduced = p.eliminate_columns(&layout.ancillas()).expect("ancilla labels exist");
    let term_of: BTreeMap<QubitId, TermId> = layout.parity_qubits().into_iter().map(|(t, q)| (q, t)).collect();
    let rows = reduced
        .rows()
        .iter()
        .map(|r| BitVector::from_indices(num_terms, r.ones().map(|i| term_of[&reduced.labels()[i]])))
        .collect();
    BitMatrix::from_rows((0..num_terms).collect(), rows).expect("term width")
}

/// Every XOR of at most `depth` rows of `basis`, deduplicated, ordered by
/// weight then by term list.
pub fn candidate_pool(basis: &BitMatrix, depth: usize) -> Vec<BitVector> {
    const LIMIT: usize = 20_000;
    let rows = basis.rows();
    let mut seen: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    let mut frontier: Vec<(usize, BitVector)> = rows.iter().cloned().enumerate().collect();
    for (_, v) in &frontier {
        seen.insert((v.count_ones(), v.ones().collect()));
    }
    for _ in 1..depth {
        let mut next = Vec::new();
        for (last, v) in &frontier {
            for (j, r) in rows.iter().enumerate().skip(last + 1) {
                let w = v ^ r;
                if seen.len() < LIMIT && seen.insert((w.count_ones(), w.ones().collect())) {
                    next.push((j, w));
                }
            }
        }
        frontier = next;
    }
    let width = basis.ncols();
    seen.into_iter()
        .filter(|(w, _)| *w > 0)
        .map(|(_, ones)| BitVector::from_indices(width, ones))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
struct State {
    layout: Layout,
    implied: BitMatrix,
    groups: BTreeMap<usize, BitVector>,
    steps: Vec<Step>,
    ancillas: usize,
}

impl State {
    fn new(layout: Layout, num_terms: usize) -> Self {
        Self {
            layout,
            implied: BitMatrix::with_width(num_terms),
            groups: BTreeMap::new(),
            steps: Vec::new(),
            ancillas: 0,
        }
    }

    fn dim(&self) -> usize {
        self.groups.len()
    }

    fn key(&self) -> (usize, usize) {
        (self.ancillas, self.layout.num_qubits())
    }

    fn open(&self, pool: &[BitVector]) -> Vec<BitVector> {
        pool.iter()
            .filter(|c| !self.implied.in_rowspace(c).expect("term width"))
            .cloned()
            .collect()
    }

    fn apply(&mut self, choice: &Choice) -> Result<()> {
        let (plan, kind) = match choice {
            Choice::Place(p) => {
                let id = self.groups.len();
                let mut plan = p.plan.clone();
                plan.group = Group::Constraint(id);
                self.groups.insert(id, p.constraint.clone());
                self.implied.push_row(p.constraint.clone())?;
                (plan, StepKind::Constraint(id))
            }
            Choice::AddDegreeOfFreedom { term, edge } => {
                (add_degree_of_freedom(&self.layout, *edge, *term)?, StepKind::DegreeOfFreedom(*term))
            }
        };
        plan.apply(&mut self.layout)?;
        self.ancillas += plan.ancilla_count();
        self.steps.push(Step {
            kind,
            implied_dim: self.groups.len(),
            plaquettes: plan.plaquettes.len(),
            free_ancillas: plan.free_ancillas.len(),
            fixed_ancillas: plan.fixed_ancillas.len(),
            filler_plaquettes: plan.filler_plaquettes.len(),
            filler_ancillas: plan.filler_ancillas.len(),
            plaquettes_total: self.layout.plaquettes().len(),
            qubits_total: self.layout.num_qubits(),
        });
        Ok(())
    }
}

fn score_of(constraint: &BitVector, plan: &PlacementPlan) -> Score {
    (
        plan.ancilla_count(),
        plan.plaquettes.len(),
        plan.qubit_count(),
        constraint.ones().collect(),
    )
}

/// Options for a constraint while the layout is still a single row: some of
/// its unplaced terms are appended to the row, the rest become endpoints.
fn seed_options(layout: &Layout, c: &BitVector, placed: &BTreeMap<TermId, QubitId>) -> Vec<PlacementPlan> {
    let unplaced: Vec<TermId> = c.ones().filter(|t| !placed.contains_key(t)).collect();
    let size = c.count_ones();
    let n_new = 2.min(unplaced.len()).min(size.saturating_sub(2));
    let (seed, new) = unplaced.split_at(unplaced.len() - n_new);
    let mut row = layout.clone();
    let start = layout.row_cols(0).last().map_or(0, |c| c + 1);
    let mut seed_row = Vec::new();
    let mut boundary: Vec<QubitId> = c.ones().filter_map(|t| placed.get(&t).copied()).collect();
    for (i, &t) in seed.iter().enumerate() {
        let pos = Position::new(start + i as i64, 0);
        boundary.push(row.add_qubit(pos, QubitKind::Parity(t)).expect("row end is free"));
        seed_row.push((pos, t));
    }
    match decompose_top(&row, &boundary, new, Group::Constraint(0)) {
        Ok(mut plan) => {
            plan.seed_row = seed_row;
            vec![plan]
        }
        Err(_) => Vec::new(),
    }
}

fn boundary_options(
    layout: &Layout,
    bmap: &BoundaryMap,
    c: &BitVector,
    placed: &BTreeMap<TermId, QubitId>,
) -> Vec<PlacementPlan> {
    let unplaced: Vec<TermId> = c.ones().filter(|t| !placed.contains_key(t)).collect();
    if unplaced.len() > 3 {
        return Vec::new();
    }
    let labels = bmap.labels();
    let column: BTreeMap<QubitId, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let v = BitVector::from_indices(labels.len(), c.ones().filter_map(|t| placed.get(&t)).map(|q| column[q]));
    let reduced: Vec<QubitId> = bmap.to_boundary_form(&v).ones().map(|i| labels[i]).collect();
    if reduced.is_empty() {
        return Vec::new();
    }
    let (h, w) = (layout.max_row().expect("non-empty"), layout.max_col().expect("non-empty"));
    let pos = |q: QubitId| layout.qubit(q).expect("placed").pos;
    let on_top: Vec<QubitId> = reduced.iter().copied().filter(|&q| pos(q).row == h).collect();
    let on_right: Vec<QubitId> = reduced.iter().copied().filter(|&q| pos(q).col == w).collect();
    let group = Group::Constraint(0);
    let mut out = Vec::new();
    if unplaced.len() <= 2 {
        if on_top.len() == reduced.len() {
            out.extend(decompose_top(layout, &reduced, &unplaced, group).ok());
        }
        if on_right.len() == reduced.len() {
            out.extend(decompose_right(layout, &reduced, &unplaced, group).ok());
        }
    }
    if on_top.len() + on_right.len() >= reduced.len() {
        let corner = layout.qubit_at(Position::new(w, h));
        let right_only: Vec<QubitId> = on_right.iter().copied().filter(|&q| Some(q) != corner).collect();
        out.extend(decompose_corner(layout, &on_top, &right_only, &unplaced, group).ok());
    }
    out
}

/// All ways to place one of `candidates` next, best first.
pub fn placement_options(layout: &Layout, candidates: &[BitVector]) -> Result<Vec<Placement>> {
    let placed = layout.parity_qubits();
    let seeding = layout.plaquettes().is_empty();
    let bmap = if seeding { None } else { Some(BoundaryMap::for_layout(layout)?) };
    let mut out: Vec<Placement> = candidates
        .iter()
        .flat_map(|c| {
            let plans = match &bmap {
                None => seed_options(layout, c, &placed),
                Some(b) => boundary_options(layout, b, c, &placed),
            };
            plans.into_iter().map(move |plan| Placement {
                score: score_of(c, &plan),
                constraint: c.clone(),
                plan,
            })
        })
        .collect();
    out.sort_by(|a, b| a.score.cmp(&b.score));
    Ok(out)
}

/// The fallback when no candidate fits: the smallest unplaced term of the
/// candidate with the fewest unplaced terms goes on the shorter edge.
fn degree_of_freedom_choice(layout: &Layout, candidates: &[BitVector]) -> Option<Choice> {
    let placed = layout.parity_qubits();
    let c = candidates
        .iter()
        .filter(|c| c.ones().any(|t| !placed.contains_key(&t)))
        .min_by_key(|c| (c.ones().filter(|t| !placed.contains_key(t)).count(), c.ones().collect::<Vec<_>>()))?;
    let term = c.ones().find(|t| !placed.contains_key(t))?;
    let edge = match edge_lengths(layout) {
        Some((top, right)) if right < top => Edge::Right,
        _ => Edge::Top,
    };
    Some(Choice::AddDegreeOfFreedom { term, edge })
}

/// Picks the best-scoring placement among `candidates`, or the directive to
/// add a degree of freedom when none fits.
pub fn select_constraint(layout: &Layout, candidates: &[BitVector]) -> Result<Choice> {
    match placement_options(layout, candidates)?.into_iter().next() {
        Some(p) => Ok(Choice::Place(p)),
        None => degree_of_freedom_choice(layout, candidates)
            .ok_or_else(|| Error::Decompose("no candidate constraint can be placed".into())),
    }
}

/// Bottom row holding the parity qubits of all side-condition terms, each
/// condition contiguous, conditions left to right in input order. A term
/// shared with earlier conditions must sit at the current end of the row.
pub fn place_side_conditions(p: &ProblemSpec) -> Result<Layout> {
    let mut row: Vec<TermId> = Vec::new();
    for (i, sc) in p.side_conditions.iter().enumerate() {
        let shared: BTreeSet<TermId> = sc.terms.iter().copied().filter(|t| row.contains(t)).collect();
        let suffix: BTreeSet<TermId> = row[row.len() - shared.len()..].iter().copied().collect();
        if shared != suffix {
            return Err(Error::SideConditionPlacement(format!(
                "side condition {i} shares terms that are not at the end of the row"
            )));
        }
        row.extend(sc.terms.iter().copied().filter(|t| !shared.contains(t)));
    }
    for (i, sc) in p.side_conditions.iter().enumerate() {
        let mut cols: Vec<usize> = sc
            .terms
            .iter()
            .map(|t| row.iter().position(|x| x == t).expect("placed"))
            .collect();
        cols.sort_unstable();
        if cols.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(Error::SideConditionPlacement(format!(
                "side condition {i} cannot be contiguous"
            )));
        }
    }
    let mut layout = Layout::new();
    for (col, &t) in row.iter().enumerate() {
        layout.add_qubit(Position::new(col as i64, 0), QubitKind::Parity(t))?;
    }
    Ok(layout)
}

fn run_greedy(mut state: State, pool: &[BitVector], dim: usize, max_layers: usize) -> Result<State> {
    while state.dim() < dim {
        if state.steps.len() >= max_layers {
            return Err(Error::LayerBudget(max_layers));
        }
        let open = state.open(pool);
        let choice = select_constraint(&state.layout, &open)?;
        state.apply(&choice)?;
    }
    Ok(state)
}

fn expand(state: &State, pool: &[BitVector], width: usize) -> Result<Vec<State>> {
    let open = state.open(pool);
    let options = placement_options(&state.layout, &open)?;
    let choices: Vec<Choice> = if options.is_empty() {
        degree_of_freedom_choice(&state.layout, &open)
            .into_iter()
            .collect()
    } else {
        options.into_iter().take(width).map(Choice::Place).collect()
    };
    if choices.is_empty() {
        return Err(Error::Decompose("no candidate constraint can be placed".into()));
    }
    choices
        .iter()
        .map(|c| {
            let mut next = state.clone();
            next.apply(c)?;
            Ok(next)
        })
        .collect()
}

fn run_beam(init: State, pool: &[BitVector], dim: usize, width: usize, cfg: &CompilerConfig) -> Result<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut beam = vec![init];
    loop {
        if beam.iter().all(|s| s.dim() >= dim) {
            break;
        }
        if beam.iter().any(|s| s.steps.len() >= cfg.max_layers) {
            return Err(Error::LayerBudget(cfg.max_layers));
        }
        let expanded: Vec<Result<Vec<State>>> = beam
            .par_iter()
            .map(|s| {
                if s.dim() >= dim {
                    Ok(vec![s.clone()])
                } else {
                    expand(s, pool, width)
                }
            })
            .collect();
        let mut next: Vec<State> = Vec::new();
        for children in expanded {
            for child in children? {
                if !next.contains(&child) {
                    next.push(child);
                }
            }
        }
        next.shuffle(&mut rng);
        next.sort_by_key(State::key);
        next.truncate(width);
        beam = next;
    }
    Ok(beam.into_iter().next().expect("beam is never empty"))
}

/// Places terms outside every constraint, checks the result, and trims.
fn finish(mut state: State, p: &ProblemSpec, trim: bool) -> Result<CompiledLayout> {
    let placed = state.layout.parity_qubits();
    for t in (0..p.num_terms()).filter(|t| !placed.contains_key(t)) {
        let layout = &mut state.layout;
        let pos = match (layout.max_row(), layout.max_col()) {
            (Some(h), Some(w)) => {
                let row = if layout.row_cols(0).last() == Some(&w) { 0 } else { h };
                Position::new(w + 1, row)
            }
            _ => Position::new(0, 0),
        };
        layout.add_qubit(pos, QubitKind::Parity(t))?;
    }
    let mut cl = CompiledLayout {
        stats: Stats {
            layers: state.steps.len(),
            ..Stats::default()
        },
        layout: state.layout,
        groups: state.groups,
        problem: p.clone(),
        steps: state.steps,
    };
    cl.refresh_stats();
    let c = p.constraint_space().basis;
    if !implied_constraints(&cl.layout, p.num_terms()).rowspace_equal(&c)? {
        return Err(Error::Decompose("compiled layout does not reproduce the constraint space".into()));
    }
    Ok(if trim { trim_layout(cl) } else { cl })
}

fn rows_and_columns_contiguous(layout: &Layout) -> bool {
    let mut rows: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    let mut cols: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for q in layout.qubits() {
        rows.entry(q.pos.row).or_default().push(q.pos.col);
        cols.entry(q.pos.col).or_default().push(q.pos.row);
    }
    rows.values_mut().chain(cols.values_mut()).all(|v| {
        v.sort_unstable();
        v.windows(2).all(|w| w[1] == w[0] + 1)
    })
}

/// Removes filler plaquettes, outermost first, and then ancillas no
/// plaquette uses, keeping each removal only if the implied constraints
/// still equal the constraint space and rows and columns stay gap-free.
pub fn trim_layout(mut cl: CompiledLayout) -> CompiledLayout {
    let c = cl.problem.constraint_space().basis;
    let k = cl.problem.num_terms();
    let ok = |layout: &Layout| {
        rows_and_columns_contiguous(layout)
            && implied_constraints(layout, k).rowspace_equal(&c).unwrap_or(false)
    };
    loop {
        let mut changed = false;
        let mut fillers: Vec<Position> = cl
            .layout
            .plaquettes()
            .iter()
            .filter(|p| p.group == Group::Filler)
            .map(|p| p.cell)
            .collect();
        fillers.sort_by_key(|p| std::cmp::Reverse((p.col + p.row, p.row, p.col)));
        for cell in fillers {
            let index = cl.layout.plaquettes().iter().position(|p| p.cell == cell).expect("cell present");
            let mut trial = cl.layout.clone();
            trial.remove_plaquette(index);
            if ok(&trial) {
                cl.layout = trial;
                changed = true;
            }
        }
        let coverage = cl.layout.coverage();
        let mut orphans: Vec<(Position, QubitId)> = cl
            .layout
            .qubits()
            .filter(|q| q.kind.is_ancilla() && !coverage.contains_key(&q.pos))
            .map(|q| (q.pos, q.id))
            .collect();
        orphans.sort_by_key(|(p, _)| std::cmp::Reverse((p.col + p.row, p.row, p.col)));
        for (_, id) in orphans {
            let mut trial = cl.layout.clone();
            trial.remove_qubit(id).expect("orphan has no plaquette");
            if ok(&trial) {
                cl.layout = trial;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    cl.refresh_stats();
    cl
}

/// Compiles `p` into a plaquette layout whose implied constraints on parity
/// qubits are exactly the problem's constraint space.
pub fn compile(p: &ProblemSpec, cfg: &CompilerConfig) -> Result<CompiledLayout> {
    cfg.validate()?;
    p.validate()?;
    let space = p.constraint_space();
    let dim = space.dimension();
    let pool = candidate_pool(&space.basis, cfg.candidate_combination_depth);
    let init = State::new(place_side_conditions(p)?, p.num_terms());
    let greedy = finish(run_greedy(init.clone(), &pool, dim, cfg.max_layers)?, p, cfg.trim)?;
    match cfg.strategy {
        Strategy::Greedy => Ok(greedy),
        Strategy::Beam(width) => {
            let beam = finish(run_beam(init, &pool, dim, width, cfg)?, p, cfg.trim)?;
            let cost = |cl: &CompiledLayout| (cl.stats.ancillas(), cl.layout.num_qubits());
            Ok(if cost(&beam) < cost(&greedy) { beam } else { greedy })
        }
    }
}
