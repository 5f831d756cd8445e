//! Independent checks of a layout file against its problem.
//!
//! Nothing here looks at compiler state: every check starts from a
//! [`LayoutDoc`] and the [`ProblemSpec`].

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::format::{KindDoc, LayoutDoc};
use crate::gf2::{BitMatrix, BitVector};
use crate::layout::{Position, QubitId, Shape};
use crate::problem::{spin, ProblemSpec, TermId};

/// Largest qubit count, or kernel dimension, the exhaustive checks accept.
pub const ORACLE_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// `missing`: a required constraint the layout does not imply.
    /// `spurious`: an implied constraint outside the constraint space.
    pub kind: String,
    pub terms: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowspaceCertificate {
    pub status: Status,
    /// Implied dimension, then the dimension of the constraint space.
    pub dims: [usize; 2],
    pub witness: Option<Witness>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BruteForceReport {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    pub qubits: usize,
    pub survivors: u64,
    pub expected_survivors: u64,
    pub patterns: usize,
    pub logical_images: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub status: Status,
    pub physical_min: Option<f64>,
    pub logical_min: Option<f64>,
    pub distinct_levels: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Exhaustive checks run only when the layout has at most this many
    /// qubits or valid assignments span at most this many dimensions
    /// (capped at [`ORACLE_LIMIT`]).
    pub oracle_qubits: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { oracle_qubits: 16 }
    }
}

impl VerifyOptions {
    pub fn exhaustive() -> Self {
        Self {
            oracle_qubits: ORACLE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rowspace: RowspaceCertificate,
    pub brute_force: BruteForceReport,
    pub energy: EnergyReport,
    pub geometry: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rowspace.status == Status::Pass
            && self.brute_force.status != Status::Fail
            && self.energy.status != Status::Fail
            && self.geometry.is_empty()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut out = serde_json::Map::new();
        out.insert("rowspace".into(), serde_json::to_value(self.rowspace.status).unwrap());
        out.insert("dims".into(), serde_json::to_value(self.rowspace.dims).unwrap());
        out.insert("brute_force".into(), serde_json::to_value(&self.brute_force).unwrap());
        out.insert("energy".into(), serde_json::to_value(&self.energy).unwrap());
        out.insert("geometry".into(), serde_json::to_value(&self.geometry).unwrap());
        if let Some(w) = &self.rowspace.witness {
            out.insert("witness".into(), serde_json::to_value(w).unwrap());
        }
        if let Some(e) = &self.rowspace.error {
            out.insert("error".into(), serde_json::Value::String(e.clone()));
        }
        serde_json::Value::Object(out)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn verify(doc: &LayoutDoc, problem: &ProblemSpec, opts: VerifyOptions) -> Report {
    let enumeration = Enumeration::run(doc, problem, opts.oracle_qubits);
    Report {
        rowspace: verify_rowspace(doc, problem),
        brute_force: brute_force_report(doc, problem, enumeration.as_ref()),
        energy: energy_report(problem, enumeration.as_ref()),
        geometry: geometry_check(doc, problem),
    }
}

/// Plaquette rows followed by pin rows, columns labeled by qubit id.
fn plaquette_matrix(doc: &LayoutDoc) -> Result<BitMatrix, String> {
    let labels: Vec<QubitId> = doc.qubits.iter().map(|q| q.id).collect();
    let mut m = BitMatrix::with_labels(labels).map_err(|e| e.to_string())?;
    let by_pos: HashMap<Position, QubitId> = doc.qubits.iter().map(|q| (Position::new(q.col, q.row), q.id)).collect();
    for p in &doc.plaquettes {
        let shape = p.shape().map_err(|e| e.to_string())?;
        let mut ids = Vec::new();
        for corner in shape.corner_positions(p.cell()) {
            ids.push(*by_pos.get(&corner).ok_or(format!("plaquette at {} has no qubit at {corner}", p.cell()))?);
        }
        let row = m.vector_from_labels(ids).map_err(|e| e.to_string())?;
        m.push_row(row).map_err(|e| e.to_string())?;
    }
    for &pin in &doc.pins {
        let row = m.vector_from_labels([pin]).map_err(|e| e.to_string())?;
        m.push_row(row).map_err(|e| e.to_string())?;
    }
    Ok(m)
}

/// Term id of every parity qubit.
fn parity_terms(doc: &LayoutDoc, problem: &ProblemSpec) -> Result<BTreeMap<QubitId, TermId>, String> {
    let mut out = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for q in &doc.qubits {
        if let Some(term) = &q.term {
            let t = problem
                .term_index(term)
                .ok_or(format!("qubit {} carries term {term:?} which is not in the problem", q.id))?;
            if !seen.insert(t) {
                return Err(format!("term {term:?} is placed twice"));
            }
            out.insert(q.id, t);
        }
    }
    Ok(out)
}

fn term_lists(problem: &ProblemSpec, v: &BitVector) -> Vec<Vec<u32>> {
    v.ones().map(|t| problem.terms[t].qubits.clone()).collect()
}

/// Eliminates ancilla columns from the plaquette matrix and compares the
/// resulting constraints on parity qubits with the problem's constraint space.
pub fn verify_rowspace(doc: &LayoutDoc, problem: &ProblemSpec) -> RowspaceCertificate {
    let c = problem.constraint_space().basis;
    let c_dim = c.nrows();
    let fail = |error: String| RowspaceCertificate {
        status: Status::Fail,
        dims: [0, c_dim],
        witness: None,
        error: Some(error),
    };
    let p = match plaquette_matrix(doc) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let terms = match parity_terms(doc, problem) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let ancillas: BTreeSet<QubitId> = doc.qubits.iter().filter(|q| q.kind != KindDoc::Parity).map(|q| q.id).collect();
    let implied = p.eliminate_columns(&ancillas).expect("ancilla labels exist");
    let k = problem.num_terms();
    let rows: Vec<BitVector> = implied
        .rows()
        .iter()
        .map(|r| BitVector::from_indices(k, r.ones().map(|i| terms[&implied.labels()[i]])))
        .collect();
    let implied = BitMatrix::from_rows((0..k).collect(), rows).expect("term width");
    let dims = [implied.rank(), c_dim];
    let placed: BTreeSet<TermId> = terms.values().copied().collect();
    if let Some(t) = problem.constraint_space().support().difference(&placed).next() {
        return RowspaceCertificate {
            status: Status::Fail,
            dims,
            witness: c.rows().iter().find(|r| r.get(*t)).map(|r| Witness {
                kind: "missing".into(),
                terms: term_lists(problem, r),
            }),
            error: Some(format!("term {:?} is not placed", problem.terms[*t].qubits)),
        };
    }
    let witness = if let Some(r) = c.rows().iter().find(|r| !implied.in_rowspace(r).expect("width")) {
        Some(Witness {
            kind: "missing".into(),
            terms: term_lists(problem, r),
        })
    } else {
        implied
            .rows()
            .iter()
            .find(|r| !c.in_rowspace(r).expect("width"))
            .map(|r| Witness {
                kind: "spurious".into(),
                terms: term_lists(problem, r),
            })
    };
    RowspaceCertificate {
        status: if witness.is_none() { Status::Pass } else { Status::Fail },
        dims,
        witness,
        error: None,
    }
}

/// How the valid physical assignments were listed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Every assignment of every placed qubit, filtered by the plaquettes.
    Assignments,
    /// Every XOR combination of a basis of the plaquette matrix kernel.
    Kernel,
}

/// Valid physical assignments grouped by their parity-qubit pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub qubits: usize,
    pub rank: usize,
    pub method: Method,
    /// Pattern (bit `t` = term `t` has spin -1) to number of valid
    /// assignments projecting onto it.
    pub patterns: BTreeMap<u64, u64>,
    /// One valid assignment per pattern, bit `i` = qubit `doc.qubits[i]`.
    pub examples: BTreeMap<u64, BitVector>,
}

type Tally = (BTreeMap<u64, u64>, BTreeMap<u64, u64>);

/// Splits `0..1 << bits` into chunks, tallies each in parallel and merges.
fn tally(bits: usize, visit: impl Fn(u64, u64, &mut Tally) + Sync) -> Tally {
    let total: u64 = 1 << bits;
    let chunk = (total / 64).max(1 << 12);
    let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
    let parts: Vec<Tally> = starts
        .par_iter()
        .map(|&start| {
            let mut t = Tally::default();
            visit(start, (start + chunk).min(total), &mut t);
            t
        })
        .collect();
    let mut out = Tally::default();
    for (counts, examples) in parts {
        for (k, v) in counts {
            *out.0.entry(k).or_insert(0) += v;
        }
        for (k, v) in examples {
            out.1.entry(k).or_insert(v);
        }
    }
    out
}

fn record(t: &mut Tally, pattern: u64, example: u64) {
    *t.0.entry(pattern).or_insert(0) += 1;
    t.1.entry(pattern).or_insert(example);
}

impl Enumeration {
    /// Lists assignments directly when the layout has at most `limit`
    /// qubits, otherwise walks the kernel when its dimension is at most
    /// `limit`. `None` when both are too large (or `limit` exceeds
    /// [`ORACLE_LIMIT`]), the layout is malformed, or a term is unplaced.
    pub fn run(doc: &LayoutDoc, problem: &ProblemSpec, limit: usize) -> Option<Self> {
        let limit = limit.min(ORACLE_LIMIT);
        let q = doc.qubits.len();
        if problem.num_terms() > 64 {
            return None;
        }
        let p = plaquette_matrix(doc).ok()?;
        let terms = parity_terms(doc, problem).ok()?;
        if terms.len() != problem.num_terms() {
            return None;
        }
        let index: BTreeMap<QubitId, usize> = doc.qubits.iter().enumerate().map(|(i, q)| (q.id, i)).collect();
        let project: Vec<(usize, TermId)> = terms.iter().map(|(id, &t)| (index[id], t)).collect();
        let rank = p.rank();

        let (method, (patterns, examples)) = if q <= limit {
            let masks: Vec<u32> = p
                .rows()
                .iter()
                .map(|r| r.ones().fold(0u32, |m, i| m | 1 << index[&p.labels()[i]]))
                .collect();
            let found = tally(q, |start, end, t| {
                for a in start..end {
                    let a = a as u32;
                    if masks.iter().all(|m| (a & m).count_ones() % 2 == 0) {
                        let pattern = project.iter().fold(0u64, |acc, &(i, t)| acc | ((a >> i & 1) as u64) << t);
                        record(t, pattern, a as u64);
                    }
                }
            });
            let examples = found
                .1
                .into_iter()
                .map(|(k, a)| (k, BitVector::from_indices(q, (0..q).filter(|i| a >> i & 1 == 1))))
                .collect();
            (Method::Assignments, (found.0, examples))
        } else if q - rank <= limit {
            let basis = p.nullspace();
            let column = |v: &BitVector| -> Vec<usize> { v.ones().map(|c| index[&p.labels()[c]]).collect() };
            let basis: Vec<BitVector> = basis.iter().map(|v| BitVector::from_indices(q, column(v))).collect();
            let images: Vec<u64> = basis
                .iter()
                .map(|v| project.iter().fold(0u64, |acc, &(i, t)| acc | (v.get(i) as u64) << t))
                .collect();
            // Gray-code order: consecutive combinations differ in one basis vector.
            let found = tally(basis.len(), |start, end, t| {
                let gray = |a: u64| a ^ (a >> 1);
                let mut pattern = (0..images.len())
                    .filter(|j| gray(start) >> j & 1 == 1)
                    .fold(0u64, |acc, j| acc ^ images[j]);
                record(t, pattern, gray(start));
                for a in start + 1..end {
                    pattern ^= images[a.trailing_zeros() as usize];
                    record(t, pattern, gray(a));
                }
            });
            let examples = found
                .1
                .into_iter()
                .map(|(k, g)| {
                    let mut v = BitVector::zeros(q);
                    for (j, b) in basis.iter().enumerate() {
                        if g >> j & 1 == 1 {
                            v ^= b;
                        }
                    }
                    (k, v)
                })
                .collect();
            (Method::Kernel, (found.0, examples))
        } else {
            return None;
        };
        Some(Self {
            qubits: q,
            rank,
            method,
            patterns,
            examples,
        })
    }

    pub fn survivors(&self) -> u64 {
        self.patterns.values().sum()
    }
}

fn pattern_of(problem: &ProblemSpec, logical: u64) -> u64 {
    problem.parity_image(logical).ones().fold(0, |acc, t| acc | 1 << t)
}

fn logical_images(problem: &ProblemSpec) -> Option<BTreeMap<u64, u64>> {
    if problem.num_logical > ORACLE_LIMIT {
        return None;
    }
    let mut out = BTreeMap::new();
    for s in 0..1u64 << problem.num_logical {
        *out.entry(pattern_of(problem, s)).or_insert(0) += 1;
    }
    Some(out)
}

fn skipped_brute_force(qubits: usize) -> BruteForceReport {
    BruteForceReport {
        status: Status::Skipped,
        method: None,
        qubits,
        survivors: 0,
        expected_survivors: 0,
        patterns: 0,
        logical_images: 0,
        counterexample: None,
    }
}

fn describe(doc: &LayoutDoc, assignment: &BitVector) -> String {
    let ones: Vec<String> = assignment.ones().map(|i| doc.qubits[i].id.to_string()).collect();
    format!("qubits with spin -1: [{}]", ones.join(", "))
}

fn describe_logical(problem: &ProblemSpec, s: u64) -> String {
    let ones: Vec<String> = (0..problem.num_logical)
        .filter(|i| s >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect();
    format!("logical qubits with spin -1: [{}]", ones.join(", "))
}

/// Enumerates every valid assignment of the placed qubits and compares their
/// parity patterns with the images of all logical states.
pub fn brute_force_check(doc: &LayoutDoc, problem: &ProblemSpec) -> BruteForceReport {
    brute_force_report(doc, problem, Enumeration::run(doc, problem, ORACLE_LIMIT).as_ref())
}

fn brute_force_report(doc: &LayoutDoc, problem: &ProblemSpec, e: Option<&Enumeration>) -> BruteForceReport {
    let (Some(e), Some(images)) = (e, logical_images(problem)) else {
        return skipped_brute_force(doc.qubits.len());
    };
    let expected = 1u64 << (e.qubits - e.rank);
    let survivors = e.survivors();
    let mut counterexample = None;
    if let Some((pattern, _)) = e.patterns.iter().find(|(p, _)| !images.contains_key(p)) {
        counterexample = Some(format!(
            "valid physical state with no logical preimage, {}",
            describe(doc, &e.examples[pattern])
        ));
    } else if let Some(pattern) = images.keys().find(|p| !e.patterns.contains_key(p)) {
        let s = (0..1u64 << problem.num_logical)
            .find(|&s| pattern_of(problem, s) == *pattern)
            .expect("image has a preimage");
        counterexample = Some(format!("logical state not representable, {}", describe_logical(problem, s)));
    } else if survivors != expected {
        counterexample = Some(format!("{survivors} valid assignments, expected {expected}"));
    }
    BruteForceReport {
        status: if counterexample.is_none() { Status::Pass } else { Status::Fail },
        method: Some(e.method),
        qubits: e.qubits,
        survivors,
        expected_survivors: expected,
        patterns: e.patterns.len(),
        logical_images: images.len(),
        counterexample,
    }
}

fn physical_energy(problem: &ProblemSpec, pattern: u64) -> f64 {
    let mut e = 0.0;
    for (t, term) in problem.terms.iter().enumerate() {
        e += term.coeff * spin(pattern >> t);
    }
    e
}

/// Compares the energy spectrum over valid physical states with the logical
/// spectrum, allowing for the uniform degeneracy of each side.
pub fn energy_equivalence_check(doc: &LayoutDoc, problem: &ProblemSpec) -> EnergyReport {
    energy_report(problem, Enumeration::run(doc, problem, ORACLE_LIMIT).as_ref())
}

fn energy_report(problem: &ProblemSpec, e: Option<&Enumeration>) -> EnergyReport {
    let skipped = EnergyReport {
        status: Status::Skipped,
        physical_min: None,
        logical_min: None,
        distinct_levels: 0,
        counterexample: None,
    };
    let Some(e) = e else { return skipped };
    if problem.num_logical > ORACLE_LIMIT {
        return skipped;
    }
    let mut physical: BTreeMap<u64, u128> = BTreeMap::new();
    for (&pattern, &count) in &e.patterns {
        *physical.entry(physical_energy(problem, pattern).to_bits()).or_insert(0) += count as u128;
    }
    let mut logical: BTreeMap<u64, u128> = BTreeMap::new();
    for s in 0..1u64 << problem.num_logical {
        *logical.entry(problem.logical_energy(s).to_bits()).or_insert(0) += 1;
    }
    let rank = problem.logical_rank();
    // Every logical image is reached by 2^(N - rank) logical states and, if
    // the layout is sound, by survivors / 2^rank physical states.
    let mult_log = 1u128 << (problem.num_logical - rank);
    let mult_phys = e.survivors() as u128 >> rank;
    let min = |m: &BTreeMap<u64, u128>| m.keys().map(|&b| f64::from_bits(b)).min_by(f64::total_cmp);
    let (physical_min, logical_min) = (min(&physical), min(&logical));
    let levels: BTreeSet<u64> = physical.keys().chain(logical.keys()).copied().collect();
    let mut counterexample = None;
    if physical_min.map(f64::to_bits) != logical_min.map(f64::to_bits) {
        counterexample = Some(format!("ground energies differ: {physical_min:?} vs {logical_min:?}"));
    } else if let Some(level) = levels.iter().find(|l| {
        let p = physical.get(l).copied().unwrap_or(0);
        let q = logical.get(l).copied().unwrap_or(0);
        p * mult_log != q * mult_phys
    }) {
        counterexample = Some(format!(
            "energy {} has {} physical and {} logical states",
            f64::from_bits(*level),
            physical.get(level).copied().unwrap_or(0),
            logical.get(level).copied().unwrap_or(0)
        ));
    }
    EnergyReport {
        status: if counterexample.is_none() { Status::Pass } else { Status::Fail },
        physical_min,
        logical_min,
        distinct_levels: levels.len(),
        counterexample,
    }
}

fn contiguous(values: &[i64]) -> bool {
    values.windows(2).all(|w| w[1] == w[0] + 1)
}

/// Itemized geometric violations; empty when the layout is well formed.
pub fn geometry_check(doc: &LayoutDoc, problem: &ProblemSpec) -> Vec<String> {
    let mut out = Vec::new();
    let mut by_pos: BTreeMap<Position, QubitId> = BTreeMap::new();
    let mut ids = BTreeSet::new();
    for q in &doc.qubits {
        let pos = Position::new(q.col, q.row);
        if q.col < 0 || q.row < 0 {
            out.push(format!("qubit {} at negative position {pos}", q.id));
        }
        if !ids.insert(q.id) {
            out.push(format!("duplicate qubit id {}", q.id));
        }
        if let Some(other) = by_pos.insert(pos, q.id) {
            out.push(format!("qubits {other} and {} share position {pos}", q.id));
        }
    }
    let mut cells = BTreeSet::new();
    for p in &doc.plaquettes {
        let cell = p.cell();
        if !cells.insert(cell) {
            out.push(format!("two plaquettes on cell {cell}"));
        }
        let shape = match p.shape() {
            Ok(s) => s,
            Err(e) => {
                out.push(e.to_string());
                continue;
            }
        };
        if shape == Shape::TriMissingLL {
            out.push(format!("forbidden triangle orientation at cell {cell}"));
        }
        for corner in shape.corner_positions(cell) {
            if !by_pos.contains_key(&corner) {
                out.push(format!("plaquette at cell {cell} has no qubit at corner {corner}"));
            }
        }
        if let Err(e) = p.group() {
            out.push(e.to_string());
        }
    }
    for pin in &doc.pins {
        let fixed = doc.qubits.iter().any(|q| q.id == *pin && q.kind == KindDoc::Fixed);
        if !fixed {
            out.push(format!("pin {pin} is not a fixed ancilla"));
        }
    }
    for q in doc.qubits.iter().filter(|q| q.kind == KindDoc::Fixed) {
        if !doc.pins.contains(&q.id) {
            out.push(format!("fixed ancilla {} is not pinned", q.id));
        }
    }
    let mut rows: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    let mut cols: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for pos in by_pos.keys() {
        rows.entry(pos.row).or_default().push(pos.col);
        cols.entry(pos.col).or_default().push(pos.row);
    }
    for (r, cs) in &mut rows {
        cs.sort_unstable();
        if !contiguous(cs) {
            out.push(format!("row {r} has a gap"));
        }
    }
    for (c, rs) in &mut cols {
        rs.sort_unstable();
        if !contiguous(rs) {
            out.push(format!("column {c} has a gap"));
        }
    }
    let term_pos: BTreeMap<Vec<u32>, Position> = doc
        .qubits
        .iter()
        .filter_map(|q| q.term.clone().map(|t| (t, Position::new(q.col, q.row))))
        .collect();
    for (i, sc) in problem.side_conditions.iter().enumerate() {
        let mut columns = Vec::new();
        for &t in &sc.terms {
            match term_pos.get(&problem.terms[t].qubits) {
                Some(pos) if pos.row == 0 => columns.push(pos.col),
                Some(pos) => out.push(format!("side condition {i}: term {} at {pos} is not on row 0", problem.terms[t].label())),
                None => out.push(format!("side condition {i}: term {} is not placed", problem.terms[t].label())),
            }
        }
        columns.sort_unstable();
        if !contiguous(&columns) {
            out.push(format!("side condition {i} is not contiguous on row 0"));
        }
    }
    out
}
