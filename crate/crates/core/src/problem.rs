//! Input problems and the cyclic constraint space they induce.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Index of a term in [`ProblemSpec::terms`]; also the parity-qubit column.
pub type TermId = usize;

/// A k-body interaction: a non-empty set of 1-based logical qubit indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub qubits: Vec<u32>,
    pub coeff: f64,
}

impl Term {
    /// Digits joined directly (`123`) when every index is a single digit,
    /// otherwise joined with dots (`3.10`).
    pub fn label(&self) -> String {
        let sep = if self.qubits.iter().all(|&q| q < 10) { "" } else { "." };
        self.qubits
            .iter()
            .map(|q| q.to_string())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideCondition {
    pub terms: Vec<TermId>,
    pub coeffs: Vec<f64>,
    pub values: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub num_logical: usize,
    pub terms: Vec<Term>,
    pub side_conditions: Vec<SideCondition>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TermFile {
    qubits: Vec<i64>,
    #[serde(default)]
    coeff: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SideConditionFile {
    terms: Vec<Vec<i64>>,
    #[serde(default)]
    coeffs: Vec<f64>,
    #[serde(default)]
    values: Vec<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProblemFile {
    num_logical: i64,
    #[serde(default)]
    terms: Vec<TermFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    side_conditions: Vec<SideConditionFile>,
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn validate_qubits(raw: &[i64], n: usize, location: &str) -> Result<Vec<u32>> {
    if raw.is_empty() {
        return Err(parse_err(location, "empty term"));
    }
    let mut seen = BTreeSet::new();
    for &q in raw {
        if q < 1 || q as usize > n {
            return Err(parse_err(location, format!("qubit index {q} out of range [1, {n}]")));
        }
        if !seen.insert(q as u32) {
            return Err(parse_err(location, format!("duplicate index {q} inside a term")));
        }
    }
    Ok(seen.into_iter().collect())
}

impl ProblemSpec {
    pub fn new(num_logical: usize, terms: Vec<Term>) -> Result<Self> {
        let spec = Self {
            num_logical,
            terms,
            side_conditions: Vec::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a problem from qubit sets with unit coefficients.
    pub fn from_sets(num_logical: usize, sets: &[&[u32]]) -> Result<Self> {
        let terms = sets
            .iter()
            .map(|s| {
                let mut qubits = s.to_vec();
                qubits.sort_unstable();
                Term { qubits, coeff: 1.0 }
            })
            .collect();
        Self::new(num_logical, terms)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (i, t) in self.terms.iter().enumerate() {
            let loc = format!("terms[{i}]");
            let raw: Vec<i64> = t.qubits.iter().map(|&q| q as i64).collect();
            let norm = validate_qubits(&raw, self.num_logical, &loc)?;
            if norm != t.qubits {
                return Err(parse_err(loc, "term qubits must be sorted"));
            }
            if !seen.insert(norm) {
                return Err(parse_err(loc, "duplicate term"));
            }
        }
        for (i, sc) in self.side_conditions.iter().enumerate() {
            let loc = format!("side_conditions[{i}]");
            if sc.terms.is_empty() {
                return Err(parse_err(loc, "side condition without terms"));
            }
            if sc.coeffs.len() != sc.terms.len() {
                return Err(parse_err(loc, "coeffs and terms differ in length"));
            }
            if let Some(&t) = sc.terms.iter().find(|&&t| t >= self.terms.len()) {
                return Err(parse_err(loc, format!("unknown term {t}")));
            }
        }
        Ok(())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn term_index(&self, qubits: &[u32]) -> Option<TermId> {
        self.terms.iter().position(|t| t.qubits == qubits)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text)
            .map_err(|e| parse_err(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
        if file.num_logical < 0 {
            return Err(parse_err("num_logical", "must be non-negative"));
        }
        let n = file.num_logical as usize;
        let mut terms: Vec<Term> = Vec::with_capacity(file.terms.len());
        let mut index: BTreeMap<Vec<u32>, TermId> = BTreeMap::new();
        for (i, t) in file.terms.iter().enumerate() {
            let loc = format!("terms[{i}]");
            let qubits = validate_qubits(&t.qubits, n, &loc)?;
            if index.contains_key(&qubits) {
                return Err(parse_err(loc, "duplicate term"));
            }
            index.insert(qubits.clone(), terms.len());
            terms.push(Term { qubits, coeff: t.coeff });
        }
        let mut side_conditions = Vec::new();
        for (i, sc) in file.side_conditions.iter().enumerate() {
            let loc = format!("side_conditions[{i}]");
            if sc.terms.is_empty() {
                return Err(parse_err(loc, "side condition without terms"));
            }
            let coeffs = if sc.coeffs.is_empty() {
                vec![1.0; sc.terms.len()]
            } else if sc.coeffs.len() == sc.terms.len() {
                sc.coeffs.clone()
            } else {
                return Err(parse_err(loc, "coeffs and terms differ in length"));
            };
            let mut ids = Vec::with_capacity(sc.terms.len());
            for (j, raw) in sc.terms.iter().enumerate() {
                let qubits = validate_qubits(raw, n, &format!("{loc}.terms[{j}]"))?;
                let id = *index.entry(qubits.clone()).or_insert_with(|| {
                    terms.push(Term { qubits, coeff: 0.0 });
                    terms.len() - 1
                });
                if ids.contains(&id) {
                    return Err(parse_err(format!("{loc}.terms[{j}]"), "term repeated in side condition"));
                }
                ids.push(id);
            }
            side_conditions.push(SideCondition {
                terms: ids,
                coeffs,
                values: sc.values.clone(),
            });
        }
        Ok(Self {
            num_logical: n,
            terms,
            side_conditions,
        })
    }

    pub fn to_json(&self) -> String {
        let file = ProblemFile {
            num_logical: self.num_logical as i64,
            terms: self
                .terms
                .iter()
                .map(|t| TermFile {
                    qubits: t.qubits.iter().map(|&q| q as i64).collect(),
                    coeff: t.coeff,
                })
                .collect(),
            side_conditions: self
                .side_conditions
                .iter()
                .map(|sc| SideConditionFile {
                    terms: sc
                        .terms
                        .iter()
                        .map(|&t| self.terms[t].qubits.iter().map(|&q| q as i64).collect())
                        .collect(),
                    coeffs: sc.coeffs.clone(),
                    values: sc.values.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("problem serializes")
    }

    /// The matrix with one row per term: ones on the term's logical qubits
    /// (columns `0..N`) and on its own parity column (`N + term`).
    pub fn interaction_matrix(&self) -> BitMatrix {
        let n = self.num_logical;
        let width = n + self.terms.len();
        let mut m = BitMatrix::with_width(width);
        for (k, t) in self.terms.iter().enumerate() {
            let row = BitVector::from_indices(width, t.qubits.iter().map(|&q| q as usize - 1).chain([n + k]));
            m.push_row(row).expect("row width matches");
        }
        m
    }

    /// Rows of the interaction matrix restricted to the logical columns.
    pub fn logical_block(&self) -> BitMatrix {
        let n = self.num_logical;
        let mut m = BitMatrix::with_width(n);
        for t in &self.terms {
            m.push_row(BitVector::from_indices(n, t.qubits.iter().map(|&q| q as usize - 1)))
                .expect("row width matches");
        }
        m
    }

    pub fn logical_rank(&self) -> usize {
        self.logical_block().rank()
    }

    pub fn constraint_space(&self) -> ConstraintSpace {
        let n = self.num_logical;
        let b = self.interaction_matrix();
        let logical: BTreeSet<usize> = (0..n).collect();
        let parity = b.eliminate_columns(&logical).expect("logical labels exist");
        let rows = parity.rows().to_vec();
        let basis = BitMatrix::from_rows((0..self.terms.len()).collect(), rows).expect("parity width");
        let order: Vec<usize> = (0..self.terms.len()).collect();
        ConstraintSpace {
            basis: basis.rref(&order),
        }
    }

    /// Logical energy `H(s)` for spins `s_i = 1 - 2 * bit_i`, summed in term order.
    pub fn logical_energy(&self, logical_bits: u64) -> f64 {
        let mut e = 0.0;
        for t in &self.terms {
            let parity = t
                .qubits
                .iter()
                .fold(0u64, |acc, &q| acc ^ (logical_bits >> (q - 1) & 1));
            e += t.coeff * spin(parity);
        }
        e
    }

    /// Parity-qubit bit pattern (bit `k` set iff term `k` has spin -1).
    pub fn parity_image(&self, logical_bits: u64) -> BitVector {
        BitVector::from_indices(
            self.terms.len(),
            self.terms.iter().enumerate().filter_map(|(k, t)| {
                let p = t.qubits.iter().fold(0u64, |acc, &q| acc ^ (logical_bits >> (q - 1) & 1));
                (p == 1).then_some(k)
            }),
        )
    }
}

/// Spin value of a bit: 0 -> +1, 1 -> -1.
pub fn spin(bit: u64) -> f64 {
    if bit & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSpace {
    /// Reduced basis over term columns `0..K`.
    pub basis: BitMatrix,
}

impl ConstraintSpace {
    pub fn dimension(&self) -> usize {
        self.basis.nrows()
    }

    /// Terms that appear in at least one constraint.
    pub fn support(&self) -> BTreeSet<TermId> {
        self.basis.rows().iter().flat_map(|r| r.ones()).collect()
    }
}

/// Random problem with `n` logical qubits and `k` distinct terms of size at
/// most `max_size`, coefficients drawn from `[-1, 1]`.
pub fn random_problem_with(rng: &mut impl Rng, n: usize, k: usize, max_size: usize) -> ProblemSpec {
    let universe: Vec<u32> = (1..=n as u32).collect();
    let mut seen = BTreeSet::new();
    let mut terms = Vec::new();
    let max_size = max_size.min(n).max(1);
    let capacity: usize = (1..=max_size).map(|s| binomial(n, s)).sum();
    let k = k.min(capacity);
    while terms.len() < k {
        let size = rng.gen_range(1..=max_size);
        let mut qubits: Vec<u32> = universe.choose_multiple(rng, size).copied().collect();
        qubits.sort_unstable();
        if seen.insert(qubits.clone()) {
            let coeff = (rng.gen_range(-8i32..=8) as f64) / 8.0;
            terms.push(Term { qubits, coeff });
        }
    }
    ProblemSpec {
        num_logical: n,
        terms,
        side_conditions: Vec::new(),
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// The random-suite instance for `seed`: N in [3, 8], K in [N, 2N + 4],
/// terms of at most four qubits.
pub fn random_problem(seed: u64) -> ProblemSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=8);
    let k = rng.gen_range(n..=2 * n + 4);
    random_problem_with(&mut rng, n, k, 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE: &str = r#"{"num_logical": 4, "terms": [
        {"qubits": [4], "coeff": 1.0},
        {"qubits": [1, 2], "coeff": 1.0},
        {"qubits": [1, 3], "coeff": 1.0},
        {"qubits": [1, 4], "coeff": 1.0},
        {"qubits": [2, 3], "coeff": 1.0},
        {"qubits": [3, 4], "coeff": 1.0},
        {"qubits": [1, 2, 3], "coeff": 1.0}]}"#;

    #[test]
    fn parses_worked_example() {
        let p = ProblemSpec::parse(EXAMPLE).unwrap();
        assert_eq!(p.num_logical, 4);
        assert_eq!(p.num_terms(), 7);
        assert_eq!(p.terms[6].label(), "123");
    }

    #[test]
    fn empty_problem_is_valid() {
        let p = ProblemSpec::parse(r#"{"num_logical": 3, "terms": []}"#).unwrap();
        assert_eq!(p.num_terms(), 0);
        assert_eq!(p.constraint_space().dimension(), 0);
    }

    #[test]
    fn rejects_bad_terms() {
        let err = ProblemSpec::parse(r#"{"num_logical": 3, "terms": [{"qubits": [1, 1, 2]}]}"#).unwrap_err();
        assert!(matches!(&err, Error::Parse { location, message } if location == "terms[0]" && message.contains("duplicate index")));
        let err = ProblemSpec::parse(r#"{"num_logical": 3, "terms": [{"qubits": [4]}]}"#).unwrap_err();
        assert!(err.to_string().contains("out of range"));
        let err = ProblemSpec::parse(r#"{"num_logical": 3, "terms": [{"qubits": []}]}"#).unwrap_err();
        assert!(err.to_string().contains("empty term"));
        let err = ProblemSpec::parse(r#"{"num_logical": 3, "terms": [{"qubits": [1,2]}, {"qubits": [2,1]}]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { ref location, .. } if location == "terms[1]"));
        let err = ProblemSpec::parse("{\"num_logical\": 3,\n \"terms\": [}").unwrap_err();
        assert!(matches!(err, Error::Parse { ref location, .. } if location.starts_with("line 2")));
    }

    #[test]
    fn side_condition_terms_are_appended() {
        let p = ProblemSpec::parse(
            r#"{"num_logical": 4, "terms": [{"qubits": [1,2], "coeff": 0.5}],
                "side_conditions": [{"terms": [[1,2],[2,3,4]], "coeffs": [1,1], "values": [-2,0,-2]}]}"#,
        )
        .unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.terms[1].qubits, vec![2, 3, 4]);
        assert_eq!(p.terms[1].coeff, 0.0);
        assert_eq!(p.side_conditions[0].terms, vec![0, 1]);
        assert_eq!(p.side_conditions[0].values, vec![-2, 0, -2]);
        let back = ProblemSpec::parse(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn interaction_matrix_of_single_term() {
        let p = ProblemSpec::from_sets(1, &[&[1]]).unwrap();
        let m = p.interaction_matrix();
        assert_eq!(m.ncols(), 2);
        assert_eq!(m.rows()[0], BitVector::from_indices(2, [0, 1]));
    }

    #[test]
    fn disjoint_single_qubit_terms_are_independent() {
        let p = ProblemSpec::from_sets(4, &[&[1], &[2], &[3], &[4]]).unwrap();
        let m = p.interaction_matrix();
        assert_eq!(m.rank(), 4);
        for (k, row) in m.rows().iter().enumerate() {
            assert_eq!(row.ones().collect::<Vec<_>>(), vec![k, 4 + k]);
        }
        assert_eq!(p.constraint_space().dimension(), 0);
    }

    #[test]
    fn hypertree_has_no_constraints() {
        let p = ProblemSpec::from_sets(5, &[&[1, 2], &[2, 3, 4], &[4, 5], &[1]]).unwrap();
        assert_eq!(p.constraint_space().dimension(), 0);
    }

    #[test]
    fn random_constraints_are_cycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = random_problem_with(&mut rng, 5, 12, 4);
        let c = p.constraint_space();
        assert_eq!(c.dimension(), 12 - p.logical_rank());
        for row in c.basis.rows() {
            let mut counts = [0u32; 5];
            for t in row.ones() {
                for &q in &p.terms[t].qubits {
                    counts[q as usize - 1] += 1;
                }
            }
            assert!(counts.iter().all(|c| c % 2 == 0), "{counts:?}");
        }
    }
}
