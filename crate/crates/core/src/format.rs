//! Layout files.
//!
//! Qubits are listed by ascending id, plaquettes in placement order and pins
//! ascending, so equal layouts always serialize to equal bytes. Parity qubits
//! carry their term as a list of logical indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{Group, Layout, Position, QubitId, QubitKind, Shape};
use crate::problem::ProblemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindDoc {
    Parity,
    Ancilla,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitDoc {
    pub id: QubitId,
    pub col: i64,
    pub row: i64,
    pub kind: KindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupDoc {
    Id(usize),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaquetteDoc {
    pub cell: [i64; 2],
    pub shape: String,
    pub group: GroupDoc,
}

impl PlaquetteDoc {
    pub fn cell(&self) -> Position {
        Position::new(self.cell[0], self.cell[1])
    }

    pub fn shape(&self) -> Result<Shape> {
        Shape::from_name(&self.shape).ok_or_else(|| Error::Parse {
            location: format!("plaquette at {}", self.cell()),
            message: format!("unknown shape {:?}", self.shape),
        })
    }

    pub fn group(&self) -> Result<Group> {
        match &self.group {
            GroupDoc::Id(g) => Ok(Group::Constraint(*g)),
            GroupDoc::Name(n) if n == "filler" => Ok(Group::Filler),
            GroupDoc::Name(n) => Err(Error::Parse {
                location: format!("plaquette at {}", self.cell()),
                message: format!("unknown group {n:?}"),
            }),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutDoc {
    pub qubits: Vec<QubitDoc>,
    pub plaquettes: Vec<PlaquetteDoc>,
    #[serde(default)]
    pub pins: Vec<QubitId>,
}

impl LayoutDoc {
    pub fn from_layout(layout: &Layout, problem: &ProblemSpec) -> Self {
        let qubits = layout
            .qubits()
            .map(|q| {
                let (kind, term) = match q.kind {
                    QubitKind::Parity(t) => (KindDoc::Parity, Some(problem.terms[t].qubits.clone())),
                    QubitKind::FreeAncilla => (KindDoc::Ancilla, None),
                    QubitKind::FixedAncilla => (KindDoc::Fixed, None),
                };
                QubitDoc {
                    id: q.id,
                    col: q.pos.col,
                    row: q.pos.row,
                    kind,
                    term,
                }
            })
            .collect();
        let plaquettes = layout
            .plaquettes()
            .iter()
            .map(|p| PlaquetteDoc {
                cell: [p.cell.col, p.cell.row],
                shape: p.shape.name().to_string(),
                group: match p.group {
                    Group::Constraint(g) => GroupDoc::Id(g),
                    Group::Filler => GroupDoc::Name("filler".into()),
                },
            })
            .collect();
        let mut pins = layout.pins().to_vec();
        pins.sort_unstable();
        Self {
            qubits,
            plaquettes,
            pins,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut doc: LayoutDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        doc.qubits.sort_by_key(|q| q.id);
        for q in &doc.qubits {
            if (q.kind == KindDoc::Parity) != q.term.is_some() {
                return Err(Error::Parse {
                    location: format!("qubit {}", q.id),
                    message: "parity qubits and only parity qubits carry a term".into(),
                });
            }
        }
        Ok(doc)
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("layout serializes");
        s.push('\n');
        s
    }

    pub fn position(&self, id: QubitId) -> Option<Position> {
        self.qubits
            .binary_search_by_key(&id, |q| q.id)
            .ok()
            .map(|i| Position::new(self.qubits[i].col, self.qubits[i].row))
    }

    /// Rebuilds a layout, resolving terms against `problem`. Fails on any
    /// geometric violation, so use the verifier to diagnose bad files.
    pub fn to_layout(&self, problem: &ProblemSpec) -> Result<Layout> {
        let mut layout = Layout::new();
        for q in &self.qubits {
            let kind = match q.kind {
                KindDoc::Parity => {
                    let qubits = q.term.as_deref().unwrap_or_default();
                    let t = problem.term_index(qubits).ok_or_else(|| Error::Parse {
                        location: format!("qubit {}", q.id),
                        message: format!("term {qubits:?} is not in the problem"),
                    })?;
                    QubitKind::Parity(t)
                }
                KindDoc::Ancilla => QubitKind::FreeAncilla,
                KindDoc::Fixed => QubitKind::FixedAncilla,
            };
            layout.add_qubit_with_id(q.id, Position::new(q.col, q.row), kind)?;
        }
        for p in &self.plaquettes {
            layout.add_plaquette(p.cell(), p.shape()?, p.group()?)?;
        }
        let mut pins = layout.pins().to_vec();
        pins.sort_unstable();
        if pins != self.pins {
            return Err(Error::Parse {
                location: "pins".into(),
                message: "pins must list exactly the fixed ancillas".into(),
            });
        }
        Ok(layout)
    }
}
