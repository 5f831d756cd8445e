//! Constructive compilation of higher-order binary optimization problems to
//! plaquette layouts for the parity architecture.
//!
//! The compiler grows a rectangle of qubits one layer at a time. Every
//! interior qubit stays expressible as a product of qubits on the upper-right
//! boundary, so each new constraint can be rewritten in terms of boundary
//! qubits and realized by a strip of plaquettes along the outside edge.

pub mod boundary;
pub mod compiler;
pub mod decompose;
pub mod error;
pub mod format;
pub mod gf2;
pub mod layout;
pub mod problem;
pub mod verify;


pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use layout::{Group, Layout, Plaquette, Position, QubitId, QubitKind, Shape};
pub use compiler::{compile, CompiledLayout, CompilerConfig, Strategy};
pub use format::LayoutDoc;
pub use problem::{ProblemSpec, Term, TermId};
pub use verify::{verify, Report, VerifyOptions};
