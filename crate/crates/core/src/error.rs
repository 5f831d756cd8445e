use thiserror::Error;

use crate::layout::Position;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector length {found} does not match matrix width {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("matrices have different column labels")]
    LabelMismatch,
    #[error("unknown column label {0}")]
    UnknownLabel(usize),
    #[error("duplicate column label {0}")]
    DuplicateLabel(usize),

    #[error("{location}: {message}")]
    Parse { location: String, message: String },

    #[error("position {0} is already occupied")]
    Occupied(Position),
    #[error("forbidden plaquette orientation at cell {0}")]
    ForbiddenOrientation(Position),
    #[error("plaquette at cell {cell} is missing its corner qubit at {corner}")]
    MissingCorner { cell: Position, corner: Position },
    #[error("cell {0} already carries a plaquette")]
    CellCollision(Position),
    #[error("unknown qubit id {0}")]
    UnknownQubit(usize),

    #[error("interior qubit {0} cannot be expressed through boundary qubits")]
    UnreachableInterior(usize),

    #[error("cannot decompose constraint: {0}")]
    Decompose(String),

    #[error("layer budget of {0} exceeded")]
    LayerBudget(usize),
    #[error("unsatisfiable side-condition placement: {0}")]
    SideConditionPlacement(String),
    #[error("invalid compiler configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
