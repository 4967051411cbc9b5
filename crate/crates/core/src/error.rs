use thiserror::Error;

use crate::grid::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("period {px}x{py} is out of range (1..={max})", max = crate::code::MAX_PERIOD)]
    BadPeriod { px: u32, py: u32 },
    #[error("hex codes need even periods, got {px}x{py}")]
    OddHexPeriod { px: u32, py: u32 },
    #[error("offset {0} lies outside the fundamental domain")]
    OffsetOutOfDomain(Vertex),
    #[error("offset {0} listed twice")]
    DuplicateOffset(Vertex),
    #[error("a code needs at least one codeword")]
    Empty,
    #[error("shift by {0} is not a symmetry of the grid")]
    BadShift(Vertex),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairsError {
    #[error("{0} is not a codeword")]
    NotACodeword(Vertex),
    #[error("codeword types are defined on the square grid only")]
    NotSquare,
    #[error("right angles of witnesses need the square grid with r = 2")]
    NotSquareRadiusTwo,
    #[error("period {px}x{py} is too small for a simple quotient graph (need at least {need})")]
    PeriodTooSmall { px: u32, py: u32, need: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalError {
    #[error("{0} is outside the window")]
    OutsideWindow(Vertex),
    #[error("the centre must stay a codeword")]
    CenterNotCodeword,
    #[error("fixed cells admit no completion satisfying the local laws")]
    Inconsistent,
    #[error("window has {cells} cells; at most {max} are supported")]
    WindowTooLarge { cells: usize, max: usize },
    #[error("{free} free cells exceed the enumeration guard of {max}")]
    SizeGuard { free: usize, max: usize },
    #[error("reduced radius {reduced} exceeds the window radius {window}")]
    ReducedRadius { reduced: u32, window: u32 },
    #[error("unknown statement `{0}`")]
    UnknownStatement(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DischargeError {
    #[error("degree-8 vertex {0} has neither a P1 nor a P2 neighbourhood")]
    NoPattern(Vertex),
    #[error("vertex {vertex} has degree {degree} > 8")]
    DegreeTooLarge { vertex: Vertex, degree: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorusError {
    #[error("hex tori need an even side, got {0}")]
    OddHexSide(u32),
    #[error("torus side {0} is out of range")]
    BadSide(u32),
    #[error("torus side {0} exceeds the supported maximum")]
    TooLarge(usize),
}
