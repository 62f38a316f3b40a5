use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("D = {0} is not a square-free integer greater than one")]
    InvalidField(u32),
    #[error("scalars from different quadratic fields in one surface")]
    MixedFields,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cell {cell} is degenerate: {reason}")]
    DegeneratePolygon { cell: usize, reason: String },
    #[error("edge ({cell},{edge}) and its partner have different lengths")]
    EdgeLengthMismatch { cell: usize, edge: usize },
    #[error("gluing of edge ({cell},{edge}) is not allowed for a {kind} surface")]
    GluingDirection { cell: usize, edge: usize, kind: &'static str },
    #[error("gluings do not form a perfect matching: {0}")]
    Matching(String),
    #[error("vertex class {class} has cone angle {multiple}π, not allowed for a {kind} surface")]
    ConeAngle { class: usize, multiple: i64, kind: &'static str },
    #[error("marking '{0}' does not lie in its cell")]
    Marking(String),
    #[error("wrong surface kind: {0}")]
    WrongKind(String),
    #[error("the orientation double cover is disconnected (the differential is a global square)")]
    DisconnectedCover,
    #[error("ramification points must be distinct")]
    CoincidentRamification,
    #[error("invalid cut path: {0}")]
    CutPath(String),
    #[error("expected a set of two boundary poles, got {0}")]
    PoleSetSize(usize),
    #[error("surface carries no covering data")]
    NoCovering,
    #[error("unknown point '{0}'")]
    UnknownPoint(String),
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("cylinder does not belong to the base surface")]
    ForeignCylinder,
}

pub type Result<T> = std::result::Result<T, Error>;
