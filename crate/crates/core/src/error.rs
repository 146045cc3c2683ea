use thiserror::Error;

use crate::drawing::Violation;
use crate::graph::VertexId;
use crate::planar::EquivalenceReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("polygon is self-intersecting")]
    SelfIntersecting,
    #[error("triangle is degenerate")]
    DegenerateTriangle,
    #[error("cannot parse number `{0}`")]
    BadNumber(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(VertexId),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(VertexId),
    #[error("invalid edge ({0}, {1}): {2}")]
    InvalidEdge(VertexId, VertexId, &'static str),
    #[error("vertex `{0}` has no position")]
    MissingPosition(VertexId),
    #[error("drawing is invalid: {}", fmt_violations(.0))]
    InvalidDrawing(Vec<Violation>),
    #[error("the two drawings are of different graphs")]
    GraphMismatch,
    #[error("drawings are not topologically equivalent: {0}")]
    NotEquivalent(Box<EquivalenceReport>),
    #[error("edge ({0}, {1}) is crossed more than once")]
    MultiplyCrossed(VertexId, VertexId),
    #[error("drawing is not kite-planar: {0}")]
    NotKitePlanar(String),
    #[error("kite completion breaks equivalence of the pair: {0}")]
    AugmentationIncompatible(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
    #[error("input drawing is not strictly convex: {0}")]
    InputNotConvex(String),
    #[error("convexity certification failed: {0}")]
    ConvexityCertification(String),
    #[error("linear system is singular")]
    SingularSystem,
    #[error("time {0} is outside [0, 1]")]
    TimeOutOfRange(f64),
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
