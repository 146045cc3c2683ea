//! Morphing between topologically equivalent kite-planar 1-planar
//! straight-line drawings.

pub mod compat;
pub mod convex;
pub mod drawing;
pub mod error;
pub mod geom;
pub mod graph;
pub mod kite;
pub mod pipeline;
pub mod planar;

pub use drawing::{validate_drawing, Drawing, Frame, Violation};
pub use error::{Error, GeomError, Result};
pub use geom::{ApproxPoint, Point, Rational};
pub use graph::{Edge, Graph, VertexId};
pub use planar::{planarize, topologically_equivalent, CellComplex, EquivalenceReport, Mismatch, Node};
