use core::fmt;

use crate::graph::VertexId;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    VertexOutOfRange {
        vertex: VertexId,
        n: usize,
    },
    EmptyEgoNetwork {
        center: VertexId,
    },
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// A generator could not satisfy its constraints.
    Infeasible(&'static str),
    TooFewSizes(usize),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::VertexOutOfRange { vertex, n } => {
                write!(f, "vertex {vertex} out of range for graph with {n} vertices")
            }
            Error::EmptyEgoNetwork { center } => {
                write!(f, "ego network of vertex {center} has no edges")
            }
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::Infeasible(what) => write!(f, "infeasible generator parameters: {what}"),
            Error::TooFewSizes(k) => {
                write!(f, "timing fit needs at least 3 sizes spanning a decade, got {k}")
            }
        }
    }
}

impl core::error::Error for Error {}
