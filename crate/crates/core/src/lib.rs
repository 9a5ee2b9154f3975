//! Operators on finite weighted networks and their metric graphs: the
//! transition operator `P`, the Kirchhoff Laplacian `L`, the unit-ball
//! averaging operator `A` and the d'Alembert operators `C(tau)`, together with
//! numerical checks of the identities relating them.

pub mod averaging;
pub mod continuous;
pub mod discrete;
pub mod edge_function;
pub mod error;
pub mod network;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod verify;
pub mod wave;

pub use error::{Error, Result};
pub use network::{DirEdge, Edge, Network, StructureReport};
