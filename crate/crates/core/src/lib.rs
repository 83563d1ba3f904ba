//! Sorting diagrams of Kontsevich–Soibelman operators on covering Kronecker
//! quivers, the tropical curves they encode, and framed Euler characteristics.

pub mod algebra;
pub mod error;
pub mod euler;
pub mod quiver;
pub mod sorting;
pub mod tropical;
pub mod verify;

pub use error::{AssumptionViolation, Error, Result};
pub use quiver::{DimVec, Quiver, Slope};
