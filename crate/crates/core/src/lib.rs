//! p-modulus of families of objects on finite weighted graphs.
//!
//! Given a graph G = (V, E, σ) and a family Γ with usage matrix N, the
//! p-modulus is
//!
//! ```text
//! Mod_{p,σ}(Γ) = min { Σ_e σ(e) ρ(e)^p : ρ ≥ 0, Nρ ≥ 1 }.
//! ```
//!
//! The crate computes it for connecting paths, cuts, spanning trees and
//! explicit families, along with its blocking dual, the optimal pmf on Γ,
//! the δ_p family of graph metrics, weight sensitivity, and Monte Carlo
//! bounds for random weights.

pub mod duality;
pub mod error;
pub mod family;
pub mod fixtures;
pub mod graph;
pub mod metrics;
pub mod sensitivity;
pub mod solver;
pub mod stochastic;
pub mod verify;

pub use error::{Error, Result};
pub use family::{Family, FamilyKind, UsageRow};
pub use graph::{Density, DensityRole, Graph};
pub use solver::{ModulusProblem, ModulusSolution, SolverOptions};

/// Library version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
