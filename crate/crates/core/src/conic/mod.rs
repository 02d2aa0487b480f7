//! Dense conic optimisation: program representation, interior-point solver
//! and a modelling layer for Hermitian-matrix programs.

mod embed;
mod model;
mod program;
mod solver;

pub use embed::hermitian_embed;
pub use model::{EqId, HermEqId, HermExpr, IneqId, LinExpr, LmiId, Model, ModelSolution};
pub use program::{set_dump_sink, Cone, ConicProgram, LinearRow, PsdBlock};
pub use solver::{solve, ConicSolution, SolveOptions, SolveStatus};
