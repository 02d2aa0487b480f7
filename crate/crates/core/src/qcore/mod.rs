//! Dense linear algebra and the quantum objects everything else is built from.

pub mod io;
pub mod linalg;
pub mod objects;
mod operators;
pub mod random;

pub use linalg::{CMat, CVec};
pub use objects::standard_objects;
pub use operators::{
    apply_channel, fidelity, kron, link_product, partial_trace, partial_transpose, schmidt, schmidt_of_vector, trace_norm, ChoiOperator, CombChoi,
    DensityMatrix, HermitianOperator, Linkable, Linked, SchmidtVector, Side,
};
