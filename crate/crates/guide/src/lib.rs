//! The book chapters, one module each, so that `cargo test --doc` runs every
//! snippet against the current library.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}
#[doc = include_str!("../../../book/src/coherence.md")]
pub mod coherence {}
#[doc = include_str!("../../../book/src/entanglement.md")]
pub mod entanglement {}
#[doc = include_str!("../../../book/src/magic.md")]
pub mod magic {}
#[doc = include_str!("../../../book/src/channels.md")]
pub mod channels {}
#[doc = include_str!("../../../book/src/combs.md")]
pub mod combs {}
#[doc = include_str!("../../../book/src/sampling.md")]
pub mod sampling {}
#[doc = include_str!("../../../book/src/programs.md")]
pub mod programs {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
