//! Lie point-symmetry toolkit for the one-dimensional rotating shallow-water
//! equations.
//!
//! The crate verifies the five-generator symmetry algebra of the rotating
//! shallow-water system (in Lagrangian, reduced and Euler form), reproduces
//! its commutator and adjoint tables and one-dimensional optimal systems,
//! carries a catalog of similarity reductions to ODEs with closed-form
//! solution candidates and a residual-based adjudication engine, and runs the
//! qualitative simulations (travelling waves with shock detection, scaling
//! dynamics) with CSV/SVG output.
//!
//! Start from the `examples/` directory: each example exercises one major
//! capability end to end. The `swsym` binary exposes the same functionality
//! as batch subcommands.

pub mod cli;
pub mod jetfield;
pub mod liealg;
pub mod models;
pub mod numerics;
pub mod reductions;
pub mod symkernel;
