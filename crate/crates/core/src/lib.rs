//! Exact computations on square-tiled surfaces.
//!
//! The crate builds origamis from their gluing permutations, applies the
//! `SL(2,Z)` action, traces linear flows with exact integer arithmetic,
//! extracts cutting sequences, computes cylinder decompositions and measures
//! `r`-dense times of linear flows.
//!
//! Slopes follow the convention `slope = Δx/Δy`: slope `0` is vertical and
//! slope `∞` is horizontal. A direction vector `(dx, dy)` has slope `dx/dy`.

pub mod cf;
pub mod cylinder;
pub mod error;
pub mod flow;
pub mod hitting;
pub mod origami;
pub mod perm;
pub mod verify;
pub mod sl2;

pub use cf::CfSlope;
pub use error::{Error, Result};
pub use origami::{builtin, builtin_genus2_l, builtin_ornithorynque, Origami, SurfacePoint};
pub use perm::Permutation;
pub use sl2::{Generator, GeneratorWord, IntMatrix2, ProjSlope};
