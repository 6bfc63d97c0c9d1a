//! Elliptic-element trees for hyperbolic once-punctured tori.
//!
//! Starting from a Fricke triple `(a, b, c)` the crate builds the tree of
//! order-two generator triples `(E, F, G)` with `G·F·E` the translation by `a`,
//! places one excision interval on the horocycle `Y = a/2` per node, and sums
//! the widths to check McShane's identity. The complement of the intervals is a
//! Cantor set whose box-counting dimension and branch ratios are estimated in
//! [`cantor`].

pub mod cantor;
pub mod error;
pub mod export;
pub mod fricke;
pub mod identity;
pub mod moebius;
pub mod render;
pub mod scalar;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
pub use fricke::{
    adjusted_residual, apply_move, minimal_triple, solve_c, validate_params, FrickeParams, FrickeTriple, Move,
    MovePath, RootTag,
};
pub use moebius::{generator_matrices, HLine, Mat2, Point, UpliftRegion, UpliftVerdict};
pub use scalar::{Exact, Real, Scalar, DEFAULT_PRECISION};
pub use tree::{apply_move_matrices, enumerate_tree, Budget, HalfTurn, TreeNode};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/triples.md")]
    mod triples {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/identity.md")]
    mod identity {}
    #[doc = include_str!("../../../book/src/cantor.md")]
    mod cantor {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
