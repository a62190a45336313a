//! Exact combinatorics of nilpotent pairs of linear maps over finite
//! fields, together with the companion families that share their counting
//! story: eventually constant pairs of set maps and marked spanning trees of
//! complete bipartite graphs, and nilpotent Boolean matrices and labeled
//! DAGs.
//!
//! Every count is an exact big integer, every probability an exact
//! rational, and every bijection comes with an executable forward and
//! inverse. Formula evaluations are cross-checked against independent
//! brute-force oracles in the `verify` suites; the `nilcone` CLI exposes
//! all of it.

pub mod bijections;
pub mod boolmat;
pub mod field;
pub mod linalg;
pub mod nilpairs;
pub(crate) mod par;
pub mod setmaps;
pub mod verify;

pub use bijections::{
    BalancedTriple, BijectionError, Flavor, MasterElement, Quadruple, SplitResult, TaggedVector,
};
pub use boolmat::{BoolMatrix, BoolmatError};
pub use field::{Fel, Field, FieldError, FieldSpec};
pub use linalg::{
    Balancedness, FittingData, LinalgError, LinearPair, MatrixFq, Side, Subspace, Summand,
    SummandKind,
};
pub use nilpairs::{BigCount, BruteOptions, CountError, ExactRational};
pub use setmaps::{MarkedSpanningTree, SetPair, SetmapError};
pub use verify::{CheckResult, CheckStatus};
