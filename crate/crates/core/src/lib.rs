//! Computation engine for groups acting on rooted trees: level images of
//! Gupta-Sidki elements, stabilizer chains for the resulting permutation
//! groups, and exploration of Nielsen graphs on generating tuples.

pub mod catalog;
pub mod chain;
pub mod group;
pub mod nielsen;
pub mod perm;
pub mod syntax;
pub mod tree;

pub use chain::StabilizerChain;
pub use group::{GroupDescriptor, GroupElement, GroupError, GroupHandle};
pub use nielsen::{
    certify_distinct, explore_exhaustive, explore_seeded, separation_depth, ComponentReport,
    ExploreOptions, Move, MoveKind, MoveSet, NielsenError, TupleVertex, Verdict,
};
pub use perm::{CycleType, PermError, Permutation};
pub use tree::{
    Evaluator, GeneratorWord, Letter, TreeElement, TreeParams, VertexPath, WordConvention,
};
