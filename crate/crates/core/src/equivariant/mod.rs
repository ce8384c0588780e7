//! Torus weights, graded monomial modules and their filtrations.
//!
//! Everything here is exact integer arithmetic, except the tolerance test on
//! logarithms inside [`closure_rank`].

mod filtration;
mod lattice;
mod linalg;
mod module;
mod parse;
mod twist;

pub use filtration::{subquotient_rank_check, DegreePiece, StepCheck, SubquotientReport};
pub use lattice::{closure_rank, hermite_normal_form, ClosureRank, RELATION_TOL};
pub use linalg::integer_rank;
pub use module::{
    build_filtration, cstar_embedding, weight_decomposition, CstarEmbedding, EquivariantError,
    Filtration, Generator, MonomialModule, RelationTerm, TorusAction, Weight,
};
pub use parse::{parse_module, ParseError};
pub use twist::{sections_of_twist, TwistSections};
