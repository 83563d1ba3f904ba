//! Truncated series over the nilpotent base ring, elementary Poisson
//! automorphisms, their commutators, and the brute-force product oracle.

mod auto;
mod compose;
mod nil;
pub mod oracle;
mod series;

pub use auto::{
    apply, commutator, factor_initial, naive_commutator, ElemAuto, Mode, NaiveCommutation,
    WeightFunction,
};
pub use compose::compose_same_slope;
pub use nil::{Levels, NilMonomial};
pub use oracle::{brute_force_product, nil_product, GeneratorImages, NilImages};
pub use series::{binomial, rat, Cap, Term, TruncSeries};
