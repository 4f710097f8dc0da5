//! Tangent cones of semialgebraic sets.
//!
//! [`cone`] decides membership of a direction in `C_p(X)` with numeric and
//! exact engines, [`strat`] builds the strata a stratification induces on
//! tangent cones and checks the Whitney conditions, and [`report`] runs
//! scripts of such commands. [`puiseux`] supplies the series field the
//! exact engines compute in.

pub mod lex;
pub mod poly;
pub mod univariate;
pub mod verdict;
pub mod puiseux;
pub mod semialg;
pub mod cone;
pub mod strat;
pub mod report;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/sets.md")]
    mod sets {}
    #[doc = include_str!("../../../book/src/cones.md")]
    mod cones {}
    #[doc = include_str!("../../../book/src/strata.md")]
    mod strata {}
    #[doc = include_str!("../../../book/src/risometries.md")]
    mod risometries {}
    #[doc = include_str!("../../../book/src/scripts.md")]
    mod scripts {}
}
