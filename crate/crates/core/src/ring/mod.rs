//! Exact graded polynomial algebra over `Q` and `F_p`.

mod field;
pub mod linalg_small;
mod poly;

pub use field::{CoefficientField, Field, PrimeField, Rationals};
pub(crate) use poly::index_basis;
pub use poly::{
    monomial_basis, monomial_count, reduce_mod_linear, LinearReducer, Monomial, PolyTermJson,
    Polynomial,
};
