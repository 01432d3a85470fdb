//! Moment graphs of Bruhat intervals, sheaves on them, the canonical
//! Braden–MacPherson sheaf and Kazhdan–Lusztig polynomials, all computed
//! exactly over the rationals or a prime field.

pub mod bmp;
pub mod coxeter;
pub mod error;
pub mod graph;
pub mod kl;
pub mod linalg;
pub mod ring;
pub mod sheaf;
pub mod verify;

pub use coxeter::{
    CartanDatum, CartanType, Elem, ParabolicQuotient, Reflection, RootSystem, WeylGroup,
};
pub use error::{Error, Result};
pub use ring::{
    CoefficientField, Field, LinearReducer, Monomial, Polynomial, PrimeField, Rationals,
};
