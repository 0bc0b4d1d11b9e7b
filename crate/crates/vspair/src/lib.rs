//! Quantifier elimination and decision procedures for vector spaces over a
//! field `F` expanded by a generic submodule `G` over a subring `R` of `F`,
//! together with an executable term model for validating witnesses and
//! axiom schemes.
//!
//! The language has scalar multiplications for every element of `F`, a
//! membership predicate `G(...)`, subgroup predicates `Gl[lams](...)` for
//! `lams_1 G + ... + lams_n G` over tuples independent over `Frac(R)`,
//! coordinate functions `f[lams; i](...)` extracting the (unique)
//! G-components along such a tuple, and positive-primitive module
//! constraints `pp{A|B|c}(...)`.  Elimination rests on three mechanisms:
//!
//! * F-linear relations among G-elements reduce to R-linear systems
//!   ([`mordell`]), so membership literals become positive-primitive
//!   conditions with decomposition-function parameters;
//! * the module side of a one-variable clause is a coset intersection
//!   problem over the free R-module of infinite rank ([`gmodule`]), where a
//!   negative coset can only swallow the positive solution coset when its
//!   modulus divides, and everything finer is escaped along a fresh
//!   generator;
//! * a variable not forced into the span of `G` and the parameters is
//!   witnessed outside it, leaving a base-theory residue that is trivial
//!   for pure vector spaces and an interval condition in ordered mode.
//!
//! The [`model`] module hosts the term model (free generators, exact
//! evaluation, closure under the coordinate functions, an independence
//! relation), [`qe`] the elimination engine with decision, type equality,
//! small/large classification and witness search, and [`suites`] the
//! property suites behind `vspair check`.

pub mod cli;
pub mod config;
pub mod error;
pub mod formula;
pub mod gmodule;
pub mod linalg;
pub mod model;
pub mod mordell;
pub mod parse;
pub mod qe;
pub mod scalar;
pub mod suites;

pub use error::{Error, Result};
