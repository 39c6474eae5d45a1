//! Exact-arithmetic machinery for formal deformation theory on finite
//! truncated models: graded Lie algebras with differential, the Deligne
//! two-groupoid, Hochschild cochains with the Gerstenhaber bracket, Čech
//! complexes of simplicial DGLA sheaves with descent data and deviation
//! cocycles, Sullivan forms and totalization, twisted matrix algebras of
//! stack data, and the Weyl/Fedosov quantization recursion.
//!
//! Every coefficient is a Gaussian rational or a truncated ħ-series over
//! them; every identity asserted by this crate is checked by exact
//! equality. All values are immutable after construction and all
//! operations are pure functions.

pub mod dgla;
pub mod deligne;
pub mod fedosov;
pub mod gerbe;
pub mod hochschild;
pub mod linalg;
pub mod scalars;
pub mod simplicial;

use thiserror::Error as ThisError;

/// Crate-wide error type for domain violations and malformed input.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("incompatible presentations: {0}")]
    Incompatible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("condition fails first at ħ-order {order}: {condition}")]
    FirstFailingOrder { condition: String, order: i64 },
}
