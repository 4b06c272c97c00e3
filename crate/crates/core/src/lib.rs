//! Exact algebra for G-systematic rings and modules.
//!
//! The crate builds, at desk scale, the categories of finitely generated
//! systematically free and projective modules over rings that are covered by
//! a family of additive subgroups `R_g` indexed by a group `G`, splits
//! idempotents of lower triangular categories explicitly, and computes
//! Grothendieck groups K0 of finite degree windows.
//!
//! - [`groups`]: grading groups, cone orders, semidirect products, extensions.
//! - [`rings`]: concrete systematic rings with decidable components.
//! - [`modcat`]: free systematic modules, idempotent completion, lower
//!   triangular splitting and tensor extension.
//! - [`kzero`]: K0 of windows, brute-force oracle, decomposition theorems.
//! - [`cli`]: JSON-driven experiment runner.

pub mod cli;
pub mod error;
pub mod groups;
pub mod kzero;
pub mod linalg;
pub mod modcat;
pub mod rings;

pub use error::{Error, Result};
