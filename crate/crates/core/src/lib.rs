//! Optimal dividend barriers for a risk process with bulk claim arrivals.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod dist;
pub mod dividend;
pub mod error;
pub mod inversion;
pub mod levy;
mod poly;
pub mod scale;
pub mod shape;
pub mod sim;
mod special;

pub use dist::{
    compound_cdf, counting_pmf, ClaimDistribution, ClaimKind, CompoundClaimDistribution, CompounderKind,
    CountingCompounder, EmpiricalDensity,
};
pub use error::{Error, Result};
pub use levy::{psi, rho_root, RiskModel};
pub use special::poisson_pmf;
