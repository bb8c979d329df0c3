//! Sparse model discovery for a planar prey–predator system and bifurcation
//! analysis of the discovered vector field.
//!
//! Pipeline: [`timeseries`] (impute, normalize) → [`gpr`] (smooth) →
//! [`sindy`] (discover) → [`select`] (AIC/BIC) → [`dynsys`], [`equilibria`]
//! and [`bifurcation`] (analyze).

pub mod bifurcation;
pub mod continuation;
pub mod dynsys;
pub mod equilibria;
pub mod error;
pub mod gpr;
pub mod io;
pub mod ode;
pub mod poly;
pub mod select;
pub mod sindy;
pub mod timeseries;

pub use error::{Error, Result};
