//! Inverse-problem analysis for two-parametric families of planar orbits.
//!
//! Given a family of curves `f(x, y, b) = c`, this crate decides whether an
//! autonomous planar force field can generate every member as a trajectory,
//! derives the force (up to its gauge scale) when one exists, and verifies
//! results by forward orbit integration.  The pieces:
//!
//! - [`jets`]: truncated trivariate Taylor arithmetic supplying every mixed
//!   partial derivative the analysis needs;
//! - [`exprlang`]: a small expression language so families and forces can be
//!   supplied as text;
//! - [`families`]: built-in precessing-conic families, an orbit sampler, and
//!   closed-form slope oracles used for cross-validation;
//! - [`bozis`]: the compatibility classification, force solver and residual
//!   checks (the core of the inverse problem);
//! - [`dynamics`]: Newtonian/Manev force models, adaptive orbit integration
//!   and apsidal-precession measurement;
//! - [`force`]: the planar force abstraction shared by the two above;
//! - [`fdcheck`]: finite-difference mixed partials for validation suites.

pub mod bozis;
pub mod dynamics;
pub mod exprlang;
pub mod families;
pub mod fdcheck;
pub mod force;
pub mod jets;
pub(crate) mod quad;
pub(crate) mod rk;
