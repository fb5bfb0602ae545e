//! paneitz-core: numerical machinery for prescribing the fourth-order
//! Paneitz curvature on S^5 and S^6.
//!
//! The crate is organized around the variational problem
//! `P u = K u^((n+4)/(n-4))` on the round sphere:
//!
//! - [`sphere`]: points, charts, and quadrature with symmetry reduction;
//! - [`curvature`]: polynomial candidate functions K with exact
//!   intrinsic derivatives;
//! - [`bubble`]: the concentrating solution family and its interaction
//!   quantities;
//! - [`paneitz`]: operator constants, the functional J, and its
//!   expansions near concentration;
//! - [`morse`]: critical point analysis of K;
//! - [`catalog`]: interaction matrices, critical points at infinity, and
//!   the existence-criterion reports;
//! - [`flow`]: the reduced dynamics of bubble parameters.

pub mod bubble;
pub mod catalog;
pub mod curvature;
pub mod error;
pub mod flow;
pub mod linalg;
pub mod morse;
pub mod paneitz;
pub mod sphere;

pub use error::{Error, Result};
