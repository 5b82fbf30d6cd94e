//! Computational companion to the lower bound for the Nehari constant on the polydisc.
//!
//! Monomials `z^v` on the polydisc are indexed multiplicatively by
//! `p_1^{v_1} ... p_d^{v_d}` ([`multiplicative_index`]). On top of that:
//!
//! - [`poly_torus`]: sparse polynomials and their `L^p(T^d)` norms,
//! - [`hankel`]: multiplicative Hankel matrices, Schur-test certificates and operator norms,
//! - [`weak_factorization`]: projective tensor norms by nuclear-norm minimization,
//! - [`certificates`]: the full construction for even `d` with every identity cross-checked.

pub mod certificates;
pub mod error;
pub mod exact;
pub mod hankel;
pub mod multiplicative_index;
pub mod poly_torus;
pub mod report;
pub mod weak_factorization;

pub use error::{Error, Result};
