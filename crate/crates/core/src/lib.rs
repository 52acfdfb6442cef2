//! Numerical toolkit for the time-fractional Schrödinger equation
//! `i^β ∂_t^α u = (−Δ)^{β/2} u`.
//!
//! The solution operator is a Fourier multiplier `E_α(−i t^α |ξ|^β)`; this
//! crate evaluates it, its dyadic pieces and their `L^1 → L^∞` decay.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod besov;
pub mod estimates;
pub mod error;
pub mod freq;
pub mod kernel;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Order-preserving map, parallel when the `parallel` feature is on.
pub(crate) fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
