//! Fractional powers of sectorial operators through the harmonic extension.
//!
//! For a sectorial operator `A` on `ℂⁿ` and `α ∈ (0, 1)` the crate evaluates
//!
//! - the scalar kernels `u_z`, `v_t`, `w_t` built from modified Bessel functions
//!   ([`kernels`]),
//! - operator functions `f(A)x` by trapezoidal quadrature of the resolvent along two rays
//!   ([`calculus`]), in particular `A^α x`,
//! - the extension `U(t)x` solving `u'' + ((1-2α)/t)u' = Au`, `u(0) = x` by several
//!   independent routes, and the two-parameter and inhomogeneous solutions ([`extension`]),
//! - the Dirichlet-to-Neumann limit `-lim t^{1-2α}u'(t)` and its comparison with
//!   `c_α A^α x` ([`dtn`]).
//!
//! Operators are dense, diagonal or tridiagonal ([`operators::OperatorHandle`]); an optional
//! eigendecomposition serves as an independent oracle. The crate is `no_std` with `alloc`;
//! parallel evaluation goes through [`exec::Executor`].
//!
//! ```
//! use sectorial_core::calculus::{frac_power, ContourSpec};
//! use sectorial_core::kernels::FracOrder;
//! use sectorial_core::operators::OperatorHandle;
//! use sectorial_core::C64;
//!
//! let a = OperatorHandle::diagonal(vec![C64::new(4.0, 0.0), C64::new(9.0, 0.0)], 0.0).unwrap();
//! let x = [C64::new(1.0, 0.0); 2];
//! let y = frac_power(&a, FracOrder::real(0.5).unwrap(), &x, &ContourSpec::default()).unwrap();
//! assert!((y[0].re - 2.0).abs() < 1e-10 && (y[1].re - 3.0).abs() < 1e-10);
//! ```

#![no_std]
extern crate alloc;

pub mod calculus;
pub mod dtn;
pub mod error;
pub mod exec;
pub mod extension;
pub mod kernels;
pub mod linalg;
pub mod operators;
pub mod quadrature;
pub mod richardson;
pub mod vector;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
