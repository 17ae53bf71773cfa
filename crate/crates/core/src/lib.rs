//! Quantum mechanics over the prime field F_N.
//!
//! The crate builds the Schrodinger-Weil representation of the finite Jacobi
//! group `SL(2, F_N) x| H_1(F_N)` on `C^N`, the discrete Wigner and
//! Fourier-Wigner distributions, Weyl-ordered moments with their
//! `SL(2)`-invariant subspaces, and the free-particle and oscillator
//! evolutions. A sparse group-algebra model of the Jacobi group serves as an
//! independent oracle for the representation formulas at small `N`.
//!
//! Scalars run on either `Complex64` or exact cyclotomic numbers; see
//! [`scalar`].

pub mod cyclic;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod heisenberg;
pub mod io;
pub mod matrix;
pub mod metaplectic;
pub mod oracle;
pub mod scalar;
pub mod sl2;
pub mod subspaces;
pub mod verify;
pub mod wigner;

pub use error::{Error, Result};
pub use field::{legendre, Fe, PrimeField, QuadExt};
pub use matrix::Matrix;
pub use scalar::{Backend, Cyclotomic, Scalar};
