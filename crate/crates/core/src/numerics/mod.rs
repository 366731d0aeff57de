//! Shared numerical building blocks: Minkowski vectors, quadrature rules,
//! spherical harmonics, Bessel functions and FFT helpers.

pub mod bessel;
pub mod fourier;
pub mod minkowski;
pub mod quadrature;
pub mod sph;

pub use minkowski::{CVec4, FourVector};
