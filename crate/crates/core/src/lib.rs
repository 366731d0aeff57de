//! Numerical laboratory for homogeneous fields on the forward light cone,
//! infrared-extended free-field profiles, their Fock representation, the
//! almost radial gauge and the asymptotic limits built on top of them.
//!
//! Conventions used throughout:
//! - metric signature (+,−,−,−), fixed time axis t = (1,0,0,0);
//! - null directions are stored on the section l⁰ = 1, l = (1, n̂);
//! - 4-vectors are stored with contravariant (upper) components;
//! - Fourier transforms carry the 1/2π prefactor on the forward transform,
//!   f̂(p) = (2π)⁻¹ ∫ e^{ip·x} f(x) dx and W̃(ω) = (2π)⁻¹ ∫ e^{iωs} W(s) ds.

pub mod asymptotics;
pub mod cone_geometry;
pub mod dirac_kernels;
pub mod error;
pub mod fock_sim;
pub mod harness;
pub mod ir_projection;
pub mod numerics;
pub mod profiles;
pub mod radial_gauge;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
