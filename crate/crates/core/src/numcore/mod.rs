//! Numerical foundations: wave context, momentum grids, quadrature,
//! transverse envelopes, potentials and their Fourier transforms.
//!
//! Lengths are measured in units of the slab thickness `a`, so `a = 1`
//! throughout and wavenumbers are plain multiples of `1/a`. The Fourier
//! convention is `f~(q) = ∫ dy e^{-iqy} f(y)` with inverse
//! `f(y) = (1/2π) ∫ dq e^{iqy} f~(q)`.

pub mod envelope;
pub mod grid;
pub mod potential;
pub mod quad;
pub mod spline;
pub mod wave;

pub use envelope::{envelope_ft, Envelope, EnvelopeKind};
pub use grid::{gauss_grid, MomentumGrid};
pub use potential::{potential_ft, Custom2d, PotentialSpec, Rect, SampledField};
pub use wave::{omega, p_plus_minus, WaveContext};
