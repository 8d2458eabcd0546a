//! Scattering toolkit for unidirectionally invisible complex potentials.
//!
//! Lengths are in units of the slab thickness `a`; `k` is the wavenumber
//! in units of `1/a`.

pub mod born;
pub mod empower;
pub mod error;
pub mod invispot;
pub mod io;
pub mod numcore;
pub mod xfermat;

pub use error::{Error, Result};
pub use num_complex::Complex64;
