//! Periodic spectral representation of real scalar fields and the exact
//! Fourier-side operators of the transport equation.

mod fft;
mod field;
mod grid;
mod io;
mod ops;

pub use fft::Transform;
pub use field::SpectralField;
pub use grid::{GridSpec, Wavevector};
pub use io::{read_field, write_field, FIELD_FILE_MAGIC};
pub use ops::{
    apply_operator, fractional_symbol, gradient, nonlinear_term, riesz_velocity, SymbolTable,
    VelocityField,
};
