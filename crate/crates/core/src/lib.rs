pub mod chapman_enskog;
pub mod compare;
pub mod error;
pub mod io;
pub mod linalg;
pub mod maxwellian;
pub mod nonrel;
pub mod quadrature;
pub mod selftest;
pub mod special_integrals;
pub mod sweep;
pub mod thermo;
pub mod transport;

pub use error::{Error, Result};
