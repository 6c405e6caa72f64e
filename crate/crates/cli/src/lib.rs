//! Front end for the `xxchain` binary: configuration, sweeps, state printing
//! and oracle verification.

pub mod config;
pub mod error;
pub mod state;
pub mod sweep;
pub mod verify;

pub use error::CliError;

/// Reals in CSV output: 17 significant digits, scientific notation.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}
