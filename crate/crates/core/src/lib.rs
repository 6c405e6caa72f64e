//! Exact nonequilibrium steady state of the open XX chain between two thermal
//! baths in the global (eigenbasis) GKSL description.
//!
//! * [`chain`]: mode matrix, transition frequencies, many-body energies.
//! * [`steady_state`]: product-form eigenvalues of the stationary state.
//! * [`combinadics`]: ranking of fixed-weight Fock strings.
//! * [`spin_rep`]: the stationary state written in the spin basis.
//! * [`reduced_density`]: two-spin X-states and their concurrence.
//! * [`transport`]: sink/source terms and heat flows.
//! * [`oracle`]: dense Liouvillian construction used to check all of the above.
//!
//! ```
//! # fn main() -> xxchain::Result<()> {
//! use xxchain::{build_mode_table, BathSpec, ChainSpec};
//! use xxchain::reduced_density::xstate_coeffs;
//! use xxchain::steady_state::steady_factors;
//! use xxchain::transport::flow_report;
//!
//! let spec = ChainSpec::near_saturation(8, 15.0, 0.98)?;
//! let modes = build_mode_table(&spec);
//! let baths = BathSpec::equal_weights(8, 0.0, 10.0)?;
//! let flows = flow_report(&modes, &baths)?;
//! assert!(flows.heat_right > 0.0);
//! let factors = steady_factors(&modes, &baths)?;
//! let c34 = xstate_coeffs(&modes, &factors, 2, 3)?.concurrence();
//! assert!(c34 > 0.0);
//! # Ok(())
//! # }
//! ```

pub mod chain;
pub mod combinadics;
pub mod dense;
pub mod error;
pub mod oracle;
pub mod reduced_density;
pub mod spin_rep;
pub mod steady_state;
pub mod transport;

pub use chain::{build_mode_table, eigen_energy, ChainSpec, FockString, ModeTable};
pub use error::{Error, Result};
pub use steady_state::{BathSpec, SteadyFactors};
