//! Monte Carlo laboratory for vector and Boolean hidden-variable models of
//! two-station polarization experiments.
//!
//! The crate is organized around the physical chain of an experiment:
//!
//! * [`hv`]: the vector hidden variable, analyzers and threshold detectors.
//! * [`bell`]: two-station runs under the vector model, Malus chains,
//!   correlations and the CHSH statistic.
//! * [`boolean`]: the set-membership comparator model.
//! * [`algebra`]: two-party Bell vectors, beam-splitter (Hong-Ou-Mandel)
//!   outputs and the four-party swapping identities.
//! * [`rng`]: reproducible partitioned substreams.
//! * [`report`]: plain tables with CSV and JSON rendering.
//! * [`acceptance`]: the numeric acceptance checks.
//!
//! ```
//! use hvlab::bell::{run_bell, RunConfig};
//! use hvlab::BellState;
//!
//! let cfg = RunConfig {
//!     state: BellState::PsiMinus,
//!     alpha: 0.0,
//!     beta: 0.0,
//!     n_intervals: 10_000,
//!     seed: 1,
//!     ..RunConfig::default()
//! };
//! let counts = run_bell(&cfg).unwrap();
//! // aligned analyzers never coincide on the transmitted channels
//! assert_eq!(counts.n_pp, 0);
//! ```

pub mod acceptance;
pub mod algebra;
pub mod bell;
pub mod boolean;
pub mod error;
pub mod hv;
pub mod report;
pub mod rng;
pub mod state;
pub mod stats;

pub use error::{Error, Result};
pub use state::BellState;
