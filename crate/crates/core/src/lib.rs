pub mod entry_law;
pub mod error;
pub mod estimate;
pub mod quadrature;
pub mod spectral_law;
pub mod ensemble;
pub mod spherical;
pub mod free_energy;
pub mod spike;
pub mod rate;
pub mod rare_event;
pub mod diagnostics;
pub mod ledger;
pub mod validate;
pub mod cli;
