//! Runtime checks of the a-priori inequalities along computed trajectories.

pub mod checks;
pub mod gronwall;
pub mod ledger;
pub mod monotonicity;
pub mod stability;

pub use checks::{
    check_dz_inequality, check_energy_inequality, decay_function_check, power_law_dz_report,
    BAlpha, CheckReport, EnergyForm, PowerLawDzReport,
};
pub use gronwall::{gronwall_envelope, GronwallInput, GronwallReport, GronwallVerdict};
pub use ledger::{ledger_append, EnergyLedger, LedgerRow};
pub use monotonicity::{
    log_damping_vector, monotonicity_check, monotonicity_inner, MonotonicityReport, PairFamily,
};
pub use stability::{stability_probe, StabilityReport};
