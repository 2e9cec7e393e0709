//! Census, verification and solve runs packaged for reproducible output.

pub mod census;
pub mod report;
pub mod verify;

pub use census::{census_csv, run_census, run_census_sweep, theoretical_cap, CensusConfig, CensusMode, CensusRow};
pub use report::{load_instance, run_solve, InstanceSpec, LoadedInstance, RunReport, SolveConfig};
pub use verify::{run_verify, Fault, SuiteResult, VerifyConfig, VerifyReport};
