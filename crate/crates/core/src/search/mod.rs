//! Hill climbing and a simple generational GA, instrumented against the
//! known global maximum.

mod ga;
mod hill_climb;
mod sweep;

pub use ga::{ga_run, GaConfig, Normalization, SearchTrace, Selection, FOUND_TOLERANCE};
pub use hill_climb::hill_climb;
pub use sweep::{ga_sweep, run_seed, MeanStd, SweepRow, TraceSummary};
