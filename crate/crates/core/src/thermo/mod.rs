//! Gurevich entropy, entropy at infinity, recurrence class and strong positive recurrence.

mod entropy;
mod grid;
mod loop_gf;
mod recurrence;

pub use entropy::{big_delta_inf, big_delta_inf_min, gurevich_entropy, BigDeltaReport, EntropyReport, TraceEntry};
pub use grid::{cell_window, delta_inf, CellStatus, GridCell, GridSpec, InfinityReport, MIN_FIT_POINTS};
pub use loop_gf::{analyse, log_growth, loop_gf, tail_log_growth, Bracket, GfSeries, LoopGf, PartialSum, RootStatus};
pub use recurrence::{classify, is_spr, RecurrenceClass, RecurrenceVerdict, SprOptions, SprReport, SprVerdict};

#[cfg(test)]
mod tests;
