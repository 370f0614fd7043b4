//! Entropy at infinity from the measure side (`h∞` along drifting sequences) and from
//! finite-subgraph pressures (`b∞`), plus checks of the escape-of-mass inequality, the mass
//! bound for SPR shifts, the dimension series and two stability experiments.

mod dimension;
mod families;
mod pressure;
mod verify;

pub use dimension::{dimension_series, DimensionSeries, SeriesTerm, SeriesVerdict, SMALL_TERM};
pub use families::{family_sequence, DriftSchedule, Family};
pub use pressure::{
    b_inf_estimate, covers_base, pressure_indicator, BInfCurve, BInfOptions, BInfStatus, DualValue, PressureCurve,
};
pub use verify::{
    h_inf_lower_bound, limsup_proxy, mass_bound_check, mme_stability, tail_start, tracked_cylinders, usc_trials,
    verify_main_inequality, ExperimentReport, HInfReport, StabilityReport, TraceStep, UscTrial, VERIFY_TOL,
};
