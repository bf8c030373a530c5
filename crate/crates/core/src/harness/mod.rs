//! Scenario files, seeded fuzz campaigns and report rendering.

mod emit;
mod fuzz;
mod run;
mod scenario;

pub use emit::{emit_report, parse_report, render, ReportFormat, CSV_HEADER};
pub use fuzz::{draw_trial, fuzz, FuzzConfig};
pub use run::{run_scenario, selftest, Aggregate, Evaluation, RunReport};
pub use scenario::{
    parse_scenario, scenario_theorem, Instance, JsonComplex, JsonMatrix, JsonVector, MeasurementSpec,
    ProductFactor, ScenarioSpec, StateSpec, SCENARIO_VERSION,
};
