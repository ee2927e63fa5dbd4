//! Estimate the size of a serially numbered population from a sample of
//! observed labels (the "German tank" setting).
//!
//! The crate has five layers:
//!
//! - [`model`]: sample/population domain types and the sample-file parser.
//! - [`estimators`]: the point-estimator catalog (method of moments, sample
//!   maximum, max-plus-average-gap, midrange, and a deliberately bad
//!   negative control).
//! - [`exact`]: exact sampling moments of every estimator under simple
//!   random sampling without replacement, in arbitrary-precision rational
//!   arithmetic, plus a full-enumeration oracle.
//! - [`simulate`]: a seeded, deterministic Monte Carlo engine over a grid
//!   of (N, k) settings.
//! - [`report`]: tables (CSV/Markdown), SVG histograms, estimator ranking,
//!   and a Markdown recommendation report.

pub mod estimators;
pub mod exact;
pub mod model;
pub mod report;
pub mod simulate;

pub use estimators::{describe, estimate, estimate_all, EstimatorError, EstimatorInfo};
pub use exact::{enumerate_moments, exact_moments, ExactError, ExactMoments};
pub use model::{
    parse_sample_file, validate_feasible, DataError, EstimateRecord, EstimatorId,
    PopulationConfig, SerialSample,
};
pub use report::{
    build_report, parse_results_csv, rank_estimators, render_histogram_svg, render_report,
    render_table, Criterion, RepsCol, ReportBundle, ReportError, TableFormat, TableRow,
    CSV_HEADER,
};
pub use simulate::{
    draw_sample, run_cell, run_grid, run_grid_with, GridOutput, RawEstimates, SimError,
    SimulationConfig, SummaryStats,
};
