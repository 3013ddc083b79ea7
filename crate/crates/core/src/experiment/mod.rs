//! End-to-end runs: problem setup, solve, tables and exported artifacts.

mod case;
mod config;
mod format;
mod matrix_market;
mod run;
mod svg;

pub use case::{solve_case, CaseResult, CaseSettings};
pub use config::{CustomProblem, CustomPsi, ExperimentConfig, MeshSource, OutputToggles, ProblemKind};
pub use format::{fmt_e, fmt_g};
pub use matrix_market::{read_matrix_market, write_matrix_market};
pub use run::{
    cell_dir, errors_csv, export_artifacts, run_experiment, stats_csv, write_atomic, CellFailure, CellRow, ExperimentReport,
    ERRORS_HEADER, STATS_HEADER,
};
pub use svg::blocks_svg;
