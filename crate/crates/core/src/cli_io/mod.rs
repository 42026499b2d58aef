//! Run configuration, command dispatch and file emission for the `mems`
//! binary.

mod commands;
mod config;
mod table;
mod verify;

pub use commands::{
    classify_text, exit_status, run_command, Command, CommandOutput, ExitStatus, Problem, DEFAULT_EXTREMAL_FRACTIONS,
    DEFAULT_LAMBDA_FRACTION, DEFAULT_SWEEP_FRACTIONS,
};
pub use config::{log_space, parse_config, ConfigErrors, LambdaList, LambdaSpec, RunConfig, DEFAULT_RESOLUTION};
pub use table::{format_real, read_csv, write_plot, Cell, CsvTable};
pub use verify::{green_oracle_errors, run_verify, PropertyOutcome, Verdict, VerifyReport};
