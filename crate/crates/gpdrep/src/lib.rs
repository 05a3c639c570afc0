//! Project files, convergence traces and the `gpdrep` command line.

pub mod cli;
pub mod format;
pub mod trace;

pub use cli::run;
pub use format::{parse_project, Project, ProjectError};
