//! Config files, the applicant snapshot, and batch CSV scoring.

mod applicants;
mod batch;
mod config;

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tsuka_core::dsl::ParseError;

pub use applicants::{ApplicantStore, FaultHook};
pub use batch::{export_csv, export_to_string, ingest_csv, ingest_reader, BatchReport, RowFailure, APPLICANT_HEADER, EXPORT_HEADER};
pub use config::{
    config_from_toml, config_to_toml, load_config, save_config, ConfigDocument, Role, TermDocument,
    VariableDocument, FORMAT_VERSION,
};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    /// A document that parses but violates the schema; `field` is a path
    /// such as `threshold` or `variables[1].terms[0]`.
    #[error("{field}: {message}")]
    Schema { field: String, message: String },
    #[error("{}", format_rule_errors(errors))]
    Rules { errors: Vec<ParseError>, rules: Vec<String> },
    #[error("{0}")]
    Header(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn format_rule_errors(errors: &[ParseError]) -> String {
    errors
        .iter()
        .map(|e| format!("rules[{}]:{}: {}", e.span.line - 1, e.span.column, e.message))
        .collect::<Vec<_>>()
        .join("; ")
}

pub(crate) fn io_error(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_owned(), source }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String, StoreError> {
    std::fs::read_to_string(path).map_err(io_error(path))
}

/// Write-to-temp, fsync, rename. `before_rename` runs after the temp file is
/// durable; an error from it aborts the write and leaves `path` untouched.
pub(crate) fn atomic_write(
    path: &Path,
    bytes: &[u8],
    before_rename: &dyn Fn() -> io::Result<()>,
) -> Result<(), StoreError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_error(path))?;
    tmp.write_all(bytes).map_err(io_error(path))?;
    tmp.as_file().sync_all().map_err(io_error(path))?;
    before_rename().map_err(io_error(path))?;
    tmp.persist(path).map_err(|e| StoreError::Io { path: path.to_owned(), source: e.error })?;
    Ok(())
}
