//! Report files and their JSON envelope.

use std::io::Write;
use std::path::{Path, PathBuf};

use oracle_game::config::ConfigFile;
use serde::Serialize;

use crate::CliError;

pub const VERSION: &str = env!("ORACLE_GAME_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A CSV table: header plus rows of preformatted cells.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(&self.header)
            .map_err(CliError::output)?;
        for row in &self.rows {
            writer.write_record(row).map_err(CliError::output)?;
        }
        writer.into_inner().map_err(|e| CliError::output(e.error()))
    }
}

/// Formats a float so that round trips are exact and tiny values stay short.
pub fn num(value: f64) -> String {
    if value != 0.0 && value.abs() < 1e-4 {
        format!("{value:e}")
    } else {
        format!("{value}")
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: String,
    version: &'static str,
    command: &'a str,
    config: &'a ConfigFile,
    report: &'a T,
}

pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl Output {
    /// `<stem>_<suffix>.<ext>` next to the main output, if writing to a file.
    pub fn sibling(&self, suffix: &str, ext: &str) -> Option<PathBuf> {
        let path = self.path.as_ref()?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Some(path.with_file_name(format!("{stem}_{suffix}.{ext}")))
    }

    pub fn write_json<T: Serialize>(
        &self,
        command: &str,
        config: &ConfigFile,
        report: &T,
    ) -> Result<(), CliError> {
        let envelope = Envelope {
            schema: format!("oracle-game/{command}/v1"),
            version: VERSION,
            command,
            config,
            report,
        };
        let mut bytes = serde_json::to_vec_pretty(&envelope).map_err(CliError::output)?;
        bytes.push(b'\n');
        self.emit(self.path.as_deref(), &bytes)
    }

    /// Writes the main table and any named side tables. On stdout the side
    /// tables follow the main one, each after a blank line and a `# name` line.
    pub fn write_tables(&self, main: &Table, sides: &[(&str, &Table)]) -> Result<(), CliError> {
        match &self.path {
            Some(path) => {
                write_file(path, &main.to_bytes()?)?;
                for (name, table) in sides {
                    let side = self.sibling(name, "csv").expect("file output");
                    write_file(&side, &table.to_bytes()?)?;
                }
                Ok(())
            }
            None => {
                let mut bytes = main.to_bytes()?;
                for (name, table) in sides {
                    bytes.extend_from_slice(format!("\n# {name}\n").as_bytes());
                    bytes.extend(table.to_bytes()?);
                }
                self.emit(None, &bytes)
            }
        }
    }

    fn emit(&self, path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
        match path {
            Some(path) => write_file(path, bytes),
            None => std::io::stdout()
                .lock()
                .write_all(bytes)
                .map_err(CliError::output),
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}
