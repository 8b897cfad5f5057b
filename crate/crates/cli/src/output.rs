use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::Value;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Md => "md",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn usage(e: impl ToString) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// A finished report: the artifact in both renderings plus a one-line summary.
pub struct Report {
    pub name: String,
    pub json: Value,
    pub markdown: String,
    pub summary: String,
    pub pass: bool,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Md => {
                let mut s = self.markdown.clone();
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                s
            }
        }
    }
}

pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    pub fn resolve(out: Option<&Path>, dir: Option<&Path>, name: &str, format: Format) -> Sink {
        match (out, dir) {
            (Some(p), _) => Sink::File(p.to_path_buf()),
            (None, Some(d)) => Sink::File(d.join(format!("{name}.{}", format.extension()))),
            (None, None) => Sink::Stdout,
        }
    }

    pub fn emit(&self, report: &Report, format: Format) -> Result<(), CliError> {
        let text = report.render(format);
        match self {
            Sink::Stdout => {
                let mut out = io::stdout().lock();
                out.write_all(text.as_bytes())
                    .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
            }
            Sink::File(path) => {
                let io_err = |source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                };
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    fs::create_dir_all(parent).map_err(io_err)?;
                }
                fs::write(path, text).map_err(io_err)?;
                println!("{} ({})", report.summary, path.display());
                Ok(())
            }
        }
    }
}
