use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use superchan::ChoiState;

use crate::CliError;

/// Files produced by one command, written together once computation is done.
#[derive(Default)]
pub struct Artifacts {
    files: Vec<(PathBuf, String)>,
}

impl Artifacts {
    pub fn add(&mut self, dir: &Path, name: impl AsRef<str>, contents: String) {
        self.files.push((dir.join(name.as_ref()), contents));
    }

    pub fn write(self) -> Result<(), CliError> {
        for (path, contents) in self.files {
            fs::write(&path, contents).map_err(|e| {
                CliError::Numerical(format!("cannot write {}: {e}", path.display()))
            })?;
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}

pub fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| {
        CliError::Usage(format!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Numerical(e.to_string()))
}

/// Dual state as separate real and imaginary row arrays with basis labels.
#[derive(Serialize)]
pub struct ChoiDump {
    pub dim_in: usize,
    pub dim_out: usize,
    /// `<input><output>` per basis vector.
    pub labels: Vec<String>,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

impl ChoiDump {
    pub fn new(choi: &ChoiState, in_names: &[&str], out_names: &[&str]) -> Self {
        let m = choi.matrix();
        let n = m.rows();
        let rows = |f: fn(&superchan::C64) -> f64| {
            (0..n)
                .map(|i| (0..n).map(|j| f(&m[(i, j)]) + 0.0).collect())
                .collect()
        };
        Self {
            dim_in: choi.dim_in(),
            dim_out: choi.dim_out(),
            labels: choi.labels(in_names, out_names),
            real: rows(|z| z.re),
            imag: rows(|z| z.im),
        }
    }
}

/// `alpha` as it appears in file names.
pub fn alpha_tag(alpha: f64) -> String {
    format!("alpha{alpha}")
}
