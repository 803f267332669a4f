// Copyright 2026 The gpolab Developers
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Full round-trip formatting: 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Tracks every file written by one invocation so that a failed run can
/// remove what it produced.
pub struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn create(&mut self, name: &str) -> Result<(PathBuf, fs::File), CliError> {
        let path = self.dir.join(name);
        let file =
            fs::File::create(&path).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
        self.written.push(path.clone());
        Ok((path, file))
    }

    pub fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<(), CliError> {
        let (path, file) = self.create(name)?;
        let fail = |e: csv::Error| CliError::Runtime(format!("writing {}: {e}", path.display()));
        let mut w = csv::Writer::from_writer(file);
        w.write_record(header).map_err(fail)?;
        for row in rows {
            w.write_record(&row).map_err(fail)?;
        }
        w.flush()
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let (path, mut file) = self.create(name)?;
        let fail = |e: std::io::Error| CliError::Runtime(format!("writing {}: {e}", path.display()));
        serde_json::to_writer_pretty(&mut file, value).map_err(|e| CliError::Runtime(e.to_string()))?;
        file.write_all(b"\n").map_err(fail)?;
        Ok(())
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn discard(self) {
        for path in self.written {
            let _ = fs::remove_file(path);
        }
    }
}
