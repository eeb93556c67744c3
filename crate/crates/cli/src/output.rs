//! Output files written atomically, plus the metadata sidecar.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::{RunConfig, RunInfo};
use crate::error::CliError;

pub struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    /// Write `name` through a temporary file that is renamed into place only
    /// once `fill` has succeeded.
    pub fn write<F>(&mut self, name: &str, fill: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
    {
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        let result = (|| -> Result<(), CliError> {
            let mut w = BufWriter::new(fs::File::create(&tmp)?);
            fill(&mut w)?;
            w.flush()?;
            w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
            fs::rename(&tmp, &target)?;
            Ok(())
        })();
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        result?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    /// `<command>.meta.json`: the resolved configuration, usable as input.
    pub fn finish(mut self, config: &RunConfig, command: &str) -> Result<Vec<String>, CliError> {
        let mut meta = config.clone();
        meta.run = Some(RunInfo {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.written.clone(),
        });
        let name = format!("{command}.meta.json");
        self.write_json(&name, &meta)?;
        Ok(self.written)
    }
}
