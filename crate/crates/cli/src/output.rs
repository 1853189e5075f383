//! Output files with reproducibility headers.
//!
//! Every file starts with comment lines carrying the subcommand, the seed
//! and the full resolved config, so a run can be reproduced from any of
//! its outputs. Bodies are deterministic for a given config and seed.

use std::io::Write;
use std::path::{Path, PathBuf};

use cdsim::ExperimentConfig;

use crate::CliError;

pub struct OutputWriter {
    dir: PathBuf,
    header: String,
}

impl OutputWriter {
    pub fn new(
        dir: &Path,
        command: &str,
        config: &ExperimentConfig,
        seed: u64,
    ) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        let mut header = String::new();
        header.push_str(&format!("# cdsim {command}\n"));
        header.push_str(&format!("# seed = {seed}\n"));
        header.push_str("# config:\n");
        for line in config.to_toml().lines() {
            header.push_str(&format!("#   {line}\n"));
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            header,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Write `body` under the reproducibility header, '#'-commented.
    pub fn write_csv(&self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut file = std::fs::File::create(&path)?;
        file.write_all(self.header.as_bytes())?;
        file.write_all(body.as_bytes())?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    /// Write with a '//'-commented header (QASM and friends).
    pub fn write_slashed(&self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut file = std::fs::File::create(&path)?;
        for line in self.header.lines() {
            file.write_all(format!("//{}\n", &line[1..]).as_bytes())?;
        }
        file.write_all(body.as_bytes())?;
        println!("wrote {}", path.display());
        Ok(path)
    }
}
