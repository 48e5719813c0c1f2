use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Output files of one command, staged in memory and written together.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn add_with(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut Vec<u8>) -> stancenet::Result<()>,
    ) -> Result<()> {
        let mut buf = Vec::new();
        write(&mut buf).with_context(|| format!("rendering {name}"))?;
        self.add(name, buf);
        Ok(())
    }

    /// Each file goes to a temporary sibling first and is renamed into
    /// place, so a failed run never leaves a truncated report.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in self.files {
            let target = dir.join(&name);
            let tmp = dir.join(format!(".{name}.tmp"));
            let result = (|| -> std::io::Result<()> {
                let mut w = BufWriter::new(File::create(&tmp)?);
                w.write_all(&bytes)?;
                w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
                fs::rename(&tmp, &target)
            })();
            if let Err(e) = result {
                let _ = fs::remove_file(&tmp);
                return Err(e).with_context(|| format!("writing {}", target.display()));
            }
            written.push(target);
        }
        Ok(written)
    }
}
