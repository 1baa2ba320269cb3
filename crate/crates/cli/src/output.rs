use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

/// Files written by one command. Dropping without [`Outputs::commit`]
/// removes everything written so far, so a failed run leaves no partial
/// output behind.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
    committed: bool,
}

impl Outputs {
    pub fn new(dir: impl Into<PathBuf>) -> anyhow::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir,
            written: Vec::new(),
            committed: false,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes `name` inside the output directory.
    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> anyhow::Result<PathBuf> {
        let path = self.path(name);
        // record first: a failed write may still have created the file
        self.written.push(path.clone());
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }

    /// Writes through a closure that streams into a buffer.
    pub fn write_with(
        &mut self,
        name: &str,
        fill: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    ) -> anyhow::Result<PathBuf> {
        let mut buf = Vec::new();
        fill(&mut buf).with_context(|| format!("cannot encode {name}"))?;
        self.write(name, buf)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.committed {
            for path in &self.written {
                let _ = fs::remove_file(path);
            }
        }
    }
}
