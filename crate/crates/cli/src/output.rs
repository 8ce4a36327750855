use serde::Serialize;
use std::fs;
use std::io;
use std::path::Path;

/// Files produced by a command, held in memory until the command has finished so a failed
/// run leaves nothing behind.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|f| f.0.as_str())
    }

    /// Writes each file through a temporary sibling and a rename.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            let tmp = dir.join(format!(".{name}.tmp"));
            fs::write(&tmp, bytes)?;
            fs::rename(&tmp, dir.join(name))?;
        }
        Ok(())
    }
}
