//! Files written under the output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes through a temporary file so a crash never leaves half a report.
    pub fn text(&self, name: &str, body: &str) -> anyhow::Result<PathBuf> {
        let path = self.path(name);
        let tmp = self.path(&format!(".{name}.tmp"));
        fs::write(&tmp, body).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path).with_context(|| format!("writing {}", path.display()))?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> anyhow::Result<PathBuf> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.text(name, &body)
    }
}

/// Comma-separated table with a header row.
pub struct Csv {
    body: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut body = header.join(",");
        body.push('\n');
        Self { body }
    }

    pub fn row<I, T>(&mut self, cells: I)
    where
        I: IntoIterator<Item = T>,
        T: std::fmt::Display,
    {
        let mut first = true;
        for c in cells {
            if !first {
                self.body.push(',');
            }
            first = false;
            write!(self.body, "{c}").unwrap();
        }
        self.body.push('\n');
    }

    pub fn finish(self) -> String {
        self.body
    }
}

/// Square matrix with a leading label column.
pub fn matrix_csv(labels: &[String], rows: &[Vec<f64>]) -> String {
    let mut header = vec!["id"];
    header.extend(labels.iter().map(String::as_str));
    let mut csv = Csv::new(&header);
    for (label, row) in labels.iter().zip(rows) {
        csv.row(std::iter::once(label.clone()).chain(row.iter().map(f64::to_string)));
    }
    csv.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_and_matrix() {
        let mut c = Csv::new(&["a", "b"]);
        c.row([1.5, 2.0]);
        assert_eq!(c.finish(), "a,b\n1.5,2\n");
        let m = matrix_csv(&["x".into(), "y".into()], &[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(m, "id,x,y\nx,0,1\ny,1,0\n");
    }

    #[test]
    fn json_is_written_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutputDir::create(&dir.path().join("nested")).unwrap();
        let p = out.json("r.json", &vec![1, 2]).unwrap();
        assert_eq!(fs::read_to_string(p).unwrap(), "[\n  1,\n  2\n]\n");
        assert_eq!(fs::read_dir(out.path("")).unwrap().count(), 1);
    }
}
