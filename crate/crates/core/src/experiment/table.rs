use std::io::Write;
use std::path::Path;

use crate::{Error, Result};

/// Numeric CSV with a block of `# key=value` metadata lines before the
/// column header.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Numeric(format!("csv: {e}"))
}

impl CsvTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { meta: Vec::new(), columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.set_meta(key, value);
        self
    }

    /// Sets or replaces a metadata entry, keeping first-insertion order.
    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string().replace(['\n', '\r'], " ");
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.meta.push((key.to_string(), value)),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::arg(format!("row has {} values for {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Renders the table. Values use the shortest round-trip exponent
    /// form, so output is byte-stable for identical inputs.
    pub fn to_csv_string(&self) -> Result<String> {
        let mut out = Vec::new();
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={v}")?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.columns).map_err(csv_err)?;
            for row in &self.rows {
                w.write_record(row.iter().map(|x| format!("{x:e}"))).map_err(csv_err)?;
            }
            w.flush()?;
        }
        String::from_utf8(out).map_err(|e| Error::Numeric(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()?)?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut body = 0;
        for line in text.lines() {
            let Some(rest) = line.strip_prefix('#') else { break };
            body += line.len() + 1;
            if let Some((k, v)) = rest.trim().split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        let mut r = csv::ReaderBuilder::new().from_reader(text[body.min(text.len())..].as_bytes());
        let columns = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Numeric(format!("csv value '{s}': {e}"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { meta, columns, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut t = CsvTable::new(["t", "x"]).with_meta("seed", 3).with_meta("note", "a\nb");
        t.push_row(vec![0.0, 0.1]).unwrap();
        t.push_row(vec![1e-300, -std::f64::consts::PI]).unwrap();
        let s = t.to_csv_string().unwrap();
        assert!(s.starts_with("# seed=3\n# note=a b\nt,x\n"));
        let back = CsvTable::parse(&s).unwrap();
        assert_eq!(back, CsvTable { meta: t.meta.clone(), ..t.clone() });
        assert_eq!(back.meta("seed"), Some("3"));
        assert_eq!(back.column("x").unwrap()[1], -std::f64::consts::PI);
    }

    #[test]
    fn rejects_ragged_rows() {
        let mut t = CsvTable::new(["a", "b"]);
        assert!(t.push_row(vec![1.0]).is_err());
    }

    #[test]
    fn set_meta_replaces() {
        let mut t = CsvTable::new(["a"]).with_meta("k", 1);
        t.set_meta("k", 2);
        assert_eq!(t.meta, vec![("k".to_string(), "2".to_string())]);
    }
}
