//! Named-column data, read from headered CSV.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    /// Levels in order of first appearance; the first is the reference level.
    Categorical { levels: Vec<String>, codes: Vec<usize> },
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn categorical<S: AsRef<str>>(values: &[S]) -> Self {
        let mut levels: Vec<String> = Vec::new();
        let codes = values
            .iter()
            .map(|v| {
                let v = v.as_ref();
                match levels.iter().position(|l| l == v) {
                    Some(p) => p,
                    None => {
                        levels.push(v.to_string());
                        levels.len() - 1
                    }
                }
            })
            .collect();
        Column::Categorical { levels, codes }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    names: Vec<String>,
    columns: Vec<Column>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a column, replacing any existing column with the same name.
    pub fn push(&mut self, name: impl Into<String>, column: Column) -> Result<()> {
        let name = name.into();
        if let Some(first) = self.columns.first() {
            if first.len() != column.len() {
                return Err(Error::InvalidInput(format!(
                    "column `{name}` has {} rows, expected {}",
                    column.len(),
                    first.len()
                )));
            }
        }
        match self.names.iter().position(|n| *n == name) {
            Some(p) => self.columns[p] = column,
            None => {
                self.names.push(name);
                self.columns.push(column);
            }
        }
        Ok(())
    }

    pub fn with_numeric(mut self, name: &str, values: Vec<f64>) -> Result<Self> {
        self.push(name, Column::Numeric(values))?;
        Ok(self)
    }

    pub fn with_categorical<S: AsRef<str>>(mut self, name: &str, values: &[S]) -> Result<Self> {
        self.push(name, Column::categorical(values))?;
        Ok(self)
    }

    pub fn nrows(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|p| &self.columns[p])
    }

    pub fn numeric(&self, name: &str) -> Result<&[f64]> {
        match self.column(name) {
            Some(Column::Numeric(v)) => Ok(v),
            Some(Column::Categorical { .. }) => Err(Error::InvalidInput(format!(
                "column `{name}` is categorical, expected numeric"
            ))),
            None => Err(Error::UnknownColumn(name.to_string())),
        }
    }

    /// Parses CSV text. A column is numeric when every cell parses as `f64`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
        for record in rdr.records() {
            let record = record?;
            for (col, cell) in cells.iter_mut().zip(record.iter()) {
                col.push(cell.trim().to_string());
            }
        }
        let mut table = Table::new();
        for (name, raw) in headers.into_iter().zip(cells) {
            let parsed: Option<Vec<f64>> = raw.iter().map(|c| c.parse::<f64>().ok()).collect();
            let column = match parsed {
                Some(v) => Column::Numeric(v),
                None => Column::categorical(&raw),
            };
            table.push(name, column)?;
        }
        Ok(table)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv_reader(file)
    }
}
