use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::full_column_rank;
use crate::table::{Column, Table};

pub const INTERCEPT: &str = "(Intercept)";

/// Design matrix with a (tested, nuisance) column partition, plus the response.
///
/// `offset` already contains `X_D * null_value`, so a null fit only has to
/// estimate the nuisance coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    x: DMatrix<f64>,
    names: Vec<String>,
    tested: Vec<usize>,
    nuisance: Vec<usize>,
    null_value: Vec<f64>,
    base_offset: Vec<f64>,
    offset: Vec<f64>,
    response: Vec<f64>,
    trials: Vec<f64>,
}

impl DesignMatrix {
    /// Builds a design from raw parts. Only shapes and the column partition are
    /// validated; rank is checked by the fitting routines.
    pub fn new(
        x: DMatrix<f64>,
        names: Vec<String>,
        tested: Vec<usize>,
        response: Vec<f64>,
        null_value: Vec<f64>,
    ) -> Result<Self> {
        let (n, k) = x.shape();
        if names.len() != k {
            return Err(Error::InvalidInput(format!(
                "{} column names for {k} columns",
                names.len()
            )));
        }
        if response.len() != n {
            return Err(Error::InvalidInput(format!(
                "response has {} rows, design has {n}",
                response.len()
            )));
        }
        if tested.is_empty() {
            return Err(Error::InvalidInput("no tested columns".into()));
        }
        let mut seen = vec![false; k];
        for &t in &tested {
            if t >= k || seen[t] {
                return Err(Error::InvalidInput(format!("bad tested column index {t}")));
            }
            seen[t] = true;
        }
        let null_value = if null_value.is_empty() {
            vec![0.0; tested.len()]
        } else {
            null_value
        };
        if null_value.len() != tested.len() {
            return Err(Error::InvalidInput(format!(
                "null value has length {}, expected {}",
                null_value.len(),
                tested.len()
            )));
        }
        let nuisance = (0..k).filter(|c| !seen[*c]).collect();
        let mut design = Self {
            x,
            names,
            tested,
            nuisance,
            null_value,
            base_offset: vec![0.0; n],
            offset: vec![0.0; n],
            response,
            trials: vec![1.0; n],
        };
        design.refresh_offset();
        Ok(design)
    }

    fn refresh_offset(&mut self) {
        let n = self.nrows();
        self.offset = (0..n)
            .map(|i| {
                self.base_offset[i]
                    + self
                        .tested
                        .iter()
                        .zip(&self.null_value)
                        .map(|(&c, b)| self.x[(i, c)] * b)
                        .sum::<f64>()
            })
            .collect();
    }

    /// Sets an additional fixed offset (added to `X_D * null_value`).
    pub fn with_base_offset(mut self, offset: Vec<f64>) -> Result<Self> {
        if offset.len() != self.nrows() {
            return Err(Error::InvalidInput("offset length mismatch".into()));
        }
        self.base_offset = offset;
        self.refresh_offset();
        Ok(self)
    }

    /// Binomial trial counts per observation.
    pub fn with_trials(mut self, trials: Vec<f64>) -> Result<Self> {
        if trials.len() != self.nrows() {
            return Err(Error::InvalidInput("trials length mismatch".into()));
        }
        self.trials = trials;
        Ok(self)
    }

    pub fn with_response(mut self, response: Vec<f64>) -> Result<Self> {
        if response.len() != self.nrows() {
            return Err(Error::InvalidInput("response length mismatch".into()));
        }
        self.response = response;
        Ok(self)
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }
    pub fn nrows(&self) -> usize {
        self.x.nrows()
    }
    pub fn ncols(&self) -> usize {
        self.x.ncols()
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn tested(&self) -> &[usize] {
        &self.tested
    }
    pub fn nuisance(&self) -> &[usize] {
        &self.nuisance
    }
    pub fn null_value(&self) -> &[f64] {
        &self.null_value
    }
    pub fn offset(&self) -> &[f64] {
        &self.offset
    }
    pub fn base_offset(&self) -> &[f64] {
        &self.base_offset
    }
    pub fn response(&self) -> &[f64] {
        &self.response
    }
    pub fn trials(&self) -> &[f64] {
        &self.trials
    }

    pub fn tested_names(&self) -> Vec<&str> {
        self.tested.iter().map(|&c| self.names[c].as_str()).collect()
    }

    pub fn columns(&self, idx: &[usize]) -> DMatrix<f64> {
        self.x.select_columns(idx)
    }
    pub fn tested_block(&self) -> DMatrix<f64> {
        self.columns(&self.tested)
    }
    pub fn nuisance_block(&self) -> DMatrix<f64> {
        self.columns(&self.nuisance)
    }

    /// Drops nuisance columns that are linear combinations of earlier nuisance
    /// columns, like R's aliased-coefficient handling.
    pub fn rank_filtered(&self) -> Self {
        let mut keep: Vec<usize> = Vec::new();
        for &c in &self.nuisance {
            let mut trial = keep.clone();
            trial.push(c);
            if full_column_rank(&self.x.select_columns(&trial)) {
                keep = trial;
            }
        }
        if keep.len() == self.nuisance.len() {
            return self.clone();
        }
        let mut order = keep;
        let first_tested = order.len();
        order.extend(&self.tested);
        let mut out = Self {
            x: self.x.select_columns(&order),
            names: order.iter().map(|&c| self.names[c].clone()).collect(),
            tested: (first_tested..order.len()).collect(),
            nuisance: (0..first_tested).collect(),
            null_value: self.null_value.clone(),
            base_offset: self.base_offset.clone(),
            offset: Vec::new(),
            response: self.response.clone(),
            trials: self.trials.clone(),
        };
        out.refresh_offset();
        out
    }
}

/// Resolves a user-facing name to one or more `(name, values)` columns.
///
/// A categorical column expands to treatment-coded dummies (first level is
/// the reference); `<column><level>` selects a single dummy.
fn resolve(table: &Table, name: &str) -> Result<Vec<(String, Vec<f64>)>> {
    match table.column(name) {
        Some(Column::Numeric(v)) => return Ok(vec![(name.to_string(), v.clone())]),
        Some(Column::Categorical { levels, codes }) => {
            return Ok(levels
                .iter()
                .enumerate()
                .skip(1)
                .map(|(l, level)| {
                    let dummy = codes.iter().map(|&c| f64::from(u8::from(c == l))).collect();
                    (format!("{name}{level}"), dummy)
                })
                .collect())
        }
        None => {}
    }
    for col_name in table.names() {
        if let Some(Column::Categorical { levels, codes }) = table.column(col_name) {
            if let Some(level) = name.strip_prefix(col_name.as_str()) {
                if let Some(l) = levels.iter().skip(1).position(|lv| lv == level) {
                    let l = l + 1;
                    let dummy = codes.iter().map(|&c| f64::from(u8::from(c == l))).collect();
                    return Ok(vec![(name.to_string(), dummy)]);
                }
            }
        }
    }
    Err(Error::UnknownColumn(name.to_string()))
}

/// Assembles `X` in the order (intercept, nuisance, tested).
pub fn build_design(
    table: &Table,
    response: &str,
    tested: &[&str],
    nuisance: &[&str],
    intercept: bool,
    null_value: &[f64],
) -> Result<DesignMatrix> {
    let y = table.numeric(response)?.to_vec();
    let n = y.len();
    let mut cols: Vec<(String, Vec<f64>)> = Vec::new();
    if intercept {
        cols.push((INTERCEPT.to_string(), vec![1.0; n]));
    }
    for name in nuisance {
        cols.extend(resolve(table, name)?);
    }
    let n_nuis = cols.len();
    for name in tested {
        for (cname, values) in resolve(table, name)? {
            let constant = values.iter().all(|v| *v == values[0]);
            if constant && intercept {
                return Err(Error::ConstantTestedColumn(cname));
            }
            cols.push((cname, values));
        }
    }
    if cols.len() == n_nuis {
        return Err(Error::InvalidInput("no tested columns".into()));
    }
    let k = cols.len();
    let x = DMatrix::from_fn(n, k, |i, j| cols[j].1[i]);
    if !full_column_rank(&x.columns(0, n_nuis).into_owned()) {
        return Err(Error::RankDeficient);
    }
    let names = cols.into_iter().map(|(name, _)| name).collect();
    DesignMatrix::new(x, names, (n_nuis..k).collect(), y, null_value.to_vec())
}
