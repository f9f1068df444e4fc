//! Trial data containers: responses, doses and partitioning covariates.
//!
//! The expected layout is wide: one row per patient with a numeric response,
//! a numeric dose (one of a small set of design dose levels, the lowest being
//! placebo at dose 0) and any number of partitioning covariates, each either
//! numeric or categorical. Missing values are not supported.

use crate::error::{Error, Result};
use std::path::Path;

/// Values of one partitioning covariate across all patients.
#[derive(Debug, Clone, PartialEq)]
pub enum CovariateValues {
    Numeric(Vec<f64>),
    /// `codes[i]` indexes into `levels`; levels are ordered by first appearance.
    Categorical { levels: Vec<String>, codes: Vec<u32> },
}

/// A named partitioning covariate.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariate {
    pub name: String,
    pub values: CovariateValues,
}

impl Covariate {
    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Self {
        Covariate {
            name: name.into(),
            values: CovariateValues::Numeric(values),
        }
    }

    /// Builds a categorical covariate from raw string values; levels are
    /// assigned codes in order of first appearance.
    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, raw: &[S]) -> Self {
        let mut levels: Vec<String> = Vec::new();
        let mut codes = Vec::with_capacity(raw.len());
        for v in raw {
            let v = v.as_ref();
            let code = match levels.iter().position(|l| l == v) {
                Some(k) => k as u32,
                None => {
                    levels.push(v.to_string());
                    (levels.len() - 1) as u32
                }
            };
            codes.push(code);
        }
        Covariate {
            name: name.into(),
            values: CovariateValues::Categorical { levels, codes },
        }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            CovariateValues::Numeric(v) => v.len(),
            CovariateValues::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.values, CovariateValues::Numeric(_))
    }

    pub fn numeric_values(&self) -> Option<&[f64]> {
        match &self.values {
            CovariateValues::Numeric(v) => Some(v),
            _ => None,
        }
    }

    /// Level name for one row of a categorical covariate.
    pub fn level_name(&self, row: usize) -> Option<&str> {
        match &self.values {
            CovariateValues::Categorical { levels, codes } => {
                codes.get(row).map(|&c| levels[c as usize].as_str())
            }
            _ => None,
        }
    }

    pub(crate) fn subset(&self, rows: &[usize]) -> Covariate {
        let values = match &self.values {
            CovariateValues::Numeric(v) => {
                CovariateValues::Numeric(rows.iter().map(|&i| v[i]).collect())
            }
            CovariateValues::Categorical { levels, codes } => CovariateValues::Categorical {
                levels: levels.clone(),
                codes: rows.iter().map(|&i| codes[i]).collect(),
            },
        };
        Covariate {
            name: self.name.clone(),
            values,
        }
    }
}

/// One trial dataset: `n` patients with responses, doses and `J` covariates.
#[derive(Debug, Clone)]
pub struct TrialData {
    responses: Vec<f64>,
    doses: Vec<f64>,
    covariates: Vec<Covariate>,
}

impl TrialData {
    pub fn new(responses: Vec<f64>, doses: Vec<f64>, covariates: Vec<Covariate>) -> Result<Self> {
        let n = responses.len();
        if n == 0 {
            return Err(Error::Data("dataset is empty".into()));
        }
        if doses.len() != n {
            return Err(Error::Data(format!(
                "dose vector has length {} but there are {} responses",
                doses.len(),
                n
            )));
        }
        if let Some(bad) = responses.iter().position(|y| !y.is_finite()) {
            return Err(Error::Data(format!("non-finite response at row {}", bad + 1)));
        }
        if let Some(bad) = doses.iter().position(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::Data(format!(
                "dose at row {} must be finite and non-negative",
                bad + 1
            )));
        }
        for cov in &covariates {
            if cov.len() != n {
                return Err(Error::Data(format!(
                    "covariate '{}' has length {} but there are {} responses",
                    cov.name,
                    cov.len(),
                    n
                )));
            }
            match &cov.values {
                CovariateValues::Numeric(v) => {
                    if let Some(bad) = v.iter().position(|x| !x.is_finite()) {
                        return Err(Error::Data(format!(
                            "non-finite value in covariate '{}' at row {}",
                            cov.name,
                            bad + 1
                        )));
                    }
                }
                CovariateValues::Categorical { levels, codes } => {
                    if let Some(bad) = codes.iter().position(|&c| c as usize >= levels.len()) {
                        return Err(Error::Data(format!(
                            "invalid category code in covariate '{}' at row {}",
                            cov.name,
                            bad + 1
                        )));
                    }
                }
            }
        }
        Ok(TrialData {
            responses,
            doses,
            covariates,
        })
    }

    pub fn n(&self) -> usize {
        self.responses.len()
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn doses(&self) -> &[f64] {
        &self.doses
    }

    pub fn covariates(&self) -> &[Covariate] {
        &self.covariates
    }

    pub fn covariate(&self, j: usize) -> &Covariate {
        &self.covariates[j]
    }

    pub fn n_covariates(&self) -> usize {
        self.covariates.len()
    }

    pub fn covariate_names(&self) -> Vec<String> {
        self.covariates.iter().map(|c| c.name.clone()).collect()
    }

    /// New dataset consisting of the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> TrialData {
        debug_assert!(rows.iter().all(|&i| i < self.n()));
        TrialData {
            responses: rows.iter().map(|&i| self.responses[i]).collect(),
            doses: rows.iter().map(|&i| self.doses[i]).collect(),
            covariates: self.covariates.iter().map(|c| c.subset(rows)).collect(),
        }
    }

    /// Checks that every observed dose is one of the design dose levels.
    pub fn check_doses_in(&self, dose_levels: &[f64]) -> Result<()> {
        for (i, d) in self.doses.iter().enumerate() {
            if !dose_levels.contains(d) {
                return Err(Error::Data(format!(
                    "dose {} at row {} is not one of the design dose levels {:?}",
                    d,
                    i + 1,
                    dose_levels
                )));
            }
        }
        Ok(())
    }

    /// Loads a delimiter-separated file with a header row.
    ///
    /// `numeric` and `categorical` name the partitioning covariate columns;
    /// all referenced columns must exist and may not contain missing values.
    pub fn from_csv(
        path: &Path,
        response_col: &str,
        dose_col: &str,
        numeric: &[String],
        categorical: &[String],
    ) -> Result<TrialData> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| Error::Data(format!("cannot read header: {e}")))?
            .iter()
            .map(|h| h.to_string())
            .collect();
        let col = |name: &str| -> Result<usize> {
            headers.iter().position(|h| h == name).ok_or_else(|| {
                Error::Data(format!(
                    "column '{name}' not found; available columns: {}",
                    headers.join(", ")
                ))
            })
        };
        let resp_idx = col(response_col)?;
        let dose_idx = col(dose_col)?;
        let num_idx: Vec<usize> = numeric.iter().map(|c| col(c)).collect::<Result<_>>()?;
        let cat_idx: Vec<usize> = categorical.iter().map(|c| col(c)).collect::<Result<_>>()?;

        let mut responses = Vec::new();
        let mut doses = Vec::new();
        let mut num_cols: Vec<Vec<f64>> = vec![Vec::new(); num_idx.len()];
        let mut cat_cols: Vec<Vec<String>> = vec![Vec::new(); cat_idx.len()];
        for (rec_no, record) in reader.records().enumerate() {
            let row = rec_no + 2; // 1-based, after the header
            let record = record.map_err(|e| Error::Data(format!("row {row}: {e}")))?;
            let parse = |idx: usize, name: &str| -> Result<f64> {
                let raw = record.get(idx).unwrap_or("");
                if raw.is_empty() {
                    return Err(Error::Data(format!(
                        "row {row}, column '{name}': missing value"
                    )));
                }
                raw.parse::<f64>().map_err(|_| {
                    Error::Data(format!(
                        "row {row}, column '{name}': cannot parse '{raw}' as a number"
                    ))
                })
            };
            responses.push(parse(resp_idx, response_col)?);
            doses.push(parse(dose_idx, dose_col)?);
            for (k, &idx) in num_idx.iter().enumerate() {
                num_cols[k].push(parse(idx, &numeric[k])?);
            }
            for (k, &idx) in cat_idx.iter().enumerate() {
                let raw = record.get(idx).unwrap_or("");
                if raw.is_empty() {
                    return Err(Error::Data(format!(
                        "row {row}, column '{}': missing value",
                        categorical[k]
                    )));
                }
                cat_cols[k].push(raw.to_string());
            }
        }

        let mut covariates = Vec::new();
        for (k, name) in numeric.iter().enumerate() {
            covariates.push(Covariate::numeric(name.clone(), std::mem::take(&mut num_cols[k])));
        }
        for (k, name) in categorical.iter().enumerate() {
            covariates.push(Covariate::categorical(name.clone(), &cat_cols[k]));
        }
        TrialData::new(responses, doses, covariates)
    }
}
