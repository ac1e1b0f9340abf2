use std::io::Write;
use std::path::Path;

use rand::RngExt;
use rand_distr::{Distribution, StandardNormal};

use crate::chain::chain_rng;
use crate::error::{Error, Result};

/// Covariates (rows = data points) and binary labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub names: Vec<String>,
}

impl Dataset {
    pub fn rows(&self) -> usize {
        self.y.len()
    }

    pub fn cols(&self) -> usize {
        self.names.len()
    }

    /// Zero mean, unit variance per column (constant columns are centred only).
    pub fn standardize(&mut self) {
        let n = self.rows() as f64;
        for j in 0..self.cols() {
            let mean = self.x.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = self.x.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
            for r in &mut self.x {
                r[j] = (r[j] - mean) / sd;
            }
        }
    }
}

/// Shapes (rows, covariates) of the benchmark datasets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KnownDataset {
    German,
    Heart,
    Australian,
}

impl KnownDataset {
    pub fn shape(self) -> (usize, usize) {
        match self {
            KnownDataset::German => (1000, 25),
            KnownDataset::Heart => (532, 14),
            KnownDataset::Australian => (690, 15),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "german" => Some(Self::German),
            "heart" => Some(Self::Heart),
            "australian" => Some(Self::Australian),
            _ => None,
        }
    }

    /// Guess from a file stem such as `german.csv`.
    pub fn from_path(path: &Path) -> Option<Self> {
        path.file_stem().and_then(|s| s.to_str()).and_then(Self::from_name)
    }
}

/// Reads a comma-separated file whose last column is a 0/1 label. A first
/// row that does not parse as numbers is taken as a header. Covariates are
/// standardized.
pub fn load_dataset(path: &Path, expected: Option<KnownDataset>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut names: Option<Vec<String>> = None;
    let mut width = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(|s| s.parse::<f64>()).collect();
        let vals = match parsed {
            Ok(v) => v,
            Err(_) if i == 0 => {
                let cols: Vec<String> = rec.iter().map(str::to_string).collect();
                width = Some(cols.len());
                names = Some(cols[..cols.len().saturating_sub(1)].to_vec());
                continue;
            }
            Err(e) => return Err(Error::Data { row, msg: format!("not a number: {e}") }),
        };
        if vals.len() < 2 {
            return Err(Error::Data { row, msg: "need at least one covariate and a label".into() });
        }
        match width {
            Some(w) if w != vals.len() => {
                return Err(Error::Data { row, msg: format!("{} fields, expected {w}", vals.len()) })
            }
            _ => width = Some(vals.len()),
        }
        let label = vals[vals.len() - 1];
        if label != 0.0 && label != 1.0 {
            return Err(Error::Data { row, msg: format!("label {label} is not 0 or 1") });
        }
        y.push(label);
        x.push(vals[..vals.len() - 1].to_vec());
    }
    let cols = width.map(|w| w - 1).unwrap_or(0);
    let names = names.unwrap_or_else(|| (0..cols).map(|j| format!("x{j}")).collect());
    if let Some(k) = expected {
        let (r, c) = k.shape();
        if x.len() != r || cols != c {
            return Err(Error::Data {
                row: 0,
                msg: format!("{k:?} should be {r} x {c}, found {} x {cols}", x.len()),
            });
        }
    }
    let mut d = Dataset { x, y, names };
    d.standardize();
    Ok(d)
}

/// Logistic data with standard-normal covariates and labels drawn from a
/// fixed coefficient vector. Not standardized.
pub fn synthetic_dataset(rows: usize, cols: usize, seed: u64) -> Dataset {
    let mut rng = chain_rng(seed, 0);
    let w: Vec<f64> = (0..cols).map(|j| if j % 2 == 0 { 0.8 } else { -0.5 }).collect();
    let mut x = Vec::with_capacity(rows);
    let mut y = Vec::with_capacity(rows);
    for _ in 0..rows {
        let r: Vec<f64> = (0..cols).map(|_| StandardNormal.sample(&mut rng)).collect();
        let t: f64 = r.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + 0.2;
        let p = 1.0 / (1.0 + (-t).exp());
        y.push(if rng.random::<f64>() < p { 1.0 } else { 0.0 });
        x.push(r);
    }
    Dataset { x, y, names: (0..cols).map(|j| format!("x{j}")).collect() }
}

/// Writes covariates and label with a header row.
pub fn write_dataset_csv(d: &Dataset, w: impl Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header = d.names.clone();
    header.push("label".into());
    wr.write_record(&header)?;
    for (r, y) in d.x.iter().zip(&d.y) {
        let mut rec: Vec<String> = r.iter().map(|a| format!("{a}")).collect();
        rec.push(format!("{y}"));
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn header_detection_and_standardization() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("tiny.csv");
        fs::write(&p, "a,b,label\n1,10,0\n2,20,1\n3,30,1\n").unwrap();
        let d = load_dataset(&p, None).unwrap();
        assert_eq!((d.rows(), d.cols()), (3, 2));
        assert_eq!(d.names, vec!["a", "b"]);
        let mean: f64 = d.x.iter().map(|r| r[0]).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-12);
        let again = load_dataset(&p, None).unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn bad_label_reports_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        fs::write(&p, "1,2,0\n3,4,2\n").unwrap();
        match load_dataset(&p, None) {
            Err(Error::Data { row, .. }) => assert_eq!(row, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shape_check_for_known_names() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("heart.csv");
        fs::write(&p, "1,2,0\n3,4,1\n").unwrap();
        assert_eq!(KnownDataset::from_path(&p), Some(KnownDataset::Heart));
        assert!(load_dataset(&p, Some(KnownDataset::Heart)).is_err());
    }
}
