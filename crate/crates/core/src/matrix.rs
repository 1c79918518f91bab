//! Row-major feature matrices and their CSV/JSONL exchange formats.

use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("row `{doc_id}` has {found} values, expected {expected}")]
    Width {
        doc_id: String,
        expected: usize,
        found: usize,
    },
    #[error("matrix widths differ: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("feature header mismatch at column {column}: expected `{expected}`, found `{found}`")]
    Header {
        column: usize,
        expected: String,
        found: String,
    },
    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error(transparent)]
    CsvLib(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The standardization frame a matrix lives in. Distances are only
/// comparable between matrices in the same frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    Raw,
    Standardized {
        register: String,
        inventory_version: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub doc_id: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub register: String,
    pub source: String,
    pub inventory_version: String,
    pub frame: Frame,
    doc_ids: Vec<String>,
    width: usize,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(
        register: impl Into<String>,
        source: impl Into<String>,
        inventory_version: impl Into<String>,
        width: usize,
    ) -> Self {
        FeatureMatrix {
            register: register.into(),
            source: source.into(),
            inventory_version: inventory_version.into(),
            frame: Frame::Raw,
            doc_ids: Vec::new(),
            width,
            values: Vec::new(),
        }
    }

    /// Builds an anonymous matrix from dense rows; ids are the row numbers.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let width = rows.first().map_or(0, Vec::len);
        let mut m = FeatureMatrix::new("", "", "", width);
        for (i, row) in rows.iter().enumerate() {
            m.push_row(i.to_string(), row)?;
        }
        Ok(m)
    }

    pub fn from_vectors(
        register: &str,
        source: &str,
        inventory_version: &str,
        width: usize,
        vectors: Vec<FeatureVector>,
    ) -> Result<Self, MatrixError> {
        let mut m = FeatureMatrix::new(register, source, inventory_version, width);
        for v in vectors {
            m.push_row(v.doc_id, &v.values)?;
        }
        Ok(m)
    }

    pub fn push_row(&mut self, doc_id: impl Into<String>, row: &[f64]) -> Result<(), MatrixError> {
        let doc_id = doc_id.into();
        if row.len() != self.width {
            return Err(MatrixError::Width {
                doc_id,
                expected: self.width,
                found: row.len(),
            });
        }
        self.doc_ids.push(doc_id);
        self.values.extend_from_slice(row);
        Ok(())
    }

    pub fn with_labels(mut self, register: &str, source: &str) -> Self {
        self.register = register.to_string();
        self.source = source.to_string();
        self
    }

    pub fn nrows(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn ncols(&self) -> usize {
        self.width
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.width..(i + 1) * self.width]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.nrows()).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> Vec<FeatureVector> {
        self.doc_ids
            .iter()
            .zip(self.rows())
            .map(|(id, r)| FeatureVector {
                doc_id: id.clone(),
                values: r.to_vec(),
            })
            .collect()
    }

    /// Copies the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(indices.len() * self.width);
        let mut doc_ids = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
            doc_ids.push(self.doc_ids[i].clone());
        }
        FeatureMatrix {
            register: self.register.clone(),
            source: self.source.clone(),
            inventory_version: self.inventory_version.clone(),
            frame: self.frame.clone(),
            doc_ids,
            width: self.width,
            values,
        }
    }

    /// Rows whose doc ids appear in `ids`, in the order of `ids`.
    pub fn select_ids(&self, ids: &[String]) -> Option<FeatureMatrix> {
        let index: std::collections::HashMap<&str, usize> = self
            .doc_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let rows: Option<Vec<usize>> = ids.iter().map(|id| index.get(id.as_str()).copied()).collect();
        rows.map(|r| self.select(&r))
    }

    /// Stacks rows of `other` under `self`. Labels of `self` are kept.
    pub fn concat(&self, other: &FeatureMatrix) -> Result<FeatureMatrix, MatrixError> {
        if self.width != other.width {
            return Err(MatrixError::WidthMismatch(self.width, other.width));
        }
        let mut out = self.clone();
        out.doc_ids.extend(other.doc_ids.iter().cloned());
        out.values.extend_from_slice(&other.values);
        Ok(out)
    }

    /// CSV with header `doc_id,register,source,<feature ids>`.
    pub fn to_csv(&self, feature_ids: &[&str]) -> Result<String, MatrixError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["doc_id", "register", "source"];
        header.extend_from_slice(feature_ids);
        writer.write_record(&header)?;
        for (id, row) in self.doc_ids.iter().zip(self.rows()) {
            let mut record = vec![id.clone(), self.register.clone(), self.source.clone()];
            record.extend(row.iter().map(|v| format_value(*v)));
            writer.write_record(&record)?;
        }
        let bytes = writer.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Reads the CSV written by [`FeatureMatrix::to_csv`]. The feature
    /// columns must match `feature_ids` exactly.
    pub fn from_csv<R: Read>(
        input: R,
        feature_ids: &[&str],
        inventory_version: &str,
    ) -> Result<FeatureMatrix, MatrixError> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader.headers()?.clone();
        let expected: Vec<&str> = ["doc_id", "register", "source"]
            .into_iter()
            .chain(feature_ids.iter().copied())
            .collect();
        for (column, want) in expected.iter().enumerate() {
            let found = headers.get(column).unwrap_or("");
            if found != *want {
                return Err(MatrixError::Header {
                    column,
                    expected: want.to_string(),
                    found: found.to_string(),
                });
            }
        }
        if headers.len() != expected.len() {
            return Err(MatrixError::Header {
                column: expected.len(),
                expected: "<end of header>".into(),
                found: headers.get(expected.len()).unwrap_or("").to_string(),
            });
        }
        let mut matrix = FeatureMatrix::new("", "", inventory_version, feature_ids.len());
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            if matrix.is_empty() {
                matrix.register = record[1].to_string();
                matrix.source = record[2].to_string();
            }
            let row: Result<Vec<f64>, _> = record.iter().skip(3).map(str::parse::<f64>).collect();
            let row = row.map_err(|e| MatrixError::Csv {
                line,
                message: e.to_string(),
            })?;
            matrix.push_row(&record[0], &row)?;
        }
        Ok(matrix)
    }

    /// One JSON object per row: `{"doc_id", "register", "source", "values"}`.
    pub fn to_jsonl(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            doc_id: &'a str,
            register: &'a str,
            source: &'a str,
            values: &'a [f64],
        }
        let mut out = String::new();
        for (id, row) in self.doc_ids.iter().zip(self.rows()) {
            let line = Line {
                doc_id: id,
                register: &self.register,
                source: &self.source,
                values: row,
            };
            out.push_str(&serde_json::to_string(&line).expect("row serializes"));
            out.push('\n');
        }
        out
    }
}

/// Shortest representation that parses back to the same f64.
fn format_value(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let mut m = FeatureMatrix::new("XSum", "human", "v", 3);
        m.push_row("a", &[0.1, 1.0 / 3.0, 1e-300]).unwrap();
        m.push_row("b", &[-2.5, 0.0, 123456.789]).unwrap();
        let ids = ["x", "y", "z"];
        let csv = m.to_csv(&ids).unwrap();
        assert!(csv.starts_with("doc_id,register,source,x,y,z\n"));
        let back = FeatureMatrix::from_csv(csv.as_bytes(), &ids, "v").unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn header_mismatch_is_reported() {
        let csv = "doc_id,register,source,x,q\nA,r,s,1,2\n";
        let err = FeatureMatrix::from_csv(csv.as_bytes(), &["x", "y"], "v").unwrap_err();
        assert!(matches!(err, MatrixError::Header { column: 4, .. }));
    }

    #[test]
    fn wrong_width_row() {
        let mut m = FeatureMatrix::new("", "", "", 2);
        assert!(m.push_row("a", &[1.0]).is_err());
    }

    #[test]
    fn select_and_concat() {
        let m = FeatureMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let s = m.select(&[2, 0]);
        assert_eq!(s.values(), &[3.0, 1.0]);
        assert_eq!(s.doc_ids(), &["2".to_string(), "0".to_string()]);
        let c = m.concat(&s).unwrap();
        assert_eq!(c.nrows(), 5);
        let by_id = m.select_ids(&["1".to_string()]).unwrap();
        assert_eq!(by_id.values(), &[2.0]);
        assert!(m.select_ids(&["missing".to_string()]).is_none());
    }
}
