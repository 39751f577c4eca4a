//! `perm-matrix-v1` documents: JSON with a schema tag, the dimension, the
//! domain and a row-major entry list.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CMatrix, Matrix};
use crate::error::{Error, Result};

pub const MATRIX_SCHEMA: &str = "perm-matrix-v1";

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixFile {
    Complex(CMatrix),
    Real(Matrix<f64>),
    Integer(Matrix<i64>),
}

impl MatrixFile {
    pub fn n(&self) -> usize {
        match self {
            MatrixFile::Complex(m) => m.n(),
            MatrixFile::Real(m) => m.n(),
            MatrixFile::Integer(m) => m.n(),
        }
    }

    pub fn domain(&self) -> &'static str {
        match self {
            MatrixFile::Complex(_) => "complex",
            MatrixFile::Real(_) => "real",
            MatrixFile::Integer(_) => "integer",
        }
    }

    /// Widens to complex entries.
    pub fn to_complex(&self) -> CMatrix {
        match self {
            MatrixFile::Complex(m) => m.clone(),
            MatrixFile::Real(m) => m.map(|&x| Complex64::new(x, 0.0)),
            MatrixFile::Integer(m) => m.map(|&x| Complex64::new(x as f64, 0.0)),
        }
    }
}

/// Raw document shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub schema: String,
    pub n: usize,
    pub domain: String,
    pub entries: Vec<Value>,
}

impl MatrixDocument {
    pub fn from_matrix(file: &MatrixFile) -> Self {
        let entries = match file {
            MatrixFile::Complex(m) => m.entries().iter().map(|z| serde_json::json!([z.re, z.im])).collect(),
            MatrixFile::Real(m) => m.entries().iter().map(|&x| serde_json::json!(x)).collect(),
            MatrixFile::Integer(m) => m.entries().iter().map(|&x| serde_json::json!(x)).collect(),
        };
        MatrixDocument { schema: MATRIX_SCHEMA.to_string(), n: file.n(), domain: file.domain().to_string(), entries }
    }

    pub fn into_matrix(self) -> Result<MatrixFile> {
        if self.schema != MATRIX_SCHEMA {
            return Err(Error::Format(format!("unknown schema {:?}", self.schema)));
        }
        let n = self.n;
        let bad = |i: usize, what: &str| Error::Format(format!("entry {i}: expected {what}"));
        match self.domain.as_str() {
            "complex" => {
                let mut out = Vec::with_capacity(self.entries.len());
                for (i, v) in self.entries.iter().enumerate() {
                    let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad(i, "[re, im]"))?;
                    let re = pair[0].as_f64().ok_or_else(|| bad(i, "number"))?;
                    let im = pair[1].as_f64().ok_or_else(|| bad(i, "number"))?;
                    out.push(Complex64::new(re, im));
                }
                Ok(MatrixFile::Complex(Matrix::from_vec(n, out)?))
            }
            "real" => {
                let out = self
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v.as_f64().ok_or_else(|| bad(i, "number")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(MatrixFile::Real(Matrix::from_vec(n, out)?))
            }
            "integer" => {
                let out = self
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v.as_i64().ok_or_else(|| bad(i, "integer")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(MatrixFile::Integer(Matrix::from_vec(n, out)?))
            }
            other => Err(Error::Format(format!("unknown domain {other:?}"))),
        }
    }
}

pub fn parse_matrix(text: &str) -> Result<MatrixFile> {
    let doc: MatrixDocument = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    doc.into_matrix()
}

pub fn render_matrix(file: &MatrixFile) -> String {
    let mut s = serde_json::to_string_pretty(&MatrixDocument::from_matrix(file)).expect("serializable");
    s.push('\n');
    s
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<MatrixFile> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Format(e.to_string()))?;
    parse_matrix(&text)
}

pub fn write_matrix_file(path: impl AsRef<Path>, file: &MatrixFile) -> Result<()> {
    std::fs::write(path.as_ref(), render_matrix(file)).map_err(|e| Error::Format(e.to_string()))
}
