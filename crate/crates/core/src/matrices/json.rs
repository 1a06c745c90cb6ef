//! JSON documents for matrices and vectors.
//!
//! Matrix: `{"tail": "zero" | {"identity_from": s}, "entries": [[m, k, v], ...]}`.
//! Vector: `{"coords": [[k, v], ...]}`. Values are numbers or `"p/q"`
//! strings; exact mode writes strings, float mode writes numbers.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::scalar::{scalar_from_json, Scalar};

use super::{CoeffMatrix, FinVector, MatrixError, Tail};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum TailDoc {
    Named(String),
    Identity { identity_from: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    tail: TailDoc,
    entries: Vec<(usize, usize, Value)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorDoc {
    coords: Vec<(usize, Value)>,
}

impl MatrixDoc {
    pub fn from_matrix<S: Scalar>(u: &CoeffMatrix<S>) -> Self {
        let tail = match u.tail() {
            Tail::Zero => TailDoc::Named("zero".to_string()),
            Tail::Identity { start } => TailDoc::Identity { identity_from: start },
        };
        Self {
            tail,
            entries: u.entries().map(|(m, k, v)| (m, k, v.to_json())).collect(),
        }
    }

    pub fn to_matrix<S: Scalar>(&self) -> Result<CoeffMatrix<S>, MatrixError> {
        let tail = match &self.tail {
            TailDoc::Named(name) if name == "zero" => Tail::Zero,
            TailDoc::Named(name) => {
                return Err(MatrixError::Format(format!("unknown tail `{name}`")))
            }
            TailDoc::Identity { identity_from } => Tail::Identity {
                start: *identity_from,
            },
        };
        let entries = self
            .entries
            .iter()
            .map(|(m, k, v)| Ok((*m, *k, scalar_from_json::<S>(v)?)))
            .collect::<Result<Vec<_>, MatrixError>>()?;
        CoeffMatrix::new(tail, entries)
    }
}

impl VectorDoc {
    pub fn from_vector<S: Scalar>(x: &FinVector<S>) -> Self {
        Self {
            coords: x.iter().map(|(k, v)| (k, v.to_json())).collect(),
        }
    }

    pub fn to_vector<S: Scalar>(&self) -> Result<FinVector<S>, MatrixError> {
        let coords = self
            .coords
            .iter()
            .map(|(k, v)| Ok((*k, scalar_from_json::<S>(v)?)))
            .collect::<Result<Vec<_>, MatrixError>>()?;
        FinVector::from_coords(coords)
    }
}

impl<S: Scalar> CoeffMatrix<S> {
    pub fn from_json_str(text: &str) -> Result<Self, MatrixError> {
        let doc: MatrixDoc =
            serde_json::from_str(text).map_err(|e| MatrixError::Format(e.to_string()))?;
        doc.to_matrix()
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(MatrixDoc::from_matrix(self)).expect("matrix documents serialize")
    }
}

impl<S: Scalar> FinVector<S> {
    pub fn from_json_str(text: &str) -> Result<Self, MatrixError> {
        let doc: VectorDoc =
            serde_json::from_str(text).map_err(|e| MatrixError::Format(e.to_string()))?;
        doc.to_vector()
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(VectorDoc::from_vector(self)).expect("vector documents serialize")
    }
}
