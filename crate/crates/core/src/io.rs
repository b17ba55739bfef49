//! Seed files.
//!
//! ```json
//! {"n": 2, "B": [[0, 1], [-1, 0]], "coefficients": "trivial"}
//! ```
//!
//! `coefficients` is `"trivial"` or `"principal"`. An optional `cluster`
//! field lists the root cluster as Laurent polynomials in the coordinates
//! of another seed; it is only read when two atlases are compared.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::LaurentPoly;
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::seed::{ExchangeMatrix, Seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coefficients {
    Trivial,
    Principal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedFile {
    pub n: usize,
    #[serde(rename = "B")]
    pub b: IntMatrix,
    pub coefficients: Coefficients,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<Vec<String>>,
}

impl SeedFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if f.b.rows() != f.n || f.b.cols() != f.n {
            return Err(Error::Parse(format!(
                "B is {}x{} but n = {}",
                f.b.rows(),
                f.b.cols(),
                f.n
            )));
        }
        if let Some(c) = &f.cluster {
            if c.len() != f.n {
                return Err(Error::Parse(format!("cluster has {} entries, expected {}", c.len(), f.n)));
            }
        }
        Ok(f)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn seed(&self) -> Result<Seed> {
        let b = ExchangeMatrix::new(self.b.clone())?;
        Ok(match self.coefficients {
            Coefficients::Trivial => Seed::trivial(b),
            Coefficients::Principal => Seed::principal(b),
        })
    }

    /// The `cluster` field parsed in a reference frame of rank `nvars` with
    /// coefficient rank `coef_rank`; defaults to the coordinates themselves.
    pub fn identification(&self, nvars: usize, coef_rank: usize) -> Result<Vec<LaurentPoly>> {
        match &self.cluster {
            Some(c) => c.iter().map(|s| LaurentPoly::parse(s, nvars, coef_rank)).collect(),
            None => Ok((0..self.n).map(|i| LaurentPoly::variable(nvars, coef_rank, i)).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_seed_files() {
        let f = SeedFile::from_json(r#"{"n": 2, "B": [[0, 1], [-1, 0]], "coefficients": "principal"}"#).unwrap();
        let s = f.seed().unwrap();
        assert_eq!(s.coef_rank(), 2);
        assert_eq!(f.identification(2, 0).unwrap()[1], LaurentPoly::variable(2, 0, 1));

        let g = SeedFile::from_json(
            r#"{"n": 2, "B": [[0, -1], [1, 0]], "coefficients": "trivial", "cluster": ["x1^-1 + x1^-1*x2", "x2"]}"#,
        )
        .unwrap();
        let ident = g.identification(2, 0).unwrap();
        assert_eq!(ident[0].to_string(), "1*x1^-1 + 1*x1^-1*x2");
    }

    #[test]
    fn rejects_bad_files() {
        for bad in [
            r#"{"n": 3, "B": [[0, 1], [-1, 0]], "coefficients": "trivial"}"#,
            r#"{"n": 2, "B": [[0, 1], [-1, 0]], "coefficients": "geometric"}"#,
            r#"{"n": 2, "B": [[0, 1], [-1]], "coefficients": "trivial"}"#,
            r#"{"n": 2, "B": [[0, 1], [-1, 0]]}"#,
            r#"{"n": 1, "B": [[0]], "coefficients": "trivial", "cluster": []}"#,
            "not json",
        ] {
            assert!(SeedFile::from_json(bad).is_err(), "{bad}");
        }
        let f = SeedFile::from_json(r#"{"n": 2, "B": [[0, 1], [1, 0]], "coefficients": "trivial"}"#).unwrap();
        assert!(matches!(f.seed(), Err(Error::NotSkewSymmetrizable(_))));
    }
}
