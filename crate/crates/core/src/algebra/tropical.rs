//! The tropical semifield `Trop(y_1, ..., y_m)`.
//!
//! Elements are Laurent monomials `y^a`, stored as their exponent vectors.
//! Multiplication adds exponents and the auxiliary addition takes the
//! componentwise minimum. `m = 0` is the trivial semifield `{1}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TropicalElement {
    exponents: Vec<i64>,
}

impl TropicalElement {
    pub fn new(exponents: Vec<i64>) -> Self {
        Self { exponents }
    }

    /// The multiplicative identity of `Trop(y_1..y_m)`.
    pub fn one(rank: usize) -> Self {
        Self { exponents: vec![0; rank] }
    }

    /// The generator `y_i` (0-based).
    pub fn generator(rank: usize, i: usize) -> Self {
        let mut exponents = vec![0; rank];
        exponents[i] = 1;
        Self { exponents }
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn is_one(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: other.rank(),
            });
        }
        Ok(())
    }

    /// Auxiliary addition `⊕`.
    pub fn trop_add(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        Ok(Self::new(
            self.exponents
                .iter()
                .zip(&other.exponents)
                .map(|(&a, &b)| a.min(b))
                .collect(),
        ))
    }

    pub fn trop_mul(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        Ok(Self::new(
            self.exponents
                .iter()
                .zip(&other.exponents)
                .map(|(&a, &b)| a + b)
                .collect(),
        ))
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.exponents.iter().map(|&a| -a).collect())
    }

    pub fn pow(&self, e: i64) -> Self {
        Self::new(self.exponents.iter().map(|&a| a * e).collect())
    }
}

impl fmt::Display for TropicalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if wrote {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "y{}", i + 1)?;
            } else {
                write!(f, "y{}^{}", i + 1, e)?;
            }
            wrote = true;
        }
        if !wrote {
            f.write_str("1")?;
        }
        Ok(())
    }
}
