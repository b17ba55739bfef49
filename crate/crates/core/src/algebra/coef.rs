use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::sparse::ZLaurent;
use super::tropical::TropicalElement;
use crate::error::Result;

/// An element of the group ring `ZP` for `P = Trop(y_1..y_m)`: an integer
/// Laurent polynomial in the tropical generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoefRingElement {
    pub(crate) inner: ZLaurent,
}

impl CoefRingElement {
    pub fn zero(rank: usize) -> Self {
        Self {
            inner: ZLaurent::zero(rank),
        }
    }

    pub fn one(rank: usize) -> Self {
        Self {
            inner: ZLaurent::one(rank),
        }
    }

    pub fn from_integer(rank: usize, c: impl Into<BigInt>) -> Self {
        Self {
            inner: ZLaurent::monomial(vec![0; rank], c.into()),
        }
    }

    /// Embeds a semifield element as the monomial `1 * y^a`.
    pub fn from_tropical(t: &TropicalElement) -> Self {
        Self {
            inner: ZLaurent::monomial(t.exponents().to_vec(), BigInt::one()),
        }
    }

    pub fn from_terms<I>(rank: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, BigInt)>,
    {
        let mut inner = ZLaurent::zero(rank);
        for (e, c) in terms {
            inner.add_term(e, c);
        }
        Self { inner }
    }

    pub fn rank(&self) -> usize {
        self.inner.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Terms in ascending lexicographic order of their exponent vectors.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[i64], &BigInt)> {
        self.inner.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.inner.terms.len()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.add(&other.inner)?,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.sub(&other.inner)?,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.mul(&other.inner)?,
        })
    }

    /// Sum of integer coefficients: the image under `y_i -> 1`.
    pub fn coefficient_sum(&self) -> BigInt {
        self.inner.terms.values().fold(BigInt::zero(), |acc, c| acc + c)
    }

    pub fn has_positive_coefficients(&self) -> bool {
        self.inner.has_positive_coefficients()
    }

    /// Whether the element is a single tropical monomial with coefficient 1.
    pub fn as_tropical(&self) -> Option<TropicalElement> {
        match self.inner.terms.iter().next() {
            Some((e, c)) if self.inner.terms.len() == 1 && c.is_one() => {
                Some(TropicalElement::new(e.clone()))
            }
            _ => None,
        }
    }
}
