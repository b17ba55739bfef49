use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::coef::CoefRingElement;
use super::sparse::ZLaurent;
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// A `Z^n`-degree under the principal-coefficient grading.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedDegree(pub Vec<i64>);

impl GradedDegree {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Add for &GradedDegree {
    type Output = GradedDegree;

    fn add(self, rhs: &GradedDegree) -> GradedDegree {
        GradedDegree(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for GradedDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl GradedDegree {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }
}

impl From<Vec<i64>> for GradedDegree {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

/// A Laurent polynomial in `x_1..x_n` with coefficients in `ZP`,
/// `P = Trop(y_1..y_m)`.
///
/// Terms are kept normalized (no zero coefficients) in a `BTreeMap`, so
/// structural equality is equality of ring elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    coef_rank: usize,
    terms: BTreeMap<Vec<i64>, CoefRingElement>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize, coef_rank: usize) -> Self {
        Self {
            nvars,
            coef_rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize, coef_rank: usize) -> Self {
        Self::monomial(vec![0; nvars], CoefRingElement::one(coef_rank))
    }

    /// The coordinate `x_i` (0-based).
    pub fn variable(nvars: usize, coef_rank: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, CoefRingElement::one(coef_rank))
    }

    pub fn monomial(exponents: Vec<i64>, coeff: CoefRingElement) -> Self {
        let mut p = Self::zero(exponents.len(), coeff.rank());
        p.add_term(exponents, coeff);
        p
    }

    pub fn constant(nvars: usize, coeff: CoefRingElement) -> Self {
        Self::monomial(vec![0; nvars], coeff)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn coef_rank(&self) -> usize {
        self.coef_rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending lexicographic order of their x-exponent vectors.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[i64], &CoefRingElement)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Number of distinct Laurent monomials in `x`.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exponents: &[i64]) -> Option<&CoefRingElement> {
        self.terms.get(exponents)
    }

    fn add_term(&mut self, exponents: Vec<i64>, coeff: CoefRingElement) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&exponents) {
            Some(c) => {
                let sum = c.checked_add(&coeff).expect("coefficient rank checked");
                if sum.is_zero() {
                    self.terms.remove(&exponents);
                } else {
                    *c = sum;
                }
            }
            None => {
                self.terms.insert(exponents, coeff);
            }
        }
    }

    pub fn from_terms<I>(nvars: usize, coef_rank: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, CoefRingElement)>,
    {
        let mut p = Self::zero(nvars, coef_rank);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::RankMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            if c.rank() != coef_rank {
                return Err(Error::RankMismatch {
                    expected: coef_rank,
                    found: c.rank(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn check_ranks(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::RankMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        if self.coef_rank != other.coef_rank {
            return Err(Error::RankMismatch {
                expected: self.coef_rank,
                found: other.coef_rank,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_ranks(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_ranks(other)?;
        let mut out = self.clone();
        let zero = CoefRingElement::zero(self.coef_rank);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), zero.checked_sub(c)?);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_ranks(other)?;
        let product = self.flatten().mul(&other.flatten())?;
        Ok(Self::unflatten(&product, self.nvars, self.coef_rank))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars, self.coef_rank);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplies by the unit `coeff * x^shift`.
    pub fn mul_monomial(&self, shift: &[i64], coeff: &CoefRingElement) -> Result<Self> {
        self.checked_mul(&Self::monomial(shift.to_vec(), coeff.clone()))
    }

    /// Flattens into an integer Laurent polynomial in `x_1..x_n, y_1..y_m`.
    pub(crate) fn flatten(&self) -> ZLaurent {
        let mut out = ZLaurent::zero(self.nvars + self.coef_rank);
        for (ex, c) in &self.terms {
            for (ey, v) in c.terms() {
                let mut e = ex.clone();
                e.extend_from_slice(ey);
                out.terms.insert(e, v.clone());
            }
        }
        out
    }

    pub(crate) fn unflatten(flat: &ZLaurent, nvars: usize, coef_rank: usize) -> Self {
        debug_assert_eq!(flat.nvars, nvars + coef_rank);
        let mut grouped: BTreeMap<Vec<i64>, Vec<(Vec<i64>, BigInt)>> = BTreeMap::new();
        for (e, c) in &flat.terms {
            grouped
                .entry(e[..nvars].to_vec())
                .or_default()
                .push((e[nvars..].to_vec(), c.clone()));
        }
        Self {
            nvars,
            coef_rank,
            terms: grouped
                .into_iter()
                .map(|(ex, ys)| (ex, CoefRingElement::from_terms(coef_rank, ys)))
                .collect(),
        }
    }

    /// The Laurent quotient `self / den`, or [`Error::NotDivisible`] when it
    /// does not exist.
    pub fn exact_div(&self, den: &Self) -> Result<Self> {
        self.check_ranks(den)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some((e, c)) = den.as_monomial() {
            // Fast path: x^e * y^a is a unit.
            if let Some(t) = c.as_tropical() {
                let inv: Vec<i64> = e.iter().map(|v| -v).collect();
                return self.mul_monomial(&inv, &CoefRingElement::from_tropical(&t.inverse()));
            }
        }
        let q = self.flatten().exact_div(&den.flatten())?;
        Ok(Self::unflatten(&q, self.nvars, self.coef_rank))
    }

    pub fn as_monomial(&self) -> Option<(&[i64], &CoefRingElement)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (e.as_slice(), c))
        } else {
            None
        }
    }

    /// `Some(i)` when the polynomial is the bare coordinate `x_i`.
    pub fn as_coordinate(&self) -> Option<usize> {
        let (e, c) = self.as_monomial()?;
        let t = c.as_tropical()?;
        if !t.is_one() {
            return None;
        }
        let mut idx = None;
        for (i, &v) in e.iter().enumerate() {
            match v {
                0 => {}
                1 if idx.is_none() => idx = Some(i),
                _ => return None,
            }
        }
        idx
    }

    /// Exact value at `x = x_values`, `y = y_values`.
    pub fn specialize(&self, x_values: &[BigRational], y_values: &[BigRational]) -> Result<BigRational> {
        if x_values.len() != self.nvars {
            return Err(Error::RankMismatch {
                expected: self.nvars,
                found: x_values.len(),
            });
        }
        if y_values.len() != self.coef_rank {
            return Err(Error::RankMismatch {
                expected: self.coef_rank,
                found: y_values.len(),
            });
        }
        let power = |base: &BigRational, e: i64, index: usize| -> Result<BigRational> {
            if e < 0 && base.is_zero() {
                return Err(Error::ZeroSpecialization { index });
            }
            let magnitude = i32::try_from(e).map_err(|_| Error::InvariantViolated("exponent overflow".into()))?;
            Ok(base.pow(magnitude))
        };
        let mut total = BigRational::zero();
        for (ex, c) in &self.terms {
            let mut xv = BigRational::one();
            for (i, &e) in ex.iter().enumerate() {
                if e != 0 {
                    xv *= power(&x_values[i], e, i)?;
                }
            }
            let mut cv = BigRational::zero();
            for (ey, v) in c.terms() {
                let mut t = BigRational::from_integer(v.clone());
                for (j, &e) in ey.iter().enumerate() {
                    if e != 0 {
                        t *= power(&y_values[j], e, self.nvars + j)?;
                    }
                }
                cv += t;
            }
            total += xv * cv;
        }
        Ok(total)
    }

    /// Common degree of all terms under `deg(x_i) = e_i`, `deg(y_j) = -b_j`
    /// where `b_j` is the `j`-th column of `b0`.
    pub fn degree(&self, b0: &IntMatrix) -> Result<GradedDegree> {
        if b0.rows() != self.nvars || b0.cols() != self.coef_rank {
            return Err(Error::RankMismatch {
                expected: self.nvars,
                found: b0.rows(),
            });
        }
        let mut found: Option<Vec<i64>> = None;
        for (ex, c) in &self.terms {
            for (ey, _) in c.terms() {
                let by = b0.mul_vec(ey);
                let d: Vec<i64> = ex.iter().zip(&by).map(|(a, b)| a - b).collect();
                match &found {
                    None => found = Some(d),
                    Some(f) if *f != d => {
                        return Err(Error::NotHomogeneous {
                            first: f.clone(),
                            second: d,
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        found.map(GradedDegree).ok_or(Error::ZeroPolynomial)
    }

    /// Componentwise minimum x-exponent over all terms.
    pub fn min_exponents(&self) -> Result<Vec<i64>> {
        let mut it = self.terms.keys();
        let first = it.next().ok_or(Error::ZeroPolynomial)?.clone();
        Ok(it.fold(first, |mut acc, e| {
            for (a, &b) in acc.iter_mut().zip(e) {
                *a = (*a).min(b);
            }
            acc
        }))
    }

    /// Every integer coefficient of every term is positive.
    pub fn has_positive_coefficients(&self) -> bool {
        self.terms.values().all(CoefRingElement::has_positive_coefficients)
    }

    /// Substitutes `x_i -> images[i]` and returns the result as a Laurent
    /// polynomial in the images' coordinates. Negative exponents are handled
    /// by clearing a common monomial denominator and dividing exactly.
    pub fn substitute(&self, images: &[LaurentPoly]) -> Result<Self> {
        if images.len() != self.nvars {
            return Err(Error::RankMismatch {
                expected: self.nvars,
                found: images.len(),
            });
        }
        let Some(target) = images.first() else {
            return Ok(self.clone());
        };
        let (tn, tm) = (target.nvars, target.coef_rank);
        if tm != self.coef_rank {
            return Err(Error::RankMismatch {
                expected: self.coef_rank,
                found: tm,
            });
        }
        for img in images {
            img.check_ranks(target)?;
        }
        if self.is_zero() {
            return Ok(Self::zero(tn, tm));
        }
        let shift: Vec<u32> = self
            .min_exponents()?
            .iter()
            .map(|&m| u32::try_from((-m).max(0)).expect("exponent fits"))
            .collect();
        let mut powers: Vec<BTreeMap<u32, LaurentPoly>> = vec![BTreeMap::new(); self.nvars];
        let mut pw = |i: usize, e: u32| -> LaurentPoly {
            powers[i].entry(e).or_insert_with(|| images[i].pow(e)).clone()
        };
        let mut numerator = Self::zero(tn, tm);
        for (ex, c) in &self.terms {
            let mut t = Self::constant(tn, c.clone());
            for (i, &e) in ex.iter().enumerate() {
                let k = u32::try_from(e + i64::from(shift[i])).expect("shifted exponent is nonnegative");
                if k > 0 {
                    t = t.checked_mul(&pw(i, k))?;
                }
            }
            numerator = numerator.checked_add(&t)?;
        }
        let mut denominator = Self::one(tn, tm);
        for (i, &s) in shift.iter().enumerate() {
            if s > 0 {
                denominator = denominator.checked_mul(&pw(i, s))?;
            }
        }
        numerator.exact_div(&denominator)
    }

    /// Applies `f` to every coefficient, producing a polynomial over
    /// coefficients of rank `new_rank`.
    pub fn map_coefficients<F>(&self, new_rank: usize, mut f: F) -> Self
    where
        F: FnMut(&CoefRingElement) -> CoefRingElement,
    {
        let mut out = Self::zero(self.nvars, new_rank);
        for (e, c) in &self.terms {
            let img = f(c);
            assert_eq!(img.rank(), new_rank);
            out.add_term(e.clone(), img);
        }
        out
    }

    /// Reorders the coordinates: new coordinate `p` is old coordinate `order[p]`.
    pub fn permute_variables(&self, order: &[usize]) -> Self {
        let mut out = Self::zero(self.nvars, self.coef_rank);
        for (e, c) in &self.terms {
            out.terms
                .insert(order.iter().map(|&o| e[o]).collect(), c.clone());
        }
        out
    }

    /// Parses the canonical text form; see the [`Display`](fmt::Display) impl.
    pub fn parse(s: &str, nvars: usize, coef_rank: usize) -> Result<Self> {
        super::text::parse(s, nvars, coef_rank)
    }

    pub(crate) fn from_flat_terms(
        nvars: usize,
        coef_rank: usize,
        terms: Vec<(Vec<i64>, BigInt)>,
    ) -> Self {
        let mut flat = ZLaurent::zero(nvars + coef_rank);
        for (e, c) in terms {
            flat.add_term(e, c);
        }
        Self::unflatten(&flat, nvars, coef_rank)
    }
}

/// Canonical text form: terms ordered by x-exponents then y-exponents, each
/// written `c*y1^a1*...*x1^b1*...` (zero exponents omitted, `^1` elided) and
/// joined by ` + `. The zero polynomial prints as `0`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (ex, c) in &self.terms {
            for (ey, v) in c.terms() {
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                write!(f, "{v}")?;
                for (name, exps) in [("y", ey), ("x", ex.as_slice())] {
                    for (i, &e) in exps.iter().enumerate() {
                        match e {
                            0 => {}
                            1 => write!(f, "*{name}{}", i + 1)?,
                            _ => write!(f, "*{name}{}^{e}", i + 1)?,
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("Laurent polynomial ranks differ")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs).expect("Laurent polynomial ranks differ")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("Laurent polynomial ranks differ")
    }
}

impl LaurentPoly {
    /// Whether some integer coefficient is negative.
    pub fn has_negative_coefficient(&self) -> bool {
        self.terms
            .values()
            .any(|c| c.terms().any(|(_, v)| v.is_negative()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize, m: usize) -> LaurentPoly {
        LaurentPoly::parse(s, n, m).unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn ring_identities() {
        let a = p("x1 + x2", 2, 0);
        let b = p("x1 + -1*x2", 2, 0);
        assert_eq!(&a * &b, p("x1^2 + -1*x2^2", 2, 0));
        assert_eq!(&a + &LaurentPoly::zero(2, 0), a);
        let c = p("y1*x1^-1", 2, 1);
        assert_eq!(&c * &p("x1", 2, 1), p("y1", 2, 1));
        assert!(a.checked_add(&p("x1", 3, 0)).is_err());
        assert!(a.checked_mul(&p("x1", 2, 1)).is_err());
    }

    #[test]
    fn exact_division_examples() {
        let num = p("y1 + x2", 2, 2);
        let den = p("x1", 2, 2);
        assert_eq!(num.exact_div(&den).unwrap(), p("y1*x1^-1 + x1^-1*x2", 2, 2));
        assert_eq!(
            p("x1^2 + -1*x2^2", 2, 0).exact_div(&p("x1 + x2", 2, 0)).unwrap(),
            p("x1 + -1*x2", 2, 0)
        );
        assert_eq!(
            p("x1 + 1", 2, 0).exact_div(&p("x2 + 1", 2, 0)),
            Err(Error::NotDivisible)
        );
        assert_eq!(
            p("x1", 2, 0).exact_div(&LaurentPoly::zero(2, 0)),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn division_with_coefficient_ring_content() {
        // ((1 + y1) x1 + (1 + y1) x2) / (1 + y1) = x1 + x2
        let num = p("x1 + y1*x1 + x2 + y1*x2", 2, 1);
        let den = p("1 + y1", 2, 1);
        assert_eq!(num.exact_div(&den).unwrap(), p("x1 + x2", 2, 1));
    }

    #[test]
    fn specialization() {
        assert_eq!(p("x1^-1", 1, 0).specialize(&[q(1, 2)], &[]).unwrap(), q(2, 1));
        assert_eq!(
            p("1 + -2*x1^-1", 1, 1).specialize(&[q(1, 2)], &[q(1, 1)]).unwrap(),
            q(-3, 1)
        );
        assert_eq!(
            p("x1*x2^-1", 2, 0).specialize(&[q(1, 1), q(1, 1)], &[]).unwrap(),
            q(1, 1)
        );
        assert_eq!(
            p("x1^-1 + x2", 2, 0).specialize(&[q(0, 1), q(1, 1)], &[]),
            Err(Error::ZeroSpecialization { index: 0 })
        );
        assert_eq!(p("x1^2", 1, 0).specialize(&[q(0, 1)], &[]).unwrap(), q(0, 1));
    }

    #[test]
    fn grading() {
        let b0 = IntMatrix::from_rows(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        assert_eq!(p("x1", 2, 2).degree(&b0).unwrap(), GradedDegree(vec![1, 0]));
        // deg(y1) = -b_1 = (0, 1); both terms have degree (-1, 1)
        assert_eq!(
            p("y1*x1^-1 + x1^-1*x2", 2, 2).degree(&b0).unwrap(),
            GradedDegree(vec![-1, 1])
        );
        assert!(matches!(
            p("x1 + x1^2", 2, 2).degree(&b0),
            Err(Error::NotHomogeneous { .. })
        ));
        assert_eq!(LaurentPoly::zero(2, 2).degree(&b0), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn min_exponents() {
        assert_eq!(p("x1^-1 + x1^-1*x2", 2, 0).min_exponents().unwrap(), vec![-1, 0]);
        assert_eq!(p("x1", 2, 0).min_exponents().unwrap(), vec![1, 0]);
        let z = &p("x1^-1*x2^-1", 2, 0) * &p("1 + x1 + x2", 2, 0);
        assert_eq!(z.min_exponents().unwrap(), vec![-1, -1]);
        assert_eq!(LaurentPoly::zero(2, 0).min_exponents(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn substitution_clears_denominators() {
        // z = (1 + x1 + x2) / (x1 x2); put x2 = (1 + x1) / w with w the second coordinate
        let z = p("x1^-1*x2^-1 + x2^-1 + x1^-1", 2, 0);
        let images = [p("x1", 2, 0), p("x1*x2^-1 + x2^-1", 2, 0)];
        assert_eq!(z.substitute(&images).unwrap(), p("x1^-1 + x1^-1*x2", 2, 0));
    }

    #[test]
    fn coordinate_detection() {
        assert_eq!(p("x2", 3, 1).as_coordinate(), Some(1));
        assert_eq!(p("y1*x2", 3, 1).as_coordinate(), None);
        assert_eq!(p("x2^2", 3, 1).as_coordinate(), None);
        assert_eq!(p("1", 3, 1).as_coordinate(), None);
    }
}
