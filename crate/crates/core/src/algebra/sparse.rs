//! Sparse integer Laurent polynomials in a fixed number of variables.
//!
//! This is the common kernel behind both the coefficient ring `ZP` and the
//! flattened form of [`LaurentPoly`](super::LaurentPoly) used for exact
//! division. Terms live in a `BTreeMap`, so iteration is lexicographic on
//! exponent vectors and the largest key is the lex-leading term.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BinaryHeap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct ZLaurent {
    pub(crate) nvars: usize,
    pub(crate) terms: BTreeMap<Vec<i64>, BigInt>,
}

impl ZLaurent {
    pub(crate) fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub(crate) fn monomial(exponents: Vec<i64>, coeff: BigInt) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, coeff);
        p
    }

    pub(crate) fn one(nvars: usize) -> Self {
        Self::monomial(vec![0; nvars], BigInt::one())
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, exponents: Vec<i64>, coeff: BigInt) {
        debug_assert_eq!(exponents.len(), self.nvars);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exponents) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn check_rank(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::RankMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub(crate) fn add(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub(crate) fn neg(&self) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub(crate) fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub(crate) fn mul(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        Ok(self.mul_packed(other).unwrap_or_else(|| self.mul_generic(other)))
    }

    fn mul_generic(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub(crate) fn mul_monomial(&self, shift: &[i64], coeff: &BigInt) -> Self {
        let mut out = Self::zero(self.nvars);
        if coeff.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            let e = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            out.terms.insert(e, c * coeff);
        }
        out
    }

    /// Packed product. `None` when exponents or coefficients do not fit.
    fn mul_packed(&self, other: &Self) -> Option<Self> {
        let (min_a, max_a) = (self.min_exponents()?, self.max_exponents()?);
        let (min_b, max_b) = (other.min_exponents()?, other.max_exponents()?);
        let span: Vec<i64> = (0..self.nvars)
            .map(|i| (max_a[i] - min_a[i]).checked_add(max_b[i] - min_b[i]))
            .collect::<Option<_>>()?;
        let pk = Packing::new(&span)?;
        let a = pk.pack_terms(self, &min_a)?;
        let b = pk.pack_terms(other, &min_b)?;
        let mut acc: FxHashMap<u128, i128> = FxHashMap::default();
        acc.reserve(a.len().max(b.len()) * 2);
        for &(ka, ca) in &a {
            for &(kb, cb) in &b {
                let slot = acc.entry(ka + kb).or_insert(0);
                *slot = slot.checked_add(ca.checked_mul(cb)?)?;
            }
        }
        let base: Vec<i64> = min_a.iter().zip(&min_b).map(|(a, b)| a + b).collect();
        Some(pk.unpack_terms(self.nvars, acc, &base))
    }

    /// Componentwise maximum exponent; `None` for the zero polynomial.
    pub(crate) fn max_exponents(&self) -> Option<Vec<i64>> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |mut acc, e| {
            for (a, &b) in acc.iter_mut().zip(e) {
                *a = (*a).max(b);
            }
            acc
        }))
    }

    /// Componentwise minimum exponent; `None` for the zero polynomial.
    pub(crate) fn min_exponents(&self) -> Option<Vec<i64>> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |mut acc, e| {
            for (a, &b) in acc.iter_mut().zip(e) {
                *a = (*a).min(b);
            }
            acc
        }))
    }

    pub(crate) fn has_positive_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    /// Exact quotient in the Laurent ring.
    ///
    /// Both operands are shifted by their minimal exponents so that they
    /// become ordinary polynomials not divisible by any variable; then
    /// divisibility in the Laurent ring coincides with divisibility in the
    /// polynomial ring, which lex-order division decides. A leading term of
    /// the running remainder that the divisor's leading term does not divide
    /// means the quotient cannot exist.
    pub(crate) fn exact_div(&self, den: &Self) -> Result<Self> {
        self.check_rank(den)?;
        let den_shift = den.min_exponents().ok_or(Error::DivisionByZero)?;
        let Some(num_shift) = self.min_exponents() else {
            return Ok(Self::zero(self.nvars));
        };
        let neg = |v: &[i64]| v.iter().map(|a| -a).collect::<Vec<_>>();
        let one = BigInt::one();
        let d = den.mul_monomial(&neg(&den_shift), &one);
        let num = self.mul_monomial(&neg(&num_shift), &one);
        let quotient = divide_packed(&num, &d).unwrap_or_else(|| divide_generic(num, &d))?;
        let back: Vec<i64> = num_shift.iter().zip(&den_shift).map(|(a, b)| a - b).collect();
        Ok(quotient.mul_monomial(&back, &one))
    }
}

/// Lex-order long division of polynomials with nonnegative exponents.
fn divide_generic(mut rem: ZLaurent, d: &ZLaurent) -> Result<ZLaurent> {
    let (d_lead, d_coeff) = d
        .terms
        .last_key_value()
        .map(|(e, c)| (e.clone(), c.clone()))
        .expect("nonzero divisor");
    let mut quotient = ZLaurent::zero(rem.nvars);
    while let Some((r_lead, r_coeff)) = rem.terms.last_key_value() {
        let (r_lead, r_coeff) = (r_lead.clone(), r_coeff.clone());
        let shift: Vec<i64> = r_lead.iter().zip(&d_lead).map(|(a, b)| a - b).collect();
        if shift.iter().any(|&s| s < 0) {
            return Err(Error::NotDivisible);
        }
        let (q_coeff, r) = r_coeff.div_rem(&d_coeff);
        if !r.is_zero() {
            return Err(Error::NotDivisible);
        }
        for (e, c) in &d.terms {
            let e = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
            rem.add_term(e, -(c * &q_coeff));
        }
        debug_assert!(rem.terms.last_key_value().is_none_or(|(e, _)| *e < r_lead));
        quotient.add_term(shift, q_coeff);
    }
    Ok(quotient)
}

/// Exponent vectors with nonnegative entries packed into a `u128`, the
/// first variable in the most significant field, so that integer order is
/// lexicographic order and adding keys multiplies monomials.
#[derive(Debug, Clone, Copy)]
struct Packing {
    nvars: usize,
    bits: u32,
}

impl Packing {
    /// A packing in which every exponent up to `max[i]` fits.
    fn new(max: &[i64]) -> Option<Self> {
        let nvars = max.len();
        if nvars == 0 {
            return None;
        }
        // at most 62 bits, so sums of two fields stay within i64
        let bits = (128 / nvars).min(62) as u32;
        let pk = Self { nvars, bits };
        max.iter().all(|&m| pk.fits(m)).then_some(pk)
    }

    fn fits(&self, v: i64) -> bool {
        v >= 0 && (v as u128) < (1u128 << self.bits)
    }

    fn mask(&self) -> u128 {
        (1u128 << self.bits) - 1
    }

    fn pack(&self, e: &[i64]) -> u128 {
        e.iter().fold(0u128, |acc, &v| (acc << self.bits) | v as u128)
    }

    fn field(&self, key: u128, i: usize) -> i64 {
        ((key >> (self.bits as usize * (self.nvars - 1 - i))) & self.mask()) as i64
    }

    fn unpack(&self, key: u128) -> Vec<i64> {
        (0..self.nvars).map(|i| self.field(key, i)).collect()
    }

    /// `b` divides `a` as monomials.
    fn divides(&self, a: u128, b: u128) -> bool {
        (0..self.nvars).all(|i| self.field(a, i) >= self.field(b, i))
    }

    fn pack_terms(&self, p: &ZLaurent, shift: &[i64]) -> Option<Vec<(u128, i128)>> {
        p.terms
            .iter()
            .map(|(e, c)| {
                let e: Vec<i64> = e.iter().zip(shift).map(|(a, b)| a - b).collect();
                Some((self.pack(&e), i128::try_from(c).ok()?))
            })
            .collect()
    }

    fn unpack_terms<I>(&self, nvars: usize, terms: I, base: &[i64]) -> ZLaurent
    where
        I: IntoIterator<Item = (u128, i128)>,
    {
        let mut out = ZLaurent::zero(nvars);
        for (k, c) in terms {
            if c != 0 {
                let e = self.unpack(k).iter().zip(base).map(|(a, b)| a + b).collect();
                out.terms.insert(e, BigInt::from(c));
            }
        }
        out
    }
}

/// Heap division of polynomials with nonnegative exponents, in the style of
/// Monagan and Pearce: the remainder is never stored, its next leading term
/// is merged from the numerator and pending quotient-times-divisor products.
/// The heap holds one entry per divisor term, so it stays small when the
/// divisor is. `None` when the packed representation overflows.
fn divide_packed(num: &ZLaurent, den: &ZLaurent) -> Option<Result<ZLaurent>> {
    let max_n = num.max_exponents()?;
    let max_d = den.max_exponents()?;
    let bound: Vec<i64> = max_n.iter().zip(&max_d).map(|(a, b)| *a.max(b)).collect();
    let pk = Packing::new(&bound)?;
    let zero = vec![0; num.nvars];
    let mut n = pk.pack_terms(num, &zero)?;
    let mut d = pk.pack_terms(den, &zero)?;
    n.reverse();
    d.reverse();
    let (d0, dc) = d[0];

    let mut quotient: Vec<(u128, i128)> = Vec::new();
    // (monomial, divisor index); `cursor[i]` is the quotient term paired
    // with divisor term `i` next, and `waiting` lists divisor terms that
    // have used up every quotient term found so far.
    let mut heap: BinaryHeap<(u128, usize)> = BinaryHeap::with_capacity(d.len());
    let mut cursor = vec![0usize; d.len()];
    let mut waiting: Vec<usize> = (1..d.len()).rev().collect();
    let mut next = 0;
    loop {
        let m = match (n.get(next).map(|t| t.0), heap.peek().map(|t| t.0)) {
            (None, None) => break,
            (Some(a), Some(b)) => a.max(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
        };
        let mut c: i128 = 0;
        if n.get(next).is_some_and(|t| t.0 == m) {
            c = n[next].1;
            next += 1;
        }
        while heap.peek().is_some_and(|t| t.0 == m) {
            let (_, i) = heap.pop().expect("peeked");
            c = c.checked_sub(quotient[cursor[i]].1.checked_mul(d[i].1)?)?;
            cursor[i] += 1;
            match quotient.get(cursor[i]) {
                Some(q) => heap.push((q.0 + d[i].0, i)),
                None => waiting.push(i),
            }
        }
        if c == 0 {
            continue;
        }
        if !pk.divides(m, d0) || c % dc != 0 {
            return Some(Err(Error::NotDivisible));
        }
        let shift = m - d0;
        if (0..pk.nvars).any(|i| !pk.fits(pk.field(shift, i) + max_d[i])) {
            return None;
        }
        quotient.push((shift, c / dc));
        for i in waiting.drain(..) {
            heap.push((shift + d[i].0, i));
        }
    }
    Some(Ok(pk.unpack_terms(num.nvars, quotient, &zero)))
}
