//! Seeds `(x, y, B)` and their mutations.
//!
//! Cluster variables are carried as exact Laurent expansions in the root
//! coordinates, so every mutation is checked against the Laurent phenomenon
//! (the exchange quotient must divide exactly) and positivity.
//!
//! The exchange binomial is the standard one,
//!
//! ```text
//! F_k = y_k/(1 ⊕ y_k) · ∏_{b_ik>0} x_i^{b_ik}  +  1/(1 ⊕ y_k) · ∏_{b_ik<0} x_i^{-b_ik}
//! ```
//!
//! Using `y_k/(1 ⊕ y_k)` on both monomials would break homogeneity of the
//! mutated variables under the principal-coefficient grading, which the atlas
//! asserts for every variable it produces.
//!
//! Directions are 0-based throughout the library.

use std::collections::VecDeque;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::algebra::{CoefRingElement, LaurentPoly, TropicalElement};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Returns the componentwise-minimal positive integer diagonal `S` with
/// `S·B` skew-symmetric.
#[allow(clippy::needless_range_loop)]
pub fn find_skew_symmetrizer(b: &IntMatrix) -> Result<Vec<i64>> {
    if !b.is_square() {
        return Err(Error::NotSquare);
    }
    let n = b.rows();
    for i in 0..n {
        if b.get(i, i) != 0 {
            return Err(Error::NotSkewSymmetrizable(format!("b[{i}][{i}] != 0")));
        }
        for j in 0..n {
            let (bij, bji) = (b.get(i, j), b.get(j, i));
            if bij.signum() != -bji.signum() {
                return Err(Error::NotSkewSymmetrizable(format!(
                    "b[{i}][{j}] = {bij} and b[{j}][{i}] = {bji} are not sign-skew-symmetric"
                )));
            }
        }
    }

    let mut s: Vec<Option<Ratio<i64>>> = vec![None; n];
    let mut out = vec![0i64; n];
    for start in 0..n {
        if s[start].is_some() {
            continue;
        }
        s[start] = Some(Ratio::from_integer(1));
        let mut component = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let si = s[i].expect("visited");
            for j in 0..n {
                let (bij, bji) = (b.get(i, j), b.get(j, i));
                if bij == 0 {
                    continue;
                }
                // s_i b_ij = -s_j b_ji
                let sj = si * Ratio::new(-bij, bji);
                match s[j] {
                    None => {
                        s[j] = Some(sj);
                        component.push(j);
                        queue.push_back(j);
                    }
                    Some(existing) if existing != sj => {
                        return Err(Error::NotSkewSymmetrizable(format!(
                            "inconsistent symmetrizer ratios around index {j}"
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        let lcm = component
            .iter()
            .fold(1i64, |acc, &i| acc.lcm(s[i].expect("visited").denom()));
        let scaled: Vec<i64> = component
            .iter()
            .map(|&i| (s[i].expect("visited") * lcm).to_integer())
            .collect();
        let gcd = scaled.iter().fold(0i64, |acc, v| acc.gcd(v));
        for (&i, v) in component.iter().zip(scaled) {
            out[i] = v / gcd;
        }
    }
    Ok(out)
}

/// A skew-symmetrizable integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "IntMatrix", into = "IntMatrix")]
pub struct ExchangeMatrix(IntMatrix);

impl ExchangeMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        find_skew_symmetrizer(&m)?;
        Ok(Self(m))
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    pub fn rank(&self) -> usize {
        self.0.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.0.get(i, j)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn symmetrizer(&self) -> Vec<i64> {
        find_skew_symmetrizer(&self.0).expect("validated at construction")
    }

    /// Matrix mutation in direction `k`.
    pub fn mutate(&self, k: usize) -> Self {
        let n = self.rank();
        let mut out = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let bij = self.get(i, j);
                let v = if i == k || j == k {
                    -bij
                } else {
                    let bik = self.get(i, k);
                    bij + bik.signum() * (bik * self.get(k, j)).max(0)
                };
                out.set(i, j, v);
            }
        }
        Self(out)
    }

    pub fn permuted(&self, order: &[usize]) -> Self {
        Self(self.0.permuted(order))
    }
}

impl TryFrom<IntMatrix> for ExchangeMatrix {
    type Error = Error;

    fn try_from(m: IntMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<ExchangeMatrix> for IntMatrix {
    fn from(b: ExchangeMatrix) -> Self {
        b.0
    }
}

/// A labeled seed. `path` records the mutation directions from the root and
/// does not take part in equality.
#[derive(Debug, Clone)]
pub struct Seed {
    b: ExchangeMatrix,
    y: Vec<TropicalElement>,
    x: Vec<LaurentPoly>,
    path: Vec<usize>,
}

impl PartialEq for Seed {
    fn eq(&self, other: &Self) -> bool {
        self.b == other.b && self.y == other.y && self.x == other.x
    }
}

impl Eq for Seed {}

impl Seed {
    /// A root seed whose cluster is the coordinate system `x_1..x_n`.
    pub fn root(b: ExchangeMatrix, y: Vec<TropicalElement>) -> Result<Self> {
        let n = b.rank();
        if y.len() != n {
            return Err(Error::RankMismatch {
                expected: n,
                found: y.len(),
            });
        }
        let m = y.first().map_or(0, TropicalElement::rank);
        if let Some(bad) = y.iter().find(|t| t.rank() != m) {
            return Err(Error::RankMismatch {
                expected: m,
                found: bad.rank(),
            });
        }
        let x = (0..n).map(|i| LaurentPoly::variable(n, m, i)).collect();
        Ok(Self {
            b,
            y,
            x,
            path: Vec::new(),
        })
    }

    /// Root seed with trivial coefficients (`m = 0`).
    pub fn trivial(b: ExchangeMatrix) -> Self {
        let n = b.rank();
        Self::root(b, vec![TropicalElement::one(0); n]).expect("consistent ranks")
    }

    /// Root seed with principal coefficients: `m = n` and `y_i` the `i`-th generator.
    pub fn principal(b: ExchangeMatrix) -> Self {
        let n = b.rank();
        let y = (0..n).map(|i| TropicalElement::generator(n, i)).collect();
        Self::root(b, y).expect("consistent ranks")
    }

    /// Assembles a seed from parts. The cluster must have `n` entries over
    /// a common coordinate ring.
    pub fn from_parts(
        b: ExchangeMatrix,
        y: Vec<TropicalElement>,
        x: Vec<LaurentPoly>,
        path: Vec<usize>,
    ) -> Result<Self> {
        let n = b.rank();
        for len in [y.len(), x.len()] {
            if len != n {
                return Err(Error::RankMismatch { expected: n, found: len });
            }
        }
        Ok(Self { b, y, x, path })
    }

    pub fn rank(&self) -> usize {
        self.b.rank()
    }

    /// Rank of the coefficient semifield.
    pub fn coef_rank(&self) -> usize {
        self.x.first().map_or(0, LaurentPoly::coef_rank)
    }

    pub fn exchange_matrix(&self) -> &ExchangeMatrix {
        &self.b
    }

    pub fn coefficients(&self) -> &[TropicalElement] {
        &self.y
    }

    pub fn cluster(&self) -> &[LaurentPoly] {
        &self.x
    }

    pub fn path(&self) -> &[usize] {
        &self.path
    }

    pub(crate) fn set_path(&mut self, path: Vec<usize>) {
        self.path = path;
    }

    fn check_direction(&self, k: usize) -> Result<()> {
        if k >= self.rank() {
            return Err(Error::DirectionOutOfRange { k, n: self.rank() });
        }
        Ok(())
    }

    /// The exchange binomial `F_k`.
    pub fn exchange_binomial(&self, k: usize) -> Result<LaurentPoly> {
        self.check_direction(k)?;
        let n = self.rank();
        let m = self.coef_rank();
        let yk = &self.y[k];
        let denom = TropicalElement::one(yk.rank()).trop_add(yk)?;
        let plus_coef = CoefRingElement::from_tropical(&yk.trop_mul(&denom.inverse())?);
        let minus_coef = CoefRingElement::from_tropical(&denom.inverse());

        let mut plus = LaurentPoly::constant(n, plus_coef);
        let mut minus = LaurentPoly::constant(n, minus_coef);
        for i in 0..n {
            let bik = self.b.get(i, k);
            let e = u32::try_from(bik.unsigned_abs()).expect("exchange matrix entry fits in u32");
            if bik > 0 {
                plus = plus.checked_mul(&self.x[i].pow(e))?;
            } else if bik < 0 {
                minus = minus.checked_mul(&self.x[i].pow(e))?;
            }
        }
        debug_assert_eq!(plus.coef_rank(), m);
        plus.checked_add(&minus)
    }

    /// Seed mutation in direction `k`.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        self.check_direction(k)?;
        let n = self.rank();
        let f = self.exchange_binomial(k)?;
        let new_x = f.exact_div(&self.x[k])?;
        if new_x.has_negative_coefficient() {
            return Err(Error::PositivityViolated);
        }

        let yk = &self.y[k];
        let one_plus_yk = TropicalElement::one(yk.rank()).trop_add(yk)?;
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            if i == k {
                y.push(yk.inverse());
            } else {
                let bki = self.b.get(k, i);
                let v = self.y[i]
                    .trop_mul(&yk.pow(bki.max(0)))?
                    .trop_mul(&one_plus_yk.pow(-bki))?;
                y.push(v);
            }
        }

        let mut x = self.x.clone();
        x[k] = new_x;
        let mut path = self.path.clone();
        path.push(k);
        Ok(Self {
            b: self.b.mutate(k),
            y,
            x,
            path,
        })
    }

    /// Left-to-right composition of mutations.
    pub fn mutate_path(&self, directions: &[usize]) -> Result<Self> {
        directions
            .iter()
            .try_fold(self.clone(), |s, &k| s.mutate(k))
    }

    /// Relabels indices: new position `p` takes old position `order[p]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            b: self.b.permuted(order),
            y: order.iter().map(|&o| self.y[o].clone()).collect(),
            x: order.iter().map(|&o| self.x[o].clone()).collect(),
            path: self.path.clone(),
        }
    }

    /// The same exchange data with fresh coordinates as its cluster.
    pub fn rerooted(&self) -> Self {
        Self::root(self.b.clone(), self.y.clone()).expect("ranks already consistent")
    }

    /// The same exchange matrix with principal coefficients at this seed.
    pub fn rerooted_principal(&self) -> Self {
        Self::principal(self.b.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bm(rows: &[&[i64]]) -> ExchangeMatrix {
        ExchangeMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn p(s: &str, n: usize, m: usize) -> LaurentPoly {
        LaurentPoly::parse(s, n, m).unwrap()
    }

    #[test]
    fn skew_symmetrizers() {
        let b = IntMatrix::from_rows(vec![vec![0, 2], vec![-1, 0]]).unwrap();
        assert_eq!(find_skew_symmetrizer(&b).unwrap(), vec![1, 2]);
        let b = IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(
            find_skew_symmetrizer(&b),
            Err(Error::NotSkewSymmetrizable(_))
        ));
        let b = IntMatrix::from_rows(vec![vec![0, 1, -2], vec![-1, 0, 3], vec![2, -3, 0]]).unwrap();
        assert_eq!(find_skew_symmetrizer(&b).unwrap(), vec![1, 1, 1]);
        // G2 and a disconnected block
        let b = IntMatrix::from_rows(vec![vec![0, 3, 0], vec![-1, 0, 0], vec![0, 0, 0]]).unwrap();
        assert_eq!(find_skew_symmetrizer(&b).unwrap(), vec![1, 3, 1]);
        // sign-consistent but cyclically inconsistent ratios
        let b = IntMatrix::from_rows(vec![vec![0, 2, -1], vec![-1, 0, 1], vec![1, -1, 0]]).unwrap();
        assert!(find_skew_symmetrizer(&b).is_err());
        let b = IntMatrix::from_rows(vec![vec![1]]).unwrap();
        assert!(find_skew_symmetrizer(&b).is_err());
    }

    #[test]
    fn exchange_binomials_at_the_root() {
        let a2 = bm(&[&[0, 1], &[-1, 0]]);
        let s = Seed::principal(a2.clone());
        assert_eq!(s.exchange_binomial(0).unwrap(), p("y1 + x2", 2, 2));
        let s = Seed::trivial(a2);
        assert_eq!(s.exchange_binomial(0).unwrap(), p("1 + x2", 2, 0));
        let b2 = Seed::trivial(bm(&[&[0, 2], &[-1, 0]]));
        assert_eq!(b2.exchange_binomial(1).unwrap(), p("1 + x1^2", 2, 0));
        assert!(matches!(
            b2.exchange_binomial(2),
            Err(Error::DirectionOutOfRange { k: 2, n: 2 })
        ));
    }

    #[test]
    fn matrix_mutation() {
        let b = bm(&[&[0, 1], &[-1, 0]]);
        assert_eq!(b.mutate(0), bm(&[&[0, -1], &[1, 0]]));
        // entry-by-entry oracle for b'_ij
        let raw = [[0i64, 2, 0], [-1, 0, 1], [0, -1, 0]];
        let b = bm(&[&raw[0], &raw[1], &raw[2]]);
        let k = 1;
        let mut expected = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                expected[i][j] = if i == k || j == k {
                    -raw[i][j]
                } else if raw[i][k] > 0 && raw[k][j] > 0 {
                    raw[i][j] + raw[i][k] * raw[k][j]
                } else if raw[i][k] < 0 && raw[k][j] < 0 {
                    raw[i][j] - raw[i][k] * raw[k][j]
                } else {
                    raw[i][j]
                };
            }
        }
        assert_eq!(b.mutate(k), bm(&[&expected[0], &expected[1], &expected[2]]));
        assert_eq!(b.mutate(k), bm(&[&[0, -2, 2], &[1, 0, -1], &[-1, 1, 0]]));
    }

    #[test]
    fn seed_mutation_is_involutive() {
        let s = Seed::principal(bm(&[&[0, 2, 0], &[-1, 0, 1], &[0, -1, 0]]));
        for k in 0..3 {
            let t = s.mutate(k).unwrap();
            assert_ne!(t, s);
            assert_eq!(t.mutate(k).unwrap(), s);
        }
        let t = s.mutate_path(&[0, 1, 2, 1]).unwrap();
        assert_eq!(t.mutate_path(&[1, 1]).unwrap(), t);
        assert_eq!(t.path(), &[0, 1, 2, 1]);
    }

    #[test]
    fn first_mutation_with_principal_coefficients() {
        let s = Seed::principal(bm(&[&[0, 1], &[-1, 0]])).mutate(0).unwrap();
        assert_eq!(s.cluster()[0], p("y1*x1^-1 + x1^-1*x2", 2, 2));
        assert_eq!(s.coefficients()[0], TropicalElement::new(vec![-1, 0]));
        // y'_2 = y2 * y1^[b_12]_+ * (1 ⊕ y1)^{-b_12} = y1 y2
        assert_eq!(s.coefficients()[1], TropicalElement::new(vec![1, 1]));
    }

    #[test]
    fn a2_pentagon_periodicity() {
        let s = Seed::trivial(bm(&[&[0, 1], &[-1, 0]]));
        let t = s.mutate_path(&[0, 1, 0, 1, 0]).unwrap();
        let mut got: Vec<String> = t.cluster().iter().map(ToString::to_string).collect();
        got.sort();
        assert_eq!(got, vec!["1*x1".to_string(), "1*x2".to_string()]);
        assert_eq!(s.mutate_path(&[]).unwrap(), s);
        assert_eq!(s.mutate_path(&[0, 0]).unwrap(), s);
    }

    #[test]
    fn symmetrizer_is_preserved_along_mutation() {
        let b = bm(&[&[0, 2, -2], &[-1, 0, 1], &[1, -1, 0]]);
        let s = b.symmetrizer();
        assert_eq!(s, vec![1, 2, 2]);
        let mut cur = b;
        for k in [0, 2, 1, 0, 2, 1, 1, 0] {
            cur = cur.mutate(k);
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(s[i] * cur.get(i, j), -s[j] * cur.get(j, i));
                }
            }
        }
    }
}
