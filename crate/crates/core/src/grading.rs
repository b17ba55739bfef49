//! g-vectors, G-matrices and g-pairs for atlases with principal coefficients
//! at the root.
//!
//! Under principal coefficients every cluster variable is homogeneous for the
//! `Z^n`-grading `deg(x_i) = e_i`, `deg(y_j) = -b_j` (columns of the root
//! exchange matrix); its degree is the g-vector. Index subsets `I` are
//! 0-based and ascending.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{Signed, ToPrimitive};

use crate::algebra::{GradedDegree, LaurentPoly};
use crate::atlas::{Cluster, PatternAtlas, VariableId};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

fn require_principal(a: &PatternAtlas) -> Result<()> {
    if a.is_principal() {
        Ok(())
    } else {
        Err(Error::NotPrincipal)
    }
}

/// Sorts, deduplicates and range-checks an index subset.
pub fn normalize_subset(subset: &[usize], n: usize) -> Result<Vec<usize>> {
    let set: BTreeSet<usize> = subset.iter().copied().collect();
    if let Some(&k) = set.iter().find(|&&k| k >= n) {
        return Err(Error::DirectionOutOfRange { k: k + 1, n });
    }
    Ok(set.into_iter().collect())
}

pub fn g_vector(a: &PatternAtlas, v: VariableId) -> Result<GradedDegree> {
    require_principal(a)?;
    a.variable(v)?.degree(a.root_matrix())
}

/// The matrix whose columns are the g-vectors of a cluster, in the given
/// order of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GMatrix {
    columns: Vec<GradedDegree>,
}

impl GMatrix {
    pub fn columns(&self) -> &[GradedDegree] {
        &self.columns
    }

    pub fn matrix(&self) -> IntMatrix {
        let cols: Vec<Vec<i64>> = self.columns.iter().map(|g| g.0.clone()).collect();
        IntMatrix::from_columns(&cols)
    }

    pub fn determinant(&self) -> i64 {
        self.matrix()
            .determinant()
            .to_i64()
            .expect("determinant of a G-matrix fits in i64")
    }

    pub fn apply(&self, a: &[i64]) -> GradedDegree {
        self.matrix().mul_vec(a).into()
    }
}

/// G-matrix of an ordered tuple of variables; checks `det = ±1`.
pub fn g_matrix(a: &PatternAtlas, variables: &[VariableId]) -> Result<GMatrix> {
    if variables.len() != a.rank() {
        return Err(Error::RankMismatch {
            expected: a.rank(),
            found: variables.len(),
        });
    }
    let columns = variables
        .iter()
        .map(|&v| g_vector(a, v))
        .collect::<Result<Vec<_>>>()?;
    let g = GMatrix { columns };
    let det = g.determinant();
    if det.abs() != 1 {
        return Err(Error::InvariantViolated(format!(
            "G-matrix of {variables:?} has determinant {det}"
        )));
    }
    Ok(g)
}

/// A cluster monomial `x^a`, exponents listed in the cluster's canonical
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClusterMonomial {
    pub cluster: Cluster,
    pub exponents: Vec<u32>,
}

impl ClusterMonomial {
    pub fn new(cluster: Cluster, exponents: Vec<u32>) -> Self {
        Self { cluster, exponents }
    }

    /// Variable to exponent, dropping zero exponents.
    pub fn support(&self) -> BTreeMap<VariableId, u32> {
        self.cluster
            .ids()
            .iter()
            .zip(&self.exponents)
            .filter(|(_, &e)| e > 0)
            .map(|(&v, &e)| (v, e))
            .collect()
    }

    /// Product of the root expansions.
    pub fn expansion(&self, a: &PatternAtlas) -> Result<LaurentPoly> {
        let mut p = LaurentPoly::one(a.rank(), a.coef_rank());
        for (v, e) in self.support() {
            p = p.checked_mul(&a.variable(v)?.pow(e))?;
        }
        Ok(p)
    }
}

pub fn g_vector_monomial(a: &PatternAtlas, cm: &ClusterMonomial) -> Result<GradedDegree> {
    a.cluster_index(&cm.cluster)?;
    if cm.exponents.len() != a.rank() {
        return Err(Error::RankMismatch {
            expected: a.rank(),
            found: cm.exponents.len(),
        });
    }
    let g = g_matrix(a, cm.cluster.ids())?;
    let e: Vec<i64> = cm.exponents.iter().map(|&e| e.into()).collect();
    Ok(g.apply(&e))
}

/// Outcome of the distinct-g-vector sweep over bounded cluster monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinctnessReport {
    pub monomials: usize,
    /// Monomials left after identifying equal Laurent polynomials.
    pub distinct_monomials: usize,
    /// Pairs of distinct monomials sharing a g-vector.
    pub collisions: Vec<(ClusterMonomial, ClusterMonomial, GradedDegree)>,
}

fn exponent_tuples(n: usize, bound: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..=bound).map(move |e| {
                    let mut t = t.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    out
}

/// Checks that all cluster monomials with exponents at most `bound` have
/// pairwise distinct g-vectors, once monomials that are equal as Laurent
/// polynomials are identified.
pub fn verify_distinct_g_vectors(a: &PatternAtlas, bound: u32) -> Result<DistinctnessReport> {
    require_principal(a)?;
    a.require_complete()?;
    let tuples = exponent_tuples(a.rank(), bound);
    let mut monomials = 0;
    let mut by_support: BTreeMap<BTreeMap<VariableId, u32>, ClusterMonomial> = BTreeMap::new();
    for c in a.clusters() {
        for t in &tuples {
            monomials += 1;
            let cm = ClusterMonomial::new(c.clone(), t.clone());
            by_support.entry(cm.support()).or_insert(cm);
        }
    }
    let mut by_poly: HashMap<LaurentPoly, ClusterMonomial> = HashMap::new();
    for cm in by_support.into_values() {
        by_poly.entry(cm.expansion(a)?).or_insert(cm);
    }
    let mut reps: Vec<(LaurentPoly, ClusterMonomial)> = by_poly.into_iter().collect();
    reps.sort_by(|x, y| x.1.cmp(&y.1));
    let mut seen: BTreeMap<GradedDegree, ClusterMonomial> = BTreeMap::new();
    let mut collisions = Vec::new();
    for (p, cm) in &reps {
        let g = p.degree(a.root_matrix())?;
        debug_assert_eq!(g, g_vector_monomial(a, cm)?);
        if let Some(prev) = seen.get(&g) {
            collisions.push((prev.clone(), cm.clone(), g));
        } else {
            seen.insert(g, cm.clone());
        }
    }
    Ok(DistinctnessReport {
        monomials,
        distinct_monomials: reps.len(),
        collisions,
    })
}

/// Whether some labeled seed carrying `c` is reachable from the root by
/// mutations in directions `subset`.
pub fn connected_by_i_sequence(a: &PatternAtlas, c: &Cluster, subset: &[usize]) -> Result<bool> {
    let subset = normalize_subset(subset, a.rank())?;
    Ok(a.labeled_reach(&subset).iter().any(|l| l.cluster() == *c))
}

/// The solution of the g-pair system for one variable of `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPairSolution {
    pub variable: VariableId,
    /// `v'` indexed by labeled position of `t'`; zero off the subset.
    pub coefficients: Vec<i64>,
}

/// Evidence that `(t, t')` is a g-pair along a subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPair {
    pub t: Cluster,
    pub t_prime: Cluster,
    pub subset: Vec<usize>,
    /// Variables of `t'` by labeled position, as reached by the subset
    /// sequence from the root.
    pub labeled: Vec<VariableId>,
    pub solutions: Vec<GPairSolution>,
}

fn solve_block(
    g_t_prime: &GMatrix,
    subset: &[usize],
    target: &GradedDegree,
) -> Option<Vec<i64>> {
    let n = target.0.len();
    let block = g_t_prime.matrix().submatrix(subset, subset);
    let rhs: Vec<i64> = subset.iter().map(|&i| target.0[i]).collect();
    let sol = block.solve_rational(&rhs)?;
    let mut v = vec![0; n];
    for (&i, q) in subset.iter().zip(&sol) {
        if !q.is_integer() || q.is_negative() {
            return None;
        }
        v[i] = q.to_integer().to_i64()?;
    }
    Some(v)
}

fn check_block_form(g: &GMatrix, subset: &[usize], labeled: &[VariableId]) -> Result<()> {
    let n = labeled.len();
    for i in (0..n).filter(|i| !subset.contains(i)) {
        let mut e = vec![0; n];
        e[i] = 1;
        if g.columns[i].0 != e {
            return Err(Error::InvariantViolated(format!(
                "column {} of the G-matrix of {labeled:?} is not a unit vector",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Solves the g-pair system for `(t, t')` along `subset`; `None` when
/// `t'` is not subset-connected to the root or some system has no solution
/// in nonnegative integers.
pub fn g_pair(a: &PatternAtlas, t: &Cluster, t_prime: &Cluster, subset: &[usize]) -> Result<Option<GPair>> {
    require_principal(a)?;
    a.cluster_index(t)?;
    a.cluster_index(t_prime)?;
    let subset = normalize_subset(subset, a.rank())?;
    let targets = t
        .ids()
        .iter()
        .map(|&v| Ok((v, g_vector(a, v)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut tried = BTreeSet::new();
    for l in a.labeled_reach(&subset) {
        if l.cluster() != *t_prime || !tried.insert(l.labeled.clone()) {
            continue;
        }
        let g = g_matrix(a, &l.labeled)?;
        check_block_form(&g, &subset, &l.labeled)?;
        let solutions: Option<Vec<GPairSolution>> = targets
            .iter()
            .map(|(v, gv)| {
                solve_block(&g, &subset, gv).map(|coefficients| GPairSolution {
                    variable: *v,
                    coefficients,
                })
            })
            .collect();
        if let Some(solutions) = solutions {
            return Ok(Some(GPair {
                t: t.clone(),
                t_prime: t_prime.clone(),
                subset,
                labeled: l.labeled,
                solutions,
            }));
        }
    }
    Ok(None)
}

pub fn check_g_pair(a: &PatternAtlas, t: &Cluster, t_prime: &Cluster, subset: &[usize]) -> Result<bool> {
    Ok(g_pair(a, t, t_prime, subset)?.is_some())
}

/// The first subset-connected cluster, in canonical order, forming a
/// g-pair with `t`.
pub fn find_g_pair(a: &PatternAtlas, t: &Cluster, subset: &[usize]) -> Result<GPair> {
    require_principal(a)?;
    a.require_complete()?;
    let subset = normalize_subset(subset, a.rank())?;
    let candidates: BTreeSet<Cluster> = a.labeled_reach(&subset).iter().map(|l| l.cluster()).collect();
    for c in &candidates {
        if let Some(pair) = g_pair(a, t, c, &subset)? {
            return Ok(pair);
        }
    }
    Err(Error::GPairNotFound {
        cluster: t.ids().to_vec(),
        subset,
    })
}

/// All index subsets of `0..n`, ordered by size then lexicographically.
pub fn all_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..1 << n)
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort_by(|x: &Vec<usize>, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}

/// A term of `v`'s expansion in the coordinates of `t'` (canonical order)
/// whose exponent `r` satisfies `g(v) = G_{t'} r`.
pub fn r_vector(a: &PatternAtlas, v: VariableId, t_prime: &Cluster) -> Result<Option<Vec<i64>>> {
    let g = g_vector(a, v)?;
    let gm = g_matrix(a, t_prime.ids())?;
    let expansion = a.expand(v, t_prime)?;
    let r = expansion
        .terms()
        .map(|(r, _)| r)
        .find(|r| gm.apply(r) == g)
        .map(<[i64]>::to_vec);
    Ok(r)
}

/// Result of the g-pair sweep over every cluster and every subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPairSweep {
    pub checked: usize,
    pub failures: Vec<(Cluster, Vec<usize>)>,
}

pub fn verify_g_pairs(a: &PatternAtlas) -> Result<GPairSweep> {
    use rayon::prelude::*;

    require_principal(a)?;
    a.require_complete()?;
    let jobs: Vec<(Cluster, Vec<usize>)> = a
        .clusters()
        .iter()
        .flat_map(|c| all_subsets(a.rank()).into_iter().map(move |s| (c.clone(), s)))
        .collect();
    let results: Vec<Result<bool>> = jobs
        .par_iter()
        .map(|(c, s)| match find_g_pair(a, c, s) {
            Ok(_) => Ok(true),
            Err(Error::GPairNotFound { .. }) => Ok(false),
            Err(e) => Err(e),
        })
        .collect();
    let mut failures = Vec::new();
    for ((c, s), r) in jobs.iter().zip(results) {
        if !r? {
            failures.push((c.clone(), s.clone()));
        }
    }
    Ok(GPairSweep {
        checked: jobs.len(),
        failures,
    })
}

/// Tab-separated g-vector table: one row per variable id.
pub fn g_vector_tsv(a: &PatternAtlas) -> Result<String> {
    let mut out = String::from("variable");
    for i in 1..=a.rank() {
        out.push_str(&format!("\tg{i}"));
    }
    out.push('\n');
    for v in a.variable_ids() {
        out.push_str(&v.to_string());
        for x in g_vector(a, v)?.0 {
            out.push_str(&format!("\t{x}"));
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::Caps;
    use crate::seed::{ExchangeMatrix, Seed};

    fn principal(rows: &[&[i64]]) -> PatternAtlas {
        let b = ExchangeMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap();
        PatternAtlas::explore(&Seed::principal(b), Caps::default()).unwrap()
    }

    fn a2() -> PatternAtlas {
        principal(&[&[0, 1], &[-1, 0]])
    }

    fn var(a: &PatternAtlas, s: &str) -> VariableId {
        a.lookup(&LaurentPoly::parse(s, a.rank(), a.coef_rank()).unwrap())
            .unwrap()
    }

    #[test]
    fn g_vectors_of_a2() {
        let a = a2();
        assert_eq!(g_vector(&a, var(&a, "x1")).unwrap().0, vec![1, 0]);
        assert_eq!(g_vector(&a, var(&a, "x2")).unwrap().0, vec![0, 1]);
        assert_eq!(
            g_vector(&a, var(&a, "y1*x1^-1 + x1^-1*x2")).unwrap().0,
            vec![-1, 1]
        );
        let root = a.root_cluster().clone();
        let g = g_matrix(&a, root.ids()).unwrap();
        assert_eq!(g.matrix(), IntMatrix::identity(2));
        for c in a.clusters() {
            assert_eq!(g_matrix(&a, c.ids()).unwrap().determinant().abs(), 1);
        }
    }

    #[test]
    fn trivial_coefficients_are_rejected() {
        let b = ExchangeMatrix::from_rows(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        let a = PatternAtlas::explore(&Seed::trivial(b), Caps::default()).unwrap();
        assert_eq!(g_vector(&a, 0), Err(Error::NotPrincipal));
    }

    #[test]
    fn monomial_g_vectors() {
        let a = a2();
        let c = a.clusters()[3].clone();
        let zero = g_vector_monomial(&a, &ClusterMonomial::new(c.clone(), vec![0, 0])).unwrap();
        assert!(zero.is_zero());
        let g = g_matrix(&a, c.ids()).unwrap();
        let e2 = g_vector_monomial(&a, &ClusterMonomial::new(c, vec![0, 1])).unwrap();
        assert_eq!(e2, g.columns()[1]);
    }

    #[test]
    fn a2_monomials_have_distinct_g_vectors() {
        let r = verify_distinct_g_vectors(&a2(), 3).unwrap();
        assert_eq!(r.monomials, 5 * 16);
        // each cluster contributes 16, minus shared pure powers of the 5
        // variables (each in two clusters) and the empty monomial
        assert_eq!(r.distinct_monomials, 80 - 5 * 3 - 4);
        assert!(r.collisions.is_empty());
    }

    #[test]
    fn i_sequence_connectivity() {
        let a = a2();
        let root = a.root_cluster().clone();
        assert!(connected_by_i_sequence(&a, &root, &[]).unwrap());
        for c in a.clusters().iter().filter(|c| **c != root) {
            assert!(!connected_by_i_sequence(&a, c, &[]).unwrap());
            assert!(connected_by_i_sequence(&a, c, &[0, 1]).unwrap());
        }
        let x2 = var(&a, "x2");
        for l in a.labeled_reach(&[0]) {
            assert_eq!(l.labeled[1], x2);
        }
        assert!(matches!(
            connected_by_i_sequence(&a, &root, &[2]),
            Err(Error::DirectionOutOfRange { .. })
        ));
    }

    #[test]
    fn g_pairs_in_a2() {
        let a = a2();
        let root = a.root_cluster().clone();
        for s in all_subsets(2) {
            assert!(check_g_pair(&a, &root, &root, &s).unwrap());
        }
        for t in a.clusters() {
            assert_eq!(find_g_pair(&a, t, &[0, 1]).unwrap().t_prime, *t);
            assert_eq!(find_g_pair(&a, t, &[]).unwrap().t_prime, root);
            let pair = find_g_pair(&a, t, &[0]).unwrap();
            assert_eq!(pair.labeled[1], var(&a, "x2"));
        }
    }

    /// Brute force over monomials: every cluster monomial of `t` with
    /// exponents at most `k` has a subset-supported `v'` with entries at
    /// most `bound` matching its projected degree.
    fn brute_force_g_pair(a: &PatternAtlas, t: &Cluster, labeled: &[VariableId], subset: &[usize], k: u32) -> bool {
        let n = a.rank();
        let gt = g_matrix(a, t.ids()).unwrap();
        let gp = g_matrix(a, labeled).unwrap();
        let bound = 8;
        exponent_tuples(n, k).iter().all(|e| {
            let e: Vec<i64> = e.iter().map(|&x| x.into()).collect();
            let target = gt.apply(&e);
            exponent_tuples(subset.len(), bound).iter().any(|w| {
                let mut v = vec![0; n];
                for (&i, &x) in subset.iter().zip(w) {
                    v[i] = x.into();
                }
                let got = gp.apply(&v);
                subset.iter().all(|&i| got.0[i] == target.0[i])
            })
        })
    }

    #[test]
    fn linear_solve_agrees_with_brute_force() {
        for a in [a2(), principal(&[&[0, 2], &[-1, 0]])] {
            for t in a.clusters() {
                for s in all_subsets(a.rank()) {
                    let reach = a.labeled_reach(&s);
                    let labeled: BTreeSet<Vec<VariableId>> = reach.iter().map(|l| l.labeled.clone()).collect();
                    for l in labeled {
                        let tp = Cluster::new(l.clone());
                        let solved = g_pair(&a, t, &tp, &s).unwrap();
                        let brute = brute_force_g_pair(&a, t, &l, &s, 2);
                        if solved.as_ref().is_some_and(|p| p.labeled == l) {
                            assert!(brute, "{t} {tp} {s:?}");
                        }
                        if brute {
                            assert!(solved.is_some(), "{t} {tp} {s:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn every_pair_found_in_b2() {
        let a = principal(&[&[0, 2], &[-1, 0]]);
        let sweep = verify_g_pairs(&a).unwrap();
        assert_eq!(sweep.checked, 6 * 4);
        assert!(sweep.failures.is_empty());
    }

    #[test]
    fn r_vectors_for_pairs_along_complements() {
        let a = principal(&[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]]);
        for t in a.clusters() {
            for k in 0..3 {
                let subset: Vec<usize> = (0..3).filter(|&i| i != k).collect();
                let pair = find_g_pair(&a, t, &subset).unwrap();
                for &v in t.ids() {
                    assert!(r_vector(&a, v, &pair.t_prime).unwrap().is_some());
                }
            }
        }
    }

    #[test]
    fn tsv_table() {
        let tsv = g_vector_tsv(&a2()).unwrap();
        let mut lines = tsv.lines();
        assert_eq!(lines.next(), Some("variable\tg1\tg2"));
        assert_eq!(lines.next(), Some("0\t1\t0"));
        assert_eq!(tsv.lines().count(), 6);
    }

    #[test]
    fn subsets() {
        assert_eq!(
            all_subsets(2),
            vec![vec![], vec![0], vec![1], vec![0, 1]]
        );
        assert_eq!(normalize_subset(&[1, 0, 1], 2).unwrap(), vec![0, 1]);
    }
}
