//! Denominator vectors and the compatibility degree.
//!
//! `d(x, z)` is the coordinate of `x` in the d-vector of `z` taken in any
//! cluster containing `x`. The whole degree table is computed from one
//! pass over the clusters, which also checks that the choice of containing
//! cluster does not matter.

use std::collections::BTreeSet;
use std::fmt;

use crate::atlas::{Cluster, PatternAtlas, VariableId};
use crate::error::{Error, Result};

/// Negated minimal exponents of an expansion, in a cluster's canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DVector(pub Vec<i64>);

impl fmt::Display for DVector {
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

pub fn d_vector(a: &PatternAtlas, v: VariableId, c: &Cluster) -> Result<DVector> {
    let min = a.expand(v, c)?.min_exponents()?;
    Ok(DVector(min.into_iter().map(|e| -e).collect()))
}

fn first_containing(a: &PatternAtlas, xj: VariableId) -> Result<&Cluster> {
    a.variable(xj)?;
    a.clusters_containing(xj)
        .next()
        .ok_or(Error::NoContainingCluster(xj))
}

/// Compatibility degree of `xi` with respect to `xj`.
pub fn compatibility_degree(a: &PatternAtlas, xj: VariableId, xi: VariableId) -> Result<i64> {
    let c = first_containing(a, xj)?;
    let q = c.position(xj).expect("cluster contains xj");
    let d = d_vector(a, xi, c)?.0[q];
    if cfg!(debug_assertions) {
        for other in a.clusters_containing(xj).skip(1) {
            let q = other.position(xj).expect("cluster contains xj");
            let e = d_vector(a, xi, other)?.0[q];
            if e != d {
                return Err(Error::InvariantViolated(format!(
                    "d({xj}, {xi}) is {d} in {c} but {e} in {other}"
                )));
            }
        }
    }
    Ok(d)
}

pub fn is_d_compatible(a: &PatternAtlas, x: VariableId, z: VariableId) -> Result<bool> {
    Ok(compatibility_degree(a, x, z)? <= 0)
}

/// The full table `d(xj, xi)`, row `xj`, column `xi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeMatrix {
    entries: Vec<Vec<i64>>,
}

impl DegreeMatrix {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, xj: VariableId, xi: VariableId) -> i64 {
        self.entries[xj][xi]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// Tab-separated table with variable ids as row and column headers.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("d");
        for i in 0..self.len() {
            out.push_str(&format!("\t{i}"));
        }
        out.push('\n');
        for (j, row) in self.entries.iter().enumerate() {
            out.push_str(&j.to_string());
            for d in row {
                out.push_str(&format!("\t{d}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Degree table together with the first containing-cluster disagreement,
/// if any.
fn collect_degrees(a: &PatternAtlas) -> Result<(DegreeMatrix, Option<String>)> {
    use rayon::prelude::*;

    let nv = a.num_variables();
    let per_cluster: Vec<Result<Vec<Vec<i64>>>> = a
        .clusters()
        .par_iter()
        .map(|c| {
            a.expansions_in(c)?
                .iter()
                .map(|p| p.min_exponents())
                .collect::<Result<Vec<_>>>()
        })
        .collect();
    let mut entries: Vec<Vec<Option<(i64, usize)>>> = vec![vec![None; nv]; nv];
    let mut conflict = None;
    for (ci, (c, mins)) in a.clusters().iter().zip(per_cluster).enumerate() {
        let mins = mins?;
        for (q, &xj) in c.ids().iter().enumerate() {
            for (xi, m) in mins.iter().enumerate() {
                let d = -m[q];
                match entries[xj][xi] {
                    None => entries[xj][xi] = Some((d, ci)),
                    Some((e, cj)) if e != d && conflict.is_none() => {
                        conflict = Some(format!(
                            "d({xj}, {xi}) is {e} in {} but {d} in {c}",
                            a.clusters()[cj]
                        ));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let entries = entries
        .into_iter()
        .enumerate()
        .map(|(j, row)| {
            row.into_iter()
                .map(|e| e.map(|(d, _)| d).ok_or(Error::NoContainingCluster(j)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((DegreeMatrix { entries }, conflict))
}

pub fn degree_matrix(a: &PatternAtlas) -> Result<DegreeMatrix> {
    a.require_complete()?;
    match collect_degrees(a)? {
        (m, None) => Ok(m),
        (_, Some(msg)) => Err(Error::InvariantViolated(msg)),
    }
}

/// Pass/fail of one property with its first counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub counterexample: Option<String>,
}

impl PropertyCheck {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReport {
    pub variables: usize,
    pub pairs: usize,
    pub properties: Vec<PropertyCheck>,
}

impl DegreeReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyCheck::passed)
    }
}

fn shared_clusters(a: &PatternAtlas) -> Vec<Vec<bool>> {
    let nv = a.num_variables();
    let mut share = vec![vec![false; nv]; nv];
    for c in a.clusters() {
        for &u in c.ids() {
            for &v in c.ids() {
                share[u][v] = true;
            }
        }
    }
    share
}

/// Checks, for every ordered pair of variables:
/// 1. the degree does not depend on the containing cluster;
/// 2. `d = -1` iff the variables are equal (and symmetrically);
/// 3. `d = 0` iff they are distinct and share a cluster (and symmetrically);
/// 4. `d <= 0` iff they share a cluster;
/// 5. `d > 0` iff they share no cluster (and symmetrically).
#[allow(clippy::needless_range_loop)]
pub fn verify_degree_properties(a: &PatternAtlas) -> Result<DegreeReport> {
    a.require_complete()?;
    let (m, conflict) = collect_degrees(a)?;
    let share = shared_clusters(a);
    let nv = m.len();
    let mut checks = vec![
        PropertyCheck {
            name: "independent of cluster choice",
            counterexample: conflict,
        },
        PropertyCheck {
            name: "d = -1 iff equal",
            counterexample: None,
        },
        PropertyCheck {
            name: "d = 0 iff distinct and compatible",
            counterexample: None,
        },
        PropertyCheck {
            name: "d <= 0 iff compatible",
            counterexample: None,
        },
        PropertyCheck {
            name: "d > 0 iff incompatible",
            counterexample: None,
        },
    ];
    let mut fail = |idx: usize, msg: String| {
        if checks[idx].counterexample.is_none() {
            checks[idx].counterexample = Some(msg);
        }
    };
    for j in 0..nv {
        for i in 0..nv {
            let (d, back) = (m.get(j, i), m.get(i, j));
            let pair = format!("d({j}, {i}) = {d}, d({i}, {j}) = {back}");
            if (d == -1) != (i == j) || (d == -1) != (back == -1) {
                fail(1, pair.clone());
            }
            if (d == 0) != (i != j && share[i][j]) || (d == 0) != (back == 0) {
                fail(2, pair.clone());
            }
            if (d <= 0) != share[i][j] {
                fail(3, pair.clone());
            }
            if (d > 0) != !share[i][j] || (d > 0) != (back > 0) {
                fail(4, pair);
            }
        }
    }
    Ok(DegreeReport {
        variables: nv,
        pairs: nv * nv,
        properties: checks,
    })
}

fn bron_kerbosch(
    adj: &[BTreeSet<usize>],
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<BTreeSet<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.iter().copied().collect());
        return;
    }
    let pivot = p
        .union(&x)
        .copied()
        .max_by_key(|&u| (adj[u].intersection(&p).count(), std::cmp::Reverse(u)))
        .expect("p or x is nonempty");
    let candidates: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
    for v in candidates {
        r.push(v);
        bron_kerbosch(
            adj,
            r,
            p.intersection(&adj[v]).copied().collect(),
            x.intersection(&adj[v]).copied().collect(),
            out,
        );
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

/// All maximal sets of pairwise d-compatible variables, sorted.
pub fn maximal_d_compatible_sets(a: &PatternAtlas) -> Result<Vec<BTreeSet<VariableId>>> {
    let m = degree_matrix(a)?;
    let nv = m.len();
    let adj: Vec<BTreeSet<usize>> = (0..nv)
        .map(|u| {
            (0..nv)
                .filter(|&v| v != u && m.get(u, v) <= 0 && m.get(v, u) <= 0)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    bron_kerbosch(&adj, &mut Vec::new(), (0..nv).collect(), BTreeSet::new(), &mut out);
    out.sort();
    Ok(out)
}

/// Comparison of maximal d-compatible sets with the stored clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatTheoremReport {
    pub maximal_sets: usize,
    pub clusters: usize,
    /// Maximal d-compatible sets that are not clusters.
    pub extra: Vec<BTreeSet<VariableId>>,
    /// Clusters that are not maximal d-compatible sets.
    pub missing: Vec<Cluster>,
}

impl CompatTheoremReport {
    pub fn passed(&self) -> bool {
        self.extra.is_empty() && self.missing.is_empty()
    }
}

pub fn verify_compat_theorem(a: &PatternAtlas) -> Result<CompatTheoremReport> {
    let sets = maximal_d_compatible_sets(a)?;
    let clusters: BTreeSet<BTreeSet<VariableId>> = a
        .clusters()
        .iter()
        .map(|c| c.ids().iter().copied().collect())
        .collect();
    let found: BTreeSet<BTreeSet<VariableId>> = sets.iter().cloned().collect();
    Ok(CompatTheoremReport {
        maximal_sets: sets.len(),
        clusters: clusters.len(),
        extra: found.difference(&clusters).cloned().collect(),
        missing: clusters
            .difference(&found)
            .map(|s| Cluster::new(s.iter().copied().collect()))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LaurentPoly;
    use crate::atlas::Caps;
    use crate::seed::{ExchangeMatrix, Seed};

    fn trivial(rows: &[&[i64]]) -> PatternAtlas {
        let b = ExchangeMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap();
        PatternAtlas::explore(&Seed::trivial(b), Caps::default()).unwrap()
    }

    fn var(a: &PatternAtlas, s: &str) -> VariableId {
        a.lookup(&LaurentPoly::parse(s, a.rank(), 0).unwrap()).unwrap()
    }

    #[test]
    fn d_vectors_in_a2() {
        let a = trivial(&[&[0, 1], &[-1, 0]]);
        let root = a.root_cluster().clone();
        let x1 = var(&a, "x1");
        let z = var(&a, "x1^-1*x2^-1 + x2^-1 + x1^-1");
        let u = var(&a, "x1^-1 + x1^-1*x2");
        assert_eq!(d_vector(&a, x1, &root).unwrap(), DVector(vec![-1, 0]));
        assert_eq!(d_vector(&a, z, &root).unwrap(), DVector(vec![1, 1]));
        assert_eq!(d_vector(&a, u, &root).unwrap(), DVector(vec![1, 0]));
    }

    #[test]
    fn degrees_in_a2() {
        let a = trivial(&[&[0, 1], &[-1, 0]]);
        let x1 = var(&a, "x1");
        let x2 = var(&a, "x2");
        let z = var(&a, "x1^-1*x2^-1 + x2^-1 + x1^-1");
        let u = var(&a, "x1^-1 + x1^-1*x2");
        assert_eq!(compatibility_degree(&a, x1, x1).unwrap(), -1);
        assert_eq!(compatibility_degree(&a, x1, x2).unwrap(), 0);
        assert_eq!(compatibility_degree(&a, x1, u).unwrap(), 1);
        assert!(is_d_compatible(&a, z, z).unwrap());
        assert!(!is_d_compatible(&a, x1, z).unwrap());
        let m = degree_matrix(&a).unwrap();
        for v in a.variable_ids() {
            for w in a.variable_ids() {
                assert_eq!(m.get(v, w), compatibility_degree(&a, v, w).unwrap());
            }
        }
    }

    #[test]
    fn properties_hold_in_small_finite_types() {
        for rows in [
            &[&[0, 1][..], &[-1, 0]][..],
            &[&[0, 2], &[-1, 0]],
            &[&[0, 3], &[-1, 0]],
            &[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]],
        ] {
            let a = trivial(rows);
            let r = verify_degree_properties(&a).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.properties.len(), 5);
        }
    }

    #[test]
    fn maximal_sets_are_clusters() {
        let cases: [(&[&[i64]], usize); 4] = [
            (&[&[0]], 2),
            (&[&[0, 1], &[-1, 0]], 5),
            (&[&[0, 2], &[-1, 0]], 6),
            (&[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]], 14),
        ];
        for (rows, count) in cases {
            let a = trivial(rows);
            let sets = maximal_d_compatible_sets(&a).unwrap();
            assert_eq!(sets.len(), count);
            let r = verify_compat_theorem(&a).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn bron_kerbosch_on_a_small_graph() {
        // triangle 0-1-2 plus pendant edge 2-3
        let edges = [(0, 1), (1, 2), (0, 2), (2, 3)];
        let mut adj = vec![BTreeSet::new(); 5];
        for (u, v) in edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        let mut out = Vec::new();
        bron_kerbosch(&adj, &mut Vec::new(), (0..5).collect(), BTreeSet::new(), &mut out);
        out.sort();
        let expect: Vec<BTreeSet<usize>> = vec![
            [0, 1, 2].into_iter().collect(),
            [2, 3].into_iter().collect(),
            [4].into_iter().collect(),
        ];
        assert_eq!(out, expect);
    }

    #[test]
    fn incomplete_atlases_are_refused() {
        let b = ExchangeMatrix::from_rows(vec![vec![0, 2], vec![-2, 0]]).unwrap();
        let caps = Caps {
            max_seeds: 20,
            ..Caps::default()
        };
        let a = PatternAtlas::explore(&Seed::trivial(b), caps).unwrap();
        assert_eq!(verify_degree_properties(&a).unwrap_err(), Error::IncompleteAtlas);
        assert_eq!(maximal_d_compatible_sets(&a).unwrap_err(), Error::IncompleteAtlas);
    }

    #[test]
    fn tsv_export() {
        let a = trivial(&[&[0]]);
        assert_eq!(degree_matrix(&a).unwrap().to_tsv(), "d\t0\t1\n0\t-1\t1\n1\t1\t-1\n");
    }
}
