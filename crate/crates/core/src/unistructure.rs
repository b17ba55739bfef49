//! Laurent-monomial witnesses, incompatibility certificates, and the
//! comparison of two atlases that share their cluster variables.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::algebra::{CoefRingElement, LaurentPoly};
use crate::atlas::{graphs_equal, Caps, Cluster, GraphComparison, PatternAtlas, VariableId};
use crate::compat::{degree_matrix, DegreeMatrix};
use crate::error::{Error, Result};
use crate::seed::Seed;

/// Erases coefficients: every tropical monomial goes to 1, so each
/// coefficient becomes the sum of its integer coefficients.
pub fn phi(p: &LaurentPoly) -> LaurentPoly {
    p.map_coefficients(0, |c| CoefRingElement::from_integer(0, c.coefficient_sum()))
}

/// A term of the expansion of `target` in a cluster containing `reference`
/// whose exponents away from `reference` are nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessMonomial {
    pub reference: VariableId,
    pub target: VariableId,
    pub cluster: Cluster,
    /// Position of `reference` in the cluster's canonical order.
    pub k_position: usize,
    pub exponents: Vec<i64>,
    pub coefficient: CoefRingElement,
}

impl WitnessMonomial {
    pub fn k_exponent(&self) -> i64 {
        self.exponents[self.k_position]
    }

    /// Checks the sign trichotomy of the reference exponent.
    pub fn validate(&self) -> Result<()> {
        let e = self.k_exponent();
        let (k, i) = (self.reference, self.target);
        let inside = self.cluster.contains(i);
        let bad = |msg: String| Err(Error::TrichotomyViolated(msg));
        if e > 0 && i != k {
            return bad(format!("exponent {e} > 0 of {k} but target {i} differs"));
        }
        if e == 0 && (!inside || i == k) {
            return bad(format!(
                "exponent 0 of {k} but target {i} is not another member of {}",
                self.cluster
            ));
        }
        if !inside && e >= 0 {
            return bad(format!(
                "target {i} is outside {} but the exponent of {k} is {e}",
                self.cluster
            ));
        }
        Ok(())
    }
}

/// Witness search inside one cluster; terms are scanned from the
/// lexicographically largest exponent down.
pub fn witness_in_cluster(
    a: &PatternAtlas,
    reference: VariableId,
    target: VariableId,
    c: &Cluster,
) -> Result<Option<WitnessMonomial>> {
    let Some(k) = c.position(reference) else {
        return Ok(None);
    };
    let expansion = a.expand(target, c)?;
    let found = expansion
        .terms()
        .rev()
        .find(|(e, _)| e.iter().enumerate().all(|(j, &x)| j == k || x >= 0))
        .map(|(e, coef)| WitnessMonomial {
            reference,
            target,
            cluster: c.clone(),
            k_position: k,
            exponents: e.to_vec(),
            coefficient: coef.clone(),
        });
    Ok(found)
}

/// The first witness over the clusters containing `reference`, in
/// canonical order, after validating its trichotomy.
pub fn laurent_witness(a: &PatternAtlas, reference: VariableId, target: VariableId) -> Result<WitnessMonomial> {
    a.require_complete()?;
    a.variable(target)?;
    a.variable(reference)?;
    for c in a.clusters_containing(reference) {
        if let Some(w) = witness_in_cluster(a, reference, target, c)? {
            w.validate()?;
            return Ok(w);
        }
    }
    Err(Error::WitnessNotFound { reference, target })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSweep {
    pub pairs: usize,
    pub failures: Vec<(VariableId, VariableId, Error)>,
}

impl WitnessSweep {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs [`laurent_witness`] on every ordered pair of variables.
pub fn verify_witnesses(a: &PatternAtlas) -> Result<WitnessSweep> {
    use rayon::prelude::*;

    a.require_complete()?;
    let pairs: Vec<(VariableId, VariableId)> = a
        .variable_ids()
        .flat_map(|k| a.variable_ids().map(move |i| (k, i)))
        .collect();
    let results: Vec<Result<WitnessMonomial>> = pairs
        .par_iter()
        .map(|&(k, i)| laurent_witness(a, k, i))
        .collect();
    let mut failures = Vec::new();
    for (&(k, i), r) in pairs.iter().zip(results) {
        match r {
            Ok(_) => {}
            Err(e @ (Error::WitnessNotFound { .. } | Error::TrichotomyViolated(_))) => failures.push((k, i, e)),
            Err(e) => return Err(e),
        }
    }
    Ok(WitnessSweep {
        pairs: pairs.len(),
        failures,
    })
}

/// One factor `x_{i;t'}^{v_i}` of the witness, rewritten through a term of
/// `x_{i;t'}` whose exponent of the reference variable is `-a <= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateFactor {
    pub variable: VariableId,
    pub exponent: i64,
    pub a: i64,
    /// Image under [`phi`] of the chosen term's coefficient.
    pub coefficient: BigInt,
    pub in_host: bool,
}

/// The specialization argument ruling out a cluster containing two
/// variables that share no cluster of the atlas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompatibilityCertificate {
    pub x: VariableId,
    pub z: VariableId,
    pub host: Vec<VariableId>,
    pub witness: WitnessMonomial,
    /// Negated exponent of `x` in the witness.
    pub v1: i64,
    pub factors: Vec<CertificateFactor>,
    /// `phi` of the product of coefficients.
    pub constant: BigInt,
    /// Total power of `1/x`.
    pub exponent: i64,
    /// Value of `z - constant * x^(-exponent)` at `x = 1/2`, other host
    /// variables `= 1`.
    pub lhs_value: BigRational,
    /// The remaining terms are positive, so the right side is nonnegative.
    pub rhs_nonnegative: bool,
}

impl IncompatibilityCertificate {
    pub fn is_contradiction(&self) -> bool {
        self.lhs_value.is_negative() && self.rhs_nonnegative
    }
}

fn x_nonpositive_term(p: &LaurentPoly, k: usize) -> Option<(&[i64], &CoefRingElement)> {
    p.terms().rev().find(|(e, _)| e[k] <= 0)
}

/// Builds the certificate for `x`, `z` against a host set of variables
/// containing both (the host need not be a cluster of `a`).
pub fn incompatibility_certificate(
    a: &PatternAtlas,
    x: VariableId,
    z: VariableId,
    host: &[VariableId],
) -> Result<IncompatibilityCertificate> {
    a.require_complete()?;
    if a.share_cluster(x, z) {
        return Err(Error::PreconditionViolated(format!(
            "variables {x} and {z} share a cluster"
        )));
    }
    if !host.contains(&x) || !host.contains(&z) {
        return Err(Error::PreconditionViolated(format!(
            "host {host:?} must contain {x} and {z}"
        )));
    }
    if BTreeSet::from_iter(host).len() != host.len() {
        return Err(Error::PreconditionViolated(format!("host {host:?} repeats a variable")));
    }
    for &h in host {
        a.variable(h)?;
    }
    let witness = laurent_witness(a, x, z)?;
    let v1 = -witness.k_exponent();
    let t = &witness.cluster;
    let mut rhs_nonnegative = a.expand(z, t)?.has_positive_coefficients();

    let x_cluster = a.clusters_containing(x).next().ok_or(Error::NoContainingCluster(x))?;
    let xk = x_cluster.position(x).expect("cluster contains x");
    let mut factors = Vec::new();
    for (q, &u) in t.ids().iter().enumerate() {
        let vu = witness.exponents[q];
        if u == x || vu == 0 {
            continue;
        }
        let factor = if host.contains(&u) {
            CertificateFactor {
                variable: u,
                exponent: vu,
                a: 0,
                coefficient: BigInt::one(),
                in_host: true,
            }
        } else {
            let expansion = a.expand(u, x_cluster)?;
            rhs_nonnegative &= expansion.has_positive_coefficients();
            let (e, c) = x_nonpositive_term(&expansion, xk).ok_or_else(|| {
                Error::InvariantViolated(format!("d({x}, {u}) is negative for distinct variables"))
            })?;
            CertificateFactor {
                variable: u,
                exponent: vu,
                a: -e[xk],
                coefficient: c.coefficient_sum(),
                in_host: false,
            }
        };
        factors.push(factor);
    }

    let mut constant = witness.coefficient.coefficient_sum();
    let mut exponent = v1;
    for f in &factors {
        let power = u32::try_from(f.exponent).expect("witness exponents are nonnegative");
        constant *= num_traits::pow(f.coefficient.clone(), power as usize);
        exponent += f.exponent * f.a;
    }

    // z - C x^(-D) over the host coordinates; only x is moved off 1
    let h = host.len();
    let xi = host.iter().position(|&v| v == x).expect("checked above");
    let zi = host.iter().position(|&v| v == z).expect("checked above");
    let lhs_poly = {
        let zc = LaurentPoly::variable(h, 0, zi);
        let mut e = vec![0; h];
        e[xi] = -exponent;
        let m = LaurentPoly::monomial(e, CoefRingElement::from_integer(0, constant.clone()));
        zc.checked_sub(&m)?
    };
    let mut point = vec![BigRational::one(); h];
    point[xi] = BigRational::new(1.into(), 2.into());
    let lhs_value = lhs_poly.specialize(&point, &[])?;

    let closed = BigRational::one() - BigRational::from_integer(&constant * BigInt::from(2).pow(u32::try_from(exponent).unwrap_or(0)));
    if constant < BigInt::one() || exponent < 1 || lhs_value != closed {
        return Err(Error::InvariantViolated(format!(
            "certificate for ({x}, {z}) has constant {constant}, exponent {exponent}, value {lhs_value}"
        )));
    }
    Ok(IncompatibilityCertificate {
        x,
        z,
        host: host.to_vec(),
        witness,
        v1,
        factors,
        constant,
        exponent,
        lhs_value,
        rhs_nonnegative,
    })
}

/// Maps every variable of `a2` into `a1`, given the images of `a2`'s root
/// coordinates as expansions in `a1`'s root coordinates. Unmatched
/// variables carry a description of their image.
pub fn identify_variables(
    a1: &PatternAtlas,
    a2: &PatternAtlas,
    identification: &[LaurentPoly],
) -> Result<Vec<std::result::Result<VariableId, String>>> {
    if identification.len() != a2.rank() {
        return Err(Error::RankMismatch {
            expected: a2.rank(),
            found: identification.len(),
        });
    }
    a2.variable_ids()
        .map(|v| match a2.variable(v)?.substitute(identification) {
            Ok(image) => Ok(a1.lookup(&image).ok_or_else(|| image.to_string())),
            Err(Error::NotDivisible) => Ok(Err("not a Laurent polynomial in the first root cluster".into())),
            Err(e) => Err(e),
        })
        .collect()
}

/// Outcome of comparing two atlases over a shared variable set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnistructuralReport {
    pub ranks: (usize, usize),
    pub variables: (usize, usize),
    /// Variables of the second atlas (by id) with no match in the first.
    pub unmatched: Vec<(VariableId, String)>,
    pub clusters: (usize, usize),
    pub missing_clusters: Vec<Cluster>,
    pub extra_clusters: Vec<Cluster>,
    pub graphs: Option<GraphComparison>,
    /// First pair on which d-compatibility differs, in the first atlas's ids.
    pub compat_difference: Option<(VariableId, VariableId)>,
    pub compat_equal: bool,
    pub degree_matrices_equal: bool,
}

impl UnistructuralReport {
    pub fn variable_sets_equal(&self) -> bool {
        self.unmatched.is_empty() && self.variables.0 == self.variables.1
    }

    pub fn clusters_equal(&self) -> bool {
        self.variable_sets_equal() && self.missing_clusters.is_empty() && self.extra_clusters.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.clusters_equal() && self.graphs.as_ref().is_some_and(|g| g.equal) && self.compat_equal
    }
}

/// Compares cluster sets, labeled exchange graphs and d-compatibility of
/// two complete atlases; `identification` places `a2`'s root cluster in
/// `a1`'s root coordinates.
pub fn verify_unistructural(
    a1: &PatternAtlas,
    a2: &PatternAtlas,
    identification: &[LaurentPoly],
) -> Result<UnistructuralReport> {
    a1.require_complete()?;
    a2.require_complete()?;
    let matched = identify_variables(a1, a2, identification)?;
    let mut report = UnistructuralReport {
        ranks: (a1.rank(), a2.rank()),
        variables: (a1.num_variables(), a2.num_variables()),
        unmatched: Vec::new(),
        clusters: (a1.clusters().len(), a2.clusters().len()),
        missing_clusters: Vec::new(),
        extra_clusters: Vec::new(),
        graphs: None,
        compat_difference: None,
        compat_equal: false,
        degree_matrices_equal: false,
    };
    let mut map = Vec::with_capacity(matched.len());
    for (v, m) in matched.into_iter().enumerate() {
        match m {
            Ok(id) => map.push(id),
            Err(image) => report.unmatched.push((v, image)),
        }
    }
    if !report.unmatched.is_empty() || BTreeSet::from_iter(&map).len() != a1.num_variables() || map.len() != a1.num_variables() {
        if report.unmatched.is_empty() {
            report.unmatched.push((usize::MAX, "variable counts differ".into()));
        }
        return Ok(report);
    }

    let g1 = a1.exchange_graph();
    let g2 = a2.exchange_graph().relabel(&map, a1.table());
    let c1: BTreeSet<&Cluster> = g1.vertices().iter().collect();
    let c2: BTreeSet<&Cluster> = g2.vertices().iter().collect();
    report.missing_clusters = c1.difference(&c2).map(|c| (*c).clone()).collect();
    report.extra_clusters = c2.difference(&c1).map(|c| (*c).clone()).collect();
    report.graphs = Some(graphs_equal(&g1, &g2)?);

    let d1 = degree_matrix(a1)?;
    let d2 = degree_matrix(a2)?;
    let mut inverse = vec![0; map.len()];
    for (v2, &v1) in map.iter().enumerate() {
        inverse[v1] = v2;
    }
    let transported = |i: VariableId, j: VariableId| d2.get(inverse[i], inverse[j]);
    report.compat_difference = pairs(&d1).find(|&(i, j)| (d1.get(i, j) <= 0) != (transported(i, j) <= 0));
    report.compat_equal = report.compat_difference.is_none();
    report.degree_matrices_equal = pairs(&d1).all(|(i, j)| d1.get(i, j) == transported(i, j));
    Ok(report)
}

fn pairs(m: &DegreeMatrix) -> impl Iterator<Item = (usize, usize)> {
    let n = m.len();
    (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)))
}

/// The atlas explored from the first stored seed of cluster `c`, with the
/// same coefficients, together with the identification of its root
/// coordinates in `a`'s root coordinates.
pub fn rerooted_atlas(a: &PatternAtlas, c: &Cluster, caps: Caps) -> Result<(PatternAtlas, Vec<LaurentPoly>)> {
    let ci = a.cluster_index(c)?;
    let seed = &a.seeds()[a.seeds_of_cluster(ci)[0]].seed;
    let root = Seed::root(seed.exchange_matrix().clone(), seed.coefficients().to_vec())?;
    Ok((PatternAtlas::explore(&root, caps)?, seed.cluster().to_vec()))
}

/// Certificates for every ordered incompatible pair, each against the
/// synthetic host `{x, z}`.
pub fn all_certificates(a: &PatternAtlas) -> Result<BTreeMap<(VariableId, VariableId), IncompatibilityCertificate>> {
    let mut out = BTreeMap::new();
    for x in a.variable_ids() {
        for z in a.variable_ids() {
            if !a.share_cluster(x, z) {
                out.insert((x, z), incompatibility_certificate(a, x, z, &[x, z])?);
            }
        }
    }
    Ok(out)
}
