//! Exploration of a cluster pattern from a root seed.
//!
//! Seeds are stored up to simultaneous permutation of their indices: each
//! stored seed is in canonical form, with its cluster variables sorted by
//! [`VariableId`]. Every mutation edge records the relabeling that brings the
//! mutated seed into canonical form, which is enough to replay any path of
//! the pattern on fresh coordinates (re-rooting) or to track the labeled
//! directions of the underlying `n`-regular tree.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{LaurentPoly, TropicalElement};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::seed::{ExchangeMatrix, Seed};

/// Index into an atlas's table of interned cluster variables.
pub type VariableId = usize;

/// Identity of a variable-interning table. Cluster labels are only
/// comparable between graphs built over the same table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TableId(u64);

impl TableId {
    fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(0);
        Self(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

/// An unordered cluster: `n` distinct variable ids, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Cluster(Vec<VariableId>);

impl Cluster {
    pub fn new(mut ids: Vec<VariableId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Self(ids)
    }

    pub fn ids(&self) -> &[VariableId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VariableId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Position of `v` in the canonical (sorted) order.
    pub fn position(&self, v: VariableId) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    /// Number of variables in `self` that are not in `other`.
    pub fn difference_count(&self, other: &Cluster) -> usize {
        self.0.iter().filter(|v| !other.contains(**v)).count()
    }
}

impl fmt::Display for Cluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub max_seeds: usize,
    pub max_depth: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            max_seeds: 10_000,
            max_depth: 64,
        }
    }
}

/// Mutation edge of the seed store. Mutating the source at canonical
/// position `p` and relabeling by `order` (new position `q` takes old
/// position `order[q]`) yields the target's canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub target: usize,
    pub order: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SeedRecord {
    /// Canonical form, cluster expansions in root coordinates. Its path is
    /// the labeled direction sequence from the root along which it was
    /// first reached.
    pub seed: Seed,
    pub ids: Vec<VariableId>,
    pub cluster: usize,
    pub depth: usize,
    /// Canonical position `p` holds the labeled index `labeling[p]` of the
    /// tree vertex reached by `seed.path()`.
    pub labeling: Vec<usize>,
}

type SeedKey = (Vec<VariableId>, Vec<TropicalElement>, ExchangeMatrix);

/// Coefficients used for the fresh root when expanding in another cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rerooting {
    /// Keep the coefficient tuple of the stored seed.
    Matching,
    /// Principal coefficients at the new root.
    Principal,
}

/// One labeled tree vertex reached by restricted mutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCluster {
    pub seed: usize,
    /// Variable id at each labeled position.
    pub labeled: Vec<VariableId>,
}

impl LabeledCluster {
    pub fn cluster(&self) -> Cluster {
        Cluster::new(self.labeled.clone())
    }
}

/// The explored part of a cluster pattern.
pub struct PatternAtlas {
    table: TableId,
    root: Seed,
    principal: bool,
    caps: Caps,
    complete: bool,
    variables: Vec<LaurentPoly>,
    var_index: HashMap<LaurentPoly, VariableId>,
    seeds: Vec<SeedRecord>,
    edges: Vec<Vec<Option<Edge>>>,
    adjacency: Vec<Vec<Option<Edge>>>,
    clusters: Vec<Cluster>,
    cluster_seeds: Vec<Vec<usize>>,
    expansions: Vec<OnceLock<Result<Vec<Option<LaurentPoly>>>>>,
}

impl fmt::Debug for PatternAtlas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PatternAtlas")
            .field("rank", &self.rank())
            .field("variables", &self.variables.len())
            .field("clusters", &self.clusters.len())
            .field("seeds", &self.seeds.len())
            .field("complete", &self.complete)
            .finish()
    }
}

fn canonical_order(ids: &[VariableId]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by_key(|&i| ids[i]);
    order
}

fn is_principal(root: &Seed) -> bool {
    let n = root.rank();
    root.coef_rank() == n
        && root
            .coefficients()
            .iter()
            .enumerate()
            .all(|(i, y)| *y == TropicalElement::generator(n, i))
        && root
            .cluster()
            .iter()
            .enumerate()
            .all(|(i, x)| x.as_coordinate() == Some(i))
}

struct Builder {
    root: Seed,
    principal: bool,
    variables: Vec<LaurentPoly>,
    var_index: HashMap<LaurentPoly, VariableId>,
    seeds: Vec<SeedRecord>,
    seed_index: HashMap<SeedKey, usize>,
    edges: Vec<Vec<Option<Edge>>>,
}

impl Builder {
    fn intern(&mut self, p: &LaurentPoly) -> Result<VariableId> {
        if let Some(&id) = self.var_index.get(p) {
            return Ok(id);
        }
        if self.principal {
            p.degree(self.root.exchange_matrix().matrix())?;
        }
        let id = self.variables.len();
        self.variables.push(p.clone());
        self.var_index.insert(p.clone(), id);
        Ok(id)
    }

    fn key(seed: &Seed, ids: &[VariableId]) -> SeedKey {
        (
            ids.to_vec(),
            seed.coefficients().to_vec(),
            seed.exchange_matrix().clone(),
        )
    }

    fn push(&mut self, seed: Seed, ids: Vec<VariableId>, depth: usize, labeling: Vec<usize>) -> usize {
        let idx = self.seeds.len();
        self.seed_index.insert(Self::key(&seed, &ids), idx);
        self.seeds.push(SeedRecord {
            seed,
            ids,
            cluster: usize::MAX,
            depth,
            labeling,
        });
        self.edges.push(vec![None; self.root.rank()]);
        idx
    }
}

impl PatternAtlas {
    /// Breadth-first mutation closure of `root`, bounded by `caps`.
    ///
    /// Exhausting the caps is not an error: the atlas is then marked
    /// incomplete. Errors only surface from arithmetic failures, which would
    /// mean a violation of the Laurent phenomenon or of positivity.
    pub fn explore(root: &Seed, caps: Caps) -> Result<Self> {
        let n = root.rank();
        let mut b = Builder {
            root: root.clone(),
            principal: is_principal(root),
            variables: Vec::new(),
            var_index: HashMap::new(),
            seeds: Vec::new(),
            seed_index: HashMap::new(),
            edges: Vec::new(),
        };
        let root_ids = root
            .cluster()
            .iter()
            .map(|x| b.intern(x))
            .collect::<Result<Vec<_>>>()?;
        if BTreeSet::from_iter(&root_ids).len() != n {
            return Err(Error::PreconditionViolated(
                "root cluster has repeated variables".into(),
            ));
        }
        let order = canonical_order(&root_ids);
        let mut canon = root.permuted(&order);
        canon.set_path(Vec::new());
        let ids: Vec<_> = order.iter().map(|&o| root_ids[o]).collect();
        b.push(canon, ids, 0, order);

        let mut complete = true;
        let mut frontier = vec![0usize];
        let mut depth = 0usize;
        while !frontier.is_empty() {
            let may_grow = depth < caps.max_depth;
            let mutated: Vec<(usize, usize, Result<Seed>)> = frontier
                .par_iter()
                .flat_map_iter(|&s| (0..n).map(move |p| (s, p)))
                .map(|(s, p)| (s, p, b.seeds[s].seed.mutate(p)))
                .collect();

            let mut next = Vec::new();
            for (s, p, result) in mutated {
                let m = result?;
                let room = may_grow && b.seeds.len() < caps.max_seeds;
                let new_var = match b.var_index.get(&m.cluster()[p]) {
                    Some(&id) => id,
                    None if room => b.intern(&m.cluster()[p])?,
                    None => {
                        complete = false;
                        continue;
                    }
                };
                let mut ids = b.seeds[s].ids.clone();
                ids[p] = new_var;
                let order = canonical_order(&ids);
                let canon = m.permuted(&order);
                let sorted: Vec<_> = order.iter().map(|&o| ids[o]).collect();
                let target = match b.seed_index.get(&Builder::key(&canon, &sorted)) {
                    Some(&t) => t,
                    None if room => {
                        let parent = &b.seeds[s];
                        let labeling: Vec<usize> = order.iter().map(|&o| parent.labeling[o]).collect();
                        let mut path = parent.seed.path().to_vec();
                        path.push(parent.labeling[p]);
                        let mut canon = canon;
                        canon.set_path(path);
                        let t = b.push(canon, sorted, depth + 1, labeling);
                        next.push(t);
                        t
                    }
                    None => {
                        complete = false;
                        continue;
                    }
                };
                b.edges[s][p] = Some(Edge { target, order });
            }
            if !may_grow {
                break;
            }
            next.sort_by(|&a, &c| {
                Builder::key(&b.seeds[a].seed, &b.seeds[a].ids)
                    .cmp(&Builder::key(&b.seeds[c].seed, &b.seeds[c].ids))
            });
            frontier = next;
            depth += 1;
        }

        Ok(Self::finish(b, caps, complete))
    }

    fn finish(b: Builder, caps: Caps, complete: bool) -> Self {
        let Builder {
            root,
            principal,
            variables,
            var_index,
            mut seeds,
            edges,
            ..
        } = b;
        let n = root.rank();
        let clusters: Vec<Cluster> = seeds
            .iter()
            .map(|r| Cluster(r.ids.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let position: BTreeMap<&Cluster, usize> = clusters.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut cluster_seeds = vec![Vec::new(); clusters.len()];
        for (i, r) in seeds.iter_mut().enumerate() {
            let c = position[&Cluster(r.ids.clone())];
            r.cluster = c;
            cluster_seeds[c].push(i);
        }

        let mut adjacency = edges.clone();
        for (s, row) in edges.iter().enumerate() {
            for (p, e) in row.iter().enumerate() {
                if let Some(Edge { target, order }) = e {
                    let mut inverse = vec![0; n];
                    for (q, &o) in order.iter().enumerate() {
                        inverse[o] = q;
                    }
                    let back = inverse[p];
                    if adjacency[*target][back].is_none() {
                        adjacency[*target][back] = Some(Edge {
                            target: s,
                            order: inverse,
                        });
                    }
                }
            }
        }
        let expansions = (0..clusters.len()).map(|_| OnceLock::new()).collect();
        Self {
            table: TableId::fresh(),
            root,
            principal,
            caps,
            complete,
            variables,
            var_index,
            seeds,
            edges,
            adjacency,
            clusters,
            cluster_seeds,
            expansions,
        }
    }

    pub fn table(&self) -> TableId {
        self.table
    }

    pub fn rank(&self) -> usize {
        self.root.rank()
    }

    pub fn coef_rank(&self) -> usize {
        self.root.coef_rank()
    }

    pub fn root(&self) -> &Seed {
        &self.root
    }

    /// The exchange matrix at the root, which defines the grading.
    pub fn root_matrix(&self) -> &IntMatrix {
        self.root.exchange_matrix().matrix()
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn variable_ids(&self) -> std::ops::Range<VariableId> {
        0..self.variables.len()
    }

    /// Root expansion of a variable.
    pub fn variable(&self, v: VariableId) -> Result<&LaurentPoly> {
        self.variables.get(v).ok_or(Error::UnknownVariable(v))
    }

    pub fn lookup(&self, expansion: &LaurentPoly) -> Option<VariableId> {
        self.var_index.get(expansion).copied()
    }

    /// Clusters in canonical (lexicographic) order.
    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster_index(&self, c: &Cluster) -> Result<usize> {
        self.clusters
            .binary_search(c)
            .map_err(|_| Error::UnknownCluster(c.ids().to_vec()))
    }

    pub fn root_cluster(&self) -> &Cluster {
        &self.clusters[self.seeds[0].cluster]
    }

    pub fn seeds(&self) -> &[SeedRecord] {
        &self.seeds
    }

    /// Forward mutation edges as discovered during exploration.
    pub fn edges(&self) -> &[Vec<Option<Edge>>] {
        &self.edges
    }

    /// Stored seeds whose cluster is `clusters()[c]`.
    pub fn seeds_of_cluster(&self, c: usize) -> &[usize] {
        &self.cluster_seeds[c]
    }

    /// Clusters containing `v`, in canonical order.
    pub fn clusters_containing(&self, v: VariableId) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(move |c| c.contains(v))
    }

    pub fn share_cluster(&self, a: VariableId, b: VariableId) -> bool {
        self.clusters.iter().any(|c| c.contains(a) && c.contains(b))
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.complete {
            Ok(())
        } else {
            Err(Error::IncompleteAtlas)
        }
    }

    fn check_variable(&self, v: VariableId) -> Result<()> {
        if v < self.variables.len() {
            Ok(())
        } else {
            Err(Error::UnknownVariable(v))
        }
    }

    /// Replays the stored pattern on fresh coordinates placed at the first
    /// seed of cluster `c`; returns every reachable variable's expansion.
    fn replay(&self, c: usize, mode: Rerooting) -> Result<Vec<Option<LaurentPoly>>> {
        let start = self.cluster_seeds[c][0];
        let base = &self.seeds[start].seed;
        let fresh = match mode {
            Rerooting::Matching => base.rerooted(),
            Rerooting::Principal => base.rerooted_principal(),
        };
        let mut aligned: Vec<Option<Seed>> = vec![None; self.seeds.len()];
        aligned[start] = Some(fresh);
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            for (p, e) in self.adjacency[s].iter().enumerate() {
                let Some(Edge { target, order }) = e else { continue };
                if aligned[*target].is_some() {
                    continue;
                }
                let here = aligned[s].as_ref().expect("queued seeds are aligned");
                aligned[*target] = Some(here.mutate(p)?.permuted(order));
                queue.push_back(*target);
            }
        }
        let mut out: Vec<Option<LaurentPoly>> = vec![None; self.variables.len()];
        for (s, seed) in aligned.iter().enumerate() {
            let Some(seed) = seed else { continue };
            for (q, &id) in self.seeds[s].ids.iter().enumerate() {
                match &out[id] {
                    Some(prev) if *prev != seed.cluster()[q] => {
                        return Err(Error::InvariantViolated(format!(
                            "variable {id} has two different expansions after re-rooting"
                        )));
                    }
                    Some(_) => {}
                    None => out[id] = Some(seed.cluster()[q].clone()),
                }
            }
        }
        Ok(out)
    }

    fn cached_expansions(&self, c: usize) -> Result<&[Option<LaurentPoly>]> {
        self.expansions[c]
            .get_or_init(|| self.replay(c, Rerooting::Matching))
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    /// Laurent expansion of `v` in the coordinates of `c` (in `c`'s canonical
    /// order), with the coefficients of the stored seed at `c`.
    pub fn expand(&self, v: VariableId, c: &Cluster) -> Result<LaurentPoly> {
        self.expand_with(v, c, Rerooting::Matching)
    }

    pub fn expand_with(&self, v: VariableId, c: &Cluster, mode: Rerooting) -> Result<LaurentPoly> {
        self.check_variable(v)?;
        let ci = self.cluster_index(c)?;
        let found = match mode {
            Rerooting::Matching => self.cached_expansions(ci)?[v].clone(),
            Rerooting::Principal => self.replay(ci, mode)?[v].take(),
        };
        found.ok_or_else(|| {
            Error::InvariantViolated(format!("variable {v} unreachable from cluster {c}"))
        })
    }

    /// Expansions of every variable in the coordinates of `c`, indexed by id.
    pub fn expansions_in(&self, c: &Cluster) -> Result<Vec<LaurentPoly>> {
        let ci = self.cluster_index(c)?;
        self.cached_expansions(ci)?
            .iter()
            .enumerate()
            .map(|(v, p)| {
                p.clone().ok_or_else(|| {
                    Error::InvariantViolated(format!("variable {v} unreachable from cluster {c}"))
                })
            })
            .collect()
    }

    /// All labeled tree vertices reachable from the root by mutations whose
    /// labeled directions lie in `subset` (0-based), deduplicated.
    pub fn labeled_reach(&self, subset: &[usize]) -> Vec<LabeledCluster> {
        let n = self.rank();
        let allowed: BTreeSet<usize> = subset.iter().copied().filter(|&k| k < n).collect();
        let start = (0usize, self.seeds[0].labeling.clone());
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        let mut out = Vec::new();
        while let Some((s, labeling)) = queue.pop_front() {
            let ids = &self.seeds[s].ids;
            let mut labeled = vec![0; n];
            for (p, &l) in labeling.iter().enumerate() {
                labeled[l] = ids[p];
            }
            out.push(LabeledCluster { seed: s, labeled });
            for (p, e) in self.adjacency[s].iter().enumerate() {
                if !allowed.contains(&labeling[p]) {
                    continue;
                }
                let Some(Edge { target, order }) = e else { continue };
                let next: Vec<usize> = order.iter().map(|&o| labeling[o]).collect();
                let state = (*target, next);
                if seen.insert(state.clone()) {
                    queue.push_back(state);
                }
            }
        }
        out
    }

    pub fn exchange_graph(&self) -> ExchangeGraph {
        let mut edges = BTreeSet::new();
        for (s, row) in self.edges.iter().enumerate() {
            for e in row.iter().flatten() {
                let (a, b) = (self.seeds[s].cluster, self.seeds[e.target].cluster);
                if a != b {
                    edges.insert((a.min(b), a.max(b)));
                }
            }
        }
        ExchangeGraph {
            table: self.table,
            vertices: self.clusters.clone(),
            edges,
            complete: self.complete,
        }
    }

    /// JSON-compatible export of the atlas. Directions are 1-based.
    pub fn to_document(&self) -> AtlasDocument {
        let graph = self.exchange_graph();
        AtlasDocument {
            rank: self.rank(),
            coefficient_rank: self.coef_rank(),
            principal: self.principal,
            complete: self.complete,
            caps: self.caps,
            root_exchange_matrix: self.root_matrix().to_rows(),
            variables: self
                .variables
                .iter()
                .enumerate()
                .map(|(id, p)| VariableEntry {
                    id,
                    expansion: p.to_string(),
                })
                .collect(),
            clusters: self.clusters.clone(),
            seeds: self
                .seeds
                .iter()
                .map(|r| SeedEntry {
                    cluster: r.cluster,
                    variables: r.ids.clone(),
                    exchange_matrix: r.seed.exchange_matrix().matrix().to_rows(),
                    coefficients: r.seed.coefficients().iter().map(ToString::to_string).collect(),
                    depth: r.depth,
                    path: r.seed.path().iter().map(|k| k + 1).collect(),
                })
                .collect(),
            mutations: self
                .edges
                .iter()
                .enumerate()
                .flat_map(|(s, row)| {
                    row.iter().enumerate().filter_map(move |(p, e)| {
                        e.as_ref().map(|e| MutationEntry {
                            from: s,
                            direction: p + 1,
                            to: e.target,
                        })
                    })
                })
                .collect(),
            exchange_graph: graph.edges.iter().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VariableEntry {
    pub id: VariableId,
    pub expansion: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedEntry {
    pub cluster: usize,
    pub variables: Vec<VariableId>,
    pub exchange_matrix: Vec<Vec<i64>>,
    pub coefficients: Vec<String>,
    pub depth: usize,
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MutationEntry {
    pub from: usize,
    pub direction: usize,
    pub to: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AtlasDocument {
    pub rank: usize,
    pub coefficient_rank: usize,
    pub principal: bool,
    pub complete: bool,
    pub caps: Caps,
    pub root_exchange_matrix: Vec<Vec<i64>>,
    pub variables: Vec<VariableEntry>,
    pub clusters: Vec<Cluster>,
    pub seeds: Vec<SeedEntry>,
    pub mutations: Vec<MutationEntry>,
    pub exchange_graph: Vec<(usize, usize)>,
}

/// The exchange graph: clusters as vertices (sorted), edges as pairs of
/// vertex indices `(a, b)` with `a < b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeGraph {
    table: TableId,
    vertices: Vec<Cluster>,
    edges: BTreeSet<(usize, usize)>,
    complete: bool,
}

impl ExchangeGraph {
    pub fn table(&self) -> TableId {
        self.table
    }

    pub fn vertices(&self) -> &[Cluster] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// False when the atlas was truncated and the graph may be a subgraph.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match (a == v, b == v) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .collect()
    }

    /// Relabels cluster vertices through `map` (old variable id to new id)
    /// onto the interning table `table`.
    pub fn relabel(&self, map: &[VariableId], table: TableId) -> Self {
        let renamed: Vec<Cluster> = self
            .vertices
            .iter()
            .map(|c| Cluster::new(c.ids().iter().map(|&v| map[v]).collect()))
            .collect();
        let mut order: Vec<usize> = (0..renamed.len()).collect();
        order.sort_by(|&a, &b| renamed[a].cmp(&renamed[b]));
        let mut new_index = vec![0; renamed.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        Self {
            table,
            vertices: order.iter().map(|&o| renamed[o].clone()).collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| {
                    let (a, b) = (new_index[a], new_index[b]);
                    (a.min(b), a.max(b))
                })
                .collect(),
            complete: self.complete,
        }
    }

    /// Graphviz rendering with cluster labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph exchange {\n");
        for (i, c) in self.vertices.iter().enumerate() {
            out.push_str(&format!("  c{i} [label=\"{c}\"];\n"));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("  c{a} -- c{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Outcome of a labeled graph comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphComparison {
    pub equal: bool,
    pub difference: Option<String>,
}

/// Equality of exchange graphs as labeled graphs. Both must be labeled over
/// the same interning table.
pub fn graphs_equal(g1: &ExchangeGraph, g2: &ExchangeGraph) -> Result<GraphComparison> {
    if g1.table != g2.table {
        return Err(Error::TableMismatch);
    }
    let v1: BTreeSet<&Cluster> = g1.vertices.iter().collect();
    let v2: BTreeSet<&Cluster> = g2.vertices.iter().collect();
    if let Some(c) = v1.symmetric_difference(&v2).next() {
        let side = if v1.contains(c) { "first" } else { "second" };
        return Ok(GraphComparison {
            equal: false,
            difference: Some(format!("vertex {c} only in the {side} graph")),
        });
    }
    let labeled = |g: &ExchangeGraph| -> BTreeSet<(Cluster, Cluster)> {
        g.edges
            .iter()
            .map(|&(a, b)| (g.vertices[a].clone(), g.vertices[b].clone()))
            .collect()
    };
    let (e1, e2) = (labeled(g1), labeled(g2));
    if let Some((a, b)) = e1.symmetric_difference(&e2).next() {
        let side = if e1.contains(&(a.clone(), b.clone())) { "first" } else { "second" };
        return Ok(GraphComparison {
            equal: false,
            difference: Some(format!("edge {a} -- {b} only in the {side} graph")),
        });
    }
    Ok(GraphComparison {
        equal: true,
        difference: None,
    })
}
