//! Sampling-set construction by random walks, a uniform baseline, and the
//! boundary-edge condition under which TV minimization recovers a clustered
//! signal exactly.
//!
//! A walk of length `L` is the node sequence `(v_1, ..., v_L)` with `v_1` the
//! seed node, so it takes `L - 1` steps. Each step moves to a uniformly chosen
//! neighbor; a walk standing on an isolated node stays there.

use std::collections::BTreeSet;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::synth::AppmSpec;

/// Walks allowed per requested sample before random-walk sampling gives up.
pub const MAX_WALKS_PER_SAMPLE: usize = 100;

/// Distinct observed nodes, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingSet {
    nodes: Vec<usize>,
    budget: usize,
}

impl SamplingSet {
    /// Builds a set from explicit node ids (duplicates rejected); the budget is
    /// the number of nodes.
    pub fn from_nodes(g: &Graph, nodes: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for n in nodes {
            g.check_node(n)?;
            if !seen.insert(n) {
                return Err(Error::InvalidParameter(format!(
                    "node {n} listed twice in sampling set"
                )));
            }
        }
        let nodes: Vec<usize> = seen.into_iter().collect();
        Ok(SamplingSet {
            budget: nodes.len(),
            nodes,
        })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }

    /// Membership mask over `0..node_count`.
    pub fn mask(&self, node_count: usize) -> Vec<bool> {
        let mut mask = vec![false; node_count];
        for &n in &self.nodes {
            mask[n] = true;
        }
        mask
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkConfig {
    pub length: usize,
    pub budget: usize,
}

impl WalkConfig {
    pub fn new(length: usize, budget: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidParameter(
                "walk length must be at least 1".into(),
            ));
        }
        check_budget(budget)?;
        Ok(WalkConfig { length, budget })
    }
}

fn check_budget(budget: usize) -> Result<()> {
    if budget == 0 {
        return Err(Error::InvalidParameter(
            "sampling budget must be at least 1".into(),
        ));
    }
    Ok(())
}

fn check_budget_fits(g: &Graph, budget: usize) -> Result<()> {
    check_budget(budget)?;
    if budget > g.node_count() {
        return Err(Error::InvalidParameter(format!(
            "budget {budget} exceeds node count {}",
            g.node_count()
        )));
    }
    Ok(())
}

/// Simple random walk `(seed_node, v_2, ..., v_length)`.
pub fn random_walk<R: Rng + ?Sized>(
    g: &Graph,
    seed_node: usize,
    length: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    g.check_node(seed_node)?;
    if length == 0 {
        return Err(Error::InvalidParameter(
            "walk length must be at least 1".into(),
        ));
    }
    let mut path = Vec::with_capacity(length);
    path.push(seed_node);
    let mut current = seed_node;
    for _ in 1..length {
        current = step(g, current, rng);
        path.push(current);
    }
    Ok(path)
}

#[inline]
fn step<R: Rng + ?Sized>(g: &Graph, node: usize, rng: &mut R) -> usize {
    g.neighbors(node).choose(rng).copied().unwrap_or(node)
}

fn walk_endpoint<R: Rng + ?Sized>(
    g: &Graph,
    seed_node: usize,
    length: usize,
    rng: &mut R,
) -> usize {
    (1..length).fold(seed_node, |node, _| step(g, node, rng))
}

/// Random-walk sampling: start a walk of `cfg.length` nodes at a uniformly
/// drawn seed and keep its final node. Walks whose endpoint is already in the
/// set are discarded and redrawn, until `cfg.budget` distinct nodes are
/// collected or [`MAX_WALKS_PER_SAMPLE`]` * budget` walks have been run.
pub fn random_walk_sampling<R: Rng + ?Sized>(
    g: &Graph,
    cfg: WalkConfig,
    rng: &mut R,
) -> Result<SamplingSet> {
    check_budget_fits(g, cfg.budget)?;
    let max_walks = MAX_WALKS_PER_SAMPLE * cfg.budget;
    let mut chosen = vec![false; g.node_count()];
    let mut nodes = Vec::with_capacity(cfg.budget);
    let mut walks = 0;
    while nodes.len() < cfg.budget {
        if walks == max_walks {
            return Err(Error::BudgetUnreachable {
                budget: cfg.budget,
                collected: nodes.len(),
                walks,
            });
        }
        walks += 1;
        let seed_node = rng.gen_range(0..g.node_count());
        let end = walk_endpoint(g, seed_node, cfg.length, rng);
        if !chosen[end] {
            chosen[end] = true;
            nodes.push(end);
        }
    }
    nodes.sort_unstable();
    Ok(SamplingSet {
        nodes,
        budget: cfg.budget,
    })
}

/// `budget` distinct nodes drawn uniformly without replacement.
pub fn uniform_sampling<R: Rng + ?Sized>(
    g: &Graph,
    budget: usize,
    rng: &mut R,
) -> Result<SamplingSet> {
    check_budget_fits(g, budget)?;
    let mut nodes = index::sample(rng, g.node_count(), budget).into_vec();
    nodes.sort_unstable();
    Ok(SamplingSet { nodes, budget })
}

/// Limiting visit probabilities `d_i / (2|E|)` of the simple random walk.
pub fn stationary_distribution(g: &Graph) -> Result<Vec<f64>> {
    if g.edge_count() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let total = 2.0 * g.edge_count() as f64;
    Ok(g.degrees().into_iter().map(|d| d as f64 / total).collect())
}

/// Empirical node-visit frequencies of one walk of `steps` nodes started at
/// `start`.
pub fn visit_frequencies<R: Rng + ?Sized>(
    g: &Graph,
    start: usize,
    steps: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    g.check_node(start)?;
    let mut counts = vec![0u64; g.node_count()];
    let mut node = start;
    for _ in 0..steps {
        counts[node] += 1;
        node = step(g, node, rng);
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / steps.max(1) as f64)
        .collect())
}

/// Approximate inclusion probability of a node from `cluster` for long walks:
/// the expected degree over twice the expected edge count.
pub fn sampling_probability_estimate(spec: &AppmSpec, cluster: usize) -> Result<f64> {
    let degree = spec.expected_degree(cluster)?;
    let edges = spec.expected_edge_count();
    if edges <= 0.0 {
        return Err(Error::InvalidParameter(
            "expected edge count is zero; sampling probability undefined".into(),
        ));
    }
    Ok(degree / (2.0 * edges))
}

/// One failed endpoint check on a boundary edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub edge: usize,
    /// Endpoint whose own cluster lacks sampled neighbors.
    pub node: usize,
    pub cluster: usize,
    /// `|M ∩ C ∩ N(node)|`.
    pub achieved: usize,
    /// The endpoint has fewer than two same-cluster neighbors at all, so no
    /// sampling set can satisfy this check.
    pub structural: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullspaceReport {
    pub satisfied: bool,
    pub violations: Vec<Violation>,
}

/// Sampled same-cluster neighbors required at each boundary-edge endpoint.
pub const REQUIRED_SAMPLED_NEIGHBORS: usize = 2;

/// Checks, for every boundary edge `{i, j}` with `i` in cluster `a` and `j`
/// in cluster `b`, that `i` has at least two sampled neighbors in `a` and `j`
/// has at least two sampled neighbors in `b`.
pub fn check_nullspace_condition(
    g: &Graph,
    part: &Partition,
    m: &SamplingSet,
) -> Result<NullspaceReport> {
    for &n in m.nodes() {
        g.check_node(n)?;
    }
    let boundary = g.boundary_edges(part)?;
    let sampled = m.mask(g.node_count());
    let mut violations = Vec::new();
    for e in boundary {
        let (t, h) = g.edge(e);
        for node in [t, h] {
            let cluster = part.cluster_of(node);
            let same_cluster = g
                .neighbors(node)
                .iter()
                .filter(|&&v| part.cluster_of(v) == cluster);
            let mut available = 0;
            let mut achieved = 0;
            for &v in same_cluster {
                available += 1;
                if sampled[v] {
                    achieved += 1;
                }
            }
            if achieved < REQUIRED_SAMPLED_NEIGHBORS {
                violations.push(Violation {
                    edge: e,
                    node,
                    cluster,
                    achieved,
                    structural: available < REQUIRED_SAMPLED_NEIGHBORS,
                });
            }
        }
    }
    Ok(NullspaceReport {
        satisfied: violations.is_empty(),
        violations,
    })
}
