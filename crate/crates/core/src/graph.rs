//! Undirected simple graphs, node/edge signals and node partitions.
//!
//! Edges are stored once, oriented from the smaller node id (tail) to the
//! larger one (head), and sorted lexicographically. The edge index of a pair
//! is its position in that order and never changes for a given graph.
//!
//! The signed incidence operator `D` maps a node signal `x` to the edge
//! signal `(Dx)[e] = x[head(e)] - x[tail(e)]`, so the total variation of `x`
//! is exactly `||Dx||_1`.

use std::collections::VecDeque;
use std::ops::Index;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from unordered node pairs. Duplicate pairs (in either
    /// direction) collapse to one edge; self-loops and out-of-range ids are
    /// rejected.
    pub fn from_edges<I>(node_count: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            for node in [a, b] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        edges.dedup();

        let mut adjacency = vec![Vec::new(); node_count];
        for &(t, h) in &edges {
            adjacency[t].push(h);
            adjacency[h].push(t);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Graph {
            node_count,
            edges,
            adjacency,
        })
    }

    pub fn empty(node_count: usize) -> Self {
        Graph {
            node_count,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); node_count],
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `(tail, head)` pairs in edge-index order, `tail < head`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Index of edge `{a, b}` if present.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    /// Sorted neighbor list of `node`. Panics on an out-of-range id.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.node_count && self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn degree(&self, node: usize) -> Result<usize> {
        self.check_node(node)?;
        Ok(self.adjacency[node].len())
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn check_node(&self, node: usize) -> Result<()> {
        if node < self.node_count {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node,
                node_count: self.node_count,
            })
        }
    }

    pub fn incidence_apply(&self, x: &GraphSignal) -> Result<EdgeSignal> {
        check_len(self.node_count, x.len())?;
        let mut out = vec![0.0; self.edges.len()];
        self.incidence_apply_into(x.as_slice(), &mut out);
        Ok(EdgeSignal(out))
    }

    pub fn incidence_transpose_apply(&self, y: &EdgeSignal) -> Result<GraphSignal> {
        check_len(self.edges.len(), y.len())?;
        let mut out = vec![0.0; self.node_count];
        self.incidence_transpose_apply_into(y.as_slice(), &mut out);
        Ok(GraphSignal(out))
    }

    /// `out[e] = x[head] - x[tail]`; lengths are the caller's responsibility.
    pub(crate) fn incidence_apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, &(t, h)) in out.iter_mut().zip(&self.edges) {
            *o = x[h] - x[t];
        }
    }

    /// `out = D^T y`; overwrites `out`.
    pub(crate) fn incidence_transpose_apply_into(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (&ye, &(t, h)) in y.iter().zip(&self.edges) {
            out[h] += ye;
            out[t] -= ye;
        }
    }

    pub fn total_variation(&self, x: &GraphSignal) -> Result<f64> {
        check_len(self.node_count, x.len())?;
        Ok(self.total_variation_of(x.as_slice()))
    }

    pub(crate) fn total_variation_of(&self, x: &[f64]) -> f64 {
        self.edges.iter().map(|&(t, h)| (x[h] - x[t]).abs()).sum()
    }

    /// Edges whose endpoints lie in different clusters, ascending.
    pub fn boundary_edges(&self, part: &Partition) -> Result<Vec<usize>> {
        self.check_partition(part)?;
        Ok(self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, &(t, h))| part.cluster_of(t) != part.cluster_of(h))
            .map(|(e, _)| e)
            .collect())
    }

    /// Number of edges with exactly one endpoint in `cluster`.
    pub fn cut_size(&self, part: &Partition, cluster: usize) -> Result<usize> {
        self.check_partition(part)?;
        part.check_cluster(cluster)?;
        Ok(self
            .edges
            .iter()
            .filter(|&&(t, h)| (part.cluster_of(t) == cluster) != (part.cluster_of(h) == cluster))
            .count())
    }

    /// Cut sizes of every cluster in one pass.
    pub fn cut_sizes(&self, part: &Partition) -> Result<Vec<usize>> {
        self.check_partition(part)?;
        let mut cuts = vec![0; part.cluster_count()];
        for &(t, h) in &self.edges {
            let (a, b) = (part.cluster_of(t), part.cluster_of(h));
            if a != b {
                cuts[a] += 1;
                cuts[b] += 1;
            }
        }
        Ok(cuts)
    }

    fn check_partition(&self, part: &Partition) -> Result<()> {
        if part.node_count() != self.node_count {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} nodes, graph has {}",
                part.node_count(),
                self.node_count
            )));
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return true;
        }
        self.bfs_order(0).len() == self.node_count
    }

    /// Two-colorability; graphs with isolated nodes only are bipartite.
    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![u8::MAX; self.node_count];
        let mut queue = VecDeque::new();
        for start in 0..self.node_count {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u] {
                    if color[v] == u8::MAX {
                        color[v] = 1 - color[u];
                        queue.push_back(v);
                    } else if color[v] == color[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn bfs_order(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.node_count];
        let mut order = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    order.push(v);
                }
            }
        }
        order
    }

    /// Induced subgraph on `nodes` (must be sorted and distinct). New node
    /// `k` corresponds to `nodes[k]`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        for w in nodes.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidParameter(
                    "subgraph node list must be strictly increasing".into(),
                ));
            }
        }
        for &n in nodes {
            self.check_node(n)?;
        }
        let mut new_id = vec![usize::MAX; self.node_count];
        for (k, &n) in nodes.iter().enumerate() {
            new_id[n] = k;
        }
        let pairs = self
            .edges
            .iter()
            .filter(|&&(t, h)| new_id[t] != usize::MAX && new_id[h] != usize::MAX)
            .map(|&(t, h)| (new_id[t], new_id[h]));
        Graph::from_edges(nodes.len(), pairs)
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

/// Real value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal(Vec<f64>);

impl GraphSignal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(GraphSignal(values))
    }

    pub fn zeros(len: usize) -> Self {
        GraphSignal(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        GraphSignal(values)
    }
}

impl Index<usize> for GraphSignal {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Real value per edge, indexed by edge index.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSignal(Vec<f64>);

impl EdgeSignal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(EdgeSignal(values))
    }

    pub fn zeros(len: usize) -> Self {
        EdgeSignal(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Index<usize> for EdgeSignal {
    type Output = f64;
    fn index(&self, e: usize) -> &f64 {
        &self.0[e]
    }
}

/// Disjoint nonempty clusters covering nodes `0..node_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    cluster_of: Vec<usize>,
    clusters: Vec<Vec<usize>>,
}

impl Partition {
    /// `labels[i]` is the cluster of node `i`; labels must cover `0..k`
    /// without gaps.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut clusters = vec![Vec::new(); k];
        for (node, &c) in labels.iter().enumerate() {
            clusters[c].push(node);
        }
        if let Some(c) = clusters.iter().position(Vec::is_empty) {
            return Err(Error::InvalidPartition(format!("cluster {c} is empty")));
        }
        Ok(Partition {
            cluster_of: labels,
            clusters,
        })
    }

    /// Contiguous blocks: the first `sizes[0]` nodes form cluster 0, and so on.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::InvalidPartition(
                "cluster sizes must be positive".into(),
            ));
        }
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
            .collect();
        Partition::from_labels(labels)
    }

    pub fn node_count(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.cluster_of[node]
    }

    pub fn labels(&self) -> &[usize] {
        &self.cluster_of
    }

    /// Sorted members of `cluster`.
    pub fn members(&self, cluster: usize) -> &[usize] {
        &self.clusters[cluster]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }

    pub fn check_cluster(&self, cluster: usize) -> Result<()> {
        if cluster < self.clusters.len() {
            Ok(())
        } else {
            Err(Error::UnknownCluster {
                cluster,
                clusters: self.clusters.len(),
            })
        }
    }

    /// Counts how many of `nodes` fall in each cluster.
    pub fn count_per_cluster<'a, I>(&self, nodes: I) -> Vec<usize>
    where
        I: IntoIterator<Item = &'a usize>,
    {
        let mut counts = vec![0; self.clusters.len()];
        for &n in nodes {
            counts[self.cluster_of[n]] += 1;
        }
        counts
    }
}

/// Piecewise-constant signal `x[i] = coefficients[cluster_of(i)]`.
pub fn clustered_signal(part: &Partition, coefficients: &[f64]) -> Result<GraphSignal> {
    check_len(part.cluster_count(), coefficients.len())?;
    check_finite(coefficients)?;
    Ok(GraphSignal(
        part.labels().iter().map(|&c| coefficients[c]).collect(),
    ))
}
