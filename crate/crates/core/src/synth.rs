//! Assortative planted partition model (APPM) and clustered test signals.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{clustered_signal, Graph, GraphSignal, Partition};

/// Stochastic block model with one intra-cluster edge probability `p_intra`
/// and one inter-cluster probability `q_inter`.
#[derive(Debug, Clone, PartialEq)]
pub struct AppmSpec {
    cluster_sizes: Vec<usize>,
    p_intra: f64,
    q_inter: f64,
}

impl AppmSpec {
    pub fn new(cluster_sizes: Vec<usize>, p_intra: f64, q_inter: f64) -> Result<Self> {
        if cluster_sizes.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one cluster is required".into(),
            ));
        }
        if cluster_sizes.contains(&0) {
            return Err(Error::InvalidParameter(
                "cluster sizes must be positive".into(),
            ));
        }
        for (name, v) in [("p", p_intra), ("q", q_inter)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(AppmSpec {
            cluster_sizes,
            p_intra,
            q_inter,
        })
    }

    /// Four clusters of sizes 10/20/30/40 with p = 3/10 and q = 5/100.
    pub fn reference() -> Self {
        AppmSpec::new(vec![10, 20, 30, 40], 0.3, 0.05).expect("valid reference spec")
    }

    pub fn cluster_sizes(&self) -> &[usize] {
        &self.cluster_sizes
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_sizes.len()
    }

    pub fn p_intra(&self) -> f64 {
        self.p_intra
    }

    pub fn q_inter(&self) -> f64 {
        self.q_inter
    }

    pub fn node_count(&self) -> usize {
        self.cluster_sizes.iter().sum()
    }

    fn size_of(&self, cluster: usize) -> Result<usize> {
        self.cluster_sizes
            .get(cluster)
            .copied()
            .ok_or(Error::UnknownCluster {
                cluster,
                clusters: self.cluster_sizes.len(),
            })
    }

    /// `p (N_r - 1) + q (N - N_r)`
    pub fn expected_degree(&self, cluster: usize) -> Result<f64> {
        let nr = self.size_of(cluster)? as f64;
        let n = self.node_count() as f64;
        Ok(self.p_intra * (nr - 1.0) + self.q_inter * (n - nr))
    }

    /// `q N_r (N - N_r)`
    pub fn expected_cut_size(&self, cluster: usize) -> Result<f64> {
        let nr = self.size_of(cluster)? as f64;
        let n = self.node_count() as f64;
        Ok(self.q_inter * nr * (n - nr))
    }

    /// Expected number of edges: `p sum_r N_r(N_r-1)/2 + q (N^2 - sum_r N_r^2)/2`.
    pub fn expected_edge_count(&self) -> f64 {
        let n = self.node_count() as f64;
        let intra: f64 = self
            .cluster_sizes
            .iter()
            .map(|&s| (s * s.saturating_sub(1)) as f64 / 2.0)
            .sum();
        let sum_sq: f64 = self.cluster_sizes.iter().map(|&s| (s * s) as f64).sum();
        self.p_intra * intra + self.q_inter * (n * n - sum_sq) / 2.0
    }

    /// Contiguous-block partition matching the generated node ids.
    pub fn partition(&self) -> Partition {
        Partition::from_sizes(&self.cluster_sizes).expect("sizes validated")
    }
}

/// Draws one APPM graph. Every unordered node pair is an edge independently,
/// with probability `p` inside a cluster and `q` across clusters. Pairs are
/// visited in lexicographic order, so the draw is a pure function of the RNG
/// state.
pub fn generate_appm<R: Rng + ?Sized>(spec: &AppmSpec, rng: &mut R) -> (Graph, Partition) {
    let part = spec.partition();
    let n = spec.node_count();
    let mut edges = Vec::new();
    for i in 0..n {
        let ci = part.cluster_of(i);
        for j in (i + 1)..n {
            let prob = if part.cluster_of(j) == ci {
                spec.p_intra
            } else {
                spec.q_inter
            };
            if rng.gen_bool(prob) {
                edges.push((i, j));
            }
        }
    }
    let g = Graph::from_edges(n, edges).expect("generated pairs are valid");
    (g, part)
}

/// Redraws until the graph is connected, giving up after `max_attempts`.
pub fn generate_connected_appm<R: Rng + ?Sized>(
    spec: &AppmSpec,
    rng: &mut R,
    max_attempts: usize,
) -> Result<(Graph, Partition)> {
    for _ in 0..max_attempts {
        let (g, part) = generate_appm(spec, rng);
        if g.is_connected() {
            return Ok((g, part));
        }
    }
    Err(Error::ConnectivityUnreachable(max_attempts))
}

/// Clustered signal with one `U[0, 1)` coefficient per cluster.
pub fn random_clustered_signal<R: Rng + ?Sized>(part: &Partition, rng: &mut R) -> GraphSignal {
    let coefficients: Vec<f64> = (0..part.cluster_count())
        .map(|_| rng.gen::<f64>())
        .collect();
    clustered_signal(part, &coefficients).expect("one coefficient per cluster")
}
