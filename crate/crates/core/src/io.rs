//! File formats and real-graph ingestion.
//!
//! * Edge lists: SNAP convention, two whitespace-separated nonnegative
//!   integer ids per line, `#` starts a comment line. External ids are mapped
//!   to dense ids in ascending order. A self-loop line `i i` adds no edge but
//!   does register node `i`; [`write_edge_list`] uses this to keep isolated
//!   nodes.
//! * Signals: CSV `node_id,value`.
//! * Sampling sets: CSV `node_id`.
//! * Partitions: CSV `node_id,cluster`.
//!
//! All CSV files carry a header row and use external ids. Floats are written
//! in Rust's shortest round-trip form, so values re-read bit-exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use tempfile::NamedTempFile;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSignal, Partition};
use crate::sampling::{random_walk, SamplingSet};

/// Sorted external ids; dense id `k` is `ids[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeIds(Vec<u64>);

impl NodeIds {
    /// External id equals dense id.
    pub fn identity(node_count: usize) -> Self {
        NodeIds((0..node_count as u64).collect())
    }

    pub fn new(mut ids: Vec<u64>) -> Result<Self> {
        let n = ids.len();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != n {
            return Err(Error::InvalidParameter(
                "external ids must be distinct".into(),
            ));
        }
        Ok(NodeIds(ids))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dense(&self, external: u64) -> Option<usize> {
        self.0.binary_search(&external).ok()
    }

    pub fn external(&self, dense: usize) -> u64 {
        self.0[dense]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// Ids of the nodes kept by a subgraph, in the subgraph's dense order.
    pub fn restrict(&self, kept: &[usize]) -> NodeIds {
        NodeIds(kept.iter().map(|&k| self.0[k]).collect())
    }
}

#[derive(Debug, Clone)]
pub struct EdgeList {
    pub graph: Graph,
    pub ids: NodeIds,
    pub self_loops_dropped: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Drop nodes that end up with no (non-loop) edge.
    pub drop_isolated: bool,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads an undirected edge list; `a b` and `b a` denote the same edge.
pub fn parse_edge_list<R: BufRead>(reader: R, opts: ParseOptions) -> Result<EdgeList> {
    let mut pairs = Vec::new();
    let mut nodes = BTreeSet::new();
    let mut self_loops = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(
                lineno,
                format!("expected two node ids, got {trimmed:?}"),
            ));
        };
        let a: u64 = a
            .parse()
            .map_err(|_| parse_err(lineno, format!("invalid node id {a:?}")))?;
        let b: u64 = b
            .parse()
            .map_err(|_| parse_err(lineno, format!("invalid node id {b:?}")))?;
        nodes.insert(a);
        nodes.insert(b);
        if a == b {
            self_loops += 1;
        } else {
            pairs.push((a, b));
        }
    }
    if nodes.is_empty() {
        return Err(parse_err(0, "edge list contains no nodes"));
    }
    if opts.drop_isolated {
        nodes = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        if nodes.is_empty() {
            return Err(parse_err(0, "edge list contains no edges"));
        }
    }
    let ids = NodeIds(nodes.into_iter().collect());
    let dense_pairs = pairs
        .iter()
        .map(|&(a, b)| (ids.dense(a).unwrap(), ids.dense(b).unwrap()));
    let graph = Graph::from_edges(ids.len(), dense_pairs)?;
    Ok(EdgeList {
        graph,
        ids,
        self_loops_dropped: self_loops,
    })
}

/// Writes `g` with external ids; isolated nodes are emitted as `i i`.
pub fn write_edge_list<W: Write>(g: &Graph, ids: &NodeIds, mut w: W) -> Result<()> {
    check_ids(g.node_count(), ids)?;
    writeln!(
        w,
        "# undirected graph, nodes: {} edges: {}",
        g.node_count(),
        g.edge_count()
    )?;
    for &(t, h) in g.edges() {
        writeln!(w, "{}\t{}", ids.external(t), ids.external(h))?;
    }
    for node in 0..g.node_count() {
        if g.neighbors(node).is_empty() {
            let id = ids.external(node);
            writeln!(w, "{id}\t{id}")?;
        }
    }
    w.flush()?;
    Ok(())
}

fn check_ids(node_count: usize, ids: &NodeIds) -> Result<()> {
    if ids.len() != node_count {
        return Err(Error::LengthMismatch {
            expected: node_count,
            actual: ids.len(),
        });
    }
    Ok(())
}

/// Data rows of a CSV with the exact header `header`, as `(line, fields)`.
fn csv_rows<R: BufRead>(reader: R, header: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut lines = reader.lines().enumerate();
    let first = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line?;
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    continue;
                }
                break (i + 1, t.to_string());
            }
            None => return Err(parse_err(0, "missing CSV header")),
        }
    };
    let got: Vec<&str> = first.1.split(',').map(str::trim).collect();
    if got != header {
        return Err(parse_err(
            first.0,
            format!("expected header {:?}, got {:?}", header.join(","), first.1),
        ));
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = t.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != header.len() {
            return Err(parse_err(
                i + 1,
                format!("expected {} fields, got {}", header.len(), fields.len()),
            ));
        }
        rows.push((i + 1, fields));
    }
    Ok(rows)
}

fn parse_node(line: usize, field: &str, ids: &NodeIds) -> Result<usize> {
    let ext: u64 = field
        .parse()
        .map_err(|_| parse_err(line, format!("invalid node id {field:?}")))?;
    ids.dense(ext)
        .ok_or_else(|| parse_err(line, format!("node {ext} is not in the graph")))
}

/// Reads a signal; every graph node must appear exactly once.
pub fn read_signal<R: BufRead>(reader: R, ids: &NodeIds) -> Result<GraphSignal> {
    let mut values = vec![None; ids.len()];
    for (line, f) in csv_rows(reader, &["node_id", "value"])? {
        let node = parse_node(line, &f[0], ids)?;
        let v: f64 = f[1]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid value {:?}", f[1])))?;
        if !v.is_finite() {
            return Err(parse_err(line, "value is not finite"));
        }
        if values[node].replace(v).is_some() {
            return Err(parse_err(line, format!("node {} listed twice", f[0])));
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            v.ok_or_else(|| {
                parse_err(
                    0,
                    format!("signal has no value for node {}", ids.external(k)),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    GraphSignal::new(values)
}

pub fn write_signal<W: Write>(x: &GraphSignal, ids: &NodeIds, mut w: W) -> Result<()> {
    check_ids(x.len(), ids)?;
    writeln!(w, "node_id,value")?;
    for (k, v) in x.as_slice().iter().enumerate() {
        writeln!(w, "{},{v}", ids.external(k))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sampling<R: BufRead>(reader: R, g: &Graph, ids: &NodeIds) -> Result<SamplingSet> {
    check_ids(g.node_count(), ids)?;
    let mut nodes = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, f) in csv_rows(reader, &["node_id"])? {
        let node = parse_node(line, &f[0], ids)?;
        if !seen.insert(node) {
            return Err(parse_err(line, format!("node {} listed twice", f[0])));
        }
        nodes.push(node);
    }
    SamplingSet::from_nodes(g, nodes)
}

pub fn write_sampling<W: Write>(m: &SamplingSet, ids: &NodeIds, mut w: W) -> Result<()> {
    writeln!(w, "node_id")?;
    for &n in m.nodes() {
        writeln!(w, "{}", ids.external(n))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a partition; cluster labels are arbitrary nonnegative integers,
/// renumbered `0..k` in ascending label order.
pub fn read_partition<R: BufRead>(reader: R, ids: &NodeIds) -> Result<Partition> {
    let mut labels: Vec<Option<u64>> = vec![None; ids.len()];
    for (line, f) in csv_rows(reader, &["node_id", "cluster"])? {
        let node = parse_node(line, &f[0], ids)?;
        let c: u64 = f[1]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid cluster id {:?}", f[1])))?;
        if labels[node].replace(c).is_some() {
            return Err(parse_err(line, format!("node {} listed twice", f[0])));
        }
    }
    let raw = labels
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            c.ok_or_else(|| {
                parse_err(
                    0,
                    format!("partition has no cluster for node {}", ids.external(k)),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let renumber: BTreeMap<u64, usize> = raw
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    Partition::from_labels(raw.iter().map(|c| renumber[c]).collect())
}

pub fn write_partition<W: Write>(part: &Partition, ids: &NodeIds, mut w: W) -> Result<()> {
    check_ids(part.node_count(), ids)?;
    writeln!(w, "node_id,cluster")?;
    for (k, c) in part.labels().iter().enumerate() {
        writeln!(w, "{},{c}", ids.external(k))?;
    }
    w.flush()?;
    Ok(())
}

/// Subgraph induced by one random walk of `walk_length` nodes (uniform seed)
/// together with all neighbors of the walk's nodes. Returns the subgraph and,
/// for each of its nodes, the corresponding node of `g`.
pub fn extract_subgraph<R: Rng + ?Sized>(
    g: &Graph,
    walk_length: usize,
    rng: &mut R,
) -> Result<(Graph, Vec<usize>)> {
    if g.node_count() == 0 {
        return Err(Error::InvalidParameter(
            "cannot extract from an empty graph".into(),
        ));
    }
    let seed = rng.gen_range(0..g.node_count());
    let path = random_walk(g, seed, walk_length, rng)?;
    let mut keep = vec![false; g.node_count()];
    for &v in &path {
        keep[v] = true;
        for &u in g.neighbors(v) {
            keep[u] = true;
        }
    }
    let kept: Vec<usize> = (0..g.node_count()).filter(|&v| keep[v]).collect();
    let sub = g.induced_subgraph(&kept)?;
    Ok((sub, kept))
}

/// Output file written to a temporary sibling first and renamed into place by
/// [`commit`].
pub struct Staged {
    file: NamedTempFile,
    target: PathBuf,
}

/// Writes `target`'s content into a temporary file in the same directory.
pub fn stage<F>(target: &Path, write: F) -> Result<Staged>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match target.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let mut file = NamedTempFile::new_in(&dir)?;
    {
        let mut w = BufWriter::new(file.as_file_mut());
        write(&mut w)?;
        w.flush()?;
    }
    Ok(Staged {
        file,
        target: target.to_path_buf(),
    })
}

/// Renames every staged file into place. Nothing is renamed unless all
/// writes succeeded, since staging happens before this call.
pub fn commit(staged: Vec<Staged>) -> Result<()> {
    for s in staged {
        s.file.persist(&s.target).map_err(|e| Error::Io(e.error))?;
    }
    Ok(())
}
