//! Directed graph with per-edge and per-node feature vectors.
//!
//! Edges are directed `(head, tail)` pairs: influence flows from `head` to
//! `tail`. Adjacency is stored in CSR form so cascade inner loops touch
//! contiguous memory. A graph is immutable once built and safe to share
//! read-only across threads.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use nalgebra::DVector;

use crate::error::{LtnError, Result};

pub type NodeId = u32;
pub type EdgeId = u32;

#[derive(Debug, Clone)]
pub struct DirectedGraph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    // CSR adjacency: for node v, in_edge_ids[in_start[v]..in_start[v+1]]
    // are the ids of edges pointing at v, in increasing edge-id order.
    in_start: Vec<u32>,
    in_edge_ids: Vec<EdgeId>,
    out_start: Vec<u32>,
    out_edge_ids: Vec<EdgeId>,
    // Features; empty until attached.
    edge_features: Vec<DVector<f64>>,
    autonomy_pos: Vec<DVector<f64>>,
    autonomy_neg: Vec<DVector<f64>>,
}

impl DirectedGraph {
    /// Builds a graph from an explicit edge list. Rejects self-loops,
    /// duplicate directed edges, and out-of-range endpoints.
    pub fn new(node_count: usize, edges: Vec<(NodeId, NodeId)>) -> Result<Self> {
        for &(u, v) in &edges {
            if u == v {
                return Err(LtnError::GraphInvariant(format!("self-loop at node {u}")));
            }
            for id in [u, v] {
                if id as usize >= node_count {
                    return Err(LtnError::InvalidNode {
                        node: id,
                        node_count,
                    });
                }
            }
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for &(u, v) in &edges {
            if !seen.insert((u, v)) {
                return Err(LtnError::GraphInvariant(format!(
                    "duplicate directed edge ({u}, {v})"
                )));
            }
        }

        let mut in_deg = vec![0u32; node_count];
        let mut out_deg = vec![0u32; node_count];
        for &(u, v) in &edges {
            out_deg[u as usize] += 1;
            in_deg[v as usize] += 1;
        }
        let prefix = |deg: &[u32]| {
            let mut start = Vec::with_capacity(deg.len() + 1);
            let mut acc = 0u32;
            start.push(0);
            for &d in deg {
                acc += d;
                start.push(acc);
            }
            start
        };
        let in_start = prefix(&in_deg);
        let out_start = prefix(&out_deg);
        let mut in_fill = in_start.clone();
        let mut out_fill = out_start.clone();
        let mut in_edge_ids = vec![0; edges.len()];
        let mut out_edge_ids = vec![0; edges.len()];
        for (eid, &(u, v)) in edges.iter().enumerate() {
            out_edge_ids[out_fill[u as usize] as usize] = eid as EdgeId;
            out_fill[u as usize] += 1;
            in_edge_ids[in_fill[v as usize] as usize] = eid as EdgeId;
            in_fill[v as usize] += 1;
        }

        Ok(Self {
            node_count,
            edges,
            in_start,
            in_edge_ids,
            out_start,
            out_edge_ids,
            edge_features: Vec::new(),
            autonomy_pos: Vec::new(),
            autonomy_neg: Vec::new(),
        })
    }

    /// Parses a whitespace-separated "head tail" edge list. Duplicate lines
    /// are collapsed to a single edge (first occurrence keeps its position in
    /// the edge order); node count is one past the largest id seen.
    pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let file = File::open(path).map_err(|source| LtnError::Io {
            path: display.clone(),
            source,
        })?;
        let reader = BufReader::new(file);

        let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut max_id: Option<NodeId> = None;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|source| LtnError::Io {
                path: display.clone(),
                source,
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let parse = |tok: Option<&str>, lineno: usize| -> Result<NodeId> {
                let tok = tok.ok_or_else(|| LtnError::Parse {
                    path: display.clone(),
                    line: lineno,
                    message: "expected \"head tail\" pair".into(),
                })?;
                tok.parse::<NodeId>().map_err(|e| LtnError::Parse {
                    path: display.clone(),
                    line: lineno,
                    message: format!("bad node id {tok:?}: {e}"),
                })
            };
            let head = parse(parts.next(), lineno)?;
            let tail = parse(parts.next(), lineno)?;
            if parts.next().is_some() {
                return Err(LtnError::Parse {
                    path: display.clone(),
                    line: lineno,
                    message: "trailing tokens after \"head tail\" pair".into(),
                });
            }
            if head == tail {
                return Err(LtnError::Parse {
                    path: display,
                    line: lineno,
                    message: format!("self-loop at node {head}"),
                });
            }
            max_id = Some(max_id.map_or(head.max(tail), |m| m.max(head).max(tail)));
            if seen.insert((head, tail)) {
                edges.push((head, tail));
            }
        }
        let node_count = max_id.map_or(0, |m| m as usize + 1);
        Self::new(node_count, edges)
    }

    /// Attaches feature vectors. All edge features must share one dimension
    /// `d`, all autonomy features one dimension `d'`.
    pub fn attach_features(
        &mut self,
        edge_features: Vec<DVector<f64>>,
        autonomy_pos: Vec<DVector<f64>>,
        autonomy_neg: Vec<DVector<f64>>,
    ) -> Result<()> {
        if edge_features.len() != self.edges.len() {
            return Err(LtnError::DimensionMismatch {
                expected: self.edges.len(),
                actual: edge_features.len(),
                context: "edge feature rows".into(),
            });
        }
        if autonomy_pos.len() != self.node_count || autonomy_neg.len() != self.node_count {
            return Err(LtnError::DimensionMismatch {
                expected: self.node_count,
                actual: autonomy_pos.len().min(autonomy_neg.len()),
                context: "autonomy feature rows".into(),
            });
        }
        if let Some(first) = edge_features.first() {
            let d = first.len();
            if let Some(bad) = edge_features.iter().find(|x| x.len() != d) {
                return Err(LtnError::DimensionMismatch {
                    expected: d,
                    actual: bad.len(),
                    context: "edge feature dimension".into(),
                });
            }
        }
        if let Some(first) = autonomy_pos.first() {
            let dp = first.len();
            for x in autonomy_pos.iter().chain(autonomy_neg.iter()) {
                if x.len() != dp {
                    return Err(LtnError::DimensionMismatch {
                        expected: dp,
                        actual: x.len(),
                        context: "autonomy feature dimension".into(),
                    });
                }
            }
        }
        self.edge_features = edge_features;
        self.autonomy_pos = autonomy_pos;
        self.autonomy_neg = autonomy_neg;
        Ok(())
    }

    /// Reads one whitespace-separated real vector per line, aligned to edge
    /// (or node) order.
    pub fn load_feature_file(path: impl AsRef<Path>) -> Result<Vec<DVector<f64>>> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let file = File::open(path).map_err(|source| LtnError::Io {
            path: display.clone(),
            source,
        })?;
        let mut rows = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| LtnError::Io {
                path: display.clone(),
                source,
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut vals = Vec::new();
            for tok in trimmed.split_whitespace() {
                let v: f64 = tok.parse().map_err(|e| LtnError::Parse {
                    path: display.clone(),
                    line: idx + 1,
                    message: format!("bad real {tok:?}: {e}"),
                })?;
                vals.push(v);
            }
            rows.push(DVector::from_vec(vals));
        }
        Ok(rows)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, eid: EdgeId) -> (NodeId, NodeId) {
        self.edges[eid as usize]
    }

    pub fn in_edge_ids(&self, v: NodeId) -> &[EdgeId] {
        let lo = self.in_start[v as usize] as usize;
        let hi = self.in_start[v as usize + 1] as usize;
        &self.in_edge_ids[lo..hi]
    }

    pub fn out_edge_ids(&self, v: NodeId) -> &[EdgeId] {
        let lo = self.out_start[v as usize] as usize;
        let hi = self.out_start[v as usize + 1] as usize;
        &self.out_edge_ids[lo..hi]
    }

    pub fn in_neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.in_edge_ids(v).iter().map(move |&e| self.edges[e as usize].0)
    }

    pub fn out_neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.out_edge_ids(v).iter().map(move |&e| self.edges[e as usize].1)
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_edge_ids(v).len()
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_edge_ids(v).len()
    }

    pub fn has_features(&self) -> bool {
        !self.edge_features.is_empty() || self.edges.is_empty()
    }

    /// Edge feature dimension `d`; zero when features are absent.
    pub fn feature_dim(&self) -> usize {
        self.edge_features.first().map_or(0, |x| x.len())
    }

    /// Autonomy feature dimension `d'`; zero when features are absent.
    pub fn autonomy_dim(&self) -> usize {
        self.autonomy_pos.first().map_or(0, |x| x.len())
    }

    pub fn edge_feature(&self, eid: EdgeId) -> &DVector<f64> {
        &self.edge_features[eid as usize]
    }

    pub fn edge_features(&self) -> &[DVector<f64>] {
        &self.edge_features
    }

    pub fn autonomy_pos(&self, v: NodeId) -> &DVector<f64> {
        &self.autonomy_pos[v as usize]
    }

    pub fn autonomy_neg(&self, v: NodeId) -> &DVector<f64> {
        &self.autonomy_neg[v as usize]
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if (v as usize) < self.node_count {
            Ok(())
        } else {
            Err(LtnError::InvalidNode {
                node: v,
                node_count: self.node_count,
            })
        }
    }

    pub fn check_edge(&self, e: EdgeId) -> Result<()> {
        if (e as usize) < self.edges.len() {
            Ok(())
        } else {
            Err(LtnError::InvalidEdge {
                edge: e,
                edge_count: self.edges.len(),
            })
        }
    }

    pub fn check_seed_set(&self, seeds: &[NodeId]) -> Result<()> {
        for &s in seeds {
            self.check_node(s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_simple_edge_list() {
        let f = write_temp("0 1\n1 2\n");
        let g = DirectedGraph::load_edge_list(f.path()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.in_neighbors(2).collect::<Vec<_>>(), vec![1]);
        assert_eq!(g.out_neighbors(0).collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn duplicate_lines_collapse() {
        let f = write_temp("0 1\n0 1\n");
        let g = DirectedGraph::load_edge_list(f.path()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn empty_file_is_empty_graph() {
        let f = write_temp("");
        let g = DirectedGraph::load_edge_list(f.path()).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn parse_error_carries_line_number() {
        let f = write_temp("0 1\nnot a pair\n");
        let err = DirectedGraph::load_edge_list(f.path()).unwrap_err();
        match err {
            LtnError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(DirectedGraph::new(2, vec![(0, 0)]).is_err());
        assert!(DirectedGraph::new(2, vec![(0, 1), (0, 1)]).is_err());
        assert!(DirectedGraph::new(1, vec![(0, 1)]).is_err());
    }

    #[test]
    fn adjacency_is_consistent_with_edge_list() {
        let g = DirectedGraph::new(4, vec![(0, 2), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert_eq!(g.in_neighbors(2).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(g.in_neighbors(3).collect::<Vec<_>>(), vec![2, 0]);
        assert_eq!(g.out_degree(0), 2);
        assert_eq!(g.in_degree(0), 0);
        // every edge appears exactly once in each direction's CSR
        let total_in: usize = (0..4).map(|v| g.in_degree(v)).sum();
        let total_out: usize = (0..4).map(|v| g.out_degree(v)).sum();
        assert_eq!(total_in, 4);
        assert_eq!(total_out, 4);
    }
}
