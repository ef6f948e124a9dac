//! Graphs and datasets.

mod occupation;
mod random;
mod tu;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use occupation::{
    occupation_counts, occupation_graph, occupation_graph_with_budget, OccupationCounts,
    DEFAULT_VERTEX_BUDGET,
};
pub use random::{erdos_renyi, random_geometric};
pub use tu::{parse_tu_dataset, preprocess};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) references a node outside 0..{2}")]
    NodeOutOfRange(usize, usize, usize),
    #[error("{what} has length {got}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("missing dataset file {0}")]
    MissingFile(String),
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("io error on {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("preprocessing left no graphs")]
    EmptyDataset,
    #[error("occupation graph needs C({n_nodes},{n}) = {vertices} vertices, budget is {budget}")]
    BudgetExceeded {
        n_nodes: usize,
        n: usize,
        vertices: u128,
        budget: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Undirected simple graph with optional node fields, edge weights, planar
/// positions and a class label.
///
/// Edges are stored as `(i, j)` with `i < j`, sorted. `edge_weights`, when
/// present, is aligned with `edges`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub id: usize,
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    node_fields: Option<Vec<f64>>,
    edge_weights: Option<Vec<f64>>,
    positions: Option<Vec<[f64; 2]>>,
    pub class_label: Option<usize>,
}

impl Graph {
    /// Builds a graph from an edge list. Edge orientation is normalised; self
    /// loops, duplicates and out-of-range endpoints are rejected.
    pub fn new(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut normalised = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if a >= num_nodes || b >= num_nodes {
                return Err(GraphError::NodeOutOfRange(a, b, num_nodes));
            }
            normalised.push((a.min(b), a.max(b)));
        }
        normalised.sort_unstable();
        if let Some(w) = normalised.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self {
            id: 0,
            num_nodes,
            edges: normalised,
            node_fields: None,
            edge_weights: None,
            positions: None,
            class_label: None,
        })
    }

    /// Like [`Graph::new`] but silently drops duplicate edges (both
    /// orientations of the same pair count as one).
    pub fn from_edges_dedup(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut normalised: Vec<(usize, usize)> =
            edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        normalised.sort_unstable();
        normalised.dedup();
        Self::new(num_nodes, &normalised)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::new(n, &edges).expect("complete graph is valid")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path graph is valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 nodes");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges).expect("cycle graph is valid")
    }

    pub fn star(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::new(n, &edges).expect("star graph is valid")
    }

    pub fn edgeless(n: usize) -> Self {
        Self::new(n, &[]).expect("edgeless graph is valid")
    }

    pub fn with_id(mut self, id: usize) -> Self {
        self.id = id;
        self
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.class_label = Some(label);
        self
    }

    pub fn with_node_fields(mut self, fields: Vec<f64>) -> Result<Self, GraphError> {
        if fields.len() != self.num_nodes {
            return Err(GraphError::LengthMismatch {
                what: "node fields",
                got: fields.len(),
                expected: self.num_nodes,
            });
        }
        self.node_fields = Some(fields);
        Ok(self)
    }

    /// Attaches weights aligned with [`Graph::edges`].
    pub fn with_edge_weights(mut self, weights: Vec<f64>) -> Result<Self, GraphError> {
        if weights.len() != self.edges.len() {
            return Err(GraphError::LengthMismatch {
                what: "edge weights",
                got: weights.len(),
                expected: self.edges.len(),
            });
        }
        self.edge_weights = Some(weights);
        Ok(self)
    }

    pub fn with_positions(mut self, positions: Vec<[f64; 2]>) -> Result<Self, GraphError> {
        if positions.len() != self.num_nodes {
            return Err(GraphError::LengthMismatch {
                what: "positions",
                got: positions.len(),
                expected: self.num_nodes,
            });
        }
        self.positions = Some(positions);
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_fields(&self) -> Option<&[f64]> {
        self.node_fields.as_deref()
    }

    pub fn edge_weights(&self) -> Option<&[f64]> {
        self.edge_weights.as_deref()
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    /// Field on node `i` (0 when absent).
    pub fn field(&self, i: usize) -> f64 {
        self.node_fields.as_ref().map_or(0.0, |h| h[i])
    }

    /// Weight of the `e`-th edge (1 when absent).
    pub fn weight(&self, e: usize) -> f64 {
        self.edge_weights.as_ref().map_or(1.0, |w| w[e])
    }

    /// Edges together with their weights.
    pub fn weighted_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .map(|(e, &(i, j))| (i, j, self.weight(e)))
    }

    /// True when the graph carries non-trivial fields or weights.
    pub fn is_weighted(&self) -> bool {
        let fields = self
            .node_fields
            .as_ref()
            .is_some_and(|h| h.iter().any(|&x| x != 0.0));
        let weights = self
            .edge_weights
            .as_ref()
            .is_some_and(|w| w.iter().any(|&x| x != 1.0));
        fields || weights
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_nodes];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Adjacency lists; each entry is `(neighbour, edge index)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            adj[i].push((j, e));
            adj[j].push((i, e));
        }
        adj
    }

    /// Dense 0/1 adjacency matrix, row-major.
    pub fn adjacency_matrix(&self) -> Vec<f64> {
        let n = self.num_nodes;
        let mut a = vec![0.0; n * n];
        for &(i, j) in &self.edges {
            a[i * n + j] = 1.0;
            a[j * n + i] = 1.0;
        }
        a
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// Edge density `2M / (N (N - 1))`, 0 for fewer than two nodes.
    pub fn density(&self) -> f64 {
        let n = self.num_nodes as f64;
        if self.num_nodes < 2 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / (n * (n - 1.0))
        }
    }

    /// Copy of the graph with nodes renamed by `perm` (node `i` becomes `perm[i]`).
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self, GraphError> {
        if perm.len() != self.num_nodes {
            return Err(GraphError::LengthMismatch {
                what: "permutation",
                got: perm.len(),
                expected: self.num_nodes,
            });
        }
        let edges: Vec<_> = self.edges.iter().map(|&(i, j)| (perm[i], perm[j])).collect();
        let mut g = Self::new(self.num_nodes, &edges)?;
        g.id = self.id;
        g.class_label = self.class_label;
        if let Some(w) = &self.edge_weights {
            let mut weights = vec![0.0; w.len()];
            for (e, &(i, j)) in self.edges.iter().enumerate() {
                let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                let idx = g.edges.binary_search(&(a, b)).expect("edge preserved");
                weights[idx] = w[e];
            }
            g.edge_weights = Some(weights);
        }
        if let Some(h) = &self.node_fields {
            let mut fields = vec![0.0; h.len()];
            for (i, &x) in h.iter().enumerate() {
                fields[perm[i]] = x;
            }
            g.node_fields = Some(fields);
        }
        if let Some(p) = &self.positions {
            let mut pos = vec![[0.0; 2]; p.len()];
            for (i, &x) in p.iter().enumerate() {
                pos[perm[i]] = x;
            }
            g.positions = Some(pos);
        }
        Ok(g)
    }
}

/// Number of vertices of each degree: `counts[k]` vertices have degree `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    pub counts: Vec<usize>,
}

impl DegreeHistogram {
    pub fn num_nodes(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `sum_k k * m(k)`, twice the number of edges.
    pub fn degree_sum(&self) -> usize {
        self.counts.iter().enumerate().map(|(k, &m)| k * m).sum()
    }

    /// Largest degree with a non-zero count.
    pub fn max_degree(&self) -> usize {
        self.counts.iter().rposition(|&m| m > 0).unwrap_or(0)
    }
}

/// Degree histogram with one entry per possible degree `0..N`.
pub fn degree_histogram(graph: &Graph) -> DegreeHistogram {
    let mut counts = vec![0; graph.num_nodes().max(1)];
    for d in graph.degrees() {
        counts[d] += 1;
    }
    if graph.num_nodes() == 0 {
        counts.clear();
    }
    DegreeHistogram { counts }
}

/// Labelled graph collection.
///
/// Class labels on the graphs are contiguous indices into `class_names`,
/// which keeps the original labels from the source files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    pub class_names: Vec<i64>,
    pub class_counts: BTreeMap<usize, usize>,
}

impl Dataset {
    /// Builds a dataset from graphs carrying original labels in `raw_labels`
    /// (same order), re-encoding them to `0..n_c` in ascending original order.
    pub fn from_raw_labels(
        name: impl Into<String>,
        mut graphs: Vec<Graph>,
        raw_labels: &[i64],
    ) -> Result<Self, GraphError> {
        if graphs.len() != raw_labels.len() {
            return Err(GraphError::LengthMismatch {
                what: "graph labels",
                got: raw_labels.len(),
                expected: graphs.len(),
            });
        }
        let mut class_names: Vec<i64> = raw_labels.to_vec();
        class_names.sort_unstable();
        class_names.dedup();
        let mut class_counts = BTreeMap::new();
        for (g, raw) in graphs.iter_mut().zip(raw_labels) {
            let label = class_names.binary_search(raw).expect("label present");
            g.class_label = Some(label);
            *class_counts.entry(label).or_insert(0) += 1;
        }
        Ok(Self {
            name: name.into(),
            graphs,
            class_names,
            class_counts,
        })
    }

    /// Dataset from graphs whose `class_label` is already a contiguous index.
    pub fn from_labeled(name: impl Into<String>, graphs: Vec<Graph>) -> Result<Self, GraphError> {
        let raw: Vec<i64> = graphs
            .iter()
            .map(|g| {
                g.class_label.map(|l| l as i64).ok_or_else(|| {
                    GraphError::InvalidArgument(format!("graph {} has no class label", g.id))
                })
            })
            .collect::<Result<_, _>>()?;
        Self::from_raw_labels(name, graphs, &raw)
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Encoded labels in graph order.
    pub fn labels(&self) -> Vec<usize> {
        self.graphs
            .iter()
            .map(|g| g.class_label.expect("dataset graphs are labeled"))
            .collect()
    }

    /// Original label of graph `i`.
    pub fn original_label(&self, i: usize) -> i64 {
        self.class_names[self.graphs[i].class_label.expect("dataset graphs are labeled")]
    }

    /// Fraction of the largest class.
    pub fn majority_fraction(&self) -> f64 {
        let max = self.class_counts.values().copied().max().unwrap_or(0);
        max as f64 / self.len().max(1) as f64
    }
}
