//! Occupation graphs `G_n`: vertices are the n-particle configurations of the
//! input graph, edges are single hops of one particle along an input edge.

use std::collections::HashMap;

use super::{Graph, GraphError};

pub const DEFAULT_VERTEX_BUDGET: usize = 100_000;

/// Closed-form size of `G_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupationCounts {
    pub vertices: u128,
    pub edges: u128,
    pub density: f64,
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `|V_n| = C(N, n)`, `|E_n| = M C(N-2, n-1)` and the density
/// `2|E_n| / (|V_n|(|V_n|-1))`, without building the graph.
///
/// A hop along edge `(i, j)` needs one endpoint occupied, the other empty and
/// the remaining `n - 1` particles on the other `N - 2` nodes.
pub fn occupation_counts(graph: &Graph, n: usize) -> Result<OccupationCounts, GraphError> {
    let big_n = graph.num_nodes();
    if n == 0 || n >= big_n {
        return Err(GraphError::InvalidArgument(format!(
            "occupation must satisfy 0 < n < N, got n={n}, N={big_n}"
        )));
    }
    let vertices = binomial(big_n as u64, n as u64);
    let edges = graph.num_edges() as u128 * binomial(big_n as u64 - 2, n as u64 - 1);
    let density = if vertices < 2 {
        0.0
    } else {
        2.0 * edges as f64 / (vertices as f64 * (vertices as f64 - 1.0))
    };
    Ok(OccupationCounts {
        vertices,
        edges,
        density,
    })
}

/// [`occupation_graph_with_budget`] with the default 100k-vertex budget.
pub fn occupation_graph(graph: &Graph, n: usize) -> Result<Graph, GraphError> {
    occupation_graph_with_budget(graph, n, DEFAULT_VERTEX_BUDGET)
}

/// Builds `G_n`. Vertex `v` is the `v`-th bitmask with `n` set bits in
/// increasing integer order (bit `i` is node `i`).
pub fn occupation_graph_with_budget(
    graph: &Graph,
    n: usize,
    budget: usize,
) -> Result<Graph, GraphError> {
    let big_n = graph.num_nodes();
    let counts = occupation_counts(graph, n)?;
    if big_n > 63 || counts.vertices > budget as u128 {
        return Err(GraphError::BudgetExceeded {
            n_nodes: big_n,
            n,
            vertices: counts.vertices,
            budget,
        });
    }
    let configs = configurations(big_n, n);
    let index: HashMap<u64, usize> = configs.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut edges = Vec::new();
    for (v, &c) in configs.iter().enumerate() {
        for &(i, j) in graph.edges() {
            let (bi, bj) = (1u64 << i, 1u64 << j);
            // count each hop once: from the side where i is occupied
            if c & bi != 0 && c & bj == 0 {
                let target = c ^ bi ^ bj;
                edges.push((v, index[&target]));
            }
        }
    }
    Graph::new(configs.len(), &edges)
}

/// All `n`-bit-set masks over `big_n` bits, ascending (Gosper's hack).
pub(crate) fn configurations(big_n: usize, n: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(0);
        return out;
    }
    if n > big_n {
        return out;
    }
    let limit = 1u64 << big_n;
    let mut c: u64 = (1u64 << n) - 1;
    while c < limit {
        out.push(c);
        let u = c & c.wrapping_neg();
        let v = c + u;
        c = v + (((v ^ c) / u) >> 2);
    }
    out
}
