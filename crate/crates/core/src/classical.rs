//! Baseline graph kernels: geometric random walks and graphlet subsampling.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::kernel::KernelMatrix;
use crate::parallel::*;

#[derive(Debug, Error)]
pub enum ClassicalError {
    #[error("random-walk weight {lambda} must lie in (0, {bound})")]
    InvalidLambda { lambda: f64, bound: f64 },
    #[error("graphlet size {0} outside 3..=6")]
    GraphletSize(usize),
    #[error("graphlet size {k} exceeds the {n} nodes of the graph")]
    TooFewNodes { k: usize, n: usize },
    #[error("conjugate gradient stalled after {0} iterations")]
    NoConvergence(usize),
}

/// Product graphs with fewer vertices than this are solved densely.
pub const DENSE_SOLVE_LIMIT: usize = 2000;

fn adjacency(g: &Graph) -> DMatrix<f64> {
    let n = g.num_nodes();
    DMatrix::from_row_slice(n, n, &g.adjacency_matrix())
}

/// Spectral radius of the adjacency matrix.
pub fn spectral_radius(g: &Graph) -> f64 {
    if g.num_edges() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(adjacency(g))
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()))
}

/// `eᵀ (I − λ A_×)⁻¹ e` over the direct-product graph.
pub fn random_walk_kernel(g: &Graph, h: &Graph, lambda: f64) -> Result<f64, ClassicalError> {
    random_walk_with_radii(g, h, lambda, spectral_radius(g), spectral_radius(h))
}

fn random_walk_with_radii(
    g: &Graph,
    h: &Graph,
    lambda: f64,
    rho_g: f64,
    rho_h: f64,
) -> Result<f64, ClassicalError> {
    let rho = rho_g * rho_h;
    let bound = if rho > 0.0 { 1.0 / rho } else { f64::INFINITY };
    if !(lambda > 0.0) || lambda >= bound {
        return Err(ClassicalError::InvalidLambda { lambda, bound });
    }
    let (n, m) = (g.num_nodes(), h.num_nodes());
    if n == 0 || m == 0 {
        return Ok(0.0);
    }
    let (a, b) = (adjacency(g), adjacency(h));
    let x = if n * m < DENSE_SOLVE_LIMIT {
        let k = a.kronecker(&b);
        let sys = DMatrix::<f64>::identity(n * m, n * m) - k * lambda;
        sys.lu()
            .solve(&DVector::from_element(n * m, 1.0))
            .expect("I - λA is nonsingular below the spectral bound")
    } else {
        conjugate_gradient(&a, &b, lambda)?
    };
    Ok(x.sum())
}

/// CG on `(I − λ A⊗B) x = e` using `(A⊗B) vec(X) = vec(A X B)` with `X` stored
/// row-major as `n × m`.
fn conjugate_gradient(a: &DMatrix<f64>, b: &DMatrix<f64>, lambda: f64) -> Result<DVector<f64>, ClassicalError> {
    let (n, m) = (a.nrows(), b.nrows());
    let apply = |v: &DVector<f64>| -> DVector<f64> {
        let x = DMatrix::from_row_slice(n, m, v.as_slice());
        let y = a * x * b;
        let mut out = v.clone();
        for i in 0..n {
            for j in 0..m {
                out[i * m + j] -= lambda * y[(i, j)];
            }
        }
        out
    };
    let rhs = DVector::from_element(n * m, 1.0);
    let mut x = DVector::zeros(n * m);
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    let target = 1e-26 * rr;
    let cap = 10 * n * m;
    for _ in 0..cap {
        if rr <= target {
            return Ok(x);
        }
        let ap = apply(&p);
        let alpha = rr / p.dot(&ap);
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rr_new = r.dot(&r);
        p = &r + &p * (rr_new / rr);
        rr = rr_new;
    }
    if rr <= target {
        Ok(x)
    } else {
        Err(ClassicalError::NoConvergence(cap))
    }
}

/// Random-walk Gram matrix; `λ` must respect every pair's bound.
pub fn random_walk_kernel_matrix(graphs: &[Graph], lambda: f64) -> Result<KernelMatrix, ClassicalError> {
    let radii: Vec<f64> = graphs.par_iter().map(spectral_radius).collect();
    let rho_max = radii.iter().fold(0.0f64, |m, &r| m.max(r));
    let bound = if rho_max > 0.0 { 1.0 / (rho_max * rho_max) } else { f64::INFINITY };
    if !(lambda > 0.0) || lambda >= bound {
        return Err(ClassicalError::InvalidLambda { lambda, bound });
    }
    let ids = graphs.iter().map(|g| g.id).collect();
    Ok(KernelMatrix::from_fn(ids, |i, j| {
        random_walk_with_radii(&graphs[i], &graphs[j], lambda, radii[i], radii[j])
            .expect("λ checked against the largest pair bound")
    }))
}

/// Normalised frequencies of induced `k`-node subgraphs, keyed by canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphletFeatures {
    pub k: usize,
    pub counts: BTreeMap<u32, f64>,
}

impl GraphletFeatures {
    pub fn dot(&self, other: &Self) -> f64 {
        self.counts
            .iter()
            .filter_map(|(id, f)| other.counts.get(id).map(|g| f * g))
            .sum()
    }
}

/// Bit `pair_index(i, j)` of a pattern is the edge `i < j` of a `k`-node graph.
fn pair_index(i: usize, j: usize, k: usize) -> usize {
    i * k - i * (i + 1) / 2 + (j - i - 1)
}

fn pattern(g: &Graph, nodes: &[usize]) -> u32 {
    let k = nodes.len();
    let mut p = 0u32;
    for a in 0..k {
        for b in a + 1..k {
            if g.has_edge(nodes[a], nodes[b]) {
                p |= 1 << pair_index(a, b, k);
            }
        }
    }
    p
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

/// Smallest pattern over all relabelings.
fn canonical(p: u32, k: usize, perms: &[Vec<usize>]) -> u32 {
    let edges: Vec<(usize, usize)> = (0..k)
        .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
        .filter(|&(a, b)| p >> pair_index(a, b, k) & 1 == 1)
        .collect();
    perms
        .iter()
        .map(|perm| {
            edges.iter().fold(0u32, |acc, &(a, b)| {
                let (x, y) = (perm[a].min(perm[b]), perm[a].max(perm[b]));
                acc | 1 << pair_index(x, y, k)
            })
        })
        .min()
        .unwrap_or(0)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Graphlet frequencies from `samples` uniform node subsets, or from every
/// subset when there are at most `samples` of them.
pub fn graphlet_features(
    g: &Graph,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<GraphletFeatures, ClassicalError> {
    if !(3..=6).contains(&k) {
        return Err(ClassicalError::GraphletSize(k));
    }
    let n = g.num_nodes();
    if k > n {
        return Err(ClassicalError::TooFewNodes { k, n });
    }
    let perms = permutations(k);
    let mut cache: HashMap<u32, u32> = HashMap::new();
    let mut raw: BTreeMap<u32, usize> = BTreeMap::new();
    let mut record = |nodes: &[usize]| {
        let p = pattern(g, nodes);
        let c = *cache.entry(p).or_insert_with(|| canonical(p, k, &perms));
        *raw.entry(c).or_insert(0) += 1;
    };
    if binomial(n, k) <= samples as u128 {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            record(&idx);
            // next combination in lexicographic order
            let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
                break;
            };
            idx[pos] += 1;
            for i in pos + 1..k {
                idx[i] = idx[i - 1] + 1;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let mut nodes = rand::seq::index::sample(&mut rng, n, k).into_vec();
            nodes.sort_unstable();
            record(&nodes);
        }
    }
    let total: usize = raw.values().sum();
    Ok(GraphletFeatures {
        k,
        counts: raw
            .into_iter()
            .map(|(c, m)| (c, m as f64 / total as f64))
            .collect(),
    })
}

/// `f_k(G)ᵀ f_k(G′)`.
pub fn graphlet_kernel(
    g: &Graph,
    h: &Graph,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<f64, ClassicalError> {
    Ok(graphlet_features(g, k, samples, seed)?.dot(&graphlet_features(h, k, samples, seed)?))
}

/// Graphlet Gram matrix. Graph `i` is sampled with stream `seed + i`; graphs
/// smaller than `k` get an all-zero feature vector.
pub fn graphlet_kernel_matrix(
    graphs: &[Graph],
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<KernelMatrix, ClassicalError> {
    if !(3..=6).contains(&k) {
        return Err(ClassicalError::GraphletSize(k));
    }
    let feats: Vec<GraphletFeatures> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| match graphlet_features(g, k, samples, seed.wrapping_add(i as u64)) {
            Ok(f) => Ok(f),
            Err(ClassicalError::TooFewNodes { .. }) => Ok(GraphletFeatures {
                k,
                counts: BTreeMap::new(),
            }),
            Err(e) => Err(e),
        })
        .collect::<Result<_, _>>()?;
    let ids = graphs.iter().map(|g| g.id).collect();
    Ok(KernelMatrix::from_fn(ids, |i, j| feats[i].dot(&feats[j])))
}
