use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;

/// G(n, rho) random graph: every pair is an edge independently with
/// probability `rho`. Deterministic for a fixed seed.
pub fn erdos_renyi(n: usize, rho: f64, seed: u64) -> Graph {
    let rho = rho.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < rho {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, &edges).expect("generated edges are valid")
}

/// Random geometric graph in the unit square: nodes are uniform points, and
/// two nodes are joined when closer than `radius`. Positions are attached.
pub fn random_geometric(n: usize, radius: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = (pos[i][0] - pos[j][0]).hypot(pos[i][1] - pos[j][1]);
            if d < radius {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, &edges)
        .and_then(|g| g.with_positions(pos))
        .expect("generated graph is valid")
}
