//! Reproducible initial conditions and random topologies.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitBall};

use crate::graph::Graph;
use crate::linalg::Vec3;
use crate::network::NetworkState;
use crate::scalar::Real;

/// Draws every agent uniformly in the ball of radius π/2, then rescales the
/// stacked vector so that `Σ‖x_i‖² = sum_sq_norm`.
///
/// For `sum_sq_norm < π²` every agent lands strictly inside the π-ball.
pub fn seeded_initial_state<T: Real>(n: usize, seed: u64, sum_sq_norm: T) -> NetworkState<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = std::f64::consts::FRAC_PI_2;
    let raw: Vec<[f64; 3]> = (0..n)
        .map(|_| {
            let p: [f64; 3] = UnitBall.sample(&mut rng);
            p.map(|c| c * radius)
        })
        .collect();
    let current: f64 = raw.iter().flatten().map(|c| c * c).sum();
    let target = sum_sq_norm.as_f64();
    let s = if current > 0.0 { (target / current).sqrt() } else { 0.0 };
    NetworkState::new(
        raw.into_iter()
            .map(|p| Vec3(p.map(|c| T::lit(c * s))))
            .collect(),
    )
}

/// Random spanning tree plus every remaining pair with probability
/// `extra_edge_prob`; always connected.
pub fn random_connected_graph(n: usize, extra_edge_prob: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        edges.push((parent, order[k]));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let present = edges
                .iter()
                .any(|&(a, b)| (a, b) == (i, j) || (a, b) == (j, i));
            if !present && rng.random_bool(extra_edge_prob) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n.max(1), &edges).expect("generated graph is valid")
}

/// Derives `count` run seeds from a master seed.
pub fn derive_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..count).map(|_| rng.random()).collect()
}
