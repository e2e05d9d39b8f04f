use attitude_sync::initial::random_connected_graph;
use attitude_sync::Graph;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Arbitrary simple graph: `n` nodes, each pair present with probability ~p.
fn graph_strategy() -> impl Strategy<Value = Graph> {
    (1usize..9).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        let len = pairs.len();
        (Just(n), Just(pairs), proptest::collection::vec((any::<bool>(), any::<bool>(), 0u8..4), len))
    })
    .prop_map(|(n, pairs, picks)| {
        let edges: Vec<_> = pairs
            .into_iter()
            .zip(picks)
            .filter(|(_, (_, _, keep))| *keep == 0)
            .map(|((i, j), (flip, _, _))| if flip { (j, i) } else { (i, j) })
            .collect();
        Graph::from_edges(n, &edges).unwrap()
    })
}

/// Transitive closure by repeated boolean squaring of `I + A`.
fn reachability_connected(g: &Graph) -> bool {
    let n = g.node_count();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
        for &j in g.neighbors(i) {
            row[j] = true;
        }
    }
    let mut span = 1;
    while span < n {
        let prev = reach.clone();
        for i in 0..n {
            for j in 0..n {
                reach[i][j] = (0..n).any(|k| prev[i][k] && prev[k][j]);
            }
        }
        span *= 2;
    }
    reach[0].iter().all(|&r| r)
}

fn incidence_rank(g: &Graph) -> usize {
    let b = g.incidence_matrix();
    if b.columns() == 0 {
        return 0;
    }
    DMatrix::from_fn(b.rows(), b.columns(), |i, k| b.get(i, k) as f64).rank(1e-9)
}

proptest! {
    #[test]
    fn incidence_rank_is_nodes_minus_components(g in graph_strategy()) {
        prop_assert_eq!(incidence_rank(&g), g.node_count() - g.connected_components());
    }

    #[test]
    fn columns_sum_to_zero_and_hold_one_tail_one_head(g in graph_strategy()) {
        let b = g.incidence_matrix();
        prop_assert!(b.column_sums().iter().all(|&s| s == 0));
        for (k, &(t, h)) in g.edges().iter().enumerate() {
            prop_assert_eq!(b.get(t, k), 1);
            prop_assert_eq!(b.get(h, k), -1);
            let nonzero = (0..b.rows()).filter(|&i| b.get(i, k) != 0).count();
            prop_assert_eq!(nonzero, 2);
        }
    }

    #[test]
    fn connectivity_matches_reachability(g in graph_strategy()) {
        prop_assert_eq!(g.is_connected(), reachability_connected(&g));
    }

    #[test]
    fn neighbourhood_is_symmetric(g in graph_strategy()) {
        for i in 0..g.node_count() {
            prop_assert!(!g.neighbors(i).contains(&i));
            for &j in g.neighbors(i) {
                prop_assert!(g.neighbors(j).contains(&i));
            }
        }
        let degree_sum: usize = (0..g.node_count()).map(|i| g.degree(i)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
    }

    #[test]
    fn reorientation_keeps_connectivity_and_rank(g in graph_strategy(), flips in proptest::collection::vec(any::<bool>(), 0..40)) {
        let r = g.reoriented(&flips);
        prop_assert_eq!(r.is_connected(), g.is_connected());
        prop_assert_eq!(incidence_rank(&r), incidence_rank(&g));
    }
}

#[test]
fn random_connected_graphs_pass_the_oracle() {
    for seed in 0..100 {
        let g = random_connected_graph(1 + (seed as usize % 6), 0.3, seed);
        assert!(reachability_connected(&g));
        assert_eq!(incidence_rank(&g), g.node_count() - 1);
    }
}

#[test]
fn five_node_example_has_full_rank() {
    assert_eq!(incidence_rank(&Graph::five_node_example()), 4);
}
