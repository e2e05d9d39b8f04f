//! Searches seeded initial conditions on the five-node graph for one whose
//! largest attitude is pushed across π by the controller.
//!
//! Each seed's state is rescaled so that its largest agent sits at
//! `0.99·π`; the first seed that crosses π (with `π² < Σ‖x_i‖² < 4π²`) is
//! reported together with its `Σ‖x_i‖² / π²`, rounded to two decimals and
//! re-checked through `seeded_initial_state` directly.

use std::f64::consts::PI;

use attitude_sync::graph::Graph;
use attitude_sync::initial::seeded_initial_state;
use attitude_sync::simulator::{integrate, SimConfig};

const START_NORM: f64 = 0.99 * PI;

fn crosses(graph: &Graph, seed: u64, fraction: f64) -> Option<f64> {
    let x0 = seeded_initial_state::<f64>(graph.node_count(), seed, fraction * PI * PI);
    if x0.max_norm() >= PI {
        return None;
    }
    let cfg = SimConfig::new(graph.clone(), x0).with_t_max(2.0);
    integrate(&cfg).ok()?.singularity_time()
}

fn main() {
    let graph = Graph::five_node_example();
    let n = graph.node_count();
    for seed in 0..10_000u64 {
        let raw = seeded_initial_state::<f64>(n, seed, 1.0);
        let x0 = raw.scale(START_NORM / raw.max_norm());
        let fraction = x0.sum_sq_norm() / (PI * PI);
        if !(1.0 < fraction && fraction < 4.0) {
            continue;
        }
        let cfg = SimConfig::new(graph.clone(), x0).with_t_max(2.0);
        let Ok(rec) = integrate(&cfg) else { continue };
        if rec.singularity_time().is_none() {
            continue;
        }
        let rounded = (fraction * 100.0).round() / 100.0;
        match crosses(&graph, seed, rounded) {
            Some(t) => {
                println!("seed {seed}: pi_sq_fraction {rounded} crosses pi at t = {t}");
                return;
            }
            None => eprintln!("seed {seed}: crossing lost after rounding to {rounded}"),
        }
    }
    println!("no crossing found");
}
