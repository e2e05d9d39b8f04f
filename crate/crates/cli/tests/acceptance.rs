//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use attitude_sync::initial::{random_connected_graph, seeded_initial_state};
use attitude_sync::kinematics::symmetric_part;
use attitude_sync::simulator::{rate_bound_violations, v1_slope_windows, DEFAULT_SLOPE_WINDOW_STEPS, DRIFT_PER_STEP};
use attitude_sync::{
    control_input, control_input_incidence, exp_so3, integrate, log_so3, sinc_ratio, transition_matrix, AxisAngle,
    Graph, Mat3, NetworkStated, SignMode, SimConfigd, TrajectoryRecordd, Vec3d,
};
use attsync_cli::{plot, read_table, run, PlotKind};
use nalgebra::{Matrix3, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitBall};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn ball(rng: &mut ChaCha8Rng, radius: f64) -> Vec3d {
    let p: [f64; 3] = UnitBall.sample(rng);
    Vec3d::new(p[0] * radius, p[1] * radius, p[2] * radius)
}

fn so3_core() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut roundtrip, mut ortho, mut det) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let v = ball(&mut rng, PI - 0.01);
        let r = exp_so3(&v);
        let back = *log_so3(&r).expect("inside the chart").vector();
        roundtrip = roundtrip.max((back - v).norm());
        let m = r.matrix();
        ortho = ortho.max((*m * m.transpose()).max_abs_diff(&Mat3::identity()));
        det = det.max((m.determinant() - 1.0).abs());
    }
    outcome(
        roundtrip <= 1e-9 && ortho <= 1e-9 && det <= 1e-9,
        format!("max |log(exp v) - v| = {roundtrip:.1e}, max |RR^T - I| = {ortho:.1e}, max |det R - 1| = {det:.1e}"),
    )
}

fn transition_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut fixed, mut spectrum) = (0.0f64, 0.0f64);
    let mut fixed_ok = true;
    for _ in 0..10_000 {
        let x = ball(&mut rng, PI - 0.01);
        let chart = AxisAngle::new(x).unwrap();
        let l = *transition_matrix(&chart).unwrap().matrix();
        let err = (l * x - x).norm_inf().max((l.transpose() * x - x).norm_inf());
        fixed = fixed.max(err / x.norm().max(1.0));
        fixed_ok &= err <= 1e-12 * x.norm().max(1.0);

        let s = symmetric_part(&chart).unwrap();
        let eig = SymmetricEigen::new(Matrix3::from_fn(|i, j| s.get(i, j))).eigenvalues;
        let mut eig: Vec<f64> = eig.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let r = sinc_ratio(x.norm()).unwrap();
        spectrum = spectrum.max((eig[0] - r).abs().max((eig[1] - r).abs()).max((eig[2] - 1.0).abs()));
    }
    outcome(
        fixed_ok && spectrum <= 1e-9,
        format!("max relative |Lx - x|, |x^T L - x^T| = {fixed:.1e}, max eigenvalue error = {spectrum:.1e}"),
    )
}

fn controller_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for case in 0..1_000u64 {
        let n = rng.random_range(1..=8);
        let g = random_connected_graph(n, rng.random_range(0.0..0.8), case);
        let flips: Vec<bool> = (0..g.edge_count()).map(|_| rng.random_bool(0.5)).collect();
        let x = NetworkStated::new((0..n).map(|_| ball(&mut rng, PI - 0.01)).collect());
        for mode in [SignMode::Exact, SignMode::Deadband(1e-3), SignMode::Smooth(1e-3)] {
            let a = control_input(&x, &g, mode).unwrap();
            for graph in [&g, &g.reoriented(&flips)] {
                let b = control_input_incidence(&x, graph, mode).unwrap();
                for (wa, wb) in a.iter().zip(&b) {
                    worst = worst.max((wa.0 - wb.0).norm_inf());
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("max |neighbour sum - incidence form| = {worst:.1e}"))
}

fn lemma_invariance() -> Outcome {
    let g = Graph::five_node_example();
    let mut worst_increase = f64::NEG_INFINITY;
    let mut violating_runs = 0;
    let mut escaped = 0;
    let mut dt = 0.0;
    for seed in 0..100u64 {
        let x0 = seeded_initial_state(5, seed, 0.99 * PI * PI);
        let cfg = SimConfigd::new(g.clone(), x0)
            .with_mode(SignMode::Deadband(1e-3))
            .with_dt(1e-3)
            .with_t_max(30.0);
        dt = cfg.dt;
        let rec = integrate(&cfg).unwrap();
        let increase = rec.v2_max_increase_per_step();
        worst_increase = worst_increase.max(increase);
        if increase > DRIFT_PER_STEP * dt {
            violating_runs += 1;
        }
        // Σ‖x_i‖² = 2V₂ against π² plus the step-proportional drift budget.
        let escaped_here = rec
            .v2
            .iter()
            .zip(&rec.steps)
            .any(|(&v, &k)| 2.0 * v >= PI * PI + DRIFT_PER_STEP * k as f64 * dt);
        escaped += escaped_here as usize;
    }
    outcome(
        violating_runs == 0 && escaped == 0,
        format!(
            "V2 per-step increase: worst {worst_increase:.2e} vs allowance {:.0e}, {violating_runs}/100 runs over; \
             sum |x_i|^2 left S(pi^2) in {escaped}/100 runs",
            DRIFT_PER_STEP * dt
        ),
    )
}

struct FiniteTimeRuns {
    records: Vec<(TrajectoryRecordd, usize)>,
}

fn finite_time_runs() -> FiniteTimeRuns {
    let records = (0..50u64)
        .map(|k| {
            let g = if k % 5 == 0 {
                Graph::five_node_example()
            } else {
                random_connected_graph(2 + (k as usize % 5), 0.3, 500 + k)
            };
            let n = g.node_count();
            let x0 = seeded_initial_state(n, 900 + k, 0.9 * PI * PI);
            let cfg = SimConfigd::new(g, x0).with_mode(SignMode::Deadband(1e-3)).with_t_max(50.0);
            (integrate(&cfg).unwrap(), n)
        })
        .collect();
    FiniteTimeRuns { records }
}

fn finite_time(runs: &FiniteTimeRuns) -> Outcome {
    let mut slowest = 0.0f64;
    let mut worst_after = 0.0f64;
    let mut missed = 0;
    for (rec, _) in &runs.records {
        match (rec.consensus_time(), rec.post_consensus_max_disagreement()) {
            (Some(t), Some(d)) if t < 50.0 && rec.singularity_time().is_none() => {
                slowest = slowest.max(t);
                worst_after = worst_after.max(d);
            }
            _ => missed += 1,
        }
    }
    outcome(
        missed == 0 && worst_after <= 2e-2,
        format!("{missed}/50 runs without consensus; slowest t* = {slowest}, max post-consensus disagreement = {worst_after:.2e}"),
    )
}

fn rate_bound(runs: &FiniteTimeRuns) -> Outcome {
    let mut windows = 0;
    let mut violations = 0;
    let mut tightest = f64::NEG_INFINITY;
    for (rec, n) in &runs.records {
        let all = v1_slope_windows(rec, DEFAULT_SLOPE_WINDOW_STEPS);
        windows += all.len();
        violations += rate_bound_violations(rec, DEFAULT_SLOPE_WINDOW_STEPS, *n);
        for w in &all {
            tightest = tightest.max(w.slope - (-w.lambda_bound / *n as f64 + 0.1));
        }
    }
    outcome(
        violations == 0 && windows > 0,
        format!("{violations} of {windows} pre-consensus windows violate the bound; max slope - bound = {tightest:.3}"),
    )
}

fn singularity(dir: &Path) -> Outcome {
    let out = match run(&scenario("scenario2.json"), dir) {
        Ok(out) => out,
        Err(e) => return outcome(false, format!("run failed: {e}")),
    };
    let rec = &out.record;
    let sum_sq = 2.0 * rec.v2[0];
    let in_band = PI * PI < sum_sq && sum_sq < 4.0 * PI * PI;
    let starts_inside = rec.max_norm[0] < PI;
    let t = out.report.monitors.singularity_time;
    let crossed = rec.max_norm.last().is_some_and(|&m| m >= PI);
    outcome(
        in_band && starts_inside && t.is_some() && crossed,
        format!(
            "sum |x_i|^2 = {:.3} pi^2, initial max norm = {:.4}, singularity_time = {t:?}",
            sum_sq / (PI * PI),
            rec.max_norm[0]
        ),
    )
}

fn figures(dir: &Path) -> Outcome {
    let result = (|| -> Result<Outcome, attsync_cli::CliError> {
        let one = run(&scenario("scenario1.json"), dir)?;
        let two = run(&scenario("scenario2.json"), dir)?;
        let states_svg = plot(&one.trajectory_path, PlotKind::States, None)?;
        let v2_svg = plot(&one.trajectory_path, PlotKind::V2, None)?;
        let norm_svg = plot(&two.trajectory_path, PlotKind::MaxNorm, None)?;
        let svgs_ok = [&states_svg, &v2_svg, &norm_svg]
            .iter()
            .all(|p| std::fs::read_to_string(p).is_ok_and(|s| s.contains("<polyline")));
        let marker = std::fs::read_to_string(&norm_svg).is_ok_and(|s| s.contains(">π</text>"));

        let table = read_table(&one.trajectory_path)?;
        let spread = table.coordinate_spread(table.len() - 1);
        let tolerance = one.report.consensus_tolerance;
        let v2 = table.column("v2").unwrap();
        let t = table.column("t").unwrap();
        let dt = one.report.dt;
        let mut rises = 0;
        let mut worst = f64::NEG_INFINITY;
        for k in 1..v2.len() {
            let steps = ((t[k] - t[k - 1]) / dt).round().max(1.0);
            let rise = v2[k] - v2[k - 1];
            worst = worst.max(rise / steps);
            if rise > DRIFT_PER_STEP * dt * steps {
                rises += 1;
            }
        }

        let table2 = read_table(&two.trajectory_path)?;
        let norms = table2.column("max_norm").unwrap();
        let crosses = norms[0] < PI && norms.iter().any(|&m| m >= PI);

        Ok(outcome(
            svgs_ok && marker && spread <= tolerance && rises == 0 && crosses,
            format!(
                "final spread = {spread:.2e} (tol {tolerance}); V2 rows rising beyond 1e-6*dt: {rises} \
                 (worst {worst:.2e}/step); max_norm crosses pi: {crosses}; pi marker: {marker}"
            ),
        ))
    })();
    result.unwrap_or_else(|e| outcome(false, format!("error: {e}")))
}

fn determinism(dir: &Path) -> Outcome {
    let mut identical = true;
    let mut sizes = Vec::new();
    for name in ["scenario1.json", "scenario2.json"] {
        let a = dir.join("a");
        let b = dir.join("b");
        let (Ok(ra), Ok(rb)) = (run(&scenario(name), &a), run(&scenario(name), &b)) else {
            return outcome(false, format!("{name}: run failed"));
        };
        let bytes_a = std::fs::read(&ra.trajectory_path).unwrap();
        let bytes_b = std::fs::read(&rb.trajectory_path).unwrap();
        identical &= bytes_a == bytes_b;
        sizes.push(bytes_a.len());
    }
    outcome(identical, format!("CSV sizes {sizes:?}, byte-identical: {identical}"))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut failures = 0;
    let mut report = |id: u32, name: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let mut o = f();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed >= limit {
                o.passed = false;
                o.detail.push_str(&format!("; over the {} s limit", limit.as_secs()));
            }
        }
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {id} [{verdict}] {name} ({:.2} s): {}", elapsed.as_secs_f64(), o.detail);
        if !o.passed {
            failures += 1;
        }
    };

    let secs = Duration::from_secs;
    report(1, "SO(3) core correctness", Some(secs(5)), &mut so3_core);
    report(2, "transition-matrix identities", Some(secs(5)), &mut transition_identities);
    report(3, "controller form equivalence", Some(secs(5)), &mut controller_forms);
    report(4, "invariance of S(pi^2)", Some(secs(60)), &mut lemma_invariance);
    let mut runs = None;
    report(5, "finite-time consensus", Some(secs(120)), &mut || {
        let r = runs.insert(finite_time_runs());
        finite_time(r)
    });
    let runs = runs.expect("criterion 5 ran");
    report(6, "V1 rate bound", None, &mut || rate_bound(&runs));
    report(7, "scenario 2 singularity", Some(secs(10)), &mut || singularity(dir.path()));
    report(8, "figure reproduction", Some(secs(5)), &mut || figures(dir.path()));
    report(9, "determinism", None, &mut || determinism(dir.path()));

    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criterion(s) failed");
        ExitCode::FAILURE
    }
}
