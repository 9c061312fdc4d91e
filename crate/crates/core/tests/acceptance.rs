//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measured numbers. Run with
//! `cargo test -p seaprobe --test acceptance`.

// `!(a < b)` is used instead of `a >= b` where NaN must also count as a
// failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::time::Instant;

use seaprobe::benchmarks::{self, SUITE_SIZE, SUITE_VARIANTS};
use seaprobe::geom::Point;
use seaprobe::gp::{self, KernelParams};
use seaprobe::harness::{self, ComparisonRow, PlannerKind, RunConfig};
use seaprobe::instance::{Instance, MixtureComponent, Sample, Surface, TrueFunction};
use seaprobe::planner::{self, PlannerConfig, Task};
use seaprobe::rng::SplitMix64;
use seaprobe::tour::{self, Tour};

fn bench_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../bench")
}

fn load_suite_instance(variant: &str, index: usize) -> Instance<f64> {
    let path = bench_dir()
        .join(variant)
        .join(benchmarks::suite_file_name(index, variant));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| {
        panic!(
            "cannot read shipped instance {} ({e}); regenerate with `seaprobe generate --suite bench`",
            path.display()
        )
    });
    Instance::parse(&text).expect("shipped instance parses")
}

// ---------------------------------------------------------------------
// Dense oracle for m <= 3: explicit inverse, no Cholesky involved.
// ---------------------------------------------------------------------

fn invert_upto3(k: &[Vec<f64>]) -> (Vec<Vec<f64>>, f64) {
    let m = k.len();
    match m {
        1 => {
            let det = k[0][0];
            (vec![vec![1.0 / det]], det)
        }
        2 => {
            let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
            (
                vec![
                    vec![k[1][1] / det, -k[0][1] / det],
                    vec![-k[1][0] / det, k[0][0] / det],
                ],
                det,
            )
        }
        3 => {
            let det = k[0][0] * (k[1][1] * k[2][2] - k[1][2] * k[2][1])
                - k[0][1] * (k[1][0] * k[2][2] - k[1][2] * k[2][0])
                + k[0][2] * (k[1][0] * k[2][1] - k[1][1] * k[2][0]);
            let mut inv = vec![vec![0.0; 3]; 3];
            inv[0][0] = (k[1][1] * k[2][2] - k[1][2] * k[2][1]) / det;
            inv[0][1] = (k[0][2] * k[2][1] - k[0][1] * k[2][2]) / det;
            inv[0][2] = (k[0][1] * k[1][2] - k[0][2] * k[1][1]) / det;
            inv[1][0] = (k[1][2] * k[2][0] - k[1][0] * k[2][2]) / det;
            inv[1][1] = (k[0][0] * k[2][2] - k[0][2] * k[2][0]) / det;
            inv[1][2] = (k[0][2] * k[1][0] - k[0][0] * k[1][2]) / det;
            inv[2][0] = (k[1][0] * k[2][1] - k[1][1] * k[2][0]) / det;
            inv[2][1] = (k[0][1] * k[2][0] - k[0][0] * k[2][1]) / det;
            inv[2][2] = (k[0][0] * k[1][1] - k[0][1] * k[1][0]) / det;
            (inv, det)
        }
        _ => unreachable!("oracle only covers m <= 3"),
    }
}

struct DenseOracle {
    mean: f64,
    std: f64,
    lml: f64,
}

fn dense_oracle(samples: &[Sample<f64>], params: &KernelParams<f64>, q: Point<f64>) -> DenseOracle {
    let m = samples.len();
    let ridge = params.noise * params.noise + params.jitter;
    let mut k = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            k[i][j] = gp::kernel(params, samples[i].point(), samples[j].point());
            if i == j {
                k[i][j] += ridge;
            }
        }
    }
    let (inv, det) = invert_upto3(&k);
    let z: Vec<f64> = samples.iter().map(|s| s.z).collect();
    let alpha: Vec<f64> = (0..m)
        .map(|i| (0..m).map(|j| inv[i][j] * z[j]).sum())
        .collect();
    let kq: Vec<f64> = samples
        .iter()
        .map(|s| gp::kernel(params, q, s.point()))
        .collect();
    let mean: f64 = kq.iter().zip(&alpha).map(|(a, b)| a * b).sum();
    let mut quad = 0.0;
    for i in 0..m {
        for j in 0..m {
            quad += kq[i] * inv[i][j] * kq[j];
        }
    }
    let var = (gp::kernel(params, q, q) - quad).max(0.0);
    let zkz: f64 = z.iter().zip(&alpha).map(|(a, b)| a * b).sum();
    let lml = -0.5 * zkz - 0.5 * det.ln() - 0.5 * (m as f64) * (2.0 * std::f64::consts::PI).ln();
    DenseOracle {
        mean,
        std: var.sqrt(),
        lml,
    }
}

/// Random points with pairwise separation >= 0.05 so neither route loses
/// digits to near-singular systems.
fn separated_points(rng: &mut SplitMix64, count: usize) -> Vec<Point<f64>> {
    let mut pts: Vec<Point<f64>> = Vec::with_capacity(count);
    while pts.len() < count {
        let p = Point::new(rng.next_f64(), rng.next_f64());
        if pts.iter().all(|q| q.dist(p) >= 0.05) {
            pts.push(p);
        }
    }
    pts
}

#[test]
fn criterion_1_gp_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0xC1);
    let mut worst = 0.0f64;
    for round in 0..100 {
        let m = 1 + round % 3;
        let pts = separated_points(&mut rng, m);
        let samples: Vec<Sample<f64>> = pts
            .iter()
            .map(|p| Sample::new(p.x, p.y, 6.0 * rng.next_f64() - 3.0))
            .collect();
        let noise = if round % 2 == 0 {
            0.0
        } else {
            0.01 + 0.3 * rng.next_f64()
        };
        let params = KernelParams::new(
            0.5 + 2.0 * rng.next_f64(),
            0.15 + rng.next_f64(),
            noise,
            1e-10,
        )
        .unwrap();
        let q = Point::new(1.4 * rng.next_f64() - 0.2, 1.4 * rng.next_f64() - 0.2);

        let model = gp::fit(&samples, &params).unwrap();
        let oracle = dense_oracle(&samples, &params, q);
        let lml = gp::log_marginal_likelihood(&samples, &params).unwrap();

        let dm = (model.predict_mean(q) - oracle.mean).abs();
        let ds = (model.predict_std(q) - oracle.std).abs();
        let dl = (lml - oracle.lml).abs();
        worst = worst.max(dm).max(ds).max(dl);
        assert!(dm <= 1e-9, "round {round}: mean off by {dm}");
        assert!(ds <= 1e-9, "round {round}: std off by {ds}");
        assert!(dl <= 1e-9, "round {round}: likelihood off by {dl}");
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "took {elapsed}s, budget 1s");
    println!(
        "criterion 1 (GP oracle equivalence): PASS — 100 sets, worst deviation {worst:.3e}, {elapsed:.3}s"
    );
}

#[test]
fn criterion_2_gp_interpolation_on_shipped_16grid() {
    let mut worst_mean = 0.0f64;
    let mut worst_std = 0.0f64;
    for index in 1..=SUITE_SIZE {
        let inst = load_suite_instance("16grid", index);
        let params = KernelParams {
            jitter: 1e-10,
            ..KernelParams::for_samples(&inst.samples)
        };
        assert_eq!(params.noise, 0.0);
        let model = gp::fit(&inst.samples, &params).unwrap();
        for s in &inst.samples {
            let dm = (model.predict_mean(s.point()) - s.z).abs();
            let std = model.predict_std(s.point());
            worst_mean = worst_mean.max(dm);
            worst_std = worst_std.max(std);
            assert!(
                dm <= 1e-6,
                "g{index}: mean off by {dm} at ({}, {})",
                s.x,
                s.y
            );
            assert!(std < 1e-4, "g{index}: std {std} at ({}, {})", s.x, s.y);
        }
    }
    println!(
        "criterion 2 (GP interpolation): PASS — 10 instances, worst |mean-z| {worst_mean:.3e}, worst std {worst_std:.3e}"
    );
}

fn brute_force_best(points: &[Point<f64>], depot: Point<f64>) -> f64 {
    fn recurse(
        depot: Point<f64>,
        remaining: &mut Vec<Point<f64>>,
        prefix: &mut Vec<Point<f64>>,
        best: &mut f64,
    ) {
        if remaining.is_empty() {
            let len = tour::travel_length(prefix, depot);
            if len < *best {
                *best = len;
            }
            return;
        }
        for i in 0..remaining.len() {
            let p = remaining.remove(i);
            prefix.push(p);
            recurse(depot, remaining, prefix, best);
            prefix.pop();
            remaining.insert(i, p);
        }
    }
    let mut best = f64::INFINITY;
    recurse(depot, &mut points.to_vec(), &mut Vec::new(), &mut best);
    best
}

#[test]
fn criterion_3_held_karp_exactness() {
    let started = Instant::now();
    let depot = Point::new(0.0, 0.0);
    let mut rng = SplitMix64::new(0xC3);
    let mut checked = 0;
    let mut worst = 0.0f64;
    for n in 4..=8 {
        for _ in 0..50 {
            let pts: Vec<Point<f64>> = (0..n)
                .map(|_| Point::new(rng.next_f64(), rng.next_f64()))
                .collect();
            let order = tour::held_karp_optimal(&pts, depot).unwrap();
            let got = tour::travel_length(&order, depot);
            let want = brute_force_best(&pts, depot);
            let gap = (got - want).abs();
            worst = worst.max(gap);
            assert!(gap <= 1e-9, "n={n}: exact {got} vs brute {want}");
            checked += 1;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert_eq!(checked, 250);
    assert!(elapsed < 10.0, "took {elapsed}s, budget 10s");
    println!(
        "criterion 3 (exact tour solver): PASS — 250 instances, worst gap {worst:.3e}, {elapsed:.2}s"
    );
}

#[test]
fn criterion_4_heuristic_sanity() {
    let depot = Point::new(0.0, 0.0);
    let mut rng = SplitMix64::new(0xC4);
    for round in 0..200 {
        let n = 5 + round % 16;
        let pts: Vec<Point<f64>> = (0..n)
            .map(|_| Point::new(rng.next_f64(), rng.next_f64()))
            .collect();
        let nn = tour::nearest_neighbor_order(&pts, depot);
        let improved = tour::two_opt_improve(&nn, depot);
        let before = tour::travel_length(&nn, depot);
        let after = tour::travel_length(&improved, depot);
        assert!(after <= before + 1e-12, "round {round}: {after} > {before}");
        let again = tour::two_opt_improve(&improved, depot);
        assert_eq!(again, improved, "round {round}: not idempotent");
    }
    println!("criterion 4 (heuristic sanity): PASS — 200 instances, n in 5..=20");
}

#[test]
fn criterion_5_budget_feasibility_across_the_suite() {
    let started = Instant::now();
    let mut cases: Vec<(String, usize)> = Vec::new();
    for (variant, _) in SUITE_VARIANTS {
        for index in 1..=SUITE_SIZE {
            cases.push((variant.to_string(), index));
        }
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let failures = std::sync::Mutex::new(Vec::<String>::new());
    let mut max_duration = std::sync::Mutex::new(0.0f64);
    std::thread::scope(|scope| {
        for _ in 0..8 {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let Some((variant, index)) = cases.get(i) else {
                    break;
                };
                let inst = load_suite_instance(variant, *index);
                let task = Task::from_instance(&inst);
                let config = PlannerConfig::default();
                for kind in [PlannerKind::Orienteering, PlannerKind::GridBaseline] {
                    let tour = match kind {
                        PlannerKind::Orienteering => planner::plan_orienteering(&task, &config),
                        PlannerKind::GridBaseline => planner::plan_grid_baseline(&task, &config),
                    }
                    .unwrap();
                    let recomputed =
                        tour::tour_duration(tour.stops(), inst.depot, inst.speed, inst.probe_time);
                    if !(recomputed < inst.budget) {
                        failures.lock().unwrap().push(format!(
                            "{} g{index} {}: duration {recomputed} >= {}",
                            variant,
                            kind.name(),
                            inst.budget
                        ));
                    }
                    let mut m = max_duration.lock().unwrap();
                    if recomputed > *m {
                        *m = recomputed;
                    }
                }
            });
        }
    });
    let failures = failures.into_inner().unwrap();
    assert!(failures.is_empty(), "{failures:?}");
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "criterion 5 (budget feasibility): PASS — 60 instances x 2 planners, max duration {:.4} < 100, {elapsed:.1}s",
        max_duration.get_mut().unwrap()
    );
}

#[test]
fn criterion_6_orienteering_improves_on_100grid() {
    let started = Instant::now();
    let config = RunConfig::default();
    assert_eq!(config.planner.grid_k, 20);
    assert_eq!(config.planner.grid_l, 20);
    let mut improved = 0;
    for index in 1..=SUITE_SIZE {
        let inst = load_suite_instance("100grid", index);
        let out = harness::run_main(&inst, PlannerKind::Orienteering, &config).unwrap();
        assert_eq!(out.residuals.len(), 10201, "101x101 scoring mesh");
        if out.final_delta < out.initial_delta {
            improved += 1;
        } else {
            eprintln!(
                "g{index}: no improvement ({} -> {})",
                out.initial_delta, out.final_delta
            );
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(improved >= 9, "only {improved}/10 runs improved");
    assert!(elapsed < 600.0, "took {elapsed}s, budget 600s");
    println!("criterion 6 (improvement on 100grid): PASS — {improved}/10 improved, {elapsed:.1}s");
}

#[test]
fn criterion_7_orienteering_beats_grid_search_on_100_point_variants() {
    let started = Instant::now();
    let mut named = Vec::new();
    for variant in ["100grid", "100random"] {
        for index in 1..=SUITE_SIZE {
            named.push((
                format!("g{index}_{variant}"),
                load_suite_instance(variant, index),
            ));
        }
    }
    let table = harness::compare(&named, &RunConfig::default(), 4);
    for row in &table.rows {
        assert!(
            matches!(row, ComparisonRow::Scored { .. }),
            "failed row: {row:?}"
        );
    }
    let wins = table.orienteering_wins;
    assert!(wins >= 12, "orienteering won only {wins}/20");
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "criterion 7 (qualitative superiority): PASS — orienteering wins {wins}/20 (grid {}), {elapsed:.1}s",
        table.grid_wins
    );
}

#[test]
fn criterion_8_compare_is_byte_deterministic() {
    let started = Instant::now();
    let named: Vec<(String, Instance<f64>)> = (1..=SUITE_SIZE)
        .map(|index| {
            (
                format!("g{index}_16grid"),
                load_suite_instance("16grid", index),
            )
        })
        .collect();
    let config = RunConfig::default();
    let first = harness::render_comparison_csv(&harness::compare(&named, &config, 1));
    let second = harness::render_comparison_csv(&harness::compare(&named, &config, 3));
    assert_eq!(first, second, "comparison output differs between runs");
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "criterion 8 (byte determinism): PASS — two compare runs identical ({} bytes), {elapsed:.1}s",
        first.len()
    );
}

// ---------------------------------------------------------------------
// Randomized-instance generator for the round-trip criterion.
// ---------------------------------------------------------------------

fn arbitrary_instance(rng: &mut SplitMix64) -> Instance<f64> {
    let x_min = 4.0 * rng.next_f64() - 2.0;
    let y_min = 4.0 * rng.next_f64() - 2.0;
    let width = 0.2 + 3.0 * rng.next_f64();
    let height = 0.2 + 3.0 * rng.next_f64();
    let surface = Surface {
        x_min,
        x_max: x_min + width,
        y_min,
        y_max: y_min + height,
    };
    let truth = if rng.next_f64() < 0.5 {
        let count = 1 + (rng.next_u64() % 4) as usize;
        let components = (0..count)
            .map(|_| MixtureComponent {
                weight: 200.0 * rng.next_f64() - 100.0,
                center: Point::new(
                    x_min + width * rng.next_f64(),
                    y_min + height * rng.next_f64(),
                ),
                spread: 0.01 + 0.5 * rng.next_f64(),
            })
            .collect();
        Some(TrueFunction::new(components).unwrap())
    } else {
        None
    };
    let sample_count = (rng.next_u64() % 30) as usize;
    let samples = (0..sample_count)
        .map(|_| {
            let x = x_min + width * rng.next_f64();
            let y = y_min + height * rng.next_f64();
            let z = match &truth {
                Some(t) => t.evaluate(Point::new(x, y)),
                None => 200.0 * rng.next_f64() - 100.0,
            };
            Sample::new(x, y, z)
        })
        .collect();
    let inst = Instance {
        surface,
        budget: 0.1 + 200.0 * rng.next_f64(),
        probe_time: if rng.next_f64() < 0.3 {
            0.0
        } else {
            2.0 * rng.next_f64()
        },
        speed: 0.1 + 5.0 * rng.next_f64(),
        depot: Point::new(
            x_min + width * rng.next_f64(),
            y_min + height * rng.next_f64(),
        ),
        samples,
        mesh_step: width.min(height) * (0.05 + 0.9 * rng.next_f64()),
        truth,
    };
    inst.validate().expect("generator builds valid instances");
    inst
}

#[test]
fn criterion_9_instance_round_trip_is_bit_exact() {
    let mut rng = SplitMix64::new(0xC9);
    for round in 0..100 {
        let inst = arbitrary_instance(&mut rng);
        let text = inst.serialize();
        let back: Instance<f64> = Instance::parse(&text)
            .unwrap_or_else(|e| panic!("round {round}: reparse failed: {e}\n{text}"));
        assert_eq!(back, inst, "round {round}: value mismatch");
        assert_eq!(back.serialize(), text, "round {round}: byte mismatch");
    }
    println!("criterion 9 (round-trip identity): PASS — 100 randomized instances, bit-exact");
}

// ---------------------------------------------------------------------
// Suite integrity: the shipped files are exactly what the generator
// produces, so the criteria above run against known inputs.
// ---------------------------------------------------------------------

#[test]
fn shipped_suite_matches_regeneration() {
    for (variant, layout) in SUITE_VARIANTS {
        for index in 1..=SUITE_SIZE {
            let shipped = load_suite_instance(variant, index);
            let regenerated = benchmarks::suite_instance::<f64>(index, layout).unwrap();
            assert_eq!(
                shipped.serialize(),
                regenerated.serialize(),
                "bench/{variant}/{} drifted from the generator",
                benchmarks::suite_file_name(index, variant)
            );
        }
    }
    println!("suite integrity: PASS — all 60 shipped files match regeneration");
}

#[test]
fn planner_works_in_single_precision_too() {
    // The numeric core is generic; exercise the full planning path at f32
    // to keep it honest.
    let truth = benchmarks::mixture::<f32>(1).unwrap();
    let inst = seaprobe::instance::generate_grid_instance(
        &truth,
        4,
        &seaprobe::instance::InstanceConfig {
            budget: 20.0f32,
            ..seaprobe::instance::InstanceConfig::default()
        },
    )
    .unwrap();
    let config = PlannerConfig {
        grid_k: 8,
        grid_l: 8,
        ..PlannerConfig::default()
    };
    let tour: Tour<f32> = planner::plan_orienteering(&Task::from_instance(&inst), &config).unwrap();
    assert!(tour.duration() < 20.0);
    assert!(!tour.is_empty());
    println!(
        "single precision: PASS — f32 pipeline plans {} stops",
        tour.len()
    );
}

#[test]
fn mesh_error_is_rejected_loudly_without_truth() {
    let inst = load_suite_instance("16grid", 1).without_truth();
    let err =
        harness::run_main(&inst, PlannerKind::Orienteering, &RunConfig::default()).unwrap_err();
    assert!(matches!(err, harness::HarnessError::MissingTruth));
}
