//! Benchmark harness: plan a trip on an instance, reveal the ground truth
//! at the planned stops, refit, and score the estimation error against the
//! evaluation mesh; batch comparisons tally wins between the two planners.
//!
//! Planning sees only the instance's initial data — the planners take a
//! [`Task`], which has no ground-truth field — and the truth is consulted
//! strictly after the plan is fixed.

use std::time::Instant;

use thiserror::Error;

use crate::gp::{self, GpError, GpModel, KernelParams};
use crate::instance::{
    build_mesh, EvalMesh, Instance, InstanceError, Sample, Surface, TrueFunction,
};
use crate::planner::{self, PlanError, PlannerConfig, Task};
use crate::scalar::Scalar;
use crate::tour::Tour;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HarnessError {
    #[error("benchmark mode requires ground truth")]
    MissingTruth,
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Which planner a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlannerKind {
    Orienteering,
    GridBaseline,
}

impl PlannerKind {
    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Orienteering => "orienteering",
            PlannerKind::GridBaseline => "grid",
        }
    }
}

/// Harness configuration: planner knobs plus hyperparameter tuning.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<T> {
    pub planner: PlannerConfig<T>,
    /// When set, kernel hyperparameters are picked by likelihood grid
    /// search over the default candidate grid instead of the fixed
    /// defaults.
    pub tune: bool,
}

impl<T: Scalar> Default for RunConfig<T> {
    fn default() -> Self {
        RunConfig {
            planner: PlannerConfig::default(),
            tune: false,
        }
    }
}

/// Absolute residual at one mesh point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual<T> {
    pub x: T,
    pub y: T,
    pub abs_error: T,
}

/// Outcome of one benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<T> {
    pub tour: Tour<T>,
    /// Mesh error of the model fitted on the initial data only.
    pub initial_delta: T,
    /// Mesh error of the model fitted on initial data plus revealed probes.
    pub final_delta: T,
    /// One entry per mesh point, in mesh order; their sum is `final_delta`.
    pub residuals: Vec<Residual<T>>,
    pub wall_time_secs: f64,
}

/// Sum of absolute differences between the truth and the posterior mean
/// over the mesh, accumulated in mesh order for reproducibility.
pub fn error_delta<T: Scalar>(
    model: &GpModel<T>,
    truth: &TrueFunction<T>,
    mesh: &EvalMesh<T>,
) -> T {
    let mut acc = T::zero();
    for &p in &mesh.points {
        acc = acc + (truth.evaluate(p) - model.predict_mean(p)).abs();
    }
    acc
}

fn resolve_kernel<T: Scalar>(
    samples: &[Sample<T>],
    config: &RunConfig<T>,
) -> Result<KernelParams<T>, GpError> {
    if config.tune {
        gp::tune_params(samples, &gp::default_candidate_grid(samples))
    } else {
        Ok(config
            .planner
            .kernel
            .unwrap_or_else(|| KernelParams::for_samples(samples)))
    }
}

/// Runs the full pipeline on a benchmark instance: plan on the initial data,
/// probe the truth at the planned stops, refit, and score both models on the
/// evaluation mesh.
pub fn run_main<T: Scalar>(
    inst: &Instance<T>,
    planner: PlannerKind,
    config: &RunConfig<T>,
) -> Result<RunResult<T>, HarnessError> {
    let truth = inst.truth.as_ref().ok_or(HarnessError::MissingTruth)?;
    let started = Instant::now();

    let params = resolve_kernel(&inst.samples, config)?;
    let planner_config = PlannerConfig {
        kernel: Some(params),
        ..config.planner.clone()
    };
    let task = Task::from_instance(inst);
    let tour = match planner {
        PlannerKind::Orienteering => planner::plan_orienteering(&task, &planner_config)?,
        PlannerKind::GridBaseline => planner::plan_grid_baseline(&task, &planner_config)?,
    };

    let mesh = build_mesh(&inst.surface, inst.mesh_step)?;
    let initial_model = gp::fit(&inst.samples, &params)?;
    let initial_delta = error_delta(&initial_model, truth, &mesh);

    // Only now is the truth consulted: reveal it at the planned stops.
    let mut data = inst.samples.clone();
    for &stop in tour.stops() {
        data.push(Sample::new(stop.x, stop.y, truth.evaluate(stop)));
    }
    let final_model = gp::fit(&data, &params)?;

    let mut residuals = Vec::with_capacity(mesh.points.len());
    let mut final_delta = T::zero();
    for &p in &mesh.points {
        let abs_error = (truth.evaluate(p) - final_model.predict_mean(p)).abs();
        residuals.push(Residual {
            x: p.x,
            y: p.y,
            abs_error,
        });
        final_delta = final_delta + abs_error;
    }

    Ok(RunResult {
        tour,
        initial_delta,
        final_delta,
        residuals,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

/// One line of a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub enum ComparisonRow<T> {
    Scored {
        name: String,
        initial: T,
        grid: T,
        orienteering: T,
    },
    /// The instance failed in one of the pipelines; the batch carries on.
    Failed { name: String, message: String },
}

/// Win tallies and per-instance deltas for a batch of instances.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable<T> {
    pub rows: Vec<ComparisonRow<T>>,
    pub grid_wins: u32,
    pub orienteering_wins: u32,
}

fn compare_one<T: Scalar>(
    name: &str,
    inst: &Instance<T>,
    config: &RunConfig<T>,
) -> ComparisonRow<T> {
    let grid_run = run_main(inst, PlannerKind::GridBaseline, config);
    let orient_run = run_main(inst, PlannerKind::Orienteering, config);
    match (grid_run, orient_run) {
        (Ok(g), Ok(o)) => ComparisonRow::Scored {
            name: name.to_string(),
            initial: g.initial_delta,
            grid: g.final_delta,
            orienteering: o.final_delta,
        },
        (Err(e), _) | (_, Err(e)) => ComparisonRow::Failed {
            name: name.to_string(),
            message: e.to_string(),
        },
    }
}

/// Runs both planners on every instance and tallies wins by strictly
/// smaller final error; ties credit neither side. Rows keep the input
/// order. With `jobs > 1` instances run on that many threads; aggregation
/// is order-preserving, so the result is identical either way.
pub fn compare<T: Scalar>(
    instances: &[(String, Instance<T>)],
    config: &RunConfig<T>,
    jobs: usize,
) -> ComparisonTable<T> {
    let jobs = jobs.max(1).min(instances.len().max(1));
    let mut rows: Vec<Option<ComparisonRow<T>>> = vec![None; instances.len()];

    if jobs <= 1 {
        for (slot, (name, inst)) in rows.iter_mut().zip(instances) {
            *slot = Some(compare_one(name, inst, config));
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let indexed: Vec<(usize, ComparisonRow<T>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|_| {
                    scope.spawn(|| {
                        let mut local = Vec::new();
                        loop {
                            let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                            if i >= instances.len() {
                                break;
                            }
                            let (name, inst) = &instances[i];
                            local.push((i, compare_one(name, inst, config)));
                        }
                        local
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("comparison worker panicked"))
                .collect()
        });
        for (i, row) in indexed {
            rows[i] = Some(row);
        }
    }

    let rows: Vec<ComparisonRow<T>> = rows.into_iter().map(|r| r.unwrap()).collect();
    let mut grid_wins = 0;
    let mut orienteering_wins = 0;
    for row in &rows {
        if let ComparisonRow::Scored {
            grid, orienteering, ..
        } = row
        {
            if grid < orienteering {
                grid_wins += 1;
            } else if orienteering < grid {
                orienteering_wins += 1;
            }
        }
    }
    ComparisonTable {
        rows,
        grid_wins,
        orienteering_wins,
    }
}

/// What a heatmap renders; each variant carries the inputs it needs.
#[derive(Debug, Clone, Copy)]
pub enum HeatmapSource<'a, T> {
    /// The ground truth itself.
    Truth(&'a TrueFunction<T>),
    /// Posterior mean of a fitted model.
    Mean(&'a GpModel<T>),
    /// Posterior standard deviation of a fitted model.
    Std(&'a GpModel<T>),
    /// Absolute error of a fitted model against the truth.
    AbsError(&'a GpModel<T>, &'a TrueFunction<T>),
}

/// Renders an `x,y,value` CSV over the mesh of the given step, row-major,
/// full-precision decimals.
pub fn emit_heatmap<T: Scalar>(
    source: HeatmapSource<'_, T>,
    surface: &Surface<T>,
    step: T,
) -> Result<String, InstanceError> {
    let mesh = build_mesh(surface, step)?;
    let mut out = String::from("x,y,value\n");
    for &p in &mesh.points {
        let value = match source {
            HeatmapSource::Truth(truth) => truth.evaluate(p),
            HeatmapSource::Mean(model) => model.predict_mean(p),
            HeatmapSource::Std(model) => model.predict_std(p),
            HeatmapSource::AbsError(model, truth) => {
                (truth.evaluate(p) - model.predict_mean(p)).abs()
            }
        };
        out.push_str(&format!("{},{},{}\n", p.x, p.y, value));
    }
    Ok(out)
}

/// Renders the comparison results stream: a header, one row per instance
/// and a trailing `wins` summary line.
pub fn render_comparison_csv<T: Scalar>(table: &ComparisonTable<T>) -> String {
    let mut out = String::from("instance,initial,grid,orienteering\n");
    for row in &table.rows {
        match row {
            ComparisonRow::Scored {
                name,
                initial,
                grid,
                orienteering,
            } => {
                out.push_str(&format!("{name},{initial},{grid},{orienteering}\n"));
            }
            ComparisonRow::Failed { name, message } => {
                let clean = message.replace(',', ";");
                out.push_str(&format!("{name},failed: {clean}\n"));
            }
        }
    }
    out.push_str(&format!(
        "wins,{},{}\n",
        table.grid_wins, table.orienteering_wins
    ));
    out
}

/// Renders a tour as a `duration` line followed by `order,x,y` rows.
pub fn render_tour_csv<T: Scalar>(tour: &Tour<T>) -> String {
    let mut out = format!("duration,{}\n", tour.duration());
    out.push_str("order,x,y\n");
    for (i, p) in tour.stops().iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", i, p.x, p.y));
    }
    out
}

/// Renders a run summary; deliberately excludes wall time so identical
/// invocations produce byte-identical files.
pub fn render_run_csv<T: Scalar>(planner: PlannerKind, result: &RunResult<T>) -> String {
    format!(
        "planner,{}\ninitial_delta,{}\nfinal_delta,{}\nstops,{}\nduration,{}\n",
        planner.name(),
        result.initial_delta,
        result.final_delta,
        result.tour.len(),
        result.tour.duration()
    )
}
