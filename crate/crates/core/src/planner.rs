//! Probe-trip planners.
//!
//! The greedy orienteering planner alternates between assessing the whole
//! surface with a Gaussian process and growing the trip: it pops the most
//! attractive grid point (highest posterior standard deviation), rebuilds
//! the best tour through the chosen stops, keeps it while the budget holds,
//! and simulates the probe with the current posterior mean so the next
//! assessment already accounts for the planned visit. A simple grid-search
//! planner serves as the comparison baseline.

use thiserror::Error;

use crate::geom::Point;
use crate::gp::{self, GpError, GpModel, KernelParams};
use crate::instance::{Instance, Sample, Surface};
use crate::scalar::Scalar;
use crate::tour::{self, Tour, TourError, DEFAULT_EXACT_THRESHOLD};

/// Baseline grid-density search stops here even when every candidate grid
/// keeps being excluded by existing data; see `plan_grid_baseline`.
const BASELINE_MAX_SIDE: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("planning requires at least one initial sample")]
    NoInitialData,
    #[error("invalid planner config {field}: {message}")]
    InvalidConfig {
        field: &'static str,
        message: &'static str,
    },
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Tour(#[from] TourError),
}

/// Knobs of both planners.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig<T> {
    /// Assessment grid resolution along x: the grid has `grid_k + 1` columns.
    pub grid_k: usize,
    /// Assessment grid resolution along y: the grid has `grid_l + 1` rows.
    pub grid_l: usize,
    /// Minimum distance from every existing datum and chosen stop for a
    /// candidate to be accepted.
    pub exclusion_radius: T,
    /// Kernel hyperparameters; `None` derives defaults from the data being
    /// fitted (see [`KernelParams::for_samples`]).
    pub kernel: Option<KernelParams<T>>,
    /// Problem size up to which the exact tour solver may be consulted.
    pub exact_threshold: usize,
}

impl<T: Scalar> Default for PlannerConfig<T> {
    fn default() -> Self {
        PlannerConfig {
            grid_k: 20,
            grid_l: 20,
            exclusion_radius: T::of(1e-6),
            kernel: None,
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
        }
    }
}

impl<T: Scalar> PlannerConfig<T> {
    pub fn validate(&self) -> Result<(), PlanError> {
        if self.grid_k < 1 {
            return Err(PlanError::InvalidConfig {
                field: "grid_k",
                message: "must be >= 1",
            });
        }
        if self.grid_l < 1 {
            return Err(PlanError::InvalidConfig {
                field: "grid_l",
                message: "must be >= 1",
            });
        }
        if !self.exclusion_radius.is_finite() || !(self.exclusion_radius >= T::zero()) {
            return Err(PlanError::InvalidConfig {
                field: "exclusion_radius",
                message: "must be finite and >= 0",
            });
        }
        Ok(())
    }

    fn resolve_kernel(&self, samples: &[Sample<T>]) -> KernelParams<T> {
        self.kernel
            .unwrap_or_else(|| KernelParams::for_samples(samples))
    }
}

/// One assessed grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEntry<T> {
    /// Posterior standard deviation at the node.
    pub sigma: T,
    pub point: Point<T>,
}

/// Attractiveness assessment over a `(K+1) x (L+1)` lattice covering the
/// surface, sorted ascending by sigma (ties by x, then y) so the most
/// attractive node is last.
#[derive(Debug, Clone, PartialEq)]
pub struct AssessmentGrid<T> {
    pub resolution_k: usize,
    pub resolution_l: usize,
    pub entries: Vec<GridEntry<T>>,
}

fn grid_nodes<T: Scalar>(surface: &Surface<T>, k: usize, l: usize) -> Vec<Point<T>> {
    let dx = surface.width() / T::of(k as f64);
    let dy = surface.height() / T::of(l as f64);
    let mut nodes = Vec::with_capacity((k + 1) * (l + 1));
    for i in 0..=k {
        let x = surface.x_min + dx * T::of(i as f64);
        for j in 0..=l {
            let y = surface.y_min + dy * T::of(j as f64);
            nodes.push(Point::new(x, y));
        }
    }
    nodes
}

fn assess_with_model<T: Scalar>(
    model: &GpModel<T>,
    surface: &Surface<T>,
    k: usize,
    l: usize,
) -> AssessmentGrid<T> {
    let mut entries: Vec<GridEntry<T>> = grid_nodes(surface, k, l)
        .into_iter()
        .map(|point| GridEntry {
            sigma: model.predict_std(point),
            point,
        })
        .collect();
    entries.sort_by(|a, b| {
        a.sigma
            .partial_cmp(&b.sigma)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.point.lex_cmp(b.point))
    });
    AssessmentGrid {
        resolution_k: k,
        resolution_l: l,
        entries,
    }
}

/// Fits a model on `data` and evaluates its posterior standard deviation on
/// the assessment lattice.
pub fn assess<T: Scalar>(
    data: &[Sample<T>],
    surface: &Surface<T>,
    config: &PlannerConfig<T>,
) -> Result<AssessmentGrid<T>, PlanError> {
    config.validate()?;
    if data.is_empty() {
        return Err(PlanError::NoInitialData);
    }
    let params = config.resolve_kernel(data);
    let model = gp::fit(data, &params)?;
    Ok(assess_with_model(
        &model,
        surface,
        config.grid_k,
        config.grid_l,
    ))
}

/// The slice of an instance a planner is allowed to see: trip parameters
/// and previously known data, never the ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Task<T> {
    pub surface: Surface<T>,
    pub budget: T,
    pub probe_time: T,
    pub speed: T,
    pub depot: Point<T>,
    pub samples: Vec<Sample<T>>,
}

impl<T: Scalar> Task<T> {
    pub fn from_instance(inst: &Instance<T>) -> Self {
        Task {
            surface: inst.surface,
            budget: inst.budget,
            probe_time: inst.probe_time,
            speed: inst.speed,
            depot: inst.depot,
            samples: inst.samples.clone(),
        }
    }
}

impl<T: Scalar> From<&Instance<T>> for Task<T> {
    fn from(inst: &Instance<T>) -> Self {
        Task::from_instance(inst)
    }
}

fn min_dist_sq<T: Scalar>(p: Point<T>, others: impl Iterator<Item = Point<T>>) -> T {
    let mut best = T::infinity();
    for q in others {
        let d = p.dist_sq(q);
        if d < best {
            best = d;
        }
    }
    best
}

/// Greedy orienteering planner; returns the planned tour together with the
/// simulated probes appended to the working data set while planning, in
/// acceptance order.
///
/// When the config leaves the kernel unset, hyperparameters are derived
/// once from the initial data and reused for every refit, so the whole
/// plan is a deterministic function of the task and the config.
pub fn plan_orienteering_traced<T: Scalar>(
    task: &Task<T>,
    config: &PlannerConfig<T>,
) -> Result<(Tour<T>, Vec<Sample<T>>), PlanError> {
    config.validate()?;
    if task.samples.is_empty() {
        return Err(PlanError::NoInitialData);
    }
    let params = config.resolve_kernel(&task.samples);
    let radius_sq = config.exclusion_radius * config.exclusion_radius;

    let mut work: Vec<Sample<T>> = task.samples.clone();
    let mut stops: Vec<Point<T>> = Vec::new();
    let mut simulated: Vec<Sample<T>> = Vec::new();
    let mut accepted = Tour::empty();

    // Each accepted candidate joins the working data and excludes its own
    // node, so the loop cannot run longer than the lattice has nodes.
    let max_rounds = (config.grid_k + 1) * (config.grid_l + 1);
    for _ in 0..max_rounds {
        let model = gp::fit(&work, &params)?;
        let grid = assess_with_model(&model, &task.surface, config.grid_k, config.grid_l);

        // Pop the most attractive node that is not within the exclusion
        // radius of any datum or chosen stop; skip over excluded ones.
        let candidate = grid.entries.iter().rev().find_map(|entry| {
            let near_data = min_dist_sq(entry.point, work.iter().map(|s| s.point()));
            let near_stops = min_dist_sq(entry.point, stops.iter().copied());
            if near_data < radius_sq || near_stops < radius_sq {
                None
            } else {
                Some(entry.point)
            }
        });
        let Some(candidate) = candidate else { break };

        let mut points = stops.clone();
        points.push(candidate);
        let (tour, feasible) = tour::best_tour(
            &points,
            task.depot,
            task.speed,
            task.probe_time,
            task.budget,
            config.exact_threshold,
        )?;
        if !feasible {
            break;
        }
        stops = tour.stops().to_vec();
        accepted = tour;

        // Simulate the probe: pretend the current posterior mean is the
        // observed value so the next refit collapses uncertainty here.
        let z = model.predict_mean(candidate);
        let sample = Sample::new(candidate.x, candidate.y, z);
        work.push(sample);
        simulated.push(sample);
    }

    Ok((accepted, simulated))
}

/// Greedy orienteering planner (see [`plan_orienteering_traced`]).
pub fn plan_orienteering<T: Scalar>(
    task: &Task<T>,
    config: &PlannerConfig<T>,
) -> Result<Tour<T>, PlanError> {
    plan_orienteering_traced(task, config).map(|(tour, _)| tour)
}

/// Baseline: probes the densest regular interior grid that still fits the
/// budget, skipping nodes within the exclusion radius of existing data.
/// The side length grows from 1 until the tour goes over budget and the
/// last feasible tour is returned; if even side 1 is infeasible the empty
/// tour comes back.
pub fn plan_grid_baseline<T: Scalar>(
    task: &Task<T>,
    config: &PlannerConfig<T>,
) -> Result<Tour<T>, PlanError> {
    config.validate()?;
    if task.samples.is_empty() {
        return Err(PlanError::NoInitialData);
    }
    let radius_sq = config.exclusion_radius * config.exclusion_radius;
    let mut best = Tour::empty();

    for side in 1..=BASELINE_MAX_SIDE {
        let denom = T::of((side + 1) as f64);
        let mut points = Vec::with_capacity(side * side);
        for i in 1..=side {
            let x = task.surface.x_min + task.surface.width() * (T::of(i as f64) / denom);
            for j in 1..=side {
                let y = task.surface.y_min + task.surface.height() * (T::of(j as f64) / denom);
                let p = Point::new(x, y);
                if min_dist_sq(p, task.samples.iter().map(|s| s.point())) >= radius_sq {
                    points.push(p);
                }
            }
        }
        // Probe time alone already decides infeasibility; skip the tour
        // construction once it does.
        let probes = task.probe_time * T::of(points.len() as f64);
        if !(probes < task.budget) {
            break;
        }
        let (tour, feasible) = tour::best_tour(
            &points,
            task.depot,
            task.speed,
            task.probe_time,
            task.budget,
            config.exact_threshold,
        )?;
        if !feasible {
            break;
        }
        best = tour;
    }
    Ok(best)
}
