//! Problem data model: the surveyed surface, observed samples, synthetic
//! ground-truth surfaces, the evaluation mesh, and the on-disk instance
//! format.
//!
//! # Instance file format
//!
//! Line-oriented UTF-8 text, tokens separated by whitespace, `#` starts a
//! comment. Sections appear in this fixed order:
//!
//! ```text
//! surface <x_min> <x_max> <y_min> <y_max>
//! budget <T>
//! probe_time <t>
//! speed <s>
//! depot <x> <y>
//! mesh_step <step>
//! truth_component <weight> <cx> <cy> <spread>    # zero or more
//! sample <x> <y> <z>                              # zero or more
//! ```
//!
//! Reals are written as the shortest decimal that round-trips the binary
//! value, so `parse` after `serialize` reproduces every field bit-exactly.

use thiserror::Error;

use crate::geom::Point;
use crate::rng::SplitMix64;
use crate::scalar::Scalar;

/// Absolute tolerance used when checking declared sample values against a
/// declared ground truth.
const TRUTH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    /// Malformed instance text.
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    /// A structurally well-formed value violates an invariant.
    #[error("invalid {field}: {message}")]
    Validation {
        field: &'static str,
        message: String,
    },
    /// A declared sample value disagrees with the declared ground truth.
    #[error(
        "sample {index} at ({x}, {y}): declared z = {declared} but the declared truth evaluates to {expected}"
    )]
    TruthMismatch {
        index: usize,
        x: String,
        y: String,
        declared: String,
        expected: String,
    },
}

fn validation(field: &'static str, message: impl Into<String>) -> InstanceError {
    InstanceError::Validation {
        field,
        message: message.into(),
    }
}

/// Axis-aligned rectangular surface under study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surface<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
}

impl<T: Scalar> Surface<T> {
    pub fn new(x_min: T, x_max: T, y_min: T, y_max: T) -> Result<Self, InstanceError> {
        let s = Surface {
            x_min,
            x_max,
            y_min,
            y_max,
        };
        s.validate()?;
        Ok(s)
    }

    /// The unit square `[0,1] x [0,1]`, the default study area.
    pub fn unit() -> Self {
        Surface {
            x_min: T::zero(),
            x_max: T::one(),
            y_min: T::zero(),
            y_max: T::one(),
        }
    }

    pub fn width(&self) -> T {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> T {
        self.y_max - self.y_min
    }

    /// Boundary-inclusive membership test.
    pub fn contains(&self, p: Point<T>) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let all_finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(validation("surface", "bounds must be finite"));
        }
        if !(self.x_min < self.x_max) || !(self.y_min < self.y_max) {
            return Err(validation(
                "surface",
                "must satisfy x_min < x_max and y_min < y_max",
            ));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for Surface<T> {
    fn default() -> Self {
        Surface::unit()
    }
}

/// One observed resource level at a point of the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Sample<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Sample { x, y, z }
    }

    pub fn point(&self) -> Point<T> {
        Point::new(self.x, self.y)
    }
}

/// One isotropic Gaussian bump of a synthetic ground-truth surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent<T> {
    pub weight: T,
    pub center: Point<T>,
    pub spread: T,
}

/// Synthetic ground truth: a sum of isotropic Gaussian bumps,
/// `v(p) = sum_j weight_j * exp(-|p - center_j|^2 / (2 * spread_j^2))`.
///
/// Evaluation is deterministic and noiseless; components are summed in
/// declaration order so values reproduce bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueFunction<T> {
    components: Vec<MixtureComponent<T>>,
}

impl<T: Scalar> TrueFunction<T> {
    pub fn new(components: Vec<MixtureComponent<T>>) -> Result<Self, InstanceError> {
        if components.is_empty() {
            return Err(validation(
                "truth_component",
                "a ground truth needs at least one component",
            ));
        }
        for (i, c) in components.iter().enumerate() {
            if !c.weight.is_finite() || !c.center.is_finite() || !c.spread.is_finite() {
                return Err(validation(
                    "truth_component",
                    format!("component {i} has a non-finite field"),
                ));
            }
            if !(c.spread > T::zero()) {
                return Err(validation(
                    "truth_component",
                    format!("component {i} must have spread > 0"),
                ));
            }
        }
        Ok(TrueFunction { components })
    }

    pub fn components(&self) -> &[MixtureComponent<T>] {
        &self.components
    }

    /// True resource level at `p`; defined on the whole plane.
    pub fn evaluate(&self, p: Point<T>) -> T {
        let two = T::of(2.0);
        let mut acc = T::zero();
        for c in &self.components {
            let d2 = p.dist_sq(c.center);
            acc = acc + c.weight * (-d2 / (two * c.spread * c.spread)).exp();
        }
        acc
    }
}

/// A full problem instance: study area, trip parameters, previously known
/// samples, scoring-mesh resolution and (for benchmarks) the ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    pub surface: Surface<T>,
    /// Upper bound on trip duration, in time units.
    pub budget: T,
    /// Time spent probing at each visited point.
    pub probe_time: T,
    /// Travel speed, distance per time unit.
    pub speed: T,
    /// Start and end location of every trip.
    pub depot: Point<T>,
    /// Previously known observations.
    pub samples: Vec<Sample<T>>,
    /// Step of the square evaluation mesh used for scoring.
    pub mesh_step: T,
    /// Ground truth, present only on benchmark instances.
    pub truth: Option<TrueFunction<T>>,
}

impl<T: Scalar> Instance<T> {
    pub fn validate(&self) -> Result<(), InstanceError> {
        self.surface.validate()?;
        if !self.budget.is_finite() || !(self.budget > T::zero()) {
            return Err(validation("budget", "must be finite and > 0"));
        }
        if !self.probe_time.is_finite() || !(self.probe_time >= T::zero()) {
            return Err(validation("probe_time", "must be finite and >= 0"));
        }
        if !self.speed.is_finite() || !(self.speed > T::zero()) {
            return Err(validation("speed", "must be finite and > 0"));
        }
        if !self.depot.is_finite() || !self.surface.contains(self.depot) {
            return Err(validation("depot", "must lie inside the surface"));
        }
        if !self.mesh_step.is_finite() || !(self.mesh_step > T::zero()) {
            return Err(validation("mesh_step", "must be finite and > 0"));
        }
        if self.mesh_step > self.surface.width() || self.mesh_step > self.surface.height() {
            return Err(validation("mesh_step", "must not exceed the surface sides"));
        }
        for (i, s) in self.samples.iter().enumerate() {
            if !s.point().is_finite() || !s.z.is_finite() {
                return Err(validation(
                    "sample",
                    format!("sample {i} has a non-finite field"),
                ));
            }
            if !self.surface.contains(s.point()) {
                return Err(validation(
                    "sample",
                    format!("sample {i} at ({}, {}) lies outside the surface", s.x, s.y),
                ));
            }
        }
        if let Some(truth) = &self.truth {
            let tol = T::of(TRUTH_TOLERANCE);
            for (i, s) in self.samples.iter().enumerate() {
                let expected = truth.evaluate(s.point());
                if (s.z - expected).abs() > tol {
                    return Err(InstanceError::TruthMismatch {
                        index: i,
                        x: s.x.to_string(),
                        y: s.y.to_string(),
                        declared: s.z.to_string(),
                        expected: expected.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Parses the instance file format; the result is fully validated.
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        parse_instance(text)
    }

    /// Renders the instance file format. `parse(serialize(inst))` reproduces
    /// `inst` exactly.
    pub fn serialize(&self) -> String {
        serialize_instance(self)
    }

    /// Builds the evaluation mesh declared by this instance.
    pub fn mesh(&self) -> Result<EvalMesh<T>, InstanceError> {
        build_mesh(&self.surface, self.mesh_step)
    }

    /// Copy of this instance with the ground truth removed.
    pub fn without_truth(&self) -> Instance<T> {
        Instance {
            truth: None,
            ..self.clone()
        }
    }
}

fn parse_scalar<T: Scalar>(token: &str, line: usize) -> Result<T, InstanceError> {
    token.parse::<T>().map_err(|_| InstanceError::Syntax {
        line,
        message: format!("invalid number `{token}`"),
    })
}

/// Sections of the instance file, in required order.
const HEADER_KEYS: [(&str, usize); 6] = [
    ("surface", 4),
    ("budget", 1),
    ("probe_time", 1),
    ("speed", 1),
    ("depot", 2),
    ("mesh_step", 1),
];

pub fn parse_instance<T: Scalar>(text: &str) -> Result<Instance<T>, InstanceError> {
    let mut header: Vec<Vec<T>> = Vec::with_capacity(HEADER_KEYS.len());
    let mut components: Vec<MixtureComponent<T>> = Vec::new();
    let mut samples: Vec<Sample<T>> = Vec::new();
    // Stages: 0..6 = fixed header keys, 6 = truth components or samples,
    // 7 = samples only.
    let mut stage = 0usize;
    let mut last_line = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(key) = tokens.next() else { continue };
        let values: Vec<&str> = tokens.collect();

        let expect_count = |want: usize| -> Result<(), InstanceError> {
            if values.len() != want {
                Err(InstanceError::Syntax {
                    line,
                    message: format!("`{key}` takes {want} value(s), found {}", values.len()),
                })
            } else {
                Ok(())
            }
        };

        if stage < HEADER_KEYS.len() {
            let (want_key, want_count) = HEADER_KEYS[stage];
            if key != want_key {
                return Err(InstanceError::Syntax {
                    line,
                    message: format!("expected `{want_key}`, found `{key}`"),
                });
            }
            expect_count(want_count)?;
            let parsed = values
                .iter()
                .map(|t| parse_scalar(t, line))
                .collect::<Result<Vec<T>, _>>()?;
            header.push(parsed);
            stage += 1;
        } else {
            match key {
                "truth_component" if stage == 6 => {
                    expect_count(4)?;
                    let w = parse_scalar(values[0], line)?;
                    let cx = parse_scalar(values[1], line)?;
                    let cy = parse_scalar(values[2], line)?;
                    let spread = parse_scalar(values[3], line)?;
                    components.push(MixtureComponent {
                        weight: w,
                        center: Point::new(cx, cy),
                        spread,
                    });
                }
                "truth_component" => {
                    return Err(InstanceError::Syntax {
                        line,
                        message: "`truth_component` must appear before any `sample`".into(),
                    });
                }
                "sample" => {
                    expect_count(3)?;
                    let x = parse_scalar(values[0], line)?;
                    let y = parse_scalar(values[1], line)?;
                    let z = parse_scalar(values[2], line)?;
                    samples.push(Sample::new(x, y, z));
                    stage = 7;
                }
                other => {
                    return Err(InstanceError::Syntax {
                        line,
                        message: format!("unknown key `{other}`"),
                    });
                }
            }
        }
    }

    if stage < HEADER_KEYS.len() {
        return Err(InstanceError::Syntax {
            line: last_line + 1,
            message: format!(
                "unexpected end of file; expected `{}`",
                HEADER_KEYS[stage].0
            ),
        });
    }

    let truth = if components.is_empty() {
        None
    } else {
        Some(TrueFunction::new(components)?)
    };

    let inst = Instance {
        surface: Surface {
            x_min: header[0][0],
            x_max: header[0][1],
            y_min: header[0][2],
            y_max: header[0][3],
        },
        budget: header[1][0],
        probe_time: header[2][0],
        speed: header[3][0],
        depot: Point::new(header[4][0], header[4][1]),
        samples,
        mesh_step: header[5][0],
        truth,
    };
    inst.validate()?;
    Ok(inst)
}

pub fn serialize_instance<T: Scalar>(inst: &Instance<T>) -> String {
    let mut out = String::new();
    let s = &inst.surface;
    out.push_str(&format!(
        "surface {} {} {} {}\n",
        s.x_min, s.x_max, s.y_min, s.y_max
    ));
    out.push_str(&format!("budget {}\n", inst.budget));
    out.push_str(&format!("probe_time {}\n", inst.probe_time));
    out.push_str(&format!("speed {}\n", inst.speed));
    out.push_str(&format!("depot {} {}\n", inst.depot.x, inst.depot.y));
    out.push_str(&format!("mesh_step {}\n", inst.mesh_step));
    if let Some(truth) = &inst.truth {
        for c in truth.components() {
            out.push_str(&format!(
                "truth_component {} {} {} {}\n",
                c.weight, c.center.x, c.center.y, c.spread
            ));
        }
    }
    for sm in &inst.samples {
        out.push_str(&format!("sample {} {} {}\n", sm.x, sm.y, sm.z));
    }
    out
}

/// The lattice of scoring points.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalMesh<T> {
    /// Row-major points: `x` varies slowest, both boundaries included.
    pub points: Vec<Point<T>>,
    pub nx: usize,
    pub ny: usize,
}

/// Number of mesh points along one axis: `floor(span/step + 1e-9) + 1`.
fn axis_count<T: Scalar>(min: T, max: T, step: T) -> usize {
    let steps = ((max - min) / step + T::of(1e-9)).floor();
    steps.to_usize().unwrap_or(0) + 1
}

fn axis_points<T: Scalar>(min: T, max: T, step: T, n: usize) -> Vec<T> {
    let mut xs: Vec<T> = (0..n).map(|i| min + step * T::of(i as f64)).collect();
    // When the step divides the span the last lattice point is the boundary;
    // snap it so the mesh-endpoint invariant holds bit-exactly.
    if let Some(last) = xs.last_mut() {
        let scale = T::one().max(max.abs());
        if (*last - max).abs() <= T::of(1e-9) * scale {
            *last = max;
        }
    }
    xs
}

pub fn build_mesh<T: Scalar>(surface: &Surface<T>, step: T) -> Result<EvalMesh<T>, InstanceError> {
    surface.validate()?;
    if !step.is_finite() || !(step > T::zero()) {
        return Err(validation("mesh_step", "must be finite and > 0"));
    }
    if step > surface.width() || step > surface.height() {
        return Err(validation("mesh_step", "must not exceed the surface sides"));
    }
    let nx = axis_count(surface.x_min, surface.x_max, step);
    let ny = axis_count(surface.y_min, surface.y_max, step);
    let xs = axis_points(surface.x_min, surface.x_max, step, nx);
    let ys = axis_points(surface.y_min, surface.y_max, step, ny);
    let mut points = Vec::with_capacity(nx * ny);
    for &x in &xs {
        for &y in &ys {
            points.push(Point::new(x, y));
        }
    }
    Ok(EvalMesh { points, nx, ny })
}

/// Shared knobs for instance generation; defaults are the benchmark
/// conventions (unit square, budget 100, probe time 1, speed 1, depot at
/// the origin, mesh step 0.01).
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceConfig<T> {
    pub surface: Surface<T>,
    pub budget: T,
    pub probe_time: T,
    pub speed: T,
    pub depot: Point<T>,
    pub mesh_step: T,
}

impl<T: Scalar> Default for InstanceConfig<T> {
    fn default() -> Self {
        InstanceConfig {
            surface: Surface::unit(),
            budget: T::of(100.0),
            probe_time: T::one(),
            speed: T::one(),
            depot: Point::new(T::zero(), T::zero()),
            mesh_step: T::of(0.01),
        }
    }
}

impl<T: Scalar> InstanceConfig<T> {
    fn instance_with(
        &self,
        truth: &TrueFunction<T>,
        samples: Vec<Sample<T>>,
    ) -> Result<Instance<T>, InstanceError> {
        let inst = Instance {
            surface: self.surface,
            budget: self.budget,
            probe_time: self.probe_time,
            speed: self.speed,
            depot: self.depot,
            samples,
            mesh_step: self.mesh_step,
            truth: Some(truth.clone()),
        };
        inst.validate()?;
        Ok(inst)
    }
}

/// Benchmark instance with `side x side` initial samples on the interior
/// grid `{i/(side+1)}`, labeled by the ground truth. `side = 4` places
/// samples at coordinates 0.2, 0.4, 0.6, 0.8 of the unit square.
pub fn generate_grid_instance<T: Scalar>(
    truth: &TrueFunction<T>,
    side: usize,
    config: &InstanceConfig<T>,
) -> Result<Instance<T>, InstanceError> {
    if side == 0 {
        return Err(validation("side", "grid side must be >= 1"));
    }
    let denom = T::of((side + 1) as f64);
    let mut samples = Vec::with_capacity(side * side);
    for i in 1..=side {
        let fx = T::of(i as f64) / denom;
        let x = config.surface.x_min + config.surface.width() * fx;
        for j in 1..=side {
            let fy = T::of(j as f64) / denom;
            let y = config.surface.y_min + config.surface.height() * fy;
            let z = truth.evaluate(Point::new(x, y));
            samples.push(Sample::new(x, y, z));
        }
    }
    config.instance_with(truth, samples)
}

/// Benchmark instance with `count` initial samples uniform on the surface,
/// drawn from a seeded [`SplitMix64`]; the same seed yields the same
/// instance on every platform.
pub fn generate_random_instance<T: Scalar>(
    truth: &TrueFunction<T>,
    count: usize,
    seed: u64,
    config: &InstanceConfig<T>,
) -> Result<Instance<T>, InstanceError> {
    if count == 0 {
        return Err(validation("count", "sample count must be >= 1"));
    }
    let mut rng = SplitMix64::new(seed);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let x = config.surface.x_min + config.surface.width() * rng.next_unit::<T>();
        let y = config.surface.y_min + config.surface.height() * rng.next_unit::<T>();
        let z = truth.evaluate(Point::new(x, y));
        samples.push(Sample::new(x, y, z));
    }
    config.instance_with(truth, samples)
}
