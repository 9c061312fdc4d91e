//! The shipped benchmark suite: ten named ground-truth surfaces g1 to g10
//! and the standard initial-data layouts.
//!
//! The surfaces progress from a single broad bump (g1) to ten bumps with
//! spreads down to 0.03 (g10): the first half is relatively smooth, the
//! second half increasingly spiky, with g7 carrying one tall, steep peak
//! that few samples will ever hit. Each surface ships as instance files in
//! six variants: 16, 49 or 100 initial samples, on the interior grid or at
//! seeded random positions.

use crate::geom::Point;
use crate::instance::{
    generate_grid_instance, generate_random_instance, Instance, InstanceConfig, InstanceError,
    MixtureComponent, TrueFunction,
};
use crate::scalar::Scalar;

/// Number of ground-truth surfaces in the suite.
pub const SUITE_SIZE: usize = 10;

/// (weight, center_x, center_y, spread) rows for g1..g10.
const MIXTURES: [&[(f64, f64, f64, f64)]; SUITE_SIZE] = [
    // g1
    &[(85.0, 0.22, 0.74, 0.16)],
    // g2
    &[(70.0, 0.18, 0.28, 0.20), (95.0, 0.72, 0.68, 0.13)],
    // g3
    &[
        (75.0, 0.14, 0.82, 0.17),
        (60.0, 0.52, 0.24, 0.13),
        (90.0, 0.82, 0.78, 0.11),
    ],
    // g4
    &[
        (65.0, 0.20, 0.20, 0.15),
        (80.0, 0.26, 0.78, 0.12),
        (70.0, 0.70, 0.30, 0.13),
        (95.0, 0.78, 0.82, 0.10),
    ],
    // g5
    &[
        (60.0, 0.12, 0.50, 0.14),
        (85.0, 0.34, 0.16, 0.12),
        (75.0, 0.50, 0.82, 0.11),
        (65.0, 0.68, 0.46, 0.10),
        (90.0, 0.88, 0.14, 0.09),
    ],
    // g6
    &[
        (70.0, 0.10, 0.16, 0.12),
        (60.0, 0.16, 0.68, 0.10),
        (85.0, 0.40, 0.40, 0.09),
        (75.0, 0.56, 0.86, 0.08),
        (65.0, 0.76, 0.20, 0.10),
        (95.0, 0.86, 0.62, 0.07),
    ],
    // g7: the third component is a tall, steep peak.
    &[
        (55.0, 0.12, 0.36, 0.11),
        (70.0, 0.20, 0.86, 0.09),
        (110.0, 0.63, 0.37, 0.05),
        (60.0, 0.44, 0.60, 0.08),
        (80.0, 0.48, 0.12, 0.10),
        (65.0, 0.82, 0.84, 0.07),
        (90.0, 0.90, 0.40, 0.09),
    ],
    // g8
    &[
        (60.0, 0.08, 0.62, 0.09),
        (75.0, 0.14, 0.14, 0.08),
        (105.0, 0.30, 0.42, 0.05),
        (65.0, 0.36, 0.88, 0.07),
        (70.0, 0.54, 0.22, 0.06),
        (55.0, 0.62, 0.64, 0.08),
        (100.0, 0.80, 0.12, 0.05),
        (85.0, 0.88, 0.86, 0.07),
    ],
    // g9
    &[
        (65.0, 0.10, 0.30, 0.08),
        (55.0, 0.12, 0.84, 0.07),
        (75.0, 0.30, 0.12, 0.06),
        (95.0, 0.34, 0.58, 0.05),
        (60.0, 0.50, 0.36, 0.07),
        (110.0, 0.58, 0.88, 0.04),
        (70.0, 0.68, 0.14, 0.06),
        (80.0, 0.82, 0.50, 0.05),
        (90.0, 0.90, 0.90, 0.07),
    ],
    // g10: the fourth component has the narrowest spread of the suite.
    &[
        (60.0, 0.06, 0.52, 0.07),
        (70.0, 0.12, 0.10, 0.06),
        (80.0, 0.20, 0.76, 0.05),
        (115.0, 0.33, 0.30, 0.03),
        (65.0, 0.42, 0.92, 0.06),
        (75.0, 0.50, 0.54, 0.04),
        (90.0, 0.62, 0.12, 0.05),
        (55.0, 0.70, 0.74, 0.04),
        (85.0, 0.84, 0.34, 0.06),
        (100.0, 0.90, 0.88, 0.05),
    ],
];

/// Ground truth `g<index>` for `index` in `1..=10`.
pub fn mixture<T: Scalar>(index: usize) -> Option<TrueFunction<T>> {
    let rows = MIXTURES.get(index.checked_sub(1)?)?;
    let components = rows
        .iter()
        .map(|&(w, cx, cy, spread)| MixtureComponent {
            weight: T::of(w),
            center: Point::new(T::of(cx), T::of(cy)),
            spread: T::of(spread),
        })
        .collect();
    Some(TrueFunction::new(components).expect("suite mixtures are valid"))
}

/// Name of the `index`-th surface, e.g. `g3`.
pub fn mixture_name(index: usize) -> String {
    format!("g{index}")
}

/// Initial-data layout of a suite variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `side * side` samples on the interior grid.
    Grid { side: usize },
    /// `count` samples at seeded random positions.
    Random { count: usize },
}

impl Layout {
    pub fn sample_count(self) -> usize {
        match self {
            Layout::Grid { side } => side * side,
            Layout::Random { count } => count,
        }
    }
}

/// The six shipped variants, as (directory name, layout).
pub const SUITE_VARIANTS: [(&str, Layout); 6] = [
    ("16grid", Layout::Grid { side: 4 }),
    ("16random", Layout::Random { count: 16 }),
    ("49grid", Layout::Grid { side: 7 }),
    ("49random", Layout::Random { count: 49 }),
    ("100grid", Layout::Grid { side: 10 }),
    ("100random", Layout::Random { count: 100 }),
];

/// Seed of the random variant with `count` samples of surface `index`.
pub fn suite_seed(count: usize, index: usize) -> u64 {
    (count as u64) * 1000 + index as u64
}

/// File name of one suite instance, e.g. `g3_49random.inst`.
pub fn suite_file_name(index: usize, variant: &str) -> String {
    format!("g{index}_{variant}.inst")
}

/// Builds one suite instance with the default benchmark configuration.
pub fn suite_instance<T: Scalar>(
    index: usize,
    layout: Layout,
) -> Result<Instance<T>, InstanceError> {
    let truth = mixture::<T>(index).ok_or(InstanceError::Validation {
        field: "truth",
        message: format!("no such suite surface g{index}; valid indices are 1..=10"),
    })?;
    let config = InstanceConfig::default();
    match layout {
        Layout::Grid { side } => generate_grid_instance(&truth, side, &config),
        Layout::Random { count } => {
            generate_random_instance(&truth, count, suite_seed(count, index), &config)
        }
    }
}
