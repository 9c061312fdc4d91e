//! Gaussian-process regression with an isotropic squared-exponential kernel.
//!
//! The posterior mean is the estimator for resource levels; the posterior
//! standard deviation is the attractiveness indicator that drives probing
//! decisions. Fitting assembles the Gram matrix
//! `K + (noise^2 + jitter) * I`, factors it as `L * L^T`, and stores `L`
//! together with the weight vector `alpha = (K + (noise^2 + jitter) I)^-1 z`,
//! after which mean queries cost `O(m)` and variance queries `O(m^2)`.

use thiserror::Error;

use crate::geom::Point;
use crate::instance::Sample;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GpError {
    #[error("cannot fit a model on an empty sample set")]
    EmptyTrainingSet,
    #[error("invalid kernel parameter {field}: {message}")]
    InvalidParams {
        field: &'static str,
        message: &'static str,
    },
    #[error(
        "samples {first} and {second} share coordinates but have different values; \
         with zero noise the model is degenerate"
    )]
    DuplicatePoints { first: usize, second: usize },
    #[error(
        "Cholesky factorization failed at pivot {pivot}; the Gram matrix is numerically \
         singular — consider raising jitter"
    )]
    Factorization { pivot: usize },
    #[error("no hyperparameter candidate produced a usable factorization")]
    AllCandidatesFailed,
}

/// Hyperparameters of the squared-exponential kernel
/// `k(p, q) = amplitude^2 * exp(-|p - q|^2 / (2 * length_scale^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams<T> {
    /// Prior signal standard deviation.
    pub amplitude: T,
    /// Correlation length of the kernel.
    pub length_scale: T,
    /// Observation noise standard deviation.
    pub noise: T,
    /// Numerical regularizer added to the Gram diagonal.
    pub jitter: T,
}

impl<T: Scalar> KernelParams<T> {
    pub fn new(amplitude: T, length_scale: T, noise: T, jitter: T) -> Result<Self, GpError> {
        let p = KernelParams {
            amplitude,
            length_scale,
            noise,
            jitter,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GpError> {
        if !self.amplitude.is_finite() || !(self.amplitude > T::zero()) {
            return Err(GpError::InvalidParams {
                field: "amplitude",
                message: "must be finite and > 0",
            });
        }
        if !self.length_scale.is_finite() || !(self.length_scale > T::zero()) {
            return Err(GpError::InvalidParams {
                field: "length_scale",
                message: "must be finite and > 0",
            });
        }
        if !self.noise.is_finite() || !(self.noise >= T::zero()) {
            return Err(GpError::InvalidParams {
                field: "noise",
                message: "must be finite and >= 0",
            });
        }
        if !self.jitter.is_finite() || !(self.jitter >= T::zero()) {
            return Err(GpError::InvalidParams {
                field: "jitter",
                message: "must be finite and >= 0",
            });
        }
        Ok(())
    }

    /// Default hyperparameters for a data set: amplitude equal to the sample
    /// standard deviation of the observed values (1 when degenerate), length
    /// scale 0.2, zero noise, jitter 1e-8.
    pub fn for_samples(samples: &[Sample<T>]) -> Self {
        KernelParams {
            amplitude: sample_std(samples),
            length_scale: T::of(0.2),
            noise: T::zero(),
            jitter: T::of(1e-8),
        }
    }
}

fn sample_std<T: Scalar>(samples: &[Sample<T>]) -> T {
    let m = samples.len();
    if m < 2 {
        return T::one();
    }
    let count = T::of(m as f64);
    let mean = samples.iter().map(|s| s.z).sum::<T>() / count;
    let var = samples
        .iter()
        .map(|s| (s.z - mean) * (s.z - mean))
        .sum::<T>()
        / (count - T::one());
    let std = var.sqrt();
    if std.is_finite() && std > T::zero() {
        std
    } else {
        T::one()
    }
}

/// Squared-exponential covariance between two points.
pub fn kernel<T: Scalar>(params: &KernelParams<T>, p: Point<T>, q: Point<T>) -> T {
    let two = T::of(2.0);
    let ell = params.length_scale;
    params.amplitude * params.amplitude * (-p.dist_sq(q) / (two * ell * ell)).exp()
}

/// A fitted Gaussian-process model. Immutable after construction; queries
/// are pure and safe to run concurrently.
#[derive(Debug, Clone)]
pub struct GpModel<T> {
    params: KernelParams<T>,
    train_points: Vec<Point<T>>,
    /// Lower Cholesky factor of `K + (noise^2 + jitter) I`, row-major m x m.
    lower: Vec<T>,
    /// `alpha = (K + (noise^2 + jitter) I)^-1 z`.
    weights: Vec<T>,
}

/// In-place lower Cholesky factorization of a row-major symmetric matrix.
/// Only the lower triangle of the input is read; the strict upper triangle
/// of the output is zeroed. Fails on a non-positive pivot.
fn cholesky_lower_in_place<T: Scalar>(a: &mut [T], m: usize) -> Result<(), usize> {
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            let l = a[j * m + k];
            d = d - l * l;
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(j);
        }
        let diag = d.sqrt();
        a[j * m + j] = diag;
        for i in (j + 1)..m {
            let mut s = a[i * m + j];
            for k in 0..j {
                s = s - a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = s / diag;
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            a[i * m + j] = T::zero();
        }
    }
    Ok(())
}

/// Solves `L v = b` for lower-triangular `L`.
fn forward_solve<T: Scalar>(lower: &[T], m: usize, b: &mut [T]) {
    for i in 0..m {
        let mut s = b[i];
        for k in 0..i {
            s = s - lower[i * m + k] * b[k];
        }
        b[i] = s / lower[i * m + i];
    }
}

/// Solves `L^T v = b` for lower-triangular `L`.
fn backward_solve<T: Scalar>(lower: &[T], m: usize, b: &mut [T]) {
    for i in (0..m).rev() {
        let mut s = b[i];
        for k in (i + 1)..m {
            s = s - lower[k * m + i] * b[k];
        }
        b[i] = s / lower[i * m + i];
    }
}

/// Fits a model: assembles the Gram matrix, factors it, and solves for the
/// prediction weights. With zero noise, coincident samples with different
/// values are rejected up front as a distinct degeneracy.
pub fn fit<T: Scalar>(
    samples: &[Sample<T>],
    params: &KernelParams<T>,
) -> Result<GpModel<T>, GpError> {
    params.validate()?;
    let m = samples.len();
    if m == 0 {
        return Err(GpError::EmptyTrainingSet);
    }
    if params.noise == T::zero() {
        for i in 0..m {
            for j in (i + 1)..m {
                if samples[i].x == samples[j].x
                    && samples[i].y == samples[j].y
                    && samples[i].z != samples[j].z
                {
                    return Err(GpError::DuplicatePoints {
                        first: i,
                        second: j,
                    });
                }
            }
        }
    }

    let points: Vec<Point<T>> = samples.iter().map(|s| s.point()).collect();
    let ridge = params.noise * params.noise + params.jitter;
    let mut gram = vec![T::zero(); m * m];
    for i in 0..m {
        for j in 0..=i {
            let k = kernel(params, points[i], points[j]);
            gram[i * m + j] = if i == j { k + ridge } else { k };
        }
    }
    cholesky_lower_in_place(&mut gram, m).map_err(|pivot| GpError::Factorization { pivot })?;

    let mut weights: Vec<T> = samples.iter().map(|s| s.z).collect();
    forward_solve(&gram, m, &mut weights);
    backward_solve(&gram, m, &mut weights);

    Ok(GpModel {
        params: *params,
        train_points: points,
        lower: gram,
        weights,
    })
}

impl<T: Scalar> GpModel<T> {
    pub fn params(&self) -> &KernelParams<T> {
        &self.params
    }

    pub fn train_points(&self) -> &[Point<T>] {
        &self.train_points
    }

    pub fn len(&self) -> usize {
        self.train_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_points.is_empty()
    }

    /// Diagonal of the Cholesky factor; strictly positive by construction.
    pub fn lower_diagonal(&self) -> impl Iterator<Item = T> + '_ {
        let m = self.len();
        (0..m).map(move |i| self.lower[i * m + i])
    }

    fn kernel_vector(&self, p: Point<T>) -> Vec<T> {
        self.train_points
            .iter()
            .map(|&q| kernel(&self.params, p, q))
            .collect()
    }

    /// Posterior mean at `p`: `k(p, .)^T alpha`.
    pub fn predict_mean(&self, p: Point<T>) -> T {
        let mut acc = T::zero();
        for (k, w) in self.kernel_vector(p).into_iter().zip(&self.weights) {
            acc = acc + k * *w;
        }
        acc
    }

    /// Posterior standard deviation at `p`:
    /// `sqrt(max(0, k(p,p) - |L^-1 k(p, .)|^2))`. Tiny negative round-off is
    /// clamped to zero before the square root.
    pub fn predict_std(&self, p: Point<T>) -> T {
        let m = self.len();
        let mut v = self.kernel_vector(p);
        forward_solve(&self.lower, m, &mut v);
        let mut explained = T::zero();
        for x in &v {
            explained = explained + *x * *x;
        }
        let prior = self.params.amplitude * self.params.amplitude;
        (prior - explained).max(T::zero()).sqrt()
    }
}

/// Log marginal likelihood of `samples` under `params`:
/// `-1/2 z^T alpha - sum_i log L_ii - (m/2) log 2*pi`.
pub fn log_marginal_likelihood<T: Scalar>(
    samples: &[Sample<T>],
    params: &KernelParams<T>,
) -> Result<T, GpError> {
    let model = fit(samples, params)?;
    let half = T::of(0.5);
    let mut quad = T::zero();
    for (s, w) in samples.iter().zip(&model.weights) {
        quad = quad + s.z * *w;
    }
    let mut log_det_half = T::zero();
    for d in model.lower_diagonal() {
        log_det_half = log_det_half + d.ln();
    }
    let m = T::of(samples.len() as f64);
    let log_two_pi = T::of(std::f64::consts::TAU).ln();
    Ok(-half * quad - log_det_half - half * m * log_two_pi)
}

/// Picks the candidate with the highest log marginal likelihood; candidates
/// that fail to factorize are skipped, and ties keep the earliest candidate.
pub fn tune_params<T: Scalar>(
    samples: &[Sample<T>],
    candidates: &[KernelParams<T>],
) -> Result<KernelParams<T>, GpError> {
    let mut best: Option<(T, KernelParams<T>)> = None;
    for cand in candidates {
        let Ok(value) = log_marginal_likelihood(samples, cand) else {
            continue;
        };
        match &best {
            Some((incumbent, _)) if !(value > *incumbent) => {}
            _ => best = Some((value, *cand)),
        }
    }
    best.map(|(_, p)| p).ok_or(GpError::AllCandidatesFailed)
}

/// Candidate grid used by `--tune`: length scales spanning coarse to fine
/// around the 0.2 default, amplitudes at 0.5x/1x/2x the sample standard
/// deviation, zero noise, jitter 1e-8.
pub fn default_candidate_grid<T: Scalar>(samples: &[Sample<T>]) -> Vec<KernelParams<T>> {
    let base = sample_std(samples);
    let mut out = Vec::new();
    for &ell in &[0.05, 0.1, 0.15, 0.2, 0.3, 0.5] {
        for &scale in &[1.0, 0.5, 2.0] {
            out.push(KernelParams {
                amplitude: base * T::of(scale),
                length_scale: T::of(ell),
                noise: T::zero(),
                jitter: T::of(1e-8),
            });
        }
    }
    out
}
