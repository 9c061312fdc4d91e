//! Closed-tour construction and duration accounting.
//!
//! Every trip starts and ends at the depot. Its duration is the closed-walk
//! travel length divided by the speed, plus a fixed probe time per stop;
//! the depot itself is never probed. Feasibility against a budget is always
//! the strict comparison `duration < budget`.

use thiserror::Error;

use crate::geom::Point;
use crate::scalar::Scalar;

/// Hard size limit for the exact solver; memory grows as `n * 2^n`.
pub const HELD_KARP_MAX: usize = 20;

/// Default problem size up to which `best_tour` falls back to the exact
/// solver when the heuristic tour is over budget.
pub const DEFAULT_EXACT_THRESHOLD: usize = 15;

/// Minimum travel-length gain for a 2-opt move to be accepted; guarantees
/// termination through strict decrease.
const TWO_OPT_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TourError {
    #[error("exact solver limited to {limit} points, got {count}")]
    SizeExceedsLimit { count: usize, limit: usize },
    #[error("stops {first} and {second} coincide; tours must not repeat a stop")]
    DuplicateStops { first: usize, second: usize },
    #[error("speed must be > 0")]
    NonPositiveSpeed,
}

/// An ordered trip through probe locations. The depot is implicit: the walk
/// is depot -> stops in order -> depot.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour<T> {
    stops: Vec<Point<T>>,
    duration: T,
}

impl<T: Scalar> Tour<T> {
    /// The trip that never leaves the depot.
    pub fn empty() -> Self {
        Tour {
            stops: Vec::new(),
            duration: T::zero(),
        }
    }

    /// Builds a tour over `stops` in the given order, computing its
    /// duration. Rejects coincident stops and non-positive speeds.
    pub fn new(
        stops: Vec<Point<T>>,
        depot: Point<T>,
        speed: T,
        probe_time: T,
    ) -> Result<Self, TourError> {
        if !(speed > T::zero()) {
            return Err(TourError::NonPositiveSpeed);
        }
        for i in 0..stops.len() {
            for j in (i + 1)..stops.len() {
                if stops[i] == stops[j] {
                    return Err(TourError::DuplicateStops {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        let duration = tour_duration(&stops, depot, speed, probe_time);
        Ok(Tour { stops, duration })
    }

    pub fn stops(&self) -> &[Point<T>] {
        &self.stops
    }

    pub fn duration(&self) -> T {
        self.duration
    }

    pub fn is_empty(&self) -> bool {
        self.stops.is_empty()
    }

    pub fn len(&self) -> usize {
        self.stops.len()
    }
}

/// Travel length of the closed walk depot -> stops -> depot.
pub fn travel_length<T: Scalar>(stops: &[Point<T>], depot: Point<T>) -> T {
    if stops.is_empty() {
        return T::zero();
    }
    let mut total = depot.dist(stops[0]);
    for w in stops.windows(2) {
        total = total + w[0].dist(w[1]);
    }
    total + stops[stops.len() - 1].dist(depot)
}

/// Trip duration: travel length divided by speed plus probe time per stop.
/// An empty stop list costs nothing.
pub fn tour_duration<T: Scalar>(stops: &[Point<T>], depot: Point<T>, speed: T, probe_time: T) -> T {
    debug_assert!(speed > T::zero());
    if stops.is_empty() {
        return T::zero();
    }
    travel_length(stops, depot) / speed + probe_time * T::of(stops.len() as f64)
}

/// Greedy seed order: repeatedly appends the unvisited point nearest the
/// current location, starting from the depot. Distance ties break on lower
/// x, then lower y.
pub fn nearest_neighbor_order<T: Scalar>(points: &[Point<T>], depot: Point<T>) -> Vec<Point<T>> {
    let mut remaining: Vec<Point<T>> = points.to_vec();
    let mut order = Vec::with_capacity(points.len());
    let mut current = depot;
    while !remaining.is_empty() {
        let mut best = 0usize;
        let mut best_d = current.dist_sq(remaining[0]);
        for (i, &p) in remaining.iter().enumerate().skip(1) {
            let d = current.dist_sq(p);
            if d < best_d || (d == best_d && p.lex_cmp(remaining[best]).is_lt()) {
                best = i;
                best_d = d;
            }
        }
        current = remaining.swap_remove(best);
        order.push(current);
    }
    order
}

/// 2-opt improvement on the closed tour with the depot fixed: repeatedly
/// applies the best improving segment reversal until no reversal shortens
/// the travel length by more than a strict threshold. The output never
/// travels farther than the input, and the procedure is idempotent on its
/// own output.
pub fn two_opt_improve<T: Scalar>(order: &[Point<T>], depot: Point<T>) -> Vec<Point<T>> {
    let mut tour: Vec<Point<T>> = order.to_vec();
    let n = tour.len();
    if n < 2 {
        return tour;
    }
    let eps = T::of(TWO_OPT_EPS);
    loop {
        let mut best_delta = T::zero();
        let mut best_move: Option<(usize, usize)> = None;
        for i in 0..n {
            let prev = if i == 0 { depot } else { tour[i - 1] };
            for j in i..n {
                // Reversing the whole stop sequence is a no-op on a closed
                // tour; skip it.
                if i == 0 && j == n - 1 {
                    continue;
                }
                let next = if j == n - 1 { depot } else { tour[j + 1] };
                let delta = prev.dist(tour[j]) + tour[i].dist(next)
                    - prev.dist(tour[i])
                    - tour[j].dist(next);
                if delta < best_delta {
                    best_delta = delta;
                    best_move = Some((i, j));
                }
            }
        }
        match best_move {
            Some((i, j)) if best_delta < -eps => tour[i..=j].reverse(),
            _ => break,
        }
    }
    tour
}

/// Exact closed-tour order by Held-Karp dynamic programming over subsets,
/// `O(n^2 * 2^n)` time and `O(n * 2^n)` memory. Points are canonicalized to
/// lexicographic order first, so the result does not depend on input order.
pub fn held_karp_optimal<T: Scalar>(
    points: &[Point<T>],
    depot: Point<T>,
) -> Result<Vec<Point<T>>, TourError> {
    let n = points.len();
    if n > HELD_KARP_MAX {
        return Err(TourError::SizeExceedsLimit {
            count: n,
            limit: HELD_KARP_MAX,
        });
    }
    if n <= 1 {
        return Ok(points.to_vec());
    }

    let mut pts: Vec<Point<T>> = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(*b));

    let mut dist = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            dist[i * n + j] = pts[i].dist(pts[j]);
        }
    }
    let from_depot: Vec<T> = pts.iter().map(|&p| depot.dist(p)).collect();

    let full = 1usize << n;
    let inf = T::infinity();
    let mut cost = vec![inf; full * n];
    let mut parent = vec![u8::MAX; full * n];
    for i in 0..n {
        cost[(1 << i) * n + i] = from_depot[i];
    }
    for mask in 1..full {
        for last in 0..n {
            if mask & (1 << last) == 0 {
                continue;
            }
            let c = cost[mask * n + last];
            if !(c < inf) {
                continue;
            }
            for next in 0..n {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let cand = c + dist[last * n + next];
                let slot = (mask | (1 << next)) * n + next;
                if cand < cost[slot] {
                    cost[slot] = cand;
                    parent[slot] = last as u8;
                }
            }
        }
    }

    let all = full - 1;
    let mut best_last = 0usize;
    let mut best_total = inf;
    for last in 0..n {
        let total = cost[all * n + last] + from_depot[last];
        if total < best_total {
            best_total = total;
            best_last = last;
        }
    }

    let mut order_idx = Vec::with_capacity(n);
    let mut mask = all;
    let mut last = best_last;
    loop {
        order_idx.push(last);
        let p = parent[mask * n + last];
        mask &= !(1 << last);
        if p == u8::MAX {
            break;
        }
        last = p as usize;
    }
    order_idx.reverse();
    Ok(order_idx.into_iter().map(|i| pts[i]).collect())
}

/// Plans the shortest tour the module can find over `points` and checks it
/// against the budget.
///
/// The nearest-neighbor seed improved by 2-opt is returned immediately when
/// it fits the budget. Otherwise, when the problem is small enough, the
/// exact solver decides feasibility; beyond that size the heuristic tour is
/// returned flagged infeasible.
pub fn best_tour<T: Scalar>(
    points: &[Point<T>],
    depot: Point<T>,
    speed: T,
    probe_time: T,
    budget: T,
    exact_threshold: usize,
) -> Result<(Tour<T>, bool), TourError> {
    if points.is_empty() {
        let empty = Tour::empty();
        let feasible = T::zero() < budget;
        return Ok((empty, feasible));
    }
    let seeded = nearest_neighbor_order(points, depot);
    let improved = two_opt_improve(&seeded, depot);
    let heuristic = Tour::new(improved, depot, speed, probe_time)?;
    if heuristic.duration() < budget {
        return Ok((heuristic, true));
    }
    if points.len() <= exact_threshold.min(HELD_KARP_MAX) {
        let order = held_karp_optimal(points, depot)?;
        let exact = Tour::new(order, depot, speed, probe_time)?;
        let feasible = exact.duration() < budget;
        return Ok((exact, feasible));
    }
    Ok((heuristic, false))
}
