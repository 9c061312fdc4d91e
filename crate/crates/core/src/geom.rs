//! Plane geometry primitives.

use std::cmp::Ordering;

use crate::scalar::Scalar;

/// A point on the surveyed surface, in map units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    /// Squared Euclidean distance to `other`.
    pub fn dist_sq(self, other: Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Euclidean distance to `other`.
    pub fn dist(self, other: Self) -> T {
        self.dist_sq(other).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Lexicographic (x, then y) order, used as the tie-breaking rule
    /// throughout the routing and assessment code.
    pub fn lex_cmp(self, other: Self) -> Ordering {
        match self.x.partial_cmp(&other.x) {
            Some(Ordering::Equal) | None => self.y.partial_cmp(&other.y).unwrap_or(Ordering::Equal),
            Some(ord) => ord,
        }
    }
}
