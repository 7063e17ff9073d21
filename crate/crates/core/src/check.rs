//! Outcome of a numerical check.

/// Slack for inequalities that hold exactly in exact arithmetic.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// Tolerance for identities that hold exactly in exact arithmetic.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Result of comparing two sides of an identity or inequality over a set of
/// probe points.
///
/// `max_violation` is the largest amount by which the claim failed, clamped
/// at zero, so a perfect pass reports `0.0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub max_violation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: &'static str, tolerance: f64) -> Self {
        Check { name, max_violation: 0.0, tolerance }
    }

    /// Records that `lhs <= rhs` should hold.
    pub fn le(&mut self, lhs: f64, rhs: f64) {
        self.record(lhs - rhs);
    }

    /// Records that `lhs == rhs` should hold.
    pub fn equal(&mut self, lhs: f64, rhs: f64) {
        self.record(libm::fabs(lhs - rhs));
    }

    /// Records a raw violation amount; non-positive amounts are satisfied.
    pub fn record(&mut self, violation: f64) {
        if violation.is_nan() {
            self.max_violation = f64::INFINITY;
        } else if violation > self.max_violation {
            self.max_violation = violation;
        }
    }

    pub fn passed(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}
