//! Line-stencil building blocks shared by the discrete calculus and the
//! solvers.
//!
//! Every second-order operator in this crate is assembled from one-dimensional
//! three-point formulas along the four stencil directions. On a cut arm the
//! outer tap moves to the exact intersection with ∂Ω (Shortley–Weller), and
//! the non-uniform coefficients keep the formulas exact on quadratics.

use crate::geometry::{DomainPair, DIRS};
use crate::math::Vec2;

/// Where a stencil tap reads its value from.
#[derive(Clone, Copy, Debug)]
pub enum Tap {
    /// A grid node, by node index.
    Node(usize),
    /// A point on ∂Ω; the value comes from the boundary trace.
    Foot(Vec2),
}

/// Three-point second-difference along one direction, normalized per unit
/// arc length squared: approximates d²f/ds² along the line.
#[derive(Clone, Copy, Debug)]
pub struct LineSecondDiff {
    pub minus: (Tap, f64),
    pub center: f64,
    pub plus: (Tap, f64),
}

/// Boundary values for stencils with cut arms.
pub trait BoundaryTrace {
    fn eval(&self, p: Vec2) -> f64;
}

impl<F: Fn(Vec2) -> f64> BoundaryTrace for F {
    fn eval(&self, p: Vec2) -> f64 {
        self(p)
    }
}

/// Panics when evaluated; for stencils guaranteed not to touch ∂Ω.
pub struct NoTrace;

impl BoundaryTrace for NoTrace {
    fn eval(&self, _p: Vec2) -> f64 {
        panic!("stencil arm crossed the boundary but no trace was provided")
    }
}

fn arm(pair: &DomainPair, node: usize, dir: usize, side: usize) -> Option<(Tap, f64)> {
    if let Some(foot) = pair.foot(node, dir, side) {
        return Some((Tap::Foot(foot.point), foot.frac));
    }
    let sgn = if side == 0 { 1 } else { -1 };
    pair.grid
        .step(node, DIRS[dir], sgn)
        .map(|idx| (Tap::Node(idx), 1.0))
}

/// Build the second-difference stencil for an interior node along
/// `DIRS[dir]`. Returns `None` if an uncut arm leaves the index box (cannot
/// happen for interior nodes of a covering grid).
pub fn second_diff(pair: &DomainPair, node: usize, dir: usize) -> Option<LineSecondDiff> {
    let (plus_tap, b) = arm(pair, node, dir, 0)?;
    let (minus_tap, a) = arm(pair, node, dir, 1)?;
    let d = DIRS[dir];
    let len_sq = (d.0 * d.0 + d.1 * d.1) as f64;
    let s2 = pair.grid.h * pair.grid.h * len_sq;
    let denom = a * b * (a + b) * s2;
    Some(LineSecondDiff {
        minus: (minus_tap, 2.0 * b / denom),
        center: -2.0 * (a + b) / denom,
        plus: (plus_tap, 2.0 * a / denom),
    })
}

/// First derivative along an axis (`dir` 0 or 1), exact on quadratics,
/// using boundary feet on cut arms.
#[derive(Clone, Copy, Debug)]
pub struct LineFirstDiff {
    pub minus: (Tap, f64),
    pub center: f64,
    pub plus: (Tap, f64),
}

pub fn first_diff(pair: &DomainPair, node: usize, dir: usize) -> Option<LineFirstDiff> {
    debug_assert!(dir < 2);
    let (plus_tap, b) = arm(pair, node, dir, 0)?;
    let (minus_tap, a) = arm(pair, node, dir, 1)?;
    let s = pair.grid.h;
    let denom = a * b * (a + b) * s;
    Some(LineFirstDiff {
        minus: (minus_tap, -b * b / denom),
        center: (b * b - a * a) / denom,
        plus: (plus_tap, a * a / denom),
    })
}

#[inline]
pub fn tap_value(tap: Tap, values: &[f64], trace: &dyn BoundaryTrace) -> f64 {
    match tap {
        Tap::Node(idx) => values[idx],
        Tap::Foot(p) => trace.eval(p),
    }
}

impl LineSecondDiff {
    #[inline]
    pub fn apply(&self, values: &[f64], center_value: f64, trace: &dyn BoundaryTrace) -> f64 {
        self.minus.1 * tap_value(self.minus.0, values, trace)
            + self.center * center_value
            + self.plus.1 * tap_value(self.plus.0, values, trace)
    }
}

impl LineFirstDiff {
    #[inline]
    pub fn apply(&self, values: &[f64], center_value: f64, trace: &dyn BoundaryTrace) -> f64 {
        self.minus.1 * tap_value(self.minus.0, values, trace)
            + self.center * center_value
            + self.plus.1 * tap_value(self.plus.0, values, trace)
    }
}
