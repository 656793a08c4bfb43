//! Discrete convexity: directional second differences, envelopes, the
//! admissible set of boundary-pinned convex extensions, and the sup-norm
//! localization inequality for convex functions on nested domains.
//!
//! Discrete convexity means nonnegative second differences along a finite
//! direction set; it is an outer approximation of convexity. Optimization
//! uses the default four directions, verification the extended eight.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::fields::{integrate, ScalarField};
use crate::geometry::{DomainPair, InnerRegion, NodeKind, Region, DIRS, DIRS_EXT};
use crate::math::{abs, Vec2};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConvexityError {
    /// Fewer than 3 finite, non-collinear data nodes: no envelope exists.
    DegenerateData,
    /// The envelope sweeps failed to reach the fixed point.
    EnvelopeStalled { last_change: f64 },
    /// Input violates a convexity or sign precondition.
    Precondition(&'static str),
    InvalidDirections(&'static str),
}

impl fmt::Display for ConvexityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvexityError::DegenerateData => write!(f, "envelope data degenerate"),
            ConvexityError::EnvelopeStalled { last_change } => {
                write!(f, "envelope sweeps stalled, last change {last_change:.3e}")
            }
            ConvexityError::Precondition(s) => write!(f, "precondition violated: {s}"),
            ConvexityError::InvalidDirections(s) => write!(f, "invalid direction set: {s}"),
        }
    }
}

impl core::error::Error for ConvexityError {}

/// Integer grid directions for second differences.
#[derive(Clone, Debug)]
pub struct DirectionSet {
    dirs: Vec<(i32, i32)>,
}

impl DirectionSet {
    pub fn standard() -> Self {
        DirectionSet {
            dirs: DIRS.to_vec(),
        }
    }

    pub fn extended() -> Self {
        DirectionSet {
            dirs: DIRS_EXT.to_vec(),
        }
    }

    pub fn new(dirs: Vec<(i32, i32)>) -> Result<Self, ConvexityError> {
        fn gcd(a: i32, b: i32) -> i32 {
            let (mut a, mut b) = (a.abs(), b.abs());
            while b != 0 {
                let t = a % b;
                a = b;
                b = t;
            }
            a
        }
        for &(dx, dy) in &dirs {
            if dx == 0 && dy == 0 {
                return Err(ConvexityError::InvalidDirections("zero direction"));
            }
            if gcd(dx, dy) != 1 {
                return Err(ConvexityError::InvalidDirections(
                    "direction components must be coprime",
                ));
            }
        }
        for i in 0..dirs.len() {
            for j in (i + 1)..dirs.len() {
                let (a, b) = (dirs[i], dirs[j]);
                if a.0 * b.1 - a.1 * b.0 == 0 {
                    return Err(ConvexityError::InvalidDirections(
                        "directions must be pairwise non-parallel",
                    ));
                }
            }
        }
        Ok(DirectionSet { dirs })
    }

    #[inline]
    pub fn dirs(&self) -> &[(i32, i32)] {
        &self.dirs
    }
}

/// Second difference along `d` at `node`, scaled by `1/(h²|d|²)` so the
/// value approximates the second derivative along the unit direction.
/// `None` when an arm leaves the interior.
#[inline]
pub fn second_difference_at(
    f: &ScalarField,
    pair: &DomainPair,
    node: usize,
    d: (i32, i32),
) -> Option<f64> {
    let plus = pair.grid.step(node, d, 1)?;
    let minus = pair.grid.step(node, d, -1)?;
    if pair.class(plus) == NodeKind::Outside || pair.class(minus) == NodeKind::Outside {
        return None;
    }
    let len_sq = (d.0 * d.0 + d.1 * d.1) as f64;
    let s2 = pair.grid.h * pair.grid.h * len_sq;
    Some((f[plus] - 2.0 * f[node] + f[minus]) / s2)
}

/// All second differences: one row per direction, NaN where skipped.
pub fn second_differences(
    f: &ScalarField,
    pair: &DomainPair,
    dirs: &DirectionSet,
) -> Vec<Vec<f64>> {
    dirs.dirs()
        .iter()
        .map(|&d| {
            (0..pair.grid.len())
                .map(|node| {
                    if pair.class(node) == NodeKind::Outside {
                        f64::NAN
                    } else {
                        second_difference_at(f, pair, node, d).unwrap_or(f64::NAN)
                    }
                })
                .collect()
        })
        .collect()
}

/// Result of a discrete convexity test.
#[derive(Clone, Copy, Debug)]
pub struct ConvexityCheck {
    pub convex: bool,
    /// Largest violation `max(0, −min Δ²)`, on the second-derivative scale.
    pub worst_violation: f64,
    pub tol: f64,
}

/// True iff all directional second differences are ≥ −tol. The default
/// tolerance is `1e−9·(1 + ‖f‖_∞)`.
pub fn is_discretely_convex(
    f: &ScalarField,
    pair: &DomainPair,
    dirs: &DirectionSet,
    tol: Option<f64>,
) -> ConvexityCheck {
    let tol = tol.unwrap_or_else(|| 1e-9 * (1.0 + f.sup_interior(pair)));
    let mut worst = 0.0f64;
    for &d in dirs.dirs() {
        for &node in pair.interior_nodes() {
            if let Some(v) = second_difference_at(f, pair, node, d) {
                if -v > worst {
                    worst = -v;
                }
            }
        }
    }
    ConvexityCheck {
        convex: worst <= tol,
        worst_violation: worst,
        tol,
    }
}

/// Walk every maximal run of interior nodes along direction `d`.
fn for_each_run(pair: &DomainPair, d: (i32, i32), mut visit: impl FnMut(&[usize])) {
    let mut run: Vec<usize> = Vec::new();
    for start in 0..pair.grid.len() {
        if pair.class(start) == NodeKind::Outside {
            continue;
        }
        // Only begin at run heads.
        if let Some(prev) = pair.grid.step(start, d, -1) {
            if pair.class(prev) != NodeKind::Outside {
                continue;
            }
        }
        run.clear();
        let mut cur = start;
        loop {
            run.push(cur);
            match pair.grid.step(cur, d, 1) {
                Some(next) if pair.class(next) != NodeKind::Outside => cur = next,
                _ => break,
            }
        }
        visit(&run);
    }
}

/// Replace values along one run by the lower convex envelope of its finite
/// points. Infinite entries inside the hull span become finite; entries
/// outside the span are left alone. Returns the largest decrease.
fn lower_line(values: &mut [f64], run: &[usize]) -> f64 {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(run.len());
    for (k, &node) in run.iter().enumerate() {
        let v = values[node];
        if v.is_finite() {
            pts.push((k as f64, v));
        }
    }
    if pts.len() < 2 {
        return 0.0;
    }
    // Monotone-chain lower hull.
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut change = 0.0f64;
    let mut seg = 0usize;
    let (t0, t1) = (hull[0].0, hull[hull.len() - 1].0);
    for (k, &node) in run.iter().enumerate() {
        let t = k as f64;
        if t < t0 || t > t1 {
            continue;
        }
        while seg + 1 < hull.len() - 1 && hull[seg + 1].0 < t {
            seg += 1;
        }
        let (xa, ya) = hull[seg];
        let (xb, yb) = hull[seg + 1.min(hull.len() - 1 - seg)];
        let env = if xb > xa {
            ya + (yb - ya) * (t - xa) / (xb - xa)
        } else {
            ya
        };
        let old = values[node];
        if env < old {
            let dec = if old.is_finite() { old - env } else { f64::INFINITY };
            if dec > change {
                change = dec;
            }
            values[node] = env;
        }
    }
    change
}

const ENVELOPE_TOL: f64 = 1e-10;
const ENVELOPE_MAX_PASSES: usize = 20_000;

/// Largest discretely convex function below the data. Data may carry `+∞`
/// at nodes that impose no constraint. Fixed point of iterated directional
/// chord-lowering sweeps, to a `1e−10` sup-norm change.
pub fn lower_convex_envelope(
    data: &ScalarField,
    pair: &DomainPair,
) -> Result<ScalarField, ConvexityError> {
    let mut finite: Vec<Vec2> = Vec::new();
    for &idx in pair.interior_nodes() {
        if data[idx].is_finite() {
            finite.push(pair.grid.node_at(idx));
            if finite.len() > 3 {
                break;
            }
        }
    }
    if finite.len() < 3 {
        return Err(ConvexityError::DegenerateData);
    }

    let mut work = data.clone();
    let mut last_change = f64::INFINITY;
    for _pass in 0..ENVELOPE_MAX_PASSES {
        let mut pass_change = 0.0f64;
        for &d in &DIRS {
            for_each_run(pair, d, |run| {
                let c = lower_line(work.values_mut(), run);
                if c > pass_change {
                    pass_change = c;
                }
            });
        }
        last_change = pass_change;
        if pass_change < ENVELOPE_TOL {
            // Converged; confirm every interior node became finite.
            for &idx in pair.interior_nodes() {
                if !work[idx].is_finite() {
                    return Err(ConvexityError::DegenerateData);
                }
            }
            return Ok(work);
        }
    }
    Err(ConvexityError::EnvelopeStalled { last_change })
}

/// Maximal element of the admissible set: the largest discretely convex
/// function equal to `φ` on the ring `Ω ∖ Ω₀`. Computed as the envelope of
/// (`φ` on the ring, `+∞` inside `Ω₀`).
pub fn chord_envelope(
    phi: &ScalarField,
    pair: &DomainPair,
) -> Result<ScalarField, ConvexityError> {
    let check = is_discretely_convex(phi, pair, &DirectionSet::standard(), None);
    if !check.convex {
        return Err(ConvexityError::Precondition("boundary datum is not convex"));
    }
    let mut data = phi.clone();
    for &idx in pair.interior_nodes() {
        if pair.class(idx) == NodeKind::Inside0 {
            data[idx] = f64::INFINITY;
        }
    }
    lower_convex_envelope(&data, pair)
}

/// Membership test for the admissible set: `v = φ` off `Ω₀`, discretely
/// convex everywhere, and below the chord envelope inside `Ω₀`.
pub fn is_admissible(
    v: &ScalarField,
    phi: &ScalarField,
    pair: &DomainPair,
    tol: f64,
) -> Result<bool, ConvexityError> {
    for &idx in pair.interior_nodes() {
        if matches!(pair.class(idx), NodeKind::Annulus | NodeKind::NearBoundary)
            && abs(v[idx] - phi[idx]) > tol
        {
            return Ok(false);
        }
    }
    let check = is_discretely_convex(v, pair, &DirectionSet::standard(), Some(tol));
    if !check.convex {
        return Ok(false);
    }
    let env = chord_envelope(phi, pair)?;
    for &idx in pair.interior_nodes() {
        if pair.class(idx) == NodeKind::Inside0 && v[idx] > env[idx] + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Nested convex regions Ω₀ ⊂⊂ Ω₁ ⊂⊂ Ω₂ on one grid. Ω₂ is the outer disk
/// of the pair, Ω₀ its inner region.
#[derive(Clone)]
pub struct NestedTriple {
    pub pair: DomainPair,
    pub omega1: InnerRegion,
}

impl NestedTriple {
    pub fn new(pair: DomainPair, omega1: InnerRegion) -> Result<Self, ConvexityError> {
        omega1
            .validate()
            .map_err(|_| ConvexityError::Precondition("middle region invalid"))?;
        let h = pair.grid.h;
        for s in pair.omega0.boundary_samples(0.5 * h) {
            if !(omega1.signed_distance(s) <= -h) {
                return Err(ConvexityError::Precondition(
                    "inner region not strictly inside middle region",
                ));
            }
        }
        for s in omega1.boundary_samples(0.5 * h) {
            if !(pair.omega.signed_distance(s) <= -h) {
                return Err(ConvexityError::Precondition(
                    "middle region not strictly inside outer domain",
                ));
            }
        }
        Ok(NestedTriple { pair, omega1 })
    }
}

/// The ratio `‖u‖_{L∞(Ω₁)} / ∫_{Ω₂∖Ω₀} |u| dx` for a convex `u ≤ 0` on
/// `∂Ω₂`. Returns 0 for the all-zero degenerate case and `+∞` when only the
/// denominator vanishes.
pub fn localization_ratio(u: &ScalarField, triple: &NestedTriple) -> Result<f64, ConvexityError> {
    let pair = &triple.pair;
    let check = is_discretely_convex(u, pair, &DirectionSet::standard(), None);
    if !check.convex {
        return Err(ConvexityError::Precondition("u is not discretely convex"));
    }
    let sign_tol = 1e-9 * (1.0 + u.sup_interior(pair));
    for &idx in pair.interior_nodes() {
        if pair.class(idx) == NodeKind::NearBoundary && u[idx] > sign_tol {
            return Err(ConvexityError::Precondition("u > 0 near the outer boundary"));
        }
    }
    let mut num = 0.0f64;
    for &idx in pair.interior_nodes() {
        if triple.omega1.signed_distance(pair.grid.node_at(idx)) <= 0.0 {
            num = num.max(abs(u[idx]));
        }
    }
    let denom = integrate(&u.map(abs), pair, Region::Annulus);
    if denom == 0.0 {
        return Ok(if num <= sign_tol { 0.0 } else { f64::INFINITY });
    }
    Ok(num / denom)
}

/// Seeded max-of-affines test generator, shifted so that `u ≤ 0` on ∂Ω₂
/// samples (boundary feet and near-boundary nodes).
pub fn random_convex(pair: &DomainPair, seed: u64, k: usize) -> ScalarField {
    debug_assert!(k >= 1);
    let mut rng = Rng::seed_from_u64(seed);
    let mut planes: Vec<(Vec2, f64)> = Vec::with_capacity(k);
    for _ in 0..k {
        let a = Vec2::new(rng.range(-1.5, 1.5), rng.range(-1.5, 1.5));
        let b = rng.range(-1.0, 1.0);
        planes.push((a, b));
    }
    let eval = |p: Vec2| {
        planes
            .iter()
            .map(|&(a, b)| a.dot(p) + b)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut shift = f64::NEG_INFINITY;
    for (_, _, _, foot) in pair.feet_iter() {
        shift = shift.max(eval(foot.point));
    }
    for &idx in pair.interior_nodes() {
        if pair.class(idx) == NodeKind::NearBoundary {
            shift = shift.max(eval(pair.grid.node_at(idx)));
        }
    }
    ScalarField::from_fn(pair.grid, |p| eval(p) - shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DiskDomain;

    fn pair_unit(h: f64) -> DomainPair {
        DomainPair::new(
            DiskDomain::new(Vec2::ZERO, 1.0).unwrap(),
            InnerRegion::Disk {
                center: Vec2::ZERO,
                radius: 0.5,
            },
            h,
        )
        .unwrap()
    }

    #[test]
    fn second_differences_basics() {
        let pair = pair_unit(1.0 / 16.0);
        let dirs = DirectionSet::standard();
        let aff = ScalarField::from_fn(pair.grid, |p| 1.0 + 0.3 * p.x - 0.8 * p.y);
        for row in second_differences(&aff, &pair, &dirs) {
            for v in row {
                if v.is_finite() {
                    assert!(abs(v) < 1e-10);
                }
            }
        }
        let quad = ScalarField::from_fn(pair.grid, |p| 0.5 * p.norm_sq());
        for row in second_differences(&quad, &pair, &dirs) {
            for v in row {
                if v.is_finite() {
                    assert!(abs(v - 1.0) < 1e-8);
                }
            }
        }
        // Hinge: max(0, x − c) has nonnegative second differences.
        let hinge = ScalarField::from_fn(pair.grid, |p| f64::max(0.0, p.x - 0.21));
        for row in second_differences(&hinge, &pair, &dirs) {
            for v in row {
                if v.is_finite() {
                    assert!(v >= -1e-12);
                }
            }
        }
    }

    #[test]
    fn convexity_check_examples() {
        let pair = pair_unit(1.0 / 16.0);
        let dirs = DirectionSet::extended();
        let quad = ScalarField::from_fn(pair.grid, |p| 0.5 * p.norm_sq());
        assert!(is_discretely_convex(&quad, &pair, &dirs, None).convex);
        let cave = ScalarField::from_fn(pair.grid, |p| -p.norm_sq());
        let chk = is_discretely_convex(&cave, &pair, &dirs, None);
        assert!(!chk.convex);
        assert!(abs(chk.worst_violation - 2.0) < 1e-8);
        // A max of ten affines is convex.
        let f = random_convex(&pair, 11, 10);
        assert!(is_discretely_convex(&f, &pair, &dirs, None).convex);
    }

    #[test]
    fn direction_set_validation() {
        assert!(DirectionSet::new(vec![(2, 2), (0, 1)]).is_err()); // not coprime
        assert!(DirectionSet::new(vec![(1, 0), (-1, 0)]).is_err()); // parallel
        assert!(DirectionSet::new(vec![(1, 0), (0, 1), (2, 1)]).is_ok());
    }

    #[test]
    fn envelope_of_convex_data_unchanged() {
        let pair = pair_unit(1.0 / 16.0);
        let f = ScalarField::from_fn(pair.grid, |p| 0.5 * p.norm_sq() + 0.2 * p.x);
        let env = lower_convex_envelope(&f, &pair).unwrap();
        for &idx in pair.interior_nodes() {
            assert!(abs(env[idx] - f[idx]) < 1e-10);
        }
    }

    #[test]
    fn envelope_of_concave_ridge_is_chord() {
        // data = −|x₁|: the largest convex minorant on the disk is the
        // constant −1 chord wherever a full horizontal run reaches |x₁| = 1,
        // and in general the chord between the run's endpoints.
        let pair = pair_unit(1.0 / 16.0);
        let f = ScalarField::from_fn(pair.grid, |p| -abs(p.x));
        let env = lower_convex_envelope(&f, &pair).unwrap();
        // At the center the horizontal run spans the full diameter, so the
        // chord value is −(endpoint |x|) on both sides.
        let g = pair.grid;
        let c_idx = {
            let i = ((0.0 - g.origin.x) / g.h) as usize;
            let j = ((0.0 - g.origin.y) / g.h) as usize;
            g.index(i, j)
        };
        let run_end = {
            // Farthest interior node along +x from the center row.
            let mut idx = c_idx;
            while let Some(next) = g.step(idx, (1, 0), 1) {
                if pair.class(next) == NodeKind::Outside {
                    break;
                }
                idx = next;
            }
            idx
        };
        let expected = -abs(g.node_at(run_end).x);
        assert!(
            abs(env[c_idx] - expected) < 1e-9,
            "center envelope {} vs chord {}",
            env[c_idx],
            expected
        );
        // Envelope is below the data and convex.
        for &idx in pair.interior_nodes() {
            assert!(env[idx] <= f[idx] + 1e-12);
        }
        assert!(is_discretely_convex(&env, &pair, &DirectionSet::standard(), None).convex);
    }

    #[test]
    fn envelope_of_flat_ring_with_free_interior_is_zero() {
        let pair = pair_unit(1.0 / 16.0);
        let mut data = ScalarField::constant(pair.grid, 0.0);
        for &idx in pair.interior_nodes() {
            if pair.class(idx) == NodeKind::Inside0 {
                data[idx] = f64::INFINITY;
            }
        }
        let env = lower_convex_envelope(&data, &pair).unwrap();
        for &idx in pair.interior_nodes() {
            assert!(abs(env[idx]) < 1e-10);
        }
    }

    #[test]
    fn envelope_rejects_degenerate_data() {
        let pair = pair_unit(1.0 / 16.0);
        let data = ScalarField::constant(pair.grid, f64::INFINITY);
        assert_eq!(
            lower_convex_envelope(&data, &pair).unwrap_err(),
            ConvexityError::DegenerateData
        );
    }

    #[test]
    fn envelope_idempotent_and_monotone() {
        let pair = pair_unit(1.0 / 16.0);
        let data = ScalarField::from_fn(pair.grid, |p| libm::sin(3.0 * p.x) + p.y * p.y);
        let e1 = lower_convex_envelope(&data, &pair).unwrap();
        let e2 = lower_convex_envelope(&e1, &pair).unwrap();
        for &idx in pair.interior_nodes() {
            assert!(abs(e1[idx] - e2[idx]) < 1e-9);
        }
        let bigger = data.map(|v| v + 0.3);
        let eb = lower_convex_envelope(&bigger, &pair).unwrap();
        for &idx in pair.interior_nodes() {
            assert!(eb[idx] >= e1[idx] - 1e-9);
        }
    }

    #[test]
    fn chord_envelope_affine_rigidity() {
        let pair = pair_unit(1.0 / 16.0);
        let phi = ScalarField::from_fn(pair.grid, |p| 0.4 * p.x - 0.2 * p.y + 0.1);
        let env = chord_envelope(&phi, &pair).unwrap();
        for &idx in pair.interior_nodes() {
            assert!(
                abs(env[idx] - phi[idx]) < 1e-9,
                "affine datum must force the envelope back to itself"
            );
        }
    }

    #[test]
    fn chord_envelope_lifts_center_to_chord_value() {
        // φ = |x|²/2, Ω₀ = disk(0, 1/2): the envelope is max(φ, 1/8), so the
        // center value is the radial chord value 0.125.
        let pair = pair_unit(1.0 / 32.0);
        let phi = ScalarField::from_fn(pair.grid, |p| 0.5 * p.norm_sq());
        let env = chord_envelope(&phi, &pair).unwrap();
        let g = pair.grid;
        let c_idx = g.index(
            ((0.0 - g.origin.x) / g.h) as usize,
            ((0.0 - g.origin.y) / g.h) as usize,
        );
        assert!((g.node_at(c_idx)).norm() < 1e-12);
        assert!(
            abs(env[c_idx] - 0.125) < 1e-8,
            "center value {} vs chord 0.125",
            env[c_idx]
        );
        for &idx in pair.interior_nodes() {
            match pair.class(idx) {
                NodeKind::Inside0 => assert!(env[idx] >= phi[idx] - 1e-10),
                _ => assert!(abs(env[idx] - phi[idx]) < 1e-10),
            }
        }
        assert!(is_discretely_convex(&env, &pair, &DirectionSet::standard(), None).convex);
    }

    #[test]
    fn admissibility_examples() {
        let pair = pair_unit(1.0 / 16.0);
        let phi = ScalarField::from_fn(pair.grid, |p| 0.5 * p.norm_sq());
        assert!(is_admissible(&phi, &phi, &pair, 1e-8).unwrap());
        let env = chord_envelope(&phi, &pair).unwrap();
        assert!(is_admissible(&env, &phi, &pair, 1e-8).unwrap());
        // A bump above the envelope inside Ω₀ is inadmissible.
        let mut v = env.clone();
        for &idx in pair.interior_nodes() {
            if pair.class(idx) == NodeKind::Inside0 {
                v[idx] += 0.05;
            }
        }
        assert!(!is_admissible(&v, &phi, &pair, 1e-8).unwrap());
    }

    fn triple_unit(h: f64) -> NestedTriple {
        let pair = DomainPair::new(
            DiskDomain::new(Vec2::ZERO, 1.0).unwrap(),
            InnerRegion::Disk {
                center: Vec2::ZERO,
                radius: 0.3,
            },
            h,
        )
        .unwrap();
        NestedTriple::new(
            pair,
            InnerRegion::Disk {
                center: Vec2::ZERO,
                radius: 0.6,
            },
        )
        .unwrap()
    }

    #[test]
    fn localization_ratio_examples() {
        let triple = triple_unit(1.0 / 32.0);
        let zero = ScalarField::constant(triple.pair.grid, 0.0);
        assert_eq!(localization_ratio(&zero, &triple).unwrap(), 0.0);

        let neg1 = ScalarField::constant(triple.pair.grid, -1.0);
        let r = localization_ratio(&neg1, &triple).unwrap();
        let area = core::f64::consts::PI * (1.0 - 0.09);
        assert!(
            abs(r - 1.0 / area) / (1.0 / area) < 0.025,
            "constant ratio {r} vs 1/area {}",
            1.0 / area
        );

        // Radial profile with closed-form ring integral:
        // ∫_{0.3 ≤ r ≤ 1} (1 − r²/2)·2πr dr.
        let u = ScalarField::from_fn(triple.pair.grid, |p| 0.5 * p.norm_sq() - 1.0);
        let r = localization_ratio(&u, &triple).unwrap();
        let exact_den = 2.0 * core::f64::consts::PI
            * ((0.5 - 0.125) - (0.5 * 0.09 / 2.0 - 0.09 * 0.09 / 8.0));
        let expect = 1.0 / exact_den;
        assert!(
            abs(r - expect) / expect < 0.025,
            "radial ratio {r} vs {expect}"
        );
    }

    #[test]
    fn localization_ratio_rejects_bad_input() {
        let triple = triple_unit(1.0 / 32.0);
        let cave = ScalarField::from_fn(triple.pair.grid, |p| -p.norm_sq());
        assert!(matches!(
            localization_ratio(&cave, &triple),
            Err(ConvexityError::Precondition(_))
        ));
        let pos = ScalarField::constant(triple.pair.grid, 1.0);
        assert!(matches!(
            localization_ratio(&pos, &triple),
            Err(ConvexityError::Precondition(_))
        ));
    }

    #[test]
    fn random_convex_reproducible_and_valid() {
        let pair = pair_unit(1.0 / 16.0);
        let a = random_convex(&pair, 42, 7);
        let b = random_convex(&pair, 42, 7);
        for idx in 0..pair.grid.len() {
            assert_eq!(a[idx].to_bits(), b[idx].to_bits());
        }
        // k = 1 is affine: all second differences vanish.
        let aff = random_convex(&pair, 5, 1);
        for row in second_differences(&aff, &pair, &DirectionSet::standard()) {
            for v in row {
                if v.is_finite() {
                    assert!(abs(v) < 1e-9);
                }
            }
        }
        // Sign condition at the outer boundary holds by construction.
        for &idx in pair.interior_nodes() {
            if pair.class(idx) == NodeKind::NearBoundary {
                assert!(a[idx] <= 1e-12);
            }
        }
    }
}
