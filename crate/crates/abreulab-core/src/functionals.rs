//! Scalar functionals and runtime diagnostics: the objective `J`, its
//! `ε`-regularization `J_ε`, the monopolist profit, the scaled boundary-flux
//! diagnostic `η_ε`, and the ring residual.

use alloc::vec::Vec;
use core::fmt;

use crate::fields::{bilinear, gradient_fd, hessian_at, integrate, ScalarField};
use crate::geometry::{DomainPair, NodeKind, Region};
use crate::lagrangian::{Density, Lagrangian};
use crate::math::{abs, ln, powf, sqrt, Vec2};
use crate::stencil::{BoundaryTrace, NoTrace};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FunctionalError {
    BadTheta(f64),
    BadEpsilon(f64),
    /// `G` is only defined for positive arguments.
    NonPositiveArgument(f64),
}

impl fmt::Display for FunctionalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalError::BadTheta(t) => write!(f, "theta must lie in [0, 1/2), got {t}"),
            FunctionalError::BadEpsilon(e) => write!(f, "epsilon must be positive, got {e}"),
            FunctionalError::NonPositiveArgument(t) => {
                write!(f, "G requires a positive argument, got {t}")
            }
        }
    }
}

impl core::error::Error for FunctionalError {}

/// The exponent θ of the scheme, restricted to [0, 1/2) in two dimensions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaParam(f64);

impl ThetaParam {
    pub fn new(theta: f64) -> Result<Self, FunctionalError> {
        if (0.0..0.5).contains(&theta) {
            Ok(ThetaParam(theta))
        } else {
            Err(FunctionalError::BadTheta(theta))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `G(t) = (t^θ − 1)/θ` for θ > 0 and `log t` at θ = 0; concave increasing.
pub fn g_eval(t: f64, theta: ThetaParam) -> Result<f64, FunctionalError> {
    if !(t > 0.0) {
        return Err(FunctionalError::NonPositiveArgument(t));
    }
    let th = theta.value();
    Ok(if th == 0.0 {
        ln(t)
    } else {
        (powf(t, th) - 1.0) / th
    })
}

/// `G'(t) = t^{θ−1}`.
pub fn g_prime(t: f64, theta: ThetaParam) -> Result<f64, FunctionalError> {
    if !(t > 0.0) {
        return Err(FunctionalError::NonPositiveArgument(t));
    }
    Ok(powf(t, theta.value() - 1.0))
}

/// The objective `J(v) = ∫_{Ω₀} F(x, v, Dv) dx` by cell-weighted quadrature.
pub fn j_eval(v: &ScalarField, spec: &dyn Lagrangian, pair: &DomainPair) -> f64 {
    let grad = gradient_fd(v, pair, &NoTrace2(pair));
    let h2 = pair.grid.h * pair.grid.h;
    let mut sum = 0.0;
    for &idx in pair.interior_nodes() {
        let w = pair.cell_weight(Region::Inside0, idx);
        if w > 0.0 {
            let x = pair.grid.node_at(idx);
            sum += w * spec.lagrangian(x, v[idx], grad[idx]);
        }
    }
    sum * h2
}

/// Gradient fallback trace: quadrature nodes of Ω₀ never touch ∂Ω thanks to
/// the containment margin, but `gradient_fd` computes everywhere, so feed
/// cut arms a harmless zero instead of panicking.
struct NoTrace2<'a>(&'a DomainPair);

impl BoundaryTrace for NoTrace2<'_> {
    fn eval(&self, _p: Vec2) -> f64 {
        0.0
    }
}

/// `J_ε(v) = J(v) + 1/(2ε)∫_{Ω∖Ω₀}(v−ũ)² − ε∫_Ω G(det D²v)`.
///
/// Returns `+∞` when `det D²v ≤ 0` somewhere (the functional's own
/// convention), never a partial value.
pub fn j_eps_eval(
    v: &ScalarField,
    spec: &dyn Lagrangian,
    u_tilde: &ScalarField,
    eps: f64,
    theta: ThetaParam,
    pair: &DomainPair,
    trace: &dyn BoundaryTrace,
) -> Result<f64, FunctionalError> {
    if !(eps > 0.0) {
        return Err(FunctionalError::BadEpsilon(eps));
    }
    let h2 = pair.grid.h * pair.grid.h;
    let mut g_term = 0.0;
    for &idx in pair.interior_nodes() {
        let w = pair.cell_weight(Region::All, idx);
        if w > 0.0 {
            let det = hessian_at(v.values(), v[idx], pair, idx, trace).det();
            match g_eval(det, theta) {
                Ok(g) => g_term += w * g,
                Err(_) => return Ok(f64::INFINITY),
            }
        }
    }
    g_term *= h2;
    let diff = v.zip_with(u_tilde, |a, b| (a - b) * (a - b));
    let ring = integrate(&diff, pair, Region::Annulus);
    Ok(j_eval(v, spec, pair) + ring / (2.0 * eps) - eps * g_term)
}

/// Monopolist profit `Φ(u) = ∫_{Ω₀}{x·Du − ½|Du|² − u}γ dx`; equals `−J(u)`
/// for the product-line Lagrangian.
pub fn profit_phi(u: &ScalarField, gamma: &Density, pair: &DomainPair) -> f64 {
    let grad = gradient_fd(u, pair, &NoTrace2(pair));
    let h2 = pair.grid.h * pair.grid.h;
    let mut sum = 0.0;
    for &idx in pair.interior_nodes() {
        let w = pair.cell_weight(Region::Inside0, idx);
        if w > 0.0 {
            let x = pair.grid.node_at(idx);
            let p = grad[idx];
            sum += w * (x.dot(p) - 0.5 * p.norm_sq() - u[idx]) * gamma.value(x);
        }
    }
    sum * h2
}

/// One-sided second-order normal derivative of `u` at a boundary point,
/// sampling the field at depths 1.5h and 3h along the inward radial line.
fn normal_derivative_at_foot(
    u: &ScalarField,
    pair: &DomainPair,
    foot: Vec2,
    trace: &dyn BoundaryTrace,
) -> f64 {
    let h = pair.grid.h;
    let nu = (foot - pair.omega.center).scale(1.0 / pair.omega.radius);
    let g0 = trace.eval(foot);
    let g1 = bilinear(u, foot - nu * (1.5 * h));
    let g2 = bilinear(u, foot - nu * (3.0 * h));
    // Three-point Lagrange derivative at t = 0 with t1 = −1.5h, t2 = −3h.
    (g0 - (4.0 / 3.0) * g1 + (1.0 / 3.0) * g2) / h
}

/// The diagnostic `η_ε = ε^{1/2} (∮_{∂Ω} ((u_ν)⁺)² dS)^{1/2}` (n = 2), with
/// trapezoidal arc-length quadrature over the boundary feet.
pub fn eta_eps(
    u: &ScalarField,
    eps: f64,
    pair: &DomainPair,
    trace: &dyn BoundaryTrace,
) -> f64 {
    let c = pair.omega.center;
    let r = pair.omega.radius;
    let mut angles: Vec<(f64, f64)> = Vec::new();
    for (_, _, _, foot) in pair.feet_iter() {
        let d = foot.point - c;
        let ang = libm::atan2(d.y, d.x);
        let un = normal_derivative_at_foot(u, pair, foot.point, trace);
        let up = f64::max(un, 0.0);
        angles.push((ang, up * up));
    }
    if angles.is_empty() {
        return 0.0;
    }
    angles.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let n = angles.len();
    let mut integral = 0.0;
    for k in 0..n {
        let prev = if k == 0 { angles[n - 1].0 - 2.0 * core::f64::consts::PI } else { angles[k - 1].0 };
        let next = if k == n - 1 { angles[0].0 + 2.0 * core::f64::consts::PI } else { angles[k + 1].0 };
        let weight = 0.5 * (next - prev) * r;
        integral += weight * angles[k].1;
    }
    sqrt(eps) * sqrt(f64::max(integral, 0.0))
}

/// The ring residual `∫_{Ω∖Ω₀} (u − ũ)² dx`.
pub fn annulus_residual(u: &ScalarField, u_tilde: &ScalarField, pair: &DomainPair) -> f64 {
    let diff = u.zip_with(u_tilde, |a, b| (a - b) * (a - b));
    integrate(&diff, pair, Region::Annulus)
}

/// `min det D²u` over interior nodes, with the boundary trace for cut arms.
pub fn min_det_hessian(u: &ScalarField, pair: &DomainPair, trace: &dyn BoundaryTrace) -> f64 {
    let mut m = f64::INFINITY;
    for &idx in pair.interior_nodes() {
        let det = hessian_at(u.values(), u[idx], pair, idx, trace).det();
        if det < m {
            m = det;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DiskDomain, InnerRegion};
    use crate::lagrangian::{AiryLoad, AiryShell, RochetChone};
    use crate::rng::Rng;

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

    fn pair_square(h: f64) -> DomainPair {
        DomainPair::new(
            DiskDomain::new(Vec2::new(1.5, 1.5), 1.2).unwrap(),
            InnerRegion::Rectangle {
                min: Vec2::new(1.0, 1.0),
                max: Vec2::new(2.0, 2.0),
            },
            h,
        )
        .unwrap()
    }

    #[test]
    fn g_values() {
        let t0 = ThetaParam::new(0.0).unwrap();
        let tq = ThetaParam::new(0.25).unwrap();
        assert_eq!(g_eval(1.0, t0).unwrap(), 0.0);
        assert_eq!(g_eval(1.0, tq).unwrap(), 0.0);
        assert!((g_eval(core::f64::consts::E, t0).unwrap() - 1.0).abs() < 1e-15);
        assert!((g_eval(16.0, tq).unwrap() - 4.0).abs() < 1e-12);
        assert!(g_eval(0.0, t0).is_err());
        assert!(g_eval(-1.0, tq).is_err());
        assert!((g_prime(2.0, t0).unwrap() - 0.5).abs() < 1e-15);
        assert!(ThetaParam::new(0.5).is_err());
        assert!(ThetaParam::new(-0.1).is_err());
    }

    #[test]
    fn g_concave_increasing() {
        // G'' ≤ 0 by finite differences on a log-spaced grid, G' > 0.
        for theta in [0.0, 0.1, 0.25, 0.4] {
            let th = ThetaParam::new(theta).unwrap();
            for k in -6..6 {
                let t = powf(10.0, k as f64 * 0.5);
                let dt = 1e-4 * t;
                let g = |s: f64| g_eval(s, th).unwrap();
                let d2 = (g(t + dt) - 2.0 * g(t) + g(t - dt)) / (dt * dt);
                assert!(d2 <= 1e-9, "G'' = {d2} at t = {t}, theta = {theta}");
                assert!(g_prime(t, th).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn j_closed_form_zeros() {
        // Shell model with unit load and v = |x|²/2: integrand vanishes.
        let pair = pair_square(1.0 / 32.0);
        let airy = AiryShell::new(AiryLoad::QuadraticPotential { scale: 1.0 }, &pair);
        let v = ScalarField::from_fn(pair.grid, |p| 0.5 * p.norm_sq());
        assert!(abs(j_eval(&v, &airy, &pair)) < 1e-12);

        // Product model, v ≡ 0 and v = |x|²/2 both null the integrand.
        let rc = RochetChone::new(Density::Constant(1.0), &pair);
        let zero = ScalarField::constant(pair.grid, 0.0);
        assert!(abs(j_eval(&zero, &rc, &pair)) < 1e-12);
        let quad = ScalarField::from_fn(pair.grid, |p| 0.5 * p.norm_sq());
        assert!(
            abs(j_eval(&quad, &rc, &pair)) < 1e-9,
            "J = {}",
            j_eval(&quad, &rc, &pair)
        );
    }

    #[test]
    fn j_eps_terms() {
        let pair = pair_unit(1.0 / 16.0);
        let rc = RochetChone::new(Density::Constant(1.0), &pair);
        let t0 = ThetaParam::new(0.0).unwrap();
        let v = ScalarField::from_fn(pair.grid, |p| 0.5 * p.norm_sq());
        let trace = |p: Vec2| 0.5 * p.norm_sq();
        // v = ũ kills the middle term; det ≡ 1 kills the G term at θ = 0.
        let je = j_eps_eval(&v, &rc, &v, 1e-2, t0, &pair, &trace).unwrap();
        assert!(
            abs(je - j_eval(&v, &rc, &pair)) < 1e-9,
            "J_eps = {je} vs J = {}",
            j_eval(&v, &rc, &pair)
        );
        // Non-convex v has det < 0 somewhere: +∞ sentinel.
        let saddle = ScalarField::from_fn(pair.grid, |p| p.x * p.x - p.y * p.y);
        let js = j_eps_eval(
            &saddle,
            &rc,
            &v,
            1e-2,
            t0,
            &pair,
            &|p: Vec2| p.x * p.x - p.y * p.y,
        )
        .unwrap();
        assert!(js.is_infinite());
        assert!(j_eps_eval(&v, &rc, &v, 0.0, t0, &pair, &trace).is_err());
    }

    #[test]
    fn j_eps_midpoint_convexity_spot() {
        let pair = pair_unit(1.0 / 16.0);
        let rc = RochetChone::new(Density::Constant(1.0), &pair);
        let theta = ThetaParam::new(0.25).unwrap();
        let mut rng = Rng::seed_from_u64(3);
        let (a1, b1, c1) = (rng.range(0.5, 2.0), rng.range(0.5, 2.0), rng.range(-0.3, 0.3));
        let (a2, b2, c2) = (rng.range(0.5, 2.0), rng.range(0.5, 2.0), rng.range(-0.3, 0.3));
        let q1 = move |p: Vec2| 0.5 * (a1 * p.x * p.x + b1 * p.y * p.y) + c1 * p.x * p.y;
        let q2 = move |p: Vec2| 0.5 * (a2 * p.x * p.x + b2 * p.y * p.y) + c2 * p.x * p.y;
        let v1 = ScalarField::from_fn(pair.grid, q1);
        let v2 = ScalarField::from_fn(pair.grid, q2);
        let mid = v1.zip_with(&v2, |a, b| 0.5 * (a + b));
        let tilde = ScalarField::from_fn(pair.grid, |p| 0.5 * p.norm_sq());
        let eps = 1e-2;
        let tr1 = q1;
        let tr2 = q2;
        let trm = move |p: Vec2| 0.5 * (q1(p) + q2(p));
        let j1 = j_eps_eval(&v1, &rc, &tilde, eps, theta, &pair, &tr1).unwrap();
        let j2 = j_eps_eval(&v2, &rc, &tilde, eps, theta, &pair, &tr2).unwrap();
        let jm = j_eps_eval(&mid, &rc, &tilde, eps, theta, &pair, &trm).unwrap();
        assert!(
            jm <= 0.5 * (j1 + j2) + 1e-8,
            "midpoint {jm} vs average {}",
            0.5 * (j1 + j2)
        );
    }

    #[test]
    fn profit_is_negative_objective() {
        let pair = pair_square(1.0 / 32.0);
        let gamma = Density::Constant(1.0);
        let rc = RochetChone::new(gamma.clone(), &pair);
        let zero = ScalarField::constant(pair.grid, 0.0);
        assert_eq!(profit_phi(&zero, &gamma, &pair), 0.0);
        let quad = ScalarField::from_fn(pair.grid, |p| 0.5 * p.norm_sq());
        assert!(abs(profit_phi(&quad, &gamma, &pair)) < 1e-9);
        // Φ(u) + J(u) = 0 pointwise in the quadrature, for arbitrary u.
        let mut rng = Rng::seed_from_u64(9);
        let (ax, ay, b) = (rng.range(-1.0, 1.0), rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
        let u = ScalarField::from_fn(pair.grid, |p| {
            0.3 * p.x * p.x + ax * p.x + ay * p.y + b + 0.2 * libm::sin(p.x)
        });
        let s = profit_phi(&u, &gamma, &pair) + j_eval(&u, &rc, &pair);
        assert!(abs(s) < 1e-12, "identity defect {s}");
    }

    #[test]
    fn eta_diagnostic() {
        let pair = pair_unit(1.0 / 32.0);
        let c = ScalarField::constant(pair.grid, 4.0);
        assert_eq!(eta_eps(&c, 1e-2, &pair, &|_p: Vec2| 4.0), 0.0);
        // u = |x|²/2 on the unit disk: u_ν ≡ 1, ∮ = 2π, η = √(2πε).
        let u = ScalarField::from_fn(pair.grid, |p| 0.5 * p.norm_sq());
        let trace = |p: Vec2| 0.5 * p.norm_sq();
        for eps in [1e-1, 1e-2] {
            let eta = eta_eps(&u, eps, &pair, &trace);
            let want = sqrt(eps * 2.0 * core::f64::consts::PI);
            assert!(
                abs(eta - want) / want < 0.02,
                "eta {eta} vs {want} at eps {eps}"
            );
        }
        // Scaling in ε is exactly √ε.
        let e1 = eta_eps(&u, 1e-2, &pair, &trace);
        let e2 = eta_eps(&u, 4e-2, &pair, &trace);
        assert!(abs(e2 - 2.0 * e1) < 1e-12);
    }

    #[test]
    fn ring_residual() {
        let pair = pair_unit(1.0 / 16.0);
        let u = ScalarField::from_fn(pair.grid, |p| 0.5 * p.norm_sq());
        assert_eq!(annulus_residual(&u, &u, &pair), 0.0);
        let shifted = u.map(|v| v + 0.3);
        let r = annulus_residual(&shifted, &u, &pair);
        let one = ScalarField::constant(pair.grid, 1.0);
        let area = integrate(&one, &pair, Region::Annulus);
        assert!(abs(r - 0.09 * area) < 1e-12);
        // Consistency with integrate on a random field.
        let mut rng = Rng::seed_from_u64(17);
        let vals: Vec<f64> = (0..pair.grid.len()).map(|_| rng.range(-1.0, 1.0)).collect();
        let mut w = u.clone();
        for (i, v) in vals.iter().enumerate() {
            w[i] = *v;
        }
        let direct = annulus_residual(&w, &u, &pair);
        let via_int = integrate(&w.zip_with(&u, |a, b| (a - b) * (a - b)), &pair, Region::Annulus);
        assert!(abs(direct - via_int) < 1e-12);
    }
}
