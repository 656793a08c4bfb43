//! The Lagrangian family `F(x, z, p) = F⁰(x, z) + F¹(x, p)`: built-in
//! models, structural-assumption checks, and the scheme's right-hand side.

use alloc::vec::Vec;
use core::fmt;

use crate::fields::{hessian_at, ScalarField};
use crate::geometry::{DomainPair, NodeKind};
use crate::math::{abs, exp, SymMat2, Vec2};
use crate::rng::Rng;
use crate::stencil::{first_diff, NoTrace};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LagrangianError {
    BadEpsilon(f64),
}

impl fmt::Display for LagrangianError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LagrangianError::BadEpsilon(e) => write!(f, "epsilon must be positive, got {e}"),
        }
    }
}

impl core::error::Error for LagrangianError {}

/// Structural constants entering the assumption checks: the gradient-part
/// bound `C_*`, the semi-convexity defect `C_b`, the linear growth constant
/// `C_l`, and the lower convexity constant of `F¹` in `p`.
#[derive(Clone, Copy, Debug)]
pub struct StructuralConstants {
    pub c_star: f64,
    pub c_b: f64,
    pub c_l: f64,
    pub c_lower: f64,
}

/// A Lagrangian split as `F = F⁰(x, z) + F¹(x, p)` with the partial
/// derivatives the solvers and checks need.
pub trait Lagrangian {
    /// `F⁰(x, z)`.
    fn f0_potential(&self, x: Vec2, z: f64) -> f64;
    /// `f⁰ = ∂F⁰/∂z`.
    fn f0(&self, x: Vec2, z: f64) -> f64;
    /// `F¹(x, p)`.
    fn f1(&self, x: Vec2, p: Vec2) -> f64;
    fn grad_p_f1(&self, x: Vec2, p: Vec2) -> Vec2;
    fn hess_p_f1(&self, x: Vec2, p: Vec2) -> SymMat2;
    /// The diagonal mixed derivatives `(F¹_{p₁x₁}, F¹_{p₂x₂})`.
    fn mixed_f1(&self, x: Vec2, p: Vec2) -> Vec2;
    fn constants(&self) -> StructuralConstants;
    /// Growth bound for `|f⁰|`; linear by default.
    fn eta_growth(&self, t: f64) -> f64 {
        self.constants().c_l * (1.0 + t)
    }
    /// Full integrand `F(x, z, p)`.
    fn lagrangian(&self, x: Vec2, z: f64, p: Vec2) -> f64 {
        self.f0_potential(x, z) + self.f1(x, p)
    }
}

/// Agent-type density γ for the product-line design model: nonnegative,
/// bounded, Lipschitz.
#[derive(Clone, Debug)]
pub enum Density {
    Constant(f64),
    /// `γ(x) = base + slope·(x − anchor)`, clamped at zero.
    Affine { base: f64, slope: Vec2, anchor: Vec2 },
    /// `γ(x) = amplitude·e^{−|x−center|²/(2σ²)}`.
    Gaussian {
        amplitude: f64,
        center: Vec2,
        sigma: f64,
    },
}

impl Density {
    pub fn value(&self, x: Vec2) -> f64 {
        match *self {
            Density::Constant(c) => c,
            Density::Affine { base, slope, anchor } => f64::max(base + slope.dot(x - anchor), 0.0),
            Density::Gaussian {
                amplitude,
                center,
                sigma,
            } => amplitude * exp(-(x - center).norm_sq() / (2.0 * sigma * sigma)),
        }
    }

    pub fn grad(&self, x: Vec2) -> Vec2 {
        match *self {
            Density::Constant(_) => Vec2::ZERO,
            Density::Affine { base, slope, anchor } => {
                if base + slope.dot(x - anchor) > 0.0 {
                    slope
                } else {
                    Vec2::ZERO
                }
            }
            Density::Gaussian {
                amplitude,
                center,
                sigma,
            } => {
                let d = x - center;
                let v = amplitude * exp(-d.norm_sq() / (2.0 * sigma * sigma));
                d * (-v / (sigma * sigma))
            }
        }
    }
}

/// Monopolist product-line model with quadratic cost:
/// `F = ½|p|²γ(x) − x·p γ(x) + zγ(x)`.
pub struct RochetChone {
    pub gamma: Density,
    constants: StructuralConstants,
}

impl RochetChone {
    pub fn new(gamma: Density, pair: &DomainPair) -> Self {
        // Sample γ over Ω₀ nodes for the structural constants.
        let mut sup = 0.0f64;
        let mut inf = f64::INFINITY;
        let mut lip = 0.0f64;
        let mut x_max = 0.0f64;
        for &idx in pair.interior_nodes() {
            if pair.class(idx) != NodeKind::Inside0 {
                continue;
            }
            let p = pair.grid.node_at(idx);
            let g = gamma.value(p);
            sup = sup.max(g);
            inf = inf.min(g);
            lip = lip.max(gamma.grad(p).norm());
            x_max = x_max.max(p.norm());
        }
        if !inf.is_finite() {
            inf = 0.0;
        }
        let constants = StructuralConstants {
            c_star: f64::max(sup, lip * (1.0 + x_max)),
            c_b: 0.0,
            c_l: sup,
            c_lower: inf,
        };
        RochetChone { gamma, constants }
    }
}

impl Lagrangian for RochetChone {
    fn f0_potential(&self, x: Vec2, z: f64) -> f64 {
        z * self.gamma.value(x)
    }

    fn f0(&self, x: Vec2, _z: f64) -> f64 {
        self.gamma.value(x)
    }

    fn f1(&self, x: Vec2, p: Vec2) -> f64 {
        (0.5 * p.norm_sq() - x.dot(p)) * self.gamma.value(x)
    }

    fn grad_p_f1(&self, x: Vec2, p: Vec2) -> Vec2 {
        (p - x) * self.gamma.value(x)
    }

    fn hess_p_f1(&self, x: Vec2, _p: Vec2) -> SymMat2 {
        let g = self.gamma.value(x);
        SymMat2::new(g, 0.0, g)
    }

    fn mixed_f1(&self, x: Vec2, p: Vec2) -> Vec2 {
        let g = self.gamma.value(x);
        let dg = self.gamma.grad(x);
        Vec2::new((p.x - x.x) * dg.x - g, (p.y - x.y) * dg.y - g)
    }

    fn constants(&self) -> StructuralConstants {
        self.constants
    }
}

/// The factor `det D²q` of the shell model, in closed form or from data.
#[derive(Clone, Debug)]
pub enum AiryLoad {
    /// `q = s·|x|²/2`, so `det D²q = s²`.
    QuadraticPotential { scale: f64 },
    /// `q = e^{|x|²/2}`, so `det D²q = (1 + |x|²)·e^{|x|²}`.
    ExpRadialPotential,
    Constant(f64),
}

impl AiryLoad {
    pub fn value(&self, x: Vec2) -> f64 {
        match *self {
            AiryLoad::QuadraticPotential { scale } => scale * scale,
            AiryLoad::ExpRadialPotential => (1.0 + x.norm_sq()) * exp(x.norm_sq()),
            AiryLoad::Constant(c) => c,
        }
    }
}

/// Shell wrinkling model: `F⁰(x, z) = (|x|²/2 − z)·det D²q(x)`, no gradient
/// part.
pub struct AiryShell {
    pub load: AiryLoad,
    constants: StructuralConstants,
}

impl AiryShell {
    pub fn new(load: AiryLoad, pair: &DomainPair) -> Self {
        let mut sup = 0.0f64;
        for &idx in pair.interior_nodes() {
            if pair.class(idx) == NodeKind::Inside0 {
                sup = sup.max(abs(load.value(pair.grid.node_at(idx))));
            }
        }
        let constants = StructuralConstants {
            c_star: 0.0,
            c_b: 0.0,
            c_l: sup,
            c_lower: 0.0,
        };
        AiryShell { load, constants }
    }
}

impl Lagrangian for AiryShell {
    fn f0_potential(&self, x: Vec2, z: f64) -> f64 {
        (0.5 * x.norm_sq() - z) * self.load.value(x)
    }

    fn f0(&self, x: Vec2, _z: f64) -> f64 {
        -self.load.value(x)
    }

    fn f1(&self, _x: Vec2, _p: Vec2) -> f64 {
        0.0
    }

    fn grad_p_f1(&self, _x: Vec2, _p: Vec2) -> Vec2 {
        Vec2::ZERO
    }

    fn hess_p_f1(&self, _x: Vec2, _p: Vec2) -> SymMat2 {
        SymMat2::new(0.0, 0.0, 0.0)
    }

    fn mixed_f1(&self, _x: Vec2, _p: Vec2) -> Vec2 {
        Vec2::ZERO
    }

    fn constants(&self) -> StructuralConstants {
        self.constants
    }
}

/// Gradient and Hessian of `u` at an interior node, using interior-only
/// stencils (valid away from ∂Ω; inside Ω₀ by the containment margin).
fn grad_hess_interior(u: &ScalarField, pair: &DomainPair, idx: usize) -> (Vec2, SymMat2) {
    let gx = first_diff(pair, idx, 0)
        .map(|s| s.apply(u.values(), u[idx], &NoTrace))
        .unwrap_or(f64::NAN);
    let gy = first_diff(pair, idx, 1)
        .map(|s| s.apply(u.values(), u[idx], &NoTrace))
        .unwrap_or(f64::NAN);
    let h = hessian_at(u.values(), u[idx], pair, idx, &NoTrace);
    (Vec2::new(gx, gy), h)
}

/// The scheme's right-hand side: the Euler–Lagrange expression of `F` inside
/// `Ω₀` (chain-rule expanded, evaluated with discrete derivatives of `u`),
/// and the penalty `(u − ũ)/ε` on the ring. No smoothing across ∂Ω₀.
pub fn assemble_f_eps(
    spec: &dyn Lagrangian,
    u: &ScalarField,
    u_tilde: &ScalarField,
    eps: f64,
    pair: &DomainPair,
) -> Result<ScalarField, LagrangianError> {
    if !(eps > 0.0) {
        return Err(LagrangianError::BadEpsilon(eps));
    }
    let mut out = ScalarField::constant(pair.grid, f64::NAN);
    for &idx in pair.interior_nodes() {
        let x = pair.grid.node_at(idx);
        out[idx] = match pair.class(idx) {
            NodeKind::Inside0 => {
                let (du, d2u) = grad_hess_interior(u, pair, idx);
                let mixed = spec.mixed_f1(x, du);
                let hess_p = spec.hess_p_f1(x, du);
                spec.f0(x, u[idx]) - (mixed.x + mixed.y) - hess_p.ddot(d2u)
            }
            _ => (u[idx] - u_tilde[idx]) / eps,
        };
    }
    Ok(out)
}

/// Finite-difference `∂f⁰/∂z`, used where the trait surface has no analytic
/// second derivative.
pub fn f0_z_fd(spec: &dyn Lagrangian, x: Vec2, z: f64) -> f64 {
    let dz = 1e-6 * (1.0 + abs(z));
    (spec.f0(x, z + dz) - spec.f0(x, z - dz)) / (2.0 * dz)
}

/// Verdict for one structural condition.
#[derive(Clone, Debug)]
pub struct ConditionVerdict {
    pub name: &'static str,
    pub satisfied: bool,
    /// Smallest slack observed; negative when violated.
    pub margin: f64,
    /// A sample `(x, z, |p|)` achieving the worst slack.
    pub witness: Option<(Vec2, f64, f64)>,
}

/// Sampled verdicts for all structural conditions.
#[derive(Clone, Debug)]
pub struct AssumptionReport {
    pub conditions: Vec<ConditionVerdict>,
}

impl AssumptionReport {
    pub fn all_satisfied(&self) -> bool {
        self.conditions.iter().all(|c| c.satisfied)
    }

    pub fn get(&self, name: &str) -> Option<&ConditionVerdict> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// Sampling parameters for `check_assumptions`.
#[derive(Clone, Copy, Debug)]
pub struct CheckParams {
    pub samples: usize,
    pub z_range: (f64, f64),
    pub p_range: (f64, f64),
    /// Trace constant of Ω₀ for the uniqueness margin check.
    pub c_t: f64,
    pub seed: u64,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            samples: 2000,
            z_range: (-5.0, 5.0),
            p_range: (-5.0, 5.0),
            c_t: 1.0,
            seed: 0,
        }
    }
}

/// Monte-Carlo plus grid sampling of the structural conditions on
/// `(x, z, p)` boxes. Produces verdicts, never errors.
pub fn check_assumptions(
    spec: &dyn Lagrangian,
    pair: &DomainPair,
    params: &CheckParams,
) -> AssumptionReport {
    let cs = spec.constants();
    let mut rng = Rng::seed_from_u64(params.seed);
    let inner: Vec<Vec2> = pair
        .interior_nodes()
        .iter()
        .copied()
        .filter(|&i| pair.class(i) == NodeKind::Inside0)
        .map(|i| pair.grid.node_at(i))
        .collect();
    let tol = 1e-9;

    let mut monotone = ConditionVerdict {
        name: "zero-order-monotone",
        satisfied: true,
        margin: f64::INFINITY,
        witness: None,
    };
    let mut growth = ConditionVerdict {
        name: "zero-order-growth",
        satisfied: true,
        margin: f64::INFINITY,
        witness: None,
    };
    let mut hess_rng = ConditionVerdict {
        name: "gradient-hessian-bounds",
        satisfied: true,
        margin: f64::INFINITY,
        witness: None,
    };
    let mut mixed_g = ConditionVerdict {
        name: "mixed-derivative-growth",
        satisfied: true,
        margin: f64::INFINITY,
        witness: None,
    };
    let mut semicvx = ConditionVerdict {
        name: "semi-convexity",
        satisfied: true,
        margin: f64::INFINITY,
        witness: None,
    };
    let mut lingrow = ConditionVerdict {
        name: "linear-growth",
        satisfied: true,
        margin: f64::INFINITY,
        witness: None,
    };
    let mut strongp = ConditionVerdict {
        name: "strong-p-convexity",
        satisfied: true,
        margin: f64::INFINITY,
        witness: None,
    };

    let mut update = |v: &mut ConditionVerdict, slack: f64, x: Vec2, z: f64, pn: f64| {
        if slack < v.margin {
            v.margin = slack;
            v.witness = Some((x, z, pn));
        }
        if slack < -tol {
            v.satisfied = false;
        }
    };

    if !inner.is_empty() {
        for _ in 0..params.samples {
            let x = inner[rng.below(inner.len())];
            let z = rng.range(params.z_range.0, params.z_range.1);
            let z2 = rng.range(params.z_range.0, params.z_range.1);
            let p = Vec2::new(
                rng.range(params.p_range.0, params.p_range.1),
                rng.range(params.p_range.0, params.p_range.1),
            );

            let df = (spec.f0(x, z) - spec.f0(x, z2)) * (z - z2);
            update(&mut monotone, df, x, z, p.norm());

            update(
                &mut growth,
                spec.eta_growth(abs(z)) - abs(spec.f0(x, z)),
                x,
                z,
                p.norm(),
            );

            let h = spec.hess_p_f1(x, p);
            let (lo, hi) = h.eigenvalues();
            update(&mut hess_rng, f64::min(lo, cs.c_star - hi), x, z, p.norm());

            let m = spec.mixed_f1(x, p);
            let bound = cs.c_star * (p.norm() + 1.0);
            update(
                &mut mixed_g,
                f64::min(bound - abs(m.x), bound - abs(m.y)),
                x,
                z,
                p.norm(),
            );

            update(&mut semicvx, f0_z_fd(spec, x, z) + cs.c_b, x, z, p.norm());

            update(
                &mut lingrow,
                cs.c_l * (1.0 + abs(z)) - abs(spec.f0(x, z)),
                x,
                z,
                p.norm(),
            );

            update(&mut strongp, lo - cs.c_lower, x, z, p.norm());
        }
    }

    let bc_slack = cs.c_lower - (params.c_t * cs.c_b + 1.0);
    let uniq = ConditionVerdict {
        name: "uniqueness-margin",
        satisfied: bc_slack >= 0.0,
        margin: bc_slack,
        witness: None,
    };

    AssumptionReport {
        conditions: alloc::vec![
            monotone, growth, hess_rng, mixed_g, semicvx, lingrow, strongp, uniq,
        ],
    }
}

/// 0 when the boundary datum is uniformly convex on the sampled interior
/// (smallest discrete Hessian eigenvalue ≥ δ), else 1.
pub fn detect_c_phi(phi: &ScalarField, pair: &DomainPair, delta: Option<f64>) -> u8 {
    let delta = delta.unwrap_or(1e-6);
    let mut min_eig = f64::INFINITY;
    for &idx in pair.interior_nodes() {
        if pair.class(idx) == NodeKind::NearBoundary {
            continue;
        }
        let h = hessian_at(phi.values(), phi[idx], pair, idx, &NoTrace);
        min_eig = min_eig.min(h.min_eigenvalue());
    }
    if min_eig >= delta {
        0
    } else {
        1
    }
}
