//! Domains, grids, node classification and embedded-boundary geometry.
//!
//! The outer domain `Ω` is a disk, which gives a closed-form strictly convex
//! defining function `ρ = (|x−c|² − R²)/2` and exact intersections of grid
//! stencil arms with `∂Ω`. The inner region `Ω₀` is a rectangle or a disk
//! whose closure must sit strictly inside `Ω`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math::{abs, exp, hypot, sqrt, SymMat2, Vec2};

/// Stencil directions of the nine-point discretization: east, north and the
/// two diagonals. All second-difference machinery iterates over these.
pub const DIRS: [(i32, i32); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

/// Extended direction set used by verification-grade convexity checks.
pub const DIRS_EXT: [(i32, i32); 8] = [
    (1, 0),
    (0, 1),
    (1, 1),
    (1, -1),
    (2, 1),
    (1, 2),
    (2, -1),
    (1, -2),
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometryError {
    /// Ω₀ closure is not far enough inside Ω.
    Containment { min_dist: f64, required: f64 },
    InvalidDomain(&'static str),
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::Containment { min_dist, required } => write!(
                f,
                "inner region too close to outer boundary: distance {min_dist:.3e} < required {required:.3e}"
            ),
            GeometryError::InvalidDomain(s) => write!(f, "invalid domain: {s}"),
        }
    }
}

impl core::error::Error for GeometryError {}

/// The uniformly convex outer domain: a disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskDomain {
    pub center: Vec2,
    pub radius: f64,
}

impl DiskDomain {
    pub fn new(center: Vec2, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0) {
            return Err(GeometryError::InvalidDomain("disk radius must be positive"));
        }
        Ok(DiskDomain { center, radius })
    }

    /// Defining function `ρ(x) = (|x−c|² − R²)/2` with its derivatives.
    /// Negative inside, zero on the boundary, `D²ρ = I` (so γ = 1).
    #[inline]
    pub fn rho_eval(&self, x: Vec2) -> (f64, Vec2, SymMat2) {
        let d = x - self.center;
        let rho = 0.5 * (d.norm_sq() - self.radius * self.radius);
        (rho, d, SymMat2::IDENTITY)
    }

    #[inline]
    pub fn rho(&self, x: Vec2) -> f64 {
        self.rho_eval(x).0
    }

    /// `e^ρ − 1` with gradient and Hessian `e^ρ(D²ρ + Dρ⊗Dρ)`.
    /// The Hessian eigenvalues are bounded below by `e^{−γ⁻¹}γ` inside Ω.
    pub fn exp_bump(&self, x: Vec2) -> (f64, Vec2, SymMat2) {
        let (rho, drho, d2rho) = self.rho_eval(x);
        let e = exp(rho);
        let hess = SymMat2::new(
            d2rho.xx + drho.x * drho.x,
            d2rho.xy + drho.x * drho.y,
            d2rho.yy + drho.y * drho.y,
        ) * e;
        (e - 1.0, drho * e, hess)
    }

    #[inline]
    pub fn contains(&self, x: Vec2) -> bool {
        self.rho(x) < 0.0
    }

    /// Signed distance (negative inside).
    #[inline]
    pub fn signed_distance(&self, x: Vec2) -> f64 {
        (x - self.center).norm() - self.radius
    }
}

/// The inner convex region Ω₀.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InnerRegion {
    Rectangle { min: Vec2, max: Vec2 },
    Disk { center: Vec2, radius: f64 },
}

impl InnerRegion {
    pub fn validate(&self) -> Result<(), GeometryError> {
        match *self {
            InnerRegion::Rectangle { min, max } => {
                if !(max.x > min.x && max.y > min.y) {
                    return Err(GeometryError::InvalidDomain("degenerate rectangle"));
                }
            }
            InnerRegion::Disk { radius, .. } => {
                if !(radius > 0.0) {
                    return Err(GeometryError::InvalidDomain(
                        "inner disk radius must be positive",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Signed distance to ∂Ω₀, negative inside.
    pub fn signed_distance(&self, x: Vec2) -> f64 {
        match *self {
            InnerRegion::Rectangle { min, max } => {
                let dx = f64::max(min.x - x.x, x.x - max.x);
                let dy = f64::max(min.y - x.y, x.y - max.y);
                if dx <= 0.0 && dy <= 0.0 {
                    f64::max(dx, dy)
                } else {
                    hypot(f64::max(dx, 0.0), f64::max(dy, 0.0))
                }
            }
            InnerRegion::Disk { center, radius } => (x - center).norm() - radius,
        }
    }

    #[inline]
    pub fn contains_open(&self, x: Vec2) -> bool {
        self.signed_distance(x) < 0.0
    }

    /// Analytic area, used by quadrature sanity tests.
    pub fn area(&self) -> f64 {
        match *self {
            InnerRegion::Rectangle { min, max } => (max.x - min.x) * (max.y - min.y),
            InnerRegion::Disk { radius, .. } => core::f64::consts::PI * radius * radius,
        }
    }

    /// Points sampling ∂Ω₀ with spacing about `step`.
    pub fn boundary_samples(&self, step: f64) -> Vec<Vec2> {
        let mut out = Vec::new();
        match *self {
            InnerRegion::Rectangle { min, max } => {
                let (w, hgt) = (max.x - min.x, max.y - min.y);
                let nx = usize::max(2, (w / step) as usize + 1);
                let ny = usize::max(2, (hgt / step) as usize + 1);
                for k in 0..=nx {
                    let x = min.x + w * k as f64 / nx as f64;
                    out.push(Vec2::new(x, min.y));
                    out.push(Vec2::new(x, max.y));
                }
                for k in 0..=ny {
                    let y = min.y + hgt * k as f64 / ny as f64;
                    out.push(Vec2::new(min.x, y));
                    out.push(Vec2::new(max.x, y));
                }
            }
            InnerRegion::Disk { center, radius } => {
                let n = usize::max(16, (2.0 * core::f64::consts::PI * radius / step) as usize);
                for k in 0..n {
                    let t = 2.0 * core::f64::consts::PI * k as f64 / n as f64;
                    out.push(center + Vec2::new(radius * libm::cos(t), radius * libm::sin(t)));
                }
            }
        }
        out
    }

    /// A point well inside the region.
    pub fn centroid(&self) -> Vec2 {
        match *self {
            InnerRegion::Rectangle { min, max } => (min + max).scale(0.5),
            InnerRegion::Disk { center, .. } => center,
        }
    }
}

/// Uniform Cartesian grid covering Ω with one ghost layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: Vec2,
}

impl GridSpec {
    pub fn cover(domain: &DiskDomain, h: f64) -> Result<Self, GeometryError> {
        if !(h > 0.0) {
            return Err(GeometryError::InvalidDomain("grid spacing must be positive"));
        }
        let half = domain.radius + h;
        let origin = domain.center - Vec2::new(half, half);
        let n = (2.0 * half / h) as usize + 2;
        Ok(GridSpec {
            nx: n,
            ny: n,
            h,
            origin,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(
            self.origin.x + i as f64 * self.h,
            self.origin.y + j as f64 * self.h,
        )
    }

    #[inline]
    pub fn node_at(&self, idx: usize) -> Vec2 {
        let (i, j) = self.coords(idx);
        self.node(i, j)
    }

    /// Neighbor index after a step of `steps` arms in grid direction `d`,
    /// or `None` when it leaves the index range.
    #[inline]
    pub fn step(&self, idx: usize, d: (i32, i32), steps: i32) -> Option<usize> {
        let (i, j) = self.coords(idx);
        let ni = i as i64 + (d.0 * steps) as i64;
        let nj = j as i64 + (d.1 * steps) as i64;
        if ni < 0 || nj < 0 || ni >= self.nx as i64 || nj >= self.ny as i64 {
            None
        } else {
            Some(self.index(ni as usize, nj as usize))
        }
    }
}

/// Per-node classification. Interior nodes (everything but `Outside`) carry
/// solver unknowns; the split tracks which branch of the scheme's right-hand
/// side applies and which nodes need cut-arm stencils.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Inside0,
    Annulus,
    NearBoundary,
    Outside,
}

/// Exact intersection of a stencil arm with ∂Ω.
#[derive(Clone, Copy, Debug)]
pub struct Foot {
    /// Fractional arm length in (0, 1].
    pub frac: f64,
    /// The intersection point on the circle.
    pub point: Vec2,
}

type ArmFeet = [[Option<Foot>; 2]; 4];

/// Domains, grid, classification and boundary feet, built once and shared
/// immutably by every solver and functional.
#[derive(Clone)]
pub struct DomainPair {
    pub omega: DiskDomain,
    pub omega0: InnerRegion,
    pub grid: GridSpec,
    classes: Vec<NodeKind>,
    /// Node index → slot in `feet`, `u32::MAX` when the node has no cut arm.
    feet_slot: Vec<u32>,
    feet: Vec<ArmFeet>,
    /// Node indices of all interior nodes, row-major order.
    interior: Vec<usize>,
    /// Node index → position in `interior`, `u32::MAX` for outside nodes.
    interior_of: Vec<u32>,
}

impl DomainPair {
    /// Margin (in units of `h`) required between ∂Ω₀ and ∂Ω.
    pub const CONTAINMENT_MARGIN_CELLS: f64 = 3.0;

    pub fn new(omega: DiskDomain, omega0: InnerRegion, h: f64) -> Result<Self, GeometryError> {
        omega0.validate()?;
        let grid = GridSpec::cover(&omega, h)?;
        let margin = Self::CONTAINMENT_MARGIN_CELLS * h;
        let mut min_dist = f64::INFINITY;
        for s in omega0.boundary_samples(0.5 * h) {
            let d = -omega.signed_distance(s);
            if d < min_dist {
                min_dist = d;
            }
        }
        if !(min_dist >= margin) {
            return Err(GeometryError::Containment {
                min_dist,
                required: margin,
            });
        }

        let n = grid.len();
        let mut classes = vec![NodeKind::Outside; n];
        for idx in 0..n {
            let p = grid.node_at(idx);
            if omega.rho(p) >= 0.0 {
                continue;
            }
            let mut near = false;
            'dirs: for d in DIRS {
                for sgn in [1, -1] {
                    let q = Vec2::new(
                        p.x + (d.0 * sgn) as f64 * h,
                        p.y + (d.1 * sgn) as f64 * h,
                    );
                    if omega.rho(q) >= 0.0 {
                        near = true;
                        break 'dirs;
                    }
                }
            }
            classes[idx] = if near {
                NodeKind::NearBoundary
            } else if omega0.contains_open(p) {
                NodeKind::Inside0
            } else {
                NodeKind::Annulus
            };
        }

        let mut feet_slot = vec![u32::MAX; n];
        let mut feet: Vec<ArmFeet> = Vec::new();
        for idx in 0..n {
            if classes[idx] != NodeKind::NearBoundary {
                continue;
            }
            let p = grid.node_at(idx);
            let mut arms: ArmFeet = Default::default();
            for (di, d) in DIRS.iter().enumerate() {
                for (si, sgn) in [1i32, -1i32].iter().enumerate() {
                    let dir = Vec2::new((d.0 * sgn) as f64, (d.1 * sgn) as f64);
                    let q = p + dir * h;
                    if omega.rho(q) >= 0.0 {
                        arms[di][si] = Some(circle_cut(&omega, p, dir, h));
                    }
                }
            }
            feet_slot[idx] = feet.len() as u32;
            feet.push(arms);
        }

        let mut interior = Vec::new();
        let mut interior_of = vec![u32::MAX; n];
        for idx in 0..n {
            if classes[idx] != NodeKind::Outside {
                interior_of[idx] = interior.len() as u32;
                interior.push(idx);
            }
        }

        Ok(DomainPair {
            omega,
            omega0,
            grid,
            classes,
            feet_slot,
            feet,
            interior,
            interior_of,
        })
    }

    #[inline]
    pub fn class(&self, idx: usize) -> NodeKind {
        self.classes[idx]
    }

    #[inline]
    pub fn classes(&self) -> &[NodeKind] {
        &self.classes
    }

    #[inline]
    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    #[inline]
    pub fn interior_index(&self, node: usize) -> Option<usize> {
        let k = self.interior_of[node];
        if k == u32::MAX {
            None
        } else {
            Some(k as usize)
        }
    }

    /// Boundary foot for the arm `(direction, side)` of a near-boundary
    /// node; `side` 0 is the positive orientation of `DIRS[dir]`.
    #[inline]
    pub fn foot(&self, node: usize, dir: usize, side: usize) -> Option<&Foot> {
        let slot = self.feet_slot[node];
        if slot == u32::MAX {
            return None;
        }
        self.feet[slot as usize][dir][side].as_ref()
    }

    /// All feet as `(node, dir, side, foot)`, deterministic order.
    pub fn feet_iter(&self) -> impl Iterator<Item = (usize, usize, usize, &Foot)> {
        self.interior.iter().copied().flat_map(move |node| {
            (0..4usize).flat_map(move |dir| {
                (0..2usize).filter_map(move |side| {
                    self.foot(node, dir, side).map(|f| (node, dir, side, f))
                })
            })
        })
    }

    pub fn count_class(&self, kind: NodeKind) -> usize {
        self.classes.iter().filter(|&&c| c == kind).count()
    }
}

/// Exact intersection of the segment from inside node `p` along `dir·h`
/// with the circle ∂Ω. Requires `p` inside and `p + dir·h` outside.
fn circle_cut(omega: &DiskDomain, p: Vec2, dir: Vec2, h: f64) -> Foot {
    let rel = p - omega.center;
    let a = dir.norm_sq() * h * h;
    let b = 2.0 * h * dir.dot(rel);
    let c = rel.norm_sq() - omega.radius * omega.radius;
    let disc = b * b - 4.0 * a * c;
    let t = (-b + sqrt(f64::max(disc, 0.0))) / (2.0 * a);
    let t = f64::min(f64::max(t, 1e-300), 1.0);
    Foot {
        frac: t,
        point: p + dir * (t * h),
    }
}

/// Quadrature region selectors shared by `fields::integrate` and the
/// functionals: the inner region, the pinned ring `Ω ∖ Ω₀`, or all of Ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Inside0,
    Annulus,
    All,
}

impl DomainPair {
    /// Fraction of the `h`-cell around a node inside the region: 1 deep
    /// inside, 1/2 in the band cut by the region boundary, else 0.
    pub fn cell_weight(&self, region: Region, idx: usize) -> f64 {
        let p = self.grid.node_at(idx);
        let half = 0.5 * self.grid.h;
        let w_omega = band_weight(self.omega.signed_distance(p), half);
        match region {
            Region::All => w_omega,
            Region::Inside0 => {
                let w0 = band_weight(self.omega0.signed_distance(p), half);
                f64::min(w0, w_omega)
            }
            Region::Annulus => {
                let w0 = band_weight(self.omega0.signed_distance(p), half);
                f64::max(w_omega - w0, 0.0)
            }
        }
    }
}

#[inline]
fn band_weight(signed_dist: f64, half_cell: f64) -> f64 {
    if signed_dist <= -half_cell {
        1.0
    } else if signed_dist < half_cell {
        0.5
    } else {
        0.0
    }
}
