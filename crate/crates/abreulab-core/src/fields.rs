//! Discrete calculus on grid fields: derivatives, Hessians, cofactors,
//! quadrature and norms.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::geometry::{DomainPair, GridSpec, NodeKind, Region};
use crate::math::{abs, SymMat2, Vec2};
use crate::stencil::{first_diff, second_diff, BoundaryTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldError {
    EmptyRegion,
    GridMismatch,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::EmptyRegion => write!(f, "region selects no nodes"),
            FieldError::GridMismatch => write!(f, "fields live on different grids"),
        }
    }
}

impl core::error::Error for FieldError {}

/// One real value per grid node.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn constant(grid: GridSpec, v: f64) -> Self {
        ScalarField {
            grid,
            data: vec![v; grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(Vec2) -> f64) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.node_at(i))).collect();
        ScalarField { grid, data }
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Zip-combine two fields on the same grid.
    pub fn zip_with(&self, other: &ScalarField, mut f: impl FnMut(f64, f64) -> f64) -> ScalarField {
        debug_assert_eq!(self.grid, other.grid);
        ScalarField {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            data: self.data.iter().map(|&a| f(a)).collect(),
        }
    }

    /// Max |f| over interior nodes.
    pub fn sup_interior(&self, pair: &DomainPair) -> f64 {
        let mut m = 0.0;
        for &idx in pair.interior_nodes() {
            let a = abs(self.data[idx]);
            if a > m {
                m = a;
            }
        }
        m
    }
}

impl Index<usize> for ScalarField {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for ScalarField {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

/// One plane vector per node.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub grid: GridSpec,
    data: Vec<Vec2>,
}

impl VectorField {
    pub fn constant(grid: GridSpec, v: Vec2) -> Self {
        VectorField {
            grid,
            data: vec![v; grid.len()],
        }
    }

    #[inline]
    pub fn values(&self) -> &[Vec2] {
        &self.data
    }
}

impl Index<usize> for VectorField {
    type Output = Vec2;
    #[inline]
    fn index(&self, i: usize) -> &Vec2 {
        &self.data[i]
    }
}

impl IndexMut<usize> for VectorField {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut Vec2 {
        &mut self.data[i]
    }
}

/// One symmetric 2×2 matrix per node (Hessians, cofactors).
#[derive(Clone, Debug)]
pub struct SymMatrixField {
    pub grid: GridSpec,
    data: Vec<SymMat2>,
}

impl SymMatrixField {
    pub fn constant(grid: GridSpec, m: SymMat2) -> Self {
        SymMatrixField {
            grid,
            data: vec![m; grid.len()],
        }
    }

    #[inline]
    pub fn values(&self) -> &[SymMat2] {
        &self.data
    }

    pub fn map(&self, mut f: impl FnMut(SymMat2) -> SymMat2) -> SymMatrixField {
        SymMatrixField {
            grid: self.grid,
            data: self.data.iter().map(|&m| f(m)).collect(),
        }
    }
}

impl Index<usize> for SymMatrixField {
    type Output = SymMat2;
    #[inline]
    fn index(&self, i: usize) -> &SymMat2 {
        &self.data[i]
    }
}

impl IndexMut<usize> for SymMatrixField {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut SymMat2 {
        &mut self.data[i]
    }
}

/// Finite-difference gradient: exact on quadratics, boundary feet on cut
/// arms. Outside nodes are filled with NaN.
pub fn gradient_fd(f: &ScalarField, pair: &DomainPair, trace: &dyn BoundaryTrace) -> VectorField {
    debug_assert_eq!(f.grid, pair.grid);
    let mut out = VectorField::constant(f.grid, Vec2::new(f64::NAN, f64::NAN));
    for &idx in pair.interior_nodes() {
        let gx = first_diff(pair, idx, 0)
            .map(|s| s.apply(f.values(), f[idx], trace))
            .unwrap_or(f64::NAN);
        let gy = first_diff(pair, idx, 1)
            .map(|s| s.apply(f.values(), f[idx], trace))
            .unwrap_or(f64::NAN);
        out[idx] = Vec2::new(gx, gy);
    }
    out
}

/// Discrete Hessian of a field at one interior node.
#[inline]
pub fn hessian_at(
    f: &[f64],
    center: f64,
    pair: &DomainPair,
    idx: usize,
    trace: &dyn BoundaryTrace,
) -> SymMat2 {
    let dxx = second_diff(pair, idx, 0)
        .map(|s| s.apply(f, center, trace))
        .unwrap_or(f64::NAN);
    let dyy = second_diff(pair, idx, 1)
        .map(|s| s.apply(f, center, trace))
        .unwrap_or(f64::NAN);
    let dpp = second_diff(pair, idx, 2)
        .map(|s| s.apply(f, center, trace))
        .unwrap_or(f64::NAN);
    let dmm = second_diff(pair, idx, 3)
        .map(|s| s.apply(f, center, trace))
        .unwrap_or(f64::NAN);
    // Diagonal second differences are normalized per arc length, so they
    // approximate (f_xx ± 2 f_xy + f_yy)/2; the difference isolates f_xy.
    SymMat2::new(dxx, 0.5 * (dpp - dmm), dyy)
}

/// Finite-difference Hessian field: five-point second differences plus the
/// diagonal cross combination, Shortley–Weller corrected at cut arms.
pub fn hessian_fd(f: &ScalarField, pair: &DomainPair, trace: &dyn BoundaryTrace) -> SymMatrixField {
    debug_assert_eq!(f.grid, pair.grid);
    let nan = SymMat2::new(f64::NAN, f64::NAN, f64::NAN);
    let mut out = SymMatrixField::constant(f.grid, nan);
    for &idx in pair.interior_nodes() {
        out[idx] = hessian_at(f.values(), f[idx], pair, idx, trace);
    }
    out
}

/// Pointwise cofactor of a symmetric matrix field. For Hessian fields this
/// is the matrix `U` of the fourth-order operator; `trace(U·H) = 2 det H`.
pub fn cofactor2(h: &SymMatrixField) -> SymMatrixField {
    h.map(|m| m.cofactor())
}

/// Cell-weighted quadrature over a region: `h²`-weighted node sum with half
/// weights in the band cut by the region boundary. Outside nodes carry no
/// field values and are skipped.
pub fn integrate(f: &ScalarField, pair: &DomainPair, region: Region) -> f64 {
    debug_assert_eq!(f.grid, pair.grid);
    let h2 = pair.grid.h * pair.grid.h;
    let mut sum = 0.0;
    for &idx in pair.interior_nodes() {
        let w = pair.cell_weight(region, idx);
        if w > 0.0 {
            sum += w * f[idx];
        }
    }
    sum * h2
}

/// Bilinear interpolation of a field at an arbitrary point. The caller is
/// responsible for keeping the surrounding cell inside the valued region.
pub fn bilinear(f: &ScalarField, p: Vec2) -> f64 {
    let g = f.grid;
    let fx = (p.x - g.origin.x) / g.h;
    let fy = (p.y - g.origin.y) / g.h;
    let i = (fx.floor() as isize).clamp(0, g.nx as isize - 2) as usize;
    let j = (fy.floor() as isize).clamp(0, g.ny as isize - 2) as usize;
    let tx = fx - i as f64;
    let ty = fy - j as f64;
    let v00 = f[g.index(i, j)];
    let v10 = f[g.index(i + 1, j)];
    let v01 = f[g.index(i, j + 1)];
    let v11 = f[g.index(i + 1, j + 1)];
    (1.0 - tx) * (1.0 - ty) * v00 + tx * (1.0 - ty) * v10 + (1.0 - tx) * ty * v01 + tx * ty * v11
}

/// Node selector for sup-norms: a classified region or the compact subset
/// of Ω₀ at distance at least `margin` from ∂Ω₀.
#[derive(Clone, Copy, Debug)]
pub enum SupRegion {
    Classified(Region),
    CompactMargin(f64),
}

/// Max |f| over the selected nodes; errors if the selection is empty.
pub fn sup_region(
    f: &ScalarField,
    pair: &DomainPair,
    sel: SupRegion,
) -> Result<f64, FieldError> {
    debug_assert_eq!(f.grid, pair.grid);
    let mut m: Option<f64> = None;
    for &idx in pair.interior_nodes() {
        let keep = match sel {
            SupRegion::Classified(Region::Inside0) => pair.class(idx) == NodeKind::Inside0,
            SupRegion::Classified(Region::Annulus) => {
                matches!(pair.class(idx), NodeKind::Annulus | NodeKind::NearBoundary)
            }
            SupRegion::Classified(Region::All) => true,
            SupRegion::CompactMargin(margin) => {
                pair.omega0.signed_distance(pair.grid.node_at(idx)) <= -margin
            }
        };
        if keep {
            let a = abs(f[idx]);
            m = Some(match m {
                None => a,
                Some(b) => f64::max(a, b),
            });
        }
    }
    m.ok_or(FieldError::EmptyRegion)
}
