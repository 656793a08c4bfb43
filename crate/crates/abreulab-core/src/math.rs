//! Small planar linear algebra and `no_std` float math.
//!
//! All transcendental functions go through `libm` so that results are
//! bit-identical across platforms and independent of the host libm.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::sqrt(x * x + y * y)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// A point or vector in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        hypot(self.x, self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        self.scale(s)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

/// Symmetric 2×2 matrix, stored as (xx, xy, yy).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMat2 {
    pub const IDENTITY: SymMat2 = SymMat2 {
        xx: 1.0,
        xy: 0.0,
        yy: 1.0,
    };

    #[inline]
    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        SymMat2 { xx, xy, yy }
    }

    #[inline]
    pub fn det(self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    #[inline]
    pub fn trace(self) -> f64 {
        self.xx + self.yy
    }

    /// Cofactor (adjugate) matrix: swaps the diagonal, negates the
    /// off-diagonal. Satisfies `U·M = det(M)·I`.
    #[inline]
    pub fn cofactor(self) -> SymMat2 {
        SymMat2::new(self.yy, -self.xy, self.xx)
    }

    /// Eigenvalues in ascending order.
    #[inline]
    pub fn eigenvalues(self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let half_diff = 0.5 * (self.xx - self.yy);
        let r = hypot(half_diff, self.xy);
        (mean - r, mean + r)
    }

    #[inline]
    pub fn min_eigenvalue(self) -> f64 {
        self.eigenvalues().0
    }

    /// Quadratic form dᵀ M d.
    #[inline]
    pub fn quad_form(self, d: Vec2) -> f64 {
        self.xx * d.x * d.x + 2.0 * self.xy * d.x * d.y + self.yy * d.y * d.y
    }

    /// Frobenius inner product Σ Mᵢⱼ Nᵢⱼ (off-diagonal counted twice).
    #[inline]
    pub fn ddot(self, o: SymMat2) -> f64 {
        self.xx * o.xx + 2.0 * self.xy * o.xy + self.yy * o.yy
    }

    /// Clamp both eigenvalues from below, keeping the eigenvectors.
    pub fn clamp_eigenvalues(self, floor_val: f64) -> SymMat2 {
        let (lo, hi) = self.eigenvalues();
        if lo >= floor_val {
            return self;
        }
        // Eigenvector for `lo`: (xy, lo - xx) unless degenerate.
        let (c, s) = if abs(self.xy) > 1e-300 {
            let v = Vec2::new(self.xy, lo - self.xx);
            let n = v.norm();
            (v.x / n, v.y / n)
        } else if self.xx <= self.yy {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let l0 = if lo < floor_val { floor_val } else { lo };
        let l1 = if hi < floor_val { floor_val } else { hi };
        // Reassemble l0·vvᵀ + l1·wwᵀ with w ⟂ v.
        SymMat2::new(
            l0 * c * c + l1 * s * s,
            (l0 - l1) * c * s,
            l0 * s * s + l1 * c * c,
        )
    }
}

impl Add for SymMat2 {
    type Output = SymMat2;
    #[inline]
    fn add(self, o: SymMat2) -> SymMat2 {
        SymMat2::new(self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)
    }
}

impl Mul<f64> for SymMat2 {
    type Output = SymMat2;
    #[inline]
    fn mul(self, s: f64) -> SymMat2 {
        SymMat2::new(self.xx * s, self.xy * s, self.yy * s)
    }
}
