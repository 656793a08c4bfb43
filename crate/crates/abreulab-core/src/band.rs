//! Banded LU factorization with partial pivoting.
//!
//! Storage follows the classic general-band layout: a matrix with `kl`
//! subdiagonals and `ku` superdiagonals is held in `2·kl + ku + 1` band rows
//! so that fill-in from row pivoting stays inside the allocation. Entry
//! `(i, j)` lives at band row `kl + ku + i − j`, column `j`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math::abs;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandError {
    /// A zero pivot was met at the given column; the matrix is singular to
    /// working precision.
    SingularAt(usize),
    /// A coefficient was written outside the declared bandwidth.
    OutOfBand { row: usize, col: usize },
}

impl fmt::Display for BandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandError::SingularAt(j) => write!(f, "singular band matrix: zero pivot in column {j}"),
            BandError::OutOfBand { row, col } => {
                write!(f, "entry ({row}, {col}) outside declared bandwidth")
            }
        }
    }
}

impl core::error::Error for BandError {}

/// General band matrix in factorizable storage.
#[derive(Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Column-major band storage, `(2·kl + ku + 1) × n`.
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let rows = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            ab: vec![0.0; rows * n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn band_rows(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let r = self.kl + self.ku + i - j;
        j * self.band_rows() + r
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        // Writable region before factorization: j − ku ≤ i ≤ j + kl.
        i + self.ku >= j && i <= j + self.kl
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<(), BandError> {
        if !self.in_band(i, j) {
            return Err(BandError::OutOfBand { row: i, col: j });
        }
        let k = self.idx(i, j);
        self.ab[k] += v;
        Ok(())
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.ab[self.idx(i, j)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] = v;
    }

    /// Factor in place; returns the pivot permutation.
    pub fn factor(mut self) -> Result<BandLu, BandError> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let i_max = core::cmp::min(n - 1, j + kl);
            let mut jp = j;
            let mut best = abs(self.get(j, j));
            for i in (j + 1)..=i_max {
                let a = abs(self.get(i, j));
                if a > best {
                    best = a;
                    jp = i;
                }
            }
            ipiv[j] = jp;
            if best == 0.0 {
                return Err(BandError::SingularAt(j));
            }
            let c_max = core::cmp::min(n - 1, j + kl + ku);
            if jp != j {
                for c in j..=c_max {
                    let a = self.get(j, c);
                    let b = self.get(jp, c);
                    self.set(j, c, b);
                    self.set(jp, c, a);
                }
            }
            let pivot = self.get(j, j);
            for i in (j + 1)..=i_max {
                let m = self.get(i, j) / pivot;
                self.set(i, j, m);
            }
            for c in (j + 1)..=c_max {
                let ajc = self.get(j, c);
                if ajc != 0.0 {
                    for i in (j + 1)..=i_max {
                        let m = self.get(i, j);
                        if m != 0.0 {
                            let v = self.get(i, c) - m * ajc;
                            self.set(i, c, v);
                        }
                    }
                }
            }
        }
        Ok(BandLu { mat: self, ipiv })
    }
}

/// Factored band matrix.
pub struct BandLu {
    mat: BandMatrix,
    ipiv: Vec<usize>,
}

impl BandLu {
    /// Solve `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.mat.n;
        let kl = self.mat.kl;
        let ku = self.mat.ku;
        debug_assert_eq!(b.len(), n);
        for j in 0..n {
            let jp = self.ipiv[j];
            if jp != j {
                b.swap(j, jp);
            }
            let bj = b[j];
            if bj != 0.0 {
                let i_max = core::cmp::min(n - 1, j + kl);
                for i in (j + 1)..=i_max {
                    b[i] -= self.mat.get(i, j) * bj;
                }
            }
        }
        for j in (0..n).rev() {
            let mut s = b[j];
            let c_max = core::cmp::min(n - 1, j + kl + ku);
            for c in (j + 1)..=c_max {
                s -= self.mat.get(j, c) * b[c];
            }
            b[j] = s / self.mat.get(j, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.iter().map(|r| r.clone()).collect();
        let mut x = b.to_vec();
        for j in 0..n {
            let mut p = j;
            for i in j + 1..n {
                if m[i][j].abs() > m[p][j].abs() {
                    p = i;
                }
            }
            m.swap(j, p);
            x.swap(j, p);
            let piv = m[j][j];
            assert!(piv.abs() > 0.0);
            for i in j + 1..n {
                let f = m[i][j] / piv;
                for c in j..n {
                    m[i][c] -= f * m[j][c];
                }
                x[i] -= f * x[j];
            }
        }
        for j in (0..n).rev() {
            for c in j + 1..n {
                x[j] -= m[j][c] * x[c];
            }
            x[j] /= m[j][j];
        }
        x
    }

    // Deterministic pseudo-random stream for test matrices.
    fn splitmix(state: &mut u64) -> f64 {
        *state = state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    #[test]
    fn matches_dense_on_random_bands() {
        let mut st = 12345u64;
        for &(n, kl, ku) in &[(1usize, 0usize, 0usize), (7, 2, 1), (25, 3, 5), (60, 4, 4)] {
            let mut band = BandMatrix::new(n, kl, ku);
            let mut dense = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if i + ku >= j && i <= j + kl {
                        let v = splitmix(&mut st) + if i == j { 4.0 } else { 0.0 };
                        band.add(i, j, v).unwrap();
                        dense[i][j] = v;
                    }
                }
            }
            let b: Vec<f64> = (0..n).map(|_| splitmix(&mut st)).collect();
            let lu = band.factor().unwrap();
            let mut x = b.clone();
            lu.solve(&mut x);
            let xd = dense_solve(&dense, &b);
            for i in 0..n {
                assert!(
                    (x[i] - xd[i]).abs() < 1e-10,
                    "n={n} kl={kl} ku={ku} i={i}: {} vs {}",
                    x[i],
                    xd[i]
                );
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]] needs a row swap.
        let mut band = BandMatrix::new(2, 1, 1);
        band.add(0, 1, 1.0).unwrap();
        band.add(1, 0, 1.0).unwrap();
        let lu = band.factor().unwrap();
        let mut b = vec![2.0, 3.0];
        lu.solve(&mut b);
        assert!((b[0] - 3.0).abs() < 1e-15 && (b[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn reports_singularity() {
        let mut band = BandMatrix::new(3, 1, 1);
        band.add(0, 0, 1.0).unwrap();
        band.add(1, 1, 0.0).unwrap();
        band.add(2, 2, 1.0).unwrap();
        match band.factor() {
            Err(BandError::SingularAt(_)) => {}
            _ => panic!("expected singularity"),
        }
    }

    #[test]
    fn rejects_out_of_band_writes() {
        let mut band = BandMatrix::new(5, 1, 1);
        assert!(band.add(0, 3, 1.0).is_err());
    }
}
