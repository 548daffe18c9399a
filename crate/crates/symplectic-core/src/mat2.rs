use std::ops::{Add, Mul, Neg, Sub};

/// Row-major 2×2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[0.0; 2]; 2]);
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    /// The single-mode symplectic form [[0, 1], [-1, 0]].
    pub const OMEGA: Mat2 = Mat2([[0.0, 1.0], [-1.0, 0.0]]);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2([[a11, a12], [a21, a22]])
    }

    /// Symmetric matrix from its three independent entries.
    pub const fn sym(a11: f64, a12: f64, a22: f64) -> Self {
        Mat2([[a11, a12], [a12, a22]])
    }

    pub const fn diag(a11: f64, a22: f64) -> Self {
        Mat2([[a11, 0.0], [0.0, a22]])
    }

    #[inline]
    pub fn a11(&self) -> f64 {
        self.0[0][0]
    }
    #[inline]
    pub fn a12(&self) -> f64 {
        self.0[0][1]
    }
    #[inline]
    pub fn a21(&self) -> f64 {
        self.0[1][0]
    }
    #[inline]
    pub fn a22(&self) -> f64 {
        self.0[1][1]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a11(), self.a21(), self.a12(), self.a22())
    }

    /// Adjugate, so that `m * m.adjugate() == det(m) * I`.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.a22(), -self.a12(), -self.a21(), self.a11())
    }

    /// `None` for an exactly singular matrix.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == 0.0 {
            return None;
        }
        Some(self.adjugate().scale(1.0 / d))
    }

    pub fn scale(&self, s: f64) -> Self {
        let m = &self.0;
        Mat2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }

    pub fn symmetrize(&self) -> Self {
        let off = 0.5 * (self.a12() + self.a21());
        Mat2::sym(self.a11(), off, self.a22())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        m
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale(s)
    }
}

/// Eigenvalues `(λ₋, λ₊)` of a symmetric 2×2 matrix, `λ₋ ≤ λ₊`.
///
/// Uses `hypot` for the discriminant and recovers the smaller-magnitude root
/// from the determinant, so both roots keep full relative accuracy even when
/// one of them is tiny.
pub fn eig_sym2(m: &Mat2) -> (f64, f64) {
    let a = m.a11();
    let d = m.a22();
    let b = 0.5 * (m.a12() + m.a21());
    let mean = 0.5 * (a + d);
    let r = (0.5 * (a - d)).hypot(b);
    let (lo, hi) = (mean - r, mean + r);
    let det = a * d - b * b;
    if mean >= 0.0 {
        if hi == 0.0 {
            (0.0, 0.0)
        } else {
            (det / hi, hi)
        }
    } else {
        (lo, det / lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eig_examples() {
        assert_eq!(eig_sym2(&Mat2::diag(1.0, 3.0)), (1.0, 3.0));
        assert_eq!(eig_sym2(&Mat2::sym(0.0, 1.0, 0.0)), (-1.0, 1.0));
        assert_eq!(eig_sym2(&Mat2::ZERO), (0.0, 0.0));
        let (l, h) = eig_sym2(&Mat2::diag(-2.0, -5.0));
        assert_eq!((l, h), (-5.0, -2.0));
    }

    #[test]
    fn omega_squares_to_minus_identity() {
        assert_eq!(Mat2::OMEGA * Mat2::OMEGA, -Mat2::IDENTITY);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Mat2::new(2.0, 0.3, -1.1, 4.0);
        let p = m * m.inverse().unwrap();
        assert!(p.max_abs_diff(&Mat2::IDENTITY) < 1e-15);
        assert!(Mat2::ZERO.inverse().is_none());
    }

    proptest! {
        #[test]
        fn eig_reconstructs_trace_and_det(a in -1e3f64..1e3, b in -1e3f64..1e3, d in -1e3f64..1e3) {
            let m = Mat2::sym(a, b, d);
            let (l, h) = eig_sym2(&m);
            prop_assert!(l <= h);
            let tr = m.trace();
            prop_assert!((tr - (l + h)).abs() <= 1e-12 * (1.0 + tr.abs()) + 1e-12 * h.abs().max(l.abs()));
            let det = m.det();
            let scale = 1.0 + l.abs() * h.abs() + (a * d).abs() + b * b;
            prop_assert!((det - l * h).abs() <= 1e-12 * scale);
        }
    }
}
