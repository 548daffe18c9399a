use std::ops::{Add, Mul, Neg, Sub};

use crate::Mat2;

/// Row-major 4×4 real matrix. Phase-space ordering is `(x_S, p_S, x_E, p_E)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat4(pub [[f64; 4]; 4]);

/// Two-mode symplectic form `Ω = diag(ω, ω)` with `ω = [[0, 1], [-1, 0]]`.
pub const OMEGA4: Mat4 = Mat4([
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
]);

pub fn symplectic_form() -> Mat4 {
    OMEGA4
}

impl Mat4 {
    pub const ZERO: Mat4 = Mat4([[0.0; 4]; 4]);
    pub const IDENTITY: Mat4 = Mat4([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]);

    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = Mat4::ZERO;
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn from_blocks(a: &Mat2, b: &Mat2, c: &Mat2, d: &Mat2) -> Self {
        let mut m = Mat4::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = a.0[i][j];
                m.0[i][j + 2] = b.0[i][j];
                m.0[i + 2][j] = c.0[i][j];
                m.0[i + 2][j + 2] = d.0[i][j];
            }
        }
        m
    }

    /// 2×2 block `(bi, bj)` with `bi, bj ∈ {0, 1}`.
    pub fn block(&self, bi: usize, bj: usize) -> Mat2 {
        let (r, c) = (2 * bi, 2 * bj);
        Mat2::new(self.0[r][c], self.0[r][c + 1], self.0[r + 1][c], self.0[r + 1][c + 1])
    }

    pub fn transpose(&self) -> Self {
        let mut t = Mat4::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x *= s);
        m
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn symmetrize(&self) -> Self {
        let mut m = *self;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let v = 0.5 * (self.0[i][j] + self.0[j][i]);
                m.0[i][j] = v;
                m.0[j][i] = v;
            }
        }
        m
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..4).all(|i| (0..i).all(|j| (self.0[i][j] - self.0[j][i]).abs() <= tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn frobenius(&self) -> f64 {
        frobenius_norm(self)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let mut a = self.0;
        let mut det = 1.0;
        for k in 0..4 {
            let p = (k..4).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
            if a[p][k] == 0.0 {
                return 0.0;
            }
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= a[k][k];
            for i in (k + 1)..4 {
                let f = a[i][k] / a[k][k];
                for j in k..4 {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        det
    }

    /// Inverse via Gauss–Jordan; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        let mut a = self.0;
        let mut inv = Mat4::IDENTITY.0;
        for k in 0..4 {
            let p = (k..4).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
            if a[p][k] == 0.0 {
                return None;
            }
            a.swap(p, k);
            inv.swap(p, k);
            let piv = a[k][k];
            for j in 0..4 {
                a[k][j] /= piv;
                inv[k][j] /= piv;
            }
            for i in 0..4 {
                if i != k {
                    let f = a[i][k];
                    for j in 0..4 {
                        a[i][j] -= f * a[k][j];
                        inv[i][j] -= f * inv[k][j];
                    }
                }
            }
        }
        Some(Mat4(inv))
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, o: Mat4) -> Mat4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, o: Mat4) -> Mat4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }
}

impl Neg for Mat4 {
    type Output = Mat4;
    fn neg(self) -> Mat4 {
        self.scale(-1.0)
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, o: Mat4) -> Mat4 {
        let mut m = Mat4::ZERO;
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..4 {
                    m.0[i][j] += a * o.0[k][j];
                }
            }
        }
        m
    }
}

pub fn frobenius_norm(m: &Mat4) -> f64 {
    m.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Symmetric 4×4 matrix stored as its 10 independent entries (upper
/// triangle, row by row).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym4(pub [f64; 10]);

const UPPER: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

impl Sym4 {
    /// Takes the upper triangle after symmetrizing.
    pub fn from_mat4(m: &Mat4) -> Self {
        let s = m.symmetrize();
        let mut v = [0.0; 10];
        for (k, &(i, j)) in UPPER.iter().enumerate() {
            v[k] = s.0[i][j];
        }
        Sym4(v)
    }

    pub fn to_mat4(&self) -> Mat4 {
        let mut m = Mat4::ZERO;
        for (k, &(i, j)) in UPPER.iter().enumerate() {
            m.0[i][j] = self.0[k];
            m.0[j][i] = self.0[k];
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let k = UPPER.iter().position(|&p| p == (i, j)).unwrap();
        self.0[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_mat4() -> impl Strategy<Value = Mat4> {
        proptest::array::uniform16(-10.0f64..10.0).prop_map(|v| {
            let mut m = Mat4::ZERO;
            for (k, x) in v.into_iter().enumerate() {
                m.0[k / 4][k % 4] = x;
            }
            m
        })
    }

    #[test]
    fn omega_properties() {
        assert_eq!(OMEGA4 * OMEGA4, -Mat4::IDENTITY);
        assert_eq!(OMEGA4.transpose(), -OMEGA4);
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(frobenius_norm(&Mat4::IDENTITY), 2.0);
        assert_eq!(frobenius_norm(&Mat4::ZERO), 0.0);
        // free Hamiltonian matrix diag(ω_S², 1, ω_E², 1) at ω_S = 1, ω_E = 2
        let h = Mat4::diag([1.0, 1.0, 4.0, 1.0]);
        let mut acc = 0.0;
        for row in h.0.iter() {
            for x in row {
                acc += x * x;
            }
        }
        assert_eq!(frobenius_norm(&h), acc.sqrt());
        assert!((frobenius_norm(&h) - 19f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn det_and_inverse() {
        let m = Mat4([
            [2.0, 1.0, 0.0, 0.5],
            [1.0, 3.0, 0.2, 0.0],
            [0.0, 0.2, 1.5, 0.3],
            [0.5, 0.0, 0.3, 1.0],
        ]);
        let inv = m.inverse().unwrap();
        assert!((m * inv).max_abs_diff(&Mat4::IDENTITY) < 1e-14);
        assert!((m.det() * inv.det() - 1.0).abs() < 1e-13);
        assert_eq!(Mat4::diag([1.0, 2.0, 3.0, 4.0]).det(), 24.0);
        assert_eq!(Mat4::ZERO.det(), 0.0);
    }

    #[test]
    fn sym4_roundtrip() {
        let m = Mat4::from_blocks(
            &Mat2::sym(1.0, 0.1, 2.0),
            &Mat2::new(0.3, 0.4, 0.5, 0.6),
            &Mat2::new(0.3, 0.5, 0.4, 0.6),
            &Mat2::sym(3.0, -0.2, 4.0),
        );
        let s = Sym4::from_mat4(&m);
        assert_eq!(s.to_mat4(), m);
        assert_eq!(s.get(3, 1), m.0[1][3]);
        assert_eq!(m.block(0, 1), Mat2::new(0.3, 0.4, 0.5, 0.6));
    }

    proptest! {
        #[test]
        fn frobenius_submultiplicative(a in arb_mat4(), b in arb_mat4()) {
            let lhs = frobenius_norm(&(a * b));
            let rhs = frobenius_norm(&a) * frobenius_norm(&b);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }

        #[test]
        fn det_multiplicative(a in arb_mat4(), b in arb_mat4()) {
            let d = (a * b).det();
            let e = a.det() * b.det();
            let scale = 1.0 + frobenius_norm(&a).powi(4) * frobenius_norm(&b).powi(4);
            prop_assert!((d - e).abs() <= 1e-12 * scale);
        }
    }
}
