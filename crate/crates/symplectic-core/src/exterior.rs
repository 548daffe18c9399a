//! Second exterior power of 4×4 matrices.
//!
//! For a covariance matrix with entries of size `A`, the single-mode
//! determinants are of size `A` too, but computing them from the entries
//! cancels terms of size `A²`. The second compound `Λ²σ` (the matrix of all
//! 2×2 minors) evolves linearly alongside σ and carries those determinants as
//! plain entries.

use crate::Mat4;

/// Index pairs `(i, j)`, `i < j`, labelling the basis `e_i ∧ e_j`.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Position of `(0,1)` — the system-mode minor — and `(2,3)`.
pub const PAIR_S: usize = 0;
pub const PAIR_E: usize = 5;

pub type Mat6 = [[f64; 6]; 6];

/// Second compound matrix: `C[(ij),(kl)] = m_ik m_jl − m_il m_jk`.
pub fn compound2(m: &Mat4) -> Mat6 {
    let a = &m.0;
    let mut c = [[0.0; 6]; 6];
    for (r, &(i, j)) in PAIRS.iter().enumerate() {
        for (s, &(k, l)) in PAIRS.iter().enumerate() {
            c[r][s] = a[i][k] * a[j][l] - a[i][l] * a[j][k];
        }
    }
    c
}

/// Induced derivation: if `Ṡ = K S` then `d(Λ²S)/dt = D Λ²S`.
pub fn derivation2(k: &Mat4) -> Mat6 {
    let a = &k.0;
    let mut d = [[0.0; 6]; 6];
    for (r, &(i, j)) in PAIRS.iter().enumerate() {
        for (s, &(p, q)) in PAIRS.iter().enumerate() {
            let mut v = 0.0;
            if q == j {
                v += a[i][p];
            }
            if q == i {
                v -= a[j][p];
            }
            if p == i {
                v += a[j][q];
            }
            if p == j {
                v -= a[i][q];
            }
            d[r][s] = v;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mul6(a: &Mat6, b: &Mat6) -> Mat6 {
        let mut c = [[0.0; 6]; 6];
        for i in 0..6 {
            for k in 0..6 {
                for j in 0..6 {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    }

    fn arb_mat4() -> impl Strategy<Value = Mat4> {
        proptest::array::uniform16(-3.0f64..3.0).prop_map(|v| {
            let mut m = Mat4::ZERO;
            for (k, x) in v.into_iter().enumerate() {
                m.0[k / 4][k % 4] = x;
            }
            m
        })
    }

    #[test]
    fn compound_of_identity() {
        let c = compound2(&Mat4::IDENTITY);
        for (i, row) in c.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn diagonal_entries_are_block_determinants() {
        let m = Mat4([
            [2.0, 0.3, 0.1, 0.0],
            [0.3, 1.5, 0.0, 0.2],
            [0.1, 0.0, 0.7, 0.1],
            [0.0, 0.2, 0.1, 3.0],
        ]);
        let c = compound2(&m);
        assert!((c[PAIR_S][PAIR_S] - m.block(0, 0).det()).abs() < 1e-15);
        assert!((c[PAIR_E][PAIR_E] - m.block(1, 1).det()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn cauchy_binet(a in arb_mat4(), b in arb_mat4()) {
            let lhs = compound2(&(a * b));
            let rhs = mul6(&compound2(&a), &compound2(&b));
            for i in 0..6 {
                for j in 0..6 {
                    prop_assert!((lhs[i][j] - rhs[i][j]).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn derivation_is_the_linearisation(k in arb_mat4()) {
            // Λ²(I + hK) = I + h D + O(h²)
            let h = 1e-6;
            let c = compound2(&(Mat4::IDENTITY + k.scale(h)));
            let d = derivation2(&k);
            for i in 0..6 {
                for j in 0..6 {
                    let id = if i == j { 1.0 } else { 0.0 };
                    prop_assert!(((c[i][j] - id) / h - d[i][j]).abs() < 1e-4);
                }
            }
        }
    }
}
