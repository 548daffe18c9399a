use crate::{Mat2, Mat4};

/// Determinants in `[1 - DET_CLAMP, 1)` are treated as round-off and clamped
/// to one.
pub const DET_CLAMP: f64 = 1e-9;
/// Determinants below `1 - DET_REJECT` violate the uncertainty bound.
pub const DET_REJECT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymplecticError {
    #[error("non-physical state: det = {det} is below the uncertainty bound")]
    NonPhysicalState { det: f64 },
}

/// Purity `1/√det σ_S` of a single-mode Gaussian state.
pub fn purity_from_block(sigma_s: &Mat2) -> Result<f64, SymplecticError> {
    purity_from_det(sigma_s.det())
}

/// Purity from an already known single-mode determinant.
pub fn purity_from_det(det: f64) -> Result<f64, SymplecticError> {
    if !(det >= 1.0 - DET_REJECT) {
        return Err(SymplecticError::NonPhysicalState { det });
    }
    // Between the clamp and reject thresholds we still return a value > 1 by
    // at most ~5e-7; the caller asked for a physical state and gets the raw
    // number rather than silent truncation.
    let det = if det < 1.0 && det >= 1.0 - DET_CLAMP { 1.0 } else { det };
    Ok(1.0 / det.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDiagnostics {
    pub det: f64,
    pub nu_s: f64,
    pub nu_e: f64,
    pub valid: bool,
}

/// Per-mode symplectic eigenvalues `ν_I = √det σ_I` and the global
/// determinant. Diagnostic only; never fails.
pub fn check_gaussian_valid(sigma: &Mat4) -> GaussianDiagnostics {
    let ds = sigma.block(0, 0).det();
    let de = sigma.block(1, 1).det();
    let nu_s = ds.max(0.0).sqrt();
    let nu_e = de.max(0.0).sqrt();
    GaussianDiagnostics {
        det: sigma.det(),
        nu_s,
        nu_e,
        valid: nu_s >= 1.0 - DET_CLAMP && nu_e >= 1.0 - DET_CLAMP,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn purity_examples() {
        for w in [0.1, 1.0, 2.0, 37.0] {
            let p = purity_from_block(&Mat2::diag(1.0 / w, w)).unwrap();
            assert!((p - 1.0).abs() < 1e-15);
        }
        assert_eq!(purity_from_block(&Mat2::diag(2.0, 2.0)).unwrap(), 0.5);
    }

    #[test]
    fn purity_clamp_and_reject() {
        let tiny = Mat2::diag(1.0 - 5e-10, 1.0);
        assert_eq!(purity_from_block(&tiny).unwrap(), 1.0);
        let bad = Mat2::diag(0.5, 1.0);
        assert!(matches!(
            purity_from_block(&bad),
            Err(SymplecticError::NonPhysicalState { .. })
        ));
        let nan = Mat2::diag(f64::NAN, 1.0);
        assert!(purity_from_block(&nan).is_err());
    }

    #[test]
    fn vacuum_is_valid() {
        let (ws, we) = (1.0, 2.0);
        let v = Mat4::diag([1.0 / ws, ws, 1.0 / we, we]);
        let d = check_gaussian_valid(&v);
        assert_eq!(d.det, 1.0);
        assert_eq!((d.nu_s, d.nu_e), (1.0, 1.0));
        assert!(d.valid);
    }

    #[test]
    fn beam_splitter_mixed_marginals() {
        // Two-mode squeezed vacuum: marginals are thermal with equal ν.
        let r: f64 = 0.4;
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        let sigma = Mat4([[c, 0.0, s, 0.0], [0.0, c, 0.0, -s], [s, 0.0, c, 0.0], [0.0, -s, 0.0, c]]);
        let d = check_gaussian_valid(&sigma);
        assert!((d.det - 1.0).abs() < 1e-12);
        assert!((d.nu_s - d.nu_e).abs() < 1e-15);
        assert!(d.nu_s > 1.0);
        assert!(d.valid);
    }

    proptest! {
        #[test]
        fn purity_invariant_under_squeezing(a in 1.0f64..5.0, b in -0.9f64..0.9, d in 1.0f64..5.0, w in 0.05f64..20.0) {
            let b = b * (a * d - 1.0).sqrt();
            let sigma = Mat2::sym(a, b, d);
            prop_assume!(sigma.det() >= 1.0);
            let s = Mat2::diag(1.0 / w.sqrt(), w.sqrt());
            let squeezed = s * sigma * s;
            let p0 = purity_from_block(&sigma).unwrap();
            let p1 = purity_from_block(&squeezed).unwrap();
            prop_assert!((p0 - p1).abs() <= 1e-12);
        }
    }
}
