//! Small, stack-allocated matrix algebra for two-mode Gaussian states.
//!
//! Everything here is 2×2 or 4×4 (plus the 6×6 second compound of the latter). Determinants and eigenvalues are closed
//! form, so results are bit-reproducible across platforms and cheap enough for
//! million-point sweeps.

mod exterior;
mod gaussian;
mod mat2;
mod mat4;

pub use exterior::{compound2, derivation2, Mat6, PAIRS, PAIR_E, PAIR_S};
pub use gaussian::{
    check_gaussian_valid, purity_from_block, purity_from_det, GaussianDiagnostics, SymplecticError, DET_CLAMP,
    DET_REJECT,
};
pub use mat2::{eig_sym2, Mat2};
pub use mat4::{frobenius_norm, symplectic_form, Mat4, Sym4, OMEGA4};
