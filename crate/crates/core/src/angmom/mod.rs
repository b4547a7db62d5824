//! Angular-momentum algebra.
//!
//! Wigner 3-j / 6-j symbols are evaluated exactly (big-integer Racah sums over
//! prime-factorized factorials) and only converted to `f64` at the very end.
//! On top of them sit the matrix elements of `cos²β` between rigid-rotor
//! states `|J,M⟩` and Hund's case (b) states `|J,N,M⟩`.

mod halfint;
mod matrix;
mod primes;
mod wigner;

pub use halfint::HalfInt;
pub use matrix::{
    cos2beta_matrix_caseb, cos2beta_matrix_linear, rotmat_element_caseb, rotmat_element_linear,
    wigner_small_d, CouplingMatrix, RealCsr,
};
pub use wigner::{clear_cache, wigner_3j, wigner_3j_uncached, wigner_6j, wigner_6j_uncached};
