//! Dense-matrix propagation used as the exactness reference.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::angmom::{cos2beta_matrix_caseb, cos2beta_matrix_linear};
use crate::basis::{Coupling, StateLabel};
use crate::error::Result;
use crate::molecule::MoleculeSpec;
use crate::pulsetrain::TrainSpec;

/// `exp(i·p·H)` by scaling and squaring of a Taylor series.
///
/// (nalgebra's complex Hermitian eigensolver is not used: it was observed to
/// return inaccurate decompositions for some of these matrices.)
pub fn dense_expm_i(h: &DMatrix<Complex64>, p: f64) -> DMatrix<Complex64> {
    let n = h.nrows();
    let a = h * Complex64::new(0.0, p);
    let norm1 = (0..n)
        .map(|c| a.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.25 {
        (norm1 / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let a = a / Complex64::new(2f64.powi(squarings), 0.0);
    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..40 {
        term = &term * &a / Complex64::new(k as f64, 0.0);
        result += &term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Delta-pulse train by full matrix exponentials of each pulse's `cos²β`
/// matrix; each column of `initial` is one state. Returns the states at the
/// last pulse.
pub fn dense_train(
    molecule: &MoleculeSpec,
    labels: &[StateLabel],
    train: &TrainSpec,
    initial: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>> {
    let energies: Vec<f64> = labels.iter().map(|l| molecule.energy(l)).collect();
    let mut psi = initial.clone();
    let mut t = 0.0;
    for p in &train.pulses {
        let dt = p.center_time - t;
        for (mut row, e) in psi.row_iter_mut().zip(&energies) {
            row *= Complex64::cis(-e * dt);
        }
        t = p.center_time;
        let v = match molecule.coupling() {
            Coupling::Linear => cos2beta_matrix_linear(labels, p.polarization_angle)?,
            Coupling::CaseB => cos2beta_matrix_caseb(labels, p.polarization_angle)?,
        };
        psi = dense_expm_i(&v.to_dense(), p.strength) * psi;
    }
    Ok(psi)
}
