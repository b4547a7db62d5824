//! Production code paths compared against the reference implementations in
//! [`crate::oracle`].

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::angmom::{cos2beta_matrix_caseb, cos2beta_matrix_linear, wigner_3j, wigner_6j, HalfInt};
use crate::basis::StateLabel;
use crate::error::Result;
use crate::molecule::{revival_time, MoleculeSpec};
use crate::observables::Ensemble;
use crate::oracle::{
    caseb_element_product_basis, cos2beta_element_quadrature, dense_train, racah_3j_naive,
    racah_6j_naive,
};
use crate::propagator::Engine;
use crate::pulsetrain::equal_train;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} cases, max error {:.3e} (tolerance {:.1e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.max_error,
            self.tolerance
        )
    }
}

fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

/// Every 3-j symbol with all `j ≤ twice_max/2`, integer and half-integer.
pub fn check_3j(twice_max: i32) -> CheckResult {
    let mut cases = 0;
    let mut max_error: f64 = 0.0;
    for j1 in 0..=twice_max {
        for j2 in 0..=twice_max {
            for j3 in (j1 - j2).abs()..=(j1 + j2).min(twice_max) {
                if (j1 + j2 + j3) % 2 != 0 {
                    continue;
                }
                for m1 in (-j1..=j1).step_by(2) {
                    for m2 in (-j2..=j2).step_by(2) {
                        let m3 = -m1 - m2;
                        if m3.abs() > j3 {
                            continue;
                        }
                        let exact = racah_3j_naive([j1, j2, j3, m1, m2, m3]);
                        let fast = wigner_3j(h(j1), h(j2), h(j3), h(m1), h(m2), h(m3));
                        max_error = max_error.max((exact - fast).abs());
                        cases += 1;
                    }
                }
            }
        }
    }
    CheckResult {
        name: format!("3-j symbols, j <= {}", f64::from(twice_max) / 2.0),
        cases,
        max_error,
        tolerance: 1e-12,
    }
}

fn triangle(a: i32, b: i32, c: i32) -> bool {
    c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0
}

/// Every 6-j symbol with all `j ≤ twice_max/2`.
pub fn check_6j(twice_max: i32) -> CheckResult {
    let mut cases = 0;
    let mut max_error: f64 = 0.0;
    let r = 0..=twice_max;
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                if !triangle(a, b, c) {
                    continue;
                }
                for d in r.clone() {
                    for e in r.clone() {
                        if !triangle(d, e, c) {
                            continue;
                        }
                        for f in r.clone() {
                            if !triangle(a, e, f) || !triangle(d, b, f) {
                                continue;
                            }
                            let exact = racah_6j_naive([a, b, c, d, e, f]);
                            let fast = wigner_6j(h(a), h(b), h(c), h(d), h(e), h(f));
                            max_error = max_error.max((exact - fast).abs());
                            cases += 1;
                        }
                    }
                }
            }
        }
    }
    CheckResult {
        name: format!("6-j symbols, j <= {}", f64::from(twice_max) / 2.0),
        cases,
        max_error,
        tolerance: 1e-12,
    }
}

/// Rigid-rotor `cos²β` matrix, all `J ≤ j_max`, against spherical quadrature.
pub fn check_cos2beta_linear(j_max: i32, chis: &[f64]) -> Result<CheckResult> {
    let basis: Vec<StateLabel> = (0..=j_max)
        .flat_map(|j| (-j..=j).map(move |m| StateLabel::rotor(j, m)))
        .collect();
    let mut cases = 0;
    let mut max_error: f64 = 0.0;
    for &chi in chis {
        let mat = cos2beta_matrix_linear(&basis, chi)?;
        for (r, a) in basis.iter().enumerate() {
            for (c, b) in basis.iter().enumerate() {
                let exact = cos2beta_element_quadrature(a.j, a.m, b.j, b.m, chi);
                max_error = max_error.max((mat.get(r, c) - exact).norm());
                cases += 1;
            }
        }
    }
    Ok(CheckResult {
        name: format!("cos²β rigid rotor, J <= {j_max}"),
        cases,
        max_error,
        tolerance: 1e-8,
    })
}

/// Case (b) `cos²β` matrix, odd `N ≤ n_max`, against the uncoupled-basis expansion.
pub fn check_cos2beta_caseb(n_max: i32, chis: &[f64]) -> Result<CheckResult> {
    let mut basis = Vec::new();
    for n in (1..=n_max).step_by(2) {
        for j in n - 1..=n + 1 {
            for m in -j..=j {
                basis.push(StateLabel::case_b(j, n, m));
            }
        }
    }
    let mut cases = 0;
    let mut max_error: f64 = 0.0;
    for &chi in chis {
        let mat = cos2beta_matrix_caseb(&basis, chi)?;
        for (r, a) in basis.iter().enumerate() {
            for (c, b) in basis.iter().enumerate() {
                let exact = caseb_element_product_basis(a.j, a.n, a.m, b.j, b.n, b.m, chi);
                max_error = max_error.max((mat.get(r, c) - exact).norm());
                cases += 1;
            }
        }
    }
    Ok(CheckResult {
        name: format!("cos²β case (b), N <= {n_max}"),
        cases,
        max_error,
        tolerance: 1e-10,
    })
}

/// Thermal ¹⁴N₂ through an equal train: sparse propagator vs dense exponentials,
/// compared per `|C|²`. Returns the population check and the norm drift.
pub fn check_propagator(
    count: usize,
    total_p: f64,
    delta: f64,
    tau_over_trev: f64,
    level_max: i32,
) -> Result<(CheckResult, CheckResult)> {
    let mol = MoleculeSpec::n2_14();
    let tau = tau_over_trev * revival_time(&mol)?;
    let train = equal_train(count, tau, delta, total_p, 0.0)?;
    // Both sides share the truncated basis, so its shell diagnostic is moot here.
    let ens = Ensemble::thermal(&mol, 8.0, total_p, Some(level_max))?
        .with_truncation_limit(f64::INFINITY)?;
    let finals = ens.propagate(&train, Engine::Sudden)?;
    let mut cases = 0;
    let mut max_error: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for batch in &finals {
        let state = &batch.state;
        let labels = state.labels();
        drift = drift.max(state.max_norm_drift());
        let mut psi =
            DMatrix::from_element(labels.len(), state.columns(), Complex64::new(0.0, 0.0));
        for (c, label) in batch.initial.iter().enumerate() {
            psi[(state.plan().index_of(label).expect("initial state"), c)] =
                Complex64::new(1.0, 0.0);
        }
        let exact = dense_train(&mol, labels, &train, &psi)?;
        for c in 0..state.columns() {
            for (a, b) in state.column(c).iter().zip(exact.column(c).iter()) {
                max_error = max_error.max((a.norm_sqr() - b.norm_sqr()).abs());
                cases += 1;
            }
        }
    }
    Ok((
        CheckResult {
            name: format!("{count}-pulse train vs dense exponentials, J <= {level_max}"),
            cases,
            max_error,
            tolerance: 1e-8,
        },
        CheckResult {
            name: "norm drift".into(),
            cases: finals.len(),
            max_error: drift,
            tolerance: 1e-9,
        },
    ))
}

/// The oracle suites at the given sizes.
pub fn run_all(quick: bool) -> Result<Vec<CheckResult>> {
    let (jt, j_lin, n_b, level) = if quick { (8, 4, 3, 14) } else { (16, 6, 5, 20) };
    let chis = [0.0, 0.7, std::f64::consts::FRAC_PI_2];
    let mut out = vec![check_3j(jt), check_6j(jt)];
    out.push(check_cos2beta_linear(j_lin, &chis)?);
    out.push(check_cos2beta_caseb(n_b, &chis)?);
    let (pop, norm) = check_propagator(8, 5.0, std::f64::consts::FRAC_PI_4, 0.25, level)?;
    out.push(pop);
    out.push(norm);
    Ok(out)
}
