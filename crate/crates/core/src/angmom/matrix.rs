//! Matrix elements of `cos²β` in the rigid-rotor and Hund's case (b) bases.
//!
//! With the polarization of a pulse at angle `χ` in the XY plane,
//!
//! ```text
//! cos²β = 1/3 − (1/3) D⁽²⁾*₀₀ + (1/√6) e^{+2iχ} D⁽²⁾*₋₂₀ + (1/√6) e^{−2iχ} D⁽²⁾*₂₀
//! ```
//!
//! so the operator couples `ΔJ ∈ {0, ±2}` (`ΔJ ∈ {0, ±1, ±2}`, `ΔN ∈ {0, ±2}`
//! for case (b)) and `ΔM ∈ {0, ±2}`, with the `ΔM = ±2` entries carrying the
//! phases `e^{∓2iχ}`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{wigner_3j, wigner_6j, HalfInt};
use crate::basis::StateLabel;
use crate::error::{Error, Result};

const INV_SQRT6: f64 = 0.408_248_290_463_863;

/// `⟨J,M| D⁽²⁾*_{M₀,0} |J',M'⟩` for the rigid rotor.
pub fn rotmat_element_linear(j: HalfInt, m: HalfInt, jp: HalfInt, mp: HalfInt, m0: HalfInt) -> f64 {
    let two = HalfInt::int(2);
    let z = HalfInt::ZERO;
    let a = wigner_3j(j, two, jp, z, z, z);
    if a == 0.0 {
        return 0.0;
    }
    let b = wigner_3j(j, two, jp, -m, m0, mp);
    if b == 0.0 {
        return 0.0;
    }
    let phase = if (m.twice() / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let norm = (f64::from(j.multiplicity()) * f64::from(jp.multiplicity())).sqrt();
    phase * norm * a * b
}

/// `⟨Λ=0 N S=1 J M| D⁽²⁾*_{M₀,0} |Λ=0 N' S=1 J' M'⟩`, reduced through the 6-j
/// symbol `{N' J' 1; J N 2}`.
#[allow(clippy::too_many_arguments)]
pub fn rotmat_element_caseb(
    j: HalfInt,
    n: HalfInt,
    m: HalfInt,
    jp: HalfInt,
    np: HalfInt,
    mp: HalfInt,
    m0: HalfInt,
) -> f64 {
    let two = HalfInt::int(2);
    let one = HalfInt::int(1);
    let z = HalfInt::ZERO;
    let n3j = wigner_3j(n, two, np, z, z, z);
    if n3j == 0.0 {
        return 0.0;
    }
    let j3j = wigner_3j(j, two, jp, -m, m0, mp);
    if j3j == 0.0 {
        return 0.0;
    }
    let sixj = wigner_6j(np, jp, one, j, n, two);
    if sixj == 0.0 {
        return 0.0;
    }
    let exponent = (j + jp - m + one).twice() / 2;
    let phase = if exponent.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let norm = (f64::from(j.multiplicity())
        * f64::from(jp.multiplicity())
        * f64::from(n.multiplicity())
        * f64::from(np.multiplicity()))
    .sqrt();
    phase * norm * j3j * n3j * sixj
}

/// Combines the three rotation-matrix components into `⟨a|cos²β|b⟩` at
/// polarization angle `chi`.
fn cos2beta_element(
    a: &StateLabel,
    b: &StateLabel,
    chi: f64,
    element: impl Fn(HalfInt) -> f64,
) -> Complex64 {
    let dm = a.m - b.m;
    match dm {
        0 => {
            let identity = if a == b { 1.0 / 3.0 } else { 0.0 };
            Complex64::new(identity - element(HalfInt::ZERO) / 3.0, 0.0)
        }
        2 => Complex64::from_polar(INV_SQRT6 * element(HalfInt::int(2)), -2.0 * chi),
        -2 => Complex64::from_polar(INV_SQRT6 * element(HalfInt::int(-2)), 2.0 * chi),
        _ => Complex64::new(0.0, 0.0),
    }
}

/// Hermitian sparse matrix over an ordered list of basis labels.
#[derive(Clone, Debug)]
pub struct CouplingMatrix {
    labels: Vec<StateLabel>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex64>,
}

impl CouplingMatrix {
    fn from_rows(labels: Vec<StateLabel>, rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                cols.push(c);
                values.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            labels,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.values[range.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Looks up an element by basis label.
    pub fn element(&self, a: &StateLabel, b: &StateLabel) -> Option<Complex64> {
        let ia = self.labels.iter().position(|l| l == a)?;
        let ib = self.labels.iter().position(|l| l == b)?;
        Some(self.get(ia, ib))
    }

    /// Iterates `(row, col, value)` over stored entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.values[k]))
        })
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.entries()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    /// Real part as a [`RealCsr`]; only meaningful when the imaginary parts vanish.
    pub fn to_real(&self) -> RealCsr {
        RealCsr {
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            values: self.values.iter().map(|v| v.re).collect(),
        }
    }
}

/// Real sparse matrix in CSR layout, used for the zero-angle coupling in the
/// propagation hot loop.
#[derive(Clone, Debug, Default)]
pub struct RealCsr {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl RealCsr {
    pub fn dim(&self) -> usize {
        self.row_ptr.len().saturating_sub(1)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = (A − shift·I) x`.
    #[inline]
    pub fn apply_shifted(&self, shift: f64, x: &[Complex64], y: &mut [Complex64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut re = -shift * x[r].re;
            let mut im = -shift * x[r].im;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let v = self.values[k];
                let xc = x[self.cols[k]];
                re += v * xc.re;
                im += v * xc.im;
            }
            *out = Complex64::new(re, im);
        }
    }

    /// Row-restricted variant of [`apply_shifted`](Self::apply_shifted): rows
    /// outside `rows` are left untouched.
    #[inline]
    pub fn apply_shifted_rows(
        &self,
        shift: f64,
        x: &[Complex64],
        y: &mut [Complex64],
        rows: std::ops::Range<usize>,
    ) {
        for r in rows {
            let mut re = -shift * x[r].re;
            let mut im = -shift * x[r].im;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let v = self.values[k];
                let xc = x[self.cols[k]];
                re += v * xc.re;
                im += v * xc.im;
            }
            y[r] = Complex64::new(re, im);
        }
    }

    /// `(column, value)` pairs of one row.
    #[inline]
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// Largest column index coupled to any row in `0..=row`.
    pub fn reach(&self, row: usize) -> usize {
        (0..=row.min(self.dim().saturating_sub(1)))
            .flat_map(|r| {
                self.cols[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .copied()
            })
            .max()
            .unwrap_or(row)
    }

    /// Gershgorin bound on the spectrum: `(lower, upper)`.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..self.dim() {
            let mut diag = 0.0;
            let mut off = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[k] == r {
                    diag = self.values[k];
                } else {
                    off += self.values[k].abs();
                }
            }
            lo = lo.min(diag - off);
            hi = hi.max(diag + off);
        }
        (lo, hi)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] = self.values[k];
            }
        }
        m
    }
}

fn index_of(labels: &[StateLabel]) -> HashMap<StateLabel, usize> {
    labels.iter().enumerate().map(|(i, l)| (*l, i)).collect()
}

/// `⟨J,M|cos²β|J',M'⟩` over a rigid-rotor basis at polarization angle `chi`.
pub fn cos2beta_matrix_linear(basis: &[StateLabel], chi: f64) -> Result<CouplingMatrix> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    for l in basis {
        if l.j < 0 || l.m.abs() > l.j || l.n != l.j {
            return Err(Error::InvalidQuantumNumbers(format!(
                "not a rigid-rotor state: {l}"
            )));
        }
    }
    let index = index_of(basis);
    let rows = basis
        .iter()
        .map(|a| {
            let mut row = Vec::new();
            for dj in [-2, 0, 2] {
                for dm in [-2, 0, 2] {
                    let b = StateLabel::rotor(a.j + dj, a.m + dm);
                    let Some(&col) = index.get(&b) else { continue };
                    let v = cos2beta_element(a, &b, chi, |m0| {
                        rotmat_element_linear(
                            HalfInt::int(a.j),
                            HalfInt::int(a.m),
                            HalfInt::int(b.j),
                            HalfInt::int(b.m),
                            m0,
                        )
                    });
                    if v.norm() > 0.0 {
                        row.push((col, v));
                    }
                }
            }
            row
        })
        .collect();
    Ok(CouplingMatrix::from_rows(basis.to_vec(), rows))
}

/// `⟨J,N,M|cos²β|J',N',M'⟩` over a Hund's case (b) basis (`S = 1`, `Λ = 0`, odd `N`).
pub fn cos2beta_matrix_caseb(basis: &[StateLabel], chi: f64) -> Result<CouplingMatrix> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    for l in basis {
        if l.n % 2 == 0 {
            return Err(Error::InvalidQuantumNumbers(format!(
                "even N in case (b) basis: {l}"
            )));
        }
        if l.n < 0 || l.j < 0 || (l.j - l.n).abs() > 1 || l.m.abs() > l.j {
            return Err(Error::InvalidQuantumNumbers(format!(
                "not a case (b) state: {l}"
            )));
        }
    }
    let index = index_of(basis);
    let rows = basis
        .iter()
        .map(|a| {
            let mut row = Vec::new();
            for dn in [-2, 0, 2] {
                for dj in -2..=2 {
                    for dm in [-2, 0, 2] {
                        let b = StateLabel::case_b(a.j + dj, a.n + dn, a.m + dm);
                        let Some(&col) = index.get(&b) else { continue };
                        let v = cos2beta_element(a, &b, chi, |m0| {
                            rotmat_element_caseb(
                                HalfInt::int(a.j),
                                HalfInt::int(a.n),
                                HalfInt::int(a.m),
                                HalfInt::int(b.j),
                                HalfInt::int(b.n),
                                HalfInt::int(b.m),
                                m0,
                            )
                        });
                        if v.norm() > 0.0 {
                            row.push((col, v));
                        }
                    }
                }
            }
            row
        })
        .collect();
    Ok(CouplingMatrix::from_rows(basis.to_vec(), rows))
}

/// Wigner small-d matrix element `d^j_{m', m}(β)` (integer `j`).
pub fn wigner_small_d(j: i32, mp: i32, m: i32, beta: f64) -> f64 {
    if mp.abs() > j || m.abs() > j {
        return 0.0;
    }
    let fact = |n: i32| -> f64 { (1..=n).map(f64::from).product() };
    let pre = (fact(j + mp) * fact(j - mp) * fact(j + m) * fact(j - m)).sqrt();
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let kmin = 0.max(m - mp);
    let kmax = (j + m).min(j - mp);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let sign = if (k - m + mp) % 2 == 0 { 1.0 } else { -1.0 };
        let den = fact(j + m - k) * fact(k) * fact(j - k - mp) * fact(k - m + mp);
        sum += sign / den * c.powi(2 * j - 2 * k + m - mp) * s.powi(2 * k - m + mp);
    }
    pre * sum
}
