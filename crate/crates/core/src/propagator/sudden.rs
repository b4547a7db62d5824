//! `exp(i·P·cos²β)` acting on a vector.
//!
//! Two independent routes: a Taylor series of the sparse zero-angle coupling
//! (substepped so each step has spectral radius ≤ `THETA_MAX`), applied to a
//! block of vectors at once, and direct integration of `dC/dξ = i·P·cos²β·C`
//! over `ξ ∈ [0, 1]`, one vector at a time.

use num_complex::Complex64;

use super::ode::{integrate, OdeOptions};
use super::plan::BasisPlan;
use crate::error::Result;

const THETA_MAX: f64 = 2.0;
const MAX_TERMS: usize = 80;
/// Amplitudes below this are treated as outside the active support.
const SUPPORT_FLOOR: f64 = 1e-36;

/// Work buffers for [`taylor_rows`].
#[derive(Default)]
pub(crate) struct Scratch {
    term: Vec<Complex64>,
    next: Vec<Complex64>,
}

/// Last row holding an entry with `|c|² > SUPPORT_FLOOR`.
fn last_significant(x: &[Complex64], cols: usize, upto: usize) -> usize {
    (0..=upto)
        .rev()
        .find(|&r| {
            x[r * cols..(r + 1) * cols]
                .iter()
                .any(|c| c.norm_sqr() > SUPPORT_FLOOR)
        })
        .unwrap_or(0)
}

/// `y[rows] = (V₀ − shift) x` for a row-major block of `cols` vectors.
fn spmm_rows(
    plan: &BasisPlan,
    shift: f64,
    x: &[Complex64],
    y: &mut [Complex64],
    cols: usize,
    top: usize,
) {
    let v0 = plan.coupling_matrix();
    for r in 0..=top {
        let out = &mut y[r * cols..(r + 1) * cols];
        let own = &x[r * cols..(r + 1) * cols];
        for (o, xi) in out.iter_mut().zip(own) {
            *o = xi * -shift;
        }
        for (c, v) in v0.row(r) {
            let src = &x[c * cols..(c + 1) * cols];
            for (o, xi) in out.iter_mut().zip(src) {
                *o += xi * v;
            }
        }
    }
}

/// `X ← exp(i·strength·V₀) X` by substepped Taylor series, where `X` holds
/// `cols` vectors row-major (`x[row·cols + col]`).
pub(crate) fn taylor_rows(
    plan: &BasisPlan,
    strength: f64,
    x: &mut [Complex64],
    cols: usize,
    scratch: &mut Scratch,
) {
    if strength == 0.0 || cols == 0 {
        return;
    }
    let n = plan.dim();
    let (shift, radius) = plan.spectral_bounds();
    let steps = ((strength.abs() * radius) / THETA_MAX).ceil().max(1.0) as usize;
    let h = strength / steps as f64;
    let global = Complex64::cis(h * shift);
    let zero = Complex64::new(0.0, 0.0);
    scratch.term.clear();
    scratch.term.resize(n * cols, zero);
    scratch.next.clear();
    scratch.next.resize(n * cols, zero);
    let (term, next) = (&mut scratch.term, &mut scratch.next);
    let x_norm = (x.iter().map(|c| c.norm_sqr()).sum::<f64>() / cols as f64).sqrt();
    // rows of `next` above this are known to be zero
    let mut dirty_next = 0;

    for _ in 0..steps {
        term.copy_from_slice(x);
        let mut dirty_term = n - 1;
        let mut hi = last_significant(x, cols, n - 1);
        for k in 1..=MAX_TERMS {
            if dirty_term > hi {
                term[(hi + 1) * cols..(dirty_term + 1) * cols].fill(zero);
                dirty_term = hi;
            }
            let top = plan.reach(hi);
            spmm_rows(plan, shift, term, next, cols, top);
            dirty_next = dirty_next.max(top);
            let c = Complex64::new(0.0, h / k as f64);
            let mut norm = 0.0;
            for (xi, v) in x[..(top + 1) * cols]
                .iter_mut()
                .zip(next[..(top + 1) * cols].iter_mut())
            {
                *v *= c;
                *xi += *v;
                norm += v.norm_sqr();
            }
            std::mem::swap(term, next);
            std::mem::swap(&mut dirty_term, &mut dirty_next);
            if norm.sqrt() <= 1e-17 * x_norm.max(f64::MIN_POSITIVE) {
                break;
            }
            hi = last_significant(term, cols, top);
        }
        for v in x.iter_mut() {
            *v *= global;
        }
    }
}

/// Transposes a row-major `rows × cols` block into `dst`.
pub(crate) fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// `x ← exp(i·strength·V₀) x` by integrating the ξ-equation.
pub(crate) fn xi_in_frame(plan: &BasisPlan, strength: f64, x: &mut [Complex64]) -> Result<()> {
    if strength == 0.0 {
        return Ok(());
    }
    let v0 = plan.coupling_matrix();
    let opts = OdeOptions {
        rtol: 1e-13,
        atol: 1e-16,
        ..Default::default()
    };
    integrate(
        |_, y, dy| {
            v0.apply_shifted(0.0, y, dy);
            for d in dy.iter_mut() {
                *d = Complex64::new(-d.im * strength, d.re * strength);
            }
        },
        0.0,
        1.0,
        x,
        &opts,
    )?;
    Ok(())
}
