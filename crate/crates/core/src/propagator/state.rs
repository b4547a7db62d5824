use std::sync::Arc;

use num_complex::Complex64;

use super::ode::{integrate, OdeOptions};
use super::plan::BasisPlan;
use super::sudden::{taylor_rows, transpose, xi_in_frame, Scratch};
use crate::basis::{Coupling, StateLabel};
use crate::error::{Error, Result};
use crate::pulsetrain::{PulseShape, PulseSpec};

/// How `exp(i·P·cos²β)` is applied by a sudden kick.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SuddenMethod {
    /// Substepped Taylor series of the sparse coupling matrix.
    #[default]
    Taylor,
    /// Adaptive integration over the auxiliary parameter `ξ ∈ [0, 1]`.
    Xi,
}

/// One or more wave packets over a shared truncated basis and a shared clock.
///
/// Coefficients are Schrödinger-picture amplitudes `a_k(t)` whose phase
/// convention coincides with the interaction picture at `t = 0`; populations
/// are identical in both pictures.
#[derive(Clone, Debug)]
pub struct State {
    plan: Arc<BasisPlan>,
    /// Column-major, `columns × dim`.
    data: Vec<Complex64>,
    columns: usize,
    time: f64,
}

impl State {
    /// Pure basis state at time zero.
    pub fn basis_state(plan: Arc<BasisPlan>, label: &StateLabel) -> Result<Self> {
        Self::basis_states(plan, std::slice::from_ref(label))
    }

    /// One packet per label, each starting in that basis state at time zero.
    pub fn basis_states(plan: Arc<BasisPlan>, labels: &[StateLabel]) -> Result<Self> {
        let n = plan.dim();
        let mut data = vec![Complex64::new(0.0, 0.0); n * labels.len()];
        for (c, label) in labels.iter().enumerate() {
            let i = plan.index_of(label).ok_or_else(|| {
                Error::InvalidQuantumNumbers(format!("{label} is outside the basis"))
            })?;
            data[c * n + i] = Complex64::new(1.0, 0.0);
        }
        Ok(State {
            plan,
            data,
            columns: labels.len(),
            time: 0.0,
        })
    }

    /// Single packet from explicit coefficients.
    pub fn from_coeffs(plan: Arc<BasisPlan>, coeffs: Vec<Complex64>, time: f64) -> Result<Self> {
        if coeffs.len() != plan.dim() {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients for a basis of {}",
                coeffs.len(),
                plan.dim()
            )));
        }
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm.sqrt() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "state norm {}",
                norm.sqrt()
            )));
        }
        Ok(State {
            plan,
            data: coeffs,
            columns: 1,
            time,
        })
    }

    pub fn plan(&self) -> &Arc<BasisPlan> {
        &self.plan
    }

    pub fn labels(&self) -> &[StateLabel] {
        self.plan.labels()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn dim(&self) -> usize {
        self.plan.dim()
    }

    pub fn column(&self, c: usize) -> &[Complex64] {
        let n = self.dim();
        &self.data[c * n..(c + 1) * n]
    }

    /// Coefficients of the first packet.
    pub fn coeffs(&self) -> &[Complex64] {
        self.column(0)
    }

    pub fn norm(&self, c: usize) -> f64 {
        self.column(c)
            .iter()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest `|‖C‖ − 1|` over all packets.
    pub fn max_norm_drift(&self) -> f64 {
        (0..self.columns)
            .map(|c| (self.norm(c) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn populations(&self, c: usize) -> Vec<f64> {
        self.column(c).iter().map(|x| x.norm_sqr()).collect()
    }

    fn columns_mut(&mut self) -> impl Iterator<Item = &mut [Complex64]> {
        let n = self.plan.dim();
        self.data.chunks_exact_mut(n)
    }

    /// Runs `f` on the coefficients laid out row-major (`x[row·columns + col]`).
    pub(crate) fn with_rows<R>(&mut self, f: impl FnOnce(&mut [Complex64], usize) -> R) -> R {
        let (n, c) = (self.plan.dim(), self.columns);
        let mut rows = vec![Complex64::new(0.0, 0.0); n * c];
        transpose(&self.data, &mut rows, c, n);
        let out = f(&mut rows, c);
        transpose(&rows, &mut self.data, n, c);
        out
    }

    pub(crate) fn advance_clock(&mut self, dt: f64) {
        self.time += dt;
    }

    pub(crate) fn apply_diagonal(&mut self, phases: &[Complex64]) {
        for col in self.data.chunks_exact_mut(phases.len()) {
            for (x, p) in col.iter_mut().zip(phases) {
                *x *= p;
            }
        }
    }

    /// Field-free evolution by `duration` ps. Negative durations evolve backwards.
    pub fn free_evolve(&mut self, duration: f64) {
        if duration != 0.0 {
            let phases = self.plan.phases(duration, 0.0);
            self.apply_diagonal(&phases);
        }
        self.time += duration;
    }

    /// Applies the rotation `R_z(χ)`, i.e. `C_M ← e^{−iMχ} C_M`.
    pub fn rotate(&mut self, chi: f64) {
        let phases = self.plan.phases(0.0, chi);
        self.apply_diagonal(&phases);
    }

    pub fn check_truncation(&self) -> Result<()> {
        for c in 0..self.columns {
            self.plan.check_truncation(self.column(c))?;
        }
        Ok(())
    }

    /// Instantaneous kick `exp(i·P·cos²β_χ)`; pulse duration is ignored.
    pub fn kick_sudden(&mut self, pulse: &PulseSpec) -> Result<()> {
        self.kick_sudden_with(pulse, SuddenMethod::Taylor)
    }

    pub fn kick_sudden_with(&mut self, pulse: &PulseSpec, method: SuddenMethod) -> Result<()> {
        if !pulse.strength.is_finite() || !pulse.polarization_angle.is_finite() {
            return Err(Error::InvalidParameter(format!("pulse {pulse:?}")));
        }
        if pulse.strength == 0.0 {
            return Ok(());
        }
        let chi = pulse.polarization_angle;
        self.rotate(-chi);
        let plan = Arc::clone(&self.plan);
        match method {
            SuddenMethod::Taylor => self.with_rows(|x, cols| {
                taylor_rows(&plan, pulse.strength, x, cols, &mut Scratch::default());
            }),
            SuddenMethod::Xi => {
                for col in self.columns_mut() {
                    xi_in_frame(&plan, pulse.strength, col)?;
                }
            }
        }
        self.rotate(chi);
        self.check_truncation()
    }

    /// Integrates the time-dependent Schrödinger equation across one Gaussian pulse.
    pub fn kick_ode(&mut self, pulse: &PulseSpec) -> Result<()> {
        self.kick_ode_cluster(std::slice::from_ref(pulse))
    }

    /// Integrates across a group of (possibly overlapping) Gaussian pulses,
    /// from the start of the earliest window to the end of the latest.
    pub fn kick_ode_cluster(&mut self, pulses: &[PulseSpec]) -> Result<()> {
        if self.plan.coupling() != Coupling::Linear {
            return Err(Error::Unsupported {
                molecule: "case (b) basis".into(),
                what: "ODE engine (delta pulses only)".into(),
            });
        }
        if pulses.is_empty() {
            return Ok(());
        }
        for p in pulses {
            if p.shape != PulseShape::Gaussian || !(p.sigma > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "ODE kick needs a Gaussian pulse with σ > 0, got {p:?}"
                )));
            }
        }
        let t0 = pulses
            .iter()
            .map(|p| p.window().0)
            .fold(f64::INFINITY, f64::min);
        let t1 = pulses
            .iter()
            .map(|p| p.window().1)
            .fold(f64::NEG_INFINITY, f64::max);
        let h_max = pulses.iter().map(|p| p.sigma).fold(f64::INFINITY, f64::min) / 20.0;
        self.free_evolve(t0 - self.time);

        let plan = Arc::clone(&self.plan);
        let n = plan.dim();
        let energies = plan.energies();
        let v0 = plan.coupling_matrix();
        let frames: Vec<Vec<Complex64>> = pulses
            .iter()
            .map(|p| plan.phases(0.0, -p.polarization_angle))
            .collect();
        let zero = Complex64::new(0.0, 0.0);
        let mut u = vec![zero; n];
        let mut w = vec![zero; n];
        let mut z = vec![zero; n];
        let mut acc = vec![zero; n];
        let mut rot = vec![zero; n];

        let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
            for (r, e) in rot.iter_mut().zip(energies) {
                *r = Complex64::cis(-e * (t - t0));
            }
            let rates: Vec<f64> = pulses.iter().map(|p| p.rate(t)).collect();
            for (yc, dc) in y.chunks_exact(n).zip(dy.chunks_exact_mut(n)) {
                for i in 0..n {
                    u[i] = yc[i] * rot[i];
                    acc[i] = zero;
                }
                for (rate, frame) in rates.iter().zip(&frames) {
                    if *rate == 0.0 {
                        continue;
                    }
                    for i in 0..n {
                        w[i] = u[i] * frame[i];
                    }
                    v0.apply_shifted(0.0, &w, &mut z);
                    for i in 0..n {
                        acc[i] += z[i] * frame[i].conj() * rate;
                    }
                }
                for i in 0..n {
                    let a = acc[i] * rot[i].conj();
                    dc[i] = Complex64::new(-a.im, a.re);
                }
            }
        };
        let opts = OdeOptions {
            rtol: 1e-10,
            atol: 1e-13,
            h_max,
            h_init: Some(h_max / 4.0),
            ..Default::default()
        };
        integrate(rhs, t0, t1, &mut self.data, &opts)?;
        self.time = t0;
        self.free_evolve(t1 - t0);
        self.check_truncation()
    }
}
