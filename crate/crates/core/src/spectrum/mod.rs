//! Eigenvalues and eigenfunctions of `H = -ħ²/2 d²/dq² + V(q)` in an energy
//! window, at quantum numbers up to ~10⁴.
//!
//! The solver reduces the symmetric problem to the half line per parity,
//! integrates outward and inward with the renormalized Numerov scheme,
//! brackets each eigenvalue through the node count of the outward sweep
//! (which cannot skip states), and refines on the log-derivative mismatch
//! at a matching point near the outer turning point. A dense
//! finite-difference Sturm-bisection oracle provides an independent
//! validation path.

mod dense;
mod numerov;

pub use dense::{dense_oracle, dense_oracle_extrapolated};

use crate::error::{Error, Result};
use crate::model::PotentialSpec;
use crate::quad;
use numerov::HalfLine;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Uniform symmetric position grid `q_i = (i - half) * step`,
/// `i = 0..=2*half`.
#[derive(Clone, Copy, Debug)]
pub struct Grid {
    step: f64,
    half: usize,
}

// a grid always holds at least the center point
#[allow(clippy::len_without_is_empty)]
impl Grid {
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        2 * self.half + 1
    }

    pub fn q_min(&self) -> f64 {
        -(self.half as f64) * self.step
    }

    pub fn q_max(&self) -> f64 {
        self.half as f64 * self.step
    }

    pub fn q(&self, i: usize) -> f64 {
        (i as f64 - self.half as f64) * self.step
    }

    pub fn center(&self) -> usize {
        self.half
    }
}

/// One numerically resolved eigenpair on the full line.
#[derive(Clone, Debug)]
pub struct EigenState {
    /// Node count == quantum number.
    pub n: usize,
    pub energy: f64,
    pub parity: Parity,
    pub grid: Grid,
    /// Normalized samples: `Σ φ² step = 1`.
    pub samples: Vec<f64>,
}

/// All states of a window, sorted by energy.
#[derive(Clone, Debug)]
pub struct SpectralWindow {
    pub spec: PotentialSpec,
    pub hbar: f64,
    pub eps_min: f64,
    pub eps_max: f64,
    pub states: Vec<EigenState>,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Absolute eigenvalue error target driving the grid resolution.
    pub target_eps_error: f64,
    /// Re-solve one sample state on a halved grid and fail on disagreement.
    pub grid_check: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            target_eps_error: 1e-11,
            grid_check: true,
        }
    }
}

/// Weyl/WKB estimate of the quantum number at energy `eps`:
/// `n ≈ Ω(eps)/(2πħ) - 1/2`, clamped at 0.
pub fn eigen_index_estimate(spec: &PotentialSpec, hbar: f64, eps: f64) -> Result<f64> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidParams(format!(
            "hbar must be > 0, got {hbar}"
        )));
    }
    let omega = spec.action_area(eps)?;
    Ok((omega / (2.0 * std::f64::consts::PI * hbar) - 0.5).max(0.0))
}

/// Solve every eigenstate with energy in `[eps_min, eps_max]` (and matching
/// parity, when a filter is given). An empty window yields an empty result.
pub fn solve_eigen_window(
    spec: &PotentialSpec,
    hbar: f64,
    eps_min: f64,
    eps_max: f64,
    parity_filter: Option<Parity>,
    opts: &SolverOptions,
) -> Result<SpectralWindow> {
    let states = map_eigen_window(spec, hbar, eps_min, eps_max, parity_filter, opts, Ok)?;
    Ok(SpectralWindow {
        spec: *spec,
        hbar,
        eps_min,
        eps_max,
        states,
    })
}

/// Streaming variant of [`solve_eigen_window`]: each solved state is handed
/// to `f` and dropped, so windows with very large grids never hold all
/// wavefunction arrays at once. Results come back sorted by energy.
pub fn map_eigen_window<T, F>(
    spec: &PotentialSpec,
    hbar: f64,
    eps_min: f64,
    eps_max: f64,
    parity_filter: Option<Parity>,
    opts: &SolverOptions,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(EigenState) -> Result<T> + Sync,
{
    if !(hbar > 0.0) {
        return Err(Error::InvalidParams(format!(
            "hbar must be > 0, got {hbar}"
        )));
    }
    if !(eps_min < eps_max) {
        return Err(Error::InvalidParams(format!(
            "empty energy window [{eps_min}, {eps_max}]"
        )));
    }

    let hl = build_halfline(spec, hbar, eps_max, opts.target_eps_error)?;

    let parities: &[Parity] = match parity_filter {
        Some(Parity::Even) => &[Parity::Even],
        Some(Parity::Odd) => &[Parity::Odd],
        None => &[Parity::Even, Parity::Odd],
    };
    let mut jobs: Vec<(Parity, usize)> = Vec::new();
    for &p in parities {
        let k_lo = hl.count_nodes(eps_min, p);
        let k_hi = hl.count_nodes(eps_max, p);
        jobs.extend((k_lo..k_hi).map(|k| (p, k)));
    }
    if jobs.is_empty() {
        return Ok(Vec::new());
    }

    if opts.grid_check {
        let (p, k) = jobs[jobs.len() / 2];
        let eps_coarse = locate_eigenvalue(&hl, p, k, eps_min, eps_max)?;
        let fine = refine_halfline(spec, &hl);
        let eps_fine = locate_eigenvalue(&fine, p, k, eps_min, eps_max)?;
        let delta = (eps_coarse - eps_fine).abs();
        let bound = 1e-10 * eps_coarse.abs().max(1.0);
        if delta > bound {
            return Err(Error::GridAccuracy { delta, bound });
        }
    }

    let mut solved: Vec<(f64, usize, Parity, T)> = jobs
        .par_iter()
        .map(|&(p, k)| {
            let eps = locate_eigenvalue(&hl, p, k, eps_min, eps_max)?;
            let state = build_state(&hl, eps, p, k)?;
            let key = (state.energy, state.n, state.parity);
            let mapped = f(state)?;
            Ok((key.0, key.1, key.2, mapped))
        })
        .collect::<Result<Vec<_>>>()?;

    solved.sort_by(|a, b| a.0.total_cmp(&b.0));

    // completeness bookkeeping: within each parity class consecutive node
    // counts must step by exactly 2
    for &p in parities {
        let ns: Vec<usize> = solved.iter().filter(|s| s.2 == p).map(|s| s.1).collect();
        for w in ns.windows(2) {
            if w[1] != w[0] + 2 {
                return Err(Error::SolverInconsistency(format!(
                    "missing {} state between n={} and n={}",
                    p.as_str(),
                    w[0],
                    w[1]
                )));
            }
        }
    }
    for w in solved.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::SolverInconsistency(
                "energies not strictly increasing".into(),
            ));
        }
    }

    Ok(solved.into_iter().map(|s| s.3).collect())
}

/// Build the half-line sampling for a window topped at `eps_max`.
///
/// The domain extends 1.5× past the outer turning point and is grown until
/// the forbidden tail holds at least 14 nats of decay action. The step
/// comes from the Numerov phase-error model `δφ/φ = (kh)⁴/960` aimed at
/// `target` absolute eigenvalue error.
fn build_halfline(spec: &PotentialSpec, hbar: f64, eps_max: f64, target: f64) -> Result<HalfLine> {
    let min_v = spec.min_energy();
    let tp = spec.turning_points(eps_max)?;
    let q_turn = *tp.last().expect("turning points");

    let mut q_max = 1.5 * q_turn;
    for _ in 0..200 {
        let tail = quad::integrate(
            |q| (2.0 * (spec.value(q) - eps_max)).max(0.0).sqrt(),
            q_turn,
            q_max,
            1e-6,
        )?
        .value
            / hbar;
        if tail >= 14.0 {
            break;
        }
        q_max *= 1.15;
    }

    let omega = spec.action_area(eps_max)?;
    let t_ref = match spec.classical_period(eps_max) {
        Ok(t) => t,
        Err(Error::DivergentPeriod) => spec.classical_period(eps_max + hbar)?,
        Err(e) => return Err(e),
    };
    let kh = (960.0 * target * t_ref / omega).powf(0.25) / 1.3;
    let ppw = (2.0 * std::f64::consts::PI / kh).clamp(80.0, 6000.0);
    let lambda = 2.0 * std::f64::consts::PI * hbar / (2.0 * (eps_max - min_v)).sqrt();
    let h_target = (lambda / ppw).min(q_max / 1024.0);

    let n = (q_max / h_target).ceil() as usize + 1;
    let step = q_max / (n - 1) as f64;
    let v = (0..n).map(|i| spec.value(i as f64 * step)).collect();
    Ok(HalfLine {
        step,
        v,
        hbar,
        curvature0: spec.curvature_at_origin(),
    })
}

/// Half the step of an existing half line (same physical domain).
fn refine_halfline(spec: &PotentialSpec, hl: &HalfLine) -> HalfLine {
    let n = 2 * (hl.v.len() - 1) + 1;
    let step = hl.step / 2.0;
    HalfLine {
        step,
        v: (0..n).map(|i| spec.value(i as f64 * step)).collect(),
        hbar: hl.hbar,
        curvature0: hl.curvature0,
    }
}

/// Locate the `k`-th half-line eigenvalue (0-based within a parity class).
///
/// Node-count bisection isolates the state, then an Illinois iteration on
/// the matching mismatch polishes to ~1e-13 of the window scale. Falls back
/// to pure node-count bisection when the mismatch does not bracket.
fn locate_eigenvalue(
    hl: &HalfLine,
    parity: Parity,
    k: usize,
    eps_min: f64,
    eps_max: f64,
) -> Result<f64> {
    let scale = eps_max.abs().max(eps_min.abs()).max(eps_max - eps_min);
    let tol = 1e-13 * scale;

    let mut lo = eps_min;
    let mut hi = eps_max;
    let coarse = (1e-4 * (hi - lo)).max(64.0 * tol);
    while hi - lo > coarse {
        let mid = 0.5 * (lo + hi);
        if hl.count_nodes(mid, parity) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let i_match = match_index(hl, 0.5 * (lo + hi))?;
    let f_lo = hl.wronskian(lo, parity, i_match);
    let f_hi = hl.wronskian(hi, parity, i_match);

    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo > 0.0) != (f_hi > 0.0) {
        Ok(illinois(
            |e| hl.wronskian(e, parity, i_match),
            lo,
            hi,
            f_lo,
            f_hi,
            tol,
        ))
    } else {
        // mismatch did not change sign across the coarse bracket; the node
        // count still pins the state, so bisect on it alone
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hl.count_nodes(mid, parity) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Matching index: three quarters of the way across the outermost
/// classically allowed run, i.e. near the outermost amplitude maximum.
fn match_index(hl: &HalfLine, eps: f64) -> Result<usize> {
    let n = hl.v.len();
    let mut i_out = None;
    for i in (0..n).rev() {
        if hl.v[i] <= eps {
            i_out = Some(i);
            break;
        }
    }
    let i_out = i_out.ok_or_else(|| {
        Error::SolverInconsistency("no classically allowed region on the grid".into())
    })?;
    let mut i_in = i_out;
    while i_in > 0 && hl.v[i_in - 1] <= eps {
        i_in -= 1;
    }
    let i_m = i_in + (3 * (i_out - i_in)) / 4;
    Ok(i_m.clamp(2, n - 3))
}

fn illinois<F: Fn(f64) -> f64>(
    f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
) -> f64 {
    let mut side = 0i8;
    for _ in 0..120 {
        if (b - a).abs() <= tol {
            break;
        }
        let mut c = (fa * b - fb * a) / (fa - fb);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc == 0.0 {
            return c;
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    (fa * b - fb * a) / (fa - fb)
}

/// Mirror the half-line solution to the full line, normalize, fix the sign
/// convention (outermost antinode positive) and verify the node count and
/// tail decay.
fn build_state(hl: &HalfLine, eps: f64, parity: Parity, k: usize) -> Result<EigenState> {
    let n_half = hl.v.len();
    let mut half = Vec::new();
    let mut ok = false;
    let base = match_index(hl, eps)?;
    for shift in [0i64, -3, 3, -7, 7] {
        let i_m = (base as i64 + shift).clamp(2, n_half as i64 - 3) as usize;
        half = hl.assemble(eps, parity, i_m);
        if half.iter().all(|y| y.is_finite()) {
            ok = true;
            break;
        }
    }
    if !ok {
        return Err(Error::SolverInconsistency(format!(
            "could not assemble eigenfunction at eps = {eps}"
        )));
    }

    let grid = Grid {
        step: hl.step,
        half: n_half - 1,
    };
    let len = grid.len();
    let c = grid.center();
    let mut samples = vec![0.0_f64; len];
    for (j, &y) in half.iter().enumerate() {
        samples[c + j] = y;
        samples[c - j] = match parity {
            Parity::Even => y,
            Parity::Odd => -y,
        };
    }

    let norm2: f64 = samples.iter().map(|y| y * y).sum::<f64>() * hl.step;
    let inv = 1.0 / norm2.sqrt();
    for y in samples.iter_mut() {
        *y *= inv;
    }

    // deterministic sign: outermost antinode on the positive side is positive
    let i_max = (0..half.len())
        .max_by(|&i, &j| half[i].abs().total_cmp(&half[j].abs()))
        .unwrap_or(0);
    if half[i_max] < 0.0 {
        for y in samples.iter_mut() {
            *y = -*y;
        }
    }

    let nodes = count_sign_changes(&samples);
    let expected = 2 * k + if parity == Parity::Odd { 1 } else { 0 };
    if nodes != expected {
        return Err(Error::SolverInconsistency(format!(
            "node count {nodes} != quantum number {expected} at eps = {eps}"
        )));
    }
    if samples[0].abs() >= 1e-10 || samples[len - 1].abs() >= 1e-10 {
        return Err(Error::SolverInconsistency(format!(
            "eigenfunction tail not decayed at the grid edge (|phi| = {:.3e})",
            samples[0].abs().max(samples[len - 1].abs())
        )));
    }

    Ok(EigenState {
        n: expected,
        energy: eps,
        parity,
        grid,
        samples,
    })
}

fn count_sign_changes(samples: &[f64]) -> usize {
    let mut nodes = 0;
    let mut last_sign: Option<bool> = None;
    for &y in samples {
        if y != 0.0 {
            let s = y > 0.0;
            if let Some(prev) = last_sign {
                if prev != s {
                    nodes += 1;
                }
            }
            last_sign = Some(s);
        }
    }
    nodes
}
