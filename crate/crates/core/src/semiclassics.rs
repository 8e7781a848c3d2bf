//! Closed-form semiclassics: WKB spectrum and overlap weights for single
//! wells, the barrier-top-regularized quantization for the `α = 1` double
//! well, and the `ħ → 0` limit distribution of the survival-probability
//! spectrum.

use crate::dynamics::{EhrenfestPoint, Method, OverlapEntry, OverlapSet};
use crate::error::{Error, Result};
use crate::quad::pairwise_sum;
use crate::specfun;
use crate::spectrum::Parity;

use std::f64::consts::PI;

/// Level constant δ(β) of the single-well WKB spectrum
/// `ε_n = [(n+½) ħ δ(β)]^{2β/(β+1)}`.
///
/// δ(β) = √(π/2) Γ(3/2 + 1/(2β)) / [Γ(1 + 1/(2β)) (2β)^{1/(2β)}];
/// δ(1) = 1 recovers the harmonic oscillator exactly.
pub fn quantization_constant(beta: u32) -> Result<f64> {
    if beta < 1 {
        return Err(Error::InvalidParams("beta must be >= 1".into()));
    }
    let b = beta as f64;
    let x = 1.0 / (2.0 * b);
    Ok((PI / 2.0).sqrt() * specfun::gamma(1.5 + x)?
        / (specfun::gamma(1.0 + x)? * (2.0 * b).powf(x)))
}

/// Single-well WKB level `ε_n = [(n+½) ħ δ(β)]^{2β/(β+1)}`.
pub fn wkb_energy(beta: u32, hbar: f64, n: usize) -> Result<f64> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidParams(format!(
            "hbar must be > 0, got {hbar}"
        )));
    }
    let b = beta as f64;
    let delta = quantization_constant(beta)?;
    Ok(((n as f64 + 0.5) * hbar * delta).powf(2.0 * b / (b + 1.0)))
}

/// Oscillation phase `σ(ε, ħ; β) = 2√2 (2β)^{1/(2β)} ħ⁻¹ ε^{(β+1)/(2β)}`
/// entering the weight denominator.
pub fn wkb_weight_phase(beta: u32, hbar: f64, eps: f64) -> f64 {
    let b = beta as f64;
    2.0 * 2.0_f64.sqrt() * (2.0 * b).powf(1.0 / (2.0 * b)) / hbar * eps.powf((b + 1.0) / (2.0 * b))
}

/// Semiclassical packet weight `|c_ε|²` of an even single-well level.
///
/// `|c_ε|² = 2√π (2β)^{-1/(2β)} ħ^{1/2} ε^{-1/(2β)} e^{-2ε/ħ} /
///           [√π Γ(1+1/(2β))/Γ((1+β)/(2β)) + sin σ/σ]`.
///
/// The constant term of the denominator is fixed by completeness: summed
/// over the even WKB ladder the weights integrate to one, which also yields
/// the closed-form limit distribution `4K₀(4π|ν|)` (both are verified in
/// the tests).
pub fn wkb_weight(beta: u32, hbar: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!(
            "wkb_weight is defined for eps > 0, got {eps}"
        )));
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidParams(format!(
            "hbar must be > 0, got {hbar}"
        )));
    }
    let b = beta as f64;
    let x = 1.0 / (2.0 * b);
    let sigma = wkb_weight_phase(beta, hbar, eps);
    let denom_const = PI.sqrt() * specfun::gamma(1.0 + x)? / specfun::gamma(0.5 + x)?;
    let denom = denom_const + sigma.sin() / sigma;
    let numer = 2.0
        * PI.sqrt()
        * (2.0 * b).powf(-x)
        * hbar.sqrt()
        * eps.powf(-x)
        * (-2.0 * eps / hbar).exp();
    Ok(numer / denom)
}

/// The `ħ → 0` limit distribution of the survival-probability spectrum:
/// `P₀(ν) = 4 K₀(4π|ν|)`.
pub fn limit_distribution(nu: f64) -> Result<f64> {
    if nu == 0.0 {
        return Err(Error::SingularPoint);
    }
    Ok(4.0 * specfun::bessel_k0(4.0 * PI * nu.abs())?)
}

/// Ehrenfest point of a single well from the closed-form ladder:
/// `ν_E = (ε₂ - ε₀)/(2πħ)`, the smallest gap of the even ladder since the
/// level spacing increases with `n`.
pub fn single_well_ehrenfest(beta: u32, hbar: f64) -> Result<EhrenfestPoint> {
    let eps_lo = wkb_energy(beta, hbar, 0)?;
    let eps_hi = wkb_energy(beta, hbar, 2)?;
    Ok(EhrenfestPoint {
        hbar,
        nu_e: (eps_hi - eps_lo) / (2.0 * PI * hbar),
        method: Method::WkbSingleWell,
        eps_lo,
        eps_hi,
    })
}

/// Even-ladder overlap set generated from the closed forms, for single
/// wells at arbitrarily small ħ. Levels are kept up to
/// `ε ≤ cutoff_over_hbar · ħ` (at least the two lowest even states).
pub fn wkb_overlap_set(beta: u32, hbar: f64, cutoff_over_hbar: f64) -> Result<OverlapSet> {
    let cut = cutoff_over_hbar * hbar;
    let mut entries = Vec::new();
    let mut n = 0usize;
    loop {
        let eps = wkb_energy(beta, hbar, n)?;
        if eps > cut && entries.len() >= 2 {
            break;
        }
        entries.push(OverlapEntry {
            n,
            energy: eps,
            weight: wkb_weight(beta, hbar, eps)?,
        });
        n += 2;
        if n > 40_000_000 {
            return Err(Error::OutOfRange(
                "WKB ladder cutoff produced too many levels".into(),
            ));
        }
    }
    let captured_mass = pairwise_sum(&entries.iter().map(|e| e.weight).collect::<Vec<_>>());
    Ok(OverlapSet {
        hbar,
        entries,
        captured_mass,
    })
}

/// One root of the regularized barrier-top quantization condition
/// `1/√(1 + e^{2πε/ħ}) = cos φ(ε, ħ)` of the `α = 1, β = 2` double well.
#[derive(Clone, Copy, Debug)]
pub struct RegWkbRoot {
    pub energy: f64,
    /// Root ordinal within the window, sorted by energy.
    pub branch_index: usize,
    pub phase_at_root: f64,
    /// Ladder classification: the lower member of each `2πk ∓ arccos`
    /// pair is the even state.
    pub parity: Parity,
}

/// Root set plus an optional validity note when the window leaves the
/// near-barrier regime.
#[derive(Clone, Debug)]
pub struct RegWkbWindow {
    pub roots: Vec<RegWkbRoot>,
    pub validity_warning: Option<String>,
}

/// Left-hand side `1/√(1 + e^{2πε/ħ})`, evaluated overflow-free.
fn barrier_transmission_lhs(eps: f64, hbar: f64) -> f64 {
    let x = 2.0 * PI * eps / hbar;
    if x > 0.0 {
        (-0.5 * x).exp() / (1.0 + (-x).exp()).sqrt()
    } else {
        1.0 / (1.0 + x.exp()).sqrt()
    }
}

/// Phase `φ(ε, ħ) = 4/(3ħ) - (ε/ħ) ln(ħ/16) - arg Γ(½ + iε/ħ) - π`.
fn quantization_phase(eps: f64, hbar: f64) -> f64 {
    4.0 / (3.0 * hbar)
        - eps / hbar * (hbar / 16.0).ln()
        - specfun::arg_gamma_half_plus_it(eps / hbar)
        - PI
}

/// All roots of the regularized quantization condition in
/// `[eps_min, eps_max]`, for the `α = 1, β = 2` double well.
///
/// Since `cos φ = L` with `L ∈ (0, 1)` splits each `2π` cell of the
/// monotone phase into the pair `φ = 2πk ± arccos L`, every root is found
/// by bisection on its own branch. This resolves below-barrier doublets
/// whose splitting is far below machine resolution, where sign-scanning the
/// raw residual would miss both members.
pub fn regwkb_roots(hbar: f64, eps_min: f64, eps_max: f64) -> Result<RegWkbWindow> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidParams(format!(
            "hbar must be > 0, got {hbar}"
        )));
    }
    if !(eps_min < eps_max) {
        return Err(Error::InvalidParams(format!(
            "empty window [{eps_min}, {eps_max}]"
        )));
    }
    let validity_warning = if eps_min < -0.125 || eps_max > 0.125 {
        Some(format!(
            "window [{eps_min}, {eps_max}] extends beyond |eps| <= 0.125, half the well depth; \
             the barrier-top approximation degrades there"
        ))
    } else {
        None
    };

    let tol = (1e-12 * hbar).min(1e-13);
    let phi_min = quantization_phase(eps_min, hbar);
    let phi_max = quantization_phase(eps_max, hbar);
    let k_lo = ((phi_min - PI / 2.0) / (2.0 * PI)).floor() as i64;
    let k_hi = ((phi_max + PI / 2.0) / (2.0 * PI)).ceil() as i64;

    let mut roots = Vec::new();
    for k in k_lo..=k_hi {
        for (sign, parity) in [(-1.0, Parity::Even), (1.0, Parity::Odd)] {
            let target = |e: f64| {
                let a = barrier_transmission_lhs(e, hbar).clamp(-1.0, 1.0).acos();
                quantization_phase(e, hbar) - (2.0 * PI * k as f64 + sign * a)
            };
            let f_lo = target(eps_min);
            let f_hi = target(eps_max);
            if f_lo == 0.0 {
                roots.push((eps_min, parity));
                continue;
            }
            if (f_lo > 0.0) == (f_hi > 0.0) {
                continue;
            }
            let mut lo = eps_min;
            let mut hi = eps_max;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if hi - lo <= tol || mid <= lo || mid >= hi {
                    break;
                }
                if (target(mid) > 0.0) == (f_lo > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push((0.5 * (lo + hi), parity));
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));

    let roots = roots
        .into_iter()
        .enumerate()
        .map(|(i, (energy, parity))| RegWkbRoot {
            energy,
            branch_index: i,
            phase_at_root: quantization_phase(energy, hbar),
            parity,
        })
        .collect();
    Ok(RegWkbWindow {
        roots,
        validity_warning,
    })
}

/// Ehrenfest point from the regularized quantization: the minimal gap of
/// consecutive even-ladder roots in `|ε| ≤ 20ħ`, divided by `2πħ`.
pub fn regwkb_ehrenfest(hbar: f64) -> Result<EhrenfestPoint> {
    let window = regwkb_roots(hbar, -20.0 * hbar, 20.0 * hbar)?;
    let even: Vec<&RegWkbRoot> = window
        .roots
        .iter()
        .filter(|r| r.parity == Parity::Even)
        .collect();
    if even.len() < 2 {
        return Err(Error::WindowTooNarrow(format!(
            "only {} even-ladder roots in |eps| <= 20 hbar",
            even.len()
        )));
    }
    let (mut eps_lo, mut eps_hi) = (even[0].energy, even[1].energy);
    for w in even.windows(2) {
        if w[1].energy - w[0].energy < eps_hi - eps_lo {
            eps_lo = w[0].energy;
            eps_hi = w[1].energy;
        }
    }
    Ok(EhrenfestPoint {
        hbar,
        nu_e: (eps_hi - eps_lo) / (2.0 * PI * hbar),
        method: Method::RegWkb,
        eps_lo,
        eps_hi,
    })
}
