//! Wave packet, overlap weights, survival probability, its frequency
//! spectrum, and the Ehrenfest frequency.

use crate::error::{Error, Result};
use crate::quad::pairwise_sum;
use crate::spectrum::{EigenState, SpectralWindow};
use num_complex::Complex64;

use std::f64::consts::PI;

/// Entries with `|c_n|²` below this are dropped from overlap sets.
pub const OVERLAP_DROP_THRESHOLD: f64 = 1e-20;
/// Default weight floor realizing the "nonzero weight" condition of the
/// Ehrenfest-frequency definition in floating point.
pub const DEFAULT_WEIGHT_FLOOR: f64 = 1e-12;

/// Minimum-uncertainty packet `(πħ)^{-1/4} e^{-(q-q₀)²/(2ħ)} e^{i p₀ q/ħ}`.
/// The width is tied to ħ; there is no free width parameter.
#[derive(Clone, Copy, Debug)]
pub struct WavePacket {
    pub hbar: f64,
    pub p0: f64,
    pub q0: f64,
}

impl WavePacket {
    /// Packet centered on the equilibrium point `(p₀, q₀) = (0, 0)`.
    pub fn centered(hbar: f64) -> Self {
        WavePacket {
            hbar,
            p0: 0.0,
            q0: 0.0,
        }
    }

    /// ψ(q).
    pub fn value(&self, q: f64) -> Complex64 {
        let amp = (PI * self.hbar).powf(-0.25) * (-(q - self.q0).powi(2) / (2.0 * self.hbar)).exp();
        Complex64::from_polar(amp, self.p0 * q / self.hbar)
    }

    /// Wigner function `W(p, q) = (πħ)⁻¹ e^{-(p-p₀)²/ħ} e^{-(q-q₀)²/ħ}`,
    /// a normalized phase-space density concentrating on `(p₀, q₀)` as
    /// ħ → 0.
    pub fn wigner(&self, p: f64, q: f64) -> f64 {
        1.0 / (PI * self.hbar)
            * (-(p - self.p0).powi(2) / self.hbar).exp()
            * (-(q - self.q0).powi(2) / self.hbar).exp()
    }
}

/// One retained eigenstate with its packet weight `|c_n|²`.
#[derive(Clone, Copy, Debug)]
pub struct OverlapEntry {
    pub n: usize,
    pub energy: f64,
    pub weight: f64,
}

/// Eigenstate weights of a packet, sorted by energy.
#[derive(Clone, Debug)]
pub struct OverlapSet {
    pub hbar: f64,
    pub entries: Vec<OverlapEntry>,
    /// Σ |c_n|² over retained entries.
    pub captured_mass: f64,
}

impl OverlapSet {
    pub fn from_entries(hbar: f64, mut entries: Vec<OverlapEntry>) -> Self {
        entries.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        let captured_mass = pairwise_sum(&entries.iter().map(|e| e.weight).collect::<Vec<_>>());
        OverlapSet {
            hbar,
            entries,
            captured_mass,
        }
    }

    /// True when the window missed more than 1e-3 of the packet norm and
    /// the caller should widen the energy window.
    pub fn is_under_covered(&self) -> bool {
        self.captured_mass < 0.999
    }
}

/// `|⟨ψ|φ_n⟩|²` by composite Simpson on the eigenstate grid.
///
/// The sum is folded symmetrically around `q = 0`, so for a centered packet
/// the odd-state overlap cancels exactly, term by term.
pub fn overlap_weight(state: &EigenState, wp: &WavePacket) -> f64 {
    let grid = &state.grid;
    let c = grid.center();
    let mut acc = Complex64::new(0.0, 0.0);
    // Simpson coefficient pattern on an even number of panels: 1,4,2,...,4,1
    let coef = |i: usize, last: usize| -> f64 {
        if i == 0 || i == last {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let last = grid.len() - 1;
    acc += coef(c, last) * state.samples[c] * wp.value(0.0).conj();
    for d in 1..=c {
        let w = coef(c + d, last);
        debug_assert_eq!(w, coef(c - d, last));
        let qp = grid.q(c + d);
        let qm = grid.q(c - d);
        let t =
            state.samples[c + d] * wp.value(qp).conj() + state.samples[c - d] * wp.value(qm).conj();
        acc += w * t;
    }
    let cn = acc * grid.step() / 3.0;
    cn.norm_sqr()
}

/// Overlap weights of every window state against the packet.
///
/// Entries with weight below [`OVERLAP_DROP_THRESHOLD`] are dropped (for a
/// packet centered at the origin this removes exactly the odd states, whose
/// folded quadrature cancels identically). The packet is evaluated on each
/// state's own grid, so there is never a grid mismatch to resolve.
pub fn compute_overlaps(window: &SpectralWindow, wp: &WavePacket) -> Result<OverlapSet> {
    if window.hbar != wp.hbar {
        return Err(Error::InvalidParams(format!(
            "window hbar {} != packet hbar {}",
            window.hbar, wp.hbar
        )));
    }
    let entries = window
        .states
        .iter()
        .filter_map(|st| {
            let weight = overlap_weight(st, wp);
            (weight >= OVERLAP_DROP_THRESHOLD).then_some(OverlapEntry {
                n: st.n,
                energy: st.energy,
                weight,
            })
        })
        .collect();
    Ok(OverlapSet::from_entries(window.hbar, entries))
}

/// Survival probability `P(t) = |Σ_n |c_n|² e^{-i ε_n t/ħ}|²`.
pub fn survival_probability(os: &OverlapSet, t: f64) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for e in &os.entries {
        let phase = e.energy * t / os.hbar;
        re += e.weight * phase.cos();
        im -= e.weight * phase.sin();
    }
    re * re + im * im
}

/// One positive-frequency line `ν = (ε_n - ε_m)/(2πħ)` with the weight of a
/// single ordered pair; the mirror line at `-ν` carries the same weight.
#[derive(Clone, Copy, Debug)]
pub struct SpectralLine {
    pub nu: f64,
    pub weight: f64,
}

/// Discrete frequency spectrum of the survival probability.
#[derive(Clone, Debug)]
pub struct FrequencySpectrum {
    /// Positive half, sorted by frequency.
    pub lines: Vec<SpectralLine>,
    /// Weight of the ν = 0 line: Σ |c_n|⁴.
    pub zero_weight: f64,
    pub captured_mass: f64,
}

impl FrequencySpectrum {
    /// Total weight over both signs plus the zero line; equals
    /// `captured_mass²` up to rounding.
    pub fn total_weight(&self) -> f64 {
        2.0 * pairwise_sum(&self.lines.iter().map(|l| l.weight).collect::<Vec<_>>())
            + self.zero_weight
    }
}

/// All positive transition frequencies with their pair weights.
pub fn frequency_spectrum(os: &OverlapSet) -> FrequencySpectrum {
    let n = os.entries.len();
    let mut lines = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&os.entries[i], &os.entries[j]);
            lines.push(SpectralLine {
                nu: (b.energy - a.energy) / (2.0 * PI * os.hbar),
                weight: a.weight * b.weight,
            });
        }
    }
    lines.sort_by(|a, b| a.nu.total_cmp(&b.nu));
    let zero_weight = pairwise_sum(
        &os.entries
            .iter()
            .map(|e| e.weight * e.weight)
            .collect::<Vec<_>>(),
    );
    FrequencySpectrum {
        lines,
        zero_weight,
        captured_mass: os.captured_mass,
    }
}

/// One density bin of the binned frequency spectrum.
#[derive(Clone, Copy, Debug)]
pub struct PnuBin {
    pub nu: f64,
    pub density: f64,
}

/// Histogram of the positive-frequency spectrum on `[0, nu_max]`,
/// normalized as a density (weight per unit ν).
pub fn bin_pnu(fs: &FrequencySpectrum, nu_max: f64, bins: usize) -> Vec<PnuBin> {
    let width = nu_max / bins as f64;
    let mut acc = vec![0.0_f64; bins];
    for l in &fs.lines {
        let idx = (l.nu / width) as usize;
        if idx < bins {
            acc[idx] += l.weight;
        }
    }
    acc.iter()
        .enumerate()
        .map(|(i, w)| PnuBin {
            nu: (i as f64 + 0.5) * width,
            density: w / width,
        })
        .collect()
}

/// How an Ehrenfest point was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Numeric,
    WkbSingleWell,
    RegWkb,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Numeric, Method::WkbSingleWell, Method::RegWkb];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Numeric => "numeric",
            Method::WkbSingleWell => "wkb",
            Method::RegWkb => "regwkb",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "numeric" => Ok(Method::Numeric),
            "wkb" => Ok(Method::WkbSingleWell),
            "regwkb" => Ok(Method::RegWkb),
            other => Err(Error::Parse(format!(
                "unknown method `{other}` (expected numeric, wkb or regwkb)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The Ehrenfest frequency at one ħ, with the minimizing level pair.
#[derive(Clone, Copy, Debug)]
pub struct EhrenfestPoint {
    pub hbar: f64,
    pub nu_e: f64,
    pub method: Method,
    pub eps_lo: f64,
    pub eps_hi: f64,
}

/// Minimal positive transition frequency over pairs whose weights both
/// reach `weight_floor`.
///
/// Entries are energy-sorted, so the minimum is attained by a consecutive
/// pair of the retained ladder.
pub fn ehrenfest_frequency(
    os: &OverlapSet,
    weight_floor: f64,
    method: Method,
) -> Result<EhrenfestPoint> {
    let kept: Vec<&OverlapEntry> = os
        .entries
        .iter()
        .filter(|e| e.weight >= weight_floor)
        .collect();
    if kept.len() < 2 {
        return Err(Error::InsufficientSupport {
            floor: weight_floor,
        });
    }
    let (mut eps_lo, mut eps_hi) = (kept[0].energy, kept[1].energy);
    for w in kept.windows(2) {
        if w[1].energy - w[0].energy < eps_hi - eps_lo {
            eps_lo = w[0].energy;
            eps_hi = w[1].energy;
        }
    }
    Ok(EhrenfestPoint {
        hbar: os.hbar,
        nu_e: (eps_hi - eps_lo) / (2.0 * PI * os.hbar),
        method,
        eps_lo,
        eps_hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PotentialSpec;
    use crate::quad::integrate;
    use crate::spectrum::{solve_eigen_window, Parity, SolverOptions};

    #[test]
    fn packet_trivials() {
        let wp = WavePacket::centered(1e-2);
        let v0 = wp.value(0.0);
        assert!((v0.re - (PI * 1e-2).powf(-0.25)).abs() < 1e-12);
        assert_eq!(v0.im, 0.0);
        // real and even for the centered packet
        assert_eq!(wp.value(0.3).re, wp.value(-0.3).re);
        assert_eq!(wp.value(0.3).im, 0.0);
    }

    #[test]
    fn packet_norm_is_one() {
        let wp = WavePacket {
            hbar: 3e-3,
            p0: 0.7,
            q0: -0.2,
        };
        let norm = integrate(|q| wp.value(q).norm_sqr(), -1.5, 1.5, 1e-12)
            .unwrap()
            .value;
        assert!((norm - 1.0).abs() < 1e-10, "norm = {norm}");
    }

    #[test]
    fn wigner_peak_norm_and_moments() {
        let hbar = 2e-2;
        let wp = WavePacket {
            hbar,
            p0: 0.4,
            q0: -0.1,
        };
        assert!((wp.wigner(0.4, -0.1) - 1.0 / (PI * hbar)).abs() < 1e-10);

        let q_marginal = integrate(|q| wp.wigner(0.4, q), -2.0, 2.0, 1e-12)
            .unwrap()
            .value;
        let p_marginal = integrate(|p| wp.wigner(p, -0.1), -2.0, 2.0, 1e-12)
            .unwrap()
            .value;
        let total = q_marginal * p_marginal * (PI * hbar);
        assert!((total - 1.0).abs() < 1e-9, "∬W = {total}");

        // second moments ħ/2 in each variable: the δ-limit as ħ → 0
        let var_q = integrate(
            |q| (q + 0.1) * (q + 0.1) * wp.wigner(0.4, q),
            -2.0,
            2.0,
            1e-12,
        )
        .unwrap()
        .value
            / q_marginal;
        assert!(
            (var_q - hbar / 2.0).abs() < 1e-9 * hbar.max(1.0),
            "var_q = {var_q}"
        );
    }

    #[test]
    fn harmonic_packet_is_the_ground_state() {
        let hbar = 0.5;
        let spec = PotentialSpec::single(1).unwrap();
        let w = solve_eigen_window(
            &spec,
            hbar,
            0.0,
            4.0 * hbar,
            None,
            &SolverOptions::default(),
        )
        .unwrap();
        let wp = WavePacket::centered(hbar);
        let os = compute_overlaps(&w, &wp).unwrap();
        let ground = os.entries.iter().find(|e| e.n == 0).unwrap();
        assert!(
            (ground.weight - 1.0).abs() < 1e-10,
            "|c₀|² = {}",
            ground.weight
        );
        for e in &os.entries {
            if e.n != 0 {
                assert!(e.weight < 1e-16, "n={}: |c|² = {}", e.n, e.weight);
            }
        }
    }

    #[test]
    fn odd_states_cancel_exactly() {
        let spec = PotentialSpec::double(1, 2).unwrap();
        let hbar = 1e-2;
        let w = solve_eigen_window(
            &spec,
            hbar,
            -0.03,
            0.03,
            Some(Parity::Odd),
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(!w.states.is_empty());
        let wp = WavePacket::centered(hbar);
        for st in &w.states {
            let weight = overlap_weight(st, &wp);
            assert!(weight < 1e-20, "odd n={}: |c|² = {weight}", st.n);
        }
    }

    #[test]
    fn numeric_weights_match_wkb_formula() {
        // single well β=2 at ħ=1e-3: numeric |c_n|² against the closed form
        // for the 20 lowest even states. The semiclassical error is largest
        // for the lowest states (10% at n=0) and settles near 1% by n ≈ 8.
        let spec = PotentialSpec::single(2).unwrap();
        let hbar = 1e-3;
        let eps_39 = crate::semiclassics::wkb_energy(2, hbar, 39).unwrap();
        let w = solve_eigen_window(
            &spec,
            hbar,
            0.0,
            eps_39,
            Some(Parity::Even),
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(w.states.len() >= 20);
        let wp = WavePacket::centered(hbar);
        let os = compute_overlaps(&w, &wp).unwrap();
        for e in os.entries.iter().take(20) {
            let predicted = crate::semiclassics::wkb_weight(2, hbar, e.energy).unwrap();
            let rel = (e.weight - predicted).abs() / predicted;
            // deep-tail states (weights ~1e-10) drift a further few percent
            let bound = if e.n < 8 {
                0.12
            } else if e.n < 30 {
                0.03
            } else {
                0.05
            };
            assert!(
                rel < bound,
                "n={}: numeric {} vs wkb {predicted} (rel {rel})",
                e.n,
                e.weight
            );
        }
    }

    fn synthetic_two_level(hbar: f64, gap_over_hbar: f64, wa: f64, wb: f64) -> OverlapSet {
        OverlapSet::from_entries(
            hbar,
            vec![
                OverlapEntry {
                    n: 0,
                    energy: 0.5 * hbar,
                    weight: wa,
                },
                OverlapEntry {
                    n: 2,
                    energy: (0.5 + gap_over_hbar) * hbar,
                    weight: wb,
                },
            ],
        )
    }

    #[test]
    fn survival_two_level_period() {
        // harmonic even ladder: gap 2ħ ⇒ P periodic with period π
        let os = synthetic_two_level(1e-2, 2.0, 0.7, 0.3);
        assert!((survival_probability(&os, 0.0) - os.captured_mass.powi(2)).abs() < 1e-14);
        for k in 1..30 {
            let t = 0.17 * k as f64;
            let p0 = survival_probability(&os, t);
            let p1 = survival_probability(&os, t + PI);
            assert!((p0 - p1).abs() < 1e-12, "not π-periodic at t={t}");
            assert!(p0 <= os.captured_mass.powi(2) + 1e-12);
        }
    }

    #[test]
    fn spectrum_combinatorics() {
        // single retained state: no lines, zero_weight = w²
        let os = OverlapSet::from_entries(
            1e-2,
            vec![OverlapEntry {
                n: 0,
                energy: 1.0,
                weight: 0.9,
            }],
        );
        let fs = frequency_spectrum(&os);
        assert!(fs.lines.is_empty());
        assert!((fs.zero_weight - 0.81).abs() < 1e-15);

        // two states: one positive line carrying w_a w_b per sign
        let os = synthetic_two_level(1e-2, 2.0, 0.6, 0.4);
        let fs = frequency_spectrum(&os);
        assert_eq!(fs.lines.len(), 1);
        assert!((fs.lines[0].nu - 2.0 * 1e-2 / (2.0 * PI * 1e-2)).abs() < 1e-14);
        assert!((fs.lines[0].weight - 0.24).abs() < 1e-15);
        assert!((fs.total_weight() - os.captured_mass.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn parseval_bookkeeping_on_numeric_set() {
        let spec = PotentialSpec::double(1, 2).unwrap();
        let hbar = 1e-2;
        let w = solve_eigen_window(
            &spec,
            hbar,
            -0.2,
            0.2,
            Some(Parity::Even),
            &SolverOptions::default(),
        )
        .unwrap();
        let os = compute_overlaps(&w, &WavePacket::centered(hbar)).unwrap();
        assert!(os.captured_mass <= 1.0 + 1e-8);
        let fs = frequency_spectrum(&os);
        let total = fs.total_weight();
        assert!(
            (total - os.captured_mass.powi(2)).abs() < 1e-10,
            "Parseval: {total} vs {}",
            os.captured_mass.powi(2)
        );
    }

    #[test]
    fn survival_matches_spectrum_reconstruction() {
        let spec = PotentialSpec::double(1, 2).unwrap();
        let hbar = 1e-2;
        let w = solve_eigen_window(
            &spec,
            hbar,
            -0.1,
            0.1,
            Some(Parity::Even),
            &SolverOptions::default(),
        )
        .unwrap();
        let os = compute_overlaps(&w, &WavePacket::centered(hbar)).unwrap();
        let fs = frequency_spectrum(&os);
        // deterministic pseudo-random times
        let mut x: u64 = 0x243f6a8885a308d3;
        for _ in 0..100 {
            x = x
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let t = (x >> 11) as f64 / (1u64 << 53) as f64 * 50.0;
            let direct = survival_probability(&os, t);
            let rebuilt: f64 = fs.zero_weight
                + 2.0
                    * fs.lines
                        .iter()
                        .map(|l| l.weight * (2.0 * PI * l.nu * t).cos())
                        .sum::<f64>();
            assert!(
                (direct - rebuilt).abs() < 1e-10,
                "t={t}: {direct} vs {rebuilt}"
            );
        }
    }

    #[test]
    fn ehrenfest_frequency_from_barrier_top_pair() {
        let spec = PotentialSpec::double(1, 2).unwrap();
        let hbar = 1e-2;
        let w = solve_eigen_window(
            &spec,
            hbar,
            -0.2,
            0.2,
            Some(Parity::Even),
            &SolverOptions::default(),
        )
        .unwrap();
        let os = compute_overlaps(&w, &WavePacket::centered(hbar)).unwrap();
        let p = ehrenfest_frequency(&os, DEFAULT_WEIGHT_FLOOR, Method::Numeric).unwrap();

        // minimizing pair: the even states straddling ε = 0 (n = 40, 42),
        // values pinned by the dense-oracle / regularized-WKB concordance
        assert!(
            (p.eps_lo + 0.005331463697).abs() < 1e-8,
            "eps_lo = {}",
            p.eps_lo
        );
        assert!(
            (p.eps_hi - 0.000886235363).abs() < 1e-8,
            "eps_hi = {}",
            p.eps_hi
        );
        let expected = (p.eps_hi - p.eps_lo) / (2.0 * PI * hbar);
        assert_eq!(p.nu_e, expected, "nu_E re-derives from the stored pair");
        assert!((p.nu_e - 0.0989587).abs() < 1e-4, "nu_E = {}", p.nu_e);

        // the minimizing pair is adjacent in the even ladder near ε = 0
        let i_lo = os
            .entries
            .iter()
            .position(|e| e.energy == p.eps_lo)
            .unwrap();
        assert_eq!(os.entries[i_lo + 1].energy, p.eps_hi);
        assert_eq!(os.entries[i_lo + 1].n, os.entries[i_lo].n + 2);
    }

    #[test]
    fn ehrenfest_floor_sensitivity() {
        let spec = PotentialSpec::double(1, 2).unwrap();
        let hbar = 1e-3;
        let w = solve_eigen_window(
            &spec,
            hbar,
            -24.0 * hbar,
            20.0 * hbar,
            Some(Parity::Even),
            &SolverOptions::default(),
        )
        .unwrap();
        let os = compute_overlaps(&w, &WavePacket::centered(hbar)).unwrap();
        let base = ehrenfest_frequency(&os, DEFAULT_WEIGHT_FLOOR, Method::Numeric).unwrap();
        let lo = ehrenfest_frequency(&os, DEFAULT_WEIGHT_FLOOR / 10.0, Method::Numeric).unwrap();
        let hi = ehrenfest_frequency(&os, DEFAULT_WEIGHT_FLOOR * 10.0, Method::Numeric).unwrap();
        assert!((lo.nu_e - base.nu_e).abs() < 0.01 * base.nu_e);
        assert!((hi.nu_e - base.nu_e).abs() < 0.01 * base.nu_e);
    }

    #[test]
    fn ehrenfest_requires_two_supported_entries() {
        let os = OverlapSet::from_entries(
            1e-2,
            vec![
                OverlapEntry {
                    n: 0,
                    energy: 0.1,
                    weight: 1e-15,
                },
                OverlapEntry {
                    n: 2,
                    energy: 0.2,
                    weight: 0.9,
                },
            ],
        );
        assert!(matches!(
            ehrenfest_frequency(&os, 1e-12, Method::Numeric),
            Err(Error::InsufficientSupport { .. })
        ));
    }

    #[test]
    fn binned_density_accounts_for_lines() {
        let os = synthetic_two_level(1e-2, 2.0, 0.6, 0.4);
        let fs = frequency_spectrum(&os);
        let bins = bin_pnu(&fs, 2.0, 200);
        let total: f64 = bins.iter().map(|b| b.density * 0.01).sum();
        assert!((total - 0.24).abs() < 1e-12);
        // the single line sits at ν = 1/π ≈ 0.318
        let hot = bins.iter().find(|b| b.density > 0.0).unwrap();
        assert!((hot.nu - 1.0 / PI).abs() < 0.01);
    }
}
