//! Acceptance suite: one test per release criterion, printing one
//! PASS/FAIL line each (visible with `cargo test --test acceptance --
//! --nocapture`; failing criteria always display their line).
//!
//! Criteria 1, 6 and 7 pin reference values whose tolerances are not
//! reachable by a converged solver (see the repository notes); they are
//! asserted exactly as stated rather than loosened, so an honest FAIL
//! there is expected and documented, with the measured numbers printed.

use ehrenfest_core::dynamics::{
    bin_pnu, ehrenfest_frequency, frequency_spectrum, overlap_weight, EhrenfestPoint, Method,
    OverlapSet, WavePacket, DEFAULT_WEIGHT_FLOOR,
};
use ehrenfest_core::model::PotentialSpec;
use ehrenfest_core::quad;
use ehrenfest_core::semiclassics::{
    limit_distribution, quantization_constant, regwkb_ehrenfest, wkb_energy, wkb_overlap_set,
};
use ehrenfest_core::spectrum::{
    dense_oracle_extrapolated, solve_eigen_window, Parity, SolverOptions,
};
use ehrenfest_core::sweep::{
    self, fit_scaling, hbar_decades, model_select, numeric_overlap_set, FitModel, SweepConfig,
};

use std::sync::OnceLock;
use std::time::Instant;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn conclude(id: u32, name: &str, pass: bool, detail: &str, t0: Instant) {
    let status = if pass { "PASS" } else { "FAIL" };
    eprintln!(
        "criterion {id:02} [{status}] {name}: {detail} ({:.2?})",
        t0.elapsed()
    );
    assert!(pass, "criterion {id:02} failed: {detail}");
}

/// Numeric overlap sets for the α=1, β=2 double well, shared by criteria
/// 6, 9 and 10 (five ħ values spanning [1e-4, 1e-2]).
fn alpha1_numeric_sets() -> &'static Vec<(f64, OverlapSet)> {
    static SETS: OnceLock<Vec<(f64, OverlapSet)>> = OnceLock::new();
    SETS.get_or_init(|| {
        let spec = PotentialSpec::double(1, 2).unwrap();
        hbar_decades(2.0, 4.0, 2)
            .unwrap()
            .into_iter()
            .map(|h| (h, numeric_overlap_set(&spec, h).unwrap()))
            .collect()
    })
}

#[test]
fn criterion_01_barrier_top_eigenvalues() {
    let t0 = Instant::now();
    let spec = PotentialSpec::double(1, 2).unwrap();
    let w = solve_eigen_window(
        &spec,
        1e-2,
        -0.02,
        0.02,
        Some(Parity::Even),
        &SolverOptions::default(),
    )
    .unwrap();

    // even states nearest eps = 0
    let below = w
        .states
        .iter()
        .rev()
        .find(|s| s.energy < 0.0)
        .expect("state below 0");
    let above = w
        .states
        .iter()
        .find(|s| s.energy > 0.0)
        .expect("state above 0");

    let nodes_ok = below.n == 40 && above.n == 42;
    let e40_ok = (below.energy - (-0.0054148)).abs() <= 5e-7;
    let e42_ok = (above.energy - 0.0008148).abs() <= 5e-7;
    let detail = format!(
        "e40 = {:.9} (ref -0.0054148, nodes {}), e42 = {:.9} (ref 0.0008148, nodes {})",
        below.energy, below.n, above.energy, above.n
    );
    conclude(
        1,
        "barrier-top eigenvalue reproduction",
        nodes_ok && e40_ok && e42_ok,
        &detail,
        t0,
    );
}

#[test]
fn criterion_02_harmonic_exactness() {
    let t0 = Instant::now();
    let spec = PotentialSpec::single(1).unwrap();
    let w = solve_eigen_window(&spec, 1.0, 0.0, 21.0, None, &SolverOptions::default()).unwrap();

    let mut worst = 0.0_f64;
    let mut pass = w.states.len() == 21;
    for (n, st) in w.states.iter().enumerate() {
        let d = (st.energy - (n as f64 + 0.5)).abs();
        worst = worst.max(d);
        pass &= d < 1e-10 && st.n == n;
    }

    // closed form: delta(1) = 1 and eps_n = (n + 1/2) hbar
    let delta = quantization_constant(1).unwrap();
    pass &= (delta - 1.0).abs() < 4.0 * f64::EPSILON;
    for n in 0..=20 {
        let e = wkb_energy(1, 1.0, n).unwrap();
        pass &= (e - (n as f64 + 0.5)).abs() <= 4.0 * f64::EPSILON * (n as f64 + 0.5);
    }
    let detail = format!(
        "worst solver deviation {worst:.2e}, delta(1) - 1 = {:.2e}",
        delta - 1.0
    );
    conclude(2, "harmonic exactness", pass, &detail, t0);
}

#[test]
fn criterion_03_oracle_equivalence() {
    let t0 = Instant::now();
    let mut worst = 0.0_f64;
    let mut pass = true;
    let mut states_checked = 0usize;
    for spec in [
        PotentialSpec::single(2).unwrap(),
        PotentialSpec::double(1, 2).unwrap(),
    ] {
        for hbar in [5e-2, 1e-2] {
            let (lo, hi) = sweep::default_energy_window(&spec, hbar);
            let w =
                solve_eigen_window(&spec, hbar, lo, hi, None, &SolverOptions::default()).unwrap();
            assert!(!w.states.is_empty());
            let n_max = w.states.iter().map(|s| s.n).max().unwrap();
            let q_max = w.states[0].grid.q_max();
            let oracle = dense_oracle_extrapolated(&spec, hbar, q_max, 7000, n_max + 1).unwrap();
            for st in &w.states {
                let d = (st.energy - oracle[st.n]).abs();
                worst = worst.max(d);
                pass &= d < 1e-8;
                states_checked += 1;
            }
        }
    }
    let detail = format!("{states_checked} states, worst |solver - oracle| = {worst:.2e}");
    conclude(3, "Numerov vs dense-oracle equivalence", pass, &detail, t0);
}

#[test]
fn criterion_04_single_well_scaling() {
    let t0 = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for (beta, expect) in [(2u32, -1.0 / 3.0), (3u32, -0.5)] {
        let cfg = SweepConfig::new(
            PotentialSpec::single(beta).unwrap(),
            hbar_decades(4.0, 12.0, 8).unwrap(),
            Method::WkbSingleWell,
        );
        let out = sweep::run_sweep(&cfg).unwrap();
        let fit = fit_scaling(&out.points, FitModel::PowerLaw).unwrap();
        pass &= out.failures.is_empty() && (fit.slope - expect).abs() <= 1e-3;
        detail.push_str(&format!(
            "beta={beta}: slope {:.6} (ref {expect:.4}); ",
            fit.slope
        ));
    }
    conclude(
        4,
        "single-well power-law exponents",
        pass,
        detail.trim_end(),
        t0,
    );
}

#[test]
fn criterion_05_double_well_power_law() {
    let t0 = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for (alpha, beta, expect) in [(2u32, 4u32, -1.0 / 3.0), (3, 6, -0.5)] {
        let cfg = SweepConfig::new(
            PotentialSpec::double(alpha, beta).unwrap(),
            hbar_decades(2.0, 4.0, 8).unwrap(),
            Method::Numeric,
        );
        let out = sweep::run_sweep(&cfg).unwrap();
        let fit = fit_scaling(&out.points, FitModel::PowerLaw).unwrap();
        pass &=
            out.failures.is_empty() && out.points.len() >= 8 && (fit.slope - expect).abs() <= 0.05;
        detail.push_str(&format!(
            "alpha={alpha} beta={beta}: {} pts, slope {:.4} (ref {expect:.4}); ",
            out.points.len(),
            fit.slope
        ));
    }
    conclude(
        5,
        "double-well power-law exponents",
        pass,
        detail.trim_end(),
        t0,
    );
}

#[test]
fn criterion_06_logarithmic_law() {
    let t0 = Instant::now();
    let cfg = SweepConfig::new(
        PotentialSpec::double(1, 2).unwrap(),
        hbar_decades(2.0, 6.0, 8).unwrap(),
        Method::RegWkb,
    );
    let out = sweep::run_sweep(&cfg).unwrap();
    let sel = model_select(&out.points).unwrap();

    let log_preferred = sel.preferred == FitModel::Logarithmic;
    let r2_ok = sel.logarithmic.r_squared > 0.999;

    let mut numeric_ok = true;
    let mut worst_rel = 0.0_f64;
    for (hbar, os) in alpha1_numeric_sets() {
        let numeric = ehrenfest_frequency(os, DEFAULT_WEIGHT_FLOOR, Method::Numeric).unwrap();
        let reg = regwkb_ehrenfest(*hbar).unwrap();
        let rel = ((1.0 / numeric.nu_e) - (1.0 / reg.nu_e)).abs() / (1.0 / reg.nu_e);
        worst_rel = worst_rel.max(rel);
        numeric_ok &= rel <= 0.10;
    }

    let detail = format!(
        "preferred {}, R2(log) = {:.6} (> 0.999 required), R2(power) = {:.6}, \
         worst numeric-vs-regwkb deviation {:.4}",
        sel.preferred.as_str(),
        sel.logarithmic.r_squared,
        sel.power.r_squared,
        worst_rel
    );
    conclude(
        6,
        "logarithmic law for the unstable well",
        log_preferred && r2_ok && numeric_ok,
        &detail,
        t0,
    );
}

#[test]
fn criterion_07_limit_distribution() {
    let t0 = Instant::now();
    let os = wkb_overlap_set(2, 1e-8, 40.0).unwrap();
    let fs = frequency_spectrum(&os);
    let bins = bin_pnu(&fs, 2.0, 200);

    let mut worst: (f64, f64) = (0.0, 0.0);
    for b in bins.iter().filter(|b| b.nu >= 0.05 && b.nu <= 1.0) {
        let p0 = limit_distribution(b.nu).unwrap();
        let rel = (b.density - p0).abs() / p0;
        if rel > worst.1 {
            worst = (b.nu, rel);
        }
    }
    let hist_ok = worst.1 <= 0.05;

    // ∫ P0 = 1 by quadrature (logarithmic head handled in closed form)
    let body = quad::integrate(|nu| limit_distribution(nu).unwrap(), 1e-9, 4.0, 1e-9)
        .unwrap()
        .value;
    let head = quad::integrate(
        |nu: f64| -4.0 * ((TWO_PI * nu).ln() + ehrenfest_core::specfun::EULER_GAMMA),
        0.0,
        1e-9,
        1e-9,
    )
    .unwrap()
    .value;
    let total = 2.0 * (body + head);
    let norm_ok = (total - 1.0).abs() < 1e-6;

    let detail = format!(
        "worst histogram deviation {:.4} at nu = {:.3} (<= 0.05 required), ∫P0 = {total:.8}",
        worst.1, worst.0
    );
    conclude(
        7,
        "hbar -> 0 limit distribution",
        hist_ok && norm_ok,
        &detail,
        t0,
    );
}

#[test]
fn criterion_08_parity_selection_rule() {
    let t0 = Instant::now();
    let mut worst = 0.0_f64;
    let mut states_checked = 0usize;
    for (spec, window) in [
        (PotentialSpec::double(1, 2).unwrap(), (-0.03, 0.03)),
        (PotentialSpec::single(2).unwrap(), (1e-11, 0.03)),
    ] {
        for hbar in [1e-2, 1e-3] {
            let w = solve_eigen_window(
                &spec,
                hbar,
                window.0,
                window.1,
                Some(Parity::Odd),
                &SolverOptions::default(),
            )
            .unwrap();
            assert!(!w.states.is_empty());
            let wp = WavePacket::centered(hbar);
            for st in &w.states {
                let weight = overlap_weight(st, &wp);
                worst = worst.max(weight);
                states_checked += 1;
            }
        }
    }
    // every numeric pipeline run also spot-checks this rule internally and
    // errors on violation; the sweeps of criteria 5/6/10 ran clean
    let pass = worst < 1e-20;
    let detail = format!("{states_checked} odd states, largest |c|^2 = {worst:.1e}");
    conclude(8, "parity selection rule", pass, &detail, t0);
}

#[test]
fn criterion_09_mass_capture_and_parseval() {
    let t0 = Instant::now();
    let mut pass = true;
    let mut min_mass = f64::MAX;
    let mut worst_parseval = 0.0_f64;

    let single = numeric_overlap_set(&PotentialSpec::single(2).unwrap(), 1e-2).unwrap();
    let sets: Vec<&OverlapSet> = alpha1_numeric_sets()
        .iter()
        .map(|(_, os)| os)
        .chain(std::iter::once(&single))
        .collect();
    for os in sets {
        min_mass = min_mass.min(os.captured_mass);
        pass &= os.captured_mass >= 0.999 && os.captured_mass <= 1.0 + 1e-8;
        let fs = frequency_spectrum(os);
        let residual = (fs.total_weight() - os.captured_mass.powi(2)).abs();
        worst_parseval = worst_parseval.max(residual);
        pass &= residual < 1e-10;
        // a nu_E extraction must succeed on every set
        pass &= ehrenfest_frequency(os, DEFAULT_WEIGHT_FLOOR, Method::Numeric).is_ok();
    }
    let detail =
        format!("min captured mass {min_mass:.6}, worst Parseval residual {worst_parseval:.2e}");
    conclude(
        9,
        "mass capture and Parseval bookkeeping",
        pass,
        &detail,
        t0,
    );
}

#[test]
fn criterion_10_frequency_gap() {
    let t0 = Instant::now();
    let mut pass = true;
    let mut points: Vec<EhrenfestPoint> = Vec::new();
    let mut detail = String::new();
    for (hbar, os) in alpha1_numeric_sets().iter().filter(|(h, _)| {
        [1e-2, 1e-3, 1e-4]
            .iter()
            .any(|t| (h / t - 1.0).abs() < 1e-9)
    }) {
        let p = ehrenfest_frequency(os, DEFAULT_WEIGHT_FLOOR, Method::Numeric).unwrap();
        let fs = frequency_spectrum(os);
        let bins = bin_pnu(&fs, 2.0, 200);
        let width = 2.0 / 200.0;
        for b in &bins {
            if b.nu + 0.5 * width <= p.nu_e {
                pass &= b.density == 0.0;
            }
        }
        // the first occupied bin is the one containing nu_E
        let first_hot = bins.iter().find(|b| b.density > 0.0).unwrap();
        pass &= (first_hot.nu - p.nu_e).abs() <= 0.5 * width;
        // the minimizing pair straddles the classical equilibrium energy
        pass &= p.eps_lo < 0.0 && p.eps_hi > 0.0;
        detail.push_str(&format!("nu_E({hbar:.0e}) = {:.5}; ", p.nu_e));
        points.push(p);
    }
    assert_eq!(points.len(), 3);
    pass &= points[0].nu_e > points[1].nu_e && points[1].nu_e > points[2].nu_e;
    detail.push_str("gap shrinks monotonically");
    conclude(10, "spectral gap and its shrinking", pass, &detail, t0);
}
