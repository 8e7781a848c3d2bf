//! ħ sweeps across interchangeable Ehrenfest estimation strategies, plus
//! scaling-law fits and model selection.
//!
//! Each strategy lives behind [`EhrenfestEstimator`] and is registered by
//! name, so callers (including the CLI) select one at runtime.

use crate::dynamics::{
    self, EhrenfestPoint, Method, OverlapEntry, OverlapSet, WavePacket, DEFAULT_WEIGHT_FLOOR,
};
use crate::error::{Error, Result};
use crate::model::{PotentialSpec, WellKind};
use crate::semiclassics;
use crate::spectrum::{self, Parity, SolverOptions};
use rayon::prelude::*;

/// A strategy computing one Ehrenfest point at a given ħ.
pub trait EhrenfestEstimator: Sync {
    fn method(&self) -> Method;

    fn name(&self) -> &'static str {
        self.method().as_str()
    }

    /// Check compatibility with a potential before running.
    fn validate(&self, spec: &PotentialSpec) -> Result<()>;

    fn estimate(
        &self,
        spec: &PotentialSpec,
        hbar: f64,
        weight_floor: f64,
    ) -> Result<EhrenfestPoint>;
}

/// Full pipeline on the numeric spectrum: even window solve → overlaps →
/// minimal transition frequency. Works for both well kinds.
pub struct NumericEstimator;

/// Closed-form single-well ladder: `ν_E = (ε₂ - ε₀)/(2πħ)`.
pub struct WkbSingleWellEstimator;

/// Regularized barrier-top quantization of the `α = 1, β = 2` double well.
pub struct RegWkbEstimator;

/// Registry of every available strategy.
pub static ESTIMATORS: [&dyn EhrenfestEstimator; 3] =
    [&NumericEstimator, &WkbSingleWellEstimator, &RegWkbEstimator];

/// Look a strategy up by its registered name (`numeric`, `wkb`, `regwkb`).
pub fn estimator_by_name(name: &str) -> Option<&'static dyn EhrenfestEstimator> {
    ESTIMATORS.iter().copied().find(|e| e.name() == name)
}

/// The strategy registered for a [`Method`].
pub fn estimator(method: Method) -> &'static dyn EhrenfestEstimator {
    ESTIMATORS
        .iter()
        .copied()
        .find(|e| e.method() == method)
        .expect("every method is registered")
}

/// Overlap energy window: `(well bottom, +20ħ]` for single wells,
/// `[-24ħ, +20ħ]` (clamped above the well bottom) for double wells. Weights
/// decay like `e^{-2|ε|/ħ}`, so these windows capture all but ~e⁻⁴⁰ of the
/// packet norm.
pub fn default_energy_window(spec: &PotentialSpec, hbar: f64) -> (f64, f64) {
    overlap_window(spec, hbar)
}

fn overlap_window(spec: &PotentialSpec, hbar: f64) -> (f64, f64) {
    let min_v = spec.min_energy();
    match spec.kind() {
        WellKind::Single => (1e-9 * hbar, 20.0 * hbar),
        WellKind::Double => ((-24.0 * hbar).max(min_v * (1.0 - 1e-9)), 20.0 * hbar),
    }
}

/// Full numeric overlap pipeline at one ħ: solve the even window (widening
/// it until at least 99.9% of the packet norm is captured) and return the
/// weights of a packet centered on the equilibrium point.
pub fn numeric_overlap_set(spec: &PotentialSpec, hbar: f64) -> Result<OverlapSet> {
    let (mut lo, mut hi) = overlap_window(spec, hbar);
    let mut os = windowed_overlap_set(spec, hbar, lo, hi)?;
    for _ in 0..3 {
        if !os.is_under_covered() {
            break;
        }
        hi += 10.0 * hbar;
        if spec.kind() == WellKind::Double {
            lo = (lo - 10.0 * hbar).max(spec.min_energy() * (1.0 - 1e-9));
        }
        os = windowed_overlap_set(spec, hbar, lo, hi)?;
    }
    if os.is_under_covered() {
        return Err(Error::UnderCoverage {
            captured: os.captured_mass,
        });
    }
    Ok(os)
}

/// Solve one even window streaming overlaps (states are dropped as soon as
/// their weight is computed), plus a handful of odd states near the
/// equilibrium whose weights must vanish by parity.
fn windowed_overlap_set(
    spec: &PotentialSpec,
    hbar: f64,
    eps_lo: f64,
    eps_hi: f64,
) -> Result<OverlapSet> {
    let wp = WavePacket::centered(hbar);
    let opts = SolverOptions::default();
    let entries: Vec<OverlapEntry> = spectrum::map_eigen_window(
        spec,
        hbar,
        eps_lo,
        eps_hi,
        Some(Parity::Even),
        &opts,
        |st| {
            Ok(OverlapEntry {
                n: st.n,
                energy: st.energy,
                weight: dynamics::overlap_weight(&st, &wp),
            })
        },
    )?;

    // parity selection rule spot-check on odd states near ε = 0
    let odd_lo = (-3.0 * hbar)
        .max(spec.min_energy() * (1.0 - 1e-9))
        .min(eps_hi);
    let odd_weights: Vec<(usize, f64)> = spectrum::map_eigen_window(
        spec,
        hbar,
        odd_lo.max(eps_lo),
        3.0 * hbar,
        Some(Parity::Odd),
        &opts,
        |st| Ok((st.n, dynamics::overlap_weight(&st, &wp))),
    )?;
    for (n, w) in odd_weights {
        if w >= dynamics::OVERLAP_DROP_THRESHOLD {
            return Err(Error::SolverInconsistency(format!(
                "odd state n={n} has weight {w:e}, violating the parity selection rule"
            )));
        }
    }

    let entries = entries
        .into_iter()
        .filter(|e| e.weight >= dynamics::OVERLAP_DROP_THRESHOLD)
        .collect();
    Ok(OverlapSet::from_entries(hbar, entries))
}

impl EhrenfestEstimator for NumericEstimator {
    fn method(&self) -> Method {
        Method::Numeric
    }

    fn validate(&self, _spec: &PotentialSpec) -> Result<()> {
        Ok(())
    }

    fn estimate(
        &self,
        spec: &PotentialSpec,
        hbar: f64,
        weight_floor: f64,
    ) -> Result<EhrenfestPoint> {
        let os = numeric_overlap_set(spec, hbar)?;
        dynamics::ehrenfest_frequency(&os, weight_floor, Method::Numeric)
    }
}

impl EhrenfestEstimator for WkbSingleWellEstimator {
    fn method(&self) -> Method {
        Method::WkbSingleWell
    }

    fn validate(&self, spec: &PotentialSpec) -> Result<()> {
        if spec.kind() != WellKind::Single {
            return Err(Error::MethodMismatch {
                method: "wkb",
                reason: "the closed-form ladder applies to single wells only".into(),
            });
        }
        Ok(())
    }

    fn estimate(
        &self,
        spec: &PotentialSpec,
        hbar: f64,
        _weight_floor: f64,
    ) -> Result<EhrenfestPoint> {
        self.validate(spec)?;
        semiclassics::single_well_ehrenfest(spec.beta(), hbar)
    }
}

impl EhrenfestEstimator for RegWkbEstimator {
    fn method(&self) -> Method {
        Method::RegWkb
    }

    fn validate(&self, spec: &PotentialSpec) -> Result<()> {
        if spec.kind() != WellKind::Double || spec.alpha() != 1 || spec.beta() != 2 {
            return Err(Error::MethodMismatch {
                method: "regwkb",
                reason: "the regularized quantization is derived for the alpha=1, beta=2 \
                         double well only"
                    .into(),
            });
        }
        Ok(())
    }

    fn estimate(
        &self,
        spec: &PotentialSpec,
        hbar: f64,
        _weight_floor: f64,
    ) -> Result<EhrenfestPoint> {
        self.validate(spec)?;
        semiclassics::regwkb_ehrenfest(hbar)
    }
}

/// Configuration of one ħ sweep.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub spec: PotentialSpec,
    /// Strictly descending positive ħ values.
    pub hbar_values: Vec<f64>,
    pub method: Method,
    pub weight_floor: f64,
    /// Worker cap for the per-ħ pipeline runs; `None` uses the default pool.
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn new(spec: PotentialSpec, hbar_values: Vec<f64>, method: Method) -> Self {
        SweepConfig {
            spec,
            hbar_values,
            method,
            weight_floor: DEFAULT_WEIGHT_FLOOR,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hbar_values.is_empty() {
            return Err(Error::InvalidParams("no hbar values".into()));
        }
        for w in self.hbar_values.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::InvalidParams(
                    "hbar values must be strictly descending".into(),
                ));
            }
        }
        if !(self.hbar_values[self.hbar_values.len() - 1] > 0.0) {
            return Err(Error::InvalidParams("hbar values must be positive".into()));
        }
        if !(self.weight_floor > 0.0) {
            return Err(Error::InvalidParams("weight floor must be positive".into()));
        }
        estimator(self.method).validate(&self.spec)
    }
}

/// Sweep result: points that succeeded (ordered by descending ħ) and
/// per-ħ failure diagnostics.
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub points: Vec<EhrenfestPoint>,
    pub failures: Vec<(f64, String)>,
}

/// Run the configured strategy over the ħ grid. Individual failures are
/// recorded and skipped; only a fully failed sweep is an error.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let est = estimator(cfg.method);
    let run = || {
        cfg.hbar_values
            .par_iter()
            .map(|&hbar| (hbar, est.estimate(&cfg.spec, hbar, cfg.weight_floor)))
            .collect::<Vec<_>>()
    };
    let results = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (hbar, r) in results {
        match r {
            Ok(p) => points.push(p),
            Err(e) => failures.push((hbar, e.to_string())),
        }
    }
    if points.is_empty() {
        let diag = failures
            .iter()
            .map(|(h, e)| format!("  hbar={h:e}: {e}"))
            .collect::<Vec<_>>()
            .join("\n");
        return Err(Error::SweepFailed(diag));
    }
    Ok(SweepOutcome { points, failures })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitModel {
    /// `ln ν_E⁻¹ = intercept + slope · ln ħ`.
    PowerLaw,
    /// `ν_E⁻¹ = intercept + slope · ln(1/ħ)`.
    Logarithmic,
}

impl FitModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitModel::PowerLaw => "power",
            FitModel::Logarithmic => "log",
        }
    }
}

/// Least-squares fit of `ν_E⁻¹(ħ)` in the coordinates of the chosen model.
#[derive(Clone, Debug)]
pub struct ScalingFit {
    pub model: FitModel,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

/// Fit the scaling of `ν_E⁻¹` with ħ. Requires at least 4 points.
pub fn fit_scaling(points: &[EhrenfestPoint], model: FitModel) -> Result<ScalingFit> {
    if points.len() < 4 {
        return Err(Error::InvalidParams(format!(
            "scaling fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .map(|p| {
            let inv = 1.0 / p.nu_e;
            match model {
                FitModel::PowerLaw => (p.hbar.ln(), inv.ln()),
                FitModel::Logarithmic => ((1.0 / p.hbar).ln(), inv),
            }
        })
        .unzip();

    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx < 1e-24 {
        return Err(Error::DegenerateFit("hbar abscissae are degenerate".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r_squared = if ss_tot <= 1e-300 {
        0.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(ScalingFit {
        model,
        slope,
        intercept,
        r_squared,
        residuals,
    })
}

/// Both fits plus the preferred model (higher R²; ties break toward the
/// power law).
#[derive(Clone, Debug)]
pub struct ModelSelection {
    pub power: ScalingFit,
    pub logarithmic: ScalingFit,
    pub preferred: FitModel,
}

/// Fit both scaling models and pick the better one. Requires at least 5
/// points spanning at least two decades of ħ.
pub fn model_select(points: &[EhrenfestPoint]) -> Result<ModelSelection> {
    if points.len() < 5 {
        return Err(Error::InvalidParams(format!(
            "model selection needs at least 5 points, got {}",
            points.len()
        )));
    }
    let h_max = points.iter().map(|p| p.hbar).fold(f64::MIN, f64::max);
    let h_min = points.iter().map(|p| p.hbar).fold(f64::MAX, f64::min);
    if h_max / h_min < 99.99 {
        return Err(Error::InvalidParams(
            "model selection needs points spanning at least two decades of hbar".into(),
        ));
    }
    let power = fit_scaling(points, FitModel::PowerLaw)?;
    let logarithmic = fit_scaling(points, FitModel::Logarithmic)?;
    let preferred = if logarithmic.r_squared > power.r_squared {
        FitModel::Logarithmic
    } else {
        FitModel::PowerLaw
    };
    Ok(ModelSelection {
        power,
        logarithmic,
        preferred,
    })
}

/// Log-spaced ħ grid from `10^-hi_decade` down to `10^-lo_decade`
/// (descending), `per_decade` points per decade plus the final endpoint.
pub fn hbar_decades(hi_decade: f64, lo_decade: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo_decade > hi_decade) || per_decade == 0 {
        return Err(Error::InvalidParams(format!(
            "invalid decade range {hi_decade}:{lo_decade}"
        )));
    }
    let steps = ((lo_decade - hi_decade) * per_decade as f64).round() as usize;
    Ok((0..=steps)
        .map(|i| 10f64.powf(-(hi_decade + i as f64 / per_decade as f64)))
        .collect())
}
