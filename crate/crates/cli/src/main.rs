//! Command-line driver: spectra, overlap weights, survival-probability
//! frequency spectra and Ehrenfest-frequency sweeps for 1D polynomial
//! single- and double-well Hamiltonians, in rescaled units.
//!
//! Execution is seedless and deterministic: the same invocation reproduces
//! output files byte for byte. Exit codes: 0 success, 1 usage error,
//! 2 numerical failure.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ehrenfest_core::dynamics::{bin_pnu, frequency_spectrum, Method, DEFAULT_WEIGHT_FLOOR};
use ehrenfest_core::model::PotentialSpec;
use ehrenfest_core::semiclassics;
use ehrenfest_core::spectrum::{self, Parity, SolverOptions};
use ehrenfest_core::sweep::{self, fit_scaling, model_select, FitModel, ScalingFit, SweepConfig};
use ehrenfest_core::{io, Error};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ehrenfest",
    about = "Quantum spectra and Ehrenfest-frequency scaling for 1D polynomial wells",
    long_about = "Computes eigenvalues and eigenfunctions, wave-packet overlap weights, \
                  survival-probability frequency spectra and the Ehrenfest (quantum breaking) \
                  frequency for the rescaled well family V = -q^(2a)/(2a) + q^(2b)/(2b). \
                  All execution is deterministic; no seeds exist.",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve and dump eigenvalues (and optionally eigenfunctions) in a window
    Spectrum(SpectrumArgs),
    /// Wave-packet overlap weights |c_n|^2 of the numeric even spectrum
    Overlaps(OverlapsArgs),
    /// Binned frequency spectrum P(nu) of the survival probability
    Pnu(PnuArgs),
    /// Ehrenfest frequency at a single hbar
    Ehrenfest(EhrenfestArgs),
    /// Ehrenfest points over an hbar grid, with scaling-law fits
    Sweep(SweepArgs),
    /// Re-fit scaling laws to a previously produced ehrenfest CSV
    Fit(FitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum WellArg {
    Single,
    Double,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Numeric,
    Wkb,
    Regwkb,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Numeric => Method::Numeric,
            MethodArg::Wkb => Method::WkbSingleWell,
            MethodArg::Regwkb => Method::RegWkb,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
    Both,
}

#[derive(Args)]
struct PotentialArgs {
    /// Well kind of the rescaled family
    #[arg(long, value_enum)]
    well: WellArg,
    /// Barrier exponent half-degree (double well only)
    #[arg(long, default_value_t = 1)]
    alpha: u32,
    /// Confinement exponent half-degree
    #[arg(long)]
    beta: u32,
}

impl PotentialArgs {
    fn spec(&self) -> Result<PotentialSpec> {
        let spec = match self.well {
            WellArg::Single => PotentialSpec::single(self.beta),
            WellArg::Double => PotentialSpec::double(self.alpha, self.beta),
        }?;
        Ok(spec)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output path (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

impl OutputArgs {
    fn emit(&self, csv: String, json: String) -> Result<()> {
        let text = match self.format {
            FormatArg::Csv => csv,
            FormatArg::Json => json,
        };
        match &self.out {
            Some(path) => {
                std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
            }
            None => print!("{text}"),
        }
        Ok(())
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    pot: PotentialArgs,
    /// Rescaled Planck constant
    #[arg(long)]
    hbar: f64,
    /// Lower edge of the energy window (defaults to the overlap window)
    #[arg(long, allow_negative_numbers = true)]
    eps_min: Option<f64>,
    /// Upper edge of the energy window (defaults to the overlap window)
    #[arg(long, allow_negative_numbers = true)]
    eps_max: Option<f64>,
    /// Parity filter
    #[arg(long, value_enum, default_value = "both")]
    parity: ParityArg,
    /// Quantum numbers whose wavefunction samples should be exported
    #[arg(long = "phi-n")]
    phi_n: Vec<usize>,
    /// Directory for wavefunction CSV files (phi_<n>.csv)
    #[arg(long, default_value = ".")]
    phi_out: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OverlapsArgs {
    #[command(flatten)]
    pot: PotentialArgs,
    #[arg(long)]
    hbar: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PnuArgs {
    #[command(flatten)]
    pot: PotentialArgs,
    #[arg(long)]
    hbar: f64,
    /// numeric: full pipeline; wkb: closed-form single-well ladder
    #[arg(long, value_enum, default_value = "numeric")]
    method: MethodArg,
    /// Number of bins on [0, nu-max]
    #[arg(long, default_value_t = 200)]
    bins: usize,
    /// Upper edge of the binned frequency range
    #[arg(long, default_value_t = 2.0)]
    nu_max: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct EhrenfestArgs {
    #[command(flatten)]
    pot: PotentialArgs,
    #[arg(long)]
    hbar: f64,
    #[arg(long, value_enum, default_value = "numeric")]
    method: MethodArg,
    /// Smallest |c_n|^2 that counts as nonzero in the gap definition
    #[arg(long, default_value_t = DEFAULT_WEIGHT_FLOOR)]
    weight_floor: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    pot: PotentialArgs,
    /// Explicit hbar values (repeatable, descending)
    #[arg(long = "hbar")]
    hbar: Vec<f64>,
    /// Log-spaced grid "A:B" from 10^-A down to 10^-B
    #[arg(long, conflicts_with = "hbar")]
    hbar_decades: Option<String>,
    /// Points per decade for --hbar-decades
    #[arg(long, default_value_t = 8)]
    per_decade: usize,
    #[arg(long, value_enum, default_value = "numeric")]
    method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_WEIGHT_FLOOR)]
    weight_floor: f64,
    /// Cap on concurrent per-hbar pipeline runs
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FitArgs {
    /// A CSV file previously produced by `sweep` or `ehrenfest`
    #[arg(long)]
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, anything else is usage
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Spectrum(a) => cmd_spectrum(a),
        Cmd::Overlaps(a) => cmd_overlaps(a),
        Cmd::Pnu(a) => cmd_pnu(a),
        Cmd::Ehrenfest(a) => cmd_ehrenfest(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Fit(a) => cmd_fit(a),
    }
}

fn cmd_spectrum(a: SpectrumArgs) -> Result<()> {
    let spec = a.pot.spec()?;
    let (lo_default, hi_default) = sweep::default_energy_window(&spec, a.hbar);
    let eps_min = a.eps_min.unwrap_or(lo_default);
    let eps_max = a.eps_max.unwrap_or(hi_default);
    let parity = match a.parity {
        ParityArg::Even => Some(Parity::Even),
        ParityArg::Odd => Some(Parity::Odd),
        ParityArg::Both => None,
    };
    let window = spectrum::solve_eigen_window(
        &spec,
        a.hbar,
        eps_min,
        eps_max,
        parity,
        &SolverOptions::default(),
    )?;
    for &n in &a.phi_n {
        let state = window
            .states
            .iter()
            .find(|s| s.n == n)
            .ok_or_else(|| anyhow!("state n={n} not inside the solved window"))?;
        let path = a.phi_out.join(format!("phi_{n}.csv"));
        std::fs::write(&path, io::wavefunction_csv(state))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    a.output
        .emit(io::spectrum_csv(&window), io::spectrum_json(&window))
}

fn cmd_overlaps(a: OverlapsArgs) -> Result<()> {
    let spec = a.pot.spec()?;
    let os = sweep::numeric_overlap_set(&spec, a.hbar)?;
    a.output.emit(io::overlaps_csv(&os), io::overlaps_json(&os))
}

fn cmd_pnu(a: PnuArgs) -> Result<()> {
    let spec = a.pot.spec()?;
    let os = match Method::from(a.method) {
        Method::Numeric => sweep::numeric_overlap_set(&spec, a.hbar)?,
        Method::WkbSingleWell => {
            if !matches!(a.pot.well, WellArg::Single) {
                bail!(Error::MethodMismatch {
                    method: "wkb",
                    reason: "the closed-form ladder applies to single wells only".into(),
                });
            }
            semiclassics::wkb_overlap_set(spec.beta(), a.hbar, 40.0)?
        }
        Method::RegWkb => {
            bail!("pnu supports the numeric and wkb methods (regwkb yields levels, not weights)")
        }
    };
    if a.bins == 0 || a.nu_max <= 0.0 || a.nu_max.is_nan() {
        bail!(Error::InvalidParams(
            "bins and nu-max must be positive".into()
        ));
    }
    let fs = frequency_spectrum(&os);
    let bins = bin_pnu(&fs, a.nu_max, a.bins);
    a.output.emit(io::pnu_csv(&bins), io::pnu_json(&bins))
}

fn cmd_ehrenfest(a: EhrenfestArgs) -> Result<()> {
    let spec = a.pot.spec()?;
    let method = Method::from(a.method);
    let est = sweep::estimator(method);
    est.validate(&spec)?;
    let point = est.estimate(&spec, a.hbar, a.weight_floor)?;

    println!("hbar = {}", point.hbar);
    println!("method = {}", point.method);
    println!("nu_E = {}", point.nu_e);
    println!("nu_E_inv = {}", 1.0 / point.nu_e);
    println!("pair: eps_lo = {}, eps_hi = {}", point.eps_lo, point.eps_hi);
    if a.output.out.is_some() {
        let points = [point];
        a.output
            .emit(io::ehrenfest_csv(&points), io::ehrenfest_json(&points))?;
    }
    Ok(())
}

fn parse_decades(s: &str) -> Result<(f64, f64)> {
    let (hi, lo) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("--hbar-decades expects \"A:B\", got {s:?}"))?;
    Ok((hi.trim().parse()?, lo.trim().parse()?))
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let spec = a.pot.spec()?;
    let hbar_values = match (&a.hbar_decades, a.hbar.is_empty()) {
        (Some(s), _) => {
            let (hi, lo) = parse_decades(s)?;
            sweep::hbar_decades(hi, lo, a.per_decade)?
        }
        (None, false) => a.hbar.clone(),
        (None, true) => bail!("provide --hbar values or --hbar-decades A:B"),
    };
    let cfg = SweepConfig {
        spec,
        hbar_values,
        method: Method::from(a.method),
        weight_floor: a.weight_floor,
        workers: a.workers,
    };
    let outcome = sweep::run_sweep(&cfg)?;
    for (hbar, msg) in &outcome.failures {
        eprintln!("# skipped hbar={hbar:e}: {msg}");
    }
    report_fits(&outcome.points);
    a.output.emit(
        io::ehrenfest_csv(&outcome.points),
        io::ehrenfest_json(&outcome.points),
    )
}

fn cmd_fit(a: FitArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.input)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let points = io::parse_ehrenfest_csv(&text)?;
    print_fit_report(&points, &mut std::io::stdout())?;
    Ok(())
}

fn report_fits(points: &[ehrenfest_core::dynamics::EhrenfestPoint]) {
    let _ = print_fit_report(points, &mut std::io::stderr());
}

fn print_fit_report(
    points: &[ehrenfest_core::dynamics::EhrenfestPoint],
    sink: &mut dyn std::io::Write,
) -> Result<()> {
    let fit_line = |f: &ScalingFit| {
        format!(
            "# fit {}: slope={} intercept={} r2={}",
            f.model.as_str(),
            f.slope,
            f.intercept,
            f.r_squared
        )
    };
    match model_select(points) {
        Ok(sel) => {
            writeln!(sink, "{}", fit_line(&sel.power))?;
            writeln!(sink, "{}", fit_line(&sel.logarithmic))?;
            writeln!(sink, "# preferred: {}", sel.preferred.as_str())?;
        }
        Err(_) => {
            // not enough span for model selection; report whatever fits run
            for model in [FitModel::PowerLaw, FitModel::Logarithmic] {
                if let Ok(f) = fit_scaling(points, model) {
                    writeln!(sink, "{}", fit_line(&f))?;
                }
            }
        }
    }
    Ok(())
}
