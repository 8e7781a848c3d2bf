//! Flat-file output: versioned CSV schemas and their one-to-one JSON
//! mirrors. Serialization is deterministic, so re-running a configuration
//! reproduces files byte for byte.

use crate::dynamics::{EhrenfestPoint, Method, OverlapSet, PnuBin};
use crate::error::{Error, Result};
use crate::spectrum::{EigenState, SpectralWindow};
use serde_json::json;

const SCHEMA: &str = "v1";

fn csv_header(columns: &str) -> String {
    format!("# schema={SCHEMA}\n{columns}\n")
}

/// `hbar,nu_E,nu_E_inv,method,eps_lo,eps_hi`
pub fn ehrenfest_csv(points: &[EhrenfestPoint]) -> String {
    let mut out = csv_header("hbar,nu_E,nu_E_inv,method,eps_lo,eps_hi");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.hbar,
            p.nu_e,
            1.0 / p.nu_e,
            p.method,
            p.eps_lo,
            p.eps_hi
        ));
    }
    out
}

pub fn ehrenfest_json(points: &[EhrenfestPoint]) -> String {
    let rows: Vec<_> = points
        .iter()
        .map(|p| {
            json!({
                "hbar": p.hbar,
                "nu_E": p.nu_e,
                "nu_E_inv": 1.0 / p.nu_e,
                "method": p.method.as_str(),
                "eps_lo": p.eps_lo,
                "eps_hi": p.eps_hi,
            })
        })
        .collect();
    json!({ "schema": SCHEMA, "rows": rows }).to_string()
}

/// Parse a previously written ehrenfest CSV (for re-fitting).
pub fn parse_ehrenfest_csv(text: &str) -> Result<Vec<EhrenfestPoint>> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("hbar") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!(
                "line {}: expected 6 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
        };
        points.push(EhrenfestPoint {
            hbar: num(0)?,
            nu_e: num(1)?,
            method: fields[3].parse::<Method>()?,
            eps_lo: num(4)?,
            eps_hi: num(5)?,
        });
    }
    if points.is_empty() {
        return Err(Error::Parse("no data rows found".into()));
    }
    Ok(points)
}

/// `n,eps,parity`
pub fn spectrum_csv(window: &SpectralWindow) -> String {
    let mut out = csv_header("n,eps,parity");
    for st in &window.states {
        out.push_str(&format!("{},{},{}\n", st.n, st.energy, st.parity.as_str()));
    }
    out
}

pub fn spectrum_json(window: &SpectralWindow) -> String {
    let rows: Vec<_> = window
        .states
        .iter()
        .map(|st| json!({ "n": st.n, "eps": st.energy, "parity": st.parity.as_str() }))
        .collect();
    json!({ "schema": SCHEMA, "rows": rows }).to_string()
}

/// `n,eps,weight`
pub fn overlaps_csv(os: &OverlapSet) -> String {
    let mut out = csv_header("n,eps,weight");
    for e in &os.entries {
        out.push_str(&format!("{},{},{}\n", e.n, e.energy, e.weight));
    }
    out
}

pub fn overlaps_json(os: &OverlapSet) -> String {
    let rows: Vec<_> = os
        .entries
        .iter()
        .map(|e| json!({ "n": e.n, "eps": e.energy, "weight": e.weight }))
        .collect();
    json!({ "schema": SCHEMA, "rows": rows }).to_string()
}

/// `nu,density`
pub fn pnu_csv(bins: &[PnuBin]) -> String {
    let mut out = csv_header("nu,density");
    for b in bins {
        out.push_str(&format!("{},{}\n", b.nu, b.density));
    }
    out
}

pub fn pnu_json(bins: &[PnuBin]) -> String {
    let rows: Vec<_> = bins
        .iter()
        .map(|b| json!({ "nu": b.nu, "density": b.density }))
        .collect();
    json!({ "schema": SCHEMA, "rows": rows }).to_string()
}

/// `q,phi` samples of one eigenfunction.
pub fn wavefunction_csv(state: &EigenState) -> String {
    let mut out = csv_header("q,phi");
    for (i, &phi) in state.samples.iter().enumerate() {
        out.push_str(&format!("{},{}\n", state.grid.q(i), phi));
    }
    out
}
