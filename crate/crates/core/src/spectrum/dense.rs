//! Dense validation oracle: second-order finite-difference discretization
//! of `H` on `[-q_max, q_max]` with zero boundary values, eigenvalues by
//! Sturm-sequence bisection on the symmetric tridiagonal matrix.

use crate::error::{Error, Result};
use crate::model::PotentialSpec;

/// Number of eigenvalues of the tridiagonal matrix strictly below `lambda`,
/// via the LDLT pivot-sign count.
pub(super) fn sturm_count(diag: &[f64], off: f64, lambda: f64) -> usize {
    let n = diag.len();
    if n == 0 {
        return 0;
    }
    let guard = 1e-280 * (1.0 + off.abs());
    let off2 = off * off;
    let mut count = 0usize;
    let mut q = diag[0] - lambda;
    if q < 0.0 {
        count += 1;
    }
    for d in diag.iter().skip(1) {
        let q_safe = if q.abs() < guard {
            if q >= 0.0 {
                guard
            } else {
                -guard
            }
        } else {
            q
        };
        q = (d - lambda) - off2 / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn fd_diagonal(spec: &PotentialSpec, hbar: f64, q_max: f64, n: usize) -> (Vec<f64>, f64) {
    let h = 2.0 * q_max / (n + 1) as f64;
    let kin = hbar * hbar / (h * h);
    let diag = (0..n)
        .map(|i| {
            let q = -q_max + (i + 1) as f64 * h;
            kin + spec.value(q)
        })
        .collect();
    (diag, -0.5 * kin)
}

/// The `k` lowest eigenvalues of the finite-difference Hamiltonian.
pub fn dense_oracle(
    spec: &PotentialSpec,
    hbar: f64,
    q_max: f64,
    grid_points: usize,
    k: usize,
) -> Result<Vec<f64>> {
    if grid_points < 200 {
        return Err(Error::InvalidParams(format!(
            "dense oracle requires at least 200 grid points, got {grid_points}"
        )));
    }
    if k == 0 || k > grid_points / 4 {
        return Err(Error::OutOfRange(format!(
            "k = {k} out of range for {grid_points} grid points"
        )));
    }
    let (diag, off) = fd_diagonal(spec, hbar, q_max, grid_points);

    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for &d in &diag {
        lo = lo.min(d - 2.0 * off.abs());
        hi = hi.max(d + 2.0 * off.abs());
    }
    lo -= 1.0;
    hi += 1.0;

    let mut eigenvalues = Vec::with_capacity(k);
    for j in 0..k {
        let mut a = if j == 0 { lo } else { eigenvalues[j - 1] };
        let mut b = hi;
        for _ in 0..220 {
            let mid = 0.5 * (a + b);
            if (b - a) <= 4.0 * f64::EPSILON * mid.abs().max(1e-3) {
                break;
            }
            if sturm_count(&diag, off, mid) <= j {
                a = mid;
            } else {
                b = mid;
            }
        }
        eigenvalues.push(0.5 * (a + b));
    }
    Ok(eigenvalues)
}

/// Richardson-extrapolated oracle: combines the `n`-point and `2n+1`-point
/// grids (exact step halving), cancelling the leading `O(h²)` error.
pub fn dense_oracle_extrapolated(
    spec: &PotentialSpec,
    hbar: f64,
    q_max: f64,
    grid_points: usize,
    k: usize,
) -> Result<Vec<f64>> {
    let coarse = dense_oracle(spec, hbar, q_max, grid_points, k)?;
    let fine = dense_oracle(spec, hbar, q_max, 2 * grid_points + 1, k)?;
    Ok(coarse
        .iter()
        .zip(fine.iter())
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}
