//! Renormalized Numerov integration on the half line `q ∈ [0, q_max]`.
//!
//! The symmetric potential reduces the full-line problem to the half line
//! with a derivative-zero (even) or value-zero (odd) condition at `q = 0`.
//! Sweeps renormalize periodically so that tunneling regions with actions
//! of thousands of nats cannot overflow.

use super::Parity;

/// Rescale whenever amplitudes exceed this.
const RENORM_LIMIT: f64 = 1e140;

/// Shared per-window data: potential samples on the uniform half grid
/// `q_i = i * step`.
pub(super) struct HalfLine {
    pub step: f64,
    pub v: Vec<f64>,
    pub hbar: f64,
    /// `V''(0)`, used for high-order start values.
    pub curvature0: f64,
}

impl HalfLine {
    /// Numerov factor `f_i = 1 - (h²/12) g_i` for `y'' = g y`,
    /// `g = 2(V - eps)/ħ²`.
    #[inline]
    fn fcoef(&self, vi: f64, eps: f64) -> f64 {
        1.0 - self.step * self.step / 6.0 * (vi - eps) / (self.hbar * self.hbar)
    }

    fn start_values(&self, eps: f64, parity: Parity) -> (f64, f64) {
        let h = self.step;
        let f0 = 2.0 * (self.v[0] - eps) / (self.hbar * self.hbar);
        let fpp0 = 2.0 * self.curvature0 / (self.hbar * self.hbar);
        match parity {
            Parity::Even => {
                let y1 = 1.0 + f0 * h * h / 2.0 + (f0 * f0 + fpp0) * h.powi(4) / 24.0;
                (1.0, y1)
            }
            Parity::Odd => {
                let y1 = h * (1.0 + f0 * h * h / 6.0) + (3.0 * fpp0 + f0 * f0) * h.powi(5) / 120.0;
                (0.0, y1)
            }
        }
    }

    /// Outward sweep. Returns the interior node count and, when `capture`
    /// is set, the consistent-scale triple `(y[m-1], y[m], y[m+1])`.
    fn outward(&self, eps: f64, parity: Parity, capture: Option<usize>) -> (usize, [f64; 3]) {
        let n = self.v.len();
        let stop = capture.map(|m| m + 1).unwrap_or(n - 1);
        debug_assert!(stop < n);

        let (y0, y1) = self.start_values(eps, parity);
        let mut ya = y0; // y[i-1]
        let mut yb = y1; // y[i]
        let mut fa = self.fcoef(self.v[0], eps);
        let mut fb = self.fcoef(self.v[1], eps);
        let mut nodes = 0usize;
        let mut last_sign = if y0 != 0.0 { y0 > 0.0 } else { y1 > 0.0 };
        let mut trio = [y0, y1, 0.0];

        for i in 1..stop {
            let fc = self.fcoef(self.v[i + 1], eps);
            let yc = ((12.0 - 10.0 * fb) * yb - fa * ya) / fc;
            if yc != 0.0 {
                let s = yc > 0.0;
                if s != last_sign {
                    nodes += 1;
                    last_sign = s;
                }
            }
            if capture == Some(i) {
                trio = [ya, yb, yc];
            }
            ya = yb;
            yb = yc;
            fa = fb;
            fb = fc;
            if yb.abs() > RENORM_LIMIT || ya.abs() > RENORM_LIMIT {
                let scale = 1.0 / yb.abs().max(ya.abs());
                ya *= scale;
                yb *= scale;
            }
        }
        (nodes, trio)
    }

    /// Inward sweep from the Dirichlet end down to `i_match`, returning the
    /// consistent-scale triple `(y[m-1], y[m], y[m+1])`.
    fn inward(&self, eps: f64, i_match: usize) -> [f64; 3] {
        let n = self.v.len();
        debug_assert!(i_match >= 1 && i_match + 2 <= n);

        let mut yb = 0.0_f64; // y[i+1]
        let mut ya = 1e-250; // y[i]
        let mut fb = self.fcoef(self.v[n - 1], eps);
        let mut fa = self.fcoef(self.v[n - 2], eps);
        let mut trio = [0.0, ya, yb];

        for i in (i_match.saturating_sub(1)..=n - 3).rev() {
            let fc = self.fcoef(self.v[i], eps);
            let yc = ((12.0 - 10.0 * fa) * ya - fb * yb) / fc;
            if i + 1 == i_match {
                trio = [yc, ya, yb];
            }
            yb = ya;
            ya = yc;
            fb = fa;
            fa = fc;
            if ya.abs() > RENORM_LIMIT || yb.abs() > RENORM_LIMIT {
                let scale = 1.0 / ya.abs().max(yb.abs());
                ya *= scale;
                yb *= scale;
            }
        }
        trio
    }

    /// Interior node count of the outward solution; monotone in `eps`.
    pub(super) fn count_nodes(&self, eps: f64, parity: Parity) -> usize {
        self.outward(eps, parity, None).0
    }

    /// Log-derivative mismatch at the matching index, in cross-product form:
    /// `W = y_out' · y_in - y_in' · y_out` with central-difference
    /// derivatives, each branch normalized by its local amplitude. Zero
    /// exactly when the branches are proportional across the match.
    pub(super) fn wronskian(&self, eps: f64, parity: Parity, i_match: usize) -> f64 {
        let (_, a) = self.outward(eps, parity, Some(i_match));
        let b = self.inward(eps, i_match);
        let sa = a[0]
            .abs()
            .max(a[1].abs())
            .max(a[2].abs())
            .max(f64::MIN_POSITIVE);
        let sb = b[0]
            .abs()
            .max(b[1].abs())
            .max(b[2].abs())
            .max(f64::MIN_POSITIVE);
        ((a[2] - a[0]) / sa) * (b[1] / sb) - ((b[2] - b[0]) / sb) * (a[1] / sa)
    }

    /// Assembled (unnormalized) half-line samples at an eigenvalue.
    pub(super) fn assemble(&self, eps: f64, parity: Parity, i_match: usize) -> Vec<f64> {
        let n = self.v.len();

        // outward branch, recorded up to i_match
        let mut samples = vec![0.0_f64; n];
        let (y0, y1) = self.start_values(eps, parity);
        samples[0] = y0;
        samples[1] = y1;
        let mut fa = self.fcoef(self.v[0], eps);
        let mut fb = self.fcoef(self.v[1], eps);
        for i in 1..i_match.max(1) {
            let fc = self.fcoef(self.v[i + 1], eps);
            samples[i + 1] = ((12.0 - 10.0 * fb) * samples[i] - fa * samples[i - 1]) / fc;
            fa = fb;
            fb = fc;
            if samples[i + 1].abs() > RENORM_LIMIT {
                let scale = 1.0 / samples[i + 1].abs();
                for s in samples[..=i + 1].iter_mut() {
                    *s *= scale;
                }
            }
        }
        let out_match = samples[i_match];

        // inward branch from the far end, recorded down to i_match
        let mut tail = vec![0.0_f64; n - i_match];
        let m = tail.len();
        tail[m - 1] = 0.0;
        if m >= 2 {
            tail[m - 2] = 1e-250;
        }
        let mut fb2 = self.fcoef(self.v[n - 1], eps);
        let mut fa2 = self.fcoef(self.v[n - 2], eps);
        for j in (0..m.saturating_sub(2)).rev() {
            let i = i_match + j;
            let fc = self.fcoef(self.v[i], eps);
            tail[j] = ((12.0 - 10.0 * fa2) * tail[j + 1] - fb2 * tail[j + 2]) / fc;
            fb2 = fa2;
            fa2 = fc;
            if tail[j].abs() > RENORM_LIMIT {
                let scale = 1.0 / tail[j].abs();
                for s in tail[j..].iter_mut() {
                    *s *= scale;
                }
            }
        }
        let in_match = tail[0];

        // scale the inward branch onto the outward one
        let ratio = out_match / in_match;
        for (j, t) in tail.iter().enumerate().skip(1) {
            samples[i_match + j] = t * ratio;
        }
        samples
    }
}
