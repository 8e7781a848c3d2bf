//! Rescaled Hamiltonian family and its classical mechanics.
//!
//! The rescaled Hamiltonian is `H = p²/2 + V(q)` with
//!
//! * single well: `V(q) = q^{2β}/(2β)`,
//! * double well: `V(q) = -q^{2α}/(2α) + q^{2β}/(2β)`, `β > α ≥ 1`.
//!
//! Both wells are even in `q`; the double well has minima `V(±1) =
//! -(β-α)/(2αβ)` and an unstable equilibrium at `q = 0`, `ε = 0`.

use crate::error::{Error, Result};
use crate::quad::integrate_turning;

/// Relative tolerance for action/period quadratures.
const QUAD_REL_TOL: f64 = 1e-10;
/// Relative tolerance for polynomial turning-point root finding.
const ROOT_REL_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WellKind {
    /// `A = 0`: stable equilibrium at the origin.
    Single,
    /// `A = -1`: unstable equilibrium at the origin.
    Double,
}

/// A member of the rescaled potential family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PotentialSpec {
    kind: WellKind,
    alpha: u32,
    beta: u32,
}

impl PotentialSpec {
    /// Single well `V = q^{2β}/(2β)`; `β = 1` is the harmonic oscillator.
    pub fn single(beta: u32) -> Result<Self> {
        if beta < 1 {
            return Err(Error::InvalidPotential(format!(
                "single well requires beta >= 1, got {beta}"
            )));
        }
        Ok(PotentialSpec {
            kind: WellKind::Single,
            alpha: 1,
            beta,
        })
    }

    /// Double well `V = -q^{2α}/(2α) + q^{2β}/(2β)` with `β > α ≥ 1`.
    pub fn double(alpha: u32, beta: u32) -> Result<Self> {
        if alpha < 1 || beta <= alpha {
            return Err(Error::InvalidPotential(format!(
                "double well requires beta > alpha >= 1, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(PotentialSpec {
            kind: WellKind::Double,
            alpha,
            beta,
        })
    }

    pub fn kind(&self) -> WellKind {
        self.kind
    }

    /// Barrier exponent α (meaningful for double wells only).
    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    /// Confinement exponent β.
    pub fn beta(&self) -> u32 {
        self.beta
    }

    /// V(q).
    pub fn value(&self, q: f64) -> f64 {
        let q2 = q * q;
        let beta = self.beta;
        let confine = q2.powi(beta as i32) / (2.0 * beta as f64);
        match self.kind {
            WellKind::Single => confine,
            WellKind::Double => confine - q2.powi(self.alpha as i32) / (2.0 * self.alpha as f64),
        }
    }

    /// V'(q).
    pub fn derivative(&self, q: f64) -> f64 {
        let q2 = q * q;
        let confine = q * q2.powi(self.beta as i32 - 1);
        match self.kind {
            WellKind::Single => confine,
            WellKind::Double => confine - q * q2.powi(self.alpha as i32 - 1),
        }
    }

    /// V''(0): curvature at the equilibrium point.
    pub fn curvature_at_origin(&self) -> f64 {
        match self.kind {
            WellKind::Single => {
                if self.beta == 1 {
                    1.0
                } else {
                    0.0
                }
            }
            WellKind::Double => {
                if self.alpha == 1 {
                    -1.0
                } else if self.beta == 1 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Global minimum of V: 0 for single wells, `-(β-α)/(2αβ)` at `q = ±1`
    /// for double wells.
    pub fn min_energy(&self) -> f64 {
        match self.kind {
            WellKind::Single => 0.0,
            WellKind::Double => {
                let (a, b) = (self.alpha as f64, self.beta as f64);
                -(b - a) / (2.0 * a * b)
            }
        }
    }

    /// All real solutions of `V(q) = eps`, sorted ascending.
    ///
    /// Double wells with `min V < eps < 0` have four turning points; `eps = 0`
    /// returns the degenerate inner pair at the saddle; `eps > 0` has two.
    pub fn turning_points(&self, eps: f64) -> Result<Vec<f64>> {
        let min = self.min_energy();
        if eps <= min {
            return Err(Error::EnergyBelowMinimum { eps, min });
        }
        match self.kind {
            WellKind::Single => {
                let qt = (2.0 * self.beta as f64 * eps).powf(1.0 / (2.0 * self.beta as f64));
                Ok(vec![-qt, qt])
            }
            WellKind::Double => {
                if eps < 0.0 {
                    let (x_in, x_out) = self.double_well_x_roots(eps)?;
                    let (qi, qo) = (x_in.sqrt(), x_out.sqrt());
                    Ok(vec![-qo, -qi, qi, qo])
                } else if eps == 0.0 {
                    let (a, b) = (self.alpha as f64, self.beta as f64);
                    let qo = (b / a).powf(1.0 / (2.0 * (b - a)));
                    Ok(vec![-qo, 0.0, 0.0, qo])
                } else {
                    let (_, x_out) = self.double_well_x_roots(eps)?;
                    let qo = x_out.sqrt();
                    Ok(vec![-qo, qo])
                }
            }
        }
    }

    /// Roots of `x^β/(2β) - x^α/(2α) = eps` in `x = q² > 0`.
    ///
    /// When `β = 2α` (all the systems studied here) the equation is a
    /// quadratic in `y = x^α` and is solved in closed form; otherwise the
    /// roots are bracketed and bisected. For `eps > 0` only the outer root
    /// exists; the first element of the pair is then meaningless.
    fn double_well_x_roots(&self, eps: f64) -> Result<(f64, f64)> {
        let (a, b) = (self.alpha as f64, self.beta as f64);
        if self.beta == 2 * self.alpha {
            // y²/(2β) - y/(2α) = eps  =>  y² - (β/α) y - 2β eps = 0, y = x^α
            let r = b / a;
            let disc = (r * r + 8.0 * b * eps).max(0.0);
            let y_out = 0.5 * (r + disc.sqrt());
            let y_in = 0.5 * (r - disc.sqrt());
            let x_out = y_out.powf(1.0 / a);
            let x_in = if eps < 0.0 { y_in.powf(1.0 / a) } else { 0.0 };
            return Ok((x_in, x_out));
        }
        let f =
            |x: f64| x.powi(self.beta as i32) / (2.0 * b) - x.powi(self.alpha as i32) / (2.0 * a);
        // f decreases on (0,1), increases on (1,∞), f(1) = min V
        let x_out = bisect_root(&|x| f(x) - eps, 1.0, outer_bracket(&f, eps), ROOT_REL_TOL);
        let x_in = if eps < 0.0 {
            bisect_root(&|x| f(x) - eps, 0.0, 1.0, ROOT_REL_TOL)
        } else {
            0.0
        };
        Ok((x_in, x_out))
    }

    /// Phase-space area `Ω(eps)` of `{(p, q) : H(p, q) ≤ eps}`.
    ///
    /// For double wells below the barrier this is the sum of the two
    /// disconnected lobes. Strictly increasing in `eps`.
    pub fn action_area(&self, eps: f64) -> Result<f64> {
        let min = self.min_energy();
        if eps <= min {
            return Err(Error::EnergyBelowMinimum { eps, min });
        }
        let speed = |q: f64| (2.0 * (eps - self.value(q))).max(0.0).sqrt();
        match self.kind {
            WellKind::Single => {
                let qt = self.turning_points(eps)?[1];
                // even integrand: fold to [0, qt]
                Ok(4.0 * integrate_turning(speed, 0.0, qt, false, true, QUAD_REL_TOL)?)
            }
            WellKind::Double => {
                let tp = self.turning_points(eps)?;
                if eps < 0.0 {
                    // two symmetric lobes, each of area 2∫
                    let v = integrate_turning(speed, tp[2], tp[3], true, true, QUAD_REL_TOL)?;
                    Ok(4.0 * v)
                } else {
                    // connected region; inner factor q^{2α} keeps the
                    // integrand regular at the origin even on the separatrix
                    let qo = tp[tp.len() - 1];
                    Ok(4.0 * integrate_turning(speed, 0.0, qo, false, true, QUAD_REL_TOL)?)
                }
            }
        }
    }

    /// Period of the classical orbit at energy `eps`, over one connected
    /// component of the allowed region.
    ///
    /// For double wells: one lobe when `eps < 0`, the full orbit when
    /// `eps > 0`; the separatrix `eps = 0` is rejected (divergent period).
    pub fn classical_period(&self, eps: f64) -> Result<f64> {
        let min = self.min_energy();
        if eps <= min {
            return Err(Error::EnergyBelowMinimum { eps, min });
        }
        let inv_speed = |q: f64| {
            let k = 2.0 * (eps - self.value(q));
            1.0 / k.max(f64::MIN_POSITIVE).sqrt()
        };
        match self.kind {
            WellKind::Single => {
                let qt = self.turning_points(eps)?[1];
                Ok(4.0 * integrate_turning(inv_speed, 0.0, qt, false, true, QUAD_REL_TOL)?)
            }
            WellKind::Double => {
                if eps == 0.0 {
                    return Err(Error::DivergentPeriod);
                }
                let tp = self.turning_points(eps)?;
                if eps < 0.0 {
                    Ok(2.0 * integrate_turning(inv_speed, tp[2], tp[3], true, true, QUAD_REL_TOL)?)
                } else {
                    let qo = tp[1];
                    Ok(4.0 * integrate_turning(inv_speed, 0.0, qo, false, true, QUAD_REL_TOL)?)
                }
            }
        }
    }

    /// Weyl estimate of the number of states in `[eps-ħ, eps+ħ]`:
    /// `N = [Ω(eps+ħ) - Ω(eps-ħ)] / (2πħ)`, with the lower shell clamped
    /// to the potential minimum.
    pub fn weyl_count(&self, eps: f64, hbar: f64) -> Result<f64> {
        if !(hbar > 0.0) {
            return Err(Error::InvalidParams(format!(
                "hbar must be > 0, got {hbar}"
            )));
        }
        let min = self.min_energy();
        let hi = self.action_area(eps + hbar)?;
        let lo = if eps - hbar <= min {
            0.0
        } else {
            self.action_area(eps - hbar)?
        };
        Ok((hi - lo) / (2.0 * std::f64::consts::PI * hbar))
    }
}

fn outer_bracket(f: &impl Fn(f64) -> f64, eps: f64) -> f64 {
    let mut hi = 2.0;
    while f(hi) < eps {
        hi *= 2.0;
    }
    hi
}

fn bisect_root(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    // assumes f(lo) and f(hi) bracket the root with f increasing or decreasing
    let f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Physical Hamiltonian coefficients before rescaling:
/// `H = p²/(2m) + A q^{2α}/(2α) + B q^{2β}/(2β)` with `A ≤ 0 < B`,
/// plus an arbitrary time-scale unit `τ` (single-well case only).
#[derive(Clone, Copy, Debug)]
pub struct PhysicalParams {
    pub mass: f64,
    pub a_coeff: f64,
    pub b_coeff: f64,
    pub tau: f64,
}

/// Multiplicative factors mapping physical quantities to rescaled ones:
/// `eps_rescaled = energy * eps_physical`, `hbar_rescaled = hbar * hbar_physical`.
/// Divide by them to convert rescaled results back to physical units.
#[derive(Clone, Copy, Debug)]
pub struct RescaleFactors {
    pub energy: f64,
    pub hbar: f64,
}

/// Reduce a physical Hamiltonian to the rescaled family (`m = 1`, `B = 1`,
/// `A ∈ {0, -1}`) and return the conversion factors.
pub fn rescale_physical(
    params: &PhysicalParams,
    alpha: u32,
    beta: u32,
) -> Result<(PotentialSpec, RescaleFactors)> {
    let PhysicalParams {
        mass: m,
        a_coeff: a,
        b_coeff: b,
        tau,
    } = *params;
    if !(m > 0.0) || !(b > 0.0) || !(tau > 0.0) {
        return Err(Error::InvalidParams(format!(
            "require mass > 0, B > 0, tau > 0 (got m={m}, B={b}, tau={tau})"
        )));
    }
    if a > 0.0 {
        return Err(Error::InvalidParams(format!(
            "A must be <= 0 (repulsive inner term is outside the family), got {a}"
        )));
    }
    let bf = beta as f64;
    if a == 0.0 {
        if beta < 2 {
            return Err(Error::InvalidParams(
                "single-well rescaling is singular at beta = 1".into(),
            ));
        }
        let spec = PotentialSpec::single(beta)?;
        let energy =
            m.powf(-bf / (bf - 1.0)) * b.powf(1.0 / (bf - 1.0)) * tau.powf(2.0 * bf / (bf - 1.0));
        let hbar =
            m.powf(-bf / (bf - 1.0)) * b.powf(1.0 / (bf - 1.0)) * tau.powf((bf + 1.0) / (bf - 1.0));
        Ok((spec, RescaleFactors { energy, hbar }))
    } else {
        let spec = PotentialSpec::double(alpha, beta)?;
        let af = alpha as f64;
        let energy = (-a).powf(-bf / (bf - af)) * b.powf(af / (bf - af));
        let hbar = m.powf(-0.5)
            * (-a).powf(-(bf + 1.0) / (2.0 * (bf - af)))
            * b.powf((af + 1.0) / (2.0 * (bf - af)));
        Ok((spec, RescaleFactors { energy, hbar }))
    }
}
