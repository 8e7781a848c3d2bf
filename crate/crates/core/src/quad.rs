//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 21-point Gauss–Kronrod rule drives a worst-interval-first global
//! refinement. Integrands with inverse-square-root (or square-root)
//! endpoint behavior, as produced by classical turning points, are handled
//! by the substitution `q = endpoint ± u²` in [`integrate_turning`].

use crate::error::{Error, Result};

/// Kronrod abscissae for the 21-point rule (positive half, descending).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// 10-point Gauss weights embedded in the rule.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// 21-point Kronrod weights.
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One Gauss–Kronrod 21 evaluation on `[a, b]`: returns `(integral, error estimate)`.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut res_gauss = 0.0;
    let mut res_kronrod = fc * WGK[10];
    let mut res_abs = res_kronrod.abs();
    let mut fv = [0.0_f64; 21];
    fv[10] = fc;

    for (j, xk) in XGK.iter().enumerate().take(10) {
        let dx = half * xk;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[20 - j] = f2;
        let fsum = f1 + f2;
        res_kronrod += WGK[j] * fsum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * fsum;
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for (j, v) in fv.iter().enumerate().take(10) {
        res_asc += WGK[j] * ((v - mean).abs() + (fv[20 - j] - mean).abs());
    }

    let raw_err = ((res_kronrod - res_gauss) * half).abs();
    res_asc *= half.abs();
    let err = if res_asc != 0.0 && raw_err != 0.0 {
        res_asc * (200.0 * raw_err / res_asc).powf(1.5).min(1.0)
    } else {
        raw_err
    };
    let floor = 50.0 * f64::EPSILON * res_abs * half.abs();
    (res_kronrod * half, err.max(floor))
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
}

/// Adaptive integral of `f` over `[a, b]` to relative tolerance `rel_tol`.
///
/// Splits the currently worst interval until the summed error estimate is
/// below `rel_tol * |integral|` (with a tiny absolute floor so that
/// zero-valued integrals terminate).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    const MAX_INTERVALS: usize = 4096;

    let mut segs: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    let (v0, e0) = gk21(&f, a, b);
    segs.push((a, b, v0, e0));

    loop {
        let total: f64 = pairwise_sum_by(&segs, |s| s.2);
        let err: f64 = pairwise_sum_by(&segs, |s| s.3);
        let target = rel_tol * total.abs().max(1e-306) + f64::MIN_POSITIVE;
        if err <= target {
            return Ok(QuadResult {
                value: total,
                abs_error: err,
            });
        }
        if segs.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureAccuracy {
                achieved: err / total.abs().max(1e-306),
                requested: rel_tol,
            });
        }
        // split the interval with the largest error estimate
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (sa, sb, _, _) = segs.swap_remove(idx);
        let mid = 0.5 * (sa + sb);
        if mid <= sa.min(sb) || mid >= sa.max(sb) {
            // interval at floating-point resolution; keep it as-is
            let (v, _) = gk21(&f, sa, sb);
            segs.push((sa, sb, v, 0.0));
            continue;
        }
        let (v1, e1) = gk21(&f, sa, mid);
        let (v2, e2) = gk21(&f, mid, sb);
        segs.push((sa, mid, v1, e1));
        segs.push((mid, sb, v2, e2));
    }
}

/// Integral of `f` over `[a, b]` where one or both endpoints are classical
/// turning points, i.e. `f` behaves like `(q - a)^{±1/2}` there.
///
/// The substitution `q = a + u²` (resp. `q = b - u²`) removes the
/// singularity; the transformed integrands are smooth and handed to
/// [`integrate`].
pub fn integrate_turning<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    left_turn: bool,
    right_turn: bool,
    rel_tol: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mid = 0.5 * (a + b);
    let mut total = 0.0;
    if left_turn {
        let u_max = (mid - a).sqrt();
        total += integrate(|u| 2.0 * u * f(a + u * u), 0.0, u_max, rel_tol)?.value;
    } else {
        total += integrate(&f, a, mid, rel_tol)?.value;
    }
    if right_turn {
        let u_max = (b - mid).sqrt();
        total += integrate(|u| 2.0 * u * f(b - u * u), 0.0, u_max, rel_tol)?.value;
    } else {
        total += integrate(&f, mid, b, rel_tol)?.value;
    }
    Ok(total)
}

/// Pairwise (cascade) summation; order-stable and deterministic.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

fn pairwise_sum_by<T, F: Fn(&T) -> f64 + Copy>(xs: &[T], f: F) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => f(&xs[0]),
        2 => f(&xs[0]) + f(&xs[1]),
        n => {
            let mid = n / 2;
            pairwise_sum_by(&xs[..mid], f) + pairwise_sum_by(&xs[mid..], f)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((r.value - 8.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_norm() {
        let r = integrate(|x| (-x * x).exp(), -8.0, 8.0, 1e-12).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn inverse_sqrt_endpoints() {
        // ∫_0^1 dx/√(x(1-x)) = π
        let v = integrate_turning(
            |x| 1.0 / (x * (1.0 - x)).sqrt(),
            0.0,
            1.0,
            true,
            true,
            1e-12,
        )
        .unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-11, "v = {v}");
    }

    #[test]
    fn sqrt_endpoint() {
        // ∫_0^1 √(1-x) dx = 2/3
        let v = integrate_turning(|x| (1.0 - x).sqrt(), 0.0, 1.0, false, true, 1e-12).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn log_singularity_converges() {
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0, 1e-9).unwrap();
        assert!((r.value + 1.0).abs() < 1e-8);
    }

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..1001).map(|i| (i as f64) * 0.001).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }
}
