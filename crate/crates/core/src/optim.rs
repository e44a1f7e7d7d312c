//! One-dimensional search primitives: pre-scanned golden-section maximization
//! and monotone-predicate bisection.

use crate::error::{Error, Result};

/// Number of pre-scan grid points used to seed the golden-section bracket.
pub(crate) const PRESCAN_POINTS: usize = 64;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9; // 1/phi

/// Maximize `f` on [lo, hi].
///
/// A 64-point pre-scan locates the best grid cell; golden-section search then
/// refines inside the bracket [x_{i-1}, x_{i+1}] until its width is below
/// `xtol`. The objectives in this crate are unimodal (Gallager/Arimoto
/// convexity), and the pre-scan doubles as a guard: if the refined optimum
/// escapes the pre-scan cell or falls below the scanned maximum, the
/// unimodality assumption is considered violated and an error is returned.
pub(crate) fn maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> Result<(f64, f64)> {
    debug_assert!(lo < hi);
    let step = (hi - lo) / (PRESCAN_POINTS - 1) as f64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..PRESCAN_POINTS {
        let x = if i == PRESCAN_POINTS - 1 { hi } else { lo + i as f64 * step };
        let v = f(x);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let scan_x = if best_i == PRESCAN_POINTS - 1 { hi } else { lo + best_i as f64 * step };
    let mut a = if best_i == 0 { lo } else { lo + (best_i - 1) as f64 * step };
    let mut b = if best_i >= PRESCAN_POINTS - 2 { hi } else { lo + (best_i + 1) as f64 * step };

    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > xtol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    let (x_opt, v_opt) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    // Endpoint optima: the scan endpoints can beat the interior probes.
    let (x_opt, v_opt) = if best_v > v_opt { (scan_x, best_v) } else { (x_opt, v_opt) };

    if (x_opt - scan_x).abs() > step + xtol {
        return Err(Error::Numerical(format!(
            "golden-section optimum {x_opt} escaped the pre-scan cell around {scan_x}"
        )));
    }
    if v_opt + 1e-12 * v_opt.abs().max(1.0) < best_v {
        return Err(Error::Numerical(
            "golden-section value fell below the pre-scan maximum; objective not unimodal".into(),
        ));
    }
    Ok((x_opt, v_opt))
}

/// Minimize `f` on [lo, hi] with the same scheme.
pub(crate) fn minimize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> Result<(f64, f64)> {
    let (x, v) = maximize(|x| -f(x), lo, hi, xtol)?;
    Ok((x, -v))
}

/// Largest x in [lo, hi] with `pred(x)` true, assuming `pred` is monotone
/// true -> false and `pred(lo)` holds. Bisects to width `xtol`.
pub(crate) fn bisect_last_true<P: Fn(f64) -> bool>(pred: P, lo: f64, hi: f64, xtol: f64) -> f64 {
    debug_assert!(lo <= hi);
    if pred(hi) {
        return hi;
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest x in [lo, hi] with `pred(x)` true, assuming `pred` is monotone
/// false -> true and `pred(hi)` holds. Bisects to width `xtol`.
pub(crate) fn bisect_first_true<P: Fn(f64) -> bool>(pred: P, lo: f64, hi: f64, xtol: f64) -> f64 {
    debug_assert!(lo <= hi);
    if pred(lo) {
        return lo;
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximize_parabola() {
        let (x, v) = maximize(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
        assert!(v.abs() < 1e-17);
    }

    #[test]
    fn maximize_linear_hits_endpoint() {
        let (x, v) = maximize(|x| 2.0 * x, 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 1.0).abs() < 1e-9);
        assert!((v - 2.0).abs() < 1e-8);
        let (x, _) = maximize(|x| -2.0 * x, -1.0, 1.0, 1e-10).unwrap();
        assert!((x + 1.0).abs() < 1e-9);
    }

    #[test]
    fn minimize_convex() {
        let (x, v) = minimize(|x: f64| x.exp() - x, -1.0, 1.0, 1e-10).unwrap();
        assert!(x.abs() < 1e-9);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bisection_brackets() {
        let x = bisect_last_true(|x| x * x <= 2.0, 0.0, 2.0, 1e-12);
        assert!((x - std::f64::consts::SQRT_2).abs() < 1e-11);
        let x = bisect_first_true(|x| x * x >= 2.0, 0.0, 2.0, 1e-12);
        assert!((x - std::f64::consts::SQRT_2).abs() < 1e-11);
    }
}
