use crate::error::{Error, Result};

const SCAN_POINTS: usize = 64;
const GOLDEN_RATIO: f64 = 0.618_033_988_749_894_8;

/// Locate a zero of `f` on `[lo, hi]`.
///
/// With a sign change at the ends this is plain bisection down to a bracket of
/// width `tol`. Without one, the interval is scanned for an interior sign
/// change, and failing that for a tangential zero (minimum of `|f|` no larger
/// than `tol`).
pub fn find_zero<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain("bracket", hi - lo, "finite with lo < hi"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tol", tol, "> 0"));
    }
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() != fhi.signum() {
        return Ok(bisect(&f, lo, hi, flo, tol));
    }

    let step = (hi - lo) / SCAN_POINTS as f64;
    let mut prev = (lo, flo);
    let mut best = (lo, flo.abs());
    for i in 1..=SCAN_POINTS {
        let x = if i == SCAN_POINTS {
            hi
        } else {
            lo + i as f64 * step
        };
        let fx = if i == SCAN_POINTS { fhi } else { f(x) };
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() != prev.1.signum() {
            return Ok(bisect(&f, prev.0, x, prev.1, tol));
        }
        if fx.abs() < best.1 {
            best = (x, fx.abs());
        }
        prev = (x, fx);
    }

    let x = golden_min_abs(&f, (best.0 - step).max(lo), (best.0 + step).min(hi), tol);
    if f(x).abs() <= tol {
        Ok(x)
    } else {
        Err(Error::NoSignChange { lo, hi })
    }
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn golden_min_abs<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = |x: f64| f(x).abs();
    let mut c = b - GOLDEN_RATIO * (b - a);
    let mut d = a + GOLDEN_RATIO * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..200 {
        if fc.min(fd) <= tol * 1e-3 || (b - a) <= f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN_RATIO * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN_RATIO * (b - a);
            fd = g(d);
        }
    }
    if fc < fd {
        c
    } else {
        d
    }
}
