//! Scalar root finding and one-dimensional maximisation.

/// Outcome of a bracketed bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub root: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Bisection on `[lo, hi]` until `|f(x)| <= tol` or the bracket stops
/// shrinking in floating point. Returns `None` when `f(lo)` and `f(hi)` share
/// a sign.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Option<Bisection>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(Bisection {
            root: lo,
            residual: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    if f_hi == 0.0 {
        return Some(Bisection {
            root: hi,
            residual: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return None;
    }

    let mut best = if f_lo.abs() < f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    for it in 1..=max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Some(Bisection {
                root: best.0,
                residual: best.1,
                iterations: it,
                converged: best.1.abs() <= tol,
            });
        }
        let f_mid = f(mid);
        if f_mid.abs() < best.1.abs() {
            best = (mid, f_mid);
        }
        if f_mid.abs() <= tol {
            return Some(Bisection {
                root: mid,
                residual: f_mid,
                iterations: it,
                converged: true,
            });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(Bisection {
        root: best.0,
        residual: best.1,
        iterations: max_iter,
        converged: best.1.abs() <= tol,
    })
}

/// Sub-intervals of a uniform `steps`-cell grid on `[lo, hi]` where `f`
/// changes sign.
pub fn sign_changes<F>(f: F, lo: f64, hi: f64, steps: usize) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let steps = steps.max(1);
    let width = (hi - lo) / steps as f64;
    let mut out = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for k in 1..=steps {
        let x1 = if k == steps {
            hi
        } else {
            lo + k as f64 * width
        };
        let f1 = f(x1);
        if f0 == 0.0 || (f0.signum() != f1.signum() && f1 != 0.0) {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max, iterations)`.
pub fn golden_max<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> (f64, f64, usize)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut it = 0;
    while (hi - lo).abs() > tol && it < max_iter {
        it += 1;
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    // Endpoints can beat the interior for monotone objectives.
    let candidates = [
        (lo, f(lo)),
        (0.5 * (lo + hi), f(0.5 * (lo + hi))),
        (hi, f(hi)),
    ];
    let (x, fx) = candidates
        .into_iter()
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, p| {
            if p.1 > acc.1 {
                p
            } else {
                acc
            }
        });
    (x, fx, it)
}
