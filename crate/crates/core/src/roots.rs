//! Scalar root finding on a sampled interval.

/// Bisects `f` on `[lo, hi]`, which must bracket a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Every sign change of `f` over `samples` equal cells of `[lo, hi]`,
/// refined by bisection. Exact zeros at sample points are kept once.
pub fn bracket_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize, tol: f64) -> Vec<f64> {
    let step = (hi - lo) / samples as f64;
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=samples {
        let x1 = if i == samples { hi } else { lo + step * i as f64 };
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f1 != 0.0 && (f0 > 0.0) != (f1 > 0.0) {
            roots.push(bisect(&f, x0, x1, tol));
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        roots.push(x0);
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_all_sine_zeros() {
        let r = bracket_roots(f64::sin, 0.5, 10.0, 1000, 1e-14);
        assert_eq!(r.len(), 3);
        for (i, x) in r.iter().enumerate() {
            assert!((x - std::f64::consts::PI * (i + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_zero_on_sample() {
        let r = bracket_roots(|x| x - 1.0, 0.0, 2.0, 4, 1e-14);
        assert_eq!(r, vec![1.0]);
    }
}
