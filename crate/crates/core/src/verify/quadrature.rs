use std::f64::consts::FRAC_PI_2;

use crate::summation::CompensatedSum;

const U_MAX: f64 = 4.5;

/// Tanh-sinh quadrature of `f` over `[a, b]`, refined by halving the step
/// until two levels agree to `tol` (relative).
///
/// `f` receives the node and its distances to both endpoints, computed
/// without cancellation, so integrable endpoint singularities such as
/// `x^{-α}` are evaluated accurately.
pub fn tanh_sinh(a: f64, b: f64, tol: f64, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let node = |u: f64| -> (f64, f64, f64, f64) {
        let v = FRAC_PI_2 * u.sinh();
        // distances 2·half/(1 + e^{∓2v}) to the left and right ends
        let left = 2.0 * half / (1.0 + (-2.0 * v).exp());
        let right = 2.0 * half / (1.0 + (2.0 * v).exp());
        let c = v.cosh();
        let w = half * FRAC_PI_2 * u.cosh() / (c * c);
        (a + left, left, right, w)
    };
    let eval = |u: f64| {
        let (x, l, r, w) = node(u);
        if l <= 0.0 || r <= 0.0 || w == 0.0 {
            0.0
        } else {
            w * f(x, l, r)
        }
    };

    let mut h = 0.5;
    let mut sum = CompensatedSum::new();
    let mut k = 0.0;
    while k * h <= U_MAX {
        let u = k * h;
        sum.add(eval(u));
        if k > 0.0 {
            sum.add(eval(-u));
        }
        k += 1.0;
    }
    let mut estimate = h * sum.value();
    for _ in 0..12 {
        // add the midpoints of the current level
        let mut extra = CompensatedSum::new();
        let mut u = 0.5 * h;
        while u <= U_MAX {
            extra.add(eval(u));
            extra.add(eval(-u));
            u += h;
        }
        sum.add(extra.value());
        h *= 0.5;
        let next = h * sum.value();
        if (next - estimate).abs() <= tol * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
