//! Small numeric helpers shared across modules.

use alloc::vec;
use alloc::vec::Vec;

/// Max of |f| over n+1 equispaced samples of [a, b].
pub(crate) fn sample_sup_abs<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let mut sup = 0.0f64;
    for i in 0..=n {
        let t = a + (b - a) * (i as f64) / (n as f64);
        sup = sup.max(f(t).abs());
    }
    sup
}

/// Min of f over n+1 equispaced samples of [a, b].
pub(crate) fn sample_inf<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let mut inf = f64::INFINITY;
    for i in 0..=n {
        let t = a + (b - a) * (i as f64) / (n as f64);
        inf = inf.min(f(t));
    }
    inf
}

/// Least-squares line fit of y against x; returns (slope, intercept, max |residual|).
pub(crate) fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - slope * x - intercept).abs())
        .fold(0.0f64, f64::max);
    (slope, intercept, resid)
}

/// n! as f64 (exact for n <= 20).
pub(crate) fn factorial(n: u32) -> f64 {
    let mut acc = 1.0f64;
    for k in 2..=n {
        acc *= k as f64;
    }
    acc
}

/// Wrap an angle into (-pi, pi].
pub(crate) fn wrap_pi(x: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut r = x % two_pi;
    if r <= -core::f64::consts::PI {
        r += two_pi;
    } else if r > core::f64::consts::PI {
        r -= two_pi;
    }
    r
}

/// Equispaced grid of n+1 points covering [a, b] inclusive.
pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| a + (b - a) * (i as f64) / (n as f64))
        .collect()
}

/// 5-point central first derivative, O(h⁴).
pub(crate) fn fd_first<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// 5-point central second derivative, O(h⁴).
pub(crate) fn fd_second<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
        / (12.0 * h * h)
}

/// 4-point Lagrange cubic interpolation of grid data at `t`, using the
/// stencil around `cell` (the index with ts[cell] <= t <= ts[cell+1]).
pub(crate) fn interp_cubic(ts: &[f64], ys: &[f64], cell: usize, t: f64) -> f64 {
    let i0 = cell.saturating_sub(1).min(ts.len() - 4);
    let mut acc = 0.0;
    for j in 0..4 {
        let mut l = 1.0;
        for m in 0..4 {
            if m != j {
                l *= (t - ts[i0 + m]) / (ts[i0 + j] - ts[i0 + m]);
            }
        }
        acc += l * ys[i0 + j];
    }
    acc
}

/// Locate the cell index for `t` on a sorted grid.
pub(crate) fn cell_of(ts: &[f64], t: f64) -> usize {
    ts.partition_point(|&x| x < t)
        .saturating_sub(1)
        .min(ts.len() - 2)
}

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
pub(crate) const GL5_X: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];
pub(crate) const GL5_W: [f64; 5] = [
    0.23692688505618908,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618908,
];

/// Cumulative integral of `f` from the anchor index `star` to every grid
/// point, with a fixed 5-point Gauss rule per cell. `f` receives the
/// enclosing cell index and the evaluation time.
pub(crate) fn cumulative_gl5<F: Fn(usize, f64) -> f64>(ts: &[f64], star: usize, f: F) -> Vec<f64> {
    let n = ts.len();
    let cell_integral = |c: usize| -> f64 {
        let (a, b) = (ts[c], ts[c + 1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for k in 0..5 {
            acc += GL5_W[k] * f(c, mid + half * GL5_X[k]);
        }
        acc * half
    };
    let mut out = vec![0.0; n];
    for c in star..n - 1 {
        out[c + 1] = out[c] + cell_integral(c);
    }
    for c in (0..star).rev() {
        out[c] = out[c + 1] - cell_integral(c);
    }
    out
}
