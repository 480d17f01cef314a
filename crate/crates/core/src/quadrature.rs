//! Fixed-order Gauss-Legendre rules used for the smooth, non-oscillatory
//! integrals (P, the Liouville length, the sigma correction term).

use num_complex::Complex64;

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Five-point Gauss-Legendre rule on `[lo, hi]`. Exact for degree-9 polynomials.
///
/// Nodes are interior, so a jump located at `lo` or `hi` is never sampled.
pub fn gauss5<F: Fn(f64) -> Complex64>(f: F, lo: f64, hi: f64) -> Complex64 {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = Complex64::new(0.0, 0.0);
    for (node, weight) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
        acc += f(mid + half * node) * *weight;
    }
    acc * half
}

/// Real-valued variant of [`gauss5`].
pub fn gauss5_real<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = 0.0;
    for (node, weight) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
        acc += f(mid + half * node) * weight;
    }
    acc * half
}

/// Interior sample points of [`gauss5`] on `[lo, hi]`.
pub fn gauss5_nodes(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    GL5_NODES.into_iter().map(move |n| mid + half * n)
}
