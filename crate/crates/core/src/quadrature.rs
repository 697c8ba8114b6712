//! Gauss–Legendre rules on [0, 1].

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss–Legendre rule mapped to [0, 1].
///
/// Nodes come from Newton iteration on P_n started at the Chebyshev-like
/// guess cos(π(i − ¼)/(n + ½)); weights are 2/((1 − x²) P_n'(x)²), halved by
/// the interval map.
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "a quadrature rule needs at least one node");
    let mut rule = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((0.5 * (1.0 - x), 0.5 * w));
    }
    rule
}

/// (P_n(x), P_n'(x)) via the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite rule: `panels` equal sub-intervals of [0, 1], each with an
/// `order`-point Gauss–Legendre rule.
pub fn composite_unit(panels: usize, order: usize) -> Vec<(f64, f64)> {
    assert!(panels >= 1);
    let base = gauss_legendre_unit(order);
    let h = 1.0 / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let a = p as f64 * h;
            base.iter().map(move |&(x, w)| (a + h * x, h * w))
        })
        .collect()
}
