//! Quadrature rules used by the propagator integrals: Gauss–Legendre nodes,
//! a periodic midpoint rule (spectrally accurate for smooth periodic
//! integrands), and double-exponential (tanh-sinh) quadrature for integrands
//! with endpoint kinks such as the square-root branch at k = 0.

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            // evaluate P_n(z) and P_{n-1}(z) by recurrence
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            let dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p0 / dp;
            if (z - z1).abs() < 1e-15 {
                let weight = 2.0 / ((1.0 - z * z) * dp * dp);
                x[i] = -z;
                x[n - 1 - i] = z;
                w[i] = weight;
                w[n - 1 - i] = weight;
                break;
            }
        }
    }
    (x, w)
}

/// Gauss–Legendre integration of f over [a, b].
pub fn gl_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (b - a);
    let d = 0.5 * (b + a);
    x.iter().zip(&w).map(|(&xi, &wi)| wi * f(c * xi + d)).sum::<f64>() * c
}

/// Midpoint rule over one period [-pi, pi) with n points, none of which hits
/// k = 0 or k = +-pi; spectrally accurate for smooth periodic integrands and
/// symmetric under k -> -k (odd singular parts cancel pairwise).
pub fn periodic_midpoint<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let mut s = 0.0;
    for j in 0..n {
        let k = -std::f64::consts::PI + (j as f64 + 0.5) * h;
        s += f(k);
    }
    s * h
}

/// Nodes of the periodic midpoint grid.
pub fn periodic_midpoint_nodes(n: usize) -> Vec<f64> {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    (0..n)
        .map(|j| -std::f64::consts::PI + (j as f64 + 0.5) * h)
        .collect()
}

/// Double-exponential (tanh-sinh) quadrature over (a, b); handles integrable
/// endpoint singularities and kinks to near machine precision.
/// tanh-sinh nodes and weights on (a, b); nodes are computed from their
/// nearest endpoint to avoid cancellation near the boundary:
/// 1 - tanh|u| = 2 e^{-2|u|} / (1 + e^{-2|u|}).
pub fn tanh_sinh_nodes(a: f64, b: f64) -> Vec<(f64, f64)> {
    tanh_sinh_nodes_with_step(a, b, 1e-2)
}

/// As `tanh_sinh_nodes` with an explicit step in the transformed variable;
/// smaller steps resolve oscillatory integrands (central node spacing is
/// about 2.5 h (b-a)/2).
pub fn tanh_sinh_nodes_with_step(a: f64, b: f64, h: f64) -> Vec<(f64, f64)> {
    let c = 0.5 * (b - a);
    let tmax = 4.0f64;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let nmax = (tmax / h) as i64;
    let mut out = Vec::with_capacity((2 * nmax + 1) as usize);
    for i in -nmax..=nmax {
        let t = i as f64 * h;
        let u = half_pi * t.sinh();
        let wt = half_pi * t.cosh() / u.cosh().powi(2);
        let em = (-2.0 * u.abs()).exp();
        let edge_dist = c * 2.0 * em / (1.0 + em);
        let xx = if u < 0.0 { a + edge_dist } else { b - edge_dist };
        if xx > a && xx < b && wt.is_finite() {
            out.push((xx, wt * c * h));
        }
    }
    out
}

pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    tanh_sinh_nodes(a, b)
        .into_iter()
        .map(|(x, w)| {
            let v = f(x);
            if v.is_finite() {
                w * v
            } else {
                0.0
            }
        })
        .sum()
}
