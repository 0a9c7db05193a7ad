//! Half-plane and infinite-plane critical propagators by quadrature: the
//! massive propagator, the heat-kernel cutoff propagator, single-scale
//! (dyadic band) propagators, the bulk-edge decomposition, and the full
//! critical propagator with its fast one-dimensional kernel obtained by
//! integrating out k1 exactly.

use crate::error::IsingError;
use crate::quadrature::{gauss_legendre, periodic_midpoint_nodes, tanh_sinh_nodes, tanh_sinh_nodes_with_step};
use num_complex::Complex64;
use serde::Serialize;

pub type Mat2 = [[Complex64; 2]; 2];

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Isotropic critical horizontal coupling t1* = sqrt(2) - 1.
pub fn t1_critical() -> f64 {
    SQRT2 - 1.0
}

/// Critical vertical coupling associated with t1*.
pub fn t2_of(t1s: f64) -> f64 {
    (1.0 - t1s) / (1.0 + t1s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PropagatorKind {
    Massive,
    CutoffEta(f64),
    Scale(i32),
    ScaleLE(i32),
    Infinite(i32),
    Edge(i32),
    FullCritical,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropagatorSample {
    pub z: (i64, i64),
    pub zp: (i64, i64),
    pub kind: PropagatorKind,
    /// Entries as (re, im) rows [(++, +-), (-+, --)].
    pub value: [[(f64, f64); 2]; 2],
}

impl PropagatorSample {
    pub fn from_mat(z: (i64, i64), zp: (i64, i64), kind: PropagatorKind, m: Mat2) -> Self {
        let value = [
            [(m[0][0].re, m[0][0].im), (m[0][1].re, m[0][1].im)],
            [(m[1][0].re, m[1][0].im), (m[1][1].re, m[1][1].im)],
        ];
        PropagatorSample { z, zp, kind, value }
    }
}

/// Momentum-grid sizes: `n_k_1d` points for one-dimensional integrals,
/// `n_k_2d` per axis for two-dimensional ones, `eta_nodes` Gauss-Legendre
/// nodes per dyadic scale band.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadratureGrid {
    pub n_k_1d: usize,
    pub n_k_2d: usize,
    pub eta_nodes: usize,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        QuadratureGrid { n_k_1d: 2048, n_k_2d: 512, eta_nodes: 32 }
    }
}

impl QuadratureGrid {
    pub fn doubled(&self) -> Self {
        QuadratureGrid {
            n_k_1d: self.n_k_1d * 2,
            n_k_2d: self.n_k_2d * 2,
            eta_nodes: self.eta_nodes * 2,
        }
    }
}

pub fn mat_max_norm(m: &Mat2) -> f64 {
    m.iter()
        .flatten()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max)
}

pub fn mat_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut r = zero_mat();
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][j] - b[i][j];
        }
    }
    r
}

pub fn mat_add_assign(a: &mut Mat2, b: &Mat2) {
    for i in 0..2 {
        for j in 0..2 {
            a[i][j] += b[i][j];
        }
    }
}

fn zero_mat() -> Mat2 {
    [[Complex64::new(0.0, 0.0); 2]; 2]
}

/// Heat-kernel exponent D(k1, k2) of the cutoff propagator.
pub fn d_kernel(t1s: f64, k1: f64, k2: f64) -> f64 {
    let t2s = t2_of(t1s);
    2.0 * (1.0 - t2s) * (1.0 - t2s) * (1.0 - k1.cos())
        + 2.0 * (1.0 - t1s) * (1.0 - t1s) * (1.0 - k2.cos())
}

/// B(k1) = |1 + t1* e^{ik1}|^2 / (1 + t1*)^2.
pub fn b_kernel(t1s: f64, k1: f64) -> f64 {
    (1.0 + t1s * t1s + 2.0 * t1s * k1.cos()) / ((1.0 + t1s) * (1.0 + t1s))
}

/// --- massive propagator ---------------------------------------------------

/// Closed form of the massive propagator Fourier coefficients: the (+,-)
/// entry is the coefficient of 1/(1 + t e^{ik1}), a geometric series.
pub fn massive_propagator(dx: i64, t1s: f64) -> Mat2 {
    let mut m = zero_mat();
    if dx >= 0 {
        m[0][1] = Complex64::new((-t1s).powi(dx as i32), 0.0);
    }
    if dx <= 0 {
        m[1][0] = Complex64::new(-(-t1s).powi((-dx) as i32), 0.0);
    }
    m
}

/// Quadrature cross-check of the massive propagator.
pub fn massive_propagator_quadrature(dx: i64, t1s: f64, grid: &QuadratureGrid) -> Mat2 {
    let nodes = periodic_midpoint_nodes(grid.n_k_1d);
    let h = 2.0 * std::f64::consts::PI / grid.n_k_1d as f64;
    let mut m = zero_mat();
    for &k in &nodes {
        let ph = Complex64::from_polar(1.0, -k * dx as f64);
        let e = Complex64::from_polar(1.0, k);
        m[0][1] += ph / (1.0 + t1s * e);
        m[1][0] += -ph / (1.0 + t1s * e.conj());
    }
    let c = h / (2.0 * std::f64::consts::PI);
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v *= c;
        }
    }
    m
}

/// --- 2D quadrature core ---------------------------------------------------

/// Numerator matrix of the bulk (infinite-plane) term of the cutoff kernel.
fn bulk_mat(t1s: f64, sink1: f64, b: f64, k2: f64) -> Mat2 {
    let c = 1.0 - t1s * t1s;
    let e = Complex64::from_polar(1.0, k2);
    [
        [
            Complex64::new(0.0, -2.0 * t1s * sink1),
            Complex64::new(-c, 0.0) * (1.0 - b * e.conj()),
        ],
        [
            Complex64::new(c, 0.0) * (1.0 - b * e),
            Complex64::new(0.0, 2.0 * t1s * sink1),
        ],
    ]
}

/// Numerator matrix of the image (edge) term.  The (-,-) entry carries the
/// ratio (1 - B e^{-ik2})/(1 - B e^{ik2}) = 1 + 2iB sin k2 / (1 - B e^{ik2});
/// only the smooth "1" part is included here.  The correction part has a
/// conical phase singularity at k = 0 that defeats the midpoint rule, so it
/// is integrated separately (see `ratio_correction`); the 2D validation path
/// keeps the full ratio (`full_ratio = true`).
fn image_mat(t1s: f64, sink1: f64, b: f64, k2: f64, full_ratio: bool) -> Mat2 {
    let c = 1.0 - t1s * t1s;
    let e = Complex64::from_polar(1.0, k2);
    let den = 1.0 - b * e;
    let ratio = if !full_ratio || den.norm() < 1e-14 {
        Complex64::new(1.0, 0.0)
    } else {
        (1.0 - b * e.conj()) / den
    };
    [
        [
            Complex64::new(0.0, -2.0 * t1s * sink1),
            Complex64::new(-c, 0.0) * (1.0 - b * e),
        ],
        [
            Complex64::new(c, 0.0) * (1.0 - b * e),
            ratio * Complex64::new(0.0, 2.0 * t1s * sink1),
        ],
    ]
}

/// Midpoint 2D quadrature of the cutoff-type kernel with an arbitrary
/// eta-integrated damping weight w(D); bulk and image terms selectable.
/// `exclusion` optionally removes modes with |k| below the given radius.
fn eval2d<W: Fn(f64) -> f64 + Sync>(
    t1s: f64,
    z: (i64, i64),
    zp: (i64, i64),
    weight: W,
    n: usize,
    include_bulk: bool,
    include_image: bool,
    exclusion: f64,
    full_ratio: bool,
) -> Mat2 {
    use rayon::prelude::*;
    let nodes = periodic_midpoint_nodes(n);
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let dz1 = (z.0 - zp.0) as f64;
    let dz2 = (z.1 - zp.1) as f64;
    let sz2 = (z.1 + zp.1) as f64;
    let rows: Vec<Mat2> = nodes
        .par_iter()
        .map(|&k1| {
            let sink1 = k1.sin();
            let b = b_kernel(t1s, k1);
            let ph1 = Complex64::from_polar(1.0, -k1 * dz1);
            let mut acc = zero_mat();
            for &k2 in &nodes {
                if exclusion > 0.0 && (k1 * k1 + k2 * k2).sqrt() < exclusion {
                    continue;
                }
                let w = weight(d_kernel(t1s, k1, k2));
                if w == 0.0 {
                    continue;
                }
                let mut term = zero_mat();
                if include_bulk {
                    let pb = Complex64::from_polar(1.0, -k2 * dz2);
                    let bm = bulk_mat(t1s, sink1, b, k2);
                    for i in 0..2 {
                        for j in 0..2 {
                            term[i][j] += pb * bm[i][j];
                        }
                    }
                }
                if include_image {
                    let pi = Complex64::from_polar(1.0, -k2 * sz2);
                    let im = image_mat(t1s, sink1, b, k2, full_ratio);
                    for i in 0..2 {
                        for j in 0..2 {
                            term[i][j] -= pi * im[i][j];
                        }
                    }
                }
                for i in 0..2 {
                    for j in 0..2 {
                        acc[i][j] += Complex64::new(w, 0.0) * term[i][j] * ph1;
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = zero_mat();
    for r in rows {
        mat_add_assign(&mut total, &r);
    }
    let c = (h * h) / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    for row in total.iter_mut() {
        for v in row.iter_mut() {
            *v *= c;
        }
    }
    total
}

/// Gauss-Legendre nodes (eta_i, w_i) of the eta integral over [a, b], so the
/// damping weight is w(D) = sum_i w_i e^{-eta_i D}; exact to machine
/// precision because the integrand is entire in eta.
fn eta_band_nodes(a: f64, b: f64, nodes: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(nodes);
    let c = 0.5 * (b - a);
    let d = 0.5 * (b + a);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| (c * xi + d, wi * c))
        .collect()
}

/// The part of the image (-,-) entry left out of the midpoint sweep: the
/// ratio correction 2iB sin k2/(1 - B e^{ik2}) times 2i t sin k1.  Its phase
/// is conical at k = 0, so the k2 integral is done by tanh-sinh (which
/// clusters nodes at the near-singularity) for each midpoint k1 node and
/// each eta node; e^{-eta D} factorizes over k1 and k2, which makes this
/// nesting exact.
fn ratio_correction(
    t1s: f64,
    z: (i64, i64),
    zp: (i64, i64),
    eta_nodes: &[(f64, f64)],
    n: usize,
) -> Complex64 {
    use rayon::prelude::*;
    let t2s = t2_of(t1s);
    let c1 = 2.0 * (1.0 - t2s) * (1.0 - t2s);
    let c2 = 2.0 * (1.0 - t1s) * (1.0 - t1s);
    let dz1 = (z.0 - zp.0) as f64;
    let sz2 = (z.1 + zp.1) as f64;
    let pi = std::f64::consts::PI;
    let mut k2_nodes = tanh_sinh_nodes(-pi, 0.0);
    k2_nodes.extend(tanh_sinh_nodes(0.0, pi));
    let k1_nodes = periodic_midpoint_nodes(n);
    let h = 2.0 * pi / n as f64;
    let terms: Vec<Complex64> = k1_nodes
        .par_iter()
        .map(|&k1| {
            let b = b_kernel(t1s, k1);
            // inner k2 integral for every eta node in one sweep
            let mut inner = vec![Complex64::new(0.0, 0.0); eta_nodes.len()];
            for &(k2, w2) in &k2_nodes {
                let den = 1.0 - b * Complex64::from_polar(1.0, k2);
                let base = Complex64::from_polar(1.0, -k2 * sz2) * k2.sin() * w2 / den;
                let dk2 = c2 * 2.0 * (0.5 * k2).sin().powi(2);
                for (slot, &(eta, _)) in inner.iter_mut().zip(eta_nodes) {
                    *slot += base * (-eta * dk2).exp();
                }
            }
            let dk1 = c1 * 2.0 * (0.5 * k1).sin().powi(2);
            let outer: Complex64 = eta_nodes
                .iter()
                .zip(&inner)
                .map(|(&(eta, we), iv)| iv * we * (-eta * dk1).exp())
                .sum();
            Complex64::from_polar(1.0, -k1 * dz1) * (4.0 * t1s * b * k1.sin()) * outer
        })
        .collect();
    let total: Complex64 = terms.into_iter().sum();
    // one factor 1/2pi for each axis: midpoint carries h, tanh-sinh its weights
    total * h / (4.0 * pi * pi)
}

/// Midpoint 2D evaluation with the eta integral as an explicit node list,
/// plus the tanh-sinh ratio correction on the image (-,-) entry.
fn eval2d_banded(
    t1s: f64,
    z: (i64, i64),
    zp: (i64, i64),
    eta_nodes: &[(f64, f64)],
    n: usize,
    include_bulk: bool,
    include_image: bool,
) -> Mat2 {
    let weight = |dk: f64| -> f64 {
        eta_nodes
            .iter()
            .map(|&(e, w)| w * (-e * dk).exp())
            .sum()
    };
    let mut m = eval2d(t1s, z, zp, weight, n, include_bulk, include_image, 0.0, false);
    if include_image {
        m[1][1] += ratio_correction(t1s, z, zp, eta_nodes, n);
    }
    m
}

/// Dyadic eta band [2^{-2h-2}, 2^{-2h}] of scale h < 0; scale 0 is [0, 1].
pub fn scale_band(h: i32) -> (f64, f64) {
    assert!(h <= 0);
    if h == 0 {
        (0.0, 1.0)
    } else {
        let b = 2f64.powi(-2 * h);
        (b / 4.0, b)
    }
}

/// Cutoff propagator at fixed eta by 2D quadrature.
pub fn cutoff_propagator(
    z: (i64, i64),
    zp: (i64, i64),
    eta: f64,
    t1s: f64,
    grid: &QuadratureGrid,
) -> Mat2 {
    eval2d_banded(t1s, z, zp, &[(eta, 1.0)], grid.n_k_2d, true, true)
}

/// Single-scale propagator g^(h): eta integrated over the dyadic band by
/// Gauss-Legendre.
pub fn scale_propagator(
    z: (i64, i64),
    zp: (i64, i64),
    h: i32,
    t1s: f64,
    grid: &QuadratureGrid,
) -> Mat2 {
    let (a, b) = scale_band(h);
    let nodes = eta_band_nodes(a, b, grid.eta_nodes);
    eval2d_banded(t1s, z, zp, &nodes, grid.n_k_2d, true, true)
}

/// Bulk-edge split of g^(h): (infinite-plane part, edge part); their sum is
/// the scale propagator by construction.
pub fn bulk_edge_split(
    z: (i64, i64),
    zp: (i64, i64),
    h: i32,
    t1s: f64,
    grid: &QuadratureGrid,
) -> (Mat2, Mat2) {
    let (a, b) = scale_band(h);
    let nodes = eta_band_nodes(a, b, grid.eta_nodes);
    let bulk = eval2d_banded(t1s, z, zp, &nodes, grid.n_k_2d, true, false);
    let edge = eval2d_banded(t1s, z, zp, &nodes, grid.n_k_2d, false, true);
    (bulk, edge)
}

fn assert_isotropic_critical(t1s: f64) {
    assert!(
        (t1s - t1_critical()).abs() < 1e-12,
        "the k1-integrated fast path is derived at the isotropic critical point"
    );
}

/// g^{(<= h)}: the eta tail [2^{-2h-2}, infinity).  Evaluated as the full
/// critical propagator minus the Gauss-Legendre quadrature of the
/// complementary band [0, 2^{-2h-2}], which is an exact algebraic split.
pub fn scale_le_propagator(
    z: (i64, i64),
    zp: (i64, i64),
    h: i32,
    t1s: f64,
    grid: &QuadratureGrid,
) -> Mat2 {
    assert_isotropic_critical(t1s);
    let a = scale_band(h).0;
    let nodes = eta_band_nodes(0.0, a, grid.eta_nodes);
    let head = eval2d_banded(t1s, z, zp, &nodes, grid.n_k_2d, true, true);
    let full = full_critical_propagator(z, zp, t1s, grid);
    mat_sub(&full, &head)
}

/// --- 1D fast path (k1 integrated out exactly) ------------------------------

/// alpha - 1 = 1 - cos k2 computed via the half angle, stable near k2 = 0.
fn alpha_parts(k2: f64) -> (f64, f64, f64) {
    let a1 = 2.0 * (0.5 * k2).sin().powi(2);
    let s = (a1 * (2.0 + a1)).sqrt();
    let rho = 1.0 + a1 - s;
    (a1, s, rho)
}

/// Fourier coefficient J_m(k2) = rho^{|m|}/s of 1/(alpha - cos k1) with
/// alpha = 2 - cos k2, s = sqrt(alpha^2 - 1), rho = alpha - s.  The 1/s
/// divergence at k2 = 0 cancels in the kernel combinations; quadrature
/// nodes never hit k2 = 0 exactly.
fn jcoef(k2: f64, m: i64) -> f64 {
    let (_, s, rho) = alpha_parts(k2);
    rho.powf(m.unsigned_abs() as f64) / s
}

/// K(k2, dx) = integral dk1/2pi e^{-i k1 dx} (1 - B(k1) e^{i k2})/(2 - cos k1
/// - cos k2), assembled from the J coefficients.
fn kfun(k2: f64, dx: i64) -> Complex64 {
    let e = Complex64::from_polar(1.0, k2);
    let j0 = jcoef(k2, dx);
    let jpm = 0.5 * (jcoef(k2, dx - 1) + jcoef(k2, dx + 1));
    Complex64::new(j0, 0.0) - (SQRT2 - 1.0) * e * (SQRT2 * j0 + jpm)
}

/// Integral dk1/2pi e^{-i k1 dx} sin k1 / (alpha - cos k1) divided by i:
/// the diagonal entries are -/+ this value.
fn sfun(k2: f64, dx: i64) -> f64 {
    0.5 * (jcoef(k2, dx - 1) - jcoef(k2, dx + 1))
}

/// The (-,-) image entry needs a genuine k1 integral because of the ratio
/// factor; midpoint rule, smooth for k2 away from 0.
fn rfun(k2: f64, dx: i64, n: usize) -> Complex64 {
    let nodes = periodic_midpoint_nodes(n);
    let alpha = 2.0 - k2.cos();
    let e2 = Complex64::from_polar(1.0, k2);
    let mut acc = Complex64::new(0.0, 0.0);
    for &k1 in &nodes {
        let b = b_kernel(t1_critical(), k1);
        let den = 1.0 - b * e2;
        if den.norm() < 1e-14 {
            continue;
        }
        let ratio = (1.0 - b * e2.conj()) / den;
        let ph = Complex64::from_polar(1.0, -k1 * dx as f64);
        acc += ph * ratio * Complex64::new(0.0, k1.sin()) / (alpha - k1.cos());
    }
    acc / n as f64
}

fn bulk_mat_1d(k2: f64, dx: i64) -> Mat2 {
    let s = sfun(k2, dx);
    [
        [Complex64::new(-s, 0.0), -kfun(-k2, dx)],
        [kfun(k2, dx), Complex64::new(s, 0.0)],
    ]
}

fn image_mat_1d(k2: f64, dx: i64, nk1: usize) -> Mat2 {
    let s = sfun(k2, dx);
    [
        [Complex64::new(-s, 0.0), -kfun(k2, dx)],
        [kfun(k2, dx), rfun(k2, dx, nk1)],
    ]
}

/// tanh-sinh quadrature of a complex integrand over (a, b); the k2 kernels
/// have square-root kinks at k2 = 0, so the halves (-pi,0) and (0,pi) are
/// integrated separately by the caller.
fn ts_complex<F: Fn(f64) -> Complex64 + Sync>(f: F, a: f64, b: f64) -> Complex64 {
    use rayon::prelude::*;
    let terms: Vec<Complex64> = tanh_sinh_nodes(a, b)
        .par_iter()
        .map(|&(x, w)| f(x) * w)
        .collect();
    terms.into_iter().sum()
}

/// 1D fast-path evaluation of the eta-fully-integrated critical propagator
/// at the isotropic critical point.
fn eval1d(
    z: (i64, i64),
    zp: (i64, i64),
    include_bulk: bool,
    include_image: bool,
    grid: &QuadratureGrid,
) -> Mat2 {
    let dx = z.0 - zp.0;
    let dz2 = (z.1 - zp.1) as f64;
    let sz2 = (z.1 + zp.1) as f64;
    let nk1 = grid.n_k_1d.min(1024);
    let f = |k2: f64| -> Mat2 {
        let mut m = zero_mat();
        if include_bulk {
            let pb = Complex64::from_polar(1.0, -k2 * dz2);
            let bm = bulk_mat_1d(k2, dx);
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] += pb * bm[i][j];
                }
            }
        }
        if include_image {
            let pi = Complex64::from_polar(1.0, -k2 * sz2);
            let im = image_mat_1d(k2, dx, nk1);
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] -= pi * im[i][j];
                }
            }
        }
        m
    };
    use rayon::prelude::*;
    let pi = std::f64::consts::PI;
    let mut nodes = tanh_sinh_nodes(-pi, 0.0);
    nodes.extend(tanh_sinh_nodes(0.0, pi));
    let terms: Vec<Mat2> = nodes
        .par_iter()
        .map(|&(k2, w)| {
            let mut m = f(k2);
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v *= w;
                }
            }
            m
        })
        .collect();
    let mut out = zero_mat();
    for t in terms {
        mat_add_assign(&mut out, &t);
    }
    let pref = (SQRT2 + 1.0) / (4.0 * pi);
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v *= pref;
        }
    }
    out
}

/// Full critical propagator (eta integrated over [0, infinity)) via the fast
/// 1D kernel; valid at the isotropic critical point, z2, z'2 >= 1 physically
/// (the formula extends to the fictitious row 0).
pub fn full_critical_propagator(
    z: (i64, i64),
    zp: (i64, i64),
    t1s: f64,
    grid: &QuadratureGrid,
) -> Mat2 {
    assert_isotropic_critical(t1s);
    eval1d(z, zp, true, true, grid)
}

/// Slow validation path: 2D quadrature of the 1/D kernel with a small-k
/// exclusion disk of radius 2 pi / n and Richardson refinement in n.
pub fn full_critical_2d(
    z: (i64, i64),
    zp: (i64, i64),
    t1s: f64,
    grid: &QuadratureGrid,
) -> Mat2 {
    let run = |n: usize| {
        let r0 = 2.0 * std::f64::consts::PI / n as f64;
        eval2d(t1s, z, zp, |dk| if dk <= 0.0 { 0.0 } else { 1.0 / dk }, n, true, true, r0, true)
    };
    let s1 = run(grid.n_k_2d);
    let s2 = run(2 * grid.n_k_2d);
    // Richardson for O(1/n) exclusion error: S* = 2 S(2n) - S(n)
    let mut out = zero_mat();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = 2.0 * s2[i][j] - s1[i][j];
        }
    }
    out
}

/// Infinite-plane (bulk-only) full-critical propagator, fast path.
pub fn infinite_critical(dx: i64, dz2: i64, grid: &QuadratureGrid) -> Mat2 {
    eval1d((dx, dz2), (0, 0), true, false, grid)
}

/// Edge (image-only) full-critical propagator; depends on z1 - z'1 and
/// z2 + z'2 only.
pub fn edge_critical(z: (i64, i64), zp: (i64, i64), grid: &QuadratureGrid) -> Mat2 {
    eval1d(z, zp, false, true, grid)
}

/// E(s): the (-,+) edge component at dx = 0 as a function of s = z2 + z'2.
pub fn edge_e(s: i64, grid: &QuadratureGrid) -> f64 {
    edge_critical((0, s), (0, 0), grid)[1][0].re
}

/// E(s) for s = 0..=smax.  The phase e^{-ik2 s} oscillates s times over the
/// momentum interval, so the quadrature step shrinks with s to keep the
/// oscillation resolved.
pub fn edge_e_batch(smax: usize) -> Vec<f64> {
    use rayon::prelude::*;
    let pi = std::f64::consts::PI;
    let pref = -(SQRT2 + 1.0) / (4.0 * pi);
    (0..=smax)
        .into_par_iter()
        .map(|s| {
            let h = (0.25 / (s.max(1) as f64)).min(1e-2);
            let mut nodes = tanh_sinh_nodes_with_step(-pi, 0.0, h);
            nodes.extend(tanh_sinh_nodes_with_step(0.0, pi, h));
            let acc: f64 = nodes
                .iter()
                .map(|&(k2, w)| (kfun(k2, 0) * Complex64::from_polar(1.0, -k2 * s as f64)).re * w)
                .sum();
            acc * pref
        })
        .collect()
}

/// Discrete derivative constants of the infinite-plane (-,+) component:
/// (d_{1,2} g at coincident points, d_{1,2} g at vertical offset -e2), where
/// d_{1,2} is the discrete derivative in the second coordinate of the first
/// argument.
pub fn derivative_constants(grid: &QuadratureGrid) -> (f64, f64) {
    let g0 = infinite_critical(0, 0, grid)[1][0].re;
    let g1 = infinite_critical(0, 1, grid)[1][0].re;
    let g2 = infinite_critical(0, 2, grid)[1][0].re;
    (g1 - g0, g2 - g1)
}

/// Partial sum over z1 in [-N, N] of g_{H,-+}((0,1), (z1, z2)); the z1 sum is
/// carried out in closed (geometric) form inside the k2 integral, so very
/// large N is cheap.  Converges to sqrt(2) + 1 as N grows.
pub fn sum_rule_partial(z2: i64, nmax: u64) -> f64 {
    let f = |k2: f64| -> Complex64 {
        let (a1, s, rho) = alpha_parts(k2);
        let one_m_rho = s - a1;
        let n = nmax as f64;
        // sum_{|m| <= N} J_m and the boundary correction J_{N+1} - J_N
        let sj = (1.0 + 2.0 * rho * (1.0 - rho.powf(n)) / one_m_rho) / s;
        let dj = (rho.powf(n + 1.0) - rho.powf(n)) / s;
        let e = Complex64::from_polar(1.0, k2);
        let sumk = sj * (1.0 - e) - (SQRT2 - 1.0) * e * dj;
        let ph = Complex64::from_polar(1.0, -k2 * (1.0 - z2 as f64))
            - Complex64::from_polar(1.0, -k2 * (1.0 + z2 as f64));
        ph * sumk
    };
    let pref = (SQRT2 + 1.0) / (4.0 * std::f64::consts::PI);
    let v = ts_complex(&f, -std::f64::consts::PI, 0.0) + ts_complex(&f, 0.0, std::f64::consts::PI);
    (v * pref).re
}

/// Checks grid self-convergence on a small test set: doubling every node
/// count must change the reported values by less than 1e-8.
pub fn grid_self_convergence(grid: &QuadratureGrid) -> Result<f64, IsingError> {
    let fine = grid.doubled();
    let mut worst = 0.0f64;
    let t = t1_critical();
    for (z, zp) in [((1, 2), (0, 1)), ((3, 1), (0, 2))] {
        let a = scale_propagator(z, zp, -1, t, grid);
        let b = scale_propagator(z, zp, -1, t, &fine);
        worst = worst.max(mat_max_norm(&mat_sub(&a, &b)));
        let c = full_critical_propagator(z, zp, t, grid);
        let d = full_critical_propagator(z, zp, t, &fine);
        worst = worst.max(mat_max_norm(&mat_sub(&c, &d)));
    }
    if worst > 1e-8 {
        return Err(IsingError::QuadratureNotConverged(worst));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> QuadratureGrid {
        QuadratureGrid::default()
    }

    #[test]
    fn massive_closed_form_matches_quadrature() {
        let g = grid();
        for dx in -3i64..=3 {
            let a = massive_propagator(dx, 0.3);
            let b = massive_propagator_quadrature(dx, 0.3, &g);
            assert!(mat_max_norm(&mat_sub(&a, &b)) < 1e-10, "dx = {dx}");
        }
        let m0 = massive_propagator(0, 0.3);
        assert!((m0[0][1].re - 1.0).abs() < 1e-15 && (m0[1][0].re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn coincident_derivative_constants() {
        let (d0, d1) = derivative_constants(&grid());
        let c0 = -SQRT2 / 2.0 - 1.0 / PI;
        let c1 = -1.0 - SQRT2 / 2.0 + (SQRT2 + 1.0) * (SQRT2 + 1.0) / PI;
        assert!((d0 - c0).abs() < 1e-8, "got {d0} want {c0}");
        assert!((d1 - c1).abs() < 1e-8, "got {d1} want {c1}");
    }

    #[test]
    fn edge_values_match_closed_forms() {
        let g = grid();
        let e2 = edge_e(2, &g);
        let want2 = (SQRT2 + 1.0) * (SQRT2 + 1.0) / 4.0 * (SQRT2 - 4.0 / PI);
        assert!((e2 - want2).abs() < 1e-8, "E(2) = {e2}, want {want2}");
        let e1 = edge_e(1, &g);
        assert!((e1 - SQRT2 / 4.0).abs() < 1e-8, "E(1) = {e1}");
    }

    #[test]
    fn sum_rule_approaches_limit() {
        for &z2 in &[1i64, 2, 5] {
            let s = sum_rule_partial(z2, 1_000_000_000);
            assert!((s - (SQRT2 + 1.0)).abs() < 1e-6, "z2 = {z2}: {s}");
        }
    }

    #[test]
    fn cancellation_on_fictitious_row() {
        let g = grid();
        for (kind, zs, zps) in [
            (PropagatorKind::CutoffEta(0.37), (3i64, 2i64), (-1i64, 4i64)),
            (PropagatorKind::Scale(-1), (2, 1), (0, 3)),
        ] {
            let eval = |z: (i64, i64), zp: (i64, i64)| match kind {
                PropagatorKind::CutoffEta(eta) => {
                    cutoff_propagator(z, zp, eta, t1_critical(), &g)
                }
                PropagatorKind::Scale(h) => scale_propagator(z, zp, h, t1_critical(), &g),
                _ => unreachable!(),
            };
            let zbar = (zs.0, 0);
            let zpbar = (zps.0, 0);
            assert!(eval(zbar, zps)[0][0].norm() < 1e-12);
            assert!(eval(zs, zpbar)[0][0].norm() < 1e-12);
            assert!(eval(zbar, zps)[0][1].norm() < 1e-12);
            assert!(eval(zs, zpbar)[1][0].norm() < 1e-12);
        }
    }

    #[test]
    fn bands_partition_the_full_propagator() {
        // [0,1] + [1,4] + [4,16] + [16,inf) = [0,inf)
        let g = grid();
        let t = t1_critical();
        let pts = [((1i64, 2i64), (0i64, 1i64)), ((4, 1), (2, 3)), ((0, 5), (0, 1))];
        for (z, zp) in pts {
            let mut acc = scale_le_propagator(z, zp, -3, t, &g);
            for h in [-2, -1, 0] {
                mat_add_assign(&mut acc, &scale_propagator(z, zp, h, t, &g));
            }
            let full = full_critical_propagator(z, zp, t, &g);
            let err = mat_max_norm(&mat_sub(&acc, &full));
            assert!(err < 1e-7, "telescoping error {err} at {z:?} {zp:?}");
        }
    }

    #[test]
    fn bulk_edge_split_sums_to_scale() {
        let g = grid();
        let t = t1_critical();
        let (b, e) = bulk_edge_split((2, 3), (0, 1), -1, t, &g);
        let s = scale_propagator((2, 3), (0, 1), -1, t, &g);
        let mut sum = b;
        mat_add_assign(&mut sum, &e);
        assert!(mat_max_norm(&mat_sub(&sum, &s)) < 1e-13);
    }

    #[test]
    fn fast_path_matches_2d_richardson() {
        let g = grid();
        let t = t1_critical();
        for (z, zp) in [((1i64, 2i64), (0i64, 1i64)), ((3, 1), (1, 2))] {
            let fast = full_critical_propagator(z, zp, t, &g);
            let slow = full_critical_2d(z, zp, t, &g);
            let err = mat_max_norm(&mat_sub(&fast, &slow));
            assert!(err < 5e-3, "1D vs 2D disagree by {err} at {z:?} {zp:?}");
        }
    }

    #[test]
    fn infinite_plus_edge_is_full() {
        let g = grid();
        let z = (1i64, 3i64);
        let zp = (0i64, 2i64);
        let mut s = infinite_critical(z.0 - zp.0, z.1 - zp.1, &g);
        mat_add_assign(&mut s, &edge_critical(z, zp, &g));
        let full = full_critical_propagator(z, zp, t1_critical(), &g);
        assert!(mat_max_norm(&mat_sub(&s, &full)) < 1e-12);
    }

    #[test]
    fn scale_propagator_decays_away_from_scale_length() {
        // |g^(h)(z, z')| should fall off once |z - z'| exceeds 2^{-h}
        let g = QuadratureGrid { n_k_2d: 256, ..grid() };
        let t = t1_critical();
        let near = mat_max_norm(&scale_propagator((1, 2), (0, 1), -2, t, &g));
        let far = mat_max_norm(&scale_propagator((40, 2), (0, 1), -2, t, &g));
        assert!(far < 0.05 * near, "near {near}, far {far}");
    }

    #[test]
    fn grid_convergence_reports_small_defect() {
        let g = QuadratureGrid { n_k_1d: 1024, n_k_2d: 256, eta_nodes: 24 };
        let defect = grid_self_convergence(&g).expect("should converge");
        assert!(defect < 1e-8);
    }
}
