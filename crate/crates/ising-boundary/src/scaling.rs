//! Scaling-limit checks on cylinders: the 1/|y| decay of the critical
//! boundary two-point function, the rescaled-correlation limit as the lattice
//! spacing shrinks, and a small-lattice universality probe of the first-order
//! spin normalization.

use crate::correlations::{boundary_correlation, pfaffian_factorization_residual};
use crate::error::IsingError;
use crate::kasteleyn::assemble_action;
use crate::lattice::{idx4, BoundaryTuple, Kind, LatticeSpec, Tau};
use crate::linalg::weighted_linear_fit;
use crate::oracle::{brute_correlation, InteractionSpec};
use crate::perturbation::{beta0, zspin_first_order};
use crate::pfaffian::{factor_block_tridiag, pfaffian, AntisymmetricMatrix};
use crate::linalg::DenseMatrix;
use crate::propagators::{QuadratureGrid, SQRT2};
use serde::Serialize;
use std::f64::consts::PI;

/// Lattice boundary two-point amplitude at the isotropic critical point,
/// (sqrt2 + 1)/pi: the measured large-separation limit of
/// separation * <sigma sigma>.
pub fn boundary_amplitude() -> f64 {
    (SQRT2 + 1.0) / PI
}

/// Log-log power-law fit of the boundary two-point decay.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub separations: Vec<usize>,
    pub values: Vec<f64>,
    pub exponent: f64,
    pub amplitude: f64,
    pub r_squared: f64,
}

/// Lower-boundary two-point values <sigma_(0,1) sigma_(x,1)> for every x in
/// `cols`, sharing one factorization of the action matrix.  Even-even tuples
/// use the Grassmann boundary condition opposite to the spin one and need no
/// partition ratio.
pub fn boundary_two_point_row(spec: &LatticeSpec, cols: &[usize]) -> Result<Vec<f64>, IsingError> {
    spec.validate()?;
    let act = assemble_action(spec, spec.tau.opposite(), &[])?;
    let fac = factor_block_tridiag(&act.matrix)?;
    let j = idx4(spec.l, 0, 1, Kind::V);
    let mut e = vec![0.0; act.matrix.n];
    e[j] = 1.0;
    let col = fac.solve(&e);
    cols.iter()
        .map(|&x| {
            if x == 0 || x >= spec.l {
                return Err(IsingError::InvalidSpec(format!("separation {x} out of range")));
            }
            // tuple order is right-to-left: <s_x s_0> = -[A^{-1}]_{(V,x),(V,0)}
            Ok(-col[idx4(spec.l, x, 1, Kind::V)])
        })
        .collect()
}

/// Effective separation on the boundary circle: the chord map
/// (L/pi) sin(pi d / L), the geodesic structure of the cylinder boundary.
pub fn chord_distance(l: usize, d: usize) -> f64 {
    let lf = l as f64;
    lf / PI * (PI * d as f64 / lf).sin()
}

/// Critical boundary two-point decay fit on an L x M cylinder.  Values are
/// fitted as amplitude * chord^exponent by weighted least squares on log-log
/// data, with the two largest separations weighted double.
pub fn two_point_decay(l: usize, m: usize, separations: &[usize]) -> Result<DecayFit, IsingError> {
    two_point_decay_at(&LatticeSpec::isotropic_critical(l, m, Tau::Periodic), separations)
}

/// Decay fit for an arbitrary (critical) spec; separations must stay below
/// L/4 and M to keep finite-size effects out of the asymptotic window.
pub fn two_point_decay_at(
    spec: &LatticeSpec,
    separations: &[usize],
) -> Result<DecayFit, IsingError> {
    if separations.is_empty() {
        return Err(IsingError::InvalidSpec("no separations".into()));
    }
    let mut seps = separations.to_vec();
    seps.sort_unstable();
    seps.dedup();
    if *seps.last().unwrap() > spec.l / 4 || *seps.last().unwrap() > spec.m {
        return Err(IsingError::InvalidSpec(
            "max separation must be <= L/4 and <= M".into(),
        ));
    }
    let values = boundary_two_point_row(spec, &seps)?;
    let xs: Vec<f64> = seps.iter().map(|&d| chord_distance(spec.l, d).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len();
    let mut w = vec![1.0; n];
    for wi in w.iter_mut().skip(n.saturating_sub(2)) {
        *wi = 2.0;
    }
    let (intercept, slope, r2) = weighted_linear_fit(&xs, &ys, &w);
    if r2 < 0.999 {
        return Err(IsingError::FitRejected(r2));
    }
    Ok(DecayFit {
        separations: seps,
        values,
        exponent: slope,
        amplitude: intercept.exp(),
        r_squared: r2,
    })
}

/// One step of the rescaled-correlation limit: continuum boundary positions
/// `cols` (in units where neighbouring positions are distance 1 apart) are
/// realized on the lattice with spacing `a = 1/n`, and the rescaled m-point
/// a^{-m/2} <sigma...sigma> is compared with the scaling-limit Pfaffian built
/// from amplitude / |y_i - y_j| (chord distances).  Returns the absolute
/// residual.
pub fn pfaffian_limit_check(cols: &[f64], a: f64) -> Result<f64, IsingError> {
    let inv = 1.0 / a;
    let n = inv.round();
    if (inv - n).abs() > 1e-9 || n < 2.0 {
        return Err(IsingError::InvalidSpec("1/a must be an integer >= 2".into()));
    }
    let n = n as usize;
    let m = cols.len();
    if m < 2 || m % 2 != 0 {
        return Err(IsingError::InvalidSpec("need an even tuple of size >= 2".into()));
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if (cols[i] - cols[j]).abs() < 1e-12 {
                return Err(IsingError::InvalidSpec("coincident continuum points".into()));
            }
        }
    }
    let span = cols.iter().cloned().fold(0.0f64, f64::max);
    let l = ((4.0 * span).ceil() as usize).max(4) * n;
    // the two-point limit needs a tall cylinder (finite height enters the
    // continuum value); the Wick-structure check is an exact finite-volume
    // identity, so a squat one suffices
    let big = if m == 2 {
        LatticeSpec::isotropic_critical(l, 2 * l, Tau::Periodic)
    } else {
        LatticeSpec::isotropic_critical(l, l / 2, Tau::Periodic)
    };
    let lat_cols: Vec<usize> = cols.iter().map(|&c| (c * n as f64).round() as usize).collect();

    if m == 2 {
        let seps = [lat_cols
            .iter()
            .cloned()
            .max()
            .unwrap()
            .saturating_sub(lat_cols.iter().cloned().min().unwrap())];
        let v = boundary_two_point_row(&big, &seps)?[0];
        let d = a * chord_distance(l, seps[0]);
        return Ok((v / a - boundary_amplitude() / d).abs());
    }

    // m >= 4: compare the rescaled m-point against the Pfaffian of the
    // rescaled computed two-points (the exact Wick structure of the
    // quadratic theory)
    let mut order = lat_cols.clone();
    order.sort_unstable_by(|x, y| y.cmp(x)); // lower-boundary tuples read right-to-left
    let tuple = BoundaryTuple::lower(&order);
    let full = boundary_correlation(&big, &tuple)?.value;
    let mut pair = DenseMatrix::zeros(m);
    for i in 0..m {
        for j in (i + 1)..m {
            let p = BoundaryTuple::lower(&[order[i].max(order[j]), order[i].min(order[j])]);
            let sgn = if order[i] > order[j] { 1.0 } else { -1.0 };
            let v = sgn * boundary_correlation(&big, &p)?.value;
            pair.set(i, j, v);
            pair.set(j, i, -v);
        }
    }
    let pf = pfaffian(&AntisymmetricMatrix::dense(pair))?.value();
    let scale = a.powi(-(m as i32) / 2);
    Ok(scale * (full - pf).abs())
}

/// One row of the universality probe table.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub lambda: f64,
    /// beta_c(lambda) from the first-order shift of the critical point.
    pub beta_c: f64,
    /// <ss>_lambda at beta_c(lambda) over <ss>_0 at beta_0.
    pub ratio: f64,
    /// 1 + 2 Zspin1 lambda, the first-order prediction for the ratio.
    pub linear_prediction: f64,
}

/// Small-lattice probe of the interacting boundary two-point: for each lambda
/// the correlation is evaluated by exhaustive enumeration at the shifted
/// critical point beta_c(lambda) and compared, as a ratio to the free value,
/// with the first-order spin-normalization prediction.  Diagnostic only: the
/// reachable separations are far from asymptotic, so the table documents
/// smoothness in lambda, not the theorem.
pub fn universality_probe(
    lambdas: &[f64],
    l: usize,
    m: usize,
    grid: &QuadratureGrid,
) -> Result<Vec<ProbeRow>, IsingError> {
    if l * m > 24 {
        return Err(IsingError::TooLarge(l * m));
    }
    let b0 = beta0();
    let zspin1 = zspin_first_order(grid)?.zspin1;
    let sep = l / 2;
    let tuple = BoundaryTuple::lower(&[sep, 0]);
    let base_spec = LatticeSpec::new(l, m, b0.tanh(), b0.tanh(), Tau::Periodic)?;
    let base = brute_correlation(&base_spec, &InteractionSpec::none(), b0, &tuple)?;
    lambdas
        .iter()
        .map(|&lambda| {
            let bc = b0 * (1.0 - 2.0 * SQRT2 / PI * lambda);
            let t = bc.tanh();
            let spec = LatticeSpec::new(l, m, t, t, Tau::Periodic)?;
            let v = brute_correlation(&spec, &InteractionSpec::appendix_b(lambda), bc, &tuple)?;
            Ok(ProbeRow {
                lambda,
                beta_c: bc,
                ratio: v / base,
                linear_prediction: 1.0 + 2.0 * zspin1 * lambda,
            })
        })
        .collect()
}

/// Wick-factorization residual on a medium cylinder, re-exported here as the
/// scaling module's finite-volume Pfaffian-structure check.
pub fn factorization_residual(
    spec: &LatticeSpec,
    tuple: &BoundaryTuple,
) -> Result<f64, IsingError> {
    pfaffian_factorization_residual(spec, tuple)
}
