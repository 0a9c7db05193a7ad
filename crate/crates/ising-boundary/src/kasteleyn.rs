//! Assembly of the quadratic Grassmann action matrices (reduced 4-per-site and
//! decorated 6-per-site forms), partition functions via Pfaffians, the
//! four-orientation combination for a lower-upper crossing coupling, and
//! partition-function ratios.

use crate::error::IsingError;
use crate::lattice::{idx4, idx6, AuxPair, Kind, LatticeSpec, Side, Tau};
use crate::linalg::DenseMatrix;
use crate::pfaffian::{pfaffian, AntisymmetricMatrix, SignedLogValue};
use serde::Serialize;

/// Assembled antisymmetric action with bookkeeping.
pub struct ActionMatrix {
    pub matrix: AntisymmetricMatrix,
    pub spec: LatticeSpec,
    pub grassmann_bc: Tau,
    /// (index pair, weight, sector sign applied) for auxiliary monomials.
    pub aux_terms: Vec<((usize, usize), f64, f64)>,
}

fn artanh(t: f64) -> f64 {
    0.5 * ((1.0 + t) / (1.0 - t)).ln()
}

/// (-1)^{LM} C_beta with C_beta = (2 cosh bJ1)^{LM} (cosh bJ2)^{L(M-1)}
/// prod_k cosh bJ~_k, kept in logs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PrefactorLog {
    pub log_value: f64,
    pub parity_sign: i8,
}

pub fn prefactor(spec: &LatticeSpec, aux_weights: &[f64]) -> PrefactorLog {
    let (l, m) = (spec.l as f64, spec.m as f64);
    let bj1 = artanh(spec.t1);
    let bj2 = artanh(spec.t2);
    let mut log = l * m * (2.0 * bj1.cosh()).ln() + l * (m - 1.0) * bj2.cosh().ln();
    for &t in aux_weights {
        log += artanh(t).cosh().ln();
    }
    PrefactorLog {
        log_value: log,
        parity_sign: if (spec.l * spec.m) % 2 == 0 { 1 } else { -1 },
    }
}

/// Maps an auxiliary boundary pair to its Grassmann monomial (i, j, w) with
/// the verified orientations: lower pairs V_right -> V_left, upper pairs
/// Vb_left -> Vb_right, crossing pairs Vb_upper -> V_lower (the crossing term
/// carries the sector sign alpha' at the call site).
fn aux_monomial(spec: &LatticeSpec, p: &AuxPair) -> (usize, usize, f64) {
    let (l, m) = (spec.l, spec.m);
    match (p.a.1, p.b.1) {
        (Side::Lower, Side::Lower) => {
            let (xr, xl) = if p.a.0 > p.b.0 { (p.a.0, p.b.0) } else { (p.b.0, p.a.0) };
            (idx4(l, xr, 1, Kind::V), idx4(l, xl, 1, Kind::V), p.weight)
        }
        (Side::Upper, Side::Upper) => {
            let (xl, xr) = if p.a.0 < p.b.0 { (p.a.0, p.b.0) } else { (p.b.0, p.a.0) };
            (idx4(l, xl, m, Kind::Vb), idx4(l, xr, m, Kind::Vb), p.weight)
        }
        _ => {
            let (lo, up) = if p.a.1 == Side::Lower { (p.a.0, p.b.0) } else { (p.b.0, p.a.0) };
            (idx4(l, up, m, Kind::Vb), idx4(l, lo, 1, Kind::V), p.weight)
        }
    }
}

/// Assembles the reduced 4LM action matrix for the given Grassmann boundary
/// condition.  `crossing_sign` multiplies crossing auxiliary monomials (the
/// alpha' sector label); same-boundary arcs are unaffected by it.
pub fn assemble_action_with_sign(
    spec: &LatticeSpec,
    grassmann_bc: Tau,
    aux: &[AuxPair],
    crossing_sign: f64,
) -> Result<ActionMatrix, IsingError> {
    spec.validate()?;
    let (l, m) = (spec.l, spec.m);
    let n = 4 * l * m;
    let sg = grassmann_bc.sign();
    let mut trip: Vec<(usize, usize, f64)> = Vec::with_capacity(8 * n);
    let add = |t: &mut Vec<(usize, usize, f64)>, i: usize, j: usize, w: f64| {
        t.push((i, j, w));
        t.push((j, i, -w));
    };
    for y in 1..=m {
        for x in 0..l {
            let z = |k: Kind| idx4(l, x, y, k);
            let xp = (x + 1) % l;
            let w = spec.t1 * if x + 1 == l { sg } else { 1.0 };
            add(&mut trip, z(Kind::Hb), idx4(l, xp, y, Kind::H), w);
            if y < m {
                add(&mut trip, z(Kind::Vb), idx4(l, x, y + 1, Kind::V), spec.t2);
            }
            add(&mut trip, z(Kind::Hb), z(Kind::H), 1.0);
            add(&mut trip, z(Kind::Vb), z(Kind::V), 1.0);
            add(&mut trip, z(Kind::Vb), z(Kind::Hb), 1.0);
            add(&mut trip, z(Kind::V), z(Kind::Hb), 1.0);
            add(&mut trip, z(Kind::H), z(Kind::Vb), 1.0);
            add(&mut trip, z(Kind::V), z(Kind::H), 1.0);
        }
    }
    let mut aux_terms = Vec::new();
    for p in aux {
        let (i, j, w) = aux_monomial(spec, p);
        let crossing = p.a.1 != p.b.1;
        let s = if crossing { crossing_sign } else { 1.0 };
        add(&mut trip, i, j, s * w);
        aux_terms.push(((i, j), w, s));
    }
    Ok(ActionMatrix {
        matrix: AntisymmetricMatrix::sparse(n, trip, 4 * l),
        spec: *spec,
        grassmann_bc,
        aux_terms,
    })
}

/// Reduced action with the physical Grassmann boundary condition, which is the
/// opposite of the spin boundary condition.
pub fn assemble_action(
    spec: &LatticeSpec,
    grassmann_bc: Tau,
    aux: &[AuxPair],
) -> Result<ActionMatrix, IsingError> {
    assemble_action_with_sign(spec, grassmann_bc, aux, 1.0)
}

/// Full decorated 6-per-site action (before integrating out the T pair); its
/// Pfaffian must match the reduced action's exactly under the chosen vertex
/// ordering (tested against `assemble_action`).
pub fn assemble_decorated_action(
    spec: &LatticeSpec,
    grassmann_bc: Tau,
) -> Result<AntisymmetricMatrix, IsingError> {
    spec.validate()?;
    let (l, m) = (spec.l, spec.m);
    let n = 6 * l * m;
    let sg = grassmann_bc.sign();
    let mut mat = DenseMatrix::zeros(n);
    let add = |mm: &mut DenseMatrix, i: usize, j: usize, w: f64| {
        mm.add(i, j, w);
        mm.add(j, i, -w);
    };
    for y in 1..=m {
        for x in 0..l {
            let z = |k: Kind| idx6(l, x, y, k);
            let xp = (x + 1) % l;
            let w = spec.t1 * if x + 1 == l { sg } else { 1.0 };
            add(&mut mat, z(Kind::Hb), idx6(l, xp, y, Kind::H), w);
            if y < m {
                add(&mut mat, z(Kind::Vb), idx6(l, x, y + 1, Kind::V), spec.t2);
            }
            add(&mut mat, z(Kind::Vb), z(Kind::Hb), 1.0);
            add(&mut mat, z(Kind::Hb), z(Kind::T), 1.0);
            add(&mut mat, z(Kind::V), z(Kind::H), 1.0);
            add(&mut mat, z(Kind::H), z(Kind::Tb), 1.0);
            add(&mut mat, z(Kind::T), z(Kind::Vb), 1.0);
            add(&mut mat, z(Kind::Tb), z(Kind::V), 1.0);
            add(&mut mat, z(Kind::Tb), z(Kind::T), 1.0);
        }
    }
    Ok(AntisymmetricMatrix::dense(mat))
}

/// Cylinder partition function Z = (-1)^{LM} C_beta Pf(A) at lambda = 0, with
/// optional same-boundary auxiliary couplings.
pub fn partition_function_with_aux(
    spec: &LatticeSpec,
    aux: &[AuxPair],
) -> Result<SignedLogValue, IsingError> {
    for p in aux {
        if p.a.1 != p.b.1 {
            return Err(IsingError::InvalidSpec(
                "crossing couplings need torus_partition_pfaffians".into(),
            ));
        }
    }
    let act = assemble_action(spec, spec.tau.opposite(), aux)?;
    let pf = pfaffian(&act.matrix)?;
    if pf.sign == 0 {
        return Err(IsingError::Singular);
    }
    let weights: Vec<f64> = aux.iter().map(|p| p.weight).collect();
    let pre = prefactor(spec, &weights);
    Ok(pf.scale(pre.parity_sign, pre.log_value))
}

pub fn partition_function(spec: &LatticeSpec) -> Result<SignedLogValue, IsingError> {
    partition_function_with_aux(spec, &[])
}

/// The four sector Pfaffians Pf A^{(alpha tau, alpha')} and their signed
/// half-sum combination.
#[derive(Debug, Clone, Serialize)]
pub struct TorusSectors {
    /// Indexed [alpha][alpha'] with 0 = +, 1 = -.
    pub pfaffians: [[SignedLogValue; 2]; 2],
    /// The signed half-sum times the prefactor: the spin partition function
    /// with the auxiliary couplings included.
    pub combined: SignedLogValue,
}

/// Computes all four sector Pfaffians for a configuration with at most one
/// lower-upper crossing auxiliary edge, and combines them with weights
/// c_{+-} = c_{-+} = c_{--} = -c_{++} = +1 (half-sum).  All four values are
/// stored even when two vanish: the zero pattern is itself meaningful.
pub fn torus_partition_pfaffians(
    spec: &LatticeSpec,
    aux: &[AuxPair],
) -> Result<TorusSectors, IsingError> {
    let crossings = aux.iter().filter(|p| p.a.1 != p.b.1).count();
    if crossings > 1 {
        return Err(IsingError::MultipleCrossings);
    }
    use rayon::prelude::*;
    let sectors: Vec<((usize, usize), SignedLogValue)> = [(0usize, 0usize), (0, 1), (1, 0), (1, 1)]
        .par_iter()
        .map(|&(ia, ip)| {
            let alpha = if ia == 0 { 1.0 } else { -1.0 };
            let alphap = if ip == 0 { 1.0 } else { -1.0 };
            // Grassmann wrap sign is alpha * tau
            let bc = if alpha * spec.tau.sign() > 0.0 {
                Tau::Periodic
            } else {
                Tau::Antiperiodic
            };
            let act = assemble_action_with_sign(spec, bc, aux, alphap)?;
            Ok(((ia, ip), pfaffian(&act.matrix)?))
        })
        .collect::<Result<Vec<_>, IsingError>>()?;
    let mut pfaffians = [[SignedLogValue::zero(); 2]; 2];
    for ((ia, ip), v) in sectors {
        pfaffians[ia][ip] = v;
    }
    // signed half-sum in log space: factor out the largest magnitude
    let weights: Vec<f64> = aux.iter().map(|p| p.weight).collect();
    let pre = prefactor(spec, &weights);
    let cc = |ia: usize, ip: usize| if ia == 0 && ip == 0 { -1.0 } else { 1.0 };
    let mut maxlog = f64::NEG_INFINITY;
    for row in &pfaffians {
        for v in row {
            if v.sign != 0 {
                maxlog = maxlog.max(v.log_abs);
            }
        }
    }
    let combined = if maxlog == f64::NEG_INFINITY {
        SignedLogValue::zero()
    } else {
        let mut acc = 0.0f64;
        for ia in 0..2 {
            for ip in 0..2 {
                let v = pfaffians[ia][ip];
                if v.sign != 0 {
                    acc += cc(ia, ip) / 2.0 * v.sign as f64 * (v.log_abs - maxlog).exp();
                }
            }
        }
        SignedLogValue::from_value(acc).scale(pre.parity_sign, pre.log_value + maxlog)
    };
    Ok(TorusSectors { pfaffians, combined })
}

/// Z^{-tau} / Z^{tau} via the log difference of two cylinder partition
/// functions.
pub fn partition_ratio(spec: &LatticeSpec) -> Result<f64, IsingError> {
    let zp = partition_function(spec)?;
    let flipped = LatticeSpec { tau: spec.tau.opposite(), ..*spec };
    let zm = partition_function(&flipped)?;
    Ok(zm.ratio(&zp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_partition, InteractionSpec};
    use crate::pfaffian::pfaffian_det_residual;

    fn spec(l: usize, m: usize, t1: f64, t2: f64, tau: Tau) -> LatticeSpec {
        LatticeSpec::new(l, m, t1, t2, tau).unwrap()
    }

    #[test]
    fn partition_matches_oracle_2x2_generic() {
        let s = spec(2, 2, 0.35, 0.55, Tau::Periodic);
        let z = partition_function(&s).unwrap();
        let zo = brute_partition(&s, &InteractionSpec::none(), 1.0).unwrap();
        assert!(
            (z.log_abs - zo.log_abs).abs() < 1e-10,
            "{} vs {}",
            z.log_abs,
            zo.log_abs
        );
        assert_eq!(z.sign, 1);
    }

    #[test]
    fn partition_matches_oracle_4x3_anisotropic_both_sectors() {
        for tau in [Tau::Periodic, Tau::Antiperiodic] {
            let s = spec(4, 3, 0.3, 0.45, tau);
            let z = partition_function(&s).unwrap();
            let zo = brute_partition(&s, &InteractionSpec::none(), 1.0).unwrap();
            assert!((z.log_abs - zo.log_abs).abs() < 1e-10);
        }
    }

    #[test]
    fn odd_site_count_sign_convention() {
        // odd L*M exercises the (-1)^{LM} parity factor
        for tau in [Tau::Periodic, Tau::Antiperiodic] {
            let s = spec(3, 3, 0.3, 0.45, tau);
            let z = partition_function(&s).unwrap();
            let zo = brute_partition(&s, &InteractionSpec::none(), 1.0).unwrap();
            assert!((z.log_abs - zo.log_abs).abs() < 1e-10);
            assert_eq!(z.sign, 1, "Z must be positive");
        }
    }

    #[test]
    fn beta_to_zero_limit() {
        let s = spec(3, 2, 1e-9, 1e-9, Tau::Periodic);
        let z = partition_function(&s).unwrap();
        assert!((z.log_abs - 6.0 * 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn decorated_pfaffian_equals_reduced() {
        for (l, m) in [(2, 2), (3, 2), (2, 3), (3, 3), (4, 3), (4, 4)] {
            let s = spec(l, m, 0.3, 0.45, Tau::Periodic);
            for bc in [Tau::Periodic, Tau::Antiperiodic] {
                let red = assemble_action(&s, bc, &[]).unwrap();
                let p4 = pfaffian(&red.matrix).unwrap();
                let p6 = pfaffian(&assemble_decorated_action(&s, bc).unwrap()).unwrap();
                assert_eq!(p4.sign, p6.sign, "L={l} M={m}");
                assert!((p4.log_abs - p6.log_abs).abs() < 1e-9, "L={l} M={m}");
            }
        }
    }

    #[test]
    fn pf_squared_is_det_for_assembled_action() {
        let s = spec(3, 2, 0.3, 0.45, Tau::Periodic);
        let act = assemble_action(&s, Tau::Antiperiodic, &[]).unwrap();
        assert!(pfaffian_det_residual(&act.matrix).unwrap() < 1e-8);
    }

    #[test]
    fn aux_pair_changes_exactly_two_entries() {
        let s = spec(4, 3, 0.3, 0.45, Tau::Periodic);
        let base = assemble_action(&s, Tau::Antiperiodic, &[]).unwrap();
        let aux = AuxPair { a: (3, Side::Lower), b: (1, Side::Lower), weight: 0.25 };
        let with = assemble_action(&s, Tau::Antiperiodic, &[aux]).unwrap();
        let d0 = base.matrix.to_dense();
        let d1 = with.matrix.to_dense();
        let mut diff = 0;
        for i in 0..d0.n {
            for j in 0..d0.n {
                if (d0.at(i, j) - d1.at(i, j)).abs() > 0.0 {
                    diff += 1;
                }
            }
        }
        assert_eq!(diff, 2);
    }

    #[test]
    fn generating_function_with_lower_pair_matches_oracle() {
        let s = spec(4, 3, 0.3, 0.45, Tau::Periodic);
        let aux = AuxPair { a: (3, Side::Lower), b: (1, Side::Lower), weight: 0.25 };
        let z = partition_function_with_aux(&s, &[aux]).unwrap();
        let inter = InteractionSpec::none().with_pair_coupling((3, 1), (1, 1), artanh(0.25));
        let zo = brute_partition(&s, &inter, 1.0).unwrap();
        assert!((z.log_abs - zo.log_abs).abs() < 1e-10);
    }

    #[test]
    fn generating_function_with_upper_pair_matches_oracle() {
        for tau in [Tau::Periodic, Tau::Antiperiodic] {
            let s = spec(4, 3, 0.3, 0.45, tau);
            let aux = AuxPair { a: (0, Side::Upper), b: (2, Side::Upper), weight: 0.25 };
            let z = partition_function_with_aux(&s, &[aux]).unwrap();
            let inter = InteractionSpec::none().with_pair_coupling((0, 3), (2, 3), artanh(0.25));
            let zo = brute_partition(&s, &inter, 1.0).unwrap();
            assert!((z.log_abs - zo.log_abs).abs() < 1e-10);
        }
    }

    #[test]
    fn aux_derivative_is_generating_function() {
        // numerical d/dw log Z at w=0 against the cosh-corrected two-point
        let s = spec(4, 3, 0.3, 0.45, Tau::Periodic);
        let mk = |w: f64| {
            partition_function_with_aux(
                &s,
                &[AuxPair { a: (3, Side::Lower), b: (1, Side::Lower), weight: w }],
            )
            .unwrap()
            .log_abs
        };
        let h = 1e-5;
        let deriv = (mk(h) - mk(-h)) / (2.0 * h);
        let corr = crate::correlations::boundary_correlation(
            &s,
            &crate::lattice::BoundaryTuple::lower(&[3, 1]),
        )
        .unwrap()
        .value;
        // d/dt~ log Z = <sigma sigma> at t~ = 0 (the cosh factor has zero
        // derivative at the origin)
        assert!((deriv - corr).abs() < 1e-8, "{deriv} vs {corr}");
    }

    #[test]
    fn torus_sectors_match_oracle_with_crossing() {
        for tau in [Tau::Periodic, Tau::Antiperiodic] {
            let s = spec(4, 3, 0.3, 0.45, tau);
            let aux = AuxPair { a: (1, Side::Lower), b: (2, Side::Upper), weight: 0.25 };
            let t = torus_partition_pfaffians(&s, &[aux]).unwrap();
            let inter = InteractionSpec::none().with_pair_coupling((1, 1), (2, 3), artanh(0.25));
            let zo = brute_partition(&s, &inter, 1.0).unwrap();
            assert_eq!(t.combined.sign, 1);
            assert!(
                (t.combined.log_abs - zo.log_abs).abs() < 1e-9,
                "tau {tau:?}: {} vs {}",
                t.combined.log_abs,
                zo.log_abs
            );
        }
    }

    #[test]
    fn torus_alpha_plus_sectors_cancel_without_aux() {
        let s = spec(2, 2, 0.35, 0.55, Tau::Periodic);
        let t = torus_partition_pfaffians(&s, &[]).unwrap();
        // with t~ = 0 both alpha' columns coincide, so the alpha = + terms
        // cancel in the half-sum and the combination reduces to the cylinder Z
        let z = partition_function(&s).unwrap();
        assert!((t.pfaffians[0][0].log_abs - t.pfaffians[0][1].log_abs).abs() < 1e-12);
        assert!((t.combined.log_abs - z.log_abs).abs() < 1e-10);
        assert_eq!(t.combined.sign, z.sign);
    }

    #[test]
    fn partition_ratio_positive_and_matches_oracle() {
        let s = spec(2, 2, 0.41421356, 0.41421356, Tau::Periodic);
        let r = partition_ratio(&s).unwrap();
        let zp = brute_partition(&s, &InteractionSpec::none(), 1.0).unwrap();
        let sm = LatticeSpec { tau: Tau::Antiperiodic, ..s };
        let zm = brute_partition(&sm, &InteractionSpec::none(), 1.0).unwrap();
        assert!(r > 0.0);
        assert!((r - zm.ratio(&zp)).abs() < 1e-10);
    }

    #[test]
    fn translation_invariance_of_z() {
        // relabeling columns x -> x+1 leaves the assembled Pfaffian invariant
        let s = spec(4, 2, 0.3, 0.45, Tau::Periodic);
        let z = partition_function(&s).unwrap();
        // translation acts trivially on Z by construction; verify against a
        // freshly assembled action with the seam bond placed elsewhere by
        // relabeling couplings: equivalent to the oracle check
        let zo = brute_partition(&s, &InteractionSpec::none(), 1.0).unwrap();
        assert!((z.log_abs - zo.log_abs).abs() < 1e-10);
    }
}
