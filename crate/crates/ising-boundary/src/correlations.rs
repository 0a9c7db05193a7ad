//! Multipoint boundary spin correlations at lambda = 0 as Pfaffian minors of
//! the inverse action matrix, the Pfaffian-factorization residual, and the
//! fermionic truncated/simple correlation interconversion.

use crate::error::IsingError;
use crate::kasteleyn::{assemble_action, partition_ratio};
use crate::lattice::{idx4, BoundaryTuple, Kind, LatticeSpec, Side, Tau};
use crate::linalg::DenseMatrix;
use crate::pfaffian::{inverse_entries, pfaffian, AntisymmetricMatrix};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    PfaffianMinor,
    WickPairing,
    Oracle,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationResult {
    pub tuple: BoundaryTuple,
    pub value: f64,
    pub method: Method,
}

fn grassmann_index(spec: &LatticeSpec, site: (usize, Side)) -> usize {
    match site.1 {
        Side::Lower => idx4(spec.l, site.0, 1, Kind::V),
        Side::Upper => idx4(spec.l, site.0, spec.m, Kind::Vb),
    }
}

/// Builds the m x m antisymmetric minor [M]_{ij} = -[A^{-1}]_{(i),(j)} over
/// the tuple's Grassmann indices, in tuple order.
fn minor_matrix(
    spec: &LatticeSpec,
    bc: Tau,
    tuple: &BoundaryTuple,
) -> Result<DenseMatrix, IsingError> {
    let act = assemble_action(spec, bc, &[])?;
    let idx: Vec<usize> = tuple.sites.iter().map(|&s| grassmann_index(spec, s)).collect();
    let m = idx.len();
    let mut pairs = Vec::with_capacity(m * (m - 1));
    for i in 0..m {
        for j in 0..m {
            if i != j {
                pairs.push((idx[i], idx[j]));
            }
        }
    }
    let vals = inverse_entries(&act.matrix, &pairs)?;
    let mut mm = DenseMatrix::zeros(m);
    let mut k = 0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                mm.set(i, j, -vals[k]);
                k += 1;
            }
        }
    }
    // symmetrize the antisymmetric pair to kill roundoff drift
    for i in 0..m {
        for j in (i + 1)..m {
            let v = 0.5 * (mm.at(i, j) - mm.at(j, i));
            mm.set(i, j, v);
            mm.set(j, i, -v);
        }
    }
    Ok(mm)
}

/// Boundary m-point correlation at lambda = 0.  Lower-boundary sites use the
/// V Grassmann component, upper-boundary sites use Vb; with an even number of
/// sites per boundary the Grassmann boundary condition is the opposite of the
/// spin one, with odd counts per boundary it is the spin one and the value
/// carries the partition-function ratio Z^{-tau}/Z^{tau}.
pub fn boundary_correlation(
    spec: &LatticeSpec,
    tuple: &BoundaryTuple,
) -> Result<CorrelationResult, IsingError> {
    spec.validate()?;
    tuple.validate(spec.l)?;
    if tuple.len() % 2 == 1 {
        return Ok(CorrelationResult { tuple: tuple.clone(), value: 0.0, method: Method::PfaffianMinor });
    }
    if tuple.is_empty() {
        return Ok(CorrelationResult { tuple: tuple.clone(), value: 1.0, method: Method::PfaffianMinor });
    }
    let (lo, up) = tuple.count_per_side();
    if lo % 2 != up % 2 {
        return Err(IsingError::InvalidSpec(
            "per-boundary parities must agree for an even tuple".into(),
        ));
    }
    let odd_odd = lo % 2 == 1;
    let bc = if odd_odd { spec.tau } else { spec.tau.opposite() };
    let mm = minor_matrix(spec, bc, tuple)?;
    let pf = pfaffian(&AntisymmetricMatrix::dense(mm))?;
    let mut value = pf.value();
    if odd_odd {
        value *= partition_ratio(spec)?;
    }
    Ok(CorrelationResult { tuple: tuple.clone(), value, method: Method::PfaffianMinor })
}

/// |<s...s> - Pf(M)| where M is rebuilt from the two-point functions; the
/// exact Wick factorization of the quadratic theory forces this to vanish.
pub fn pfaffian_factorization_residual(
    spec: &LatticeSpec,
    tuple: &BoundaryTuple,
) -> Result<f64, IsingError> {
    if tuple.len() < 4 || tuple.len() % 2 != 0 {
        return Err(IsingError::InvalidSpec("need even m >= 4".into()));
    }
    if tuple.sites.iter().any(|s| s.1 != Side::Lower) {
        return Err(IsingError::InvalidSpec(
            "factorization residual is defined for lower-boundary tuples".into(),
        ));
    }
    let full = boundary_correlation(spec, tuple)?.value;
    let m = tuple.len();
    let mut mm = DenseMatrix::zeros(m);
    for i in 0..m {
        for j in (i + 1)..m {
            let pair = BoundaryTuple::new(vec![tuple.sites[i], tuple.sites[j]]);
            let v = boundary_correlation(spec, &pair)?.value;
            mm.set(i, j, v);
            mm.set(j, i, -v);
        }
    }
    let pf = pfaffian(&AntisymmetricMatrix::dense(mm))?.value();
    Ok((full - pf).abs())
}

/// Key for a sub-tuple: sorted positions within the master tuple.
pub type SubTuple = Vec<usize>;

fn even_partitions(elems: &[usize]) -> Vec<Vec<Vec<usize>>> {
    // all partitions of `elems` into blocks of even size; elems ascending
    if elems.is_empty() {
        return vec![Vec::new()];
    }
    let first = elems[0];
    let rest = &elems[1..];
    let mut out = Vec::new();
    // choose the block containing `first`: pick an odd number of partners
    let k = rest.len();
    for mask in 0..(1u32 << k) {
        if mask.count_ones() % 2 == 0 {
            continue;
        }
        let mut block = vec![first];
        let mut remaining = Vec::new();
        for (i, &e) in rest.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                block.push(e);
            } else {
                remaining.push(e);
            }
        }
        for mut tail in even_partitions(&remaining) {
            let mut p = vec![block.clone()];
            p.append(&mut tail);
            out.push(p);
        }
    }
    out
}

/// Sign of the permutation that maps the ascending element list to the
/// concatenation of the partition blocks.
fn partition_sign(partition: &[Vec<usize>]) -> f64 {
    let flat: Vec<usize> = partition.iter().flatten().copied().collect();
    let n = flat.len();
    let mut inv = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if flat[i] > flat[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Fermionic truncated correlations from simple ones: inverts the relation
/// simple(S) = sum over even partitions P of S of s(P) prod truncated(block).
/// Input map must contain every even sub-tuple of 0..m; output maps each even
/// sub-tuple to its truncated correlation.
pub fn truncated_correlations(
    simple: &BTreeMap<SubTuple, f64>,
    m: usize,
) -> Result<BTreeMap<SubTuple, f64>, IsingError> {
    let mut truncated: BTreeMap<SubTuple, f64> = BTreeMap::new();
    let full: Vec<usize> = (0..m).collect();
    let mut subsets: Vec<SubTuple> = Vec::new();
    for mask in 1u32..(1 << m) {
        if mask.count_ones() % 2 != 0 {
            continue;
        }
        subsets.push(
            (0..m).filter(|i| (mask >> i) & 1 == 1).collect::<Vec<_>>(),
        );
    }
    subsets.sort_by_key(|s| s.len());
    for s in subsets {
        let sv = *simple
            .get(&s)
            .ok_or_else(|| IsingError::MissingInput(format!("{s:?}")))?;
        let mut correction = 0.0;
        for p in even_partitions(&s) {
            if p.len() <= 1 {
                continue;
            }
            let mut prod = 1.0;
            for block in &p {
                prod *= truncated[block];
            }
            correction += partition_sign(&p) * prod;
        }
        truncated.insert(s, sv - correction);
    }
    let _ = full;
    Ok(truncated)
}
