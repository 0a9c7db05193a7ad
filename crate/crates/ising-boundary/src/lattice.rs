//! Cylinder lattice specification, boundary site tuples, and the decorated
//! graph (six-vertex clusters per site) with a verified clockwise-odd
//! orientation.  Faces are enumerated from an angle-based rotation system on
//! the cylinder; the two boundary circles are unbounded and excluded from the
//! parity check.

use crate::error::IsingError;
use serde::{Deserialize, Serialize};

/// Horizontal spin boundary condition around the cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tau {
    Periodic,
    Antiperiodic,
}

impl Tau {
    /// Coupling sign carried by the seam bonds.
    pub fn sign(self) -> f64 {
        match self {
            Tau::Periodic => 1.0,
            Tau::Antiperiodic => -1.0,
        }
    }

    pub fn opposite(self) -> Tau {
        match self {
            Tau::Periodic => Tau::Antiperiodic,
            Tau::Antiperiodic => Tau::Periodic,
        }
    }
}

/// Cylinder dimensions and couplings: L columns around, M rows, open vertical
/// boundaries, horizontal boundary condition `tau`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub l: usize,
    pub m: usize,
    pub t1: f64,
    pub t2: f64,
    pub tau: Tau,
}

impl LatticeSpec {
    pub fn new(l: usize, m: usize, t1: f64, t2: f64, tau: Tau) -> Result<Self, IsingError> {
        let s = LatticeSpec { l, m, t1, t2, tau };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), IsingError> {
        if self.l < 2 || self.m < 1 {
            return Err(IsingError::InvalidSpec(format!(
                "need L >= 2, M >= 1, got L={}, M={}",
                self.l, self.m
            )));
        }
        if !(self.t1 > 0.0 && self.t1 < 1.0 && self.t2 > 0.0 && self.t2 < 1.0) {
            return Err(IsingError::InvalidSpec(format!(
                "couplings must lie in (0,1): t1={}, t2={}",
                self.t1, self.t2
            )));
        }
        Ok(())
    }

    /// Isotropic critical spec: t1 = t2 = sqrt(2) - 1.
    pub fn isotropic_critical(l: usize, m: usize, tau: Tau) -> Self {
        let t = std::f64::consts::SQRT_2 - 1.0;
        LatticeSpec { l, m, t1: t, t2: t, tau }
    }

    /// Whether (t1, t2) sits on the critical line t2 = (1-t1)/(1+t1).
    pub fn is_critical(&self, tol: f64) -> bool {
        (self.t2 - (1.0 - self.t1) / (1.0 + self.t1)).abs() < tol
    }

    pub fn sites(&self) -> usize {
        self.l * self.m
    }
}

/// Which boundary circle a site sits on: Lower is row 1, Upper is row M.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Lower,
    Upper,
}

/// Ordered list of distinct boundary sites: lower-boundary sites first,
/// right-to-left by column, then upper-boundary sites left-to-right (the
/// cyclic order along the boundary of the cut-open cylinder).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryTuple {
    pub sites: Vec<(usize, Side)>,
}

impl BoundaryTuple {
    pub fn new(sites: Vec<(usize, Side)>) -> Self {
        BoundaryTuple { sites }
    }

    pub fn lower(cols: &[usize]) -> Self {
        BoundaryTuple {
            sites: cols.iter().map(|&c| (c, Side::Lower)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Checks distinctness and the cyclic ordering convention.
    pub fn validate(&self, l: usize) -> Result<(), IsingError> {
        let mut seen = std::collections::HashSet::new();
        for &(c, side) in &self.sites {
            if c >= l {
                return Err(IsingError::InvalidSpec(format!(
                    "column {c} out of range (L={l})"
                )));
            }
            if !seen.insert((c, side)) {
                return Err(IsingError::InvalidSpec(format!(
                    "repeated site ({c}, {side:?})"
                )));
            }
        }
        let lower: Vec<usize> = self
            .sites
            .iter()
            .filter(|s| s.1 == Side::Lower)
            .map(|s| s.0)
            .collect();
        let upper: Vec<usize> = self
            .sites
            .iter()
            .filter(|s| s.1 == Side::Upper)
            .map(|s| s.0)
            .collect();
        let split_ok = {
            let k = lower.len();
            self.sites[..k].iter().all(|s| s.1 == Side::Lower)
        };
        if !split_ok {
            return Err(IsingError::InvalidSpec(
                "lower-boundary sites must precede upper-boundary sites".into(),
            ));
        }
        if lower.windows(2).any(|w| w[0] <= w[1]) {
            return Err(IsingError::InvalidSpec(
                "lower-boundary sites must be ordered right-to-left".into(),
            ));
        }
        if upper.windows(2).any(|w| w[0] >= w[1]) {
            return Err(IsingError::InvalidSpec(
                "upper-boundary sites must be ordered left-to-right".into(),
            ));
        }
        Ok(())
    }

    pub fn count_per_side(&self) -> (usize, usize) {
        let lo = self.sites.iter().filter(|s| s.1 == Side::Lower).count();
        (lo, self.sites.len() - lo)
    }
}

/// Fisher-cluster vertex kinds.  Each original site becomes six vertices; the
/// Tb/T pair is integrated out in the reduced 4-per-site action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Hb,
    H,
    Vb,
    V,
    Tb,
    T,
}

pub const KINDS6: [Kind; 6] = [Kind::Hb, Kind::H, Kind::Vb, Kind::V, Kind::Tb, Kind::T];

impl Kind {
    pub fn index(self) -> usize {
        match self {
            Kind::Hb => 0,
            Kind::H => 1,
            Kind::Vb => 2,
            Kind::V => 3,
            Kind::Tb => 4,
            Kind::T => 5,
        }
    }

    /// Drawing offset of the vertex within its cluster (fixes the rotation
    /// system used for face enumeration).
    fn offset(self) -> (f64, f64) {
        match self {
            Kind::H => (-0.3, 0.0),
            Kind::Hb => (0.3, 0.0),
            Kind::V => (0.0, -0.3),
            Kind::Vb => (0.0, 0.3),
            Kind::Tb => (-0.1, -0.1),
            Kind::T => (0.1, 0.1),
        }
    }
}

/// Flattened vertex index in the 6-per-site decorated graph, kind innermost.
pub fn idx6(l: usize, x: usize, y: usize, k: Kind) -> usize {
    ((y - 1) * l + x) * 6 + k.index()
}

/// Flattened index in the reduced 4-per-site action (kinds Hb,H,Vb,V only).
pub fn idx4(l: usize, x: usize, y: usize, k: Kind) -> usize {
    debug_assert!(k.index() < 4, "reduced action has no T vertices");
    ((y - 1) * l + x) * 4 + k.index()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphVertex {
    pub x: usize,
    pub y: usize,
    pub kind: Kind,
}

/// Directed edge u -> v.  `sign = -1` marks edges whose actual orientation is
/// reversed relative to the listed direction; the periodic-wrap horizontal
/// edges carry it (they run opposite to all other horizontal edges).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
    pub sign: i8,
    /// Departure angles at u and v used by the rotation system.
    #[serde(skip)]
    pub angle_u: f64,
    #[serde(skip)]
    pub angle_v: f64,
    /// Lower-to-upper crossing edges are excluded from face enumeration.
    pub crossing: bool,
}

/// One face of the embedded graph: darts (edge index, along-direction flag),
/// precomputed traversal orientation, and horizontal winding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Face {
    pub darts: Vec<(usize, bool)>,
    pub ccw: bool,
    pub winding: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecoratedGraph {
    pub l: usize,
    pub m: usize,
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
    pub faces: Vec<Face>,
}

/// Auxiliary boundary pair with coupling weight; sites as (column, side).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AuxPair {
    pub a: (usize, Side),
    pub b: (usize, Side),
    pub weight: f64,
}

fn vertex_pos(l: usize, v: &GraphVertex) -> (f64, f64) {
    let _ = l;
    let (ox, oy) = v.kind.offset();
    (v.x as f64 + ox, v.y as f64 + oy)
}

/// Builds the decorated cylinder graph with its clockwise-odd orientation and
/// optional auxiliary boundary arcs, then enumerates faces.
pub fn build_decorated_graph(
    spec: &LatticeSpec,
    aux_pairs: &[AuxPair],
) -> Result<DecoratedGraph, IsingError> {
    spec.validate()?;
    validate_aux_pairs(spec, aux_pairs)?;
    let (l, m) = (spec.l, spec.m);
    let mut vertices = Vec::with_capacity(6 * l * m);
    for y in 1..=m {
        for x in 0..l {
            for &k in &KINDS6 {
                vertices.push(GraphVertex { x, y, kind: k });
            }
        }
    }
    let mut edges: Vec<GraphEdge> = Vec::new();
    let mut add = |u: usize, v: usize, w: f64, sign: i8, au: Option<f64>, av: Option<f64>, crossing: bool, vs: &[GraphVertex]| {
        let pu = vertex_pos(l, &vs[u]);
        let pv = vertex_pos(l, &vs[v]);
        let angle_u = au.unwrap_or_else(|| (pv.1 - pu.1).atan2(pv.0 - pu.0));
        let angle_v = av.unwrap_or_else(|| (pu.1 - pv.1).atan2(pu.0 - pv.0));
        edges.push(GraphEdge { u, v, w, sign, angle_u, angle_v, crossing });
    };
    for y in 1..=m {
        for x in 0..l {
            let z = |k: Kind| idx6(l, x, y, k);
            // long horizontal Hb -> H of the next column; the wrap edge is
            // reversed (sign -1) and pinned to the east/west directions
            if x + 1 < l {
                add(z(Kind::Hb), idx6(l, x + 1, y, Kind::H), spec.t1, 1, None, None, false, &vertices);
            } else {
                add(
                    z(Kind::Hb),
                    idx6(l, 0, y, Kind::H),
                    spec.t1,
                    -1,
                    Some(0.0),
                    Some(std::f64::consts::PI),
                    false,
                    &vertices,
                );
            }
            // long vertical Vb -> V of the next row
            if y < m {
                add(z(Kind::Vb), idx6(l, x, y + 1, Kind::V), spec.t2, 1, None, None, false, &vertices);
            }
            // the seven unit-weight intra-cluster edges
            add(z(Kind::Vb), z(Kind::Hb), 1.0, 1, None, None, false, &vertices);
            add(z(Kind::Hb), z(Kind::T), 1.0, 1, None, None, false, &vertices);
            add(z(Kind::V), z(Kind::H), 1.0, 1, None, None, false, &vertices);
            add(z(Kind::H), z(Kind::Tb), 1.0, 1, None, None, false, &vertices);
            add(z(Kind::T), z(Kind::Vb), 1.0, 1, None, None, false, &vertices);
            add(z(Kind::Tb), z(Kind::V), 1.0, 1, None, None, false, &vertices);
            add(z(Kind::Tb), z(Kind::T), 1.0, 1, None, None, false, &vertices);
        }
    }
    for p in aux_pairs {
        match (p.a.1, p.b.1) {
            (Side::Lower, Side::Lower) => {
                // arc below the lower boundary, directed right-to-left
                let (xr, xl) = if p.a.0 > p.b.0 { (p.a.0, p.b.0) } else { (p.b.0, p.a.0) };
                let half = std::f64::consts::FRAC_PI_2;
                add(
                    idx6(l, xr, 1, Kind::V),
                    idx6(l, xl, 1, Kind::V),
                    p.weight,
                    1,
                    Some(-half - 0.3),
                    Some(-half + 0.3),
                    false,
                    &vertices,
                );
            }
            (Side::Upper, Side::Upper) => {
                // arc above the upper boundary, directed left-to-right
                let (xl, xr) = if p.a.0 < p.b.0 { (p.a.0, p.b.0) } else { (p.b.0, p.a.0) };
                let half = std::f64::consts::FRAC_PI_2;
                add(
                    idx6(l, xl, m, Kind::Vb),
                    idx6(l, xr, m, Kind::Vb),
                    p.weight,
                    1,
                    Some(half - 0.3),
                    Some(half + 0.3),
                    false,
                    &vertices,
                );
            }
            _ => {
                // crossing edge, directed bottom-to-top; intersects the wrap
                // edges so it is excluded from planar face enumeration
                let (lo, up) = if p.a.1 == Side::Lower { (p.a.0, p.b.0) } else { (p.b.0, p.a.0) };
                add(
                    idx6(l, lo, 1, Kind::V),
                    idx6(l, up, m, Kind::Vb),
                    p.weight,
                    1,
                    None,
                    None,
                    true,
                    &vertices,
                );
            }
        }
    }
    let faces = enumerate_faces(l, &vertices, &edges);
    Ok(DecoratedGraph { l, m, vertices, edges, faces })
}

fn validate_aux_pairs(spec: &LatticeSpec, aux_pairs: &[AuxPair]) -> Result<(), IsingError> {
    let mut seen = std::collections::HashSet::new();
    let mut crossings = 0usize;
    let mut lower_arcs: Vec<(usize, usize)> = Vec::new();
    let mut upper_arcs: Vec<(usize, usize)> = Vec::new();
    for p in aux_pairs {
        if p.a == p.b {
            return Err(IsingError::InvalidPair(format!("{:?}", p.a)));
        }
        for s in [p.a, p.b] {
            if s.0 >= spec.l {
                return Err(IsingError::InvalidPair(format!("column {} >= L", s.0)));
            }
            if !seen.insert(s) {
                return Err(IsingError::InvalidPair(format!("site {s:?} used twice")));
            }
        }
        match (p.a.1, p.b.1) {
            (Side::Lower, Side::Lower) => {
                lower_arcs.push((p.a.0.min(p.b.0), p.a.0.max(p.b.0)))
            }
            (Side::Upper, Side::Upper) => {
                upper_arcs.push((p.a.0.min(p.b.0), p.a.0.max(p.b.0)))
            }
            _ => crossings += 1,
        }
    }
    if crossings > 1 {
        return Err(IsingError::MultipleCrossings);
    }
    for arcs in [&lower_arcs, &upper_arcs] {
        for (i, &(a, b)) in arcs.iter().enumerate() {
            for &(c, d) in &arcs[i + 1..] {
                let disjoint = b < c || d < a;
                let nested = (a < c && d < b) || (c < a && b < d);
                if !disjoint && !nested {
                    return Err(IsingError::CrossingAuxEdges(format!(
                        "[{a},{b}] vs [{c},{d}]"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Enumerates faces of the embedded graph from the rotation system: at every
/// vertex darts are sorted counterclockwise by angle, and face traversal
/// follows the clockwise-next dart after the reversed dart at the target.
fn enumerate_faces(l: usize, vertices: &[GraphVertex], edges: &[GraphEdge]) -> Vec<Face> {
    let nv = vertices.len();
    let mut rot: Vec<Vec<(usize, bool, f64)>> = vec![Vec::new(); nv];
    for (ei, e) in edges.iter().enumerate() {
        if e.crossing {
            continue;
        }
        rot[e.u].push((ei, true, e.angle_u));
        rot[e.v].push((ei, false, e.angle_v));
    }
    for list in rot.iter_mut() {
        list.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap());
    }
    let dart_id = |ei: usize, along: bool| 2 * ei + usize::from(!along);
    let mut pos = vec![usize::MAX; 2 * edges.len()];
    for (v, list) in rot.iter().enumerate() {
        let _ = v;
        for (i, &(ei, along, _)) in list.iter().enumerate() {
            pos[dart_id(ei, along)] = i;
        }
    }
    let target = |ei: usize, along: bool| if along { edges[ei].v } else { edges[ei].u };
    let mut next = vec![(usize::MAX, false); 2 * edges.len()];
    for (ei, e) in edges.iter().enumerate() {
        if e.crossing {
            continue;
        }
        for along in [true, false] {
            let tv = target(ei, along);
            let rev = dart_id(ei, !along);
            let i = pos[rev];
            let list = &rot[tv];
            let (nei, nalong, _) = list[(i + list.len() - 1) % list.len()];
            next[dart_id(ei, along)] = (nei, nalong);
        }
    }
    let mut seen = vec![false; 2 * edges.len()];
    let mut faces = Vec::new();
    for (ei, e) in edges.iter().enumerate() {
        if e.crossing {
            continue;
        }
        for along0 in [true, false] {
            if seen[dart_id(ei, along0)] {
                continue;
            }
            let mut cyc = Vec::new();
            let (mut ce, mut ca) = (ei, along0);
            let mut xs: Vec<f64> = Vec::new();
            let mut ys: Vec<f64> = Vec::new();
            let mut wind = 0.0f64;
            while !seen[dart_id(ce, ca)] {
                seen[dart_id(ce, ca)] = true;
                cyc.push((ce, ca));
                let e = &edges[ce];
                let (u, v) = if ca { (e.u, e.v) } else { (e.v, e.u) };
                let pu = vertex_pos(l, &vertices[u]);
                let pv = vertex_pos(l, &vertices[v]);
                let mut dx = pv.0 - pu.0;
                if dx > l as f64 / 2.0 {
                    dx -= l as f64;
                }
                if dx < -(l as f64) / 2.0 {
                    dx += l as f64;
                }
                if xs.is_empty() {
                    xs.push(pu.0);
                    ys.push(pu.1);
                }
                let lx = *xs.last().unwrap();
                xs.push(lx + dx);
                ys.push(pv.1);
                wind += dx;
                let (ne, na) = next[dart_id(ce, ca)];
                ce = ne;
                ca = na;
            }
            let mut area = 0.0;
            for i in 0..xs.len() - 1 {
                area += xs[i] * ys[i + 1] - xs[i + 1] * ys[i];
            }
            faces.push(Face {
                darts: cyc,
                ccw: area > 0.0,
                winding: wind.round() as i64,
            });
        }
    }
    faces
}

/// Returns indices of bounded faces violating the clockwise-odd condition.
/// Every bounded face must be surrounded by an odd number of clockwise
/// edges; sign = -1 edges count with their actual (reversed) direction.
pub fn verify_clockwise_odd(graph: &DecoratedGraph) -> Vec<usize> {
    let mut bad = Vec::new();
    for (fi, face) in graph.faces.iter().enumerate() {
        if face.winding != 0 {
            // the two boundary circles of the cylinder are unbounded faces
            continue;
        }
        let mut ncw = 0usize;
        for &(ei, along) in &face.darts {
            let e = &graph.edges[ei];
            let effective_along = along == (e.sign > 0);
            if effective_along != face.ccw {
                ncw += 1;
            }
        }
        if ncw % 2 == 0 {
            bad.push(fi);
        }
    }
    bad
}
