//! The planar subdivision induced by all perpendicular bisectors of a
//! generator set: vertices, edges (rays and full lines included), faces,
//! sign vectors, representative points, and the local unit around each
//! vertex.
//!
//! Construction is a per-line sweep: all pairwise bisector intersections are
//! computed exactly and deduplicated into vertices (a triangle's three
//! bisectors meet in one circumcenter vertex), each line is cut at its
//! vertices into edges, and faces are traced as half-edge walks using exact
//! angular order around each vertex. Unbounded faces are open chains; every
//! face of a line arrangement is convex, so each walk is a single chain or
//! cycle.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::exact::{
    intersect, rat, validate_general_position, Bisector, GeneratorSet, Point2, Rat,
    ValidationReport,
};

/// Side of one bisector: the sign of its oriented line form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl From<Ordering> for Sign {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Sign::Neg,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Pos,
        }
    }
}

/// One sign per bisector, indexed like [`GeneratorSet::pairs`]. Constant on
/// the relative interior of each particle of the subdivision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    /// Indices of the bisectors this point set lies on.
    pub fn zeros(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Sign::Zero)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Geometric vertex class: crossing of two unrelated bisectors, or the
/// circumcenter where a triangle's three bisectors meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    TwoI,
    ThreeI,
}

/// An arrangement vertex: an exact point plus the bisectors through it.
#[derive(Clone, Debug)]
pub struct ArrVertex {
    pub location: Point2,
    /// Bisector indices through this point, ascending. Length 2 or 3.
    pub zero_set: Vec<usize>,
    pub kind: VertexKind,
}

/// A maximal vertex-free interval of one bisector line. Endpoints are
/// ordered along the carrier's canonical direction; `None` means unbounded
/// on that side. A full line (no vertices on the carrier) has both `None`.
#[derive(Clone, Debug)]
pub struct ArrEdge {
    pub carrier: usize,
    pub lo: Option<usize>,
    pub hi: Option<usize>,
}

impl ArrEdge {
    pub fn is_bounded(&self) -> bool {
        self.lo.is_some() && self.hi.is_some()
    }
}

/// A directed edge: travel along the carrier's canonical direction (`rev =
/// false`) or against it. The face it bounds lies on its left.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DirEdge {
    pub edge: usize,
    pub rev: bool,
}

/// A face (cell) of the subdivision: its boundary walk in order, with the
/// interior on the left of every directed edge. Bounded faces are cycles;
/// unbounded faces are open chains entered and left along rays.
#[derive(Clone, Debug)]
pub struct ArrFace {
    pub boundary: Vec<DirEdge>,
    pub bounded: bool,
}

/// Handle to one particle's geometry inside an [`Arrangement`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeomRef {
    Cell(usize),
    Edge(usize),
    Vertex(usize),
}

/// The local structure around one vertex: its incident edges in
/// counterclockwise order and the faces between consecutive edges
/// (`faces[t]` lies between `edges[t]` and `edges[t+1]`, cyclically).
#[derive(Clone, Debug)]
pub struct Unit {
    pub vertex: usize,
    pub edges: Vec<usize>,
    pub faces: Vec<usize>,
}

#[derive(Clone, Debug)]
pub enum ArrangementError {
    /// A vertex star is not the 4- or 6-ray figure its kind demands.
    MalformedUnit { vertex: usize, degree: usize },
}

impl fmt::Display for ArrangementError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrangementError::MalformedUnit { vertex, degree } => {
                write!(f, "vertex {vertex} has a star of degree {degree}, expected 4 or 6")
            }
        }
    }
}

impl std::error::Error for ArrangementError {}

#[derive(Clone, Debug)]
pub enum BuildError {
    /// The generator set fails general position; the report lists why.
    Degenerate(ValidationReport),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Degenerate(report) => {
                write!(f, "generator set is degenerate: {report}")
            }
        }
    }
}

impl std::error::Error for BuildError {}

/// The full bisector arrangement with per-particle sign vectors and
/// representative points precomputed. All fields are in deterministic order
/// for a given generator set.
#[derive(Clone, Debug)]
pub struct Arrangement {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
    pub bisectors: Vec<Bisector>,
    pub vertices: Vec<ArrVertex>,
    pub edges: Vec<ArrEdge>,
    pub faces: Vec<ArrFace>,
    /// Faces of each edge: `[left of forward travel, right of forward travel]`.
    pub edge_faces: Vec<[usize; 2]>,
    /// Per vertex, incident edge ends in counterclockwise order. The flag is
    /// `true` when the outgoing direction runs against the carrier.
    pub stars: Vec<Vec<(usize, bool)>>,
    pub vertex_sv: Vec<SignVector>,
    pub edge_sv: Vec<SignVector>,
    pub face_sv: Vec<SignVector>,
    pub edge_rep: Vec<Point2>,
    pub face_rep: Vec<Point2>,
}

/// Counterclockwise order on nonzero integer direction vectors, starting at
/// the positive x-axis. Exact: quadrant class first, cross-product within.
fn angular_cmp(d1: &(BigInt, BigInt), d2: &(BigInt, BigInt)) -> Ordering {
    fn half(d: &(BigInt, BigInt)) -> u8 {
        if d.1.is_positive() || (d.1.is_zero() && d.0.is_positive()) {
            0
        } else {
            1
        }
    }
    half(d1).cmp(&half(d2)).then_with(|| {
        let cross = &d1.0 * &d2.1 - &d1.1 * &d2.0;
        match cross.sign() {
            num_bigint::Sign::Plus => Ordering::Less,
            num_bigint::Sign::Minus => Ordering::Greater,
            num_bigint::Sign::NoSign => Ordering::Equal,
        }
    })
}

fn translate(p: &Point2, d: &(BigInt, BigInt), scale: &Rat) -> Point2 {
    Point2::new(
        &p.x + scale * Rat::from_integer(d.0.clone()),
        &p.y + scale * Rat::from_integer(d.1.clone()),
    )
}

fn midpoint(a: &Point2, b: &Point2) -> Point2 {
    let two = rat(2);
    Point2::new((&a.x + &b.x) / &two, (&a.y + &b.y) / &two)
}

/// Builds the arrangement of all bisectors of `gs`. Refuses degenerate
/// inputs with the full validation report.
pub fn build_arrangement(gs: &GeneratorSet) -> Result<Arrangement, BuildError> {
    let report = validate_general_position(gs);
    if !report.is_clean() {
        return Err(BuildError::Degenerate(report));
    }

    let pairs = gs.pairs();
    let bisectors = gs.bisectors();
    let k = bisectors.len();

    // Vertices: pairwise intersections, deduplicated by exact point.
    let mut at_point: BTreeMap<Point2, Vec<usize>> = BTreeMap::new();
    for s in 0..k {
        for t in (s + 1)..k {
            if let Ok(Some(p)) = intersect(&bisectors[s], &bisectors[t]) {
                let entry = at_point.entry(p).or_default();
                for b in [s, t] {
                    if !entry.contains(&b) {
                        entry.push(b);
                    }
                }
            }
        }
    }
    let mut vertices: Vec<ArrVertex> = Vec::with_capacity(at_point.len());
    for (location, mut zero_set) in at_point {
        zero_set.sort_unstable();
        let kind = match zero_set.len() {
            2 => VertexKind::TwoI,
            3 => VertexKind::ThreeI,
            d => unreachable!("validated arrangement has vertex of degree {d}"),
        };
        vertices.push(ArrVertex {
            location,
            zero_set,
            kind,
        });
    }

    // Cut each line at its vertices, ordered along the canonical direction.
    let mut on_line: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (vid, v) in vertices.iter().enumerate() {
        for &b in &v.zero_set {
            on_line[b].push(vid);
        }
    }
    let mut edges: Vec<ArrEdge> = Vec::new();
    for (l, vs) in on_line.iter_mut().enumerate() {
        let w = bisectors[l].direction();
        // Position along the line: dot product with the direction vector.
        vs.sort_by(|&va, &vb| {
            let pa = &vertices[va].location;
            let pb = &vertices[vb].location;
            let ta = &pa.x * Rat::from_integer(w.0.clone())
                + &pa.y * Rat::from_integer(w.1.clone());
            let tb = &pb.x * Rat::from_integer(w.0.clone())
                + &pb.y * Rat::from_integer(w.1.clone());
            ta.cmp(&tb)
        });
        if vs.is_empty() {
            edges.push(ArrEdge {
                carrier: l,
                lo: None,
                hi: None,
            });
            continue;
        }
        edges.push(ArrEdge {
            carrier: l,
            lo: None,
            hi: Some(vs[0]),
        });
        for pair in vs.windows(2) {
            edges.push(ArrEdge {
                carrier: l,
                lo: Some(pair[0]),
                hi: Some(pair[1]),
            });
        }
        edges.push(ArrEdge {
            carrier: l,
            lo: Some(*vs.last().unwrap()),
            hi: None,
        });
    }

    // Vertex stars: incident edge ends with outgoing directions, sorted ccw.
    let mut stars: Vec<Vec<(usize, bool)>> = vec![Vec::new(); vertices.len()];
    for (eid, e) in edges.iter().enumerate() {
        if let Some(v) = e.lo {
            stars[v].push((eid, false));
        }
        if let Some(v) = e.hi {
            stars[v].push((eid, true));
        }
    }
    let out_dir = |&(eid, rev): &(usize, bool)| -> (BigInt, BigInt) {
        let w = bisectors[edges[eid].carrier].direction();
        if rev {
            (-w.0, -w.1)
        } else {
            w
        }
    };
    for star in stars.iter_mut() {
        star.sort_by(|a, b| angular_cmp(&out_dir(a), &out_dir(b)));
    }

    // Face tracing. Directed edge h = 2*edge + rev; its face is on its left.
    let dcount = 2 * edges.len();
    let head = |h: usize| -> Option<usize> {
        let e = &edges[h >> 1];
        if h & 1 == 1 {
            e.lo
        } else {
            e.hi
        }
    };
    let tail = |h: usize| -> Option<usize> {
        let e = &edges[h >> 1];
        if h & 1 == 1 {
            e.hi
        } else {
            e.lo
        }
    };
    let next = |h: usize| -> Option<usize> {
        let v = head(h)?;
        let star = &stars[v];
        let back = ((h >> 1), h & 1 == 0);
        let idx = star
            .iter()
            .position(|&s| s == back)
            .expect("edge end must appear in its vertex star");
        let (e2, rev2) = star[(idx + star.len() - 1) % star.len()];
        Some((e2 << 1) | rev2 as usize)
    };

    let mut face_of = vec![usize::MAX; dcount];
    let mut faces: Vec<ArrFace> = Vec::new();
    // Open chains first: start where the walk enters from infinity.
    for h0 in 0..dcount {
        if face_of[h0] != usize::MAX || tail(h0).is_some() {
            continue;
        }
        let fid = faces.len();
        let mut boundary = Vec::new();
        let mut cur = Some(h0);
        while let Some(h) = cur {
            debug_assert_eq!(face_of[h], usize::MAX, "face walks must not overlap");
            face_of[h] = fid;
            boundary.push(DirEdge {
                edge: h >> 1,
                rev: h & 1 == 1,
            });
            cur = next(h);
        }
        faces.push(ArrFace {
            boundary,
            bounded: false,
        });
    }
    // Remaining directed edges lie on closed walks: bounded faces.
    for h0 in 0..dcount {
        if face_of[h0] != usize::MAX {
            continue;
        }
        let fid = faces.len();
        let mut boundary = Vec::new();
        let mut h = h0;
        loop {
            face_of[h] = fid;
            boundary.push(DirEdge {
                edge: h >> 1,
                rev: h & 1 == 1,
            });
            h = next(h).expect("closed walk cannot leave to infinity");
            if h == h0 {
                break;
            }
        }
        faces.push(ArrFace {
            boundary,
            bounded: true,
        });
    }
    let edge_faces: Vec<[usize; 2]> = (0..edges.len())
        .map(|e| [face_of[e << 1], face_of[(e << 1) | 1]])
        .collect();
    for (e, f) in edge_faces.iter().enumerate() {
        debug_assert_ne!(f[0], f[1], "edge {e} must separate two distinct faces");
    }

    // Representative points: vertices are their own; edges take a midpoint
    // or a one-step offset along the ray; faces are found below.
    let edge_rep: Vec<Point2> = edges
        .iter()
        .map(|e| {
            let w = bisectors[e.carrier].direction();
            match (e.lo, e.hi) {
                (Some(lo), Some(hi)) => {
                    midpoint(&vertices[lo].location, &vertices[hi].location)
                }
                (Some(lo), None) => translate(&vertices[lo].location, &w, &rat(1)),
                (None, Some(hi)) => translate(&vertices[hi].location, &w, &rat(-1)),
                (None, None) => {
                    // Whole line: the midpoint of its generator pair is on it.
                    let (i, j) = pairs[e.carrier];
                    midpoint(gs.point(i), gs.point(j))
                }
            }
        })
        .collect();

    let sign_vector_at = |p: &Point2| -> SignVector {
        SignVector(bisectors.iter().map(|b| Sign::from(b.eval_sign(p))).collect())
    };

    let vertex_sv: Vec<SignVector> = vertices
        .iter()
        .map(|v| {
            let sv = sign_vector_at(&v.location);
            debug_assert_eq!(sv.zeros(), v.zero_set, "vertex zero set mismatch");
            sv
        })
        .collect();
    let edge_sv: Vec<SignVector> = edges
        .iter()
        .enumerate()
        .map(|(eid, e)| {
            let sv = sign_vector_at(&edge_rep[eid]);
            debug_assert_eq!(sv.zeros(), vec![e.carrier], "edge interior zero mismatch");
            sv
        })
        .collect();

    // A face's sign vector is any incident edge's, with the carrier zero
    // replaced by the side the face lies on: left of forward travel is the
    // positive side of the oriented line form.
    let face_sv: Vec<SignVector> = faces
        .iter()
        .map(|face| {
            let d = face.boundary[0];
            let mut sv = edge_sv[d.edge].clone();
            sv.0[edges[d.edge].carrier] = if d.rev { Sign::Neg } else { Sign::Pos };
            debug_assert!(face.boundary.iter().all(|b| {
                let mut other = edge_sv[b.edge].clone();
                other.0[edges[b.edge].carrier] = if b.rev { Sign::Neg } else { Sign::Pos };
                other == sv
            }));
            sv
        })
        .collect();

    // Face representative point: displace a boundary edge's midpoint into
    // the face, halving the step until the sign vector matches.
    let face_rep: Vec<Point2> = faces
        .iter()
        .enumerate()
        .map(|(fid, face)| {
            let d = face.boundary[0];
            let b = &bisectors[edges[d.edge].carrier];
            let normal = if d.rev {
                (-b.a.clone(), -b.b.clone())
            } else {
                (b.a.clone(), b.b.clone())
            };
            let base = &edge_rep[d.edge];
            let mut eps = rat(1);
            for _ in 0..256 {
                let p = translate(base, &normal, &eps);
                if sign_vector_at(&p) == face_sv[fid] {
                    return p;
                }
                eps /= rat(2);
            }
            unreachable!("face interior point search did not converge");
        })
        .collect();

    Ok(Arrangement {
        n: gs.n(),
        pairs,
        bisectors,
        vertices,
        edges,
        faces,
        edge_faces,
        stars,
        vertex_sv,
        edge_sv,
        face_sv,
        edge_rep,
        face_rep,
    })
}

impl Arrangement {
    /// Classifies a point against every bisector.
    pub fn sign_vector_at(&self, p: &Point2) -> SignVector {
        SignVector(
            self.bisectors
                .iter()
                .map(|b| Sign::from(b.eval_sign(p)))
                .collect(),
        )
    }

    /// The stored sign vector of a particle's relative interior.
    pub fn sign_vector(&self, g: GeomRef) -> &SignVector {
        match g {
            GeomRef::Cell(f) => &self.face_sv[f],
            GeomRef::Edge(e) => &self.edge_sv[e],
            GeomRef::Vertex(v) => &self.vertex_sv[v],
        }
    }

    /// A rational point in the particle's relative interior (the vertex
    /// itself for vertices).
    pub fn representative_point(&self, g: GeomRef) -> Point2 {
        match g {
            GeomRef::Cell(f) => self.face_rep[f].clone(),
            GeomRef::Edge(e) => self.edge_rep[e].clone(),
            GeomRef::Vertex(v) => self.vertices[v].location.clone(),
        }
    }

    /// The faces around vertex `v`, one per wedge between consecutive star
    /// edges: entry `t` is the face between star edge `t` and `t+1`.
    fn wedge_faces(&self, v: usize) -> Vec<usize> {
        self.stars[v]
            .iter()
            .map(|&(e, rev)| {
                // Face left of the outgoing directed edge.
                self.edge_faces[e][rev as usize]
            })
            .collect()
    }

    /// Enumerates the unit around every vertex: incident edges in ccw order
    /// and the cells between them. A 2-I vertex must have 4 rays, a 3-I
    /// vertex 6.
    pub fn units(&self) -> Result<Vec<Unit>, ArrangementError> {
        let mut out = Vec::with_capacity(self.vertices.len());
        for (vid, v) in self.vertices.iter().enumerate() {
            let star = &self.stars[vid];
            let want = match v.kind {
                VertexKind::TwoI => 4,
                VertexKind::ThreeI => 6,
            };
            if star.len() != want {
                return Err(ArrangementError::MalformedUnit {
                    vertex: vid,
                    degree: star.len(),
                });
            }
            out.push(Unit {
                vertex: vid,
                edges: star.iter().map(|&(e, _)| e).collect(),
                faces: self.wedge_faces(vid),
            });
        }
        Ok(out)
    }

    /// Euler characteristic V - E + F of the subdivision (1 for a plane
    /// arrangement with unbounded faces counted).
    pub fn euler(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }
}
