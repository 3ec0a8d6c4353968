//! Exact rational points, oriented perpendicular bisectors, and the
//! general-position validator.
//!
//! Every predicate in this module is exact: points carry `BigRational`
//! coordinates, lines carry content-free `BigInt` coefficients, and sides,
//! intersections, parallelism, and coincidence are decided by integer sign
//! computations. There is no tolerance anywhere.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Exact rational scalar. Always in lowest terms with a positive denominator.
pub type Rat = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// A point of the plane with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point2 {
    pub x: Rat,
    pub y: Rat,
}

impl Point2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        Point2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point2::new(rat(x), rat(y))
    }

    /// Squared Euclidean distance to `other`, exactly.
    pub fn dist2(&self, other: &Point2) -> Rat {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        &dx * &dx + &dy * &dy
    }
}

impl fmt::Debug for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Which side of a bisector a query point falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Strictly closer to the first generator of the pair.
    CloserToFirst,
    /// Equidistant: on the bisector line itself.
    OnBisector,
    /// Strictly closer to the second generator of the pair.
    CloserToSecond,
}

/// Errors from building a generator set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorError {
    TooFew { n: usize },
    Duplicate { i: usize, j: usize },
}

impl fmt::Display for GeneratorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorError::TooFew { n } => {
                write!(f, "need at least 2 generator points, got {n}")
            }
            GeneratorError::Duplicate { i, j } => {
                write!(f, "generators {i} and {j} coincide")
            }
        }
    }
}

impl std::error::Error for GeneratorError {}

/// An ordered set of at least two pairwise-distinct generator points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    points: Vec<Point2>,
}

impl GeneratorSet {
    pub fn new(points: Vec<Point2>) -> Result<Self, GeneratorError> {
        if points.len() < 2 {
            return Err(GeneratorError::TooFew { n: points.len() });
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(GeneratorError::Duplicate { i, j });
                }
            }
        }
        Ok(GeneratorSet { points })
    }

    pub fn from_ints(coords: &[(i64, i64)]) -> Result<Self, GeneratorError> {
        GeneratorSet::new(
            coords
                .iter()
                .map(|&(x, y)| Point2::from_ints(x, y))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point2 {
        &self.points[i]
    }

    /// Number of perpendicular bisectors, n(n-1)/2.
    pub fn bisector_count(&self) -> usize {
        self.n() * (self.n() - 1) / 2
    }

    /// All generator index pairs (i, j), i < j, in lexicographic order. The
    /// position of a pair in this list is its bisector index everywhere else.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push((i, j));
            }
        }
        out
    }

    /// All perpendicular bisectors, indexed like [`GeneratorSet::pairs`].
    pub fn bisectors(&self) -> Vec<Bisector> {
        self.pairs()
            .into_iter()
            .map(|(i, j)| perpendicular_bisector(i, j, self))
            .collect()
    }
}

/// The perpendicular bisector of one generator pair, as an oriented line
/// `a*x + b*y + c = 0` with content-free integer coefficients.
///
/// The orientation is fixed so that the line form is negative at the first
/// generator `p_i` (and hence positive at `p_j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bisector {
    pub i: usize,
    pub j: usize,
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

/// Builds the bisector of generators `i` and `j` of `gs` (requires `i != j`
/// and distinct points, which the generator set guarantees).
pub fn perpendicular_bisector(i: usize, j: usize, gs: &GeneratorSet) -> Bisector {
    let pi = gs.point(i);
    let pj = gs.point(j);
    // Rational line form from equating squared distances; negative at p_i.
    let two = rat(2);
    let ar = &two * (&pj.x - &pi.x);
    let br = &two * (&pj.y - &pi.y);
    let cr = (&pi.x * &pi.x + &pi.y * &pi.y) - (&pj.x * &pj.x + &pj.y * &pj.y);
    // Clear denominators (all positive, so orientation is preserved).
    let lcm = ar.denom().lcm(br.denom()).lcm(cr.denom());
    let a = ar.numer() * (&lcm / ar.denom());
    let b = br.numer() * (&lcm / br.denom());
    let c = cr.numer() * (&lcm / cr.denom());
    // Remove the content; the gcd is positive, so orientation is preserved.
    let g = a.gcd(&b).gcd(&c);
    debug_assert!(!g.is_zero(), "bisector of distinct points is a real line");
    Bisector {
        i,
        j,
        a: &a / &g,
        b: &b / &g,
        c: &c / &g,
    }
}

impl Bisector {
    /// Sign of the line form at `p`, computed in pure integer arithmetic.
    ///
    /// Negative means strictly closer to generator `i`, positive strictly
    /// closer to generator `j`, zero equidistant.
    pub fn eval_sign(&self, p: &Point2) -> Ordering {
        // a*(nx/dx) + b*(ny/dy) + c has the sign of
        // a*nx*dy + b*ny*dx + c*dx*dy since dx, dy > 0.
        let (nx, dx) = (p.x.numer(), p.x.denom());
        let (ny, dy) = (p.y.numer(), p.y.denom());
        let v = &self.a * nx * dy + &self.b * ny * dx + &self.c * dx * dy;
        v.cmp(&BigInt::zero())
    }

    /// The canonical travel direction along the line, `(b, -a)`.
    pub fn direction(&self) -> (BigInt, BigInt) {
        (self.b.clone(), -&self.a)
    }

    /// Direction class key: `(a, b)` reduced and sign-normalized. Two
    /// bisectors are parallel (or coincident) iff their keys are equal.
    pub fn direction_key(&self) -> (BigInt, BigInt) {
        let g = self.a.gcd(&self.b);
        let mut a = &self.a / &g;
        let mut b = &self.b / &g;
        if a.is_negative() || (a.is_zero() && b.is_negative()) {
            a = -a;
            b = -b;
        }
        (a, b)
    }

    /// Full line key: `(a, b, c)` sign-normalized. Two bisectors are the
    /// same line iff their keys are equal.
    pub fn line_key(&self) -> (BigInt, BigInt, BigInt) {
        let lead_neg = if !self.a.is_zero() {
            self.a.is_negative()
        } else {
            self.b.is_negative()
        };
        if lead_neg {
            (-&self.a, -&self.b, -&self.c)
        } else {
            (self.a.clone(), self.b.clone(), self.c.clone())
        }
    }
}

/// Classifies `p` against a bisector: closer to its first generator, on the
/// line, or closer to its second generator.
pub fn classify(p: &Point2, bisector: &Bisector) -> Side {
    match bisector.eval_sign(p) {
        Ordering::Less => Side::CloserToFirst,
        Ordering::Equal => Side::OnBisector,
        Ordering::Greater => Side::CloserToSecond,
    }
}

/// Errors from intersecting two bisector lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntersectError {
    /// The two lines are identical; they share infinitely many points.
    CoincidentLines,
}

impl fmt::Display for IntersectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntersectError::CoincidentLines => write!(f, "bisector lines coincide"),
        }
    }
}

impl std::error::Error for IntersectError {}

/// Exact intersection point of two bisector lines. `Ok(None)` means the
/// lines are parallel and distinct.
pub fn intersect(b1: &Bisector, b2: &Bisector) -> Result<Option<Point2>, IntersectError> {
    let det = &b1.a * &b2.b - &b2.a * &b1.b;
    if det.is_zero() {
        if b1.line_key() == b2.line_key() {
            return Err(IntersectError::CoincidentLines);
        }
        return Ok(None);
    }
    let x = Rat::new(&b1.b * &b2.c - &b2.b * &b1.c, det.clone());
    let y = Rat::new(&b1.c * &b2.a - &b2.c * &b1.a, det);
    Ok(Some(Point2::new(x, y)))
}

/// One general-position violation. Generator pairs identify bisectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateGenerators {
        i: usize,
        j: usize,
    },
    /// Three or more mutually parallel bisectors.
    ParallelBisectors {
        pairs: Vec<(usize, usize)>,
    },
    /// Two (or more) generator pairs share the same bisector line.
    CoincidentBisectors {
        pairs: Vec<(usize, usize)>,
    },
    /// Bisectors concurrent at a point beyond a single triangle's triple.
    ExcessConcurrency {
        location: Point2,
        pairs: Vec<(usize, usize)>,
    },
}

fn write_pairs(f: &mut fmt::Formatter<'_>, pairs: &[(usize, usize)]) -> fmt::Result {
    for (k, (i, j)) in pairs.iter().enumerate() {
        if k > 0 {
            write!(f, ", ")?;
        }
        write!(f, "({i},{j})")?;
    }
    Ok(())
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateGenerators { i, j } => {
                write!(f, "generators {i} and {j} coincide")
            }
            Violation::ParallelBisectors { pairs } => {
                write!(f, "bisectors of ")?;
                write_pairs(f, pairs)?;
                write!(f, " are mutually parallel")
            }
            Violation::CoincidentBisectors { pairs } => {
                write!(f, "bisectors of ")?;
                write_pairs(f, pairs)?;
                write!(f, " are the same line")
            }
            Violation::ExcessConcurrency { location, pairs } => {
                write!(f, "bisectors of ")?;
                write_pairs(f, pairs)?;
                write!(f, " are concurrent at {location} beyond a triangle triple")
            }
        }
    }
}

/// Outcome of general-position validation. Violations are data, not errors:
/// an unclean report explains every reason the input was refused.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return write!(f, "general position: ok");
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

/// Checks the full-diagram preconditions on a validated generator set:
/// no three mutually parallel bisectors, and no concurrency beyond the
/// triangle triples (one circumcenter per generator triple).
pub fn validate_general_position(gs: &GeneratorSet) -> ValidationReport {
    let mut report = ValidationReport::default();
    let bisectors = gs.bisectors();

    // Coincident lines first: same line key.
    let mut by_line: BTreeMap<(BigInt, BigInt, BigInt), Vec<usize>> = BTreeMap::new();
    for (idx, b) in bisectors.iter().enumerate() {
        by_line.entry(b.line_key()).or_default().push(idx);
    }
    for group in by_line.values() {
        if group.len() >= 2 {
            report.violations.push(Violation::CoincidentBisectors {
                pairs: group.iter().map(|&k| pair_of(&bisectors, k)).collect(),
            });
        }
    }

    // Parallel classes of three or more distinct lines.
    let mut by_dir: BTreeMap<(BigInt, BigInt), BTreeSet<(BigInt, BigInt, BigInt)>> =
        BTreeMap::new();
    for b in &bisectors {
        by_dir.entry(b.direction_key()).or_default().insert(b.line_key());
    }
    for (dir, lines) in &by_dir {
        if lines.len() >= 3 {
            let members: Vec<(usize, usize)> = bisectors
                .iter()
                .filter(|b| b.direction_key() == *dir)
                .map(|b| (b.i, b.j))
                .collect();
            report
                .violations
                .push(Violation::ParallelBisectors { pairs: members });
        }
    }

    // Concurrency: group pairwise intersection points.
    let mut at_point: BTreeMap<Point2, BTreeSet<usize>> = BTreeMap::new();
    for s in 0..bisectors.len() {
        for t in (s + 1)..bisectors.len() {
            if let Ok(Some(p)) = intersect(&bisectors[s], &bisectors[t]) {
                let e = at_point.entry(p).or_default();
                e.insert(s);
                e.insert(t);
            }
        }
    }
    for (location, members) in &at_point {
        let pairs: Vec<(usize, usize)> =
            members.iter().map(|&k| pair_of(&bisectors, k)).collect();
        let sanctioned = match pairs.len() {
            2 => true,
            3 => is_triangle_triple(&pairs),
            _ => false,
        };
        if !sanctioned {
            report.violations.push(Violation::ExcessConcurrency {
                location: location.clone(),
                pairs,
            });
        }
    }

    report
}

/// Validates a raw point list: duplicate-point and size checks first, then
/// the bisector-level checks if the set is well formed.
pub fn validate_points(points: &[Point2]) -> ValidationReport {
    let mut report = ValidationReport::default();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i] == points[j] {
                report
                    .violations
                    .push(Violation::DuplicateGenerators { i, j });
            }
        }
    }
    if !report.is_clean() || points.len() < 2 {
        return report;
    }
    let gs = GeneratorSet::new(points.to_vec()).expect("checked above");
    validate_general_position(&gs)
}

fn pair_of(bisectors: &[Bisector], idx: usize) -> (usize, usize) {
    (bisectors[idx].i, bisectors[idx].j)
}

/// True iff the three generator pairs are the three sides of one triangle.
fn is_triangle_triple(pairs: &[(usize, usize)]) -> bool {
    if pairs.len() != 3 {
        return false;
    }
    let mut gens = BTreeSet::new();
    for &(i, j) in pairs {
        gens.insert(i);
        gens.insert(j);
    }
    if gens.len() != 3 {
        return false;
    }
    let g: Vec<usize> = gens.into_iter().collect();
    let want: BTreeSet<(usize, usize)> =
        [(g[0], g[1]), (g[0], g[2]), (g[1], g[2])].into_iter().collect();
    let have: BTreeSet<(usize, usize)> = pairs.iter().copied().collect();
    want == have
}
