//! Ordinary arranged chromatic diagrams (full-OACDs).
//!
//! A full-OACD is the arrangement of all perpendicular bisectors of a planar
//! generator set, with every cell, edge, and vertex labeled by a *chromatic
//! code*: the tuple of per-generator closeness scores read off the bisector
//! sides. Codes are stored doubled so that half-integer components stay in
//! integer arithmetic throughout.
//!
//! The crate is organized bottom-up:
//!
//! * [`exact`] — exact rational points, oriented bisector lines, and the
//!   general-position validator (all predicates are exact; no floats).
//! * [`arrangement`] — the planar subdivision induced by the bisectors:
//!   vertices, edges, faces, sign vectors, representative points, and the
//!   local units around each vertex.
//! * [`chroma`] — chromatic codes: construction from sign vectors, bases,
//!   kind classification, distances, and the compact string format.
//! * [`topo`] — code-only reasoning: edge/cell/vertex derivation procedures,
//!   pairwise relation verdicts, distance/adjacency/reachability matrices,
//!   and cluster-cluster relations.
//! * [`diagram`] — ties geometry to codes: the built diagram with its
//!   particle table and code index.
//! * [`verify`] — the rank oracle and the verification suite that checks
//!   every structural claim against geometric ground truth.
//! * [`render`] — deterministic SVG output.
//! * [`io`] — exact point ingestion (CSV/JSON) and serializable records.

pub mod arrangement;
pub mod chroma;
pub mod diagram;
pub mod exact;
pub mod io;
pub mod render;
pub mod topo;
pub mod verify;

pub use chroma::{ChromaticCode, ParticleKind};
pub use diagram::FullOacd;
pub use exact::{GeneratorSet, Point2, Rat};
