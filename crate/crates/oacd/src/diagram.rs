//! The assembled diagram: an exact arrangement with every particle's
//! chromatic code attached and indexed.

use std::collections::HashMap;

use crate::arrangement::{build_arrangement, Arrangement, BuildError, GeomRef};
use crate::chroma::{classify_kind, code_from_signs, ChromaticCode, Particle, ParticleKind};
use crate::exact::{GeneratorSet, Point2};

/// Particle tallies of a diagram, by kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParticleCounts {
    pub cells: usize,
    pub edges: usize,
    pub vertices_2i: usize,
    pub vertices_3i: usize,
}

impl ParticleCounts {
    /// Closed-form counts for a degeneracy-free diagram on n generators
    /// with k = n(n-1)/2 bisectors: C(n,3) triple crossings each merge three
    /// pairwise crossings into one point, so relative to a simple
    /// arrangement the counts drop accordingly.
    pub fn expected(n: usize) -> ParticleCounts {
        let k = n * (n - 1) / 2;
        let t = n * (n - 1) * (n - 2) / 6;
        let vertices_2i = if n >= 4 {
            k * ((n - 2) * (n - 3) / 2) / 2
        } else {
            0
        };
        ParticleCounts {
            cells: k * (k + 1) / 2 + 1 - t,
            edges: k * k - 3 * t,
            vertices_2i,
            vertices_3i: t,
        }
    }

    pub fn total(&self) -> usize {
        self.cells + self.edges + self.vertices_2i + self.vertices_3i
    }

    /// Euler relation for a plane arrangement with unbounded faces counted:
    /// V - E + F = 1 when at least one line exists.
    pub fn euler(&self) -> i64 {
        (self.vertices_2i + self.vertices_3i) as i64 - self.edges as i64 + self.cells as i64
    }
}

/// A full ordinary arranged chromatic diagram: the exact arrangement of all
/// perpendicular bisectors of a generator set, with a chromatic code
/// assigned to every cell, edge, and vertex.
pub struct FullOacd {
    gs: GeneratorSet,
    arr: Arrangement,
    particles: Vec<Particle>,
    code_index: HashMap<ChromaticCode, usize>,
}

impl FullOacd {
    /// Builds the diagram: validates general position, constructs the
    /// arrangement, and codes every particle from its sign vector.
    /// Particles are ordered cells, then edges, then vertices, each in
    /// arrangement index order.
    pub fn build(gs: GeneratorSet) -> Result<FullOacd, BuildError> {
        let arr = build_arrangement(&gs)?;
        let n = arr.n;
        let mut particles =
            Vec::with_capacity(arr.faces.len() + arr.edges.len() + arr.vertices.len());
        for f in 0..arr.faces.len() {
            particles.push(Particle {
                kind: ParticleKind::Cell,
                code: code_from_signs(&arr.face_sv[f], &arr.pairs, n),
                geom: Some(GeomRef::Cell(f)),
            });
        }
        for e in 0..arr.edges.len() {
            particles.push(Particle {
                kind: ParticleKind::Edge,
                code: code_from_signs(&arr.edge_sv[e], &arr.pairs, n),
                geom: Some(GeomRef::Edge(e)),
            });
        }
        for v in 0..arr.vertices.len() {
            let kind = match arr.vertices[v].kind {
                crate::arrangement::VertexKind::TwoI => ParticleKind::Vertex2I,
                crate::arrangement::VertexKind::ThreeI => ParticleKind::Vertex3I,
            };
            particles.push(Particle {
                kind,
                code: code_from_signs(&arr.vertex_sv[v], &arr.pairs, n),
                geom: Some(GeomRef::Vertex(v)),
            });
        }
        let mut code_index = HashMap::with_capacity(particles.len());
        for (i, p) in particles.iter().enumerate() {
            debug_assert_eq!(
                classify_kind(&p.code),
                Some(p.kind),
                "code pattern must match the particle kind for {}",
                p.code
            );
            let prev = code_index.insert(p.code.clone(), i);
            assert!(
                prev.is_none(),
                "two particles share the code {} — the coding is broken",
                p.code
            );
        }
        Ok(FullOacd {
            gs,
            arr,
            particles,
            code_index,
        })
    }

    pub fn n(&self) -> usize {
        self.arr.n
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gs
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arr
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    /// The particle index backing a geometry reference (particles are laid
    /// out cells, then edges, then vertices).
    pub fn index_of(&self, g: GeomRef) -> usize {
        match g {
            GeomRef::Cell(f) => f,
            GeomRef::Edge(e) => self.arr.faces.len() + e,
            GeomRef::Vertex(v) => self.arr.faces.len() + self.arr.edges.len() + v,
        }
    }

    pub fn code_of(&self, g: GeomRef) -> &ChromaticCode {
        &self.particles[self.index_of(g)].code
    }

    pub fn find(&self, code: &ChromaticCode) -> Option<&Particle> {
        self.code_index.get(code).map(|&i| &self.particles[i])
    }

    /// Whether the code names a particle actually present in this diagram.
    pub fn is_realized(&self, code: &ChromaticCode) -> bool {
        self.code_index.contains_key(code)
    }

    pub fn counts(&self) -> ParticleCounts {
        let mut c = ParticleCounts {
            cells: 0,
            edges: 0,
            vertices_2i: 0,
            vertices_3i: 0,
        };
        for p in &self.particles {
            match p.kind {
                ParticleKind::Cell => c.cells += 1,
                ParticleKind::Edge => c.edges += 1,
                ParticleKind::Vertex2I => c.vertices_2i += 1,
                ParticleKind::Vertex3I => c.vertices_3i += 1,
            }
        }
        c
    }

    pub fn codes_of_kind(&self, kind: ParticleKind) -> Vec<&ChromaticCode> {
        self.particles
            .iter()
            .filter(|p| p.kind == kind)
            .map(|p| &p.code)
            .collect()
    }

    /// An exact interior point of the particle named by the code, if the
    /// code is realized here.
    pub fn representative_point(&self, code: &ChromaticCode) -> Option<Point2> {
        let p = self.find(code)?;
        p.geom.map(|g| self.arr.representative_point(g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chroma::parse_code;
    use crate::exact::GeneratorSet;

    #[test]
    fn expected_counts_match_known_values() {
        let c2 = ParticleCounts::expected(2);
        assert_eq!((c2.cells, c2.edges, c2.vertices_2i, c2.vertices_3i), (2, 1, 0, 0));
        let c3 = ParticleCounts::expected(3);
        assert_eq!((c3.cells, c3.edges, c3.vertices_2i, c3.vertices_3i), (6, 6, 0, 1));
        let c4 = ParticleCounts::expected(4);
        assert_eq!(
            (c4.cells, c4.edges, c4.vertices_2i, c4.vertices_3i),
            (18, 24, 3, 4)
        );
        for n in 2..=9 {
            assert_eq!(ParticleCounts::expected(n).euler(), 1, "Euler fails at n={n}");
        }
    }

    #[test]
    fn triangle_diagram_realizes_the_exact_inventory() {
        let gs = GeneratorSet::from_ints(&[(0, 0), (4, 0), (0, 4)]).unwrap();
        let d = FullOacd::build(gs).unwrap();
        assert_eq!(d.counts(), ParticleCounts::expected(3));
        let center = parse_code("222").unwrap();
        assert!(d.is_realized(&center));
        let cells: Vec<String> = d
            .codes_of_kind(ParticleKind::Cell)
            .iter()
            .map(|c| c.to_string())
            .collect();
        for perm in ["024", "042", "204", "240", "402", "420"] {
            assert!(cells.contains(&perm.to_string()), "missing cell {perm}");
        }
        let rep = d.representative_point(&center).unwrap();
        assert_eq!(rep, Point2::from_ints(2, 2));
        assert!(d.find(&parse_code("114").unwrap()).is_some());
        assert!(d.find(&parse_code("1146").unwrap()).is_none());
    }

    #[test]
    fn two_generator_diagram_has_three_particles() {
        let gs = GeneratorSet::from_ints(&[(0, 0), (2, 2)]).unwrap();
        let d = FullOacd::build(gs).unwrap();
        assert_eq!(d.counts(), ParticleCounts::expected(2));
        let all: Vec<String> = d.particles().iter().map(|p| p.code.to_string()).collect();
        assert_eq!(all.len(), 3);
        for c in ["20", "02", "11"] {
            assert!(all.contains(&c.to_string()), "missing particle {c}");
        }
    }
}
