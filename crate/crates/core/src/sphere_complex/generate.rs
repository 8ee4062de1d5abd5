use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Corner, Dir, Distinguished, Edge, Face, FaceType, SphereComplex, Step};

/// A random sphere subdivision built from the one-loop sphere by face splits
/// and edge subdivisions. The loop bounds `e_infinity`, which is never
/// modified, and the first move makes the face across the loop strictly
/// larger than it. Corners are unlabelled and face types unset.
pub fn generate_random(seed: u64, size: usize) -> SphereComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Growing::one_loop();
    g.split_face(1, 0, 0);
    for _ in 0..size.max(1) * 3 {
        if rng.gen_bool(0.4) {
            let e = rng.gen_range(1..g.edges.len());
            g.subdivide_edge(e);
        } else {
            let f = rng.gen_range(1..g.faces.len());
            let n = g.faces[f].boundary.len();
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            g.split_face(f, i.min(j), i.max(j));
        }
    }
    g.finish()
}

struct Growing {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    faces: Vec<GrowingFace>,
}

#[derive(Clone)]
struct GrowingFace {
    /// `(edge, dir)` steps; corner `k` sits where step `k` arrives.
    boundary: Vec<(usize, Dir)>,
}

impl Growing {
    fn one_loop() -> Self {
        Growing {
            vertex_count: 1,
            edges: vec![(0, 0)],
            faces: vec![
                GrowingFace { boundary: vec![(0, Dir::With)] },
                GrowingFace { boundary: vec![(0, Dir::Against)] },
            ],
        }
    }

    fn arrival(&self, (e, d): (usize, Dir)) -> usize {
        let (tail, head) = self.edges[e];
        if d == Dir::With {
            head
        } else {
            tail
        }
    }

    /// Inserts a new vertex in the middle of edge `e`.
    fn subdivide_edge(&mut self, e: usize) {
        let v = self.vertex_count;
        self.vertex_count += 1;
        let (tail, head) = self.edges[e];
        let new_edge = self.edges.len();
        self.edges[e] = (tail, v);
        self.edges.push((v, head));
        for f in &mut self.faces {
            let mut steps = Vec::with_capacity(f.boundary.len() + 1);
            for &(edge, dir) in &f.boundary {
                if edge != e {
                    steps.push((edge, dir));
                } else if dir == Dir::With {
                    steps.extend([(e, Dir::With), (new_edge, Dir::With)]);
                } else {
                    steps.extend([(new_edge, Dir::Against), (e, Dir::Against)]);
                }
            }
            f.boundary = steps;
        }
    }

    /// Adds an edge from the vertex of corner `i` to that of corner `j`
    /// (`i <= j`) across face `f`.
    fn split_face(&mut self, f: usize, i: usize, j: usize) {
        let steps = self.faces[f].boundary.clone();
        let n = steps.len();
        let (vi, vj) = (self.arrival(steps[i]), self.arrival(steps[j]));
        let e = self.edges.len();
        self.edges.push((vi, vj));
        let inner: Vec<_> = steps[i + 1..=j].iter().copied().chain([(e, Dir::Against)]).collect();
        let outer: Vec<_> = (j + 1..j + 1 + (n - (j - i))).map(|k| steps[k % n]).chain([(e, Dir::With)]).collect();
        self.faces[f].boundary = outer;
        self.faces.push(GrowingFace { boundary: inner });
    }

    fn finish(self) -> SphereComplex {
        let vid = |v: usize| format!("v{v}");
        let eid = |e: usize| format!("e{e}");
        let faces = self
            .faces
            .iter()
            .enumerate()
            .map(|(k, f)| Face {
                id: if k == 0 { "inf".to_string() } else { format!("f{k}") },
                face_type: (k == 0).then_some(FaceType::Infinity),
                boundary: f.boundary.iter().map(|&(e, dir)| Step { edge: eid(e), dir }).collect(),
                corners: f.boundary.iter().map(|&s| Corner { vertex: vid(self.arrival(s)), label: None }).collect(),
            })
            .collect();
        SphereComplex {
            vertices: (0..self.vertex_count).map(vid).collect(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(k, &(t, h))| Edge { id: eid(k), tail: vid(t), head: vid(h) })
                .collect(),
            faces,
            distinguished: Distinguished { e_infinity: "inf".to_string(), v0: vid(0) },
        }
    }
}
