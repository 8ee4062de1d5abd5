use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{ComplexError, ComplexIndex, Dir, SphereComplex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub euler_characteristic: i64,
    pub euler: bool,
    pub connected: bool,
    pub edge_pairing: bool,
    pub vertex_links: bool,
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.euler && self.connected && self.edge_pairing && self.vertex_links
    }
}

/// Checks that the complex is a cell subdivision of the sphere. Unknown or
/// duplicate identifiers are errors; topological failures are report entries.
pub fn validate_sphere(complex: &SphereComplex) -> Result<ValidationReport, ComplexError> {
    let index = complex.index()?;
    let mut problems = Vec::new();
    let chi = complex.vertices.len() as i64 - complex.edges.len() as i64 + complex.faces.len() as i64;
    if chi != 2 {
        problems.push(format!("Euler characteristic is {chi}"));
    }
    let connected = is_connected(complex, &index);
    if !connected {
        problems.push("1-skeleton is disconnected".to_string());
    }
    let edge_pairing = check_pairing(complex, &index, &mut problems);
    let vertex_links = edge_pairing && check_links(complex, &index, &mut problems);
    Ok(ValidationReport { euler_characteristic: chi, euler: chi == 2, connected, edge_pairing, vertex_links, problems })
}

fn is_connected(complex: &SphereComplex, index: &ComplexIndex) -> bool {
    let n = complex.vertices.len();
    if n == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in &complex.edges {
        let (a, b) = (find(&mut parent, index.vertex[&e.tail]), find(&mut parent, index.vertex[&e.head]));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|v| find(&mut parent, v) == root)
}

fn check_pairing(complex: &SphereComplex, index: &ComplexIndex, problems: &mut Vec<String>) -> bool {
    let before = problems.len();
    for (e, occ) in complex.edges.iter().zip(&index.occurrences) {
        let dirs: Vec<Dir> = occ.iter().map(|&(f, s)| complex.faces[f].boundary[s].dir).collect();
        if dirs.len() != 2 || dirs[0] == dirs[1] {
            problems.push(format!("edge '{}' is not used once in each direction", e.id));
        }
    }
    for f in &complex.faces {
        if f.boundary.is_empty() {
            problems.push(format!("face '{}' has an empty boundary", f.id));
            continue;
        }
        let n = f.len();
        for i in 0..n {
            let (_, arrive) = complex.step_ends(&f.boundary[i]).expect("edges resolved");
            let (depart, _) = complex.step_ends(&f.boundary[(i + 1) % n]).expect("edges resolved");
            if arrive != depart {
                problems.push(format!("face '{}' boundary is not a closed walk at step {i}", f.id));
            }
            if f.corners[i].vertex != arrive {
                problems.push(format!("corner {i} of face '{}' is not at vertex '{arrive}'", f.id));
            }
        }
    }
    problems.len() == before
}

fn check_links(complex: &SphereComplex, index: &ComplexIndex, problems: &mut Vec<String>) -> bool {
    let before = problems.len();
    let mut by_vertex: HashMap<&str, BTreeSet<(usize, usize)>> = HashMap::new();
    for c in complex.corners() {
        by_vertex.entry(complex.faces[c.0].corners[c.1].vertex.as_str()).or_default().insert(c);
    }
    for v in &complex.vertices {
        let Some(corners) = by_vertex.get(v.as_str()) else {
            if complex.vertices.len() > 1 || !complex.edges.is_empty() {
                problems.push(format!("vertex '{v}' has no corners"));
            }
            continue;
        };
        let cycle = complex.vertex_corners(index, v);
        let visited: BTreeSet<_> = cycle.iter().copied().collect();
        if visited.len() != cycle.len() || &visited != corners {
            problems.push(format!("link of vertex '{v}' is not a single cycle"));
        }
    }
    problems.len() == before
}

#[cfg(test)]
mod tests {
    use super::super::ComplexBuilder;
    use super::*;

    fn tetrahedron() -> ComplexBuilder {
        ComplexBuilder::new()
            .vertex("0")
            .vertex("1")
            .vertex("2")
            .vertex("3")
            .edge("01", "0", "1")
            .edge("02", "0", "2")
            .edge("03", "0", "3")
            .edge("12", "1", "2")
            .edge("13", "1", "3")
            .edge("23", "2", "3")
            .face("a", None, &[("02", '+', None), ("12", '-', None), ("01", '-', None)])
            .face("b", None, &[("01", '+', None), ("13", '+', None), ("03", '-', None)])
            .face("c", None, &[("03", '+', None), ("23", '-', None), ("02", '-', None)])
    }

    #[test]
    fn tetrahedron_passes_and_missing_face_fails() {
        let full = tetrahedron()
            .face("d", None, &[("12", '+', None), ("23", '+', None), ("13", '-', None)])
            .build("a", "0")
            .unwrap();
        let report = validate_sphere(&full).unwrap();
        assert!(report.passed(), "{report:?}");
        let partial = tetrahedron().build("a", "0").unwrap();
        let report = validate_sphere(&partial).unwrap();
        assert_eq!(report.euler_characteristic, 1);
        assert!(!report.passed());
        assert!(!report.edge_pairing);
    }

    #[test]
    fn pinched_vertex_fails_link_check() {
        // Two one-loop spheres wedged at v: the link at v splits into two cycles.
        let k = ComplexBuilder::new()
            .vertex("v")
            .edge("x", "v", "v")
            .edge("y", "v", "v")
            .face("f1", None, &[("x", '+', None)])
            .face("f2", None, &[("x", '-', None)])
            .face("f3", None, &[("y", '+', None)])
            .face("f4", None, &[("y", '-', None)])
            .build("f1", "v")
            .unwrap();
        let report = validate_sphere(&k).unwrap();
        assert!(report.edge_pairing && report.connected);
        assert!(!report.vertex_links);
        assert_eq!(report.euler_characteristic, 3);
    }
}
