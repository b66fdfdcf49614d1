//! Finite simple digraphs with labelled vertices.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigraphError {
    #[error("a digraph needs at least one vertex")]
    Empty,
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(usize, usize),
    #[error("invalid digraph JSON: {0}")]
    Json(String),
}

/// Vertices are `0..vertex_count`; arcs join distinct vertices and are
/// stored once each, with sorted adjacency lists alongside the arc set.
#[derive(Debug, Clone)]
pub struct Digraph {
    labels: Vec<String>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    arcs: HashSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct DigraphJson {
    vertices: Vec<String>,
    arcs: Vec<[usize; 2]>,
}

/// Why a vertex map fails to be an isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoWitness {
    SizeMismatch,
    NotBijective { image: usize },
    OutOfRange { vertex: usize },
    /// `(u, v)` is an arc on exactly one side of the map.
    Arc { from: usize, to: usize, in_source: bool },
}

impl Digraph {
    pub fn new(
        labels: Vec<String>,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, DigraphError> {
        let n = labels.len();
        if n == 0 {
            return Err(DigraphError::Empty);
        }
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut set = HashSet::new();
        for (u, v) in arcs {
            for x in [u, v] {
                if x >= n {
                    return Err(DigraphError::VertexOutOfRange(x));
                }
            }
            if u == v {
                return Err(DigraphError::Loop(u));
            }
            if !set.insert((u, v)) {
                return Err(DigraphError::DuplicateArc(u, v));
            }
            out[u].push(v);
            inn[v].push(u);
        }
        for list in out.iter_mut().chain(inn.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Self {
            labels,
            out,
            inn,
            arcs: set,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.arcs.contains(&(u, v))
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
            .collect()
    }

    fn check(&self, v: usize) -> Result<(), DigraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(DigraphError::VertexOutOfRange(v))
        }
    }

    pub fn out_neighbors(&self, v: usize) -> Result<&[usize], DigraphError> {
        self.check(v)?;
        Ok(&self.out[v])
    }

    pub fn in_neighbors(&self, v: usize) -> Result<&[usize], DigraphError> {
        self.check(v)?;
        Ok(&self.inn[v])
    }

    pub fn is_k_valent(&self, k: usize) -> bool {
        self.out.iter().all(|o| o.len() == k) && self.inn.iter().all(|i| i.len() == k)
    }

    fn reach_all(&self, adjacency: &[Vec<usize>]) -> bool {
        let mut seen = vec![false; self.vertex_count()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.vertex_count()
    }

    /// Forward and backward reachability from vertex 0.
    pub fn is_strongly_connected(&self) -> bool {
        self.reach_all(&self.out) && self.reach_all(&self.inn)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for l in &self.labels {
            let _ = writeln!(s, "  {};", quote(l));
        }
        for (u, v) in self.arcs() {
            let _ = writeln!(s, "  {} -> {};", quote(&self.labels[u]), quote(&self.labels[v]));
        }
        s.push_str("}\n");
        s
    }

    /// `{"vertices": [...], "arcs": [[u,v],...]}` with sorted arcs, newline-terminated.
    pub fn to_json(&self) -> String {
        let doc = DigraphJson {
            vertices: self.labels.clone(),
            arcs: self.arcs().into_iter().map(|(u, v)| [u, v]).collect(),
        };
        let mut s = serde_json::to_string(&doc).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, DigraphError> {
        let doc: DigraphJson = serde_json::from_str(text).map_err(|e| DigraphError::Json(e.to_string()))?;
        Self::new(doc.vertices, doc.arcs.into_iter().map(|[u, v]| (u, v)))
    }
}

fn quote(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Checks that `map` (indexed by `source` vertices) is a bijection onto
/// `target` carrying arcs to arcs and non-arcs to non-arcs.
pub fn isomorphism_witness(source: &Digraph, target: &Digraph, map: &[usize]) -> Option<IsoWitness> {
    let n = source.vertex_count();
    if map.len() != n || target.vertex_count() != n {
        return Some(IsoWitness::SizeMismatch);
    }
    let mut hit = vec![false; n];
    for (v, &img) in map.iter().enumerate() {
        if img >= n {
            return Some(IsoWitness::OutOfRange { vertex: v });
        }
        if std::mem::replace(&mut hit[img], true) {
            return Some(IsoWitness::NotBijective { image: img });
        }
    }
    for (u, v) in source.arcs() {
        if !target.has_arc(map[u], map[v]) {
            return Some(IsoWitness::Arc {
                from: u,
                to: v,
                in_source: true,
            });
        }
    }
    // Bijective and arc-preserving; equal arc counts rule out extra target arcs.
    if source.arc_count() != target.arc_count() {
        let mut inverse = vec![0; n];
        for (v, &img) in map.iter().enumerate() {
            inverse[img] = v;
        }
        let (a, b) = target
            .arcs()
            .into_iter()
            .find(|&(a, b)| !source.has_arc(inverse[a], inverse[b]))
            .expect("target has an unmatched arc");
        return Some(IsoWitness::Arc {
            from: inverse[a],
            to: inverse[b],
            in_source: false,
        });
    }
    None
}

pub fn verify_isomorphism(source: &Digraph, target: &Digraph, map: &[usize]) -> bool {
    isomorphism_witness(source, target, map).is_none()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn numbered(n: usize, arcs: &[(usize, usize)]) -> Digraph {
        Digraph::new((0..n).map(|i| i.to_string()).collect(), arcs.iter().copied()).unwrap()
    }

    pub(crate) fn cycle(n: usize) -> Digraph {
        numbered(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    /// Circulant built straight from the arc rule `y - x ∈ S`.
    fn circulant(n: usize, steps: &[usize]) -> Digraph {
        let mut arcs = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if steps.contains(&((y + n - x) % n)) {
                    arcs.push((x, y));
                }
            }
        }
        numbered(n, &arcs)
    }

    #[test]
    fn neighbor_examples() {
        let c3 = cycle(3);
        assert_eq!(c3.out_neighbors(0).unwrap(), [1]);
        assert_eq!(c3.in_neighbors(0).unwrap(), [2]);
        let cay = circulant(6, &[1, 2]);
        assert_eq!(cay.out_neighbors(0).unwrap(), [1, 2]);
        assert_eq!(cay.in_neighbors(0).unwrap(), [4, 5]);
        let single = numbered(2, &[(0, 1)]);
        assert!(single.out_neighbors(1).unwrap().is_empty());
        assert!(single.in_neighbors(0).unwrap().is_empty());
        assert_eq!(single.out_neighbors(2), Err(DigraphError::VertexOutOfRange(2)));
    }

    #[test]
    fn valency_examples() {
        assert!(cycle(7).is_k_valent(1));
        assert!(circulant(6, &[1, 2]).is_k_valent(2));
        assert!(!numbered(3, &[(0, 1), (1, 2)]).is_k_valent(1));
    }

    #[test]
    fn strong_connectivity_examples() {
        assert!(cycle(5).is_strongly_connected());
        let two = numbered(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        assert!(!two.is_strongly_connected());
        assert!(circulant(6, &[1, 4]).is_strongly_connected());
        assert!(!numbered(3, &[(0, 1), (1, 2)]).is_strongly_connected());
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert_eq!(Digraph::new(vec!["a".into()], [(0, 0)]).unwrap_err(), DigraphError::Loop(0));
        assert_eq!(
            Digraph::new(vec!["a".into(), "b".into()], [(0, 1), (0, 1)]).unwrap_err(),
            DigraphError::DuplicateArc(0, 1)
        );
        assert_eq!(Digraph::new(vec![], []).unwrap_err(), DigraphError::Empty);
        for v in 0..5 {
            assert_eq!(Digraph::new(vec![String::new(); 5], [(v, v)]).unwrap_err(), DigraphError::Loop(v));
        }
    }

    #[test]
    fn isomorphism_examples() {
        let c3 = cycle(3);
        assert!(verify_isomorphism(&c3, &c3, &[0, 1, 2]));
        assert!(verify_isomorphism(&c3, &c3, &[1, 2, 0]));
        assert_eq!(
            isomorphism_witness(&c3, &c3, &[0, 2, 1]),
            Some(IsoWitness::Arc {
                from: 0,
                to: 1,
                in_source: true
            })
        );
        assert_eq!(
            isomorphism_witness(&c3, &c3, &[0, 0, 1]),
            Some(IsoWitness::NotBijective { image: 0 })
        );
        let path = numbered(3, &[(0, 1), (1, 2)]);
        assert!(matches!(
            isomorphism_witness(&path, &c3, &[0, 1, 2]),
            Some(IsoWitness::Arc { in_source: false, .. })
        ));
    }

    #[test]
    fn json_and_dot_exports() {
        let d = Digraph::new(vec!["(0)".into(), "(1)".into(), "(2)".into()], [(2, 0), (0, 1), (1, 2)]).unwrap();
        assert_eq!(
            d.to_json(),
            "{\"vertices\":[\"(0)\",\"(1)\",\"(2)\"],\"arcs\":[[0,1],[1,2],[2,0]]}\n"
        );
        let back = Digraph::from_json(&d.to_json()).unwrap();
        assert_eq!(back.arcs(), d.arcs());
        assert_eq!(back.labels(), d.labels());
        let dot = d.to_dot();
        assert!(dot.starts_with("digraph G {\n"));
        assert!(dot.contains("  \"(2)\" -> \"(0)\";\n"));
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 3);
        assert!(matches!(Digraph::from_json("{\"vertices\":[]}"), Err(DigraphError::Json(_))));
        assert_eq!(
            Digraph::from_json("{\"vertices\":[\"a\"],\"arcs\":[[0,3]]}").unwrap_err(),
            DigraphError::VertexOutOfRange(3)
        );
    }
}
