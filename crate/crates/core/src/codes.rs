//! Perfect codes: verification, exhaustive enumeration by exact-cover
//! backtracking, the two-generator family `⋃ D(i)` and the structural
//! lemma checks for codes of 2-valent Cayley digraphs.
//!
//! A perfect code is a vertex set whose closed out-neighbourhoods
//! `N⁺[c] = {c} ∪ N⁺(c)` partition the vertex set, so enumeration is an
//! exact-cover search with one candidate set per vertex.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::cayley::{AssignmentParams, CayleyDigraph};
use crate::digraph::Digraph;
use crate::gamma::{check_conditions, GammaParams};
use crate::numth;

pub const DEFAULT_SIZE_CAP: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodesError {
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("digraph has {size} vertices, above the search cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("parameters ({m},{l},{h}) do not admit a code (need 3 | m and 3 | (l - h))")]
    NotAdmitted { m: u64, l: u64, h: u64 },
    #[error("code has not been verified perfect")]
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Unverified,
    Perfect,
    /// First vertex (by index) dominated `dominators` times, `dominators != 1`.
    Failed { witness: usize, dominators: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSet {
    vertices: BTreeSet<usize>,
    verdict: Verdict,
}

#[derive(Serialize)]
struct CodeJson<'a> {
    code: Vec<&'a str>,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a str>,
}

impl CodeSet {
    pub fn new(vertices: BTreeSet<usize>) -> Self {
        Self {
            vertices,
            verdict: Verdict::Unverified,
        }
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn verdict(&self) -> &Verdict {
        &self.verdict
    }

    pub fn is_perfect(&self) -> bool {
        self.verdict == Verdict::Perfect
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `{"code": [labels sorted by vertex index], "verdict": ...}`.
    pub fn to_json_value(&self, d: &Digraph) -> serde_json::Value {
        let (verdict, witness) = match self.verdict {
            Verdict::Unverified => ("unverified", None),
            Verdict::Perfect => ("perfect", None),
            Verdict::Failed { witness, .. } => ("failed", Some(d.label(witness))),
        };
        serde_json::to_value(CodeJson {
            code: self.vertices.iter().map(|&v| d.label(v)).collect(),
            verdict,
            witness,
        })
        .expect("plain data serializes")
    }
}

pub fn verify_code(d: &Digraph, code: &BTreeSet<usize>) -> Result<CodeSet, CodesError> {
    let n = d.vertex_count();
    if let Some(&v) = code.iter().find(|&&v| v >= n) {
        return Err(CodesError::VertexOutOfRange(v));
    }
    let mut hits = vec![0usize; n];
    for &c in code {
        hits[c] += 1;
        for &w in d.out_neighbors(c).expect("in range") {
            hits[w] += 1;
        }
    }
    let verdict = match hits.iter().position(|&k| k != 1) {
        None => Verdict::Perfect,
        Some(witness) => Verdict::Failed {
            witness,
            dominators: hits[witness],
        },
    };
    Ok(CodeSet {
        vertices: code.clone(),
        verdict,
    })
}

/// Closed out-neighbourhoods as exact-cover candidates.
#[derive(Debug, Clone)]
pub struct CoverInstance {
    /// `candidates[u] = N⁺[u]`, sorted.
    pub candidates: Vec<Vec<usize>>,
    /// `dominators[v] = {u : v ∈ N⁺[u]} = N⁻[v]`, sorted.
    pub dominators: Vec<Vec<usize>>,
}

impl CoverInstance {
    pub fn new(d: &Digraph) -> Self {
        let closed = |v: usize, nb: &[usize]| {
            let mut set: Vec<usize> = std::iter::once(v).chain(nb.iter().copied()).collect();
            set.sort_unstable();
            set
        };
        let n = d.vertex_count();
        Self {
            candidates: (0..n).map(|v| closed(v, d.out_neighbors(v).expect("in range"))).collect(),
            dominators: (0..n).map(|v| closed(v, d.in_neighbors(v).expect("in range"))).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub size_cap: usize,
    /// Stop at the first code found.
    pub first_only: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            size_cap: DEFAULT_SIZE_CAP,
            first_only: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Verified codes in lexicographic order of their sorted vertex lists.
    pub codes: Vec<CodeSet>,
    /// Search-tree nodes visited.
    pub nodes: u64,
}

struct Search<'a> {
    inst: &'a CoverInstance,
    covered: Vec<bool>,
    chosen: Vec<usize>,
    found: Vec<Vec<usize>>,
    nodes: u64,
    first_only: bool,
}

impl Search<'_> {
    fn available(&self, u: usize) -> bool {
        self.inst.candidates[u].iter().all(|&w| !self.covered[w])
    }

    fn set(&mut self, u: usize, value: bool) {
        for &w in &self.inst.candidates[u] {
            self.covered[w] = value;
        }
    }

    fn done(&self) -> bool {
        self.first_only && !self.found.is_empty()
    }

    fn run(&mut self) {
        self.nodes += 1;
        // Uncovered vertex with the fewest dominators still available.
        let mut best: Option<(usize, usize)> = None;
        for v in 0..self.covered.len() {
            if self.covered[v] {
                continue;
            }
            let count = self.inst.dominators[v].iter().filter(|&&u| self.available(u)).count();
            if best.is_none_or(|(_, c)| count < c) {
                best = Some((v, count));
                if count == 0 {
                    return;
                }
            }
        }
        let Some((v, _)) = best else {
            self.found.push(self.chosen.clone());
            return;
        };
        for i in 0..self.inst.dominators[v].len() {
            let u = self.inst.dominators[v][i];
            if !self.available(u) {
                continue;
            }
            self.choose(u);
            if self.done() {
                return;
            }
        }
    }

    fn choose(&mut self, u: usize) {
        self.set(u, true);
        self.chosen.push(u);
        self.run();
        self.chosen.pop();
        self.set(u, false);
    }
}

/// All perfect codes of `d`, optionally only those containing `required`.
pub fn enumerate_codes(
    d: &Digraph,
    required: Option<usize>,
    opts: SearchOptions,
) -> Result<Enumeration, CodesError> {
    let n = d.vertex_count();
    if n > opts.size_cap {
        return Err(CodesError::TooLarge {
            size: n,
            cap: opts.size_cap,
        });
    }
    if let Some(r) = required.filter(|&r| r >= n) {
        return Err(CodesError::VertexOutOfRange(r));
    }
    let inst = CoverInstance::new(d);
    let mut search = Search {
        inst: &inst,
        covered: vec![false; n],
        chosen: Vec::new(),
        found: Vec::new(),
        nodes: 0,
        first_only: opts.first_only,
    };
    match required {
        Some(r) => search.choose(r),
        None => search.run(),
    }
    let mut sets: Vec<Vec<usize>> = search
        .found
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    sets.sort();
    let codes = sets
        .into_iter()
        .map(|c| verify_code(d, &c.into_iter().collect()).expect("in range"))
        .collect();
    Ok(Enumeration {
        codes,
        nodes: search.nodes,
    })
}

/// `⋃_{i ∈ [gcd(l−h, m)/3]} D(i)` with `D(i) = {(3i + r)·s + r·s′ : r ∈ Z}`,
/// taking `r` over `[m·l]` and verifying the result on the host digraph.
pub fn thm2_family(c: &CayleyDigraph, p: &AssignmentParams) -> Result<CodeSet, CodesError> {
    let gp = GammaParams::new(p.m, p.l, p.h).expect("extracted parameters are in range");
    if !check_conditions(gp).admits_code {
        return Err(CodesError::NotAdmitted { m: p.m, l: p.l, h: p.h });
    }
    let b = numth::gcd(p.l as i64 - p.h as i64, p.m as i64);
    let period = (p.m * p.l) as i64;
    let mut set = BTreeSet::new();
    for i in 0..b / 3 {
        for r in 0..period {
            set.insert(c.vertex_of(&c.xcoord_for(&p.assignment, 3 * i + r, r)));
        }
    }
    verify_code(c.digraph(), &set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    /// Neither generator is an involution.
    pub no_involution: bool,
    /// The code is closed under adding `s + s′`.
    pub diagonal_closed: bool,
    /// `g + s, g + 2s, g + s′, g + 2s′ ∉ C` and `g + 3s, g + 3s′ ∈ C` for `g ∈ C`.
    pub spacing: bool,
    /// `3 | (l − h)` for the parameters of both assignments.
    pub three_divides_lh: bool,
}

impl LemmaReport {
    pub fn all(&self) -> bool {
        self.no_involution && self.diagonal_closed && self.spacing && self.three_divides_lh
    }

    pub fn and(self, other: Self) -> Self {
        Self {
            no_involution: self.no_involution && other.no_involution,
            diagonal_closed: self.diagonal_closed && other.diagonal_closed,
            spacing: self.spacing && other.spacing,
            three_divides_lh: self.three_divides_lh && other.three_divides_lh,
        }
    }
}

pub fn check_lemmas(c: &CayleyDigraph, code: &CodeSet) -> Result<LemmaReport, CodesError> {
    if !code.is_perfect() {
        return Err(CodesError::Unverified);
    }
    let g = c.group();
    let (s, t) = (&c.gens().s, &c.gens().s_prime);
    let no_involution = g.element_order(s).expect("member") != 2 && g.element_order(t).expect("member") != 2;

    let member = |x: &crate::abelian::GroupElement, i: i64, j: i64| {
        let y = g.add(x, &c.xcoord(i, j)).expect("member");
        code.contains(c.vertex_of(&y))
    };
    let mut diagonal_closed = true;
    let mut spacing = true;
    for &v in code.vertices() {
        let x = c.element_of(v);
        diagonal_closed &= member(&x, 1, 1);
        spacing &= [(1, 0), (2, 0), (0, 1), (0, 2)].iter().all(|&(i, j)| !member(&x, i, j));
        spacing &= member(&x, 3, 0) && member(&x, 0, 3);
    }
    let three_divides_lh = c.assignments().iter().all(|a| {
        let p = c.extract_params(a).expect("own assignment");
        (p.l as i64 - p.h as i64) % 3 == 0
    });
    Ok(LemmaReport {
        no_involution,
        diagonal_closed,
        spacing,
        three_divides_lh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{enumerate_genpairs, enumerate_groups, AbelianGroup};
    use crate::cayley::build_cayley;
    use crate::digraph::tests::{cycle, numbered};

    fn cay(group: &str, gens: &str) -> CayleyDigraph {
        let g: AbelianGroup = group.parse().unwrap();
        build_cayley(&g, &g.parse_genpair(gens).unwrap()).unwrap()
    }

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    /// Every vertex subset, checked against the definition.
    fn brute_force_codes(d: &Digraph) -> Vec<Vec<usize>> {
        let n = d.vertex_count();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let perfect = (0..n).all(|v| {
                members
                    .iter()
                    .filter(|&&c| c == v || d.has_arc(c, v))
                    .count()
                    == 1
            });
            if perfect {
                out.push(members);
            }
        }
        out.sort();
        out
    }

    fn code_lists(e: &Enumeration) -> Vec<Vec<usize>> {
        e.codes.iter().map(|c| c.vertices().iter().copied().collect()).collect()
    }

    #[test]
    fn verify_examples() {
        let d = cay("6", "(1);(2)");
        assert_eq!(verify_code(d.digraph(), &set(&[0, 3])).unwrap().verdict(), &Verdict::Perfect);
        assert_eq!(
            verify_code(d.digraph(), &set(&[0, 2])).unwrap().verdict(),
            &Verdict::Failed {
                witness: 2,
                dominators: 2
            }
        );
        let all = set(&[0, 1, 2, 3, 4, 5]);
        assert!(!verify_code(d.digraph(), &all).unwrap().is_perfect());
        let empty = numbered(3, &[]);
        assert!(verify_code(&empty, &set(&[0, 1, 2])).unwrap().is_perfect());
        assert_eq!(
            verify_code(d.digraph(), &set(&[9])),
            Err(CodesError::VertexOutOfRange(9))
        );
    }

    #[test]
    fn enumerate_examples() {
        let all = |group, gens| enumerate_codes(cay(group, gens).digraph(), None, SearchOptions::default()).unwrap();
        let e = all("6", "(1);(2)");
        assert_eq!(code_lists(&e), [vec![0, 3], vec![1, 4], vec![2, 5]]);
        assert!(all("6", "(1);(4)").codes.is_empty());
        assert!(all("6", "(1);(3)").codes.is_empty());
        // Exhaustive check of the 2-subsets behind the negative examples.
        assert!(brute_force_codes(cay("6", "(1);(4)").digraph()).is_empty());
        assert!(brute_force_codes(cay("6", "(1);(3)").digraph()).is_empty());
    }

    #[test]
    fn enumerate_respects_cap_and_filter() {
        let d = cay("6", "(1);(2)");
        let tight = SearchOptions {
            size_cap: 5,
            first_only: false,
        };
        assert_eq!(
            enumerate_codes(d.digraph(), None, tight).unwrap_err(),
            CodesError::TooLarge { size: 6, cap: 5 }
        );
        let e = enumerate_codes(d.digraph(), Some(4), SearchOptions::default()).unwrap();
        assert_eq!(code_lists(&e), [vec![1, 4]]);
        let first = SearchOptions {
            first_only: true,
            ..Default::default()
        };
        assert_eq!(enumerate_codes(d.digraph(), None, first).unwrap().codes.len(), 1);
    }

    #[test]
    fn search_matches_subset_brute_force() {
        for n in 3..=12 {
            for g in enumerate_groups(n).unwrap() {
                for pair in enumerate_genpairs(&g) {
                    let d = build_cayley(&g, &pair).unwrap();
                    let e = enumerate_codes(d.digraph(), None, SearchOptions::default()).unwrap();
                    assert_eq!(code_lists(&e), brute_force_codes(d.digraph()), "{g} {pair}");
                }
            }
        }
        for k in 3..=12 {
            let c = cycle(k);
            let e = enumerate_codes(&c, None, SearchOptions::default()).unwrap();
            assert_eq!(code_lists(&e), brute_force_codes(&c));
        }
    }

    #[test]
    fn oracle_codes_verify_and_translate() {
        for n in 3..=36 {
            for g in enumerate_groups(n).unwrap() {
                for pair in enumerate_genpairs(&g) {
                    let c = build_cayley(&g, &pair).unwrap();
                    let e = enumerate_codes(c.digraph(), None, SearchOptions::default()).unwrap();
                    if n % 3 != 0 {
                        assert!(e.codes.is_empty());
                    }
                    for code in &e.codes {
                        assert!(code.is_perfect());
                        assert_eq!(code.len() * 3, n as usize);
                        for shift in g.elements() {
                            let moved = code
                                .vertices()
                                .iter()
                                .map(|&v| c.vertex_of(&g.add(&c.element_of(v), &shift).unwrap()))
                                .collect();
                            assert!(verify_code(c.digraph(), &moved).unwrap().is_perfect());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn thm2_family_examples() {
        let c = cay("6", "(2);(1)");
        let p = c.extract_params(c.gens()).unwrap();
        let f = thm2_family(&c, &p).unwrap();
        assert_eq!(f.vertices(), &set(&[0, 3]));
        assert!(f.is_perfect());

        let c = cay("9", "(1);(2)");
        let p = c.extract_params(c.gens()).unwrap();
        assert_eq!((p.m, p.l, p.h), (9, 1, 7));
        let f = thm2_family(&c, &p).unwrap();
        assert_eq!(f.vertices(), &set(&[0, 3, 6]));
        assert!(f.is_perfect());
        assert!(f.contains(c.identity_vertex()));

        let c = cay("6", "(1);(4)");
        let p = c.extract_params(c.gens()).unwrap();
        assert!(matches!(thm2_family(&c, &p), Err(CodesError::NotAdmitted { .. })));
    }

    #[test]
    fn lemma_examples() {
        for (group, gens, code) in [("6", "(1);(2)", &[0, 3][..]), ("9", "(1);(2)", &[0, 3, 6][..])] {
            let c = cay(group, gens);
            let verified = verify_code(c.digraph(), &set(code)).unwrap();
            let r = check_lemmas(&c, &verified).unwrap();
            assert!(r.all(), "{group} {gens}: {r:?}");
        }
        let c = cay("6", "(1);(2)");
        assert_eq!(
            check_lemmas(&c, &CodeSet::new(set(&[0, 3]))),
            Err(CodesError::Unverified)
        );
    }

    #[test]
    fn cover_instance_shape() {
        let c = cay("3,6", "(1,1);(0,1)");
        let inst = CoverInstance::new(c.digraph());
        for (v, cand) in inst.candidates.iter().enumerate() {
            assert!(cand.contains(&v));
            assert_eq!(cand.len(), 3);
        }
    }
}
