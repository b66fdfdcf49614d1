//! Cayley digraphs `Cay(G, {s, s′})` on finite abelian groups.
//!
//! Vertex `v` is the group element with mixed-radix index `v`. The
//! two-generator coordinate view writes every element as
//! `x(i, j) = i·s + j·s′`, whose out-neighbours are `x(i+1, j)` and
//! `x(i, j+1)`.

use serde::Serialize;
use thiserror::Error;

use crate::abelian::{AbelianError, AbelianGroup, GenPair, GroupElement};
use crate::digraph::{Digraph, DigraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CayleyError {
    #[error(transparent)]
    Group(#[from] AbelianError),
    #[error(transparent)]
    Digraph(#[from] DigraphError),
    #[error("{0} is not an ordering of the connection set")]
    NotAnAssignment(String),
    #[error("natural map is not a bijection (two coordinates reach vertex {0})")]
    NotBijective(usize),
}

#[derive(Debug, Clone)]
pub struct CayleyDigraph {
    group: AbelianGroup,
    gens: GenPair,
    digraph: Digraph,
}

/// Structural parameters of one assignment `(s, s′)`: `m = o(s)`,
/// `l = min{n ≥ 1 : n·s′ ∈ ⟨s⟩}` and the unique `h ∈ [m]` with
/// `h·s + l·s′ = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssignmentParams {
    pub m: u64,
    pub l: u64,
    pub h: u64,
    #[serde(skip)]
    pub assignment: GenPair,
}

pub fn build_cayley(group: &AbelianGroup, gens: &GenPair) -> Result<CayleyDigraph, CayleyError> {
    let gens = GenPair::new(group, gens.s.clone(), gens.s_prime.clone())?;
    let n = group.order() as usize;
    let labels = group.elements().map(|e| e.to_string()).collect();
    let mut arcs = Vec::with_capacity(2 * n);
    for (v, x) in group.elements().enumerate() {
        for step in [&gens.s, &gens.s_prime] {
            arcs.push((v, group.index_of(&group.add_unchecked(&x, step))));
        }
    }
    let digraph = Digraph::new(labels, arcs)?;
    Ok(CayleyDigraph {
        group: group.clone(),
        gens,
        digraph,
    })
}

impl CayleyDigraph {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn gens(&self) -> &GenPair {
        &self.gens
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn vertex_of(&self, x: &GroupElement) -> usize {
        self.group.index_of(x)
    }

    pub fn element_of(&self, v: usize) -> GroupElement {
        self.group.element_at(v)
    }

    /// `x(i, j) = i·s + j·s′` for this digraph's own assignment.
    pub fn xcoord(&self, i: i64, j: i64) -> GroupElement {
        self.xcoord_for(&self.gens, i, j)
    }

    pub fn xcoord_for(&self, assignment: &GenPair, i: i64, j: i64) -> GroupElement {
        self.group.combine(i, &assignment.s, j, &assignment.s_prime)
    }

    pub fn identity_vertex(&self) -> usize {
        self.vertex_of(&self.group.identity())
    }

    /// The assignment as given and its swap.
    pub fn assignments(&self) -> [GenPair; 2] {
        [self.gens.clone(), self.gens.swapped()]
    }

    fn check_assignment(&self, a: &GenPair) -> Result<(), CayleyError> {
        if *a == self.gens || *a == self.gens.swapped() {
            Ok(())
        } else {
            Err(CayleyError::NotAnAssignment(a.to_string()))
        }
    }

    pub fn extract_params(&self, assignment: &GenPair) -> Result<AssignmentParams, CayleyError> {
        self.check_assignment(assignment)?;
        let g = &self.group;
        let (s, t) = (&assignment.s, &assignment.s_prime);
        let m = g.element_order(s)?;
        let l = g.min_multiple_in_cyclic(s, t)?;
        let target = g.neg(&g.scalar_mul(l as i64, t)?)?;
        let h = (0..m)
            .find(|&h| g.scalar_mul_unchecked(h as i64, s) == target)
            .expect("l·s′ lies in ⟨s⟩");
        Ok(AssignmentParams {
            m,
            l,
            h,
            assignment: assignment.clone(),
        })
    }

    /// `(a, b) ↦ a·s + b·s′` for `(a, b) ∈ Z_m × [l]`, as a vector indexed
    /// by `a·l + b` (the vertex numbering of `Γ_{m,l,h}`).
    pub fn natural_map(&self, p: &AssignmentParams) -> Result<Vec<usize>, CayleyError> {
        self.check_assignment(&p.assignment)?;
        let n = self.digraph.vertex_count();
        let mut hit = vec![false; n];
        let mut map = Vec::with_capacity((p.m * p.l) as usize);
        for a in 0..p.m as i64 {
            for b in 0..p.l as i64 {
                let v = self.vertex_of(&self.xcoord_for(&p.assignment, a, b));
                if std::mem::replace(&mut hit[v], true) {
                    return Err(CayleyError::NotBijective(v));
                }
                map.push(v);
            }
        }
        if map.len() != n {
            let missing = hit.iter().position(|h| !h).unwrap_or(n);
            return Err(CayleyError::NotBijective(missing));
        }
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{enumerate_genpairs, enumerate_groups};
    use crate::digraph::verify_isomorphism;
    use crate::gamma::{build_gamma, GammaParams};
    use proptest::prelude::*;

    fn cay(group: &str, gens: &str) -> CayleyDigraph {
        let g: AbelianGroup = group.parse().unwrap();
        let p = g.parse_genpair(gens).unwrap();
        build_cayley(&g, &p).unwrap()
    }

    fn triple(p: &AssignmentParams) -> (u64, u64, u64) {
        (p.m, p.l, p.h)
    }

    #[test]
    fn build_examples() {
        let c = cay("3", "(1);(2)");
        // Arc rule y - x ∈ S over all ordered pairs of Z₃.
        let mut want = Vec::new();
        for x in 0..3usize {
            for y in 0..3usize {
                if [1, 2].contains(&((y + 3 - x) % 3)) {
                    want.push((x, y));
                }
            }
        }
        assert_eq!(c.digraph().arcs(), want);

        let c6 = cay("6", "(1);(2)");
        assert_eq!(c6.digraph().arc_count(), 12);
        assert!(c6.digraph().is_k_valent(2));

        let v4 = cay("2,2", "(0,1);(1,1)");
        assert_eq!(v4.digraph().vertex_count(), 4);
        assert!(v4.digraph().is_k_valent(2));
    }

    #[test]
    fn build_rejects_bad_pairs() {
        let z6 = AbelianGroup::cyclic(6);
        let el = |c| z6.element(vec![c]).unwrap();
        let non_generating = GenPair {
            s: el(2),
            s_prime: el(4),
        };
        assert!(matches!(
            build_cayley(&z6, &non_generating),
            Err(CayleyError::Group(AbelianError::NotGenerating { .. }))
        ));
        let equal = GenPair { s: el(1), s_prime: el(1) };
        assert!(build_cayley(&z6, &equal).is_err());
        let zero = GenPair { s: el(0), s_prime: el(1) };
        assert!(build_cayley(&z6, &zero).is_err());
    }

    #[test]
    fn xcoord_examples() {
        let c = cay("6", "(2);(1)");
        assert_eq!(c.xcoord(0, 0), c.group().identity());
        assert_eq!(c.xcoord(1, 1).to_string(), "(3)");
        for i in -5..5 {
            for j in -5..5 {
                assert_eq!(c.xcoord(i + 3, j), c.xcoord(i, j));
            }
        }
    }

    #[test]
    fn extract_examples() {
        let c = cay("6", "(2);(1)");
        assert_eq!(triple(&c.extract_params(&c.gens().clone()).unwrap()), (3, 2, 2));
        assert_eq!(triple(&c.extract_params(&c.gens().swapped()).unwrap()), (6, 1, 4));
        let t = cay("3,3", "(1,0);(0,1)");
        assert_eq!(triple(&t.extract_params(&t.gens().clone()).unwrap()), (3, 3, 0));
        let other = cay("6", "(1);(4)");
        assert!(matches!(
            c.extract_params(other.gens()),
            Err(CayleyError::NotAnAssignment(_))
        ));
    }

    #[test]
    fn natural_map_examples() {
        let c = cay("6", "(2);(1)");
        let p = c.extract_params(c.gens()).unwrap();
        let map = c.natural_map(&p).unwrap();
        // Index a·l + b with l = 2.
        assert_eq!(c.digraph().label(map[0]), "(0)");
        assert_eq!(c.digraph().label(map[3]), "(3)");
        assert_eq!(c.digraph().label(map[5]), "(5)");

        let z3 = cay("3", "(1);(2)");
        let p = z3.extract_params(z3.gens()).unwrap();
        let mut map = z3.natural_map(&p).unwrap();
        map.sort_unstable();
        assert_eq!(map, [0, 1, 2]);

        let t = cay("3,3", "(1,0);(0,1)");
        let p = t.extract_params(t.gens()).unwrap();
        let gamma = build_gamma(GammaParams::new(3, 3, 0).unwrap()).unwrap();
        assert_eq!(gamma.digraph().arc_count(), 18);
        assert!(verify_isomorphism(gamma.digraph(), t.digraph(), &t.natural_map(&p).unwrap()));
    }

    #[test]
    fn structure_holds_for_every_instance_up_to_36() {
        for n in 3..=36 {
            for g in enumerate_groups(n).unwrap() {
                for pair in enumerate_genpairs(&g) {
                    let c = build_cayley(&g, &pair).unwrap();
                    let d = c.digraph();
                    assert!(d.is_k_valent(2) && d.is_strongly_connected(), "{g} {pair}");
                    for a in c.assignments() {
                        let p = c.extract_params(&a).unwrap();
                        assert_eq!(p.m * p.l, g.order());
                        assert!(p.h < p.m);
                        assert_eq!(c.xcoord_for(&a, p.h as i64, p.l as i64), g.identity());
                        let gamma = build_gamma(GammaParams::new(p.m, p.l, p.h).unwrap()).unwrap();
                        let map = c.natural_map(&p).unwrap();
                        assert!(verify_isomorphism(gamma.digraph(), d, &map), "{g} {a}");
                    }
                }
            }
        }
    }

    #[test]
    fn neighbor_duality_on_built_digraphs() {
        for n in 3..=20 {
            for g in enumerate_groups(n).unwrap() {
                for pair in enumerate_genpairs(&g) {
                    let d = build_cayley(&g, &pair).unwrap().digraph().clone();
                    for v in 0..d.vertex_count() {
                        for &w in d.out_neighbors(v).unwrap() {
                            assert!(d.in_neighbors(w).unwrap().contains(&v));
                        }
                        for &w in d.in_neighbors(v).unwrap() {
                            assert!(d.out_neighbors(w).unwrap().contains(&v));
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn neighbor_formulas(idx in 0usize..1000, i in -50i64..50, j in -50i64..50) {
            let instances = [
                cay("6", "(1);(2)"),
                cay("3,6", "(1,1);(0,1)"),
                cay("3,3", "(1,0);(0,1)"),
                cay("9", "(1);(2)"),
                cay("2,12", "(1,1);(0,3)"),
            ];
            let c = &instances[idx % instances.len()];
            let d = c.digraph();
            let v = c.vertex_of(&c.xcoord(i, j));
            let mut out = [c.vertex_of(&c.xcoord(i + 1, j)), c.vertex_of(&c.xcoord(i, j + 1))];
            let mut inn = [c.vertex_of(&c.xcoord(i - 1, j)), c.vertex_of(&c.xcoord(i, j - 1))];
            out.sort_unstable();
            inn.sort_unstable();
            prop_assert_eq!(d.out_neighbors(v).unwrap(), &out[..]);
            prop_assert_eq!(d.in_neighbors(v).unwrap(), &inn[..]);
        }
    }
}
