//! The digraph family `Γ_{m,l,h}` on `Z_m × [l]`.
//!
//! Arcs: `(a,b) → (a+1,b)` for every vertex, `(a,c) → (a,c+1)` for
//! `c < l−1`, and the wrap arc `(a,l−1) → (a−h,0)`. Vertex `(a,b)` has
//! index `a·l + b`, so vertices are numbered in lexicographic order.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::abelian::{AbelianGroup, GenPair, GroupElement};
use crate::cayley::{build_cayley, CayleyDigraph, CayleyError};
use crate::codes::CodeSet;
use crate::digraph::{isomorphism_witness, Digraph, DigraphError};
use crate::numth::{self, euclid_divmod, factorize, sigma_p, snf_2x2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error("parameters out of range: need m >= 1, l >= 1, 0 <= h < m (got m={m}, l={l}, h={h})")]
    OutOfRange { m: u64, l: u64, h: u64 },
    #[error("degenerate parameters {params}")]
    Degenerate {
        params: GammaParams,
        source: DigraphError,
    },
    #[error("canonical code needs 3 | m and 3 | (l - h); {0} fails")]
    NoCanonicalCode(GammaParams),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GammaParams {
    pub m: u64,
    pub l: u64,
    pub h: u64,
}

impl std::fmt::Display for GammaParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.m, self.l, self.h)
    }
}

impl GammaParams {
    pub fn new(m: u64, l: u64, h: u64) -> Result<Self, GammaError> {
        if m == 0 || l == 0 || h >= m {
            return Err(GammaError::OutOfRange { m, l, h });
        }
        Ok(Self { m, l, h })
    }

    /// Whether `build_gamma` accepts these parameters: `m = 1` loops on
    /// every row arc, `l = 1, h = 0` loops on the wrap arc and
    /// `l = 1, h = m−1` duplicates the row arc.
    pub fn is_degenerate(&self) -> bool {
        self.m == 1 || (self.l == 1 && (self.h == 0 || self.h == self.m - 1))
    }

    pub fn vertex_count(&self) -> usize {
        (self.m * self.l) as usize
    }

    pub fn vertex(&self, a: u64, b: u64) -> usize {
        (a * self.l + b) as usize
    }

    pub fn coords(&self, v: usize) -> (u64, u64) {
        (v as u64 / self.l, v as u64 % self.l)
    }

    pub fn label(&self, v: usize) -> String {
        let (a, b) = self.coords(v);
        format!("({a},{b})")
    }

    /// Reduces any integer pair to its vertex: with `j = n·l + r`,
    /// `(i, j)` denotes `((i − n·h) mod m, r)`.
    pub fn normalize(&self, i: i64, j: i64) -> (u64, u64) {
        let (n, r) = euclid_divmod(j, self.l as i64).expect("l >= 1");
        let m = self.m as i128;
        let a = (i as i128 - n as i128 * self.h as i128).rem_euclid(m);
        (a as u64, r as u64)
    }

    pub fn normalize_vertex(&self, i: i64, j: i64) -> usize {
        let (a, b) = self.normalize(i, j);
        self.vertex(a, b)
    }
}

#[derive(Debug, Clone)]
pub struct GammaDigraph {
    params: GammaParams,
    digraph: Digraph,
}

impl GammaDigraph {
    pub fn params(&self) -> GammaParams {
        self.params
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }
}

pub fn build_gamma(p: GammaParams) -> Result<GammaDigraph, GammaError> {
    let GammaParams { m, l, h } = p;
    let labels = (0..p.vertex_count()).map(|v| p.label(v)).collect();
    let mut arcs = Vec::with_capacity(2 * p.vertex_count());
    for a in 0..m {
        for b in 0..l {
            arcs.push((p.vertex(a, b), p.vertex((a + 1) % m, b)));
            if b + 1 < l {
                arcs.push((p.vertex(a, b), p.vertex(a, b + 1)));
            } else {
                arcs.push((p.vertex(a, b), p.vertex((a + m - h) % m, 0)));
            }
        }
    }
    let digraph = Digraph::new(labels, arcs).map_err(|source| GammaError::Degenerate { params: p, source })?;
    Ok(GammaDigraph { params: p, digraph })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub div3_m: bool,
    pub div3_lh: bool,
    pub sigma_ok: bool,
    pub admits_code: bool,
    pub cayley_abelian: bool,
}

/// `σ_p(gcd(m,h)) ∈ {σ_p(m), σ_p(m−h)}` for every prime `p | m·l`, with
/// `gcd(m, 0) = m`.
fn sigma_condition(m: u64, l: u64, h: u64) -> bool {
    let (m, l, h) = (m as i64, l as i64, h as i64);
    let g = numth::gcd(m, h);
    factorize(m * l).expect("ml >= 1").primes().all(|p| {
        let v = sigma_p(p, g).expect("prime");
        v == sigma_p(p, m).expect("prime") || v == sigma_p(p, m - h).expect("prime")
    })
}

pub fn check_conditions(p: GammaParams) -> ConditionReport {
    let div3_m = p.m.is_multiple_of(3);
    let div3_lh = (p.l as i64 - p.h as i64) % 3 == 0;
    let sigma_ok = sigma_condition(p.m, p.l, p.h);
    ConditionReport {
        div3_m,
        div3_lh,
        sigma_ok,
        admits_code: div3_m && div3_lh,
        cayley_abelian: sigma_ok,
    }
}

/// The code `⋃_{r ∈ [b/3]} C_r`, `b = gcd(l−h, m)`, together with its classes.
#[derive(Debug, Clone)]
pub struct CanonicalCode {
    pub b: u64,
    pub classes: Vec<BTreeSet<usize>>,
    pub code: CodeSet,
}

/// `C_r = {(3r + j, j) : j ∈ Z}`, enumerated over `j ∈ [m·l]` and
/// deduplicated after normalization.
pub fn canonical_code(p: GammaParams) -> Result<CanonicalCode, GammaError> {
    if !check_conditions(p).admits_code {
        return Err(GammaError::NoCanonicalCode(p));
    }
    let b = numth::gcd(p.l as i64 - p.h as i64, p.m as i64) as u64;
    let period = (p.m * p.l) as i64;
    let classes: Vec<BTreeSet<usize>> = (0..b / 3)
        .map(|r| (0..period).map(|j| p.normalize_vertex(3 * r as i64 + j, j)).collect())
        .collect();
    let all = classes.iter().flatten().copied().collect();
    Ok(CanonicalCode {
        b,
        classes,
        code: CodeSet::new(all),
    })
}

/// Outcome of presenting `Γ_{m,l,h}` as `Cay(Z²/⟨(m,0),(h,l)⟩, {s, s′})`.
#[derive(Debug, Clone)]
pub enum Realization {
    /// `map[v]` is the Cayley vertex of Γ-vertex `v`; verified arc by arc.
    Proper { cayley: CayleyDigraph, map: Vec<usize> },
    /// The quotient exists but the natural map does not identify it with Γ.
    Improper {
        group: AbelianGroup,
        s: GroupElement,
        s_prime: GroupElement,
        reason: String,
    },
}

pub fn realize_as_cayley(p: GammaParams) -> Result<Realization, GammaError> {
    let gamma = build_gamma(p)?;
    let relations = [[p.m as i64, 0], [p.h as i64, p.l as i64]];
    let snf = snf_2x2(relations).expect("m, l >= 1 so the relation matrix is nonsingular");
    // x ↦ x·right maps the relation lattice onto d1·Z × d2·Z.
    let diag = [snf.d1, snf.d2];
    let kept: Vec<usize> = (0..2).filter(|&k| diag[k] > 1).collect();
    let group = AbelianGroup::new(kept.iter().map(|&k| diag[k] as u64).collect()).expect("SNF diagonal is a chain");
    let image = |row: usize| {
        let coords = kept
            .iter()
            .map(|&k| snf.right[row][k].rem_euclid(diag[k]) as u64)
            .collect();
        group.element(coords).expect("reduced residues")
    };
    let (s, s_prime) = (image(0), image(1));
    let improper = |reason: String| {
        Ok(Realization::Improper {
            group: group.clone(),
            s: s.clone(),
            s_prime: s_prime.clone(),
            reason,
        })
    };

    let order = group.element_order(&s).expect("member");
    if order != p.m {
        return improper(format!("o(s) = {order} differs from m = {}", p.m));
    }
    let pair = match GenPair::new(&group, s.clone(), s_prime.clone()) {
        Ok(pair) => pair,
        Err(e) => return improper(e.to_string()),
    };
    let cayley = build_cayley(&group, &pair)?;
    let params = cayley.extract_params(&pair)?;
    if (params.m, params.l, params.h) != (p.m, p.l, p.h) {
        return improper(format!(
            "assignment has parameters ({},{},{})",
            params.m, params.l, params.h
        ));
    }
    let map = cayley.natural_map(&params)?;
    if let Some(w) = isomorphism_witness(gamma.digraph(), cayley.digraph(), &map) {
        return improper(format!("natural map fails: {w:?}"));
    }
    Ok(Realization::Proper { cayley, map })
}
