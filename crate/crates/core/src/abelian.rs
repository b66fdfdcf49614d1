//! Finite abelian groups `Z_{d1} × … × Z_{dk}` in invariant-factor form.
//!
//! Elements are residue tuples against the canonical decomposition, so two
//! groups with equal factor lists are the same group. Elements do not carry
//! a reference to their group; every group operation checks arity and
//! reduction instead, which is what "mismatched parent" means here.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::numth::{self, factorize};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("invariant factor {0} is below 2")]
    FactorTooSmall(u64),
    #[error("invariant factors {0:?} do not form a divisibility chain")]
    NotAChain(Vec<u64>),
    #[error("element {element} does not belong to group {group}")]
    Foreign { element: String, group: String },
    #[error("generators must be distinct")]
    EqualGenerators,
    #[error("generators must be nonzero")]
    ZeroGenerator,
    #[error("{s} and {s_prime} do not generate {group}")]
    NotGenerating {
        s: String,
        s_prime: String,
        group: String,
    },
    #[error("group order must be positive, got {0}")]
    BadOrder(i64),
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl AbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self, AbelianError> {
        if let Some(&d) = factors.iter().find(|&&d| d < 2) {
            return Err(AbelianError::FactorTooSmall(d));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(AbelianError::NotAChain(factors));
        }
        Ok(Self { factors })
    }

    pub fn cyclic(n: u64) -> Self {
        if n <= 1 {
            Self { factors: vec![] }
        } else {
            Self { factors: vec![n] }
        }
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.factors.len()],
        }
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.coords.len() == self.factors.len()
            && a.coords.iter().zip(&self.factors).all(|(c, d)| c < d)
    }

    pub fn element(&self, coords: Vec<u64>) -> Result<GroupElement, AbelianError> {
        let a = GroupElement { coords };
        self.check(&a)?;
        Ok(a)
    }

    fn check(&self, a: &GroupElement) -> Result<(), AbelianError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(AbelianError::Foreign {
                element: a.to_string(),
                group: self.to_string(),
            })
        }
    }

    /// Mixed-radix index, first coordinate most significant.
    pub fn index_of(&self, a: &GroupElement) -> usize {
        a.coords
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&c, &d)| acc * d as usize + c as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0; self.factors.len()];
        for (c, &d) in coords.iter_mut().zip(&self.factors).rev() {
            *c = (index % d as usize) as u64;
            index /= d as usize;
        }
        GroupElement { coords }
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(|i| self.element_at(i))
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, AbelianError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub(crate) fn add_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .zip(&self.factors)
                .map(|((x, y), d)| (x + y) % d)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement, AbelianError> {
        self.scalar_mul(-1, a)
    }

    /// `n·a`, with `n` reduced modulo each coordinate's modulus.
    pub fn scalar_mul(&self, n: i64, a: &GroupElement) -> Result<GroupElement, AbelianError> {
        self.check(a)?;
        Ok(self.scalar_mul_unchecked(n, a))
    }

    pub(crate) fn scalar_mul_unchecked(&self, n: i64, a: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &d)| {
                    let d = d as i128;
                    ((n as i128).rem_euclid(d) * c as i128 % d) as u64
                })
                .collect(),
        }
    }

    /// `i·s + j·s′`, the two-generator coordinate view.
    pub(crate) fn combine(&self, i: i64, s: &GroupElement, j: i64, t: &GroupElement) -> GroupElement {
        self.add_unchecked(&self.scalar_mul_unchecked(i, s), &self.scalar_mul_unchecked(j, t))
    }

    /// lcm over coordinates of `d / gcd(d, c)`.
    pub fn element_order(&self, a: &GroupElement) -> Result<u64, AbelianError> {
        self.check(a)?;
        Ok(self.order_unchecked(a))
    }

    pub(crate) fn order_unchecked(&self, a: &GroupElement) -> u64 {
        a.coords
            .iter()
            .zip(&self.factors)
            .map(|(&c, &d)| d as i64 / numth::gcd(d as i64, c as i64))
            .fold(1, numth::lcm) as u64
    }

    pub fn cyclic_subgroup(&self, a: &GroupElement) -> Result<BTreeSet<GroupElement>, AbelianError> {
        let o = self.element_order(a)?;
        Ok((0..o as i64).map(|n| self.scalar_mul_unchecked(n, a)).collect())
    }

    /// Least `n >= 1` with `n·t ∈ ⟨s⟩`.
    pub fn min_multiple_in_cyclic(&self, s: &GroupElement, t: &GroupElement) -> Result<u64, AbelianError> {
        let span = self.cyclic_subgroup(s)?;
        self.check(t)?;
        let mut acc = t.clone();
        let mut n = 1;
        while !span.contains(&acc) {
            acc = self.add_unchecked(&acc, t);
            n += 1;
        }
        Ok(n)
    }

    /// Order of `⟨s, t⟩`, as `o(s) · min{n ≥ 1 : n·t ∈ ⟨s⟩}`.
    pub fn generated_order(&self, s: &GroupElement, t: &GroupElement) -> Result<u64, AbelianError> {
        Ok(self.element_order(s)? * self.min_multiple_in_cyclic(s, t)?)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.factors.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for AbelianGroup {
    type Err = AbelianError;

    /// Comma-separated invariant factors, e.g. `3,6`; `1` is the trivial group.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AbelianError::Parse {
            what: "group",
            input: s.to_string(),
        };
        let factors: Vec<u64> = s
            .split(',')
            .map(|p| p.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        if factors == [1] {
            return Ok(Self::cyclic(1));
        }
        Self::new(factors)
    }
}

impl AbelianGroup {
    /// Parses `(1,4)` against this group.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement, AbelianError> {
        let bad = || AbelianError::Parse {
            what: "element",
            input: s.to_string(),
        };
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let coords: Vec<u64> = if inner.trim().is_empty() {
            vec![]
        } else {
            inner
                .split(',')
                .map(|p| p.trim().parse::<u64>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        };
        self.element(coords)
    }

    /// Parses `(a);(b)` into a validated generating pair.
    pub fn parse_genpair(&self, s: &str) -> Result<GenPair, AbelianError> {
        let (a, b) = s.split_once(';').ok_or_else(|| AbelianError::Parse {
            what: "generator pair",
            input: s.to_string(),
        })?;
        GenPair::new(self, self.parse_element(a)?, self.parse_element(b)?)
    }
}

/// Ordered generating pair `(s, s′)`; the order decides which element is `s`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenPair {
    pub s: GroupElement,
    pub s_prime: GroupElement,
}

impl GenPair {
    pub fn new(g: &AbelianGroup, s: GroupElement, s_prime: GroupElement) -> Result<Self, AbelianError> {
        g.check(&s)?;
        g.check(&s_prime)?;
        let zero = g.identity();
        if s == zero || s_prime == zero {
            return Err(AbelianError::ZeroGenerator);
        }
        if s == s_prime {
            return Err(AbelianError::EqualGenerators);
        }
        if g.generated_order(&s, &s_prime)? != g.order() {
            return Err(AbelianError::NotGenerating {
                s: s.to_string(),
                s_prime: s_prime.to_string(),
                group: g.to_string(),
            });
        }
        Ok(Self { s, s_prime })
    }

    pub fn swapped(&self) -> Self {
        Self {
            s: self.s_prime.clone(),
            s_prime: self.s.clone(),
        }
    }
}

impl fmt::Display for GenPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{}", self.s, self.s_prime)
    }
}

/// Partitions of `e` as non-increasing part lists, in descending
/// lexicographic order (`[e]` first).
fn partitions(e: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(e, e, &mut Vec::new(), &mut out);
    out
}

/// One group per isomorphism class of abelian groups of order `n`.
pub fn enumerate_groups(n: i64) -> Result<Vec<AbelianGroup>, AbelianError> {
    let f = factorize(n).map_err(|_| AbelianError::BadOrder(n))?;
    let choices: Vec<(i64, Vec<Vec<u32>>)> = f.factors.iter().map(|&(p, e)| (p, partitions(e))).collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; choices.len()];
    loop {
        let width = choices
            .iter()
            .zip(&pick)
            .map(|((_, parts), &k)| parts[k].len())
            .max()
            .unwrap_or(0);
        // Largest invariant factor collects the largest part of every prime.
        let mut factors = vec![1u64; width];
        for ((p, parts), &k) in choices.iter().zip(&pick) {
            for (slot, &e) in parts[k].iter().enumerate() {
                factors[width - 1 - slot] *= (*p as u64).pow(e);
            }
        }
        out.push(AbelianGroup::new(factors).expect("prime-power combination is a chain"));

        let mut i = choices.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < choices[i].1.len() {
                break;
            }
            pick[i] = 0;
        }
    }
}

/// Every ordered pair of distinct nonzero elements generating `g`, ordered
/// by element index of `s` then `s′`.
pub fn enumerate_genpairs(g: &AbelianGroup) -> Vec<GenPair> {
    let n = g.order() as usize;
    let elems: Vec<GroupElement> = g.elements().collect();
    let orders: Vec<u64> = elems.iter().map(|a| g.order_unchecked(a)).collect();
    let mut out = Vec::new();
    for i in 1..n {
        let mut span = vec![false; n];
        for k in 0..orders[i] as i64 {
            span[g.index_of(&g.scalar_mul_unchecked(k, &elems[i]))] = true;
        }
        for j in 1..n {
            if i == j {
                continue;
            }
            let mut acc = elems[j].clone();
            let mut l = 1;
            while !span[g.index_of(&acc)] {
                acc = g.add_unchecked(&acc, &elems[j]);
                l += 1;
            }
            if orders[i] * l == g.order() {
                out.push(GenPair {
                    s: elems[i].clone(),
                    s_prime: elems[j].clone(),
                });
            }
        }
    }
    out
}
