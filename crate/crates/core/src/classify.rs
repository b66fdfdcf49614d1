//! Classification sweep: every abelian group up to a given order, every
//! ordered generating pair, arithmetic predicate against the exact-cover
//! oracle, plus the identity-code and lemma checks on every code found.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{enumerate_genpairs, enumerate_groups, AbelianGroup, GenPair};
use crate::cayley::{build_cayley, AssignmentParams};
use crate::codes::{check_lemmas, enumerate_codes, thm2_family, LemmaReport, SearchOptions, DEFAULT_SIZE_CAP};
use crate::digraph::isomorphism_witness;
use crate::gamma::{build_gamma, check_conditions, ConditionReport, GammaParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("max order must be at least 3, got {0}")]
    MaxOrderTooSmall(u64),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// `3 | m`, `3 | (l − h)` and the σ_p condition.
pub fn thm1_predicate(p: &AssignmentParams) -> bool {
    let gp = GammaParams::new(p.m, p.l, p.h).expect("extracted parameters are in range");
    let c = check_conditions(gp);
    c.admits_code && c.sigma_ok
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    /// Satisfiability-only search for instances the predicate rejects.
    pub early_exit: bool,
    /// Worker threads; 0 picks the rayon default.
    pub jobs: usize,
    pub size_cap: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            early_exit: false,
            jobs: 0,
            size_cap: DEFAULT_SIZE_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    /// Predicate and oracle disagree on existence.
    PredicateOracle,
    /// The two orderings of one connection set disagree.
    AssignmentDisagreement,
    /// σ_p condition false for parameters of an actual Cayley digraph.
    Sigma,
    /// Not 2-valent or not strongly connected.
    Structure,
    /// Natural map onto the matching Γ fails.
    Isomorphism,
    /// Identity-containing codes differ from the two-generator family.
    IdentityCode,
    /// Full code set is not three codes partitioning the vertices.
    CodeCount,
    Lemma,
    /// Oracle search failed (size cap).
    Search,
}

impl DiscrepancyKind {
    pub const THM1: &'static [Self] = &[
        Self::PredicateOracle,
        Self::AssignmentDisagreement,
        Self::Sigma,
        Self::Structure,
        Self::Isomorphism,
        Self::Search,
    ];
    pub const THM2: &'static [Self] = &[Self::IdentityCode, Self::CodeCount, Self::Search];
    pub const LEMMAS: &'static [Self] = &[Self::Lemma, Self::Search];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub kind: DiscrepancyKind,
    pub group: String,
    pub s: String,
    pub s_prime: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceRecord {
    pub group: String,
    pub s: String,
    pub s_prime: String,
    pub m: u64,
    pub l: u64,
    pub h: u64,
    pub flags: ConditionReport,
    pub predicate: bool,
    pub oracle_exists: bool,
    pub oracle_code_count: usize,
    /// `None` when the predicate rejects the instance.
    pub identity_code_matches_thm2: Option<bool>,
    /// Conjunction over every oracle code; `None` when there are none.
    pub lemma_flags: Option<LemmaReport>,
    pub search_nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepStats {
    pub groups: usize,
    pub positive_instances: usize,
    pub search_nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub max_order: u64,
    pub instance_count: usize,
    pub records: Vec<InstanceRecord>,
    pub discrepancies: Vec<Discrepancy>,
    pub stats: SweepStats,
}

struct Outcome {
    record: InstanceRecord,
    discrepancies: Vec<Discrepancy>,
}

fn run_instance(group: &AbelianGroup, pair: &GenPair, opts: &SweepOptions) -> Outcome {
    let mut found = Vec::new();
    let mut flag = |kind, detail: String| {
        found.push(Discrepancy {
            kind,
            group: group.to_string(),
            s: pair.s.to_string(),
            s_prime: pair.s_prime.to_string(),
            detail,
        })
    };

    let cay = build_cayley(group, pair).expect("enumerated pairs generate");
    let d = cay.digraph();
    if !d.is_k_valent(2) || !d.is_strongly_connected() {
        flag(DiscrepancyKind::Structure, "not a strongly connected 2-valent digraph".into());
    }
    let params = cay.extract_params(pair).expect("own assignment");
    let gp = GammaParams::new(params.m, params.l, params.h).expect("extracted parameters are in range");
    match build_gamma(gp) {
        Ok(gamma) => {
            let map = cay.natural_map(&params).expect("natural map is bijective");
            if let Some(w) = isomorphism_witness(gamma.digraph(), d, &map) {
                flag(DiscrepancyKind::Isomorphism, format!("natural map onto Γ{gp} fails: {w:?}"));
            }
        }
        Err(e) => flag(DiscrepancyKind::Isomorphism, e.to_string()),
    }

    let flags = check_conditions(gp);
    if !flags.sigma_ok {
        flag(DiscrepancyKind::Sigma, format!("σ condition fails for {gp}"));
    }
    let predicate = thm1_predicate(&params);

    let search = SearchOptions {
        size_cap: opts.size_cap,
        first_only: opts.early_exit && !predicate,
    };
    let (codes, mut nodes) = match enumerate_codes(d, None, search) {
        Ok(e) => (e.codes, e.nodes),
        Err(e) => {
            flag(DiscrepancyKind::Search, e.to_string());
            (Vec::new(), 0)
        }
    };
    let oracle_exists = !codes.is_empty();
    if predicate != oracle_exists {
        flag(
            DiscrepancyKind::PredicateOracle,
            format!("predicate {predicate} but oracle found {} codes", codes.len()),
        );
    }

    let mut identity_code_matches_thm2 = None;
    if predicate {
        let id = cay.identity_vertex();
        let family = thm2_family(&cay, &params).expect("predicate implies admitted");
        match enumerate_codes(d, Some(id), search) {
            Ok(e) => {
                nodes += e.nodes;
                let ok = e.codes.len() == 1 && e.codes[0].vertices() == family.vertices() && family.is_perfect();
                if !ok {
                    let got: Vec<Vec<&str>> = e
                        .codes
                        .iter()
                        .map(|c| c.vertices().iter().map(|&v| d.label(v)).collect())
                        .collect();
                    let want: Vec<&str> = family.vertices().iter().map(|&v| d.label(v)).collect();
                    flag(
                        DiscrepancyKind::IdentityCode,
                        format!("identity codes {got:?}, family {want:?}"),
                    );
                }
                identity_code_matches_thm2 = Some(ok);
            }
            Err(e) => flag(DiscrepancyKind::Search, e.to_string()),
        }
    }

    if oracle_exists && !search.first_only {
        let mut cover = vec![0usize; d.vertex_count()];
        for c in &codes {
            for &v in c.vertices() {
                cover[v] += 1;
            }
        }
        if codes.len() != 3 || cover.iter().any(|&k| k != 1) {
            flag(
                DiscrepancyKind::CodeCount,
                format!("{} codes, vertex multiplicities not all 1", codes.len()),
            );
        }
    }

    let mut lemma_flags: Option<LemmaReport> = None;
    for c in &codes {
        let r = check_lemmas(&cay, c).expect("oracle codes are verified");
        lemma_flags = Some(lemma_flags.map_or(r, |acc| acc.and(r)));
    }
    if let Some(r) = lemma_flags.filter(|r| !r.all()) {
        flag(DiscrepancyKind::Lemma, format!("{r:?}"));
    }

    Outcome {
        record: InstanceRecord {
            group: group.to_string(),
            s: pair.s.to_string(),
            s_prime: pair.s_prime.to_string(),
            m: params.m,
            l: params.l,
            h: params.h,
            flags,
            predicate,
            oracle_exists,
            oracle_code_count: codes.len(),
            identity_code_matches_thm2,
            lemma_flags,
            search_nodes: nodes,
        },
        discrepancies: found,
    }
}

/// Instances are ordered by group order, then group enumeration order, then
/// by the element indices of `s` and `s′`; the order does not depend on
/// the number of workers.
pub fn sweep(max_order: u64, opts: SweepOptions) -> Result<SweepReport, ClassifyError> {
    if max_order < 3 {
        return Err(ClassifyError::MaxOrderTooSmall(max_order));
    }
    let groups: Vec<AbelianGroup> = (1..=max_order as i64)
        .flat_map(|n| enumerate_groups(n).expect("positive order"))
        .collect();
    let work: Vec<(&AbelianGroup, GenPair)> = groups
        .iter()
        .flat_map(|g| enumerate_genpairs(g).into_iter().map(move |p| (g, p)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| ClassifyError::Pool(e.to_string()))?;
    let outcomes: Vec<Outcome> = pool.install(|| work.par_iter().map(|(g, p)| run_instance(g, p, &opts)).collect());

    let mut records = Vec::with_capacity(outcomes.len());
    let mut discrepancies = Vec::new();
    for o in outcomes {
        records.push(o.record);
        discrepancies.extend(o.discrepancies);
    }

    let by_key: HashMap<(&str, &str, &str), &InstanceRecord> = records
        .iter()
        .map(|r| ((r.group.as_str(), r.s.as_str(), r.s_prime.as_str()), r))
        .collect();
    for r in &records {
        let Some(other) = by_key.get(&(r.group.as_str(), r.s_prime.as_str(), r.s.as_str())) else {
            continue;
        };
        if r.predicate != other.predicate || r.oracle_exists != other.oracle_exists {
            discrepancies.push(Discrepancy {
                kind: DiscrepancyKind::AssignmentDisagreement,
                group: r.group.clone(),
                s: r.s.clone(),
                s_prime: r.s_prime.clone(),
                detail: format!(
                    "predicate {}/{}, oracle {}/{} against the swapped assignment",
                    r.predicate, other.predicate, r.oracle_exists, other.oracle_exists
                ),
            });
        }
    }

    let stats = SweepStats {
        groups: groups.len(),
        positive_instances: records.iter().filter(|r| r.oracle_exists).count(),
        search_nodes: records.iter().map(|r| r.search_nodes).sum(),
    };
    Ok(SweepReport {
        max_order,
        instance_count: records.len(),
        records,
        discrepancies,
        stats,
    })
}

const CSV_HEADER: [&str; 20] = [
    "group",
    "s",
    "s_prime",
    "m",
    "l",
    "h",
    "div3_m",
    "div3_lh",
    "sigma_ok",
    "admits_code",
    "cayley_abelian",
    "predicate",
    "oracle_exists",
    "oracle_code_count",
    "identity_code_matches_thm2",
    "lemma_no_involution",
    "lemma_diagonal_closed",
    "lemma_spacing",
    "lemma_three_divides_lh",
    "search_nodes",
];

fn opt_bool(b: Option<bool>) -> String {
    b.map_or_else(|| "na".to_string(), |b| b.to_string())
}

impl SweepReport {
    /// Keeps only the discrepancies of the given kinds.
    pub fn restricted_to(mut self, kinds: &[DiscrepancyKind]) -> Self {
        self.discrepancies.retain(|d| kinds.contains(&d.kind));
        self
    }

    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// One row per instance.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.records {
            let lemma = |f: fn(&LemmaReport) -> bool| opt_bool(r.lemma_flags.as_ref().map(f));
            w.write_record([
                r.group.clone(),
                r.s.clone(),
                r.s_prime.clone(),
                r.m.to_string(),
                r.l.to_string(),
                r.h.to_string(),
                r.flags.div3_m.to_string(),
                r.flags.div3_lh.to_string(),
                r.flags.sigma_ok.to_string(),
                r.flags.admits_code.to_string(),
                r.flags.cayley_abelian.to_string(),
                r.predicate.to_string(),
                r.oracle_exists.to_string(),
                r.oracle_code_count.to_string(),
                opt_bool(r.identity_code_matches_thm2),
                lemma(|f| f.no_involution),
                lemma(|f| f.diagonal_closed),
                lemma(|f| f.spacing),
                lemma(|f| f.three_divides_lh),
                r.search_nodes.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 fields")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find<'a>(r: &'a SweepReport, group: &str, s: &str, t: &str) -> &'a InstanceRecord {
        r.records
            .iter()
            .find(|x| x.group == group && x.s == s && x.s_prime == t)
            .unwrap()
    }

    fn params(m: u64, l: u64, h: u64) -> AssignmentParams {
        let z = AbelianGroup::cyclic(6);
        let a = z.element(vec![1]).unwrap();
        let b = z.element(vec![5]).unwrap();
        AssignmentParams {
            m,
            l,
            h,
            assignment: GenPair::new(&z, a, b).unwrap(),
        }
    }

    #[test]
    fn predicate_examples() {
        assert!(thm1_predicate(&params(3, 2, 2)));
        assert!(!thm1_predicate(&params(6, 1, 2)));
        assert!(thm1_predicate(&params(9, 1, 7)));
    }

    #[test]
    fn sweep_to_six() {
        let r = sweep(6, SweepOptions::default()).unwrap();
        assert!(r.is_clean(), "{:?}", r.discrepancies);
        let pos = find(&r, "6", "(1)", "(2)");
        assert!(pos.predicate && pos.oracle_exists);
        assert_eq!(pos.oracle_code_count, 3);
        assert_eq!(pos.identity_code_matches_thm2, Some(true));
        let neg = find(&r, "6", "(1)", "(4)");
        assert!(!neg.predicate && !neg.oracle_exists);
        assert_eq!((neg.m, neg.l, neg.h), (6, 1, 2));
        let inv = find(&r, "6", "(1)", "(3)");
        assert!(!inv.oracle_exists);
    }

    #[test]
    fn sweep_to_four_has_only_order_three_positives() {
        let r = sweep(4, SweepOptions::default()).unwrap();
        assert!(r.is_clean());
        let positives: Vec<_> = r.records.iter().filter(|x| x.oracle_exists).collect();
        assert_eq!(positives.len(), 2);
        assert!(positives.iter().all(|x| x.group == "3"));
        assert!(sweep(2, SweepOptions::default()).is_err());
    }

    #[test]
    fn early_exit_keeps_verdicts() {
        let full = sweep(18, SweepOptions::default()).unwrap();
        let fast = sweep(
            18,
            SweepOptions {
                early_exit: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(fast.is_clean());
        for (a, b) in full.records.iter().zip(&fast.records) {
            assert_eq!(a.oracle_exists, b.oracle_exists);
        }
    }

    #[test]
    fn worker_count_does_not_change_report() {
        let one = sweep(
            15,
            SweepOptions {
                jobs: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let many = sweep(
            15,
            SweepOptions {
                jobs: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(one.to_json(), many.to_json());
        assert_eq!(one.to_csv(), many.to_csv());
    }

    #[test]
    fn csv_shape() {
        let r = sweep(3, SweepOptions::default()).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + r.instance_count);
        assert!(lines[0].starts_with("group,s,s_prime,m,l,h"));
        assert_eq!(lines[1], "3,(1),(2),3,1,1,true,true,true,true,true,true,true,3,true,true,true,true,true,5");
    }

    #[test]
    fn restriction_filters_kinds() {
        let mut r = sweep(3, SweepOptions::default()).unwrap();
        r.discrepancies.push(Discrepancy {
            kind: DiscrepancyKind::Lemma,
            group: "3".into(),
            s: "(1)".into(),
            s_prime: "(2)".into(),
            detail: String::new(),
        });
        assert!(r.clone().restricted_to(DiscrepancyKind::THM1).is_clean());
        assert!(!r.restricted_to(DiscrepancyKind::LEMMAS).is_clean());
    }
}
