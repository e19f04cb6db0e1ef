mod common;

use common::Gen;
use lacecheck::assertion::down::down;
use lacecheck::assertion::rewrite::rewrite_modal;
use lacecheck::assertion::Expr;
use lacecheck::lacing::{check_constraint_coverage, compute_parallelism};
use lacecheck::oracle::{check_validity, OracleConfig, OracleError, OracleVerdict};
use lacecheck::smt::grid_for;
use lacecheck::syntax::pretty::{expr_to_string, program_to_string};
use lacecheck::syntax::{parse_assertion_internal, parse_program};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

const ACCENTS: &[&str] = &["hat", "dhat", "hook"];

fn formula(seed: u64, depth: u32, accents: &'static [&'static str]) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Gen { rng: &mut rng, accents }.formula(depth)
}

/// Bounded validity by enumeration; None when the model space is too large.
fn oracle_valid(e: &Expr) -> Option<bool> {
    let now = grid_for(e).now;
    let cfg = OracleConfig { max_value: 1, instants: if now == 1 { 4 } else { 3 }, ..OracleConfig::default() };
    match check_validity(e, &cfg) {
        Ok(OracleVerdict::Valid) => Some(true),
        Ok(OracleVerdict::Counter(_)) => Some(false),
        Err(OracleError::TooLarge(_)) => None,
        Err(err) => panic!("{}: {err}", expr_to_string(e)),
    }
}

fn iff(a: Expr, b: Expr) -> Expr {
    Expr::and(vec![Expr::implies(a.clone(), b.clone()), Expr::implies(b, a)])
}

/// A straight-line thread, an optional one-armed conditional in the middle,
/// and a knot per component drawn from `knots`.
#[derive(Clone, Debug)]
struct Shape {
    before: usize,
    inner: usize,
    after: usize,
    /// Per component: disjuncts of (source index or init, ordering).
    knots: Vec<Vec<Vec<(Option<usize>, &'static str)>>>,
    /// Per component: the variable written, if a write.
    writes: Vec<Option<&'static str>>,
}

impl Shape {
    fn len(&self) -> usize {
        self.before + self.inner + self.after
    }

    fn label(&self, i: usize) -> String {
        format!("c{i}")
    }

    fn knot(&self, i: usize) -> String {
        let ds = &self.knots[i];
        if ds.is_empty() {
            return String::new();
        }
        let ds: Vec<String> = ds
            .iter()
            .map(|d| {
                let ss: Vec<String> = d
                    .iter()
                    .map(|(s, o)| {
                        let src = s.map_or("init".to_string(), |j| self.label(j));
                        format!("{src} {o}: true")
                    })
                    .collect();
                format!("{{* {} *}}", ss.join("; "))
            })
            .collect();
        format!("{} ", ds.join(" | "))
    }

    fn command(&self, i: usize) -> String {
        let body = match self.writes[i] {
            Some(v) => format!("{v} := {}", i + 1),
            None => "r1 := x".to_string(),
        };
        format!("{}{}: {body}", self.knot(i), self.label(i))
    }

    fn source(&self) -> String {
        let cmds = |r: std::ops::Range<usize>| r.map(|i| self.command(i)).collect::<Vec<_>>().join(";\n  ");
        let mut body = cmds(0..self.before);
        if self.inner > 0 {
            let cond = format!("if beta: r1 = 1 then\n    {}\n  fi", cmds(self.before..self.before + self.inner));
            body = if body.is_empty() { cond } else { format!("{body};\n  {cond}") };
        }
        let rest = cmds(self.before + self.inner..self.len());
        if !rest.is_empty() {
            body = if body.is_empty() { rest } else { format!("{body};\n  {rest}") };
        }
        format!("{{ init: true }}\nthread {{\n  guar []\n  {body}\n}}\n")
    }

    /// Labels uncovered on some path, by direct enumeration of both paths.
    fn brute_uncovered(&self) -> BTreeSet<String> {
        let mut paths = vec![(0..self.len()).collect::<Vec<_>>()];
        if self.inner > 0 {
            paths.push((0..self.before).chain(self.before + self.inner..self.len()).collect());
        }
        let mut out = BTreeSet::new();
        for p in paths {
            for (pos, &i) in p.iter().enumerate() {
                let prior = &p[..pos];
                let ds = &self.knots[i];
                let ok = ds.is_empty()
                    || ds.iter().any(|d| d.iter().all(|(s, _)| s.is_none_or(|j| prior.contains(&j))));
                if !ok {
                    out.insert(self.label(i));
                }
            }
        }
        out
    }
}

fn shape() -> impl Strategy<Value = Shape> {
    (0usize..4, 0usize..3, 1usize..4).prop_flat_map(|(before, inner, after)| {
        let n = before + inner + after;
        let stitch = (proptest::option::weighted(0.7, 0..n), prop::sample::select(vec!["lo", "bo", "uo"]));
        let disjunct = prop::collection::vec(stitch, 1..3);
        let knot = prop::collection::vec(disjunct, 0..3);
        let write = proptest::option::weighted(0.8, prop::sample::select(vec!["x", "y"]));
        (prop::collection::vec(knot, n), prop::collection::vec(write, n))
            .prop_map(move |(knots, writes)| Shape { before, inner, after, knots, writes })
    })
}

fn uncovered(src: &str) -> BTreeSet<String> {
    let p = parse_program(src).unwrap_or_else(|e| panic!("{src}\n{e}"));
    check_constraint_coverage(&p.threads[0], 0, 3).unwrap().into_iter().map(|u| u.label).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn assertion_pretty_parse_round_trip(seed: u64) {
        let s = formula(seed, 3, &["hat", "dhat", "hook", "tw", "dtw"]);
        let e = parse_assertion_internal(&s).unwrap();
        let printed = expr_to_string(&e);
        prop_assert_eq!(parse_assertion_internal(&printed).unwrap(), e, "{}", printed);
    }

    #[test]
    fn program_pretty_parse_round_trip(s in shape()) {
        let p = parse_program(&s.source()).unwrap();
        let printed = program_to_string(&p);
        prop_assert_eq!(program_to_string(&parse_program(&printed).unwrap()), printed);
    }

    #[test]
    fn coverage_matches_path_enumeration(s in shape()) {
        prop_assert_eq!(uncovered(&s.source()), s.brute_uncovered());
    }

    #[test]
    fn extra_disjunct_never_uncovers(s in shape(), at in any::<prop::sample::Index>(), src in any::<prop::sample::Index>()) {
        let before = uncovered(&s.source());
        let mut more = s.clone();
        let i = at.index(s.len());
        let j = if src.index(s.len() + 1) == s.len() { None } else { Some(src.index(s.len())) };
        if more.knots[i].is_empty() {
            return Ok(());
        }
        more.knots[i].push(vec![(j, "lo")]);
        let after = uncovered(&more.source());
        prop_assert!(after.is_subset(&before), "{:?} not within {:?}", after, before);
    }

    #[test]
    fn bo_parallel_pairs_write_disjoint_variables(s in shape()) {
        let p = parse_program(&s.source()).unwrap();
        let par = compute_parallelism(&p.threads[0], 0, 3, false).unwrap();
        let var: BTreeMap<String, &str> =
            (0..s.len()).filter_map(|i| s.writes[i].map(|v| (s.label(i), v))).collect();
        for (a, b) in &par.bo {
            prop_assert_ne!(var.get(a), var.get(b), "{} {}", a, b);
        }
    }

    #[test]
    fn every_write_is_uo_parallel_with_itself(s in shape()) {
        let p = parse_program(&s.source()).unwrap();
        let par = compute_parallelism(&p.threads[0], 0, 3, false).unwrap();
        for i in 0..s.len() {
            if s.writes[i].is_some() {
                let l = s.label(i);
                prop_assert!(par.uo.contains(&(l.clone(), l)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rewrite_preserves_meaning(seed: u64) {
        let e = parse_assertion_internal(&formula(seed, 2, ACCENTS)).unwrap();
        let r = rewrite_modal(&e);
        let v = oracle_valid(&iff(e.clone(), r.clone()));
        prop_assume!(v.is_some());
        prop_assert!(v.unwrap(), "{} vs {}", expr_to_string(&e), expr_to_string(&r));
    }

    #[test]
    fn down_is_a_weakening(seed: u64) {
        let e = parse_assertion_internal(&formula(seed, 2, &[])).unwrap();
        let d = down(&e);
        let v = oracle_valid(&Expr::implies(e.clone(), d.clone()));
        prop_assume!(v.is_some());
        prop_assert!(v.unwrap(), "{} vs {}", expr_to_string(&e), expr_to_string(&d));
    }
}
