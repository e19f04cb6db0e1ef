#![allow(dead_code)]

use lacecheck::smt::{validity_query, EmbedCtx};
use lacecheck::solver::{Solver, SolverConfig, Status};
use lacecheck::syntax::parse_assertion_internal;

pub fn solver() -> Solver {
    Solver::new(SolverConfig::default()).expect("z3 on PATH")
}

/// Validity under the embedding as written, with no modal rewriting.
pub fn verdict(solver: &Solver, src: &str) -> Status {
    let e = parse_assertion_internal(src).unwrap_or_else(|err| panic!("{src}: {err}"));
    let ctx = EmbedCtx { skip_rewrite: true, ..EmbedCtx::default() };
    let q = validity_query(&e, &ctx, false).unwrap_or_else(|err| panic!("{src}: {err}"));
    Status::from_answer(q.kind, solver.run(&q).answer)
}

/// The one displayed equivalence that does not hold under the embedding.
pub const INVALID_ROW: &str = "U(P since Q)";

/// Instances for P and Q: single variable, multivariate, variable free.
const ATOMS: [&str; 4] = ["x = 1", "x = y", "r1 = 1", "x != 0 /\\ y = 2"];
const FREE: [&str; 2] = ["r1 = 1", "true"];

fn both(out: &mut Vec<(String, String)>, row: &str, template: &str, ps: &[&str], qs: &[&str]) {
    for p in ps {
        for q in qs {
            out.push((row.to_string(), sub(template, p, q)));
        }
    }
}

fn sub(template: &str, p: &str, q: &str) -> String {
    template.replace('P', &format!("({p})")).replace('Q', &format!("({q})"))
}

/// Every displayed modality property and embedding equivalence,
/// instantiated over small assertions. Each entry is (row, formula).
pub fn modal_properties() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for m in ["B", "U", "sofar"] {
        let shared = [
            ("M(P) => P", "M(P) => P"),
            ("M(P /\\ Q) <=> M(P) /\\ M(Q)", "M(P /\\ Q) <=> M(P) /\\ M(Q)"),
            ("M(M(P)) <=> M(P)", "M(M(P)) <=> M(P)"),
            ("M(P \\/ Q) <= M(P) \\/ M(Q)", "M(P) \\/ M(Q) => M(P \\/ Q)"),
        ];
        for (row, t) in shared {
            both(&mut out, &row.replace('M', m), &t.replace('M', m), &ATOMS, &ATOMS);
        }
        both(&mut out, &format!("{m}(P) <= P, P variable free"), &format!("P => {m}(P)"), &FREE, &["true"]);
        both(&mut out, 
            &format!("{m}(P \\/ Q) => {m}(P) \\/ {m}(Q), Q variable free"),
            &format!("{m}(P \\/ Q) => {m}(P) \\/ {m}(Q)"),
            &ATOMS,
            &FREE,
        );
        both(&mut out, 
            &format!("{m}(P \\/ Q) => {m}(P) \\/ {m}(Q), P variable free"),
            &format!("{m}(P \\/ Q) => {m}(P) \\/ {m}(Q)"),
            &FREE,
            &ATOMS,
        );
        // Tautological implications P => Q.
        for (p, q) in [("x = 1 /\\ y = 2", "x = 1"), ("x = 1", "x = 1 \\/ y = 0"), ("x = y /\\ y = 1", "x = 1")] {
            out.push((format!("(P => Q) => ({m}(P) => {m}(Q))"), format!("{m}({p}) => {m}({q})")));
        }
    }
    let own = [
        ("U(P) => B(P)", "U(P) => B(P)"),
        ("U(B(P)) <=> U(P)", "U(B(P)) <=> U(P)"),
        ("B(U(P)) <=> U(P)", "B(U(P)) <=> U(P)"),
        ("P /\\ Q => P since Q", "P /\\ Q => P since Q"),
        ("P since Q => P /\\ ouat(Q)", "P since Q => P /\\ ouat(Q)"),
        ("sofar(P) => U(P)", "sofar(P) => U(P)"),
        ("sofar(U(P)) <=> sofar(P)", "sofar(U(P)) <=> sofar(P)"),
        ("U(sofar(P)) <=> sofar(P)", "U(sofar(P)) <=> sofar(P)"),
        ("sofar(P) => hat(P)", "sofar(P) => hat(P)"),
        ("sofar(P) => dhat(P)", "sofar(P) => dhat(P)"),
        ("sofar(P) => tw(P)", "sofar(P) => tw(P)"),
        ("sofar(P) => dtw(P)", "sofar(P) => dtw(P)"),
        ("sofar(P) => B(P)", "sofar(P) => B(P)"),
        // ouat: de Morgan opposites of the universal modalities.
        ("P => ouat(P)", "P => ouat(P)"),
        ("ouat(P \\/ Q) <=> ouat(P) \\/ ouat(Q)", "ouat(P \\/ Q) <=> ouat(P) \\/ ouat(Q)"),
        ("ouat(ouat(P)) <=> ouat(P)", "ouat(ouat(P)) <=> ouat(P)"),
        ("ouat(P /\\ Q) => ouat(P) /\\ ouat(Q)", "ouat(P /\\ Q) => ouat(P) /\\ ouat(Q)"),
        ("ouat(P /\\ Q) => P /\\ ouat(Q), P variable free", "ouat(r1 = 1 /\\ Q) => r1 = 1 /\\ ouat(Q)"),
        // Embedding equivalences.
        ("(P since Q) since R", "(P since Q) since y = 0 <=> P since ((P since Q) /\\ y = 0)"),
        ("sofar(P) since Q", "sofar(P) since Q <=> sofar(P) /\\ ouat(Q)"),
        ("U(U(P))", "U(U(P)) <=> U(P)"),
        ("U(B(P))", "U(B(P)) <=> U(P)"),
        ("U(sofar(P))", "U(sofar(P)) <=> sofar(P)"),
        ("U(P since Q)", "U(P since Q) <=> Fandw(P) since (Fandw(P) /\\ Q)"),
        ("sofar(U(P))", "sofar(U(P)) <=> sofar(P)"),
        ("sofar(B(P))", "sofar(B(P)) <=> sofar(P)"),
        ("sofar(sofar(P))", "sofar(sofar(P)) <=> sofar(P)"),
    ];
    for (row, t) in own {
        both(&mut out, row, t, &ATOMS, &ATOMS);
    }
    both(&mut out, "ouat(P) => P, P variable free", "ouat(P) => P", &FREE, &["true"]);
    both(&mut out, "ouat(P /\\ Q) <= ouat(P) /\\ ouat(Q), P variable free", "ouat(P) /\\ ouat(Q) => ouat(P /\\ Q)", &FREE, &ATOMS);
    both(&mut out, "ouat(P /\\ Q) <= ouat(P) /\\ ouat(Q), Q variable free", "ouat(P) /\\ ouat(Q) => ouat(P /\\ Q)", &ATOMS, &FREE);
    for (p, q) in [("x = 1 /\\ y = 2", "x = 1"), ("x = 1", "x = 1 \\/ y = 0")] {
        out.push(("(P => Q) => (ouat(P) => ouat(Q))".into(), format!("ouat({p}) => ouat({q})")));
    }
    out
}

use lacecheck::assertion::accent::expand_accents;
use lacecheck::assertion::sp::sp_assign;
use lacecheck::assertion::Expr;
use lacecheck::syntax::ast::{Assign, Cmd};
use lacecheck::syntax::parse_program;
use std::collections::BTreeSet;

/// A displayed strongest-postcondition calculation: sp(pre, assign) => post.
pub struct Calc {
    pub name: &'static str,
    pub pre: &'static str,
    pub assign: &'static str,
    pub post: &'static str,
    pub valid: bool,
}

/// `assign` is a command, or `[A]. x := A` when it binds logicals.
fn parse_assign(src: &str) -> Assign {
    let prog = if src.starts_with('[') {
        let (binder, a) = src.split_once(". ").unwrap();
        format!("{{ init: true }} thread {{ guar [ {binder}. true | {a} ] }}")
    } else {
        format!("{{ init: true }} thread {{ guar [] a: {src} }}")
    };
    let p = parse_program(&prog).unwrap_or_else(|e| panic!("{src}: {e}"));
    let t = &p.threads[0];
    match t.guar.as_ref().and_then(|g| g.first()) {
        Some(i) => i.assign.clone(),
        None => match &t.components()[0].cmd {
            Cmd::Assign(a) => a.clone(),
            _ => unreachable!(),
        },
    }
}

pub fn calc_goal(c: &Calc) -> Expr {
    let pre = parse_assertion_internal(c.pre).unwrap_or_else(|e| panic!("{}: {e}", c.name));
    let post = parse_assertion_internal(c.post).unwrap_or_else(|e| panic!("{}: {e}", c.name));
    let (pre, post) = (expand_accents(&pre), expand_accents(&post));
    let sp = sp_assign(&pre, &parse_assign(c.assign)).unwrap_or_else(|e| panic!("{}: {e}", c.name));
    Expr::implies(sp, post)
}

pub fn calc_verdict(solver: &Solver, c: &Calc) -> Status {
    let goal = calc_goal(c);
    let mut cvs = BTreeSet::new();
    goal.visit(&mut |n| {
        if let Expr::Coh(x, ..) = n {
            cvs.insert(x.clone());
        }
    });
    let ctx = EmbedCtx { cvs, ..Default::default() };
    let q = validity_query(&goal, &ctx, false).unwrap_or_else(|e| panic!("{}: {e}", c.name));
    Status::from_answer(q.kind, solver.run(&q).answer)
}

pub const CALCS: &[Calc] = &[
    Calc { name: "MPSCstab1", pre: "(flag = 1 => msg = 1) /\\ true", assign: "msg := 1", post: "flag = 1 => msg = 1", valid: true },
    Calc { name: "MPSCstab2", pre: "(flag = 1 => msg = 1) /\\ msg = 1", assign: "flag := 1", post: "flag = 1 => msg = 1", valid: true },
    Calc { name: "MPstab2", pre: "(flag = 1 => msg = 1) /\\ B(msg = 1)", assign: "flag := 1", post: "flag = 1 => msg = 1", valid: true },
    Calc {
        name: "mattsexamplestab1",
        pre: "((sofar(msg = 0) /\\ flag = 0) \\/ msg = 1) /\\ hat(true)",
        assign: "msg := 1",
        post: "(sofar(msg = 0) /\\ flag = 0) \\/ msg = 1",
        valid: true,
    },
    Calc {
        name: "mattsexamplestab2",
        pre: "((sofar(msg = 0) /\\ flag = 0) \\/ msg = 1) /\\ hat(msg = 1)",
        assign: "flag := 1",
        post: "(sofar(msg = 0) /\\ flag = 0) \\/ msg = 1",
        valid: true,
    },
    Calc {
        name: "mattsexampleimp1",
        pre: "(sofar(msg = 0) /\\ flag = 0) \\/ msg = 1",
        assign: "r1 := flag",
        post: "r1 = 1 => msg = 1",
        valid: true,
    },
    Calc {
        name: "almostWRCproxystab2",
        pre: "B(r1 = 1 => msg = 1) /\\ hat(true)",
        assign: "msg := 1",
        post: "B(r1 = 1 => msg = 1)",
        valid: true,
    },
    Calc {
        name: "almostWRCreceiverstab1",
        pre: "(flag = 1 => msg = 1) /\\ A != 1",
        assign: "[A]. flag := A",
        post: "flag = 1 => msg = 1",
        valid: true,
    },
    Calc {
        name: "almostISA2stab1",
        pre: "(flag = 1 => B(msg = 1)) /\\ hat(true)",
        assign: "msg := 1",
        post: "flag = 1 => B(msg = 1)",
        valid: true,
    },
    Calc {
        name: "almostISA2stab2",
        pre: "(flag = 1 => B(msg = 1)) /\\ hat(B(msg = 1))",
        assign: "flag := 1",
        post: "flag = 1 => B(msg = 1)",
        valid: true,
    },
    Calc {
        name: "2+2Wstab.1",
        pre: "(x = 1 => !ouat(y = 1 /\\ ouat(y = 2))) /\\ hat(B(sofar(y != 2))) /\\ x = x^",
        assign: "x := 1",
        post: "x = 1 => !ouat(y = 1 /\\ ouat(y = 2))",
        valid: true,
    },
    Calc {
        name: "2+2Wstab.2",
        pre: "(x = 1 => !ouat(y = 1 /\\ ouat(y = 2))) /\\ hat(B(ouat(x = 1))) /\\ y = y^",
        assign: "y := 2",
        post: "x = 1 => !ouat(y = 1 /\\ ouat(y = 2))",
        valid: true,
    },
    Calc {
        name: "2+2Wstab.3",
        pre: "ouat(x = 2) /\\ (x = 1 => !ouat(y = 1 /\\ ouat(y = 2))) /\\ hat(B(sofar(x != 2))) /\\ y = y^",
        assign: "y := 1",
        post: "x = 1 => !ouat(y = 1 /\\ ouat(y = 2))",
        valid: true,
    },
    Calc {
        name: "2+2Wstab.4",
        pre: "(x = 1 => !ouat(y = 1 /\\ ouat(y = 2))) /\\ hat(B(ouat(y = 1))) /\\ y = y^",
        assign: "x := 2",
        post: "x = 1 => !ouat(y = 1 /\\ ouat(y = 2))",
        valid: true,
    },
    Calc {
        name: "LBstab1",
        pre: "sofar(x = (0, 0) /\\ (y = (0, 0) \\/ y = (1, 0))) /\\ hat(B(y = (0, 0)) /\\ x = (1, 0))",
        assign: "y := 1, 1",
        post: "sofar(x = (0, 0) /\\ (y = (0, 0) \\/ y = (1, 0)))",
        valid: true,
    },
    Calc {
        name: "Rstab.1",
        pre: "(y = 2 \\/ y = 1 /\\ y_c(2, 1)) /\\ hat(B(x = 1))",
        assign: "y := 1",
        post: "y = 2 \\/ y = 1 /\\ y_c(2, 1)",
        valid: true,
    },
    Calc {
        name: "boParallelismAbusedinstability1",
        pre: "B(msg = 0 /\\ flag = 0) /\\ B(flag = 0)",
        assign: "flag := 1",
        post: "B(msg = 0 /\\ flag = 0)",
        valid: false,
    },
    Calc {
        name: "loParallelismAbusedinstability1",
        pre: "B(msg = 0 /\\ flag = 0) /\\ B(msg = 0 /\\ flag = 0)",
        assign: "flag := 1",
        post: "B(msg = 0 /\\ flag = 0)",
        valid: false,
    },
    Calc {
        name: "uoinstabilitycheck",
        pre: "tw(U(msg = 0)) /\\ dtw(U(msg = 0))",
        assign: "msg := 1",
        post: "tw(U(msg = 0))",
        valid: false,
    },
];

use lacecheck::oracle::{check_validity, OracleConfig, OracleError, OracleVerdict};
use lacecheck::smt::{grid_for, Bounds};
use rand::Rng;

/// Random assertion text over x, y and r1, with at most one accent family.
pub struct Gen<'a, R: Rng> {
    pub rng: &'a mut R,
    pub accents: &'static [&'static str],
}

impl<R: Rng> Gen<'_, R> {
    fn atom(&mut self) -> String {
        let v = ["x", "y"][self.rng.gen_range(0..2)];
        let n = self.rng.gen_range(0..2);
        match self.rng.gen_range(0..6) {
            0 => "x = y".into(),
            1 => format!("r1 = {n}"),
            2 => format!("{v}_c(0, 1)"),
            3 => format!("{v} != {n}"),
            _ => format!("{v} = {n}"),
        }
    }

    pub fn formula(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return self.atom();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..11) {
            0 => format!("!({})", self.formula(d)),
            1 => format!("({}) /\\ ({})", self.formula(d), self.formula(d)),
            2 => format!("({}) \\/ ({})", self.formula(d), self.formula(d)),
            3 => format!("({}) => ({})", self.formula(d), self.formula(d)),
            4 => format!("B({})", self.formula(d)),
            5 => format!("U({})", self.formula(d)),
            6 => format!("sofar({})", self.formula(d)),
            7 => format!("ouat({})", self.formula(d)),
            8 => format!("({}) since ({})", self.formula(d), self.formula(d)),
            _ if !self.accents.is_empty() => {
                let a = self.accents[self.rng.gen_range(0..self.accents.len())];
                format!("{a}({})", self.formula(d))
            }
            _ => self.atom(),
        }
    }

    /// An implication, half the time built from a law so that valid
    /// instances are common.
    pub fn instance(&mut self) -> String {
        let p = self.formula(2);
        let q = self.formula(2);
        match self.rng.gen_range(0..8) {
            0 => format!("B({p}) => {p}"),
            1 => format!("sofar({p}) => U({p})"),
            2 => format!("({p}) since ({q}) => ouat({q})"),
            3 => format!("{p} => ouat({p})"),
            _ => format!("({p}) => ({q})"),
        }
    }
}

pub enum Agreement {
    Same(bool),
    Differ { oracle: bool, solver: Status },
    /// The solver gave up within its timeout.
    Undecided,
    Skipped,
}

/// Bounded validity of `src` by enumeration and by the solver, over the
/// same value range and instants.
pub fn differential(solver: &Solver, src: &str, max_value: i64, instants: usize) -> Agreement {
    let e = parse_assertion_internal(src).unwrap_or_else(|err| panic!("{src}: {err}"));
    let grid = grid_for(&e);
    // Accented grids need an instant strictly between himin and 0.
    let instants = if grid.now == 1 { instants.max(4) } else { instants };
    let cfg = OracleConfig { max_value, instants, ..OracleConfig::default() };
    let oracle = match check_validity(&e, &cfg) {
        Ok(OracleVerdict::Valid) => true,
        Ok(OracleVerdict::Counter(_)) => false,
        Err(OracleError::TooLarge(_)) | Err(OracleError::Unsupported(_)) => return Agreement::Skipped,
        Err(err) => panic!("{src}: {err}"),
    };
    let ctx = EmbedCtx { bounds: Some(Bounds { max_value, himin: cfg.himin(grid) }), ..Default::default() };
    let q = match validity_query(&e, &ctx, false) {
        Ok(q) => q,
        Err(_) => return Agreement::Skipped,
    };
    let s = Status::from_answer(q.kind, solver.run(&q).answer);
    match (oracle, s) {
        (true, Status::Valid) | (false, Status::Invalid) => Agreement::Same(oracle),
        (_, Status::Timeout | Status::Unknown) => Agreement::Undecided,
        _ => Agreement::Differ { oracle, solver: s },
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Duration;

/// Decided instances required, and how many disagreements are tolerated.
pub const DIFF_INSTANCES: usize = 1000;
pub const DIFF_TOLERATED: usize = 0;
/// Per-query solver budget; a query that exhausts it counts as undecided.
pub const DIFF_TIMEOUT: Duration = Duration::from_secs(5);

pub struct DiffSummary {
    pub same: usize,
    pub valid: usize,
    pub undecided: usize,
    pub skipped: usize,
    pub differ: Vec<String>,
}

impl DiffSummary {
    pub fn line(&self) -> String {
        format!(
            "{} agree ({} valid), {} differ, {} undecided, {} skipped",
            self.same,
            self.valid,
            self.differ.len(),
            self.undecided,
            self.skipped
        )
    }

    pub fn ok(&self) -> bool {
        self.differ.len() <= DIFF_TOLERATED
            && self.same >= DIFF_INSTANCES
            && self.valid >= 100
            && self.same - self.valid >= 100
    }
}

/// Random implications over x, y and r1, a third each without accents,
/// with hats and hooks, and with twiddles, decided with values 0..=1.
pub fn differential_suite() -> DiffSummary {
    let solver = Solver::new(SolverConfig { timeout: DIFF_TIMEOUT, ..SolverConfig::default() }).expect("z3 on PATH");
    let mut rng = ChaCha8Rng::seed_from_u64(0x1ace);
    let families: [&'static [&'static str]; 3] = [&[], &["hat", "dhat", "hook"], &["tw", "dtw"]];
    let cases: Vec<String> =
        (0..DIFF_INSTANCES * 2).map(|k| Gen { rng: &mut rng, accents: families[k % 3] }.instance()).collect();
    let results: Vec<(String, Agreement)> =
        cases.into_par_iter().map(|src| (src.clone(), differential(&solver, &src, 1, 3))).collect();
    let mut s = DiffSummary { same: 0, valid: 0, undecided: 0, skipped: 0, differ: Vec::new() };
    for (src, a) in results {
        match a {
            Agreement::Same(v) => {
                s.same += 1;
                s.valid += v as usize;
            }
            Agreement::Differ { oracle, solver } => s.differ.push(format!("{src}: oracle {oracle}, solver {}", solver.name())),
            Agreement::Undecided => s.undecided += 1,
            Agreement::Skipped => s.skipped += 1,
        }
    }
    s
}
