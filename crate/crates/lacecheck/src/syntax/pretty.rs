//! Canonical text for assertions and programs. The output parses back to
//! the same AST (accented forms need the internal assertion parser).

use super::ast::*;
use crate::assertion::{ArithOp, Expr, Quant, Reg};
use std::fmt::Write;

const AT: u8 = 0;
const QUANT: u8 = 1;
const IFF: u8 = 2;
const IMPLIES: u8 = 3;
const SINCE: u8 = 4;
const OR: u8 = 5;
const AND: u8 = 6;
const NOT: u8 = 7;
const CMP: u8 = 8;
const ADD: u8 = 9;
const MUL: u8 = 10;
const NEG: u8 = 11;
const ATOM: u8 = 12;

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, AT);
    s
}

pub fn reg_to_string(r: &Reg) -> String {
    let mut s = r.name.clone();
    match r.primes {
        0 => {}
        1 => s.push('\''),
        n => {
            let _ = write!(s, "'{n}");
        }
    }
    match r.thread {
        Some(t) => format!("({t}:{s})"),
        None => s,
    }
}

fn level(e: &Expr) -> u8 {
    match e {
        Expr::AtThread(..) => AT,
        Expr::Quant(..) => QUANT,
        Expr::Iff(..) => IFF,
        Expr::Implies(..) => IMPLIES,
        Expr::Since(..) => SINCE,
        Expr::Or(v) if v.len() > 1 => OR,
        Expr::And(v) if v.len() > 1 => AND,
        Expr::Or(v) | Expr::And(v) => match v.first() {
            Some(x) => level(x),
            None => ATOM,
        },
        Expr::Not(_) => NOT,
        Expr::Cmp(..) => CMP,
        Expr::Arith(ArithOp::Add | ArithOp::Sub, ..) => ADD,
        Expr::Arith(..) => MUL,
        Expr::Neg(_) => NEG,
        Expr::Int(n) if *n < 0 => NEG,
        _ => ATOM,
    }
}

/// Writes `e` so that it parses correctly in a context that requires
/// binding strength at least `min`.
fn write_expr(s: &mut String, e: &Expr, min: u8) {
    let lv = level(e);
    // Quantifiers extend as far right as possible, so they are always
    // parenthesised unless they stand alone.
    let paren = lv < min || (lv == QUANT && min > QUANT);
    if paren {
        s.push('(');
    }
    write_bare(s, e);
    if paren {
        s.push(')');
    }
}

fn write_bare(s: &mut String, e: &Expr) {
    match e {
        Expr::Bool(b) => s.push_str(if *b { "true" } else { "false" }),
        Expr::Int(n) => {
            let _ = write!(s, "{n}");
        }
        Expr::Var(v, a) => {
            s.push_str(v);
            s.push_str(a.suffix());
        }
        Expr::Reg(r) => s.push_str(&reg_to_string(r)),
        Expr::Logical(n) => s.push_str(n),
        Expr::Tuple(xs) => {
            s.push('(');
            for (k, x) in xs.iter().enumerate() {
                if k > 0 {
                    s.push_str(", ");
                }
                write_expr(s, x, AT);
            }
            s.push(')');
        }
        Expr::Proj(x, k) => {
            write_expr(s, x, ATOM);
            let _ = write!(s, ".{k}");
        }
        Expr::Neg(x) => {
            s.push('-');
            write_expr(s, x, NEG);
        }
        Expr::Arith(op, a, b) => {
            let lv = level(e);
            write_expr(s, a, lv);
            let _ = write!(s, " {} ", op.symbol());
            write_expr(s, b, lv + 1);
        }
        Expr::Cmp(op, a, b) => {
            write_expr(s, a, ADD);
            let _ = write!(s, " {} ", op.symbol());
            write_expr(s, b, ADD);
        }
        Expr::Not(x) => {
            s.push('!');
            write_expr(s, x, NOT);
        }
        Expr::And(xs) | Expr::Or(xs) => {
            if xs.is_empty() {
                s.push_str(if matches!(e, Expr::And(_)) { "true" } else { "false" });
                return;
            }
            let (op, lv) = if matches!(e, Expr::And(_)) { (" /\\ ", AND) } else { (" \\/ ", OR) };
            for (k, x) in xs.iter().enumerate() {
                if k > 0 {
                    s.push_str(op);
                }
                write_expr(s, x, lv + 1);
            }
        }
        Expr::Implies(a, b) => {
            write_expr(s, a, SINCE);
            s.push_str(" => ");
            write_expr(s, b, IMPLIES);
        }
        Expr::Iff(a, b) => {
            write_expr(s, a, IFF);
            s.push_str(" <=> ");
            write_expr(s, b, IMPLIES);
        }
        Expr::Since(a, b) => {
            write_expr(s, a, SINCE);
            s.push_str(" since ");
            write_expr(s, b, OR);
        }
        Expr::Quant(q, vs, body) => {
            s.push_str(match q {
                Quant::Exists => "exists ",
                Quant::Forall => "forall ",
            });
            s.push_str(&vs.join(", "));
            s.push_str(". ");
            write_expr(s, body, IFF);
        }
        Expr::Modal(m, x) => {
            s.push_str(m.name());
            s.push('(');
            write_expr(s, x, AT);
            s.push(')');
        }
        Expr::Shift(a, x) => {
            s.push_str(a.keyword());
            s.push('(');
            write_expr(s, x, AT);
            s.push(')');
        }
        Expr::AtThread(x, n) => {
            write_expr(s, x, QUANT);
            let _ = write!(s, " @@ {n}");
        }
        Expr::Coh(v, a, b) => {
            let _ = write!(s, "{v}_c(");
            write_expr(s, a, ADD);
            s.push_str(", ");
            write_expr(s, b, ADD);
            s.push(')');
        }
        Expr::Cv(v) => {
            let _ = write!(s, "cv({v})");
        }
        Expr::Sat(x) => {
            s.push_str("sat(");
            write_expr(s, x, AT);
            s.push(')');
        }
    }
}

pub fn knot_to_string(k: &Knot) -> String {
    match k {
        Knot::Simple(st) => {
            let parts: Vec<String> = st.iter().map(stitch_to_string).collect();
            if parts.is_empty() {
                "{* *}".to_string()
            } else {
                format!("{{* {} *}}", parts.join("; "))
            }
        }
        Knot::Or(a, b) => {
            let l = knot_to_string(a);
            let r = match **b {
                Knot::Simple(_) => knot_to_string(b),
                _ => format!("({})", knot_to_string(b)),
            };
            let l = match **a {
                Knot::Iter(..) => format!("({l})"),
                _ => l,
            };
            format!("{l} | {r}")
        }
        Knot::Iter(a, b) => {
            let wrap = |k: &Knot| match k {
                Knot::Iter(..) => format!("({})", knot_to_string(k)),
                _ => knot_to_string(k),
            };
            format!("{} |> {}", wrap(a), wrap(b))
        }
    }
}

pub fn stitch_to_string(s: &Stitch) -> String {
    let mut out = format!("{} {}", s.source, s.ordering.name());
    if let Some(sp) = &s.sourcepost {
        let _ = write!(out, " {{{}}}", expr_to_string(sp));
    }
    let _ = write!(out, ": {}", expr_to_string(&s.embroidery));
    out
}

pub fn assign_to_string(a: &Assign) -> String {
    let t: Vec<&str> = a.targets.iter().map(|t| t.name().unwrap_or("_")).collect();
    let e: Vec<String> = a
        .exprs
        .iter()
        .map(|e| {
            let mut s = String::new();
            write_expr(&mut s, e, ADD);
            s
        })
        .collect();
    format!("{} := {}", t.join(", "), e.join(", "))
}

pub fn interference_to_string(i: &Interference) -> String {
    let mut s = String::new();
    if !i.binders.is_empty() {
        let _ = write!(s, "[{}]. ", i.binders.join(", "));
    }
    let _ = write!(s, "{} | {}", expr_to_string(&i.pre), assign_to_string(&i.assign));
    s
}

pub fn program_to_string(p: &Program) -> String {
    let mut s = String::new();
    if p.pragmas.sc {
        s.push_str("pragma sc;\n");
    }
    let _ = writeln!(s, "{{ init: {} }}", expr_to_string(&p.init));
    for (k, t) in p.threads.iter().enumerate() {
        if k > 0 {
            s.push_str("||\n");
        }
        s.push_str("thread {\n");
        for (kw, list) in [("guar", &t.guar), ("rely", &t.rely)] {
            if let Some(list) = list {
                if list.is_empty() {
                    let _ = writeln!(s, "  {kw} [ ]");
                } else {
                    let _ = writeln!(s, "  {kw} [");
                    for (j, i) in list.iter().enumerate() {
                        let sep = if j + 1 < list.len() { ";" } else { "" };
                        let _ = writeln!(s, "    {}{sep}", interference_to_string(i));
                    }
                    s.push_str("  ]\n");
                }
            }
        }
        write_seq(&mut s, &t.body, 1);
        if let Some(post) = &t.post {
            let _ = writeln!(s, "  {}", knot_to_string(post));
        }
        s.push_str("}\n");
    }
    if let Some(f) = &p.final_ {
        let _ = writeln!(s, "{{ final: {} }}", expr_to_string(f));
    }
    s
}

fn indent(s: &mut String, depth: usize) {
    for _ in 0..depth {
        s.push_str("  ");
    }
}

fn write_seq(s: &mut String, body: &[Stmt], depth: usize) {
    for (k, st) in body.iter().enumerate() {
        write_stmt(s, st, depth);
        if k + 1 < body.len() {
            s.push(';');
        }
        s.push('\n');
    }
}

fn control_to_string(c: &Control) -> String {
    let mut s = String::new();
    if let Some(k) = &c.knot {
        s.push_str(&knot_to_string(k));
        s.push(' ');
    }
    let _ = write!(s, "{}: {}", c.label, expr_to_string(&c.cond));
    s
}

fn write_stmt(s: &mut String, st: &Stmt, depth: usize) {
    indent(s, depth);
    match st {
        Stmt::Cmd(c) => {
            if let Some(k) = &c.knot {
                s.push_str(&knot_to_string(k));
                s.push(' ');
            }
            if let Some(p) = &c.intfpre {
                let _ = write!(s, "[* {} *] ", expr_to_string(p));
            }
            let _ = write!(s, "{}: ", c.label);
            match &c.cmd {
                Cmd::Skip => s.push_str("skip"),
                Cmd::Assert(p) => {
                    let _ = write!(s, "assert {}", expr_to_string(p));
                }
                Cmd::Assign(a) => s.push_str(&assign_to_string(a)),
            }
        }
        Stmt::If { ctrl, then_, else_ } => {
            let _ = writeln!(s, "if {} then", control_to_string(ctrl));
            write_seq(s, then_, depth + 1);
            if let Some(e) = else_ {
                indent(s, depth);
                s.push_str("else\n");
                write_seq(s, e, depth + 1);
            }
            indent(s, depth);
            s.push_str("fi");
        }
        Stmt::While { ctrl, body } => {
            let _ = writeln!(s, "while {} do", control_to_string(ctrl));
            write_seq(s, body, depth + 1);
            indent(s, depth);
            s.push_str("od");
        }
        Stmt::DoUntil { body, ctrl } => {
            s.push_str("do\n");
            write_seq(s, body, depth + 1);
            indent(s, depth);
            let _ = write!(s, "until {}", control_to_string(ctrl));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_assertion, parse_assertion_internal};

    #[test]
    fn assertion_round_trip() {
        for src in [
            "x = 1 => y = 2 => z = 3",
            "(x = 1 => y = 2) => z = 3",
            "U(x = 1) since y = 0",
            "r1 = 0 => (U(x = 1) since y = 0)",
            "!(x = 1 /\\ y = 2) \\/ ouat(x = 2 /\\ ouat(y = 1))",
            "exists A. flag = (1, A) /\\ A - (1 - 2) = 3",
            "x_c(1, 2) /\\ cv(x)",
            "x = 1 /\\ (exists A. y = A) /\\ z = 2",
            "(1:r1) = 1 /\\ r2 % 3 != 0",
        ] {
            let e = parse_assertion(src).unwrap();
            let printed = expr_to_string(&e);
            assert_eq!(parse_assertion(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }

    #[test]
    fn internal_forms_round_trip() {
        let e = parse_assertion_internal("hook(B(x = 1)) /\\ x' = 1 /\\ r1'2 = y^^ /\\ Fandw(z~ = 1)").unwrap();
        let printed = expr_to_string(&e);
        assert_eq!(parse_assertion_internal(&printed).unwrap(), e);
    }
}
