use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::{macros, validate, FrontendError, ParseError};
use crate::assertion::{classify_name, Accent, ArithOp, CmpOp, Expr, Modality, NameClass, Quant, Reg};

const KEYWORDS: &[&str] = &[
    "init", "final", "thread", "guar", "rely", "if", "then", "else", "fi", "while", "do", "od", "until", "skip",
    "assert", "true", "false", "since", "sofar", "ouat", "exists", "forall", "pragma", "macro", "lo", "bo", "uo", "go",
    "sat", "cv", "hook", "hat", "dhat", "tw", "dtw", "Fandw", "post",
];

/// Parses and validates a program: labels, stitch sources and naming.
pub fn parse_program(src: &str) -> Result<Program, FrontendError> {
    let p = parse_program_unchecked(src)?;
    validate::check_structure(&p)?;
    Ok(p)
}

/// Parses a program without the label and naming checks.
pub fn parse_program_unchecked(src: &str) -> Result<Program, ParseError> {
    let toks = macros::expand(lex(src)?)?;
    let mut p = Parser { toks, i: 0, internal: false };
    let prog = p.program()?;
    Ok(prog)
}

/// Parses a user-level assertion (no accents, hooks or internal modalities).
pub fn parse_assertion(src: &str) -> Result<Expr, ParseError> {
    parse_assertion_mode(src, false)
}

/// Parses an assertion that may contain accented variables (`x'`, `x^`,
/// `x^^`, `x~`, `x~~`), whole-formula accents (`hook(P)`, `hat(P)`, ...),
/// `Fandw(P)` and `sat(P)`.
pub fn parse_assertion_internal(src: &str) -> Result<Expr, ParseError> {
    parse_assertion_mode(src, true)
}

fn parse_assertion_mode(src: &str, internal: bool) -> Result<Expr, ParseError> {
    let toks = macros::expand(lex(src)?)?;
    let mut p = Parser { toks, i: 0, internal };
    let e = p.assertion()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    internal: bool,
}

type R<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn tok_at(&self, k: usize) -> &Token {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j]
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }

    fn err<T>(&self, what: &str) -> R<T> {
        Err(ParseError::at(self.pos(), format!("expected {what}, found {}", self.describe())))
    }

    fn expect_sym(&mut self, s: &str) -> R<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, s: &str) -> R<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            self.err(&format!("`{s}`"))
        }
    }

    fn expect_eof(&self) -> R<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.err("end of input")
        }
    }

    fn ident(&mut self) -> R<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let p = self.pos();
                self.bump();
                Ok((s, p))
            }
            _ => self.err("identifier"),
        }
    }

    fn int(&mut self) -> R<i64> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.err("integer"),
        }
    }

    // ---------------------------------------------------------------- program

    fn program(&mut self) -> R<Program> {
        let mut pragmas = Pragmas::default();
        while self.eat_kw("pragma") {
            let (name, pos) = self.ident()?;
            match name.as_str() {
                "sc" => pragmas.sc = true,
                _ => return Err(ParseError::at(pos, format!("unknown pragma `{name}`"))),
            }
            self.expect_sym(";")?;
        }
        self.expect_sym("{")?;
        self.expect_kw("init")?;
        self.expect_sym(":")?;
        let init = self.assertion()?;
        self.expect_sym("}")?;
        let mut threads = Vec::new();
        while self.is_kw("thread") {
            threads.push(self.thread()?);
            self.eat_sym("||");
        }
        let mut final_ = None;
        if self.eat_sym("{") {
            self.expect_kw("final")?;
            self.expect_sym(":")?;
            final_ = Some(self.assertion()?);
            self.expect_sym("}")?;
        }
        self.expect_eof()?;
        Ok(Program { pragmas, init, threads, final_ })
    }

    fn thread(&mut self) -> R<Thread> {
        let pos = self.pos();
        self.expect_kw("thread")?;
        self.expect_sym("{")?;
        let mut guar = None;
        let mut rely = None;
        loop {
            if self.is_kw("guar") {
                let p = self.pos();
                self.bump();
                if guar.is_some() {
                    return Err(ParseError::at(p, "duplicate guarantee"));
                }
                guar = Some(self.interference_list()?);
            } else if self.is_kw("rely") {
                let p = self.pos();
                self.bump();
                if rely.is_some() {
                    return Err(ParseError::at(p, "duplicate rely"));
                }
                rely = Some(self.interference_list()?);
            } else {
                break;
            }
        }
        let (body, post) = self.seq(true)?;
        self.expect_sym("}")?;
        Ok(Thread { guar, rely, body, post, pos })
    }

    fn interference_list(&mut self) -> R<Vec<Interference>> {
        self.expect_sym("[")?;
        let mut out = Vec::new();
        if self.eat_sym("]") {
            return Ok(out);
        }
        loop {
            out.push(self.interference()?);
            if self.eat_sym(";") {
                if self.eat_sym("]") {
                    break;
                }
                continue;
            }
            self.expect_sym("]")?;
            break;
        }
        Ok(out)
    }

    fn interference(&mut self) -> R<Interference> {
        let mut binders = Vec::new();
        if self.is_sym("[") {
            self.bump();
            loop {
                let (n, p) = self.ident()?;
                if classify_name(&n) != NameClass::Logical {
                    return Err(ParseError::at(p, format!("quotient name `{n}` must start with an upper-case letter")));
                }
                binders.push(n);
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym("]")?;
            self.expect_sym(".")?;
        }
        let pre = self.assertion()?;
        self.expect_sym("|")?;
        let assign = self.assign()?;
        Ok(Interference { binders, pre, assign })
    }

    /// A sequence of statements. At thread level a trailing knot is the
    /// thread postcondition.
    fn seq(&mut self, top: bool) -> R<(Vec<Stmt>, Option<Knot>)> {
        let mut out = Vec::new();
        let mut only_post = false;
        loop {
            if self.seq_ends() {
                return Ok((out, None));
            }
            let start = self.pos();
            let knot = if self.is_sym("{*") || self.is_sym("(") { Some(self.knot()?) } else { None };
            if let Some(k) = knot.clone() {
                if self.seq_ends() {
                    if !top {
                        return Err(ParseError::at(start, "a thread postcondition knot may only end a thread"));
                    }
                    if !self.is_sym("}") {
                        return self.err("`}`");
                    }
                    return Ok((out, Some(k)));
                }
            }
            if only_post {
                return Err(ParseError::at(start, "expected `;` between statements"));
            }
            out.push(self.stmt(knot)?);
            if self.eat_sym(";") || self.seq_ends() {
                continue;
            }
            // Without `;` only the thread postcondition knot may follow.
            if top && (self.is_sym("{*") || self.is_sym("(")) {
                only_post = true;
                continue;
            }
            return self.err("`;`");
        }
    }

    fn seq_ends(&self) -> bool {
        self.is_sym("}") || self.is_kw("fi") || self.is_kw("else") || self.is_kw("od") || self.is_kw("until")
    }

    fn stmt(&mut self, knot: Option<Knot>) -> R<Stmt> {
        if self.is_kw("if") {
            if knot.is_some() {
                return Err(ParseError::at(self.pos(), "a knot goes after `if`, before the control label"));
            }
            self.bump();
            let ctrl = self.control()?;
            self.expect_kw("then")?;
            let (then_, _) = self.seq(false)?;
            let else_ = if self.eat_kw("else") { Some(self.seq(false)?.0) } else { None };
            self.expect_kw("fi")?;
            return Ok(Stmt::If { ctrl, then_, else_ });
        }
        if self.is_kw("while") {
            if knot.is_some() {
                return Err(ParseError::at(self.pos(), "a knot goes after `while`, before the control label"));
            }
            self.bump();
            let ctrl = self.control()?;
            self.expect_kw("do")?;
            let (body, _) = self.seq(false)?;
            self.expect_kw("od")?;
            return Ok(Stmt::While { ctrl, body });
        }
        if self.is_kw("do") {
            if knot.is_some() {
                return Err(ParseError::at(self.pos(), "a knot goes after `until`, before the control label"));
            }
            self.bump();
            let (body, _) = self.seq(false)?;
            self.expect_kw("until")?;
            let ctrl = self.control()?;
            return Ok(Stmt::DoUntil { body, ctrl });
        }
        let intfpre = if self.eat_sym("[*") {
            let e = self.assertion()?;
            self.expect_sym("*]")?;
            Some(e)
        } else {
            None
        };
        let (label, pos) = self.ident()?;
        self.expect_sym(":")?;
        let cmd = if self.eat_kw("skip") {
            Cmd::Skip
        } else if self.eat_kw("assert") {
            Cmd::Assert(self.assertion()?)
        } else {
            Cmd::Assign(self.assign()?)
        };
        Ok(Stmt::Cmd(Component { knot, intfpre, label, cmd, pos }))
    }

    fn control(&mut self) -> R<Control> {
        let knot = if self.is_sym("{*") || self.is_sym("(") { Some(self.knot()?) } else { None };
        let (label, pos) = self.ident()?;
        self.expect_sym(":")?;
        let cond = self.assertion()?;
        Ok(Control { knot, label, cond, pos })
    }

    fn assign(&mut self) -> R<Assign> {
        let mut targets = Vec::new();
        loop {
            if self.eat_sym("_") {
                targets.push(Target::Discard);
            } else {
                let (n, p) = self.ident()?;
                match classify_name(&n) {
                    NameClass::Logical => {
                        return Err(ParseError::at(p, format!("cannot assign to logical name `{n}`")));
                    }
                    NameClass::Register | NameClass::AuxRegister => targets.push(Target::Reg(n)),
                    NameClass::Variable | NameClass::AuxVariable => targets.push(Target::Var(n)),
                }
            }
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym(":=")?;
        let mut exprs = vec![self.arith()?];
        while self.eat_sym(",") {
            exprs.push(self.arith()?);
        }
        Ok(Assign { targets, exprs })
    }

    // ------------------------------------------------------------------ knots

    fn knot(&mut self) -> R<Knot> {
        let first = self.knot_alt()?;
        if self.eat_sym("|>") {
            let rest = self.knot_alt()?;
            return Ok(Knot::Iter(Box::new(first), Box::new(rest)));
        }
        Ok(first)
    }

    fn knot_alt(&mut self) -> R<Knot> {
        let mut k = self.knot_prim()?;
        while self.is_sym("|") {
            self.bump();
            let r = self.knot_prim()?;
            k = Knot::Or(Box::new(k), Box::new(r));
        }
        Ok(k)
    }

    fn knot_prim(&mut self) -> R<Knot> {
        if self.eat_sym("(") {
            let k = self.knot()?;
            self.expect_sym(")")?;
            return Ok(k);
        }
        self.expect_sym("{*")?;
        let mut stitches = Vec::new();
        if self.eat_sym("*}") {
            return Ok(Knot::Simple(stitches));
        }
        loop {
            stitches.push(self.stitch()?);
            if self.eat_sym(";") {
                if self.eat_sym("*}") {
                    break;
                }
                continue;
            }
            self.expect_sym("*}")?;
            break;
        }
        Ok(Knot::Simple(stitches))
    }

    fn stitch(&mut self) -> R<Stitch> {
        let pos = self.pos();
        let source = match self.peek().clone() {
            Tok::Ident(s) if s == "init" => {
                self.bump();
                LabelRef::plain("init")
            }
            _ => {
                let (s, _) = self.ident()?;
                split_arm(&s)
            }
        };
        let ordering = match self.peek().clone() {
            Tok::Ident(s) => match s.as_str() {
                "lo" => Ordering::Lo,
                "bo" => Ordering::Bo,
                "uo" => Ordering::Uo,
                "go" => Ordering::Go,
                _ => return self.err("ordering `lo`, `bo`, `uo` or `go`"),
            },
            _ => return self.err("ordering `lo`, `bo`, `uo` or `go`"),
        };
        self.bump();
        let sourcepost = if self.eat_sym("{") {
            let e = self.assertion()?;
            self.expect_sym("}")?;
            Some(e)
        } else {
            None
        };
        let embroidery = if self.eat_sym(":") { self.assertion()? } else { Expr::tt() };
        Ok(Stitch { source, ordering, sourcepost, embroidery, pos })
    }

    // ------------------------------------------------------------- assertions

    fn assertion(&mut self) -> R<Expr> {
        let e = self.iff()?;
        if self.eat_sym("@@") {
            let n = self.int()?;
            return Ok(Expr::AtThread(Box::new(e), n as usize));
        }
        Ok(e)
    }

    fn quantified(&mut self) -> R<Expr> {
        let q = if self.eat_kw("exists") {
            Quant::Exists
        } else {
            self.expect_kw("forall")?;
            Quant::Forall
        };
        let mut names = Vec::new();
        loop {
            let (n, p) = self.ident()?;
            if classify_name(&n) != NameClass::Logical {
                return Err(ParseError::at(p, format!("bound name `{n}` must start with an upper-case letter")));
            }
            names.push(n);
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym(".")?;
        let body = self.iff()?;
        Ok(Expr::Quant(q, names, Box::new(body)))
    }

    fn iff(&mut self) -> R<Expr> {
        let mut e = self.implies()?;
        while self.eat_sym("<=>") {
            let r = self.implies()?;
            e = Expr::Iff(Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    fn implies(&mut self) -> R<Expr> {
        let e = self.since()?;
        if self.eat_sym("=>") {
            let r = self.implies()?;
            return Ok(Expr::Implies(Box::new(e), Box::new(r)));
        }
        Ok(e)
    }

    fn since(&mut self) -> R<Expr> {
        let mut e = self.or()?;
        while self.eat_kw("since") {
            let r = self.or()?;
            e = Expr::Since(Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    fn or(&mut self) -> R<Expr> {
        let mut items = vec![self.and()?];
        while self.eat_sym("\\/") {
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Or(items) })
    }

    fn and(&mut self) -> R<Expr> {
        let mut items = vec![self.not()?];
        while self.eat_sym("/\\") {
            items.push(self.not()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::And(items) })
    }

    fn not(&mut self) -> R<Expr> {
        if self.eat_sym("!") {
            let e = self.not()?;
            return Ok(Expr::Not(Box::new(e)));
        }
        if self.is_kw("exists") || self.is_kw("forall") {
            return self.quantified();
        }
        self.cmp()
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        match self.peek() {
            Tok::Sym("=") => Some(CmpOp::Eq),
            Tok::Sym("!=") => Some(CmpOp::Ne),
            Tok::Sym("<") => Some(CmpOp::Lt),
            Tok::Sym("<=") => Some(CmpOp::Le),
            Tok::Sym(">") => Some(CmpOp::Gt),
            Tok::Sym(">=") => Some(CmpOp::Ge),
            _ => None,
        }
    }

    fn cmp(&mut self) -> R<Expr> {
        let first = self.arith()?;
        let mut operands = vec![first];
        let mut ops = Vec::new();
        while let Some(op) = self.cmp_op() {
            self.bump();
            ops.push(op);
            operands.push(self.arith()?);
        }
        if ops.is_empty() {
            return Ok(operands.pop().unwrap());
        }
        let mut links = Vec::new();
        for (k, op) in ops.iter().enumerate() {
            links.push(Expr::Cmp(*op, Box::new(operands[k].clone()), Box::new(operands[k + 1].clone())));
        }
        Ok(if links.len() == 1 { links.pop().unwrap() } else { Expr::And(links) })
    }

    fn arith(&mut self) -> R<Expr> {
        let mut e = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => ArithOp::Add,
                Tok::Sym("-") => ArithOp::Sub,
                _ => break,
            };
            self.bump();
            let r = self.term()?;
            e = Expr::Arith(op, Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    fn term(&mut self) -> R<Expr> {
        let mut e = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("*") => ArithOp::Mul,
                Tok::Sym("/") => ArithOp::Div,
                Tok::Sym("%") => ArithOp::Mod,
                _ => break,
            };
            self.bump();
            let r = self.unary()?;
            e = Expr::Arith(op, Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    fn unary(&mut self) -> R<Expr> {
        if self.eat_sym("-") {
            let e = self.unary()?;
            return Ok(match e {
                Expr::Int(n) => Expr::Int(-n),
                e => Expr::Neg(Box::new(e)),
            });
        }
        let mut e = self.primary()?;
        while self.is_sym(".") && !self.tok_at(0).spaced && matches!(self.peek_at(1), Tok::Int(_)) {
            self.bump();
            let k = self.int()?;
            e = Expr::Proj(Box::new(e), k as usize);
        }
        Ok(e)
    }

    fn paren_assertion(&mut self) -> R<Expr> {
        self.expect_sym("(")?;
        let e = self.assertion()?;
        self.expect_sym(")")?;
        Ok(e)
    }

    fn primary(&mut self) -> R<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Sym("(") => {
                // Thread-qualified register `(n:r)`.
                if matches!(self.peek_at(1), Tok::Int(_)) && *self.peek_at(2) == Tok::Sym(":") {
                    self.bump();
                    let n = self.int()? as usize;
                    self.expect_sym(":")?;
                    let (r, p) = self.ident()?;
                    if !matches!(classify_name(&r), NameClass::Register | NameClass::AuxRegister) {
                        return Err(ParseError::at(p, format!("`{r}` is not a register")));
                    }
                    self.expect_sym(")")?;
                    return Ok(Expr::Reg(Reg { name: r, primes: 0, thread: Some(n) }));
                }
                self.bump();
                let first = self.assertion()?;
                if self.eat_sym(",") {
                    let mut items = vec![first];
                    loop {
                        items.push(self.assertion()?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                    self.expect_sym(")")?;
                    return Ok(Expr::Tuple(items));
                }
                self.expect_sym(")")?;
                Ok(first)
            }
            Tok::Ident(name) => self.named(name, pos),
            _ => self.err("an expression"),
        }
    }

    fn named(&mut self, name: String, pos: Pos) -> R<Expr> {
        let next_is_paren = *self.peek_at(1) == Tok::Sym("(");
        let modal = |m| Some(m);
        let m = match name.as_str() {
            "B" if next_is_paren => modal(Modality::B),
            "U" if next_is_paren => modal(Modality::U),
            "sofar" => modal(Modality::Sofar),
            "ouat" => modal(Modality::Ouat),
            "Fandw" if self.internal => modal(Modality::Fandw),
            _ => None,
        };
        if let Some(m) = m {
            self.bump();
            let e = self.paren_assertion()?;
            return Ok(Expr::Modal(m, Box::new(e)));
        }
        match name.as_str() {
            "true" => {
                self.bump();
                return Ok(Expr::tt());
            }
            "false" => {
                self.bump();
                return Ok(Expr::ff());
            }
            "sat" => {
                self.bump();
                let e = self.paren_assertion()?;
                return Ok(Expr::Sat(Box::new(e)));
            }
            "cv" => {
                self.bump();
                self.expect_sym("(")?;
                let (v, p) = self.ident()?;
                if !matches!(classify_name(&v), NameClass::Variable | NameClass::AuxVariable) {
                    return Err(ParseError::at(p, format!("`{v}` is not a variable")));
                }
                self.expect_sym(")")?;
                return Ok(Expr::Cv(v));
            }
            "hook" | "hat" | "dhat" | "tw" | "dtw" => {
                if !self.internal {
                    return Err(ParseError::at(pos, format!("`{name}(...)` is only available in internal assertions")));
                }
                let acc = match name.as_str() {
                    "hook" => Accent::Hook,
                    "hat" => Accent::Hat,
                    "dhat" => Accent::DHat,
                    "tw" => Accent::Tw,
                    _ => Accent::DTw,
                };
                self.bump();
                let e = self.paren_assertion()?;
                return Ok(Expr::Shift(acc, Box::new(e)));
            }
            "exists" | "forall" => return self.quantified(),
            _ => {}
        }
        if KEYWORDS.contains(&name.as_str()) {
            return self.err("an expression");
        }
        self.bump();
        if let Some(v) = name.strip_suffix("_c") {
            if self.is_sym("(") && !v.is_empty() {
                self.bump();
                let a = self.arith()?;
                self.expect_sym(",")?;
                let b = self.arith()?;
                self.expect_sym(")")?;
                return Ok(Expr::Coh(v.to_string(), Box::new(a), Box::new(b)));
            }
        }
        match classify_name(&name) {
            NameClass::Logical => Ok(Expr::Logical(name)),
            NameClass::Register | NameClass::AuxRegister => {
                let mut primes = 0;
                if self.is_sym("'") && !self.tok_at(0).spaced {
                    if !self.internal {
                        return Err(ParseError::at(pos, "hooked registers are only available in internal assertions"));
                    }
                    self.bump();
                    primes = 1;
                    if let Tok::Int(n) = *self.peek() {
                        if !self.tok_at(0).spaced {
                            self.bump();
                            primes = n as u32;
                        }
                    }
                }
                Ok(Expr::Reg(Reg { name, primes, thread: None }))
            }
            NameClass::Variable | NameClass::AuxVariable => {
                let acc = if !self.tok_at(0).spaced {
                    match self.peek() {
                        Tok::Sym("'") => Some(Accent::Hook),
                        Tok::Sym("^") => Some(Accent::Hat),
                        Tok::Sym("^^") => Some(Accent::DHat),
                        Tok::Sym("~") => Some(Accent::Tw),
                        Tok::Sym("~~") => Some(Accent::DTw),
                        _ => None,
                    }
                } else {
                    None
                };
                match acc {
                    Some(a) => {
                        if !self.internal {
                            return Err(ParseError::at(pos, "accented variables are only available in internal assertions"));
                        }
                        self.bump();
                        Ok(Expr::Var(name, a))
                    }
                    None => Ok(Expr::Var(name, Accent::Plain)),
                }
            }
        }
    }
}

fn split_arm(s: &str) -> LabelRef {
    if let Some(l) = s.strip_suffix("_t") {
        return LabelRef { label: l.to_string(), arm: Some(true) };
    }
    if let Some(l) = s.strip_suffix("_f") {
        return LabelRef { label: l.to_string(), arm: Some(false) };
    }
    LabelRef::plain(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_chains() {
        let e = parse_assertion("a = b => x = 1 \\/ y = 2 /\\ z = 3").unwrap();
        match e {
            Expr::Implies(_, r) => assert!(matches!(*r, Expr::Or(_))),
            _ => panic!("{e:?}"),
        }
        let c = parse_assertion("latch=D<token").unwrap();
        assert!(matches!(c, Expr::And(ref v) if v.len() == 2));
    }

    #[test]
    fn b_is_a_name_unless_applied() {
        let e = parse_assertion("B(x=B)").unwrap();
        assert_eq!(
            e,
            Expr::Modal(Modality::B, Box::new(Expr::eq(Expr::var("x"), Expr::Logical("B".into()))))
        );
    }

    #[test]
    fn accents_need_internal_mode() {
        assert!(parse_assertion("x^ = 1").is_err());
        let e = parse_assertion_internal("x^ = 1 /\\ r1'2 = x'").unwrap();
        let regs = e.registers();
        assert_eq!(regs.iter().next().unwrap().primes, 2);
    }

    #[test]
    fn thread_register_and_at() {
        let e = parse_assertion("(1:r1) = 1 => (1:r2) = 1").unwrap();
        assert_eq!(e.registers().iter().filter(|r| r.thread == Some(1)).count(), 2);
        let a = parse_assertion("x = 1 /\\ y = 2 @@ 2").unwrap();
        assert!(matches!(a, Expr::AtThread(_, 2)));
    }

    #[test]
    fn quantifier_extends_right() {
        let e = parse_assertion("x = 1 /\\ exists A. y = A /\\ z = A").unwrap();
        match e {
            Expr::And(v) => assert!(matches!(v[1], Expr::Quant(_, _, _))),
            _ => panic!(),
        }
    }

    #[test]
    fn macros_expand() {
        let src = "macro W = 3; macro notyet(N) = sofar(auxP<=N);\n{ init: auxP = 0 }\nthread { a: r1 := W; {* a lo: notyet(r1) /\\ r1 = W *} }";
        let p = parse_program(src).unwrap();
        let post = p.threads[0].post.as_ref().unwrap();
        let emb = &post.stitches()[0].embroidery;
        assert_eq!(emb.to_string(), "sofar(auxP <= r1) /\\ r1 = 3");
    }

    #[test]
    fn syntax_errors_are_located() {
        let err = parse_program("{ init: x = 0 }\nthread {\n  a: x := 1 +\n}").unwrap_err();
        assert_eq!(err.pos().line, 4);
    }
}
