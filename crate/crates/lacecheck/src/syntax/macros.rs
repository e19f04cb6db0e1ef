//! Top-level textual macros: `macro W = 3;` and `macro notyet(N) = ...;`.
//! Definitions are removed from the token stream and every use is replaced
//! by its parenthesised body.

use super::lexer::{Tok, Token};
use super::ParseError;
use std::collections::HashMap;

struct Macro {
    params: Vec<String>,
    body: Vec<Token>,
}

const MAX_DEPTH: usize = 32;

pub fn expand(tokens: Vec<Token>) -> Result<Vec<Token>, ParseError> {
    let mut defs: HashMap<String, Macro> = HashMap::new();
    let mut rest = Vec::new();
    let mut i = 0;
    let mut depth = 0i32;
    while i < tokens.len() {
        let t = &tokens[i];
        if depth == 0 && t.tok == Tok::Ident("macro".into()) {
            let (name, m, next) = parse_def(&tokens, i + 1)?;
            let body = expand_uses(&m.body, &defs, 0)?;
            defs.insert(name, Macro { params: m.params, body });
            i = next;
            continue;
        }
        match t.tok {
            Tok::Sym("{") | Tok::Sym("{*") | Tok::Sym("(") | Tok::Sym("[") | Tok::Sym("[*") => depth += 1,
            Tok::Sym("}") | Tok::Sym("*}") | Tok::Sym(")") | Tok::Sym("]") | Tok::Sym("*]") => depth -= 1,
            _ => {}
        }
        rest.push(t.clone());
        i += 1;
    }
    if defs.is_empty() {
        return Ok(rest);
    }
    expand_uses(&rest, &defs, 0)
}

fn parse_def(tokens: &[Token], mut i: usize) -> Result<(String, Macro, usize), ParseError> {
    let name = match &tokens[i].tok {
        Tok::Ident(n) => n.clone(),
        _ => return Err(ParseError::at(tokens[i].pos, "expected macro name")),
    };
    i += 1;
    let mut params = Vec::new();
    if tokens[i].tok == Tok::Sym("(") && !tokens[i].spaced {
        i += 1;
        loop {
            match &tokens[i].tok {
                Tok::Ident(p) => params.push(p.clone()),
                _ => return Err(ParseError::at(tokens[i].pos, "expected macro parameter")),
            }
            i += 1;
            match tokens[i].tok {
                Tok::Sym(",") => i += 1,
                Tok::Sym(")") => {
                    i += 1;
                    break;
                }
                _ => return Err(ParseError::at(tokens[i].pos, "expected `,` or `)` in macro parameters")),
            }
        }
    }
    if tokens[i].tok != Tok::Sym("=") {
        return Err(ParseError::at(tokens[i].pos, "expected `=` in macro definition"));
    }
    i += 1;
    let mut body = Vec::new();
    let mut depth = 0i32;
    loop {
        let t = &tokens[i];
        match t.tok {
            Tok::Eof => return Err(ParseError::at(t.pos, "unterminated macro definition")),
            Tok::Sym(";") if depth == 0 => {
                i += 1;
                break;
            }
            Tok::Sym("(") | Tok::Sym("[") => depth += 1,
            Tok::Sym(")") | Tok::Sym("]") => depth -= 1,
            _ => {}
        }
        body.push(t.clone());
        i += 1;
    }
    if body.is_empty() {
        return Err(ParseError::at(tokens[i - 1].pos, "empty macro body"));
    }
    Ok((name, Macro { params, body }, i))
}

fn expand_uses(tokens: &[Token], defs: &HashMap<String, Macro>, level: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        let name = match &t.tok {
            Tok::Ident(n) if defs.contains_key(n) => n,
            _ => {
                out.push(t.clone());
                i += 1;
                continue;
            }
        };
        if level >= MAX_DEPTH {
            return Err(ParseError::at(t.pos, format!("macro `{name}` expands too deeply")));
        }
        let m = &defs[name];
        i += 1;
        let mut args: Vec<Vec<Token>> = Vec::new();
        if !m.params.is_empty() {
            if i >= tokens.len() || tokens[i].tok != Tok::Sym("(") {
                return Err(ParseError::at(t.pos, format!("macro `{name}` expects {} argument(s)", m.params.len())));
            }
            i += 1;
            let mut cur = Vec::new();
            let mut depth = 0i32;
            loop {
                let a = tokens.get(i).ok_or_else(|| ParseError::at(t.pos, "unterminated macro arguments"))?;
                match a.tok {
                    Tok::Eof => return Err(ParseError::at(a.pos, "unterminated macro arguments")),
                    Tok::Sym(")") if depth == 0 => {
                        args.push(std::mem::take(&mut cur));
                        i += 1;
                        break;
                    }
                    Tok::Sym(",") if depth == 0 => {
                        args.push(std::mem::take(&mut cur));
                        i += 1;
                        continue;
                    }
                    Tok::Sym("(") | Tok::Sym("[") => depth += 1,
                    Tok::Sym(")") | Tok::Sym("]") => depth -= 1,
                    _ => {}
                }
                cur.push(a.clone());
                i += 1;
            }
            if args.len() != m.params.len() {
                return Err(ParseError::at(
                    t.pos,
                    format!("macro `{name}` expects {} argument(s), got {}", m.params.len(), args.len()),
                ));
            }
        }
        let mut body = Vec::new();
        body.push(Token { tok: Tok::Sym("("), pos: t.pos, spaced: t.spaced });
        for b in &m.body {
            if let Tok::Ident(p) = &b.tok {
                if let Some(k) = m.params.iter().position(|q| q == p) {
                    body.push(Token { tok: Tok::Sym("("), pos: t.pos, spaced: true });
                    body.extend(args[k].iter().map(|a| Token { pos: t.pos, ..a.clone() }));
                    body.push(Token { tok: Tok::Sym(")"), pos: t.pos, spaced: false });
                    continue;
                }
            }
            body.push(Token { pos: t.pos, ..b.clone() });
        }
        body.push(Token { tok: Tok::Sym(")"), pos: t.pos, spaced: false });
        out.extend(expand_uses(&body, defs, level + 1)?);
    }
    Ok(out)
}
