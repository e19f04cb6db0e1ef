use super::ast::Pos;
use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    /// Punctuation and operators, stored as their spelling.
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
    /// True if whitespace or a comment came directly before this token.
    pub spaced: bool,
}

// Longest first, so that greedy matching works.
const SYMBOLS: &[&str] = &[
    "<=>", "{*", "*}", "[*", "*]", ":=", "|>", "||", "=>", "/\\", "\\/", "!=", "<=", ">=", "@@", "^^", "~~", "{", "}",
    "[", "]", "(", ")", ";", ",", ":", "|", "!", "=", "<", ">", "+", "-", "*", "/", "%", "'", "^", "~", ".", "_",
];

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut spaced = true;
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize, chars: &[char]| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1, &chars);
            spaced = true;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1, &chars);
            }
            spaced = true;
            continue;
        }
        let pos = Pos { line, col };
        if c.is_ascii_alphabetic() || (c == '_' && i + 1 < chars.len() && chars[i + 1].is_ascii_alphanumeric()) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col, 1, &chars);
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Ident(s), pos, spaced });
            spaced = false;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1, &chars);
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse::<i64>().map_err(|_| ParseError::at(pos, format!("integer literal too large: {s}")))?;
            out.push(Token { tok: Tok::Int(n), pos, spaced });
            spaced = false;
            continue;
        }
        let mut matched = None;
        for sym in SYMBOLS {
            let n = sym.chars().count();
            if i + n <= chars.len() && chars[i..i + n].iter().copied().eq(sym.chars()) {
                matched = Some(*sym);
                break;
            }
        }
        match matched {
            Some(sym) => {
                advance(&mut i, &mut line, &mut col, sym.chars().count(), &chars);
                out.push(Token { tok: Tok::Sym(sym), pos, spaced });
                spaced = false;
            }
            None => return Err(ParseError::at(pos, format!("unexpected character {c:?}"))),
        }
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col }, spaced: true });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_symbols_and_positions() {
        let t = lex("{* a lo: x=1 *}\n b: r1 := x").unwrap();
        assert_eq!(t[0].tok, Tok::Sym("{*"));
        assert_eq!(t[7].tok, Tok::Sym("*}"));
        let b = t.iter().find(|t| t.tok == Tok::Ident("b".into())).unwrap();
        assert_eq!((b.pos.line, b.pos.col), (2, 2));
    }

    #[test]
    fn comments_are_skipped() {
        let t = lex("x # comment\n y").unwrap();
        assert_eq!(t.len(), 3);
    }
}
