use std::fmt;

/// 1-based line and column of a token's first character.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    LtLt,
    GtGt,
    /// May be empty (`<>`); callers decide whether that is legal.
    Iri(String),
    Var(String),
    Lit(String),
    Word(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LtLt => f.write_str("'<<'"),
            Tok::GtGt => f.write_str("'>>'"),
            Tok::Iri(s) => write!(f, "<{s}>"),
            Tok::Var(s) => write!(f, "?{s}"),
            Tok::Lit(s) => write!(f, "{:?}", s),
            Tok::Word(s) => write!(f, "'{s}'"),
            Tok::Sym(s) => write!(f, "'{s}'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const SYMS: [&str; 21] =
    ["!=", "&&", "||", "{", "}", "(", ")", "[", "]", ",", ".", "/", "|", "*", ":", "+", "_", "=", "!", "^", ";"];

pub struct Lexer;

impl Lexer {
    /// Tokenizes `src`; the final token is always `Eof`.
    pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, (Pos, String)> {
        let chars: Vec<char> = src.chars().collect();
        let mut out = Vec::new();
        let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
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
            let pos = Pos { line, col };
            if c.is_whitespace() {
                advance(&mut i, &mut line, &mut col, 1, &chars);
                continue;
            }
            if c == '%' {
                while i < chars.len() && chars[i] != '\n' {
                    advance(&mut i, &mut line, &mut col, 1, &chars);
                }
                continue;
            }
            let next = chars.get(i + 1).copied();
            if c == '<' && next == Some('<') {
                out.push((Tok::LtLt, pos));
                advance(&mut i, &mut line, &mut col, 2, &chars);
                continue;
            }
            if c == '>' {
                if next == Some('>') {
                    out.push((Tok::GtGt, pos));
                    advance(&mut i, &mut line, &mut col, 2, &chars);
                    continue;
                }
                return Err((pos, "unexpected '>'".into()));
            }
            if c == '<' {
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '>' {
                    if chars[j].is_whitespace() || chars[j] == '<' {
                        return Err((pos, "malformed IRI".into()));
                    }
                    j += 1;
                }
                if j == chars.len() {
                    return Err((pos, "unterminated IRI".into()));
                }
                let body: String = chars[i + 1..j].iter().collect();
                out.push((Tok::Iri(body), pos));
                let n = j + 1 - i;
                advance(&mut i, &mut line, &mut col, n, &chars);
                continue;
            }
            if c == '?' {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                if j == i + 1 {
                    return Err((pos, "empty variable name".into()));
                }
                out.push((Tok::Var(chars[i + 1..j].iter().collect()), pos));
                let n = j - i;
                advance(&mut i, &mut line, &mut col, n, &chars);
                continue;
            }
            if c == '"' {
                let mut j = i + 1;
                let mut lex = String::new();
                loop {
                    match chars.get(j) {
                        None => return Err((pos, "unterminated literal".into())),
                        Some('"') => break,
                        Some('\\') => {
                            let e = match chars.get(j + 1) {
                                Some('n') => '\n',
                                Some('r') => '\r',
                                Some('t') => '\t',
                                Some('"') => '"',
                                Some('\\') => '\\',
                                _ => return Err((pos, "bad escape in literal".into())),
                            };
                            lex.push(e);
                            j += 2;
                        }
                        Some(&ch) => {
                            lex.push(ch);
                            j += 1;
                        }
                    }
                }
                out.push((Tok::Lit(lex), pos));
                let n = j + 1 - i;
                advance(&mut i, &mut line, &mut col, n, &chars);
                continue;
            }
            if c.is_ascii_alphabetic() {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                out.push((Tok::Word(chars[i..j].iter().collect()), pos));
                let n = j - i;
                advance(&mut i, &mut line, &mut col, n, &chars);
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match SYMS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    out.push((Tok::Sym(s), pos));
                    advance(&mut i, &mut line, &mut col, s.chars().count(), &chars);
                }
                None => return Err((pos, format!("unexpected character {c:?}"))),
            }
        }
        out.push((Tok::Eof, Pos { line, col }));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        Lexer::tokenize(s).unwrap().into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn angle_brackets() {
        assert_eq!(toks("<< <a> >>"), [Tok::LtLt, Tok::Iri("a".into()), Tok::GtGt, Tok::Eof]);
        assert_eq!(toks("<>"), [Tok::Iri(String::new()), Tok::Eof]);
    }

    #[test]
    fn operators_and_literals() {
        assert_eq!(
            toks("?x != \"a\\\"b\" && !?y"),
            [
                Tok::Var("x".into()),
                Tok::Sym("!="),
                Tok::Lit("a\"b".into()),
                Tok::Sym("&&"),
                Tok::Sym("!"),
                Tok::Var("y".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_track_lines() {
        let t = Lexer::tokenize("eps\n  SEED").unwrap();
        assert_eq!(t[1].1, Pos { line: 2, col: 3 });
        let e = Lexer::tokenize("eps\n <a b>").unwrap_err();
        assert_eq!(e.0, Pos { line: 2, col: 2 });
    }
}
