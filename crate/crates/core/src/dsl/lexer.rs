use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
    Hash,
    Colon,
    Dollar,
    Eq,
    Ne,
    Lt,
    Le,
    Arrow,
    DashArrow,
    FatArrow,
    BiArrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Dot => ".",
            Tok::Hash => "#",
            Tok::Colon => ":",
            Tok::Dollar => "$",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Arrow => "->",
            Tok::DashArrow => "-->",
            Tok::FatArrow => "=>",
            Tok::BiArrow => "<->",
            Tok::Ident(_) => "identifier",
            Tok::Int(_) => "integer",
            Tok::Str(_) => "string",
            Tok::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Splits source text into tokens. Lexical errors are collected and the
/// offending character skipped, so lexing always reaches the end.
pub fn lex(src: &str) -> (Vec<Spanned>, Vec<ParseError>) {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut errors = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let peek = |k: usize| chars.get(i + k).copied();
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && peek(1) == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let push = |tok: Tok, out: &mut Vec<Spanned>| {
            out.push(Spanned {
                tok,
                line: tl,
                column: tc,
            })
        };
        if is_ident_start(c) {
            let mut s = String::new();
            while i < chars.len() && is_ident_char(chars[i]) {
                s.push(chars[i]);
                bump!();
            }
            push(Tok::Ident(s), &mut out);
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && peek(1).is_some_and(|d| d.is_ascii_digit())) {
            let mut s = String::new();
            s.push(c);
            bump!();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                bump!();
            }
            match s.parse::<i64>() {
                Ok(v) => push(Tok::Int(v), &mut out),
                Err(_) => errors.push(ParseError::new(tl, tc, format!("integer `{s}` out of range"), vec![])),
            }
            continue;
        }
        if c == '"' {
            bump!();
            let mut s = String::new();
            let mut closed = false;
            while i < chars.len() {
                let d = chars[i];
                if d == '"' {
                    bump!();
                    closed = true;
                    break;
                }
                if d == '\n' {
                    break;
                }
                if d == '\\' {
                    bump!();
                    let Some(e) = chars.get(i).copied() else { break };
                    s.push(match e {
                        'n' => '\n',
                        't' => '\t',
                        'r' => '\r',
                        other => other,
                    });
                    bump!();
                    continue;
                }
                s.push(d);
                bump!();
            }
            if closed {
                push(Tok::Str(s), &mut out);
            } else {
                errors.push(ParseError::new(tl, tc, "unterminated string", vec!["`\"`".into()]));
            }
            continue;
        }
        let (tok, len) = match (c, peek(1), peek(2)) {
            ('-', Some('-'), Some('>')) => (Tok::DashArrow, 3),
            ('-', Some('>'), _) => (Tok::Arrow, 2),
            ('<', Some('-'), Some('>')) => (Tok::BiArrow, 3),
            ('<', Some('='), _) => (Tok::Le, 2),
            ('=', Some('>'), _) => (Tok::FatArrow, 2),
            ('!', Some('='), _) => (Tok::Ne, 2),
            ('≠', _, _) => (Tok::Ne, 1),
            ('≤', _, _) => (Tok::Le, 1),
            ('<', _, _) => (Tok::Lt, 1),
            ('=', _, _) => (Tok::Eq, 1),
            ('{', _, _) => (Tok::LBrace, 1),
            ('}', _, _) => (Tok::RBrace, 1),
            ('(', _, _) => (Tok::LParen, 1),
            (')', _, _) => (Tok::RParen, 1),
            (',', _, _) => (Tok::Comma, 1),
            (';', _, _) => (Tok::Semi, 1),
            ('.', _, _) => (Tok::Dot, 1),
            ('#', _, _) => (Tok::Hash, 1),
            (':', _, _) => (Tok::Colon, 1),
            ('$', _, _) => (Tok::Dollar, 1),
            _ => {
                errors.push(ParseError::new(tl, tc, format!("unexpected character {c:?}"), vec![]));
                bump!();
                continue;
            }
        };
        push(tok, &mut out);
        for _ in 0..len {
            bump!();
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    (out, errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).0.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_numbers() {
        assert_eq!(
            toks("a -> b --> c => d <-> -3 <= ≠"),
            vec![
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b".into()),
                Tok::DashArrow,
                Tok::Ident("c".into()),
                Tok::FatArrow,
                Tok::Ident("d".into()),
                Tok::BiArrow,
                Tok::Int(-3),
                Tok::Le,
                Tok::Ne,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_and_comments() {
        let (t, e) = lex("// note\n  \"x\\\"y\" @");
        assert_eq!(t[0].tok, Tok::Str("x\"y".into()));
        assert_eq!((t[0].line, t[0].column), (2, 3));
        assert_eq!(e.len(), 1);
        assert_eq!((e[0].line, e[0].column), (2, 10));
    }
}
