use std::fmt;

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Num(u64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    Comma,
    Dot,
    Bar,
    Amp,
    Tilde,
    Arrow,
    Iff,
    Equals,
    NotEquals,
    In,
    NotIn,
    Sub,
    Exists,
    Forall,
    Tc,
    Iota,
    Lambda,
    Hf,
    Empty,
    Cup,
    Cap,
    Times,
    Minus,
    Slash,
    BigCup,
    BigCap,
    Define,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Num(n) => return write!(f, "number `{n}`"),
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::LAngle => "`<`",
            Tok::RAngle => "`>`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::Bar => "`|`",
            Tok::Amp => "`&`",
            Tok::Tilde => "`~`",
            Tok::Arrow => "`->`",
            Tok::Iff => "`<->`",
            Tok::Equals => "`=`",
            Tok::NotEquals => "`!=`",
            Tok::In => "`in`",
            Tok::NotIn => "`notin`",
            Tok::Sub => "`sub`",
            Tok::Exists => "`exists`",
            Tok::Forall => "`forall`",
            Tok::Tc => "`TC`",
            Tok::Iota => "`iota`",
            Tok::Lambda => "`lambda`",
            Tok::Hf => "`HF`",
            Tok::Empty => "`0`",
            Tok::Cup => "`∪`",
            Tok::Cap => "`∩`",
            Tok::Times => "`×`",
            Tok::Minus => "`-`",
            Tok::Slash => "`/`",
            Tok::BigCup => "`⋃`",
            Tok::BigCap => "`⋂`",
            Tok::Define => "`:=`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

/// 1-based line/column position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: Pos,
    pub end: Pos,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "in" => Tok::In,
        "notin" => Tok::NotIn,
        "sub" => Tok::Sub,
        "exists" => Tok::Exists,
        "forall" => Tok::Forall,
        "TC" => Tok::Tc,
        "iota" => Tok::Iota,
        "lambda" => Tok::Lambda,
        "HF" => Tok::Hf,
        _ => return None,
    })
}

/// Words that cannot be used as variable names.
pub const KEYWORDS: &[&str] = &[
    "in", "notin", "sub", "exists", "forall", "TC", "iota", "lambda", "HF", "cup", "cap", "times",
];

fn symbol(c: char) -> Option<Tok> {
    Some(match c {
        '{' => Tok::LBrace,
        '}' => Tok::RBrace,
        '(' => Tok::LParen,
        ')' => Tok::RParen,
        '[' => Tok::LBrack,
        ']' => Tok::RBrack,
        '⟨' => Tok::LAngle,
        '⟩' | '>' => Tok::RAngle,
        ',' => Tok::Comma,
        '.' => Tok::Dot,
        '|' | '∨' => Tok::Bar,
        '&' | '∧' => Tok::Amp,
        '~' | '¬' => Tok::Tilde,
        '→' => Tok::Arrow,
        '↔' => Tok::Iff,
        '=' => Tok::Equals,
        '≠' => Tok::NotEquals,
        '∈' => Tok::In,
        '∉' => Tok::NotIn,
        '⊆' => Tok::Sub,
        '∃' => Tok::Exists,
        '∀' => Tok::Forall,
        'ι' => Tok::Iota,
        'λ' => Tok::Lambda,
        '∅' => Tok::Empty,
        '∪' => Tok::Cup,
        '∩' => Tok::Cap,
        '×' => Tok::Times,
        '−' | '\\' => Tok::Minus,
        '/' => Tok::Slash,
        '⋃' => Tok::BigCup,
        '⋂' => Tok::BigCap,
        _ => return None,
    })
}

fn ident_start(c: char) -> bool {
    (c.is_alphabetic() || c == '_') && c != 'ι' && c != 'λ'
}

fn ident_continue(c: char) -> bool {
    (c.is_alphanumeric() || c == '_' || c == '\'') && c != 'ι' && c != 'λ'
}

/// Splits `src` into tokens. `#` starts a comment running to the end of the line.
pub(crate) fn lex(src: &str, first_line: u32) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = first_line;
    let mut col = 1u32;
    while i < chars.len() {
        let c = chars[i];
        let start = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let next2 = chars.get(i + 2).copied();
        let (n, tok) = match (c, next, next2) {
            ('<', Some('-'), Some('>')) => (3, Tok::Iff),
            ('<', _, _) => (1, Tok::LAngle),
            ('-', Some('>'), _) => (2, Tok::Arrow),
            ('-', _, _) => (1, Tok::Minus),
            (':', Some('='), _) => (2, Tok::Define),
            ('!', Some('='), _) => (2, Tok::NotEquals),
            _ if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                let n: u64 = text.parse().map_err(|_| {
                    ParseError::syntax_at(start, start, format!("number `{text}` is too large"))
                })?;
                let tok = if n == 0 { Tok::Empty } else { Tok::Num(n) };
                (j - i, tok)
            }
            _ if ident_start(c) => {
                let mut j = i;
                while j < chars.len() && ident_continue(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = keyword(&word).unwrap_or(Tok::Ident(word));
                (j - i, tok)
            }
            _ => match symbol(c) {
                Some(tok) => (1, tok),
                None => {
                    return Err(ParseError::syntax_at(
                        start,
                        start,
                        format!("unexpected character `{c}`"),
                    ))
                }
            },
        };
        let end = Pos { line, col: col + n as u32 - 1 };
        out.push(Token { tok, start, end });
        i += n;
        col += n as u32;
    }
    let end = Pos { line, col };
    out.push(Token { tok: Tok::Eof, start: end, end });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s, 1).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn ascii_and_unicode_agree() {
        assert_eq!(toks("x in y & ~ z = 0"), toks("x ∈ y ∧ ¬ z = ∅"));
        assert_eq!(toks("a <-> b -> c"), vec![
            Tok::Ident("a".into()),
            Tok::Iff,
            Tok::Ident("b".into()),
            Tok::Arrow,
            Tok::Ident("c".into()),
            Tok::Eof
        ]);
    }

    #[test]
    fn reserved_names_do_not_lex() {
        assert!(lex("$x", 1).is_err());
    }

    #[test]
    fn comments_and_positions() {
        let t = lex("x # note\n  y", 3).unwrap();
        assert_eq!(t[1].start, Pos { line: 4, col: 3 });
    }
}
