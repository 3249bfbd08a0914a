use super::ast::{AggFunction, CmpOp};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    Exists,
    Forall,
    Constraint,
    Global,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Var(String),
    Anon,
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Semi,
    At,
    If,
    WeakIf,
    Not,
    Cmp(CmpOp),
    Agg(AggFunction),
    Directive(Section),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

fn is_ident_char(c: char, allow_reserved: bool) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || (allow_reserved && c == '$')
}

pub fn tokenize(text: &str, allow_reserved: bool) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| Err(Error::Syntax { line, column, message });

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Token { tok, line: tl, column: tc });
            *i += len;
            *col += len;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '%' => {
                let end = chars[i..].iter().position(|&c| c == '\n').map_or(chars.len(), |p| i + p);
                let content: String = chars[i..end].iter().collect();
                if let Some(rest) = content.strip_prefix("%@") {
                    let word = rest.trim();
                    let section = match word {
                        "exists" => Section::Exists,
                        "forall" => Section::Forall,
                        "constraint" => Section::Constraint,
                        "global" => Section::Global,
                        other => return err(tl, tc, format!("unknown directive %@{other}")),
                    };
                    out.push(Token { tok: Tok::Directive(section), line: tl, column: tc });
                }
                col += end - i;
                i = end;
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            '[' => push(Tok::LBracket, 1, &mut i, &mut col),
            ']' => push(Tok::RBracket, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            '@' => push(Tok::At, 1, &mut i, &mut col),
            ':' => match chars.get(i + 1) {
                Some('-') => push(Tok::If, 2, &mut i, &mut col),
                Some('~') => push(Tok::WeakIf, 2, &mut i, &mut col),
                _ => push(Tok::Colon, 1, &mut i, &mut col),
            },
            '<' | '>' | '=' | '!' => {
                let next = chars.get(i + 1).copied();
                let (op, len) = match (c, next) {
                    ('<', Some('=')) => (CmpOp::Le, 2),
                    ('>', Some('=')) => (CmpOp::Ge, 2),
                    ('!', Some('=')) => (CmpOp::Ne, 2),
                    ('<', _) => (CmpOp::Lt, 1),
                    ('>', _) => (CmpOp::Gt, 1),
                    ('=', Some('=')) => (CmpOp::Eq, 2),
                    ('=', _) => (CmpOp::Eq, 1),
                    _ => return err(tl, tc, "unexpected character '!'".into()),
                };
                push(Tok::Cmp(op), len, &mut i, &mut col)
            }
            '#' => {
                let end = i + 1 + chars[i + 1..].iter().take_while(|c| c.is_ascii_alphabetic()).count();
                let word: String = chars[i + 1..end].iter().collect();
                let f = match word.as_str() {
                    "count" => AggFunction::Count,
                    "sum" => AggFunction::Sum,
                    other => return err(tl, tc, format!("unknown aggregate #{other}")),
                };
                push(Tok::Agg(f), end - i, &mut i, &mut col)
            }
            '-' | '0'..='9' => {
                let start = if c == '-' { i + 1 } else { i };
                let digits = chars[start..].iter().take_while(|c| c.is_ascii_digit()).count();
                if digits == 0 {
                    return err(tl, tc, "expected digits after '-'".into());
                }
                let end = start + digits;
                let s: String = chars[i..end].iter().collect();
                let Ok(v) = s.parse::<i64>() else {
                    return err(tl, tc, format!("integer out of range: {s}"));
                };
                push(Tok::Int(v), end - i, &mut i, &mut col)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = chars[i..].iter().take_while(|&&c| is_ident_char(c, true)).count();
                let word: String = chars[i..i + len].iter().collect();
                if !allow_reserved && word.contains('$') {
                    return err(tl, tc, format!("'$' is reserved for generated names: {word}"));
                }
                let tok = if word == "_" {
                    Tok::Anon
                } else if word == "not" {
                    Tok::Not
                } else if c.is_ascii_uppercase() || c == '_' {
                    Tok::Var(word)
                } else {
                    Tok::Ident(word)
                };
                push(tok, len, &mut i, &mut col)
            }
            other => return err(tl, tc, format!("unexpected character '{other}'")),
        }
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}
