use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Keyword {
    Select,
    From,
    Where,
    And,
    Matches,
    Behaviour,
    As,
    Any,
    Start,
    End,
    Or,
    Not,
}

impl Keyword {
    const ALL: [(Keyword, &'static str); 12] = [
        (Keyword::Select, "SELECT"),
        (Keyword::From, "FROM"),
        (Keyword::Where, "WHERE"),
        (Keyword::And, "AND"),
        (Keyword::Matches, "MATCHES"),
        (Keyword::Behaviour, "BEHAVIOUR"),
        (Keyword::As, "AS"),
        (Keyword::Any, "ANY"),
        (Keyword::Start, "START"),
        (Keyword::End, "END"),
        (Keyword::Or, "OR"),
        (Keyword::Not, "NOT"),
    ];

    fn lookup(word: &str) -> Option<Keyword> {
        Self::ALL
            .iter()
            .find(|(_, text)| text.eq_ignore_ascii_case(word))
            .map(|(kw, _)| *kw)
    }

    pub(crate) fn text(self) -> &'static str {
        Self::ALL.iter().find(|(kw, _)| *kw == self).unwrap().1
    }
}

/// True for words the lexer would read as keywords.
pub fn is_keyword(word: &str) -> bool {
    Keyword::lookup(word).is_some()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Kw(Keyword),
    Ident(String),
    Str(String),
    Int(i64),
    Comma,
    Eq,
    LParen,
    RParen,
    Star,
    Arrow,
    Wiggle,
    Other(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Kw(kw) => f.write_str(kw.text()),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Str(s) => write!(f, "string '{s}'"),
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Wiggle => f.write_str("`~>`"),
            Tok::Other(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let err = |expected: &str, found: String| ParseError::Syntax {
            line: start_line,
            column: start_col,
            expected: vec![expected.to_owned()],
            found,
        };
        let advance = |n: usize, i: &mut usize, column: &mut usize| {
            *i += n;
            *column += n;
        };

        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut column);
            continue;
        }
        let tok = match c {
            ',' => Tok::Comma,
            '=' => Tok::Eq,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '*' => Tok::Star,
            '→' => Tok::Arrow,
            '⇝' | '↝' => Tok::Wiggle,
            '-' if chars.get(i + 1) == Some(&'>') => {
                advance(2, &mut i, &mut column);
                out.push(Token {
                    tok: Tok::Arrow,
                    line: start_line,
                    column: start_col,
                });
                continue;
            }
            '~' if chars.get(i + 1) == Some(&'>') => {
                advance(2, &mut i, &mut column);
                out.push(Token {
                    tok: Tok::Wiggle,
                    line: start_line,
                    column: start_col,
                });
                continue;
            }
            '\'' | '"' => {
                let mut value = String::new();
                let mut j = i + 1;
                let mut closed = false;
                let (mut l, mut col) = (line, column + 1);
                while j < chars.len() {
                    if chars[j] == c {
                        if chars.get(j + 1) == Some(&c) {
                            value.push(c);
                            j += 2;
                            col += 2;
                            continue;
                        }
                        closed = true;
                        j += 1;
                        col += 1;
                        break;
                    }
                    if chars[j] == '\n' {
                        l += 1;
                        col = 0;
                    }
                    value.push(chars[j]);
                    j += 1;
                    col += 1;
                }
                if !closed {
                    return Err(err("closing quote", "end of input".into()));
                }
                i = j;
                line = l;
                column = col;
                out.push(Token {
                    tok: Tok::Str(value),
                    line: start_line,
                    column: start_col,
                });
                continue;
            }
            c if c.is_ascii_digit()
                || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().collect();
                let n = digits
                    .parse()
                    .map_err(|_| err("integer in i64 range", digits.clone()))?;
                advance(j - i, &mut i, &mut column);
                out.push(Token {
                    tok: Tok::Int(n),
                    line: start_line,
                    column: start_col,
                });
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                advance(j - i, &mut i, &mut column);
                let tok = match Keyword::lookup(&word) {
                    Some(kw) => Tok::Kw(kw),
                    None => Tok::Ident(word),
                };
                out.push(Token {
                    tok,
                    line: start_line,
                    column: start_col,
                });
                continue;
            }
            other => Tok::Other(other),
        };
        advance(1, &mut i, &mut column);
        out.push(Token {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}
