//! Recursive-descent parser for NDL text.
//!
//! ```text
//! program := conj
//! conj    := atom { ("," | "/\" | "∧") atom }
//! atom    := "constraint(" name "," var "," var ")"
//!          | "swap_values(" var "," var ")"
//!          | "redirect(" var "," var ")"
//!          | "iterate(" var "-" var "," var "," "(" conj ")" ")"
//! var     := "t" digits
//! ```
//!
//! `%` starts a comment running to the end of the line. Upper-case `T` is
//! accepted for variables and rendered back as `t`.

use thiserror::Error;

use super::ast::{Atom, ProgVar, Program};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: unknown atom head `{head}`")]
    UnknownAtom { line: usize, column: usize, head: String },
    #[error("{line}:{column}: `{head}` takes {expected} arguments, found {found}")]
    Arity {
        line: usize,
        column: usize,
        head: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    And,
    Minus,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::And => "conjunction".into(),
            Tok::Minus => "`-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn syntax(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            '%' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
            }
            '(' | ')' | ',' | '-' | '∧' => {
                bump(&mut chars);
                out.push((
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        ',' => Tok::Comma,
                        '-' => Tok::Minus,
                        _ => Tok::And,
                    },
                    pos,
                ));
            }
            '/' => {
                bump(&mut chars);
                if chars.peek() == Some(&'\\') {
                    bump(&mut chars);
                    out.push((Tok::And, pos));
                } else {
                    return Err(syntax(pos, "expected `/\\`"));
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while chars.peek().is_some_and(|&c| c.is_ascii_alphanumeric() || c == '_') {
                    ident.push(bump(&mut chars));
                }
                out.push((Tok::Ident(ident), pos));
            }
            other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
        }
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

enum Arg {
    Name(String),
    Pair(ProgVar, ProgVar),
    Conj(Vec<Atom>),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

fn as_var(ident: &str) -> Option<ProgVar> {
    let digits = ident.strip_prefix('t').or_else(|| ident.strip_prefix('T'))?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().map(ProgVar)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let (t, pos) = self.next();
        if t == tok {
            Ok(())
        } else {
            Err(syntax(
                pos,
                format!("expected {}, found {}", tok.describe(), t.describe()),
            ))
        }
    }

    fn conj(&mut self) -> Result<Vec<Atom>, ParseError> {
        let mut atoms = vec![self.atom()?];
        while matches!(self.peek(), Tok::Comma | Tok::And) {
            self.next();
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn arg(&mut self) -> Result<(Arg, Pos), ParseError> {
        let pos = self.pos();
        match self.next() {
            (Tok::LParen, _) => {
                let body = self.conj()?;
                self.expect(Tok::RParen)?;
                Ok((Arg::Conj(body), pos))
            }
            (Tok::Ident(name), _) => {
                if *self.peek() == Tok::Minus {
                    self.next();
                    let x = as_var(&name).ok_or_else(|| syntax(pos, format!("expected variable, found `{name}`")))?;
                    let (rhs, rpos) = self.next();
                    let y = match rhs {
                        Tok::Ident(r) => as_var(&r),
                        _ => None,
                    }
                    .ok_or_else(|| syntax(rpos, "expected variable after `-`"))?;
                    Ok((Arg::Pair(x, y), pos))
                } else {
                    Ok((Arg::Name(name), pos))
                }
            }
            (t, pos) => Err(syntax(pos, format!("expected argument, found {}", t.describe()))),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let (head, hpos) = match self.next() {
            (Tok::Ident(h), pos) => (h, pos),
            (t, pos) => return Err(syntax(pos, format!("expected atom, found {}", t.describe()))),
        };
        let expected = match head.as_str() {
            "constraint" | "iterate" => 3,
            "swap_values" | "redirect" => 2,
            _ => {
                return Err(ParseError::UnknownAtom {
                    line: hpos.line,
                    column: hpos.column,
                    head,
                })
            }
        };
        self.expect(Tok::LParen)?;
        let mut args = vec![self.arg()?];
        while *self.peek() == Tok::Comma {
            self.next();
            args.push(self.arg()?);
        }
        self.expect(Tok::RParen)?;
        if args.len() != expected {
            return Err(ParseError::Arity {
                line: hpos.line,
                column: hpos.column,
                head,
                expected,
                found: args.len(),
            });
        }

        let var = |(arg, pos): &(Arg, Pos)| match arg {
            Arg::Name(n) => as_var(n).ok_or_else(|| syntax(*pos, format!("expected variable, found `{n}`"))),
            _ => Err(syntax(*pos, "expected variable")),
        };
        Ok(match head.as_str() {
            "constraint" => {
                let name = match &args[0] {
                    (Arg::Name(n), _) if as_var(n).is_none() => n.clone(),
                    (_, pos) => return Err(syntax(*pos, "expected constraint name")),
                };
                Atom::Constraint {
                    name,
                    a: var(&args[1])?,
                    b: var(&args[2])?,
                }
            }
            "swap_values" => Atom::Swap {
                a: var(&args[0])?,
                b: var(&args[1])?,
            },
            "redirect" => Atom::Redirect {
                a: var(&args[0])?,
                b: var(&args[1])?,
            },
            _ => {
                let (x, y) = match &args[0] {
                    (Arg::Pair(x, y), _) => (*x, *y),
                    (_, pos) => return Err(syntax(*pos, "expected `x - y` pair")),
                };
                let start = var(&args[1])?;
                let body = match args.pop() {
                    Some((Arg::Conj(body), _)) => body,
                    Some((_, pos)) => return Err(syntax(pos, "expected parenthesized body")),
                    None => unreachable!(),
                };
                Atom::Iterate { x, y, start, body }
            }
        })
    }
}

pub fn parse(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let body = p.conj()?;
    match p.next() {
        (Tok::Eof, _) => Ok(Program::new(body)),
        (t, pos) => Err(syntax(
            pos,
            format!("expected `,` or end of input, found {}", t.describe()),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LISTING: &str = "constraint(all_diff_next,t0,t1), iterate(t3 - t4, t0, (constraint(all_diff_next,t4,t1), swap_values(t1,t0), swap_values(t4,t0)))";

    #[test]
    fn parses_listing_shape() {
        let p = parse(LISTING).unwrap();
        assert_eq!(p.body.len(), 2);
        match &p.body[1] {
            Atom::Iterate { x, y, start, body } => {
                assert_eq!((*x, *y, *start), (ProgVar(3), ProgVar(4), ProgVar(0)));
                assert_eq!(body.len(), 3);
            }
            other => panic!("expected iterate, got {other:?}"),
        }
    }

    #[test]
    fn accepts_wedge_and_upper_case() {
        let text = "constraint(all_diff_next, T0, T1) ∧\n iterate(T3 - T4, T0, (\n constraint(all_diff_next, T4, T1) /\\ swap_values(T1, T0) ∧ swap_values(T4, T0)))";
        assert_eq!(parse(text).unwrap(), parse(LISTING).unwrap());
    }

    #[test]
    fn empty_input_is_a_syntax_error() {
        assert!(matches!(parse(""), Err(ParseError::Syntax { line: 1, column: 1, .. })));
        assert!(matches!(parse("  % just a comment\n"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn unknown_head() {
        let err = parse("shuffle(t0)").unwrap_err();
        assert!(matches!(err, ParseError::UnknownAtom { ref head, .. } if head == "shuffle"));
        assert!(err.to_string().contains("unknown atom head"));
    }

    #[test]
    fn arity_mismatch() {
        let err = parse("swap_values(t0, t1, t2)").unwrap_err();
        assert!(
            matches!(
                err,
                ParseError::Arity {
                    expected: 2,
                    found: 3,
                    ..
                }
            ),
            "{err}"
        );
        assert!(matches!(parse("constraint(c, t0)"), Err(ParseError::Arity { .. })));
    }

    #[test]
    fn reports_line_and_column() {
        let err = parse("constraint(c, t0, t1),\n  swap_values(t0 t1)").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                line: 2,
                column: 18,
                message: "expected `)`, found `t1`".into()
            }
        );
    }

    #[test]
    fn rejects_misplaced_arguments() {
        assert!(parse("swap_values(t0, foo)").is_err());
        assert!(parse("constraint(t0, t1, t2)").is_err());
        assert!(parse("iterate(t0, t1, (swap_values(t0, t1)))").is_err());
        assert!(parse("iterate(t0 - t1, t2, swap_values(t0, t1))").is_err());
        assert!(parse("swap_values(t0, t1),").is_err());
        assert!(parse("swap_values(t0, t1) swap_values(t0, t1)").is_err());
        assert!(parse("swap_values(t99999999, t1)").is_err());
    }

    #[test]
    fn comments_are_skipped() {
        let p = parse("% 2-opt\nswap_values(t0, t1) % trailing\n").unwrap();
        assert_eq!(p.body.len(), 1);
    }
}
