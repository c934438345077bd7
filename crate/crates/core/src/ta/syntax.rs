//! Clock constraints and observation predicates.
//!
//! ```text
//! pred   := or
//! or     := and ( ("|" | "||") and )*
//! and    := unary ( ("&" | "&&") unary )*
//! unary  := "!" unary | "(" pred ")" | "true" | "false" | atom
//! atom   := clock ("<" | "<=" | "==" | ">=" | ">") natural
//! ```

use thiserror::Error;

use super::{ClockConstraint, ClockId, CmpOp, Pred};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxErrorKind {
    #[error("unexpected {0}")]
    Unexpected(String),
    #[error("unknown clock `{0}`")]
    UnknownClock(String),
    #[error("constant `{0}` is not a natural number")]
    NonIntegral(String),
}

/// A syntax error at a 0-based character offset into the parsed string.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at offset {offset}: {kind}")]
pub struct SyntaxError {
    pub offset: usize,
    pub kind: SyntaxErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Op(CmpOp),
    Not,
    And,
    Or,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(s) => format!("number `{s}`"),
        Tok::Op(op) => format!("`{}`", op.symbol()),
        Tok::Not => "`!`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let two = |a: char, b: char| c == a && chars.get(i + 1) == Some(&b);
        let tok = if c.is_whitespace() {
            i += 1;
            continue;
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || c == '-' || c == '.' {
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.' || chars[i] == '/') {
                i += 1;
            }
            Tok::Num(chars[start..i].iter().collect())
        } else if two('<', '=') {
            i += 2;
            Tok::Op(CmpOp::Le)
        } else if two('>', '=') {
            i += 2;
            Tok::Op(CmpOp::Ge)
        } else if two('=', '=') {
            i += 2;
            Tok::Op(CmpOp::Eq)
        } else if two('&', '&') {
            i += 2;
            Tok::And
        } else if two('|', '|') {
            i += 2;
            Tok::Or
        } else {
            i += 1;
            match c {
                '<' => Tok::Op(CmpOp::Lt),
                '>' => Tok::Op(CmpOp::Gt),
                '!' => Tok::Not,
                '&' => Tok::And,
                '|' => Tok::Or,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => {
                    return Err(SyntaxError {
                        offset: start,
                        kind: SyntaxErrorKind::Unexpected(format!("character `{other}`")),
                    })
                }
            }
        };
        out.push((start, tok));
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser<'a, F> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    resolve: &'a F,
}

impl<F: Fn(&str) -> Option<ClockId>> Parser<'_, F> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> SyntaxError {
        SyntaxError { offset: self.offset(), kind: SyntaxErrorKind::Unexpected(describe(self.peek())) }
    }

    fn or(&mut self) -> Result<Pred, SyntaxError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Pred::Or(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Pred, SyntaxError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Pred::And(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Pred, SyntaxError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Pred::Not(Box::new(self.unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.or()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected());
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Pred::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Pred::False)
            }
            _ => self.atom().map(Pred::Atom),
        }
    }

    fn atom(&mut self) -> Result<ClockConstraint, SyntaxError> {
        let (at, Tok::Ident(name)) = self.toks[self.pos].clone() else {
            return Err(self.unexpected());
        };
        let clock = (self.resolve)(&name)
            .ok_or(SyntaxError { offset: at, kind: SyntaxErrorKind::UnknownClock(name) })?;
        self.bump();
        let Tok::Op(op) = *self.peek() else {
            return Err(self.unexpected());
        };
        self.bump();
        let (at, Tok::Num(text)) = self.toks[self.pos].clone() else {
            return Err(self.unexpected());
        };
        let bound = text
            .parse::<u32>()
            .map_err(|_| SyntaxError { offset: at, kind: SyntaxErrorKind::NonIntegral(text) })?;
        self.bump();
        Ok(ClockConstraint { clock, op, bound })
    }

    fn finish<T>(&self, value: T) -> Result<T, SyntaxError> {
        if *self.peek() == Tok::End {
            Ok(value)
        } else {
            Err(self.unexpected())
        }
    }
}

/// Parses a single atom such as `x<=1`.
pub fn parse_constraint(
    text: &str,
    resolve: &impl Fn(&str) -> Option<ClockId>,
) -> Result<ClockConstraint, SyntaxError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, resolve };
    let atom = p.atom()?;
    p.finish(atom)
}

/// Parses a boolean combination of atoms.
pub fn parse_pred(text: &str, resolve: &impl Fn(&str) -> Option<ClockId>) -> Result<Pred, SyntaxError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, resolve };
    let pred = p.or()?;
    p.finish(pred)
}

/// Renders with minimal parentheses; `parse_pred` reads it back.
pub(crate) fn render_pred(p: &Pred, name: &dyn Fn(ClockId) -> String) -> String {
    fn go(p: &Pred, name: &dyn Fn(ClockId) -> String, prec: u8) -> String {
        let (s, own) = match p {
            Pred::True => ("true".to_string(), 3),
            Pred::False => ("false".to_string(), 3),
            Pred::Atom(c) => (format!("{}{}{}", name(c.clock), c.op.symbol(), c.bound), 3),
            Pred::Not(q) => (format!("!{}", go(q, name, 3)), 3),
            Pred::And(a, b) => (format!("{} & {}", go(a, name, 2), go(b, name, 2)), 2),
            Pred::Or(a, b) => (format!("{} | {}", go(a, name, 1), go(b, name, 1)), 1),
        };
        if own < prec {
            format!("({s})")
        } else {
            s
        }
    }
    go(p, name, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clocks(name: &str) -> Option<ClockId> {
        ["x", "y"].iter().position(|&c| c == name).map(|i| ClockId(i as u32))
    }

    fn atom(clock: u32, op: CmpOp, bound: u32) -> Pred {
        Pred::Atom(ClockConstraint { clock: ClockId(clock), op, bound })
    }

    #[test]
    fn atoms() {
        assert_eq!(
            parse_constraint("x<=1", &clocks).unwrap(),
            ClockConstraint { clock: ClockId(0), op: CmpOp::Le, bound: 1 }
        );
        assert_eq!(parse_constraint(" y == 12 ", &clocks).unwrap().bound, 12);
        assert_eq!(parse_constraint("y>0", &clocks).unwrap().op, CmpOp::Gt);
    }

    #[test]
    fn precedence() {
        let p = parse_pred("!x<1 | x>=1 & y==0", &clocks).unwrap();
        let expected = Pred::Or(
            Box::new(Pred::Not(Box::new(atom(0, CmpOp::Lt, 1)))),
            Box::new(Pred::And(Box::new(atom(0, CmpOp::Ge, 1)), Box::new(atom(1, CmpOp::Eq, 0)))),
        );
        assert_eq!(p, expected);
        assert_eq!(parse_pred("(x<1) || (true && !false)", &clocks).unwrap().atoms().len(), 1);
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_constraint("x<=1.5", &clocks).unwrap_err();
        assert_eq!(e, SyntaxError { offset: 3, kind: SyntaxErrorKind::NonIntegral("1.5".into()) });
        let e = parse_constraint("x<=-1", &clocks).unwrap_err();
        assert!(matches!(e.kind, SyntaxErrorKind::NonIntegral(_)));
        let e = parse_pred("x<1 | z>2", &clocks).unwrap_err();
        assert_eq!(e, SyntaxError { offset: 6, kind: SyntaxErrorKind::UnknownClock("z".into()) });
        let e = parse_pred("(x<1", &clocks).unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(parse_constraint("x<1 & y<1", &clocks).is_err());
        assert!(parse_constraint("x=1", &clocks).is_err());
    }

    #[test]
    fn render_round_trips() {
        let name = |c: ClockId| ["x", "y"][c.index()].to_string();
        for src in ["x<1", "!(x<1 | y>2) & true", "(x==0 | y==0) & !x>=3", "x<1 & y<1 | false"] {
            let p = parse_pred(src, &clocks).unwrap();
            let text = render_pred(&p, &name);
            assert_eq!(parse_pred(&text, &clocks).unwrap(), p, "{src} -> {text}");
        }
    }
}
