//! Concrete syntax for programs.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := atom (('*' | 'div' | 'mod') atom)*
//! atom  := '0' | '1' | '2' | 'x' | 'y' | '(' expr ')'
//!        | 'loop' '(' expr ',' expr ',' expr ')'
//!        | 'loop2' '(' expr ',' expr ',' expr ',' expr ',' expr ')'
//!        | 'compr' '(' expr ',' expr ')'
//!        | 'cond' '(' expr ',' expr ',' expr ')'
//!        | 'if' expr '<=' '0' 'then' expr 'else' expr
//! ```
//!
//! Identifiers are case-insensitive. The `else` branch of an `if` extends as
//! far right as possible.

use crate::program::{OpCode, Program};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Comma,
    Le,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b',' => out.push((start, Tok::Comma)),
            b'<' if bytes.get(i + 1) == Some(&b'=') => {
                out.push((start, Tok::Le));
                i += 1;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Num(text[start..i].to_string())));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_ascii_lowercase())));
                continue;
            }
            _ => {
                return Err(ParseError {
                    pos: start,
                    msg: format!("unexpected character {:?}", c as char),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.at += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{kw}`")),
        }
    }

    fn expr(&mut self) -> Result<Program, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    lhs = Program::add(lhs, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    lhs = Program::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Program, ParseError> {
        let mut lhs = self.atom()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    lhs = Program::mul(lhs, self.atom()?);
                }
                Some(Tok::Ident(s)) if s == "div" => {
                    self.at += 1;
                    lhs = Program::div(lhs, self.atom()?);
                }
                Some(Tok::Ident(s)) if s == "mod" => {
                    self.at += 1;
                    lhs = Program::modulo(lhs, self.atom()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn args(&mut self, n: usize) -> Result<Vec<Program>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                self.expect(Tok::Comma, "`,`")?;
            }
            out.push(self.expr()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(out)
    }

    fn atom(&mut self) -> Result<Program, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(n)) => match n.as_str() {
                "0" => Ok(Program::Const0),
                "1" => Ok(Program::Const1),
                "2" => Ok(Program::Const2),
                _ => Err(ParseError {
                    pos,
                    msg: format!("integer literal {n} is not one of 0, 1, 2"),
                }),
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(id)) => {
                let op = match id.as_str() {
                    "x" => return Ok(Program::VarX),
                    "y" => return Ok(Program::VarY),
                    "if" => return self.if_then_else(),
                    "loop" => OpCode::Loop,
                    "loop2" => OpCode::Loop2,
                    "compr" => OpCode::Compr,
                    "cond" => OpCode::Cond,
                    _ => {
                        return Err(ParseError {
                            pos,
                            msg: format!("unknown identifier `{id}`"),
                        })
                    }
                };
                let args = self.args(op.arity())?;
                Ok(Program::from_parts(op, args))
            }
            Some(t) => Err(ParseError {
                pos,
                msg: format!("unexpected token {t:?}"),
            }),
            None => Err(ParseError {
                pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }

    fn if_then_else(&mut self) -> Result<Program, ParseError> {
        let guard = self.expr()?;
        self.expect(Tok::Le, "`<=`")?;
        match self.bump() {
            Some(Tok::Num(n)) if n == "0" => {}
            _ => {
                self.at -= 1;
                return self.err("expected `0` after `<=`");
            }
        }
        self.expect_keyword("then")?;
        let then = self.expr()?;
        self.expect_keyword("else")?;
        let otherwise = self.expr()?;
        Ok(Program::cond(guard, then, otherwise))
    }
}

pub fn parse(text: &str) -> Result<Program, ParseError> {
    if !text.is_ascii() {
        let pos = text
            .char_indices()
            .find(|(_, c)| !c.is_ascii())
            .map_or(0, |(i, _)| i);
        return Err(ParseError {
            pos,
            msg: "non-ASCII input".into(),
        });
    }
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
    };
    let prog = p.expr()?;
    if p.at < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(prog)
}

/// How `cond` nodes are rendered.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CondStyle {
    /// `cond(a, b, c)`
    #[default]
    Call,
    /// `if a <= 0 then b else c`
    IfThenElse,
}

pub fn print(p: &Program) -> String {
    print_with(p, CondStyle::Call)
}

pub fn print_with(p: &Program, style: CondStyle) -> String {
    let mut out = String::new();
    write_prog(p, style, &mut out);
    out
}

fn needs_parens(p: &Program, style: CondStyle) -> bool {
    match p {
        Program::Add(..)
        | Program::Sub(..)
        | Program::Mul(..)
        | Program::Div(..)
        | Program::Mod(..) => true,
        Program::Cond(..) => style == CondStyle::IfThenElse,
        _ => false,
    }
}

fn write_operand(p: &Program, style: CondStyle, out: &mut String) {
    if needs_parens(p, style) {
        out.push('(');
        write_prog(p, style, out);
        out.push(')');
    } else {
        write_prog(p, style, out);
    }
}

fn write_call(name: &str, args: &[&Program], style: CondStyle, out: &mut String) {
    out.push_str(name);
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_prog(a, style, out);
    }
    out.push(')');
}

fn write_prog(p: &Program, style: CondStyle, out: &mut String) {
    let binop = |sym: &str, a: &Program, c: &Program, out: &mut String| {
        write_operand(a, style, out);
        out.push(' ');
        out.push_str(sym);
        out.push(' ');
        write_operand(c, style, out);
    };
    match p {
        Program::Const0 => out.push('0'),
        Program::Const1 => out.push('1'),
        Program::Const2 => out.push('2'),
        Program::VarX => out.push('x'),
        Program::VarY => out.push('y'),
        Program::Add(a, c) => binop("+", a, c, out),
        Program::Sub(a, c) => binop("-", a, c, out),
        Program::Mul(a, c) => binop("*", a, c, out),
        Program::Div(a, c) => binop("div", a, c, out),
        Program::Mod(a, c) => binop("mod", a, c, out),
        Program::Cond(a, c, d) => match style {
            CondStyle::Call => write_call("cond", &[a, c, d], style, out),
            CondStyle::IfThenElse => {
                out.push_str("if ");
                write_operand(a, style, out);
                out.push_str(" <= 0 then ");
                write_operand(c, style, out);
                out.push_str(" else ");
                write_prog(d, style, out);
            }
        },
        Program::Loop(f, a, c) => write_call("loop", &[f, a, c], style, out),
        Program::Loop2(f, g, a, c, d) => write_call("loop2", &[f, g, a, c, d], style, out),
        Program::Compr(f, a) => write_call("compr", &[f, a], style, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Program::*;

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse("loop(x + y, x, 0)").unwrap(),
            Program::looping(Program::add(VarX, VarY), VarX, Const0)
        );
        assert_eq!(parse("x").unwrap(), VarX);
        assert_eq!(
            parse("2 - (x mod (2 + 2))").unwrap(),
            Program::sub(Const2, Program::modulo(VarX, Program::add(Const2, Const2)))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("x + y * 2").unwrap(),
            Program::add(VarX, Program::mul(VarY, Const2))
        );
        assert_eq!(
            parse("x - y - 1").unwrap(),
            Program::sub(Program::sub(VarX, VarY), Const1)
        );
        assert_eq!(
            parse("x div 2 mod 2").unwrap(),
            Program::modulo(Program::div(VarX, Const2), Const2)
        );
        assert_eq!(
            parse("LOOP(X, Y, 0)").unwrap(),
            parse("loop(x, y, 0)").unwrap()
        );
    }

    #[test]
    fn if_surface_form() {
        let p = parse("if x <= 0 then 0 else loop2(x + y, x, x - 2, 1, 1)").unwrap();
        let q = parse("cond(x, 0, loop2(x + y, x, x - 2, 1, 1))").unwrap();
        assert_eq!(p, q);
        assert_eq!(
            print_with(&p, CondStyle::IfThenElse),
            "if x <= 0 then 0 else loop2(x + y, x, x - 2, 1, 1)"
        );
    }

    #[test]
    fn print_examples() {
        let p = Program::looping(Program::mul(Const2, Program::mul(VarX, VarY)), VarX, Const1);
        assert_eq!(print(&p), "loop(2 * (x * y), x, 1)");
        assert_eq!(print(&Const0), "0");
        assert_eq!(
            print(&Program::add(Program::add(VarX, VarX), VarX)),
            "(x + x) + x"
        );
    }

    #[test]
    fn appendix_headers_round_trip() {
        for text in [
            "loop(x + x, x, 1) * loop(x * y, x, 1)",
            "((((((x div 2) * x) mod 2) + (x mod 2)) + x) + x) + x",
            "(loop(loop(1, 2 - (x mod (2 + 2)), 2) + x, x mod 2, x) + x) + x",
            "loop2(x + y, x, x, 0, 1)",
        ] {
            assert_eq!(print(&parse(text).unwrap()), text);
        }
    }

    #[test]
    fn errors() {
        let e = parse("x + 3").unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(parse("loop(x, y)").is_err());
        assert!(parse("x +").is_err());
        assert!(parse("x y").is_err());
        assert!(parse("foo(x)").is_err());
        assert!(parse("if x <= 1 then 0 else 1").is_err());
        assert!(parse("x + é").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn nested_if_round_trips() {
        let p = Program::cond(
            Program::cond(VarX, VarY, Const1),
            Program::cond(Const0, Const1, Const2),
            Program::add(Program::cond(VarX, VarX, VarX), Const1),
        );
        let text = print_with(&p, CondStyle::IfThenElse);
        assert_eq!(parse(&text).unwrap(), p);
    }
}
