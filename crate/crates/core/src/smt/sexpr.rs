use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

impl SExpr {
    pub fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a) => Some(a),
            SExpr::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items) => Some(items),
            SExpr::Atom(_) => None,
        }
    }

    /// Head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.atom()
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a) => f.write_str(a),
            SExpr::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("s-expression error at byte {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: usize,
    pub msg: String,
}

fn is_symbol_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || b"~!@$%^&*_-+=<>.?/".contains(&c)
}

/// Reads every top-level s-expression; `;` starts a line comment.
pub fn parse_all(text: &str) -> Result<Vec<SExpr>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut stack: Vec<(usize, Vec<SExpr>)> = Vec::new();
    let mut top = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_ascii_whitespace() => {}
            b'(' => stack.push((i, Vec::new())),
            b')' => {
                let (_, items) = stack.pop().ok_or(SyntaxError {
                    pos: i,
                    msg: "unbalanced `)`".into(),
                })?;
                let e = SExpr::List(items);
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(e),
                    None => top.push(e),
                }
            }
            c if is_symbol_char(c) => {
                let start = i;
                while i < bytes.len() && is_symbol_char(bytes[i]) {
                    i += 1;
                }
                let e = SExpr::Atom(text[start..i].to_string());
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(e),
                    None => top.push(e),
                }
                continue;
            }
            _ => {
                return Err(SyntaxError {
                    pos: i,
                    msg: format!("unexpected character {:?}", c as char),
                })
            }
        }
        i += 1;
    }
    if let Some((pos, _)) = stack.last() {
        return Err(SyntaxError {
            pos: *pos,
            msg: "unclosed `(`".into(),
        });
    }
    Ok(top)
}

/// Token stream of a script with comments removed, for whitespace-insensitive
/// comparison.
pub fn tokens(text: &str) -> Result<Vec<String>, SyntaxError> {
    fn walk(e: &SExpr, out: &mut Vec<String>) {
        match e {
            SExpr::Atom(a) => out.push(a.clone()),
            SExpr::List(items) => {
                out.push("(".into());
                items.iter().for_each(|i| walk(i, out));
                out.push(")".into());
            }
        }
    }
    let mut out = Vec::new();
    for e in parse_all(text)? {
        walk(&e, &mut out);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_and_comments() {
        let es = parse_all(";; header\n(assert (= h0 1)) ; trailing\n(check-sat)\n").unwrap();
        assert_eq!(es.len(), 2);
        assert_eq!(es[0].to_string(), "(assert (= h0 1))");
        assert_eq!(es[1].head(), Some("check-sat"));
    }

    #[test]
    fn unbalanced() {
        assert_eq!(parse_all("(a (b)").unwrap_err().pos, 0);
        assert_eq!(parse_all("(a))").unwrap_err().pos, 3);
        assert!(parse_all("(a \"s\")").is_err());
    }

    #[test]
    fn token_streams_ignore_layout() {
        let a = tokens("(f  (g x)\n   )").unwrap();
        let b = tokens("(f (g x))").unwrap();
        assert_eq!(a, b);
    }
}
