use std::fmt;

/// An SMT-LIB term. Nullary applications print as bare symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Int(u64),
    Sym(String),
    App(String, Vec<Term>),
    /// Parenthesized sequence without a head symbol, e.g. binder lists.
    List(Vec<Term>),
}

impl Term {
    pub fn sym(s: impl Into<String>) -> Term {
        Term::Sym(s.into())
    }

    pub fn int(v: u64) -> Term {
        Term::Int(v)
    }

    pub fn app(head: impl Into<String>, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Sym(head.into())
        } else {
            Term::App(head.into(), args)
        }
    }

    /// `(ite (<= guard 0) then otherwise)`
    pub fn ite_le0(guard: Term, then: Term, otherwise: Term) -> Term {
        Term::app(
            "ite",
            vec![Term::app("<=", vec![guard, Term::int(0)]), then, otherwise],
        )
    }

    /// `((v Int) ...)`
    pub fn int_binders(vars: &[&str]) -> Term {
        Term::List(
            vars.iter()
                .map(|&v| Term::app(v, vec![Term::sym("Int")]))
                .collect(),
        )
    }

    fn write(&self, out: &mut String) {
        match self {
            Term::Int(v) => out.push_str(&v.to_string()),
            Term::Sym(s) => out.push_str(s),
            Term::App(head, args) => {
                out.push('(');
                out.push_str(head);
                for a in args {
                    out.push(' ');
                    a.write(out);
                }
                out.push(')');
            }
            Term::List(items) => {
                out.push('(');
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    a.write(out);
                }
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s);
        f.write_str(&s)
    }
}
