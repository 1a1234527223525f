//! Lowering of a program pair to first-order SMT definitions.
//!
//! Every looping subprogram gets a numbered family of definitions: one per
//! argument subprogram plus recursive helpers and a wrapper standing for the
//! loop itself. Indices are assigned in preorder (Small side first) while
//! definitions are emitted after those of any loop nested inside them.
//! First-order operators are expanded inline, so a definition body only
//! refers to its parameters, integer literals and loop wrappers.
//!
//! | operator        | definitions                                     |
//! |-----------------|-------------------------------------------------|
//! | `loop(F,A,B)`   | `f` F, `g` A, `h` B, helper `u`, wrapper `v`     |
//! | `loop2(F,G,A,B,C)` | `f` F, `g` G, `h` A, `i` B, `j` C, helpers `u`,`v`, wrapper `w` |
//! | `compr(F,A)`    | `f` F, `g` A, helpers `t`,`u`, wrapper `v`       |
//!
//! A definition takes `x` (resp. `y`) only if its subprogram depends on that
//! variable. Helpers keep their full state arity.

use thiserror::Error;

use super::term::Term;
use crate::program::{Program, VarId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoweredDef {
    pub name: String,
    pub params: Vec<&'static str>,
    pub body: Term,
}

impl LoweredDef {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoweredProblem {
    pub small: Vec<LoweredDef>,
    pub fast: Vec<LoweredDef>,
}

impl LoweredProblem {
    pub fn defs(&self) -> impl Iterator<Item = &LoweredDef> {
        self.small.iter().chain(&self.fast)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LowerError {
    #[error("{0} program depends on y")]
    DependsOnY(&'static str),
}

fn params_of(p: &Program) -> Vec<&'static str> {
    let mut out = Vec::with_capacity(2);
    if p.depends_on(VarId::X) {
        out.push("x");
    }
    if p.depends_on(VarId::Y) {
        out.push("y");
    }
    out
}

fn call(name: &str, params: &[&'static str]) -> Term {
    Term::app(name, params.iter().map(|&v| Term::sym(v)).collect())
}

fn pred(v: &str) -> Term {
    Term::app("-", vec![Term::sym(v), Term::int(1)])
}

/// Arguments for a body def: its `x` slot gets `on_x`, its `y` slot `on_y`.
fn body_args(params: &[&'static str], on_x: &Term, on_y: &Term) -> Vec<Term> {
    params
        .iter()
        .map(|&v| if v == "x" { on_x.clone() } else { on_y.clone() })
        .collect()
}

#[derive(Default)]
struct Lowerer {
    next: usize,
    defs: Vec<LoweredDef>,
}

impl Lowerer {
    fn push(&mut self, name: String, params: Vec<&'static str>, body: Term) {
        self.defs.push(LoweredDef { name, params, body });
    }

    /// Lowers `q` into a definition named `name` and returns its parameters.
    fn define(&mut self, name: String, q: &Program) -> Vec<&'static str> {
        let body = self.expand(q);
        let params = params_of(q);
        self.push(name, params.clone(), body);
        params
    }

    fn expand(&mut self, p: &Program) -> Term {
        let bin = |this: &mut Self, op: &str, a: &Program, b: &Program| {
            let a = this.expand(a);
            let b = this.expand(b);
            Term::app(op, vec![a, b])
        };
        match p {
            Program::Const0 => Term::int(0),
            Program::Const1 => Term::int(1),
            Program::Const2 => Term::int(2),
            Program::VarX => Term::sym("x"),
            Program::VarY => Term::sym("y"),
            Program::Add(a, b) => bin(self, "+", a, b),
            Program::Sub(a, b) => bin(self, "-", a, b),
            Program::Mul(a, b) => bin(self, "*", a, b),
            Program::Div(a, b) => bin(self, "div", a, b),
            Program::Mod(a, b) => bin(self, "mod", a, b),
            Program::Cond(a, b, c) => {
                let a = self.expand(a);
                let b = self.expand(b);
                let c = self.expand(c);
                Term::ite_le0(a, b, c)
            }
            Program::Loop(..) | Program::Loop2(..) | Program::Compr(..) => {
                let wrapper = self.lower_loop(p);
                call(&wrapper, &params_of(p))
            }
        }
    }

    fn lower_loop(&mut self, p: &Program) -> String {
        let i = self.next;
        self.next += 1;
        let n = |s: &str| format!("{s}{i}");
        let (x, y, z) = (Term::sym("x"), Term::sym("y"), Term::sym("z"));
        match p {
            Program::Loop(f, a, b) => {
                let fp = self.define(n("f"), f);
                let gp = self.define(n("g"), a);
                let hp = self.define(n("h"), b);
                let prev = Term::app(n("u"), vec![pred("x"), y.clone()]);
                let step = Term::app(n("f"), body_args(&fp, &prev, &x));
                self.push(n("u"), vec!["x", "y"], Term::ite_le0(x, y, step));
                let body = Term::app(n("u"), vec![call(&n("g"), &gp), call(&n("h"), &hp)]);
                self.push(n("v"), params_of(p), body);
                n("v")
            }
            Program::Loop2(f, g, a, b, c) => {
                let fp = self.define(n("f"), f);
                let gp = self.define(n("g"), g);
                let hp = self.define(n("h"), a);
                let ip = self.define(n("i"), b);
                let jp = self.define(n("j"), c);
                let state = || vec![pred("x"), Term::sym("y"), Term::sym("z")];
                let prev_u = Term::app(n("u"), state());
                let prev_v = Term::app(n("v"), state());
                let step_u = Term::app(n("f"), body_args(&fp, &prev_u, &prev_v));
                let step_v = Term::app(n("g"), body_args(&gp, &prev_u, &prev_v));
                self.push(
                    n("u"),
                    vec!["x", "y", "z"],
                    Term::ite_le0(x.clone(), y, step_u),
                );
                self.push(n("v"), vec!["x", "y", "z"], Term::ite_le0(x, z, step_v));
                let body = Term::app(
                    n("u"),
                    vec![call(&n("h"), &hp), call(&n("i"), &ip), call(&n("j"), &jp)],
                );
                self.push(n("w"), params_of(p), body);
                n("w")
            }
            Program::Compr(f, a) => {
                let fp = self.define(n("f"), f);
                let gp = self.define(n("g"), a);
                let test = Term::app(n("f"), body_args(&fp, &x, &Term::int(0)));
                let next = Term::app(n("t"), vec![Term::app("+", vec![x.clone(), Term::int(1)])]);
                self.push(n("t"), vec!["x"], Term::ite_le0(test, x.clone(), next));
                let first = Term::app(n("t"), vec![Term::int(0)]);
                let after = Term::app(
                    n("t"),
                    vec![Term::app(
                        "+",
                        vec![Term::app(n("u"), vec![pred("x")]), Term::int(1)],
                    )],
                );
                self.push(n("u"), vec!["x"], Term::ite_le0(x, first, after));
                let body = Term::app(n("u"), vec![call(&n("g"), &gp)]);
                self.push(n("v"), params_of(p), body);
                n("v")
            }
            _ => unreachable!("lower_loop called on a first-order node"),
        }
    }

    fn top(&mut self, name: &str, p: &Program) -> Vec<LoweredDef> {
        let body = self.expand(p);
        self.push(name.to_string(), vec!["x"], body);
        std::mem::take(&mut self.defs)
    }
}

/// Lowers both sides of a problem; loop indices continue from Small to Fast.
pub fn lower(small: &Program, fast: &Program) -> Result<LoweredProblem, LowerError> {
    if small.depends_on(VarId::Y) {
        return Err(LowerError::DependsOnY("small"));
    }
    if fast.depends_on(VarId::Y) {
        return Err(LowerError::DependsOnY("fast"));
    }
    let mut l = Lowerer::default();
    let small = l.top("small", small);
    let fast = l.top("fast", fast);
    Ok(LoweredProblem { small, fast })
}
