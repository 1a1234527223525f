//! Reading emitted scripts back: a sort checker for the SMT-LIB fragment the
//! exporter uses, and a direct evaluator of the definitions it contains.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Euclid, Zero};
use thiserror::Error;

use super::sexpr::{parse_all, SExpr, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("command {index}: {msg}")]
    Command { index: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sort {
    Int,
    Bool,
}

/// A function defined by `(= (name params..) body)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub params: Vec<String>,
    pub body: SExpr,
}

#[derive(Debug, Clone, Default)]
pub struct CheckedScript {
    pub logic: Option<String>,
    pub declarations: Vec<(String, usize)>,
    pub definitions: HashMap<String, Definition>,
    pub assertions: Vec<SExpr>,
    pub check_sat: bool,
}

struct SortChecker<'a> {
    funs: &'a HashMap<String, usize>,
}

impl SortChecker<'_> {
    fn term(&self, e: &SExpr, scope: &[String]) -> Result<Sort, String> {
        match e {
            SExpr::Atom(a) => {
                if a.bytes().all(|b| b.is_ascii_digit()) {
                    return Ok(Sort::Int);
                }
                if a == "true" || a == "false" {
                    return Ok(Sort::Bool);
                }
                if scope.iter().any(|v| v == a) {
                    return Ok(Sort::Int);
                }
                match self.funs.get(a.as_str()) {
                    Some(0) => Ok(Sort::Int),
                    Some(n) => Err(format!("`{a}` expects {n} arguments")),
                    None => Err(format!("undeclared symbol `{a}`")),
                }
            }
            SExpr::List(items) => {
                let head = items
                    .first()
                    .and_then(SExpr::atom)
                    .ok_or_else(|| format!("application without a symbol head: {e}"))?;
                let args = &items[1..];
                let sorts = |this: &Self| -> Result<Vec<Sort>, String> {
                    args.iter().map(|a| this.term(a, scope)).collect()
                };
                let all = |ss: &[Sort], s: Sort| ss.iter().all(|&t| t == s);
                match head {
                    "forall" | "exists" => {
                        let [binders, body] = args else {
                            return Err(format!("`{head}` takes a binder list and a body"));
                        };
                        let mut inner = scope.to_vec();
                        for b in binders.list().ok_or("binder list expected")? {
                            match b.list() {
                                Some([SExpr::Atom(v), SExpr::Atom(s)]) if s == "Int" => {
                                    inner.push(v.clone())
                                }
                                _ => return Err(format!("bad binder {b}")),
                            }
                        }
                        if self.term(body, &inner)? != Sort::Bool {
                            return Err(format!("`{head}` body is not Bool"));
                        }
                        Ok(Sort::Bool)
                    }
                    "+" | "*" | "-" | "div" | "mod" => {
                        let ss = sorts(self)?;
                        let min = if head == "-" { 1 } else { 2 };
                        let max = if head == "div" || head == "mod" {
                            2
                        } else {
                            usize::MAX
                        };
                        if ss.len() < min || ss.len() > max || !all(&ss, Sort::Int) {
                            return Err(format!("bad arguments to `{head}` in {e}"));
                        }
                        Ok(Sort::Int)
                    }
                    "<=" | "<" | ">=" | ">" => {
                        let ss = sorts(self)?;
                        if ss.len() < 2 || !all(&ss, Sort::Int) {
                            return Err(format!("bad arguments to `{head}` in {e}"));
                        }
                        Ok(Sort::Bool)
                    }
                    "=" => {
                        let ss = sorts(self)?;
                        if ss.len() < 2 || !all(&ss, ss[0]) {
                            return Err(format!("bad arguments to `=` in {e}"));
                        }
                        Ok(Sort::Bool)
                    }
                    "and" | "or" | "=>" | "not" => {
                        let ss = sorts(self)?;
                        let arity_ok = if head == "not" {
                            ss.len() == 1
                        } else {
                            !ss.is_empty()
                        };
                        if !arity_ok || !all(&ss, Sort::Bool) {
                            return Err(format!("bad arguments to `{head}` in {e}"));
                        }
                        Ok(Sort::Bool)
                    }
                    "ite" => {
                        let ss = sorts(self)?;
                        match ss.as_slice() {
                            [Sort::Bool, a, b] if a == b => Ok(*a),
                            _ => Err(format!("bad arguments to `ite` in {e}")),
                        }
                    }
                    f => {
                        let n = *self
                            .funs
                            .get(f)
                            .ok_or_else(|| format!("undeclared function `{f}`"))?;
                        let ss = sorts(self)?;
                        if ss.len() != n || !all(&ss, Sort::Int) || n == 0 {
                            return Err(format!(
                                "`{f}` applied to {} arguments, declared {n}",
                                ss.len()
                            ));
                        }
                        Ok(Sort::Int)
                    }
                }
            }
        }
    }
}

fn as_definition(assertion: &SExpr, funs: &HashMap<String, usize>) -> Option<(String, Definition)> {
    let (params, eq) = match assertion.head()? {
        "forall" => {
            let items = assertion.list()?;
            let binders = items.get(1)?.list()?;
            let params = binders
                .iter()
                .map(|b| b.list()?.first()?.atom().map(String::from))
                .collect::<Option<Vec<_>>>()?;
            (params, items.get(2)?)
        }
        "=" => (Vec::new(), assertion),
        _ => return None,
    };
    let [_, lhs, body] = eq.list()? else {
        return None;
    };
    if eq.head()? != "=" {
        return None;
    }
    let (name, args) = match lhs {
        SExpr::Atom(a) => (a.clone(), Vec::new()),
        SExpr::List(items) => (
            items.first()?.atom()?.to_string(),
            items[1..]
                .iter()
                .map(|a| a.atom().map(String::from))
                .collect::<Option<Vec<_>>>()?,
        ),
    };
    if args != params || funs.get(&name) != Some(&args.len()) {
        return None;
    }
    Some((
        name,
        Definition {
            params,
            body: body.clone(),
        },
    ))
}

/// Checks that `text` is a well-sorted script over declared `Int` functions
/// and collects its definitional assertions.
pub fn check_script(text: &str) -> Result<CheckedScript, CheckError> {
    let mut out = CheckedScript::default();
    let mut funs: HashMap<String, usize> = HashMap::new();
    for (index, cmd) in parse_all(text)?.iter().enumerate() {
        let err = |msg: String| CheckError::Command { index, msg };
        if out.check_sat {
            return Err(err("command after check-sat".into()));
        }
        let items = cmd
            .list()
            .ok_or_else(|| err(format!("top-level atom {cmd}")))?;
        match cmd.head() {
            Some("set-logic") => match items {
                [_, SExpr::Atom(l)] if out.logic.is_none() && out.declarations.is_empty() => {
                    out.logic = Some(l.clone())
                }
                _ => return Err(err("misplaced or malformed set-logic".into())),
            },
            Some("declare-fun") => match items {
                [_, SExpr::Atom(name), SExpr::List(args), SExpr::Atom(ret)] if ret == "Int" => {
                    if args.iter().any(|a| a.atom() != Some("Int")) {
                        return Err(err(format!("`{name}` has a non-Int argument")));
                    }
                    if funs.insert(name.clone(), args.len()).is_some() {
                        return Err(err(format!("`{name}` declared twice")));
                    }
                    out.declarations.push((name.clone(), args.len()));
                }
                _ => return Err(err(format!("malformed declaration {cmd}"))),
            },
            Some("assert") => {
                let [_, body] = items else {
                    return Err(err("assert takes one term".into()));
                };
                let sort = SortChecker { funs: &funs }.term(body, &[]).map_err(err)?;
                if sort != Sort::Bool {
                    return Err(err("asserted term is not Bool".into()));
                }
                if let Some((name, def)) = as_definition(body, &funs) {
                    out.definitions.insert(name, def);
                }
                out.assertions.push(body.clone());
            }
            Some("check-sat") if items.len() == 1 => out.check_sat = true,
            _ => return Err(err(format!("unsupported command {cmd}"))),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalFailure {
    #[error("division by zero")]
    DivByZero,
    #[error("evaluation exceeded its call or depth budget")]
    OutOfFuel,
    #[error("no definition for `{0}`")]
    Undefined(String),
    #[error("cannot evaluate {0}")]
    Unsupported(String),
}

/// Evaluates the definitions of a checked script by direct recursion, with
/// SMT-LIB (Euclidean) `div`/`mod`.
pub struct ScriptEvaluator<'a> {
    defs: &'a HashMap<String, Definition>,
    memo: HashMap<(String, Vec<BigInt>), BigInt>,
    fuel: u64,
    max_depth: usize,
}

impl<'a> ScriptEvaluator<'a> {
    pub fn new(script: &'a CheckedScript) -> Self {
        ScriptEvaluator {
            defs: &script.definitions,
            memo: HashMap::new(),
            fuel: 1_000_000,
            max_depth: 400,
        }
    }

    pub fn with_limits(mut self, fuel: u64, max_depth: usize) -> Self {
        self.fuel = fuel;
        self.max_depth = max_depth;
        self
    }

    pub fn call(&mut self, name: &str, args: &[BigInt]) -> Result<BigInt, EvalFailure> {
        self.call_at(name, args.to_vec(), 0)
    }

    fn call_at(
        &mut self,
        name: &str,
        args: Vec<BigInt>,
        depth: usize,
    ) -> Result<BigInt, EvalFailure> {
        let key = (name.to_string(), args);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        if self.fuel == 0 || depth > self.max_depth {
            return Err(EvalFailure::OutOfFuel);
        }
        self.fuel -= 1;
        let def = self
            .defs
            .get(name)
            .ok_or_else(|| EvalFailure::Undefined(name.to_string()))?;
        if def.params.len() != key.1.len() {
            return Err(EvalFailure::Unsupported(format!(
                "{name} with {} arguments",
                key.1.len()
            )));
        }
        let env: Vec<(String, BigInt)> = def
            .params
            .iter()
            .cloned()
            .zip(key.1.iter().cloned())
            .collect();
        let v = self.int(&def.body, &env, depth)?;
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    fn int(
        &mut self,
        e: &SExpr,
        env: &[(String, BigInt)],
        depth: usize,
    ) -> Result<BigInt, EvalFailure> {
        match e {
            SExpr::Atom(a) => {
                if let Some((_, v)) = env.iter().find(|(n, _)| n == a) {
                    return Ok(v.clone());
                }
                if let Ok(n) = a.parse::<BigInt>() {
                    return Ok(n);
                }
                self.call_at(a, Vec::new(), depth + 1)
            }
            SExpr::List(items) => {
                let head = e
                    .head()
                    .ok_or_else(|| EvalFailure::Unsupported(e.to_string()))?;
                let args = &items[1..];
                match head {
                    "ite" => {
                        let [c, t, f] = args else {
                            return Err(EvalFailure::Unsupported(e.to_string()));
                        };
                        if self.boolean(c, env, depth)? {
                            self.int(t, env, depth)
                        } else {
                            self.int(f, env, depth)
                        }
                    }
                    "+" | "-" | "*" | "div" | "mod" => {
                        let vals = args
                            .iter()
                            .map(|a| self.int(a, env, depth))
                            .collect::<Result<Vec<_>, _>>()?;
                        let (first, rest) = vals
                            .split_first()
                            .ok_or_else(|| EvalFailure::Unsupported(e.to_string()))?;
                        if head == "-" && rest.is_empty() {
                            return Ok(-first.clone());
                        }
                        rest.iter().try_fold(first.clone(), |acc, v| match head {
                            "+" => Ok(acc + v),
                            "-" => Ok(acc - v),
                            "*" => Ok(acc * v),
                            _ if v.is_zero() => Err(EvalFailure::DivByZero),
                            "div" => Ok(acc.div_euclid(v)),
                            _ => Ok(acc.rem_euclid(v)),
                        })
                    }
                    f => {
                        let vals = args
                            .iter()
                            .map(|a| self.int(a, env, depth))
                            .collect::<Result<Vec<_>, _>>()?;
                        self.call_at(f, vals, depth + 1)
                    }
                }
            }
        }
    }

    fn boolean(
        &mut self,
        e: &SExpr,
        env: &[(String, BigInt)],
        depth: usize,
    ) -> Result<bool, EvalFailure> {
        let items = e
            .list()
            .ok_or_else(|| EvalFailure::Unsupported(e.to_string()))?;
        let head = e
            .head()
            .ok_or_else(|| EvalFailure::Unsupported(e.to_string()))?;
        let args = &items[1..];
        let ints = |this: &mut Self| {
            args.iter()
                .map(|a| this.int(a, env, depth))
                .collect::<Result<Vec<_>, _>>()
        };
        let chain = |vals: Vec<BigInt>, ok: fn(&BigInt, &BigInt) -> bool| {
            vals.windows(2).all(|w| ok(&w[0], &w[1]))
        };
        Ok(match head {
            "<=" => chain(ints(self)?, |a, b| a <= b),
            "<" => chain(ints(self)?, |a, b| a < b),
            ">=" => chain(ints(self)?, |a, b| a >= b),
            ">" => chain(ints(self)?, |a, b| a > b),
            "=" => chain(ints(self)?, |a, b| a == b),
            "not" => !self.boolean(&args[0], env, depth)?,
            _ => return Err(EvalFailure::Unsupported(e.to_string())),
        })
    }
}
