//! Big-integer evaluator with abstract-time accounting.
//!
//! Costs: 5 for `div`/`mod`, 1 for every other first-order operator
//! (constants and variables included). When the produced value exceeds the
//! big-cost threshold in absolute value, its decimal digit count is charged
//! instead. Each unfolding step of a looping operator adds 1 unit.
//! Any produced value above `value_bound` in absolute value aborts the
//! evaluation with [`EvalError::Overflow`].

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::program::Program;

/// Per-call limit during cover and cyclicity checks.
pub const CHECK_LIMIT: u64 = 100_000;
/// Per-call limit during equality verification.
pub const VERIFY_LIMIT: u64 = 1_000_000;
/// Decimal exponent of the value bound.
pub const VALUE_BOUND_EXP: u32 = 285;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalConfig {
    pub per_call_limit: u64,
    pub value_bound: BigUint,
    pub bigcost_threshold: BigUint,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            per_call_limit: CHECK_LIMIT,
            value_bound: BigUint::from(10u32).pow(VALUE_BOUND_EXP),
            bigcost_threshold: BigUint::one() << 64u32,
        }
    }
}

impl EvalConfig {
    pub fn with_limit(per_call_limit: u64) -> Self {
        assert!(per_call_limit > 0, "per-call limit must be positive");
        EvalConfig {
            per_call_limit,
            ..EvalConfig::default()
        }
    }

    pub fn verification() -> Self {
        Self::with_limit(VERIFY_LIMIT)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalError {
    #[error("timeout")]
    Timeout,
    #[error("overflow")]
    Overflow,
    #[error("division by zero")]
    DivByZero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluated {
    pub value: BigInt,
    pub cost: u64,
}

pub type EvalOutcome = Result<Evaluated, EvalError>;

/// Abstract time still available to an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    remaining: u64,
}

impl Budget {
    pub fn new(remaining: u64) -> Self {
        Budget { remaining }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    /// Pays `cost`, or empties the budget and reports a timeout.
    pub fn charge(&mut self, cost: u64) -> Result<(), EvalError> {
        if cost > self.remaining {
            self.remaining = 0;
            Err(EvalError::Timeout)
        } else {
            self.remaining -= cost;
            Ok(())
        }
    }
}

fn powers_of_ten() -> &'static [BigUint] {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let ten = BigUint::from(10u32);
        let mut v = Vec::with_capacity(401);
        let mut cur = BigUint::one();
        for _ in 0..=400 {
            v.push(cur.clone());
            cur *= &ten;
        }
        v
    })
}

/// Decimal digit count of `|v|` (1 for zero).
pub fn decimal_digits(v: &BigUint) -> u64 {
    let table = powers_of_ten();
    if v < table.last().expect("table is non-empty") {
        // number of powers 10^k (k >= 1) not exceeding v, plus one
        table[1..].partition_point(|p| p <= v) as u64 + 1
    } else {
        v.to_str_radix(10).len() as u64
    }
}

struct Machine<'a> {
    cfg: &'a EvalConfig,
    budget: &'a mut Budget,
}

impl Machine<'_> {
    fn produce(&mut self, v: BigInt, base_cost: u64) -> Result<BigInt, EvalError> {
        let mag = v.magnitude();
        if mag > &self.cfg.value_bound {
            return Err(EvalError::Overflow);
        }
        let cost = if mag > &self.cfg.bigcost_threshold {
            decimal_digits(mag)
        } else {
            base_cost
        };
        self.budget.charge(cost)?;
        Ok(v)
    }

    fn step(&mut self) -> Result<(), EvalError> {
        self.budget.charge(1)
    }

    fn eval(&mut self, p: &Program, x: &BigInt, y: &BigInt) -> Result<BigInt, EvalError> {
        match p {
            Program::Const0 => self.produce(BigInt::zero(), 1),
            Program::Const1 => self.produce(BigInt::one(), 1),
            Program::Const2 => self.produce(BigInt::from(2), 1),
            Program::VarX => self.produce(x.clone(), 1),
            Program::VarY => self.produce(y.clone(), 1),
            Program::Add(a, b) => {
                let v = self.eval(a, x, y)? + self.eval(b, x, y)?;
                self.produce(v, 1)
            }
            Program::Sub(a, b) => {
                let v = self.eval(a, x, y)? - self.eval(b, x, y)?;
                self.produce(v, 1)
            }
            Program::Mul(a, b) => {
                let v = self.eval(a, x, y)? * self.eval(b, x, y)?;
                self.produce(v, 1)
            }
            Program::Div(a, b) => {
                let n = self.eval(a, x, y)?;
                let d = self.eval(b, x, y)?;
                if d.is_zero() {
                    return Err(EvalError::DivByZero);
                }
                self.produce(n.div_floor(&d), 5)
            }
            Program::Mod(a, b) => {
                let n = self.eval(a, x, y)?;
                let d = self.eval(b, x, y)?;
                if d.is_zero() {
                    return Err(EvalError::DivByZero);
                }
                self.produce(n.mod_floor(&d), 5)
            }
            Program::Cond(a, b, c) => {
                let guard = self.eval(a, x, y)?;
                let v = if guard.sign() != Sign::Plus {
                    self.eval(b, x, y)?
                } else {
                    self.eval(c, x, y)?
                };
                self.produce(v, 1)
            }
            Program::Loop(f, a, b) => {
                let n = iterations(&self.eval(a, x, y)?);
                let mut acc = self.eval(b, x, y)?;
                for i in 1..=n {
                    self.step()?;
                    acc = self.eval(f, &acc, &BigInt::from(i))?;
                }
                Ok(acc)
            }
            Program::Loop2(f, g, a, b, c) => {
                let n = iterations(&self.eval(a, x, y)?);
                let mut u = self.eval(b, x, y)?;
                let mut v = self.eval(c, x, y)?;
                for _ in 0..n {
                    self.step()?;
                    let next_u = self.eval(f, &u, &v)?;
                    let next_v = self.eval(g, &u, &v)?;
                    u = next_u;
                    v = next_v;
                }
                Ok(u)
            }
            Program::Compr(f, a) => {
                let n = iterations(&self.eval(a, x, y)?);
                let mut cur = self.search(f, BigInt::zero())?;
                for _ in 0..n {
                    cur = self.search(f, cur + 1)?;
                }
                Ok(cur)
            }
        }
    }

    /// Smallest `z >= from` with `f(z, 0) <= 0`.
    fn search(&mut self, f: &Program, from: BigInt) -> Result<BigInt, EvalError> {
        let zero = BigInt::zero();
        let mut z = from;
        loop {
            self.step()?;
            if !self.eval(f, &z, &zero)?.is_positive() {
                return Ok(z);
            }
            z += 1;
        }
    }
}

/// Loop bound as an iteration count; non-positive bounds run zero times.
/// Bounds beyond `u64` saturate, which always ends in a timeout.
fn iterations(bound: &BigInt) -> u64 {
    if bound.is_positive() {
        bound.to_u64().unwrap_or(u64::MAX)
    } else {
        0
    }
}

/// Evaluates `p` at `(x, y)`, drawing from `budget`.
pub fn eval(
    p: &Program,
    x: &BigInt,
    y: &BigInt,
    budget: &mut Budget,
    cfg: &EvalConfig,
) -> EvalOutcome {
    let before = budget.remaining();
    let mut m = Machine { cfg, budget };
    let value = m.eval(p, x, y)?;
    Ok(Evaluated {
        value,
        cost: before - m.budget.remaining(),
    })
}

/// Budget stream for consecutive calls: each call receives the per-call
/// limit plus whatever earlier calls left unused.
#[derive(Debug, Clone)]
pub struct CarryOver<'a> {
    cfg: &'a EvalConfig,
    unused: u64,
}

impl<'a> CarryOver<'a> {
    pub fn new(cfg: &'a EvalConfig) -> Self {
        CarryOver { cfg, unused: 0 }
    }

    pub fn call(&mut self, p: &Program, x: &BigInt, y: &BigInt) -> EvalOutcome {
        let mut budget = Budget::new(self.unused.saturating_add(self.cfg.per_call_limit));
        let out = eval(p, x, y, &mut budget, self.cfg);
        self.unused = budget.remaining();
        out
    }

    pub fn unused(&self) -> u64 {
        self.unused
    }
}

/// Evaluates `p` on the given inputs in order with carried-over budget,
/// stopping after the first error (which is included).
pub fn run_series<I>(p: &Program, inputs: I, cfg: &EvalConfig) -> Vec<EvalOutcome>
where
    I: IntoIterator<Item = (BigInt, BigInt)>,
{
    let mut stream = CarryOver::new(cfg);
    let mut out = Vec::new();
    for (x, y) in inputs {
        let r = stream.call(p, &x, &y);
        let failed = r.is_err();
        out.push(r);
        if failed {
            break;
        }
    }
    out
}

/// `f_p(0,0), f_p(1,0), ..., f_p(n-1,0)`.
pub fn generate_seq(p: &Program, n: usize, cfg: &EvalConfig) -> Vec<EvalOutcome> {
    run_series(p, (0..n).map(|i| (BigInt::from(i), BigInt::zero())), cfg)
}

/// Values of [`generate_seq`], or the first error.
pub fn sequence_values(p: &Program, n: usize, cfg: &EvalConfig) -> Result<Vec<BigInt>, EvalError> {
    generate_seq(p, n, cfg)
        .into_iter()
        .map(|r| r.map(|e| e.value))
        .collect()
}

/// Total abstract time spent generating the first `n` terms.
pub fn speed(p: &Program, n: usize, cfg: &EvalConfig) -> Result<u64, EvalError> {
    generate_seq(p, n, cfg)
        .into_iter()
        .try_fold(0u64, |acc, r| r.map(|e| acc + e.cost))
}
