//! Program AST and structural measures.
//!
//! A program is built from the constants `0`, `1`, `2`, the variables `x`,
//! `y`, the arithmetic operators, `cond`, and the three looping operators
//! `loop`, `loop2` and `compr`. The first argument of `loop`/`compr` and the
//! first two arguments of `loop2` are higher-order slots: variables occurring
//! there are bound to the loop state rather than to the program inputs.

use std::cmp::Ordering;
use std::fmt;

/// One of the two program inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarId {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Program {
    Const0,
    Const1,
    Const2,
    VarX,
    VarY,
    Add(Box<Program>, Box<Program>),
    Sub(Box<Program>, Box<Program>),
    Mul(Box<Program>, Box<Program>),
    Div(Box<Program>, Box<Program>),
    Mod(Box<Program>, Box<Program>),
    Cond(Box<Program>, Box<Program>, Box<Program>),
    Loop(Box<Program>, Box<Program>, Box<Program>),
    Loop2(
        Box<Program>,
        Box<Program>,
        Box<Program>,
        Box<Program>,
        Box<Program>,
    ),
    Compr(Box<Program>, Box<Program>),
}

/// Operator tag, ordered by the code table used for tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpCode {
    Const0,
    Const1,
    Const2,
    VarX,
    VarY,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Cond,
    Loop,
    Loop2,
    Compr,
}

impl OpCode {
    pub fn arity(self) -> usize {
        match self {
            OpCode::Const0 | OpCode::Const1 | OpCode::Const2 | OpCode::VarX | OpCode::VarY => 0,
            OpCode::Compr => 2,
            OpCode::Add | OpCode::Sub | OpCode::Mul | OpCode::Div | OpCode::Mod => 2,
            OpCode::Cond | OpCode::Loop => 3,
            OpCode::Loop2 => 5,
        }
    }

    /// Number of leading arguments that are higher-order slots.
    pub fn higher_order_slots(self) -> usize {
        match self {
            OpCode::Loop | OpCode::Compr => 1,
            OpCode::Loop2 => 2,
            _ => 0,
        }
    }

    pub fn is_looping(self) -> bool {
        matches!(self, OpCode::Loop | OpCode::Loop2 | OpCode::Compr)
    }
}

/// Position of a subprogram: child indices from the root.
pub type TreePath = Vec<usize>;

fn b(p: Program) -> Box<Program> {
    Box::new(p)
}

#[allow(clippy::should_implement_trait)]
impl Program {
    pub fn add(a: Program, c: Program) -> Program {
        Program::Add(b(a), b(c))
    }
    pub fn sub(a: Program, c: Program) -> Program {
        Program::Sub(b(a), b(c))
    }
    pub fn mul(a: Program, c: Program) -> Program {
        Program::Mul(b(a), b(c))
    }
    pub fn div(a: Program, c: Program) -> Program {
        Program::Div(b(a), b(c))
    }
    pub fn modulo(a: Program, c: Program) -> Program {
        Program::Mod(b(a), b(c))
    }
    pub fn cond(guard: Program, then: Program, otherwise: Program) -> Program {
        Program::Cond(b(guard), b(then), b(otherwise))
    }
    pub fn looping(body: Program, bound: Program, init: Program) -> Program {
        Program::Loop(b(body), b(bound), b(init))
    }
    pub fn loop2(
        f: Program,
        g: Program,
        bound: Program,
        init_u: Program,
        init_v: Program,
    ) -> Program {
        Program::Loop2(b(f), b(g), b(bound), b(init_u), b(init_v))
    }
    pub fn compr(filter: Program, bound: Program) -> Program {
        Program::Compr(b(filter), b(bound))
    }

    /// Rebuilds a node from its code and children. Panics on an arity mismatch.
    pub fn from_parts(op: OpCode, mut children: Vec<Program>) -> Program {
        assert_eq!(children.len(), op.arity(), "arity mismatch for {op:?}");
        let mut next = || b(children.remove(0));
        match op {
            OpCode::Const0 => Program::Const0,
            OpCode::Const1 => Program::Const1,
            OpCode::Const2 => Program::Const2,
            OpCode::VarX => Program::VarX,
            OpCode::VarY => Program::VarY,
            OpCode::Add => Program::Add(next(), next()),
            OpCode::Sub => Program::Sub(next(), next()),
            OpCode::Mul => Program::Mul(next(), next()),
            OpCode::Div => Program::Div(next(), next()),
            OpCode::Mod => Program::Mod(next(), next()),
            OpCode::Cond => Program::Cond(next(), next(), next()),
            OpCode::Loop => Program::Loop(next(), next(), next()),
            OpCode::Loop2 => Program::Loop2(next(), next(), next(), next(), next()),
            OpCode::Compr => Program::Compr(next(), next()),
        }
    }

    pub fn op(&self) -> OpCode {
        match self {
            Program::Const0 => OpCode::Const0,
            Program::Const1 => OpCode::Const1,
            Program::Const2 => OpCode::Const2,
            Program::VarX => OpCode::VarX,
            Program::VarY => OpCode::VarY,
            Program::Add(..) => OpCode::Add,
            Program::Sub(..) => OpCode::Sub,
            Program::Mul(..) => OpCode::Mul,
            Program::Div(..) => OpCode::Div,
            Program::Mod(..) => OpCode::Mod,
            Program::Cond(..) => OpCode::Cond,
            Program::Loop(..) => OpCode::Loop,
            Program::Loop2(..) => OpCode::Loop2,
            Program::Compr(..) => OpCode::Compr,
        }
    }

    pub fn children(&self) -> Vec<&Program> {
        match self {
            Program::Const0 | Program::Const1 | Program::Const2 | Program::VarX | Program::VarY => {
                vec![]
            }
            Program::Add(a, c)
            | Program::Sub(a, c)
            | Program::Mul(a, c)
            | Program::Div(a, c)
            | Program::Mod(a, c)
            | Program::Compr(a, c) => vec![a, c],
            Program::Cond(a, c, d) | Program::Loop(a, c, d) => vec![a, c, d],
            Program::Loop2(f, g, a, c, d) => vec![f, g, a, c, d],
        }
    }

    pub fn is_looping(&self) -> bool {
        self.op().is_looping()
    }

    /// Number of operators, counted with repetition.
    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Program::size)
            .sum::<usize>()
    }

    /// Operator codes in preorder.
    pub fn preorder_codes(&self) -> Vec<OpCode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(p) = stack.pop() {
            out.push(p.op());
            stack.extend(p.children().into_iter().rev());
        }
        out
    }

    /// True iff `v` occurs free, i.e. outside every higher-order slot.
    pub fn depends_on(&self, v: VarId) -> bool {
        match self {
            Program::VarX => v == VarId::X,
            Program::VarY => v == VarId::Y,
            _ => {
                let skip = self.op().higher_order_slots();
                self.children()
                    .into_iter()
                    .skip(skip)
                    .any(|c| c.depends_on(v))
            }
        }
    }

    /// Every `loop`/`loop2`/`compr` node with its path, in preorder.
    pub fn looping_subprograms(&self) -> Vec<(&Program, TreePath)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        collect_loops(self, &mut path, &mut out);
        out
    }

    /// Number of occurrences of `needle` as a subterm of `self`.
    pub fn count_occurrences(&self, needle: &Program) -> usize {
        let here = usize::from(self == needle);
        here + self
            .children()
            .into_iter()
            .map(|c| c.count_occurrences(needle))
            .sum::<usize>()
    }

    pub fn subprogram_at(&self, path: &[usize]) -> Option<&Program> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }
}

fn collect_loops<'a>(p: &'a Program, path: &mut TreePath, out: &mut Vec<(&'a Program, TreePath)>) {
    if p.is_looping() {
        out.push((p, path.clone()));
    }
    for (i, c) in p.children().into_iter().enumerate() {
        path.push(i);
        collect_loops(c, path, out);
        path.pop();
    }
}

/// Size first, then preorder operator codes. Equal iff structurally identical.
pub fn total_order(p: &Program, q: &Program) -> Ordering {
    p.size()
        .cmp(&q.size())
        .then_with(|| p.preorder_codes().cmp(&q.preorder_codes()))
}

impl PartialOrd for Program {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Program {
    fn cmp(&self, other: &Self) -> Ordering {
        total_order(self, other)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print(self))
    }
}
