//! Depth-first, left-to-right SLD resolution over a structure-sharing store.
//! A term at run time is a pointer into compiled clause code paired with the
//! base offset of the clause instance's variable frame, so resolution never
//! copies clause bodies.

use std::rc::Rc;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::compile::{CClause, CLit, CTerm, Compiled, UNDEFINED_PRED};
use crate::kernel::{literal_to_string, BuiltinOp, Constant, Literal, Program, Substitution, Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveLimits {
    pub max_depth: u32,
    pub max_steps: u64,
    pub max_answers: usize,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { max_depth: 10_000, max_steps: 5_000_000, max_answers: usize::MAX }
    }
}

impl SolveLimits {
    pub fn with_max_answers(self, max_answers: usize) -> Self {
        SolveLimits { max_answers, ..self }
    }

    pub fn with_max_steps(self, max_steps: u64) -> Self {
        SolveLimits { max_steps, ..self }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.max_depth == 0 || self.max_steps == 0 || self.max_answers == 0 {
            return Err(EngineError::InvalidLimits);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerSet {
    /// Bindings for the query variables, one per solution, in search order.
    pub answers: Vec<Substitution>,
    pub steps: u64,
    /// The search space was fully explored within the limits.
    pub exhausted: bool,
}

impl AnswerSet {
    pub fn succeeded(&self) -> bool {
        !self.answers.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("builtin `{literal}` called with an unbound argument (call stack: {})", stack.join(" <- "))]
    NongroundBuiltin { literal: String, stack: Vec<String> },
    #[error("limit exceeded while deciding `{query}`")]
    LimitExceeded { query: String },
    #[error("solve limits must be strictly positive")]
    InvalidLimits,
    #[error("predicate {0} is not defined")]
    UndefinedPredicate(String),
}

#[derive(Clone, Copy)]
struct Ref<'a> {
    t: &'a CTerm,
    env: usize,
}

enum Deref<'a> {
    Unbound(usize),
    Bound(Ref<'a>),
}

struct Frame {
    clause: Rc<str>,
    parent: Option<Rc<Frame>>,
}

struct Goal<'a> {
    lit: &'a CLit,
    env: usize,
    depth: u32,
    next: Option<Rc<Goal<'a>>>,
    frame: Option<Rc<Frame>>,
}

// Continuation and frame chains can be max_depth long; unlink them
// iteratively so dropping never recurses.
impl Drop for Goal<'_> {
    fn drop(&mut self) {
        let mut next = self.next.take();
        while let Some(g) = next {
            match Rc::try_unwrap(g) {
                Ok(mut g) => next = g.next.take(),
                Err(_) => break,
            }
        }
    }
}

impl Drop for Frame {
    fn drop(&mut self) {
        let mut parent = self.parent.take();
        while let Some(f) = parent {
            match Rc::try_unwrap(f) {
                Ok(mut f) => parent = f.parent.take(),
                Err(_) => break,
            }
        }
    }
}

struct ChoicePoint<'a> {
    goal: Rc<Goal<'a>>,
    next_clause: usize,
    trail_len: usize,
    heap_len: usize,
}

enum Next<'a> {
    Goals(Option<Rc<Goal<'a>>>),
    Fail,
}

/// A program compiled for repeated querying.
#[derive(Debug, Clone)]
pub struct Solver {
    code: Compiled,
}

impl Solver {
    pub fn new(p: &Program) -> Self {
        Solver { code: Compiled::new(p) }
    }

    pub fn solve(&self, query: &[Literal], limits: SolveLimits) -> Result<AnswerSet, EngineError> {
        limits.validate()?;
        let (lits, qvars, extra) = self.code.compile_query(query);
        let mut m = Machine {
            code: &self.code,
            extra: &extra,
            bindings: vec![None; qvars.len()],
            trail: Vec::new(),
            choices: Vec::new(),
            steps: 0,
            limits,
            depth_hit: false,
        };
        m.run(&lits, &qvars)
    }
}

/// Solves `query` against `p` with depth-first left-to-right SLD resolution.
pub fn solve(p: &Program, query: &[Literal], limits: SolveLimits) -> Result<AnswerSet, EngineError> {
    Solver::new(p).solve(query, limits)
}

struct Machine<'a> {
    code: &'a Compiled,
    extra: &'a [Arc<str>],
    bindings: Vec<Option<Ref<'a>>>,
    trail: Vec<usize>,
    choices: Vec<ChoicePoint<'a>>,
    steps: u64,
    limits: SolveLimits,
    depth_hit: bool,
}

impl<'a> Machine<'a> {
    fn run(&mut self, lits: &'a [CLit], qvars: &[Var]) -> Result<AnswerSet, EngineError> {
        let mut goals: Option<Rc<Goal<'a>>> = None;
        for lit in lits.iter().rev() {
            goals = Some(Rc::new(Goal { lit, env: 0, depth: 0, next: goals, frame: None }));
        }
        let mut answers = Vec::new();
        let mut step_hit = false;
        let mut stopped_early = false;
        'search: loop {
            let Some(g) = goals.clone() else {
                answers.push(self.answer(qvars));
                if answers.len() >= self.limits.max_answers {
                    stopped_early = !self.choices.is_empty();
                    break;
                }
                match self.backtrack()? {
                    Some(next) => {
                        goals = next;
                        continue;
                    }
                    None => break,
                }
            };
            if self.steps >= self.limits.max_steps {
                step_hit = true;
                break;
            }
            let outcome = match g.lit {
                CLit::Builtin(op, x, y) => {
                    self.steps += 1;
                    let x = Ref { t: x, env: g.env };
                    let y = Ref { t: y, env: g.env };
                    if self.builtin(*op, x, y, &g)? {
                        Next::Goals(g.next.clone())
                    } else {
                        Next::Fail
                    }
                }
                CLit::User { pred, .. } => {
                    if *pred == UNDEFINED_PRED {
                        Next::Fail
                    } else if g.depth >= self.limits.max_depth {
                        self.depth_hit = true;
                        Next::Fail
                    } else {
                        self.try_clauses(&g, 0)
                    }
                }
            };
            match outcome {
                Next::Goals(next) => goals = next,
                Next::Fail => {
                    if self.steps >= self.limits.max_steps {
                        step_hit = true;
                        break 'search;
                    }
                    match self.backtrack()? {
                        Some(next) => goals = next,
                        None => break 'search,
                    }
                }
            }
        }
        Ok(AnswerSet {
            answers,
            steps: self.steps,
            exhausted: !step_hit && !stopped_early && !self.depth_hit,
        })
    }

    /// Resumes the most recent choice point. `Ok(None)` when none remain.
    #[allow(clippy::type_complexity)]
    fn backtrack(&mut self) -> Result<Option<Option<Rc<Goal<'a>>>>, EngineError> {
        while let Some(cp) = self.choices.pop() {
            self.undo(cp.trail_len, cp.heap_len);
            if let Next::Goals(next) = self.try_clauses(&cp.goal, cp.next_clause) {
                return Ok(Some(next));
            }
        }
        Ok(None)
    }

    fn undo(&mut self, trail_len: usize, heap_len: usize) {
        while self.trail.len() > trail_len {
            let slot = self.trail.pop().expect("nonempty trail");
            if slot < self.bindings.len() {
                self.bindings[slot] = None;
            }
        }
        self.bindings.truncate(heap_len);
    }

    fn try_clauses(&mut self, g: &Rc<Goal<'a>>, start: usize) -> Next<'a> {
        let CLit::User { pred, args } = g.lit else {
            unreachable!("only user literals resolve against clauses")
        };
        let candidates: &'a [CClause] = &self.code.clauses[*pred as usize];
        for (i, clause) in candidates.iter().enumerate().skip(start) {
            let trail_len = self.trail.len();
            let heap_len = self.bindings.len();
            let env = heap_len;
            self.bindings.resize(env + clause.nvars as usize, None);
            let ok = args
                .iter()
                .zip(clause.head.iter())
                .all(|(a, h)| self.unify(Ref { t: a, env: g.env }, Ref { t: h, env }));
            if !ok {
                self.undo(trail_len, heap_len);
                continue;
            }
            self.steps += 1;
            if i + 1 < candidates.len() {
                self.choices.push(ChoicePoint { goal: g.clone(), next_clause: i + 1, trail_len, heap_len });
            }
            let frame = Some(Rc::new(Frame { clause: clause.id.as_str().into(), parent: g.frame.clone() }));
            let mut next = g.next.clone();
            for lit in clause.body.iter().rev() {
                next = Some(Rc::new(Goal { lit, env, depth: g.depth + 1, next, frame: frame.clone() }));
            }
            return Next::Goals(next);
        }
        Next::Fail
    }

    fn deref(&self, mut r: Ref<'a>) -> Deref<'a> {
        loop {
            match r.t {
                CTerm::Var(i) => {
                    let slot = r.env + *i as usize;
                    match self.bindings[slot] {
                        Some(b) => r = b,
                        None => return Deref::Unbound(slot),
                    }
                }
                _ => return Deref::Bound(r),
            }
        }
    }

    fn bind(&mut self, slot: usize, r: Ref<'a>) {
        self.bindings[slot] = Some(r);
        self.trail.push(slot);
    }

    fn occurs(&self, slot: usize, r: Ref<'a>) -> bool {
        let mut stack = vec![r];
        while let Some(r) = stack.pop() {
            match self.deref(r) {
                Deref::Unbound(s) => {
                    if s == slot {
                        return true;
                    }
                }
                Deref::Bound(Ref { t: CTerm::Cmp(_, args), env }) => {
                    stack.extend(args.iter().map(|t| Ref { t, env }));
                }
                Deref::Bound(_) => {}
            }
        }
        false
    }

    fn unify(&mut self, a: Ref<'a>, b: Ref<'a>) -> bool {
        let mut stack = vec![(a, b)];
        while let Some((a, b)) = stack.pop() {
            match (self.deref(a), self.deref(b)) {
                (Deref::Unbound(x), Deref::Unbound(y)) => {
                    if x != y {
                        let (from, to) = if x > y { (x, y) } else { (y, x) };
                        self.bindings[from] = Some(Ref { t: &VAR0, env: to });
                        self.trail.push(from);
                    }
                }
                (Deref::Unbound(x), Deref::Bound(r)) | (Deref::Bound(r), Deref::Unbound(x)) => {
                    if matches!(r.t, CTerm::Cmp(..)) && self.occurs(x, r) {
                        return false;
                    }
                    self.bind(x, r);
                }
                (Deref::Bound(x), Deref::Bound(y)) => match (x.t, y.t) {
                    (CTerm::Int(m), CTerm::Int(n)) if m == n => {}
                    (CTerm::NegInf, CTerm::NegInf) => {}
                    (CTerm::Sym(f), CTerm::Sym(g)) if f == g => {}
                    (CTerm::Cmp(f, xs), CTerm::Cmp(g, ys)) if f == g && xs.len() == ys.len() => {
                        for (p, q) in xs.iter().zip(ys.iter()) {
                            stack.push((Ref { t: p, env: x.env }, Ref { t: q, env: y.env }));
                        }
                    }
                    _ => return false,
                },
            }
        }
        true
    }

    fn number(&self, r: Ref<'a>) -> Result<Option<Option<i64>>, ()> {
        // Ok(Some(None)) is neg_inf, Ok(None) a non-numeric ground term.
        match self.deref(r) {
            Deref::Unbound(_) => Err(()),
            Deref::Bound(Ref { t: CTerm::Int(n), .. }) => Ok(Some(Some(*n))),
            Deref::Bound(Ref { t: CTerm::NegInf, .. }) => Ok(Some(None)),
            Deref::Bound(_) => Ok(None),
        }
    }

    fn builtin(&mut self, op: BuiltinOp, x: Ref<'a>, y: Ref<'a>, g: &Goal<'a>) -> Result<bool, EngineError> {
        if op == BuiltinOp::Eq {
            let mark = (self.trail.len(), self.bindings.len());
            let ok = self.unify(x, y);
            if !ok {
                self.undo(mark.0, mark.1);
            }
            return Ok(ok);
        }
        let (Ok(a), Ok(b)) = (self.number(x), self.number(y)) else {
            return Err(self.nonground_error(op, x, y, g));
        };
        let (Some(a), Some(b)) = (a, b) else {
            return Ok(false);
        };
        // None (neg_inf) orders below every integer.
        Ok(match op {
            BuiltinOp::Leq => a <= b,
            BuiltinOp::Lt => a < b,
            BuiltinOp::Eq => unreachable!(),
        })
    }

    fn nonground_error(&self, op: BuiltinOp, x: Ref<'a>, y: Ref<'a>, g: &Goal<'a>) -> EngineError {
        let lit = Literal::Builtin(op, self.reify(x), self.reify(y));
        let mut stack = Vec::new();
        let mut f = g.frame.clone();
        while let Some(fr) = f {
            stack.push(fr.clause.to_string());
            f = fr.parent.clone();
        }
        EngineError::NongroundBuiltin { literal: literal_to_string(&lit), stack }
    }

    fn reify(&self, r: Ref<'a>) -> Term {
        match self.deref(r) {
            Deref::Unbound(slot) => Term::Var(Var::new("_G", slot as u32)),
            Deref::Bound(r) => match r.t {
                CTerm::Int(n) => Term::Const(Constant::Int(*n)),
                CTerm::NegInf => Term::Const(Constant::NegInf),
                CTerm::Sym(s) => Term::Const(Constant::Sym(self.code.sym_name(*s, self.extra).clone())),
                CTerm::Cmp(f, args) => Term::Compound(
                    self.code.sym_name(*f, self.extra).clone(),
                    args.iter().map(|t| self.reify(Ref { t, env: r.env })).collect(),
                ),
                CTerm::Var(_) => unreachable!("deref never yields a bound variable cell"),
            },
        }
    }

    fn answer(&self, qvars: &[Var]) -> Substitution {
        // Query variables occupy slots 0..n of the root frame.
        Substitution::simultaneous(qvars.iter().enumerate().filter_map(|(i, v)| {
            let t = self.reify_slot(i);
            (t != Term::Var(Var::new("_G", i as u32))).then(|| (v.clone(), t))
        }))
    }

    fn reify_slot(&self, slot: usize) -> Term {
        match self.bindings[slot] {
            Some(r) => self.reify(r),
            None => Term::Var(Var::new("_G", slot as u32)),
        }
    }
}

static VAR0: CTerm = CTerm::Var(0);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_program, parse_query, term_to_string};

    const NAIVE: &str = "\
sort(Ls1, Ls2) :- perm1(Ls1, Ls2), ord1(Ls2).
perm1([], []).
perm1([A|Ls1], Ls3) :- perm1(Ls1, Ls2), insert(A, Ls2, Ls3).
insert(A, Ls, [A|Ls]).
insert(A, [B|Ls1], [B|Ls2]) :- insert(A, Ls1, Ls2).
ord1([]).
ord1([A]).
ord1([A, B|Ls]) :- A =< B, ord1([B|Ls]).
";

    fn answers_for(p: &str, q: &str, var: &str) -> (Vec<String>, AnswerSet) {
        let p = parse_program(p).unwrap();
        let q = parse_query(q).unwrap();
        let r = solve(&p, &q, SolveLimits::default()).unwrap();
        let v = Var::new(var, 0);
        let xs = r.answers.iter().map(|s| term_to_string(&s.apply(&Term::Var(v.clone())))).collect();
        (xs, r)
    }

    #[test]
    fn naive_sort_of_two_elements() {
        let (xs, r) = answers_for(NAIVE, "sort([2,1], X)", "X");
        assert_eq!(xs, vec!["[1, 2]"]);
        assert!(r.exhausted);
        assert!(r.steps >= 1);
    }

    #[test]
    fn perm1_enumerates_both_orders() {
        let (mut xs, _) = answers_for(NAIVE, "perm1([1,2], X)", "X");
        xs.sort();
        assert_eq!(xs, vec!["[1, 2]", "[2, 1]"]);
    }

    #[test]
    fn unordered_list_fails_exhaustively() {
        let (xs, r) = answers_for(NAIVE, "ord1([2,1])", "X");
        assert!(xs.is_empty());
        assert!(r.exhausted);
    }

    #[test]
    fn unbound_builtin_reports_call_stack() {
        let p = parse_program("p(X) :- q(X).\nq(X) :- X =< 1.").unwrap();
        let err = solve(&p, &parse_query("p(Y)").unwrap(), SolveLimits::default()).unwrap_err();
        match err {
            EngineError::NongroundBuiltin { stack, .. } => assert_eq!(stack, vec!["c2", "c1"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn neg_inf_orders_below_integers() {
        let p = parse_program("t.").unwrap();
        for (q, n) in [("neg_inf < 0", 1), ("neg_inf =< neg_inf", 1), ("0 < neg_inf", 0), ("neg_inf < neg_inf", 0)] {
            let r = solve(&p, &parse_query(q).unwrap(), SolveLimits::default()).unwrap();
            assert_eq!(r.answers.len(), n, "{q}");
        }
    }

    #[test]
    fn occurs_check_blocks_cyclic_binding() {
        let p = parse_program("eqq(X, X).").unwrap();
        let r = solve(&p, &parse_query("eqq(Y, f(Y))").unwrap(), SolveLimits::default()).unwrap();
        assert!(r.answers.is_empty() && r.exhausted);
    }

    #[test]
    fn step_limit_marks_search_unfinished() {
        let p = parse_program("loop(X) :- loop(X).").unwrap();
        let r = solve(&p, &parse_query("loop(1)").unwrap(), SolveLimits::default().with_max_steps(50)).unwrap();
        assert!(!r.exhausted);
        assert!(r.steps <= 50);
    }

    #[test]
    fn depth_limit_marks_search_unfinished() {
        let p = parse_program("nat(z).\nnat(s(X)) :- nat(X).").unwrap();
        let limits = SolveLimits { max_depth: 5, ..SolveLimits::default() };
        let r = solve(&p, &parse_query("nat(Y)").unwrap(), limits).unwrap();
        assert_eq!(r.answers.len(), 5);
        assert!(!r.exhausted);
    }

    #[test]
    fn max_answers_stops_early() {
        let p = parse_program(NAIVE).unwrap();
        let q = parse_query("perm1([1,2,3], X)").unwrap();
        let r = solve(&p, &q, SolveLimits::default().with_max_answers(2)).unwrap();
        assert_eq!(r.answers.len(), 2);
        assert!(!r.exhausted);
    }

    #[test]
    fn undefined_predicate_fails() {
        let p = parse_program("p :- q.").unwrap();
        let r = solve(&p, &parse_query("p").unwrap(), SolveLimits::default()).unwrap();
        assert!(r.answers.is_empty() && r.exhausted);
    }

    #[test]
    fn equality_unifies_unbound_sides() {
        let (xs, _) = answers_for("m(A, B, C) :- A < B, C = A.", "m(1, 2, Z)", "Z");
        assert_eq!(xs, vec!["1"]);
    }

    #[test]
    fn zero_limits_are_rejected() {
        let p = parse_program("t.").unwrap();
        let limits = SolveLimits { max_depth: 0, ..SolveLimits::default() };
        assert_eq!(solve(&p, &parse_query("t").unwrap(), limits), Err(EngineError::InvalidLimits));
    }

    #[test]
    fn identical_inputs_give_identical_step_counts() {
        let p = parse_program(NAIVE).unwrap();
        let q = parse_query("sort([3,1,2], X)").unwrap();
        let a = solve(&p, &q, SolveLimits::default()).unwrap();
        let b = solve(&p, &q, SolveLimits::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn long_continuations_drop_without_recursion() {
        // Each level pushes a pending `q`, so the continuation is max_depth long.
        let p = parse_program("p :- p, q.\nq.").unwrap();
        let handle = std::thread::Builder::new()
            .stack_size(128 * 1024)
            .spawn(move || solve(&p, &parse_query("p").unwrap(), SolveLimits::default()).unwrap())
            .unwrap();
        let r = handle.join().expect("no stack overflow");
        assert!(!r.exhausted);
    }
}
