use std::collections::HashMap;
use std::sync::Arc;

use crate::kernel::{BuiltinOp, Clause, Constant, Literal, PredKey, Program, Term, Var};

pub(crate) const UNDEFINED_PRED: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub(crate) enum CTerm {
    Var(u32),
    Int(i64),
    NegInf,
    Sym(u32),
    Cmp(u32, Box<[CTerm]>),
}

#[derive(Debug, Clone)]
pub(crate) enum CLit {
    User { pred: u32, args: Box<[CTerm]> },
    Builtin(BuiltinOp, CTerm, CTerm),
}

#[derive(Debug, Clone)]
pub(crate) struct CClause {
    pub head: Box<[CTerm]>,
    pub body: Box<[CLit]>,
    pub nvars: u32,
    pub id: String,
}

/// Symbols are interned in the program table; symbols that only occur in a
/// query get ids past the end of the table.
#[derive(Debug, Default, Clone)]
pub(crate) struct Symbols {
    names: Vec<Arc<str>>,
    ids: HashMap<Arc<str>, u32>,
}

impl Symbols {
    fn intern(&mut self, s: &Arc<str>) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(s.clone());
        self.ids.insert(s.clone(), id);
        id
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub syms: Symbols,
    pred_ids: HashMap<PredKey, u32>,
    pub clauses: Vec<Vec<CClause>>,
}

struct ClauseCtx<'s> {
    syms: &'s mut dyn FnMut(&Arc<str>) -> u32,
    vars: HashMap<Var, u32>,
    order: Vec<Var>,
}

impl ClauseCtx<'_> {
    fn term(&mut self, t: &Term) -> CTerm {
        match t {
            Term::Var(v) => {
                let next = self.vars.len() as u32;
                let id = *self.vars.entry(v.clone()).or_insert_with(|| {
                    self.order.push(v.clone());
                    next
                });
                CTerm::Var(id)
            }
            Term::Const(Constant::Int(n)) => CTerm::Int(*n),
            Term::Const(Constant::NegInf) => CTerm::NegInf,
            Term::Const(Constant::Sym(s)) => CTerm::Sym((self.syms)(s)),
            Term::Compound(f, args) => {
                let f = (self.syms)(f);
                CTerm::Cmp(f, args.iter().map(|a| self.term(a)).collect())
            }
        }
    }
}

impl Compiled {
    pub fn new(p: &Program) -> Self {
        let mut syms = Symbols::default();
        let mut preds = Vec::new();
        let mut pred_ids = HashMap::new();
        for c in p.clauses() {
            let k = c.key();
            if !pred_ids.contains_key(&k) {
                pred_ids.insert(k.clone(), preds.len() as u32);
                preds.push(k);
            }
        }
        let mut clauses: Vec<Vec<CClause>> = vec![Vec::new(); preds.len()];
        for c in p.clauses() {
            let idx = pred_ids[&c.key()] as usize;
            let cc = Self::compile_clause(c, &mut syms, &pred_ids);
            clauses[idx].push(cc);
        }
        Compiled { syms, pred_ids, clauses }
    }

    fn compile_clause(c: &Clause, syms: &mut Symbols, pred_ids: &HashMap<PredKey, u32>) -> CClause {
        let mut intern = |s: &Arc<str>| syms.intern(s);
        let mut ctx = ClauseCtx { syms: &mut intern, vars: HashMap::new(), order: Vec::new() };
        let head = c.head.args.iter().map(|t| ctx.term(t)).collect();
        let body = c.body.iter().map(|l| compile_lit(l, &mut ctx, pred_ids)).collect();
        CClause { head, body, nvars: ctx.vars.len() as u32, id: c.id.clone() }
    }

    /// Compiles a query. Returns the literals, the query variables in slot
    /// order, and symbols introduced by the query.
    pub fn compile_query(&self, query: &[Literal]) -> (Vec<CLit>, Vec<Var>, Vec<Arc<str>>) {
        let mut extra: Vec<Arc<str>> = Vec::new();
        let base = self.syms.names.len() as u32;
        let mut intern = |s: &Arc<str>| {
            if let Some(&id) = self.syms.ids.get(s) {
                return id;
            }
            if let Some(i) = extra.iter().position(|e| e == s) {
                return base + i as u32;
            }
            extra.push(s.clone());
            base + extra.len() as u32 - 1
        };
        let mut ctx = ClauseCtx { syms: &mut intern, vars: HashMap::new(), order: Vec::new() };
        let lits = query.iter().map(|l| compile_lit(l, &mut ctx, &self.pred_ids)).collect();
        let order = std::mem::take(&mut ctx.order);
        drop(ctx);
        (lits, order, extra)
    }

    pub fn sym_name<'a>(&'a self, id: u32, extra: &'a [Arc<str>]) -> &'a Arc<str> {
        let base = self.syms.names.len();
        let id = id as usize;
        if id < base {
            &self.syms.names[id]
        } else {
            &extra[id - base]
        }
    }
}

fn compile_lit(l: &Literal, ctx: &mut ClauseCtx<'_>, pred_ids: &HashMap<PredKey, u32>) -> CLit {
    match l {
        Literal::Atom(a) => CLit::User {
            pred: pred_ids.get(&a.key()).copied().unwrap_or(UNDEFINED_PRED),
            args: a.args.iter().map(|t| ctx.term(t)).collect(),
        },
        Literal::Builtin(op, x, y) => {
            let x = ctx.term(x);
            let y = ctx.term(y);
            CLit::Builtin(*op, x, y)
        }
    }
}
