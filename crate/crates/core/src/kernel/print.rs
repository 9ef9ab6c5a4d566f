//! Canonical pretty-printing. Variable names are chosen per clause from the
//! source names, in first-occurrence order, so printing is stable under
//! renaming apart.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::program::{Clause, Program};
use super::term::{Atom, Constant, Literal, Term, Var};

pub type NameMap = BTreeMap<Var, String>;

/// Assigns printable names to `vars` (in order). A variable keeps its source
/// name when no earlier variable claimed it; otherwise it gets a numeric
/// suffix. Anonymous variables are numbered.
pub fn canonical_names(vars: &[Var]) -> NameMap {
    let bases: BTreeSet<&str> = vars.iter().map(|v| &*v.name).collect();
    let mut taken = BTreeSet::new();
    let mut out = NameMap::new();
    let mut anon = 0;
    for v in vars {
        if out.contains_key(v) {
            continue;
        }
        let name = if &*v.name == "_" {
            loop {
                anon += 1;
                let cand = format!("_{anon}");
                if !taken.contains(&cand) && !bases.contains(cand.as_str()) {
                    break cand;
                }
            }
        } else if !taken.contains(&*v.name) {
            v.name.to_string()
        } else {
            (1..)
                .map(|k| format!("{}_{k}", v.name))
                .find(|c| !taken.contains(c) && !bases.contains(c.as_str()))
                .expect("unbounded search")
        };
        taken.insert(name.clone());
        out.insert(v.clone(), name);
    }
    out
}

pub fn clause_names(c: &Clause) -> NameMap {
    canonical_names(&c.vars())
}

fn write_const(out: &mut String, c: &Constant) {
    match c {
        Constant::NegInf => out.push_str("neg_inf"),
        Constant::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Constant::Sym(s) => out.push_str(s),
    }
}

fn write_var(out: &mut String, v: &Var, names: Option<&NameMap>) {
    match names.and_then(|m| m.get(v)) {
        Some(n) => out.push_str(n),
        None => {
            let _ = write!(out, "{v}");
        }
    }
}

fn write_term(out: &mut String, t: &Term, names: Option<&NameMap>) {
    match t {
        Term::Var(v) => write_var(out, v, names),
        Term::Const(c) => write_const(out, c),
        Term::Compound(..) if t.as_cons().is_some() => {
            out.push('[');
            let mut cur = t;
            let mut first = true;
            while let Some((h, tail)) = cur.as_cons() {
                if !first {
                    out.push_str(", ");
                }
                first = false;
                write_term(out, h, names);
                cur = tail;
            }
            if !cur.is_nil() {
                out.push('|');
                write_term(out, cur, names);
            }
            out.push(']');
        }
        Term::Compound(f, args) => {
            out.push_str(f);
            write_args(out, args, names);
        }
    }
}

fn write_args(out: &mut String, args: &[Term], names: Option<&NameMap>) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_term(out, a, names);
    }
    out.push(')');
}

fn write_atom(out: &mut String, a: &Atom, names: Option<&NameMap>) {
    out.push_str(&a.pred);
    if !a.args.is_empty() {
        write_args(out, &a.args, names);
    }
}

fn write_literal(out: &mut String, l: &Literal, names: Option<&NameMap>) {
    match l {
        Literal::Atom(a) => write_atom(out, a, names),
        Literal::Builtin(op, lhs, rhs) => {
            write_term(out, lhs, names);
            let _ = write!(out, " {} ", op.symbol());
            write_term(out, rhs, names);
        }
    }
}

pub fn term_to_string(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t, None);
    s
}

pub fn term_with_names(t: &Term, names: &NameMap) -> String {
    let mut s = String::new();
    write_term(&mut s, t, Some(names));
    s
}

pub fn literal_to_string(l: &Literal) -> String {
    let mut s = String::new();
    write_literal(&mut s, l, None);
    s
}

/// Prints `l` using the names of the clause it lives in.
pub fn literal_with_names(l: &Literal, names: &NameMap) -> String {
    let mut s = String::new();
    write_literal(&mut s, l, Some(names));
    s
}

/// Prints a literal on its own, with canonical names for its variables.
pub fn literal_canonical(l: &Literal) -> String {
    literal_with_names(l, &canonical_names(&l.vars()))
}

pub fn atom_with_names(a: &Atom, names: &NameMap) -> String {
    let mut s = String::new();
    write_atom(&mut s, a, Some(names));
    s
}

pub fn clause_to_string(c: &Clause) -> String {
    let names = clause_names(c);
    let mut s = String::new();
    write_atom(&mut s, &c.head, Some(&names));
    if !c.body.is_empty() {
        s.push_str(" :- ");
        for (i, l) in c.body.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            write_literal(&mut s, l, Some(&names));
        }
    }
    s.push('.');
    s
}

/// Canonical program text: one clause per line.
pub fn program_to_string(p: &Program) -> String {
    let mut s = String::new();
    for c in p.clauses() {
        s.push_str(&clause_to_string(c));
        s.push('\n');
    }
    s
}

/// Program text with each clause preceded by a `% id` comment line.
pub fn program_with_ids(p: &Program) -> String {
    let mut s = String::new();
    for c in p.clauses() {
        let _ = writeln!(s, "% {}", c.id);
        s.push_str(&clause_to_string(c));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse::{parse_clause, parse_program};

    #[test]
    fn clashing_source_names_get_suffixes() {
        let vs = [Var::new("X", 0), Var::new("X", 3), Var::new("_", 0), Var::new("_", 1)];
        let names = canonical_names(&vs);
        let got: Vec<_> = vs.iter().map(|v| names[v].as_str()).collect();
        assert_eq!(got, ["X", "X_1", "_1", "_2"]);
    }

    #[test]
    fn suffix_skips_names_already_in_source() {
        let vs = [Var::new("X", 0), Var::new("X_1", 0), Var::new("X", 1)];
        let names = canonical_names(&vs);
        assert_eq!(names[&vs[2]], "X_2");
    }

    #[test]
    fn clause_text() {
        let c = parse_clause("p([H|T], X) :- X =< H, q(T).").unwrap();
        assert_eq!(clause_to_string(&c), "p([H|T], X) :- X =< H, q(T).");
        assert_eq!(clause_to_string(&parse_clause("p(a).").unwrap()), "p(a).");
    }

    #[test]
    fn program_text_with_ids() {
        let p = parse_program("p(a).\nq(b).").unwrap();
        assert_eq!(program_to_string(&p), "p(a).\nq(b).\n");
        assert_eq!(program_with_ids(&p), "% c1\np(a).\n% c2\nq(b).\n");
    }
}
