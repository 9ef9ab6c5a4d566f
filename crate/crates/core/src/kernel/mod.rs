//! Syntax of definite programs and the substitution machinery over it.

mod alpha;
#[cfg(test)]
pub(crate) mod arb;
mod parse;
mod print;
mod program;
mod subst;
mod term;

pub use alpha::{alpha_equivalent_clauses, alpha_equivalent_programs, normal_form, unmatched_clauses};
pub use parse::{parse_clause, parse_literal, parse_program, parse_query, parse_term, ParseError};
pub use print::{
    atom_with_names, canonical_names, clause_names, clause_to_string, literal_canonical, literal_to_string,
    literal_with_names, program_to_string, program_with_ids, term_to_string, term_with_names, NameMap,
};
pub use program::{Clause, DuplicateClauseId, Program};
pub use subst::{
    match_literal, match_term, rename_all_apart, rename_apart, renaming_avoiding, unify, unify_with, Substitute,
    Substitution, Unifiable,
};
pub use term::{var_set, vars_of, Atom, BuiltinOp, Constant, Literal, PredKey, Term, Var, CONS, NIL};

/// Parses `text` as a literal in the context of clause `c`: variable names
/// that match the clause's canonical names denote the clause's variables,
/// other names become variables fresh for the clause.
pub fn parse_literal_in(c: &Clause, text: &str) -> Result<Literal, ParseError> {
    let lit = parse_literal(text)?;
    Ok(bind_names_in(c, &lit))
}

pub(crate) fn bind_names_in(c: &Clause, lit: &Literal) -> Literal {
    let names = clause_names(c);
    let by_name: std::collections::BTreeMap<&str, &Var> = names.iter().map(|(v, n)| (n.as_str(), v)).collect();
    let mut used: std::collections::BTreeSet<Var> = c.vars().into_iter().collect();
    let mut pairs = Vec::new();
    for v in lit.vars() {
        let name = v.to_string();
        if let Some(target) = by_name.get(name.as_str()) {
            pairs.push((v.clone(), Term::Var((*target).clone())));
        } else {
            let fresh = (v.index..)
                .map(|i| Var { name: v.name.clone(), index: i })
                .find(|w| !used.contains(w))
                .expect("unbounded search");
            used.insert(fresh.clone());
            pairs.push((v.clone(), Term::Var(fresh)));
        }
    }
    Substitution::simultaneous(pairs).apply(lit)
}
