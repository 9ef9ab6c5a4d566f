//! Prolog-like concrete syntax: `head :- l1, l2.`, `[H|T]` lists, `=<`, `<`,
//! `=` (plus `>=` / `>` which are normalised by swapping arguments), `%`
//! line comments, `neg_inf` for the bottom element.

use std::fmt;

use super::program::{Clause, Program};
use super::term::{Atom, BuiltinOp, Constant, Literal, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at line {}, column {}: expected {}, found {}",
            self.line, self.column, self.expected, self.found
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Bar,
    Comma,
    Dot,
    Neck,
    Op(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Var(s) => format!("variable `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Neck => "`:-`".into(),
            Tok::Op(o) => format!("`{o}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: tl, column: tc });
            *i += len;
            *col += len;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '[' => push(Tok::LBracket, 1, &mut i, &mut col),
            ']' => push(Tok::RBracket, 1, &mut i, &mut col),
            '|' => push(Tok::Bar, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            ':' if chars.get(i + 1) == Some(&'-') => push(Tok::Neck, 2, &mut i, &mut col),
            '=' if chars.get(i + 1) == Some(&'<') => push(Tok::Op("=<"), 2, &mut i, &mut col),
            '=' => push(Tok::Op("="), 1, &mut i, &mut col),
            '<' if chars.get(i + 1) == Some(&'=') => push(Tok::Op("=<"), 2, &mut i, &mut col),
            '<' => push(Tok::Op("<"), 1, &mut i, &mut col),
            '>' if chars.get(i + 1) == Some(&'=') => push(Tok::Op(">="), 2, &mut i, &mut col),
            '>' => push(Tok::Op(">"), 1, &mut i, &mut col),
            c if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[start..j].iter().collect();
                let n = s.parse::<i64>().map_err(|_| ParseError {
                    line: tl,
                    column: tc,
                    expected: "integer in range".into(),
                    found: format!("`{s}`"),
                })?;
                push(Tok::Int(n), j - start, &mut i, &mut col);
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                // Names may carry trailing primes, as in `append'`.
                if c.is_lowercase() {
                    while j < chars.len() && chars[j] == '\'' {
                        j += 1;
                    }
                }
                let s: String = chars[start..j].iter().collect();
                let tok = if c.is_uppercase() || c == '_' { Tok::Var(s) } else { Tok::Ident(s) };
                push(tok, j - start, &mut i, &mut col);
            }
            other => {
                return Err(ParseError {
                    line: tl,
                    column: tc,
                    expected: "a term, literal or punctuation".into(),
                    found: format!("character `{other}`"),
                })
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    anon: u32,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(text)?, pos: 0, anon: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError { line: s.line, column: s.column, expected: expected.into(), found: s.tok.describe() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Var(name) => {
                self.bump();
                if name == "_" {
                    self.anon += 1;
                    Ok(Term::Var(Var::new("_", self.anon)))
                } else {
                    Ok(Term::var(&name))
                }
            }
            Tok::Int(n) => {
                self.bump();
                Ok(Term::int(n))
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let args = self.term_list(Tok::RParen, "`,` or `)`")?;
                    Ok(Term::compound(&name, args))
                } else if name == "neg_inf" {
                    Ok(Term::Const(Constant::NegInf))
                } else if name == "nil" {
                    Ok(Term::nil())
                } else {
                    Ok(Term::sym(&name))
                }
            }
            Tok::LBracket => {
                self.bump();
                if *self.peek() == Tok::RBracket {
                    self.bump();
                    return Ok(Term::nil());
                }
                let mut items = vec![self.term()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    items.push(self.term()?);
                }
                let tail = if *self.peek() == Tok::Bar {
                    self.bump();
                    self.term()?
                } else {
                    Term::nil()
                };
                self.expect(Tok::RBracket, "`,`, `|` or `]`")?;
                Ok(Term::list_with_tail(items, tail))
            }
            _ => Err(self.error("a term")),
        }
    }

    fn term_list(&mut self, close: Tok, what: &str) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                    args.push(self.term()?);
                }
                t if *t == close => {
                    self.bump();
                    return Ok(args);
                }
                _ => return Err(self.error(what)),
            }
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let start = self.pos;
        match self.term()? {
            Term::Const(Constant::Sym(s)) => Ok(Atom { pred: s, args: vec![] }),
            Term::Compound(f, args) if !(&*f == super::term::CONS && args.len() == 2) => Ok(Atom { pred: f, args }),
            _ => {
                self.pos = start;
                Err(self.error("an atom"))
            }
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let start = self.pos;
        let lhs = self.term()?;
        if let Tok::Op(op) = self.peek().clone() {
            self.bump();
            let rhs = self.term()?;
            return Ok(match op {
                "=<" => Literal::Builtin(BuiltinOp::Leq, lhs, rhs),
                "<" => Literal::Builtin(BuiltinOp::Lt, lhs, rhs),
                "=" => Literal::Builtin(BuiltinOp::Eq, lhs, rhs),
                ">=" => Literal::Builtin(BuiltinOp::Leq, rhs, lhs),
                _ => Literal::Builtin(BuiltinOp::Lt, rhs, lhs),
            });
        }
        match lhs {
            Term::Const(Constant::Sym(s)) => Ok(Literal::Atom(Atom { pred: s, args: vec![] })),
            Term::Compound(f, mut args) if !(&*f == super::term::CONS && args.len() == 2) => {
                match BuiltinOp::from_name(&f) {
                    Some(op) if args.len() == 2 => {
                        let r = args.pop().expect("two args");
                        let l = args.pop().expect("two args");
                        Ok(Literal::Builtin(op, l, r))
                    }
                    _ => Ok(Literal::Atom(Atom { pred: f, args })),
                }
            }
            _ => {
                self.pos = start;
                Err(self.error("a literal"))
            }
        }
    }

    fn body(&mut self) -> Result<Vec<Literal>, ParseError> {
        let mut body = vec![self.literal()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            body.push(self.literal()?);
        }
        Ok(body)
    }

    fn clause(&mut self, id: String) -> Result<Clause, ParseError> {
        self.anon = 0;
        let head = self.atom()?;
        let body = if *self.peek() == Tok::Neck {
            self.bump();
            self.body()?
        } else {
            vec![]
        };
        if *self.peek() != Tok::Dot {
            let what = if body.is_empty() { "`:-` or `.`" } else { "`,` or `.`" };
            return Err(self.error(what));
        }
        self.bump();
        Ok(Clause::new(id, head, body))
    }
}

/// Parses a program; clauses get ids `c1`, `c2`, ... in textual order.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(text)?;
    let mut clauses = Vec::new();
    while *p.peek() != Tok::Eof {
        clauses.push(p.clause(format!("c{}", clauses.len() + 1))?);
    }
    Ok(Program::from_clauses("", clauses).expect("generated ids are unique"))
}

/// Parses a comma-separated conjunction with an optional trailing `.`.
pub fn parse_query(text: &str) -> Result<Vec<Literal>, ParseError> {
    let mut p = Parser::new(text)?;
    let body = p.body()?;
    if *p.peek() == Tok::Dot {
        p.bump();
    }
    if *p.peek() != Tok::Eof {
        return Err(p.error("`,` or end of query"));
    }
    Ok(body)
}

pub fn parse_literal(text: &str) -> Result<Literal, ParseError> {
    let mut lits = parse_query(text)?;
    if lits.len() != 1 {
        let mut p = Parser::new(text)?;
        let _ = p.literal();
        return Err(p.error("a single literal"));
    }
    Ok(lits.pop().expect("one literal"))
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of term"));
    }
    Ok(t)
}

/// Parses a single clause (the id is `c1`).
pub fn parse_clause(text: &str) -> Result<Clause, ParseError> {
    let mut p = Parser::new(text)?;
    let c = p.clause("c1".into())?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of clause"));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::kernel::print::{clause_to_string, literal_to_string, term_to_string};
    use crate::kernel::{alpha_equivalent_clauses, arb};

    #[test]
    fn unclosed_argument_list_reports_end_of_input() {
        let e = parse_literal("p(X").unwrap_err();
        assert_eq!((e.line, e.column), (1, 4));
        assert_eq!(e.found, "end of input");
    }

    #[test]
    fn error_positions_count_lines() {
        let e = parse_program("p(a).\nq(b) :- .").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.column, 9);
    }

    #[test]
    fn comparison_sugar_swaps_arguments() {
        assert_eq!(parse_literal("X >= Y").unwrap(), parse_literal("Y =< X").unwrap());
        assert_eq!(parse_literal("X > Y").unwrap(), parse_literal("Y < X").unwrap());
    }

    #[test]
    fn lists_desugar_to_cons() {
        let t = parse_term("[1, 2|T]").unwrap();
        assert_eq!(t, Term::list_with_tail([Term::int(1), Term::int(2)], Term::var("T")));
        assert_eq!(parse_term("[]").unwrap(), Term::nil());
    }

    #[test]
    fn program_ids_follow_text_order() {
        let p = parse_program("% comment\np(a).\np(X) :- q(X).\n").unwrap();
        let ids: Vec<_> = p.clauses().iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["c1", "c2"]);
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let c = parse_clause("p(_, _).").unwrap();
        assert_eq!(c.vars().len(), 2);
    }

    #[test]
    fn neg_inf_is_a_constant() {
        assert_eq!(parse_term("neg_inf").unwrap(), Term::Const(Constant::NegInf));
    }

    #[test]
    fn trailing_garbage_rejected() {
        assert!(parse_term("f(a) b").is_err());
        assert!(parse_literal("p(a), q(b)").is_err());
        assert!(parse_clause("p(a). q(b).").is_err());
    }

    fn index_zero(t: &Term) -> bool {
        t.vars().iter().all(|v| v.index == 0)
    }

    proptest! {
        #[test]
        fn term_round_trip(t in arb::term().prop_filter("source names", index_zero)) {
            prop_assert_eq!(parse_term(&term_to_string(&t)).unwrap(), t);
        }

        #[test]
        fn literal_round_trip(l in arb::literal().prop_filter("source names", |l| l.vars().iter().all(|v| v.index == 0))) {
            prop_assert_eq!(parse_literal(&literal_to_string(&l)).unwrap(), l);
        }

        #[test]
        fn clause_round_trip_up_to_renaming(c in arb::clause()) {
            let text = clause_to_string(&c);
            let back = parse_clause(&text).unwrap();
            prop_assert!(alpha_equivalent_clauses(&back, &c), "{} reparsed as {}", text, clause_to_string(&back));
            prop_assert_eq!(clause_to_string(&back), text);
        }
    }
}
