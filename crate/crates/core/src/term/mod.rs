//! Lattice terms, conditional equations and the named equation families.
//!
//! Concrete syntax (ASCII):
//!
//! ```text
//! a # b, c C d |- (a v b) ^ c' <= a -> b
//! ```
//!
//! Variables are a lowercase letter followed by optional digits (the bare
//! letter `v` is reserved for join), `0`/`1` are the constants, `'` is
//! postfix orthocomplement, `^` meet, `v` join and `->` the Sasaki arrow.
//! Binding strength, tightest first: `'`, `^`, `v`, `->`. Meet and join
//! associate to the left, the arrow to the right. Hypotheses `t # u`
//! (t ⊥ u) and `t C u` (t commutes with u) precede `|-`.

mod family;
mod mge;
mod parse;

use std::fmt;

pub use family::{build_family, Family, FamilyError};
pub use mge::{condensed_to_mge, CondensedStateEquation, MgEquation, MgeError};
pub use parse::{parse_equation, parse_term, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Zero,
    One,
    Comp(Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    /// Sasaki arrow `t' ∨ (t ∧ u)`.
    Arrow(Box<Term>, Box<Term>),
}

pub fn var(name: impl Into<String>) -> Term {
    Term::Var(name.into())
}

impl Term {
    pub fn comp(self) -> Term {
        Term::Comp(Box::new(self))
    }

    pub fn meet(self, other: Term) -> Term {
        Term::Meet(Box::new(self), Box::new(other))
    }

    pub fn join(self, other: Term) -> Term {
        Term::Join(Box::new(self), Box::new(other))
    }

    pub fn arrow(self, other: Term) -> Term {
        Term::Arrow(Box::new(self), Box::new(other))
    }

    /// Left-nested meet of a non-empty sequence.
    pub fn meet_all(terms: impl IntoIterator<Item = Term>) -> Term {
        terms
            .into_iter()
            .reduce(Term::meet)
            .expect("meet of at least one term")
    }

    /// Left-nested join of a non-empty sequence.
    pub fn join_all(terms: impl IntoIterator<Item = Term>) -> Term {
        terms
            .into_iter()
            .reduce(Term::join)
            .expect("join of at least one term")
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Zero | Term::One => 1,
            Term::Comp(t) => 1 + t.size(),
            Term::Meet(a, b) | Term::Join(a, b) | Term::Arrow(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Appends variables not yet in `out`, in first-occurrence order.
    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Zero | Term::One => {}
            Term::Comp(t) => t.collect_vars(out),
            Term::Meet(a, b) | Term::Join(a, b) | Term::Arrow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    /// Rewrites every Sasaki arrow into `'`, `^` and `v`.
    pub fn expand_arrows(&self) -> Term {
        match self {
            Term::Var(_) | Term::Zero | Term::One => self.clone(),
            Term::Comp(t) => t.expand_arrows().comp(),
            Term::Meet(a, b) => a.expand_arrows().meet(b.expand_arrows()),
            Term::Join(a, b) => a.expand_arrows().join(b.expand_arrows()),
            Term::Arrow(a, b) => {
                let a = a.expand_arrows();
                let b = b.expand_arrows();
                a.clone().comp().join(a.meet(b))
            }
        }
    }

    /// Replaces variables according to `f`; unmapped names are kept.
    pub fn rename(&self, f: &impl Fn(&str) -> Option<String>) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v).unwrap_or_else(|| v.clone())),
            Term::Zero | Term::One => self.clone(),
            Term::Comp(t) => t.rename(f).comp(),
            Term::Meet(a, b) => a.rename(f).meet(b.rename(f)),
            Term::Join(a, b) => a.rename(f).join(b.rename(f)),
            Term::Arrow(a, b) => a.rename(f).arrow(b.rename(f)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::Arrow(..) => 1,
            Term::Join(..) => 2,
            Term::Meet(..) => 3,
            Term::Comp(_) | Term::Var(_) | Term::Zero | Term::One => 4,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    if t.precedence() < min {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Zero => f.write_str("0"),
            Term::One => f.write_str("1"),
            Term::Comp(t) => {
                write_operand(f, t, 4)?;
                f.write_str("'")
            }
            Term::Meet(a, b) => {
                write_operand(f, a, 3)?;
                f.write_str(" ^ ")?;
                write_operand(f, b, 4)
            }
            Term::Join(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str(" v ")?;
                write_operand(f, b, 3)
            }
            Term::Arrow(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str(" -> ")?;
                write_operand(f, b, 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// `t ⊥ u`, i.e. `t <= u'`.
    Orthogonal(Term, Term),
    /// `t C u`, i.e. `t ^ (t' v u) <= u`.
    Commutes(Term, Term),
}

impl Hypothesis {
    pub fn operands(&self) -> (&Term, &Term) {
        match self {
            Hypothesis::Orthogonal(a, b) | Hypothesis::Commutes(a, b) => (a, b),
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let (a, b) = self.operands();
        let mut out = a.vars();
        b.collect_vars(&mut out);
        out
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::Orthogonal(a, b) => write!(f, "{a} # {b}"),
            Hypothesis::Commutes(a, b) => write!(f, "{a} C {b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
}

/// Hypotheses plus a `<=` or `==` conclusion, universally quantified over
/// `variables`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionalEquation {
    pub hypotheses: Vec<Hypothesis>,
    pub relation: Relation,
    pub lhs: Term,
    pub rhs: Term,
    pub variables: Vec<String>,
}

impl ConditionalEquation {
    /// Variables are collected in first-occurrence order, hypotheses first.
    pub fn new(hypotheses: Vec<Hypothesis>, relation: Relation, lhs: Term, rhs: Term) -> Self {
        let mut variables = Vec::new();
        for h in &hypotheses {
            let (a, b) = h.operands();
            a.collect_vars(&mut variables);
            b.collect_vars(&mut variables);
        }
        lhs.collect_vars(&mut variables);
        rhs.collect_vars(&mut variables);
        ConditionalEquation {
            hypotheses,
            relation,
            lhs,
            rhs,
            variables,
        }
    }

    /// Overrides the variable order. `order` must list exactly the
    /// variables of the equation.
    pub fn with_variable_order(mut self, order: &[&str]) -> Self {
        let mut sorted_new: Vec<&str> = order.to_vec();
        sorted_new.sort_unstable();
        let mut sorted_old: Vec<&str> = self.variables.iter().map(String::as_str).collect();
        sorted_old.sort_unstable();
        assert_eq!(sorted_new, sorted_old, "variable order must be a permutation");
        self.variables = order.iter().map(|s| s.to_string()).collect();
        self
    }
}

impl fmt::Display for ConditionalEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.hypotheses.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{h}")?;
        }
        if !self.hypotheses.is_empty() {
            f.write_str(" ")?;
        }
        let rel = match self.relation {
            Relation::Le => "<=",
            Relation::Eq => "==",
        };
        write!(f, "|- {} {rel} {}", self.lhs, self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_uses_minimal_parentheses() {
        let t = var("a").join(var("b")).meet(var("c").comp());
        assert_eq!(t.to_string(), "(a v b) ^ c'");
        let t = var("a").meet(var("b").join(var("c")));
        assert_eq!(t.to_string(), "a ^ (b v c)");
        let t = var("a").arrow(var("b")).arrow(var("c"));
        assert_eq!(t.to_string(), "(a -> b) -> c");
        let t = var("a").arrow(var("b").arrow(var("c")));
        assert_eq!(t.to_string(), "a -> b -> c");
        let t = var("a").join(var("b")).comp();
        assert_eq!(t.to_string(), "(a v b)'");
    }

    #[test]
    fn arrow_expansion() {
        let t = var("a").arrow(var("b"));
        assert_eq!(t.expand_arrows().to_string(), "a' v a ^ b");
        assert_eq!(t.size(), 3);
        assert_eq!(t.expand_arrows().size(), 6);
    }

    #[test]
    fn variables_in_first_occurrence_order() {
        let eq = ConditionalEquation::new(
            vec![Hypothesis::Orthogonal(var("c"), var("a"))],
            Relation::Le,
            var("b").meet(var("a")),
            var("d"),
        );
        assert_eq!(eq.variables, ["c", "a", "b", "d"]);
        assert_eq!(eq.to_string(), "c # a |- b ^ a <= d");
    }
}
