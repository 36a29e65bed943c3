//! Builders for the named equation families.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{var, ConditionalEquation, Hypothesis, Relation, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("unknown equation family {0:?}")]
    UnknownFamily(String),
    #[error("{family} is not defined for n = {n} (valid: {valid})")]
    NOutOfRange {
        family: Family,
        n: usize,
        valid: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// n-Go as an identity between Godowski chains.
    GoGamma,
    /// n-Go in its 2n-variable orthogonality-chain form.
    Go2n,
    /// 3-Go as a Mayet-Godowski equation.
    Mge3Go,
    /// n-Go as a Mayet-Godowski equation, `(a1 v b1) ^ ... = (b1 v a2) ^ ...`.
    MgeGo,
    /// Generalized orthoarguesian law.
    Noa,
    /// 3OA in its 4-variable form.
    Oa3FourVar,
    /// Mayet's orthoarguesian-type example with five variables.
    Ea3,
    En,
    EStarN,
    EPrimeN,
    /// E*_2 with commutation hypotheses in place of most orthogonalities.
    EStar2Commute,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::GoGamma,
        Family::Go2n,
        Family::Mge3Go,
        Family::MgeGo,
        Family::Noa,
        Family::Oa3FourVar,
        Family::Ea3,
        Family::En,
        Family::EStarN,
        Family::EPrimeN,
        Family::EStar2Commute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::GoGamma => "go_gamma",
            Family::Go2n => "go_2n",
            Family::Mge3Go => "mge_3go",
            Family::MgeGo => "mge_go",
            Family::Noa => "noa",
            Family::Oa3FourVar => "oa3_4var",
            Family::Ea3 => "ea3",
            Family::En => "en",
            Family::EStarN => "estarn",
            Family::EPrimeN => "eprimen",
            Family::EStar2Commute => "estar2_commute",
        }
    }

    /// Smallest admissible `n`, or `None` for single equations.
    pub fn min_n(self) -> Option<usize> {
        match self {
            Family::GoGamma | Family::MgeGo | Family::Noa => Some(3),
            Family::Go2n | Family::En | Family::EStarN | Family::EPrimeN => Some(2),
            Family::Mge3Go | Family::Oa3FourVar | Family::Ea3 | Family::EStar2Commute => None,
        }
    }

    pub fn takes_n(self) -> bool {
        self.min_n().is_some()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let alias = match lower.as_str() {
            "go" | "ngo" => Some(Family::GoGamma),
            "3oa" | "oa3" => Some(Family::Oa3FourVar),
            "estar2c" => Some(Family::EStar2Commute),
            "e" => Some(Family::En),
            "estar" => Some(Family::EStarN),
            "eprime" => Some(Family::EPrimeN),
            _ => None,
        };
        alias
            .or_else(|| Family::ALL.into_iter().find(|f| f.name() == lower))
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

fn indexed(prefix: &str, i: usize) -> Term {
    var(format!("{prefix}{i}"))
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// `x1 -> x2 ^ x2 -> x3 ^ ... ^ xk -> x1` over the given cycle.
fn godowski_chain(cycle: &[usize]) -> Term {
    let k = cycle.len();
    Term::meet_all((0..k).map(|i| indexed("a", cycle[i]).arrow(indexed("a", cycle[(i + 1) % k]))))
}

fn go_gamma(n: usize) -> ConditionalEquation {
    let forward: Vec<usize> = (1..=n).collect();
    let backward: Vec<usize> = (1..=n).rev().collect();
    ConditionalEquation::new(
        vec![],
        Relation::Eq,
        godowski_chain(&forward),
        godowski_chain(&backward),
    )
}

fn go_2n(n: usize) -> ConditionalEquation {
    // a1 ⊥ b1 ⊥ a2 ⊥ b2 ⊥ ... ⊥ bn ⊥ a1
    let mut hyps = Vec::with_capacity(2 * n);
    for i in 1..=n {
        let next = i % n + 1;
        hyps.push(Hypothesis::Orthogonal(indexed("a", i), indexed("b", i)));
        hyps.push(Hypothesis::Orthogonal(indexed("b", i), indexed("a", next)));
    }
    let lhs = Term::meet_all((1..=n).map(|i| indexed("a", i).join(indexed("b", i))));
    let rhs = indexed("b", 1).join(indexed("a", 2));
    ConditionalEquation::new(hyps, Relation::Le, lhs, rhs)
}

fn mge_go(n: usize) -> ConditionalEquation {
    let mut hyps = Vec::with_capacity(2 * n);
    for i in 1..=n {
        let next = i % n + 1;
        hyps.push(Hypothesis::Orthogonal(indexed("a", i), indexed("b", i)));
        hyps.push(Hypothesis::Orthogonal(indexed("b", i), indexed("a", next)));
    }
    let lhs = Term::meet_all((1..=n).map(|i| indexed("a", i).join(indexed("b", i))));
    let rhs = Term::meet_all((1..=n).map(|i| indexed("b", i).join(indexed("a", i % n + 1))));
    ConditionalEquation::new(hyps, Relation::Eq, lhs, rhs)
}

fn mge_3go() -> ConditionalEquation {
    // a ⊥ d ⊥ b ⊥ e ⊥ c ⊥ f ⊥ a
    let chain = ["a", "d", "b", "e", "c", "f", "a"];
    let hyps = chain
        .windows(2)
        .map(|w| Hypothesis::Orthogonal(var(w[0]), var(w[1])))
        .collect();
    let pair = |x: &str, y: &str| var(x).join(var(y));
    let lhs = Term::meet_all([pair("a", "d"), pair("b", "e"), pair("c", "f")]);
    let rhs = Term::meet_all([pair("d", "b"), pair("e", "c"), pair("f", "a")]);
    ConditionalEquation::new(hyps, Relation::Eq, lhs, rhs)
        .with_variable_order(&["a", "d", "b", "e", "c", "f"])
}

/// The `n`-variable operation `x ≡(n) y` over tail variables `a3..an`.
pub(crate) fn noa_operation(n: usize, x: &Term, y: &Term) -> Term {
    if n == 3 {
        let a3 = indexed("a", 3);
        let first = x.clone().arrow(a3.clone()).meet(y.clone().arrow(a3.clone()));
        let second = x.clone().comp().arrow(a3.clone()).meet(y.clone().comp().arrow(a3));
        first.join(second)
    } else {
        let an = indexed("a", n);
        let inner = noa_operation(n - 1, x, y);
        let xn = noa_operation(n - 1, x, &an);
        let yn = noa_operation(n - 1, y, &an);
        inner.join(xn.meet(yn))
    }
}

fn noa(n: usize) -> ConditionalEquation {
    let (a1, a2, a3) = (indexed("a", 1), indexed("a", 2), indexed("a", 3));
    let lhs = a1.clone().arrow(a3.clone()).meet(noa_operation(n, &a1, &a2));
    let rhs = a2.arrow(a3);
    let order = names("a", n);
    let order: Vec<&str> = order.iter().map(String::as_str).collect();
    ConditionalEquation::new(vec![], Relation::Le, lhs, rhs).with_variable_order(&order)
}

fn oa3_4var() -> ConditionalEquation {
    let (a, b, c, d) = (var("a"), var("b"), var("c"), var("d"));
    let hyps = vec![
        Hypothesis::Orthogonal(a.clone(), b.clone()),
        Hypothesis::Orthogonal(c.clone(), d.clone()),
    ];
    let lhs = a.clone().join(b.clone()).meet(c.clone().join(d.clone()));
    let rhs = a.clone().join(b.clone().meet(c.clone().join(a.join(d).meet(b.join(c)))));
    ConditionalEquation::new(hyps, Relation::Le, lhs, rhs)
}

fn ea3() -> ConditionalEquation {
    let (a, b, c, d, e) = (var("a"), var("b"), var("c"), var("d"), var("e"));
    let t = |x: &Term, y: &Term, z: &Term| {
        x.clone().join(
            Term::join_all([a.clone(), y.clone(), z.clone()]).meet(b.clone().join(x.clone())),
        )
    };
    let t1 = t(&c, &d, &e);
    let t2 = t(&d, &c, &e);
    let t3 = t(&e, &c, &d);
    let hyps = vec![
        Hypothesis::Orthogonal(a.clone(), b.clone()),
        Hypothesis::Orthogonal(c.clone(), d.clone()),
        Hypothesis::Orthogonal(d.clone(), e.clone()),
        Hypothesis::Orthogonal(c.clone(), e.clone()),
    ];
    let lhs = a.clone().join(b.clone()).meet(Term::join_all([c, d, e]));
    let rhs = a.join(Term::meet_all([b, t3, t2, t1]));
    ConditionalEquation::new(hyps, Relation::Le, lhs, rhs)
}

/// Conditions `a_i ⊥ a_j` (i < j) and `a_i ⊥ b_i`.
fn omega(n: usize) -> Vec<Hypothesis> {
    let mut hyps = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            hyps.push(Hypothesis::Orthogonal(indexed("a", i), indexed("a", j)));
        }
    }
    for i in 1..=n {
        hyps.push(Hypothesis::Orthogonal(indexed("a", i), indexed("b", i)));
    }
    hyps
}

/// `a`, `b` and the factors `a_i v b_i` of `q`.
fn e_terms(n: usize) -> (Term, Term, Vec<Term>) {
    let a = Term::join_all((1..=n).map(|i| indexed("a", i)));
    let b = Term::join_all((1..=n).map(|i| indexed("b", i)));
    let q = (1..=n).map(|i| indexed("a", i).join(indexed("b", i))).collect();
    (a, b, q)
}

fn e_order(n: usize, with_r: bool) -> Vec<String> {
    let mut order = names("a", n);
    order.extend(names("b", n));
    if with_r {
        order.push("r".into());
    }
    order
}

fn with_order(eq: ConditionalEquation, order: &[String]) -> ConditionalEquation {
    let order: Vec<&str> = order.iter().map(String::as_str).collect();
    eq.with_variable_order(&order)
}

fn en(n: usize) -> ConditionalEquation {
    let (a, b, q) = e_terms(n);
    with_order(
        ConditionalEquation::new(
            omega(n),
            Relation::Le,
            Term::meet_all(std::iter::once(a).chain(q)),
            b,
        ),
        &e_order(n, false),
    )
}

fn estarn(n: usize) -> ConditionalEquation {
    let (a, b, q) = e_terms(n);
    let r = var("r");
    let mut hyps = omega(n);
    hyps.push(Hypothesis::Orthogonal(r.clone(), a.clone()));
    let lhs = Term::meet_all(std::iter::once(a.join(r.clone())).chain(q));
    with_order(
        ConditionalEquation::new(hyps, Relation::Le, lhs, b.join(r)),
        &e_order(n, true),
    )
}

fn eprimen(n: usize) -> ConditionalEquation {
    let (a, b, q) = e_terms(n);
    let r = var("r");
    let mut hyps = omega(n);
    hyps.push(Hypothesis::Orthogonal(r.clone(), a.clone()));
    let q = Term::meet_all(q);
    let lhs = Term::meet_all([q.clone(), q.arrow(r.clone().comp()), a.join(r)]);
    with_order(
        ConditionalEquation::new(hyps, Relation::Le, lhs, b),
        &e_order(n, true),
    )
}

fn estar2_commute() -> ConditionalEquation {
    let (a1, a2, b1, b2, r) = (var("a1"), var("a2"), var("b1"), var("b2"), var("r"));
    let hyps = vec![
        Hypothesis::Commutes(a1.clone(), b1.clone()),
        Hypothesis::Commutes(a2.clone(), b2.clone()),
        Hypothesis::Commutes(r.clone(), a1.clone()),
        Hypothesis::Orthogonal(a1.clone(), a2.clone()),
        Hypothesis::Commutes(a2.clone(), r.clone()),
    ];
    let lhs = Term::meet_all([
        Term::join_all([a1.clone(), a2.clone(), r.clone()]),
        a1.clone().join(b1.clone()),
        a2.clone().join(b2.clone()),
    ]);
    let rhs = Term::join_all([b1, b2, r]);
    ConditionalEquation::new(hyps, Relation::Le, lhs, rhs)
        .with_variable_order(&["a1", "a2", "b1", "b2", "r"])
}

/// Builds a member of a named family. `n` is ignored by single equations.
pub fn build_family(family: Family, n: usize) -> Result<ConditionalEquation, FamilyError> {
    if let Some(min) = family.min_n() {
        if n < min {
            let valid = if min == 3 { "n >= 3" } else { "n >= 2" };
            return Err(FamilyError::NOutOfRange { family, n, valid });
        }
    }
    Ok(match family {
        Family::GoGamma => go_gamma(n),
        Family::Go2n => go_2n(n),
        Family::Mge3Go => mge_3go(),
        Family::MgeGo => mge_go(n),
        Family::Noa => noa(n),
        Family::Oa3FourVar => oa3_4var(),
        Family::Ea3 => ea3(),
        Family::En => en(n),
        Family::EStarN => estarn(n),
        Family::EPrimeN => eprimen(n),
        Family::EStar2Commute => estar2_commute(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse_equation;
    use super::*;

    fn build(f: Family, n: usize) -> ConditionalEquation {
        build_family(f, n).unwrap()
    }

    /// Every listed variable occurs somewhere, and nothing else does.
    fn variables_match(eq: &ConditionalEquation) -> bool {
        let mut occurring = Vec::new();
        for h in &eq.hypotheses {
            for v in h.vars() {
                if !occurring.contains(&v) {
                    occurring.push(v);
                }
            }
        }
        eq.lhs.collect_vars(&mut occurring);
        eq.rhs.collect_vars(&mut occurring);
        let mut a = occurring;
        let mut b = eq.variables.clone();
        a.sort();
        b.sort();
        a == b
    }

    #[test]
    fn go_gamma_three() {
        let eq = build(Family::GoGamma, 3);
        assert_eq!(
            eq,
            parse_equation(
                "|- (a1 -> a2) ^ (a2 -> a3) ^ (a3 -> a1) == (a3 -> a2) ^ (a2 -> a1) ^ (a1 -> a3)"
            )
            .unwrap()
        );
    }

    #[test]
    fn go_gamma_sides_mirror_under_reversal() {
        for n in 3..=8 {
            let eq = build(Family::GoGamma, n);
            let reversed = eq.lhs.rename(&|v: &str| {
                let i: usize = v[1..].parse().unwrap();
                Some(format!("a{}", n + 1 - i))
            });
            assert_eq!(reversed, eq.rhs);
            assert_eq!(eq.variables.len(), n);
        }
    }

    #[test]
    fn go_2n_three() {
        let eq = build(Family::Go2n, 3);
        assert_eq!(
            eq,
            parse_equation(
                "a1 # b1, b1 # a2, a2 # b2, b2 # a3, a3 # b3, b3 # a1 \
                 |- (a1 v b1) ^ (a2 v b2) ^ (a3 v b3) <= b1 v a2"
            )
            .unwrap()
        );
        let two = build(Family::Go2n, 2);
        assert_eq!(
            two,
            parse_equation("a1 # b1, b1 # a2, a2 # b2, b2 # a1 |- (a1 v b1) ^ (a2 v b2) <= b1 v a2")
                .unwrap()
        );
    }

    #[test]
    fn mge_3go_matches_condensed_form() {
        let eq = build(Family::Mge3Go, 0);
        assert_eq!(eq.hypotheses.len(), 6);
        assert_eq!(eq.to_string(), "a # d, d # b, b # e, e # c, c # f, f # a |- (a v d) ^ (b v e) ^ (c v f) == (d v b) ^ (e v c) ^ (f v a)");
        let general = build(Family::MgeGo, 3);
        assert_eq!(general.hypotheses.len(), 6);
        assert_eq!(general.relation, Relation::Eq);
    }

    #[test]
    fn noa_three_operation() {
        let op = noa_operation(3, &var("a1"), &var("a2"));
        assert_eq!(
            op,
            super::super::parse_term("((a1 -> a3) ^ (a2 -> a3)) v ((a1' -> a3) ^ (a2' -> a3))").unwrap()
        );
        let eq = build(Family::Noa, 3);
        assert_eq!(eq.variables, ["a1", "a2", "a3"]);
        assert_eq!(eq.relation, Relation::Le);
    }

    #[test]
    fn noa_size_recurrence() {
        let mut prev = noa_operation(3, &var("a1"), &var("a2")).size();
        assert_eq!(prev, 17);
        for n in 4..=7 {
            let size = noa_operation(n, &var("a1"), &var("a2")).size();
            assert_eq!(size, 3 * prev + 2);
            prev = size;
            let eq = build(Family::Noa, n);
            assert_eq!(eq.lhs.size(), 3 + size + 1);
            assert_eq!(eq.variables.len(), n);
        }
    }

    #[test]
    fn fixed_equations() {
        assert_eq!(
            build(Family::Oa3FourVar, 0),
            parse_equation("a # b, c # d |- (a v b) ^ (c v d) <= a v (b ^ (c v ((a v d) ^ (b v c))))")
                .unwrap()
        );
        let t1 = "(c v ((a v d v e) ^ (b v c)))";
        let t2 = "(d v ((a v c v e) ^ (b v d)))";
        let t3 = "(e v ((a v c v d) ^ (b v e)))";
        let text = format!(
            "a # b, c # d, d # e, c # e |- (a v b) ^ (c v d v e) <= a v (b ^ {t3} ^ {t2} ^ {t1})"
        );
        assert_eq!(build(Family::Ea3, 0), parse_equation(&text).unwrap());
        let mut expected = parse_equation(
            "a1 C b1, a2 C b2, r C a1, a1 # a2, a2 C r \
             |- (a1 v a2 v r) ^ (a1 v b1) ^ (a2 v b2) <= b1 v b2 v r",
        )
        .unwrap();
        expected.variables = ["a1", "a2", "b1", "b2", "r"].map(String::from).to_vec();
        assert_eq!(build(Family::EStar2Commute, 0), expected);
    }

    #[test]
    fn e_families() {
        let e2 = build(Family::En, 2);
        assert_eq!(e2.variables, ["a1", "a2", "b1", "b2"]);
        assert_eq!(e2.to_string(), "a1 # a2, a1 # b1, a2 # b2 |- (a1 v a2) ^ (a1 v b1) ^ (a2 v b2) <= b1 v b2");
        let s2 = build(Family::EStarN, 2);
        assert_eq!(s2.variables, ["a1", "a2", "b1", "b2", "r"]);
        assert_eq!(
            s2.to_string(),
            "a1 # a2, a1 # b1, a2 # b2, r # a1 v a2 |- (a1 v a2 v r) ^ (a1 v b1) ^ (a2 v b2) <= b1 v b2 v r"
        );
        let p3 = build(Family::EPrimeN, 3);
        assert_eq!(p3.variables.len(), 7);
        assert_eq!(p3.hypotheses.len(), 3 + 3 + 1);
        let e3 = build(Family::En, 3);
        assert_eq!(e3.hypotheses.len(), 6);
    }

    #[test]
    fn builders_list_exactly_their_variables() {
        for f in Family::ALL {
            let range: Vec<usize> = match f.min_n() {
                Some(min) => (min..min + 4).collect(),
                None => vec![0],
            };
            for n in range {
                let eq = build(f, n);
                assert!(variables_match(&eq), "{f} {n}");
                assert_eq!(eq, build(f, n));
            }
        }
    }

    #[test]
    fn range_and_name_errors() {
        assert!(matches!(
            build_family(Family::GoGamma, 2),
            Err(FamilyError::NOutOfRange { n: 2, .. })
        ));
        assert!(matches!(build_family(Family::En, 1), Err(FamilyError::NOutOfRange { .. })));
        assert!(build_family(Family::Go2n, 2).is_ok());
        assert!(matches!("wagon".parse::<Family>(), Err(FamilyError::UnknownFamily(_))));
        assert_eq!("estar2c".parse::<Family>().unwrap(), Family::EStar2Commute);
        assert_eq!("GO_2N".parse::<Family>().unwrap(), Family::Go2n);
    }
}
