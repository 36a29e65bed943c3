//! Mayet-Godowski equations and their condensed state-equation notation.
//!
//! In the condensed form joins become juxtaposition and meets become `+`,
//! with the orthogonality hypotheses left implicit: `ad+be+cf=db+ec+fa`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{var, ConditionalEquation, Hypothesis, Relation, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MgeError {
    #[error("malformed condensed equation: {0}")]
    Syntax(String),
    #[error("group {0} is not pairwise orthogonal")]
    GroupNotOrthogonal(String),
    #[error("variable {0} occurs a different number of times on each side")]
    UnbalancedVariableCounts(String),
    #[error("each side needs at least two conjuncts")]
    TooFewConjuncts,
    #[error("group {0} repeats a variable")]
    RepeatedInGroup(String),
    #[error("{0:?} is not usable as a variable name")]
    InvalidSymbol(char),
    #[error("too many distinct symbols ({0}) to rename with single letters")]
    TooManySymbols(usize),
}

/// Condensed state equation: each side is a `+`-list of juxtaposed
/// single-character symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CondensedStateEquation {
    pub lhs: Vec<Vec<char>>,
    pub rhs: Vec<Vec<char>>,
}

/// Single-letter variable names for renamed equations. `v` is skipped
/// since it is the join operator.
pub const VARIABLE_LETTERS: &str = "abcdefghijklmnopqrstuwxyz";

impl CondensedStateEquation {
    /// Distinct symbols in order of first appearance, left side first.
    pub fn symbols(&self) -> Vec<char> {
        let mut out = Vec::new();
        for &c in self.lhs.iter().chain(&self.rhs).flatten() {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    /// Occurrence counts `(left, right)` per symbol, in symbol order.
    pub fn occurrence_counts(&self) -> Vec<(char, usize, usize)> {
        let count = |side: &[Vec<char>], c: char| side.iter().flatten().filter(|&&x| x == c).count();
        self.symbols()
            .into_iter()
            .map(|c| (c, count(&self.lhs, c), count(&self.rhs, c)))
            .collect()
    }

    pub fn is_balanced(&self) -> bool {
        self.occurrence_counts().iter().all(|&(_, l, r)| l == r)
    }

    /// Renames symbols to `a, b, c, ...` in order of first appearance and
    /// returns the renamed equation with the `(old, new)` mapping.
    pub fn rename_to_letters(&self) -> Result<(CondensedStateEquation, Vec<(char, char)>), MgeError> {
        let symbols = self.symbols();
        if symbols.len() > VARIABLE_LETTERS.len() {
            return Err(MgeError::TooManySymbols(symbols.len()));
        }
        let mapping: Vec<(char, char)> = symbols.into_iter().zip(VARIABLE_LETTERS.chars()).collect();
        let lookup = |c: char| mapping.iter().find(|(o, _)| *o == c).map(|&(_, n)| n).unwrap();
        let map_side =
            |side: &[Vec<char>]| side.iter().map(|g| g.iter().map(|&c| lookup(c)).collect()).collect();
        Ok((
            CondensedStateEquation {
                lhs: map_side(&self.lhs),
                rhs: map_side(&self.rhs),
            },
            mapping,
        ))
    }
}

fn write_side(f: &mut fmt::Formatter<'_>, side: &[Vec<char>]) -> fmt::Result {
    for (i, g) in side.iter().enumerate() {
        if i > 0 {
            f.write_str("+")?;
        }
        for c in g {
            write!(f, "{c}")?;
        }
    }
    Ok(())
}

impl fmt::Display for CondensedStateEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_side(f, &self.lhs)?;
        f.write_str("=")?;
        write_side(f, &self.rhs)
    }
}

impl FromStr for CondensedStateEquation {
    type Err = MgeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (l, r) = compact
            .split_once('=')
            .ok_or_else(|| MgeError::Syntax("missing '='".into()))?;
        let side = |text: &str| -> Result<Vec<Vec<char>>, MgeError> {
            text.split('+')
                .map(|g| {
                    if g.is_empty() {
                        Err(MgeError::Syntax("empty group".into()))
                    } else if let Some(bad) = g.chars().find(|c| !c.is_ascii_alphanumeric()) {
                        Err(MgeError::Syntax(format!("unexpected character {bad:?}")))
                    } else {
                        Ok(g.chars().collect())
                    }
                })
                .collect()
        };
        Ok(CondensedStateEquation {
            lhs: side(l)?,
            rhs: side(r)?,
        })
    }
}

/// A Mayet-Godowski equation: a meet of joins of mutually orthogonal
/// variables on each side, every variable occurring equally often on both.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MgEquation {
    pub left_terms: Vec<Vec<String>>,
    pub right_terms: Vec<Vec<String>>,
}

impl MgEquation {
    pub fn new(left_terms: Vec<Vec<String>>, right_terms: Vec<Vec<String>>) -> Result<Self, MgeError> {
        let eq = MgEquation {
            left_terms,
            right_terms,
        };
        eq.validate()?;
        Ok(eq)
    }

    /// Structural conditions: at least two conjuncts per side, distinct
    /// variables within a conjunct, balanced occurrence counts.
    pub fn validate(&self) -> Result<(), MgeError> {
        if self.left_terms.len() < 2 || self.right_terms.len() < 2 {
            return Err(MgeError::TooFewConjuncts);
        }
        for g in self.left_terms.iter().chain(&self.right_terms) {
            for (i, v) in g.iter().enumerate() {
                if g[..i].contains(v) {
                    return Err(MgeError::RepeatedInGroup(g.concat()));
                }
            }
        }
        let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for v in self.left_terms.iter().flatten() {
            counts.entry(v).or_default().0 += 1;
        }
        for v in self.right_terms.iter().flatten() {
            counts.entry(v).or_default().1 += 1;
        }
        for v in self.variables() {
            let (l, r) = counts[v.as_str()];
            if l != r {
                return Err(MgeError::UnbalancedVariableCounts(v));
            }
        }
        Ok(())
    }

    /// Variables in order of first appearance, left side first.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for v in self.left_terms.iter().chain(&self.right_terms).flatten() {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    /// Pairwise orthogonality hypotheses within each conjunct, each
    /// unordered pair listed once.
    pub fn hypotheses(&self) -> Vec<Hypothesis> {
        let mut seen: Vec<(String, String)> = Vec::new();
        let mut hyps = Vec::new();
        for g in self.left_terms.iter().chain(&self.right_terms) {
            for i in 0..g.len() {
                for j in i + 1..g.len() {
                    let key = if g[i] < g[j] {
                        (g[i].clone(), g[j].clone())
                    } else {
                        (g[j].clone(), g[i].clone())
                    };
                    if !seen.contains(&key) {
                        seen.push(key);
                        hyps.push(Hypothesis::Orthogonal(var(g[i].clone()), var(g[j].clone())));
                    }
                }
            }
        }
        hyps
    }

    pub fn to_equation(&self) -> ConditionalEquation {
        let side = |terms: &[Vec<String>]| {
            Term::meet_all(terms.iter().map(|g| Term::join_all(g.iter().map(|v| var(v.clone())))))
        };
        let vars = self.variables();
        let order: Vec<&str> = vars.iter().map(String::as_str).collect();
        ConditionalEquation::new(
            self.hypotheses(),
            Relation::Eq,
            side(&self.left_terms),
            side(&self.right_terms),
        )
        .with_variable_order(&order)
    }

    /// True if `other` is this equation after a bijective renaming of
    /// variables, reordering of conjuncts and of variables within them, and
    /// possibly swapping the two sides.
    pub fn is_renaming_of(&self, other: &MgEquation) -> bool {
        let mine = self.variables();
        let theirs = other.variables();
        if mine.len() != theirs.len() {
            return false;
        }
        let target = (normalize(&other.left_terms), normalize(&other.right_terms));
        let mut used = vec![false; theirs.len()];
        let mut map: Vec<usize> = Vec::with_capacity(mine.len());
        search_renaming(self, &mine, &theirs, &target, &mut used, &mut map)
    }
}

type NormalSide = Vec<Vec<String>>;

fn normalize(side: &[Vec<String>]) -> NormalSide {
    let mut groups: Vec<Vec<String>> = side
        .iter()
        .map(|g| {
            let mut g = g.clone();
            g.sort();
            g
        })
        .collect();
    groups.sort();
    groups
}

fn search_renaming(
    eq: &MgEquation,
    mine: &[String],
    theirs: &[String],
    target: &(NormalSide, NormalSide),
    used: &mut Vec<bool>,
    map: &mut Vec<usize>,
) -> bool {
    if map.len() == mine.len() {
        let rename = |side: &[Vec<String>]| -> NormalSide {
            let renamed: Vec<Vec<String>> = side
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|v| theirs[map[mine.iter().position(|m| m == v).unwrap()]].clone())
                        .collect()
                })
                .collect();
            normalize(&renamed)
        };
        let (l, r) = (rename(&eq.left_terms), rename(&eq.right_terms));
        return (l == target.0 && r == target.1) || (l == target.1 && r == target.0);
    }
    for j in 0..theirs.len() {
        if !used[j] {
            used[j] = true;
            map.push(j);
            if search_renaming(eq, mine, theirs, target, used, map) {
                return true;
            }
            map.pop();
            used[j] = false;
        }
    }
    false
}

impl fmt::Display for MgEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_equation())
    }
}

fn valid_variable(c: char) -> bool {
    c.is_ascii_lowercase() && c != 'v'
}

/// Expands a condensed equation into an MGE. `orthogonal` decides whether
/// two symbols may share a conjunct.
pub fn condensed_to_mge(
    c: &CondensedStateEquation,
    orthogonal: impl Fn(char, char) -> bool,
) -> Result<MgEquation, MgeError> {
    if let Some(bad) = c.symbols().into_iter().find(|&s| !valid_variable(s)) {
        return Err(MgeError::InvalidSymbol(bad));
    }
    for g in c.lhs.iter().chain(&c.rhs) {
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                if g[i] != g[j] && !orthogonal(g[i], g[j]) {
                    return Err(MgeError::GroupNotOrthogonal(g.iter().collect()));
                }
            }
        }
    }
    let side = |s: &[Vec<char>]| s.iter().map(|g| g.iter().map(|c| c.to_string()).collect()).collect();
    MgEquation::new(side(&c.lhs), side(&c.rhs))
}

#[cfg(test)]
mod tests {
    use super::super::{build_family, Family};
    use super::*;

    /// Orthogonality given as an explicit list of unordered pairs.
    fn pairs<'a>(list: &'a [&'a str]) -> impl Fn(char, char) -> bool + 'a {
        move |x, y| {
            list.iter().any(|p| {
                let p: Vec<char> = p.chars().collect();
                (p[0] == x && p[1] == y) || (p[0] == y && p[1] == x)
            })
        }
    }

    #[test]
    fn condensed_round_trip_text() {
        let c: CondensedStateEquation = "45+9A+E8+6D = 56+89+4A+DE".parse().unwrap();
        assert_eq!(c.to_string(), "45+9A+E8+6D=56+89+4A+DE");
        assert!(c.is_balanced());
        let (renamed, mapping) = c.rename_to_letters().unwrap();
        assert_eq!(renamed.to_string(), "ab+cd+ef+gh=bg+fc+ad+he");
        assert_eq!(mapping[0], ('4', 'a'));
        assert!(matches!("ab+cd".parse::<CondensedStateEquation>(), Err(MgeError::Syntax(_))));
        assert!(matches!("ab++cd=ab".parse::<CondensedStateEquation>(), Err(MgeError::Syntax(_))));
    }

    #[test]
    fn three_go_condensed_to_mge() {
        let c: CondensedStateEquation = "ad+be+cf=db+ec+fa".parse().unwrap();
        let orth = pairs(&["ad", "db", "be", "ec", "cf", "fa"]);
        let mge = condensed_to_mge(&c, orth).unwrap();
        let eq = mge.to_equation();
        let reference = build_family(Family::Mge3Go, 0).unwrap();
        assert_eq!(eq.lhs, reference.lhs);
        assert_eq!(eq.rhs, reference.rhs);
        assert_eq!(eq.variables, reference.variables);
        assert_eq!(eq.hypotheses.len(), 6);
        for h in &reference.hypotheses {
            let Hypothesis::Orthogonal(x, y) = h else { unreachable!() };
            let flipped = Hypothesis::Orthogonal(y.clone(), x.clone());
            assert!(eq.hypotheses.contains(h) || eq.hypotheses.contains(&flipped));
        }
    }

    #[test]
    fn four_go_condensed_to_mge() {
        let c: CondensedStateEquation = "ab+cd+ef+gh=bg+fc+ad+he".parse().unwrap();
        let orth = pairs(&["ab", "cd", "ef", "gh", "bg", "fc", "ad", "he"]);
        let mge = condensed_to_mge(&c, orth).unwrap();
        assert_eq!(mge.hypotheses().len(), 8);
        assert_eq!(mge.variables().len(), 8);
        let go4 = MgEquation::new(
            vec![
                vec!["a1".into(), "b1".into()],
                vec!["a2".into(), "b2".into()],
                vec!["a3".into(), "b3".into()],
                vec!["a4".into(), "b4".into()],
            ],
            vec![
                vec!["b1".into(), "a2".into()],
                vec!["b2".into(), "a3".into()],
                vec!["b3".into(), "a4".into()],
                vec!["b4".into(), "a1".into()],
            ],
        )
        .unwrap();
        assert!(mge.is_renaming_of(&go4));
        assert!(go4.is_renaming_of(&mge));
    }

    #[test]
    fn renaming_detects_differences() {
        let parse = |s: &str| {
            let c: CondensedStateEquation = s.parse().unwrap();
            condensed_to_mge(&c, |_, _| true).unwrap()
        };
        let x = parse("ab+cd=ba+dc");
        assert!(x.is_renaming_of(&parse("cd+ab=dc+ab")));
        assert!(x.is_renaming_of(&parse("xy+zw=yx+wz")));
        let three = parse("ad+be+cf=db+ec+fa");
        assert!(three.is_renaming_of(&parse("db+ec+fa=ad+be+cf")));
        assert!(!three.is_renaming_of(&parse("ad+be+cf=da+eb+fc")));
        assert!(!x.is_renaming_of(&three));
    }

    #[test]
    fn rejections() {
        let c: CondensedStateEquation = "ab=ba".parse().unwrap();
        assert_eq!(condensed_to_mge(&c, |_, _| true), Err(MgeError::TooFewConjuncts));
        let c: CondensedStateEquation = "ab+c=ab+b".parse().unwrap();
        assert_eq!(
            condensed_to_mge(&c, |_, _| true),
            Err(MgeError::UnbalancedVariableCounts("b".into()))
        );
        let c: CondensedStateEquation = "ab+cd=ba+dc".parse().unwrap();
        assert_eq!(
            condensed_to_mge(&c, pairs(&["ab"])),
            Err(MgeError::GroupNotOrthogonal("cd".into()))
        );
        assert!(condensed_to_mge(&c, pairs(&["ab", "cd"])).is_ok());
        let c: CondensedStateEquation = "45+9A=54+A9".parse().unwrap();
        assert_eq!(condensed_to_mge(&c, |_, _| true), Err(MgeError::InvalidSymbol('4')));
        let c: CondensedStateEquation = "aa+b=aa+b".parse().unwrap();
        assert_eq!(condensed_to_mge(&c, |_, _| true), Err(MgeError::RepeatedInGroup("aa".into())));
    }

    #[test]
    fn mge_text_parses_back() {
        let c: CondensedStateEquation = "ab+cd=ba+dc".parse().unwrap();
        let mge = condensed_to_mge(&c, |_, _| true).unwrap();
        let text = mge.to_string();
        assert_eq!(text, "a # b, c # d |- (a v b) ^ (c v d) == (b v a) ^ (d v c)");
        assert_eq!(super::super::parse_equation(&text).unwrap(), mge.to_equation());
    }
}
