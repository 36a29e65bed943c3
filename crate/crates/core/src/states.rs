//! States on a finite OML as exact linear programs over the atoms.
//!
//! A state is fixed by its atom values: each block's atoms sum to one, and
//! every other element's measure is a linear expression in those values.

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::lattice::{Elem, ElementKind, OmlLattice};
use crate::ratlp::{rat, solve, ConstraintKind, LpOutcome, Rational, RationalLp};

/// `constant + Σ coeffs[i]·m(atom i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearExpr {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

impl LinearExpr {
    pub fn eval(&self, atom_values: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(atom_values)
            .fold(self.constant.clone(), |acc, (c, v)| acc + c * v)
    }
}

/// Measure of `x` in terms of the atom variables.
pub fn measure_expr(l: &OmlLattice, x: Elem) -> LinearExpr {
    let n = l.source().num_atoms();
    let mut coeffs = vec![Rational::zero(); n];
    let mut constant = Rational::zero();
    match l.kind(x) {
        ElementKind::Zero => {}
        ElementKind::One => constant = Rational::one(),
        ElementKind::Atom(a) => coeffs[a] = Rational::one(),
        ElementKind::Coatom(a) => {
            constant = Rational::one();
            coeffs[a] = -Rational::one();
        }
        ElementKind::Join { block, mask } => {
            for (i, &a) in l.source().block(block).iter().enumerate() {
                if mask >> i & 1 == 1 {
                    coeffs[a] = Rational::one();
                }
            }
        }
    }
    LinearExpr { coeffs, constant }
}

/// Exact atom values of a state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateVector {
    pub values: Vec<Rational>,
}

impl StateVector {
    pub fn measure(&self, l: &OmlLattice, x: Elem) -> Rational {
        measure_expr(l, x).eval(&self.values)
    }

    /// Block sums are one and every value lies in [0, 1].
    pub fn is_valid(&self, l: &OmlLattice) -> bool {
        let d = l.source();
        self.values.len() == d.num_atoms()
            && self.values.iter().all(|v| *v >= Rational::zero() && *v <= Rational::one())
            && d.blocks()
                .iter()
                .all(|b| b.iter().map(|&a| &self.values[a]).sum::<Rational>() == Rational::one())
    }

    /// Formats as `label=value` pairs.
    pub fn display<'a>(&'a self, l: &'a OmlLattice) -> impl fmt::Display + 'a {
        DisplayState { s: self, l }
    }
}

struct DisplayState<'a> {
    s: &'a StateVector,
    l: &'a OmlLattice,
}

impl fmt::Display for DisplayState<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.s.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}={v}", self.l.source().label(i))?;
        }
        Ok(())
    }
}

fn atom_names(l: &OmlLattice) -> Vec<String> {
    l.source().labels().iter().map(|c| format!("m{c}")).collect()
}

/// The block equalities, with the blocks flagged in `relaxed` weakened to
/// `<= 1`, and a zero objective.
pub fn block_lp(l: &OmlLattice, relaxed: &[bool]) -> RationalLp {
    let d = l.source();
    let mut lp = RationalLp::new(atom_names(l));
    for (i, block) in d.blocks().iter().enumerate() {
        let mut coeffs = vec![Rational::zero(); d.num_atoms()];
        for &a in block {
            coeffs[a] = Rational::one();
        }
        let kind = if relaxed.get(i).copied().unwrap_or(false) {
            ConstraintKind::Le
        } else {
            ConstraintKind::Eq
        };
        lp.add_constraint(coeffs, kind, rat(1)).expect("length matches");
    }
    lp
}

/// LP minimising `m(b)` subject to the block constraints and `m(a) = 1`.
pub fn pair_lp(l: &OmlLattice, a: Elem, b: Elem, relaxed: &[bool]) -> RationalLp {
    let mut lp = block_lp(l, relaxed);
    let ea = measure_expr(l, a);
    lp.add_constraint(ea.coeffs, ConstraintKind::Eq, Rational::one() - ea.constant)
        .expect("length matches");
    let eb = measure_expr(l, b);
    lp.set_objective(eb.coeffs, eb.constant).expect("length matches");
    lp
}

/// Minimum of `m(b)` over states with `m(a) = 1`; `None` when no state
/// has `m(a) = 1`.
pub fn min_measure_given(l: &OmlLattice, a: Elem, b: Elem, relaxed: &[bool]) -> Option<Rational> {
    match solve(&pair_lp(l, a, b, relaxed)) {
        LpOutcome::Optimal { value, .. } => Some(value),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("measures are bounded below by zero"),
    }
}

pub fn admits_state(l: &OmlLattice) -> Option<StateVector> {
    match solve(&block_lp(l, &[])) {
        LpOutcome::Optimal { point, .. } => Some(StateVector { values: point }),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UniqueStateVerdict {
    NoState,
    Unique(StateVector),
    Many,
}

pub fn unique_state(l: &OmlLattice) -> UniqueStateVerdict {
    let Some(state) = admits_state(l) else {
        return UniqueStateVerdict::NoState;
    };
    let n = l.source().num_atoms();
    let base = block_lp(l, &[]);
    let atom_range_is_point = |i: usize| {
        let mut lo = base.clone();
        let mut unit = vec![Rational::zero(); n];
        unit[i] = Rational::one();
        lo.set_objective(unit.clone(), Rational::zero()).expect("length matches");
        let mut hi = base.clone();
        unit[i] = -Rational::one();
        hi.set_objective(unit, Rational::zero()).expect("length matches");
        let min = solve(&lo).value().cloned();
        let max = solve(&hi).value().map(|v| -v);
        min.is_some() && min == max
    };
    if (0..n).into_par_iter().all(atom_range_is_point) {
        UniqueStateVerdict::Unique(state)
    } else {
        UniqueStateVerdict::Many
    }
}

/// A pair `a ≰ b` that no state separates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongWitness {
    pub a: Elem,
    pub b: Elem,
    /// Minimum of `m(b)` given `m(a) = 1`; `None` stands for +∞ (no state
    /// has `m(a) = 1`).
    pub min_value: Option<Rational>,
    pub lp: RationalLp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongVerdict {
    pub strong: bool,
    pub witness: Option<StrongWitness>,
}

/// Decides whether the states of `l` form a strong set. On failure the
/// witness is the first unseparated pair in `nonleq_pairs` order.
pub fn strong_state_check(l: &OmlLattice) -> StrongVerdict {
    let pairs = l.nonleq_pairs();
    let witness = pairs.par_iter().find_map_first(|&(a, b)| {
        let min = min_measure_given(l, a, b, &[]);
        let separated = matches!(&min, Some(v) if *v < Rational::one());
        (!separated).then(|| StrongWitness {
            a,
            b,
            min_value: min,
            lp: pair_lp(l, a, b, &[]),
        })
    });
    StrongVerdict {
        strong: witness.is_none(),
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greechie::parse_diagram;

    fn lattice(text: &str) -> OmlLattice {
        OmlLattice::from_diagram(&parse_diagram(text).unwrap()).unwrap()
    }

    const PETERSON: &str = "123,345,567,789,9AB,BC1,2E8,4FA,6DC,DEF.";

    fn lemma_properties(l: &OmlLattice, s: &StateVector) {
        assert!(s.is_valid(l));
        for x in 0..l.len() {
            assert_eq!(s.measure(l, x) + s.measure(l, l.ortho(x)), Rational::one());
            for y in 0..l.len() {
                if l.leq(x, y) {
                    assert!(s.measure(l, x) <= s.measure(l, y));
                }
            }
        }
    }

    #[test]
    fn measure_expressions() {
        let l = lattice(PETERSON);
        let seven = l.source().atom_by_label('7').unwrap();
        let e = measure_expr(&l, l.coatom(seven).unwrap());
        assert_eq!(e.constant, rat(1));
        assert_eq!(e.coeffs[seven], rat(-1));
        assert_eq!(e.coeffs.iter().filter(|c| !c.is_zero()).count(), 1);
        assert_eq!(measure_expr(&l, l.one()).constant, rat(1));
        let (five, six) = (l.source().atom_by_label('5').unwrap(), l.source().atom_by_label('6').unwrap());
        // In a three-atom block the join of two atoms is the third's coatom.
        assert_eq!(l.join(l.atom(five), l.atom(six)), l.coatom(seven).unwrap());
        let b = lattice("1234.");
        let j = b.join(b.atom(0), b.atom(1));
        let e = measure_expr(&b, j);
        assert!(e.constant.is_zero());
        assert_eq!(e.coeffs, vec![rat(1), rat(1), rat(0), rat(0)]);
    }

    #[test]
    fn boolean_states() {
        let l = lattice("123.");
        let s = admits_state(&l).unwrap();
        lemma_properties(&l, &s);
        assert!(StateVector { values: vec![rat(1), rat(0), rat(0)] }.is_valid(&l));
        assert_eq!(unique_state(&l), UniqueStateVerdict::Many);
        let v = strong_state_check(&l);
        assert!(v.strong);
        assert!(v.witness.is_none());
    }

    #[test]
    fn peterson_not_strong() {
        let l = lattice(PETERSON);
        let s = admits_state(&l).unwrap();
        lemma_properties(&l, &s);
        assert_eq!(unique_state(&l), UniqueStateVerdict::Many);
        let v = strong_state_check(&l);
        assert!(!v.strong);
        let w = v.witness.unwrap();
        assert_eq!(l.describe(w.a), "1");
        assert_eq!(l.describe(w.b), "7′");
        assert_eq!(w.min_value, Some(rat(1)));
    }
}
