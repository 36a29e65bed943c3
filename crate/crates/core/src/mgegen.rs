//! Turns a failure of strong states into an equation that fails in the
//! lattice.
//!
//! Starting from a pair `a ≰ b` with `min m(b) = 1` given `m(a) = 1`, block
//! equalities are weakened one at a time while the minimum stays at one.
//! The blocks that must stay pinned, minus the atoms a state with
//! `m(a) = 1` has to zero, give the left side of a condensed state
//! equation; the relaxed blocks restricted to those atoms give the right.

use thiserror::Error;

use crate::checker::{check_equation, is_counterexample};
use crate::lattice::{Elem, OmlLattice};
use crate::ratlp::Rational;
use crate::states::min_measure_given;
use crate::term::{condensed_to_mge, CondensedStateEquation, MgEquation, MgeError};
use num_traits::One;

/// Balancing may grow the equation to this many times its original term
/// count.
pub const DEFAULT_BUDGET_FACTOR: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MgeGenError {
    #[error("witness is not tight: minimum is {0}")]
    WitnessNotTight(String),
    #[error("condensed equation has an empty left side")]
    EmptyLeftSide,
    #[error("could not balance variable counts within {budget} terms")]
    Unbalanceable { budget: usize },
    #[error("generated equation holds in the input lattice")]
    GeneratedEquationHoldsInInput,
    #[error(transparent)]
    Mge(#[from] MgeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockStatus {
    /// Block sum fixed at 1.
    Pinned,
    /// Block sum only bounded by 1.
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelaxationRecord {
    pub witness: (Elem, Elem),
    /// Per block, in diagram order.
    pub statuses: Vec<BlockStatus>,
    /// Atoms orthogonal to the witness's `a`.
    pub forced_zero: Vec<usize>,
}

impl RelaxationRecord {
    pub fn relaxed_mask(&self) -> Vec<bool> {
        self.statuses.iter().map(|s| *s == BlockStatus::Relaxed).collect()
    }

    pub fn num_relaxed(&self) -> usize {
        self.statuses.iter().filter(|s| **s == BlockStatus::Relaxed).count()
    }
}

fn is_tight(min: &Option<Rational>) -> bool {
    matches!(min, Some(v) if v.is_one())
}

/// Weakens block equalities in diagram order, keeping each weakening that
/// leaves the witness minimum at one.
pub fn relax_blocks(l: &OmlLattice, witness: (Elem, Elem)) -> Result<RelaxationRecord, MgeGenError> {
    let (a, b) = witness;
    let initial = min_measure_given(l, a, b, &[]);
    if !is_tight(&initial) {
        return Err(MgeGenError::WitnessNotTight(
            initial.map_or_else(|| "infeasible".to_string(), |v| v.to_string()),
        ));
    }
    let num_blocks = l.source().num_blocks();
    let mut relaxed = vec![false; num_blocks];
    for i in 0..num_blocks {
        relaxed[i] = true;
        if !is_tight(&min_measure_given(l, a, b, &relaxed)) {
            relaxed[i] = false;
        }
    }
    let statuses = relaxed
        .iter()
        .map(|&r| if r { BlockStatus::Relaxed } else { BlockStatus::Pinned })
        .collect();
    let forced_zero = (0..l.source().num_atoms())
        .filter(|&x| l.orthogonal(l.atom(x), a))
        .collect();
    Ok(RelaxationRecord {
        witness,
        statuses,
        forced_zero,
    })
}

/// Builds the condensed equation over the lattice's atom labels.
pub fn build_condensed(l: &OmlLattice, rec: &RelaxationRecord) -> Result<CondensedStateEquation, MgeGenError> {
    let d = l.source();
    let mut lhs: Vec<Vec<char>> = Vec::new();
    for (block, status) in d.blocks().iter().zip(&rec.statuses) {
        if *status == BlockStatus::Pinned {
            let group: Vec<char> = block
                .iter()
                .filter(|a| !rec.forced_zero.contains(a))
                .map(|&a| d.label(a))
                .collect();
            if !group.is_empty() {
                lhs.push(group);
            }
        }
    }
    if lhs.is_empty() {
        return Err(MgeGenError::EmptyLeftSide);
    }
    let on_left = |c: &char| lhs.iter().any(|g| g.contains(c));
    let mut rhs: Vec<Vec<char>> = Vec::new();
    for (block, status) in d.blocks().iter().zip(&rec.statuses) {
        if *status == BlockStatus::Relaxed {
            let group: Vec<char> = block.iter().map(|&a| d.label(a)).filter(on_left).collect();
            if !group.is_empty() {
                rhs.push(group);
            }
        }
    }
    Ok(CondensedStateEquation { lhs, rhs })
}

/// Duplicates terms until every symbol occurs equally often on both sides.
/// For the first imbalanced symbol, the first term containing it on the
/// deficient side is repeated.
pub fn balance(c: &CondensedStateEquation, budget_factor: usize) -> Result<CondensedStateEquation, MgeGenError> {
    let budget = budget_factor * (c.lhs.len() + c.rhs.len());
    let mut out = c.clone();
    loop {
        let Some((sym, left, right)) = out.occurrence_counts().into_iter().find(|&(_, l, r)| l != r) else {
            return Ok(out);
        };
        if out.lhs.len() + out.rhs.len() >= budget {
            return Err(MgeGenError::Unbalanceable { budget });
        }
        let side = if left < right { &mut out.lhs } else { &mut out.rhs };
        let Some(term) = side.iter().find(|g| g.contains(&sym)).cloned() else {
            return Err(MgeGenError::Unbalanceable { budget });
        };
        side.push(term);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedMge {
    /// Balanced condensed form over atom labels.
    pub balanced: CondensedStateEquation,
    /// Same, renamed to single-letter variables.
    pub renamed: CondensedStateEquation,
    /// `(atom label, variable)` pairs.
    pub mapping: Vec<(char, char)>,
    pub mge: MgEquation,
    /// Assignment under which the equation fails in the lattice.
    pub counterexample: Vec<(String, Elem)>,
}

/// Balances `c`, converts it into an MGE using the lattice's orthogonality
/// and confirms that the MGE fails in `l`.
pub fn balance_and_emit(c: &CondensedStateEquation, l: &OmlLattice) -> Result<GeneratedMge, MgeGenError> {
    let d = l.source();
    let balanced = balance(c, DEFAULT_BUDGET_FACTOR)?;
    let (renamed, mapping) = balanced.rename_to_letters()?;
    let atom_of = |var: char| {
        let label = mapping.iter().find(|(_, v)| *v == var).map(|&(o, _)| o)?;
        d.atom_by_label(label)
    };
    let mge = condensed_to_mge(&renamed, |x, y| match (atom_of(x), atom_of(y)) {
        (Some(p), Some(q)) => l.orthogonal(l.atom(p), l.atom(q)),
        _ => false,
    })?;
    mge.validate()?;
    let eq = mge.to_equation();
    // Mapping each variable to its own atom is the assignment the state
    // argument points at; fall back to a full search otherwise.
    let natural: Option<Vec<(String, Elem)>> = eq
        .variables
        .iter()
        .map(|v| {
            let c = v.chars().next()?;
            Some((v.clone(), l.atom(atom_of(c)?)))
        })
        .collect();
    let counterexample = match natural {
        Some(asg) if is_counterexample(l, &eq, &asg).unwrap_or(false) => asg,
        _ => check_equation(l, &eq)
            .counterexample
            .ok_or(MgeGenError::GeneratedEquationHoldsInInput)?,
    };
    Ok(GeneratedMge {
        balanced,
        renamed,
        mapping,
        mge,
        counterexample,
    })
}

/// Output of the whole pipeline for one witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MgeDerivation {
    pub record: RelaxationRecord,
    pub condensed: CondensedStateEquation,
    pub generated: GeneratedMge,
}

/// Runs relaxation, condensation and emission for `witness`.
pub fn derive_mge(l: &OmlLattice, witness: (Elem, Elem)) -> Result<MgeDerivation, MgeGenError> {
    let record = relax_blocks(l, witness)?;
    let condensed = build_condensed(l, &record)?;
    let generated = balance_and_emit(&condensed, l)?;
    Ok(MgeDerivation {
        record,
        condensed,
        generated,
    })
}
