//! Dynamic-programming scan for the first failing n-Go equation.
//!
//! `V_p(x, z)` holds every value of an arrow chain
//! `(x→y1) ∧ (y1→y2) ∧ … ∧ (y_{p−1}→z)` of length `p`. Closing such a chain
//! with `z→x` gives the left side of the (p+1)-variable equation, which
//! holds iff `v ∧ (z→x) ≤ x→z` for every `v ∈ V_p(x, z)`. When the sets
//! stop changing every larger n behaves the same, so all n-Go hold.

use std::fmt;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::lattice::OmlLattice;

pub const DEFAULT_MAX_N: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoOutcome {
    /// n-Go fails and every k-Go with 3 ≤ k < n holds.
    FirstFail(usize),
    /// The value sets reached a fixed point at this pass.
    ConvergedAllPass(usize),
    /// Every n-Go up to this bound holds but the sets had not converged.
    CutoffReached(usize),
}

impl fmt::Display for GoOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoOutcome::FirstFail(n) => write!(f, "first-fail n={n}"),
            GoOutcome::ConvergedAllPass(p) => write!(f, "converged at pass {p}; all n-Go pass"),
            GoOutcome::CutoffReached(n) => write!(f, "cutoff at n={n}; all n-Go up to n pass"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoScanResult {
    pub outcome: GoOutcome,
    /// Index of the last pass computed.
    pub passes: usize,
    /// Table operations spent in each pass from 2 on.
    pub ops_per_pass: Vec<u64>,
}

impl GoScanResult {
    /// The verdict on the n-variable equation implied by the scan, or
    /// `None` when n lies beyond the cutoff.
    pub fn holds_at(&self, n: usize) -> Option<bool> {
        match self.outcome {
            GoOutcome::FirstFail(k) => Some(n < k),
            GoOutcome::ConvergedAllPass(_) => Some(true),
            GoOutcome::CutoffReached(max) => (n <= max).then_some(true),
        }
    }
}

/// Value sets `V_p(x, z)` for every ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSets {
    pass: usize,
    m: usize,
    /// Row-major over `(x, z)`.
    sets: Vec<FixedBitSet>,
}

impl ValueSets {
    /// `V_1(x, z) = {x→z}`.
    pub fn initial(l: &OmlLattice) -> Self {
        let m = l.len();
        let mut sets = vec![FixedBitSet::with_capacity(m); m * m];
        for x in 0..m {
            for z in 0..m {
                sets[x * m + z].insert(l.arrow(x, z));
            }
        }
        ValueSets { pass: 1, m, sets }
    }

    pub fn pass(&self) -> usize {
        self.pass
    }

    pub fn get(&self, x: usize, z: usize) -> &FixedBitSet {
        &self.sets[x * self.m + z]
    }

    /// Computes `V_{p+1}` and the number of table operations it took.
    pub fn next(&self, l: &OmlLattice) -> (ValueSets, u64) {
        let m = self.m;
        let rows: Vec<(Vec<FixedBitSet>, u64)> = (0..m)
            .into_par_iter()
            .map(|x| {
                let mut row = vec![FixedBitSet::with_capacity(m); m];
                let mut ops = 0u64;
                for y in 0..m {
                    let vs = self.get(x, y);
                    for v in vs.ones() {
                        for (z, set) in row.iter_mut().enumerate() {
                            set.insert(l.meet(v, l.arrow(y, z)));
                        }
                        ops += 2 * m as u64;
                    }
                }
                (row, ops)
            })
            .collect();
        let mut sets = Vec::with_capacity(m * m);
        let mut ops = 0;
        for (row, o) in rows {
            sets.extend(row);
            ops += o;
        }
        (
            ValueSets {
                pass: self.pass + 1,
                m,
                sets,
            },
            ops,
        )
    }

    /// Whether the (pass+1)-variable equation holds.
    pub fn check(&self, l: &OmlLattice) -> bool {
        let m = self.m;
        (0..m).into_par_iter().all(|x| {
            (0..m).all(|z| {
                let close = l.arrow(z, x);
                let bound = l.arrow(x, z);
                self.get(x, z).ones().all(|v| l.leq(l.meet(v, close), bound))
            })
        })
    }

    /// Same sets for every pair, regardless of pass index.
    pub fn same_sets(&self, other: &ValueSets) -> bool {
        self.sets == other.sets
    }
}

/// Finds the first n ≥ 3 at which n-Go fails, up to `max_n`.
pub fn go_scan(l: &OmlLattice, max_n: usize) -> GoScanResult {
    assert!(max_n >= 3, "max_n must be at least 3");
    let mut current = ValueSets::initial(l);
    let mut ops_per_pass = Vec::new();
    loop {
        let (next, ops) = current.next(l);
        ops_per_pass.push(ops);
        let p = next.pass();
        let outcome = if !next.check(l) {
            Some(GoOutcome::FirstFail(p + 1))
        } else if next.same_sets(&current) {
            Some(GoOutcome::ConvergedAllPass(p))
        } else if p + 1 >= max_n {
            Some(GoOutcome::CutoffReached(max_n))
        } else {
            None
        };
        if let Some(outcome) = outcome {
            return GoScanResult {
                outcome,
                passes: p,
                ops_per_pass,
            };
        }
        current = next;
    }
}

/// Scans each lattice independently; results are in input order.
pub fn go_batch(lattices: &[OmlLattice], max_n: usize) -> Vec<GoScanResult> {
    lattices.par_iter().map(|l| go_scan(l, max_n)).collect()
}
