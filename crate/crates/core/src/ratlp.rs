//! Exact linear programming over arbitrary-precision rationals.
//!
//! Dense-tableau two-phase simplex with Bland's rule. Problems are
//! minimisations with all variables implicitly non-negative.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("expected {expected} coefficients, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Eq,
    Le,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub kind: ConstraintKind,
    pub rhs: Rational,
}

/// `minimize objective·x + offset` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalLp {
    pub names: Vec<String>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<Rational>,
    pub offset: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl RationalLp {
    /// An LP with the given variable names, no constraints and a zero
    /// objective.
    pub fn new(names: Vec<String>) -> Self {
        let n = names.len();
        RationalLp {
            names,
            constraints: Vec::new(),
            objective: vec![Rational::zero(); n],
            offset: Rational::zero(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    fn check_len(&self, got: usize) -> Result<(), LpError> {
        if got == self.num_vars() {
            Ok(())
        } else {
            Err(LpError::DimensionMismatch {
                expected: self.num_vars(),
                got,
            })
        }
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, kind: ConstraintKind, rhs: Rational) -> Result<(), LpError> {
        self.check_len(coeffs.len())?;
        self.constraints.push(Constraint { coeffs, kind, rhs });
        Ok(())
    }

    pub fn set_objective(&mut self, coeffs: Vec<Rational>, offset: Rational) -> Result<(), LpError> {
        self.check_len(coeffs.len())?;
        self.objective = coeffs;
        self.offset = offset;
        Ok(())
    }

    /// Whether `point` satisfies every constraint and bound exactly.
    pub fn is_feasible(&self, point: &[Rational]) -> bool {
        point.len() == self.num_vars()
            && point.iter().all(|x| !x.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs = dot(&c.coeffs, point);
                match c.kind {
                    ConstraintKind::Eq => lhs == c.rhs,
                    ConstraintKind::Le => lhs <= c.rhs,
                }
            })
    }

    pub fn objective_at(&self, point: &[Rational]) -> Rational {
        dot(&self.objective, point) + &self.offset
    }

    /// Renders the problem in lp_solve's text format.
    pub fn to_lp_format(&self) -> String {
        self.to_string()
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

fn write_linear(f: &mut fmt::Formatter<'_>, names: &[String], coeffs: &[Rational], constant: &Rational) -> fmt::Result {
    let mut first = true;
    for (c, name) in coeffs.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
        if !first {
            f.write_str(" ")?;
        }
        f.write_str(sign)?;
        if !first && !sign.is_empty() {
            f.write_str(" ")?;
        }
        let abs = c.abs();
        if abs.is_one() {
            write!(f, "{name}")?;
        } else {
            write!(f, "{abs} {name}")?;
        }
        first = false;
    }
    if first {
        write!(f, "{constant}")
    } else if constant.is_positive() {
        write!(f, " + {constant}")
    } else if constant.is_negative() {
        write!(f, " - {}", constant.abs())
    } else {
        Ok(())
    }
}

impl fmt::Display for RationalLp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("min: ")?;
        write_linear(f, &self.names, &self.objective, &self.offset)?;
        f.write_str(";\n")?;
        for c in &self.constraints {
            write_linear(f, &self.names, &c.coeffs, &Rational::zero())?;
            let rel = match c.kind {
                ConstraintKind::Eq => "=",
                ConstraintKind::Le => "<=",
            };
            writeln!(f, " {rel} {};", c.rhs)?;
        }
        Ok(())
    }
}

struct Tableau {
    /// Each row holds the column coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs followed by minus the current objective value.
    obj: Vec<Rational>,
    ncols: usize,
}

impl Tableau {
    fn price(&mut self, cost: &[Rational]) {
        self.obj = cost.to_vec();
        self.obj.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = self.obj[b].clone();
            if !cb.is_zero() {
                for (o, r) in self.obj.iter_mut().zip(row) {
                    *o -= &cb * r;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |target: &mut Vec<Rational>| {
            let factor = target[c].clone();
            if !factor.is_zero() {
                for (t, p) in target.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *t -= &factor * p;
                    }
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Runs simplex iterations over columns `< active`. Returns false when
    /// the objective is unbounded below.
    fn optimize(&mut self, active: usize) -> bool {
        let rhs = self.ncols;
        loop {
            let Some(enter) = (0..active).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

/// Solves `lp` exactly.
pub fn solve(lp: &RationalLp) -> LpOutcome {
    let n = lp.num_vars();
    let rows_in = &lp.constraints;
    let num_slack = rows_in.iter().filter(|c| c.kind == ConstraintKind::Le).count();

    // Normalise to non-negative right-hand sides. A `<=` row with negative
    // rhs becomes a `>=` row whose slack enters with coefficient -1.
    struct Row {
        coeffs: Vec<Rational>,
        rhs: Rational,
        slack: Option<(usize, Rational)>,
    }
    let mut normalised = Vec::with_capacity(rows_in.len());
    let mut next_slack = n;
    for c in rows_in {
        let negate = c.rhs.is_negative();
        let flip = |x: &Rational| if negate { -x } else { x.clone() };
        let slack = (c.kind == ConstraintKind::Le).then(|| {
            let s = next_slack;
            next_slack += 1;
            (s, if negate { -Rational::one() } else { Rational::one() })
        });
        normalised.push(Row {
            coeffs: c.coeffs.iter().map(flip).collect(),
            rhs: flip(&c.rhs),
            slack,
        });
    }

    // Rows whose slack has coefficient +1 start with the slack basic; the
    // rest get an artificial variable.
    let first_art = n + num_slack;
    let needs_art: Vec<bool> = normalised
        .iter()
        .map(|r| !matches!(&r.slack, Some((_, s)) if s.is_positive()))
        .collect();
    let num_art = needs_art.iter().filter(|&&b| b).count();
    let ncols = first_art + num_art;

    let mut rows = Vec::with_capacity(normalised.len());
    let mut basis = Vec::with_capacity(normalised.len());
    let mut next_art = first_art;
    for (r, &art) in normalised.iter().zip(&needs_art) {
        let mut row = vec![Rational::zero(); ncols + 1];
        row[..n].clone_from_slice(&r.coeffs);
        if let Some((s, coef)) = &r.slack {
            row[*s] = coef.clone();
        }
        if art {
            row[next_art] = Rational::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(r.slack.as_ref().map(|(s, _)| *s).unwrap());
        }
        row[ncols] = r.rhs.clone();
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        basis,
        obj: Vec::new(),
        ncols,
    };

    if num_art > 0 {
        let mut cost = vec![Rational::zero(); ncols];
        for c in cost.iter_mut().skip(first_art) {
            *c = Rational::one();
        }
        t.price(&cost);
        t.optimize(ncols);
        if !t.obj[ncols].is_zero() {
            return LpOutcome::Infeasible;
        }
        // Drive remaining (zero-valued) artificials out of the basis, or
        // drop their rows when they are redundant.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= first_art {
                match (0..first_art).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for row in t.rows.iter_mut() {
            let rhs = row[ncols].clone();
            row.truncate(first_art);
            row.push(rhs);
        }
    }
    t.ncols = first_art;

    let mut cost = lp.objective.clone();
    cost.resize(first_art, Rational::zero());
    t.price(&cost);
    if !t.optimize(first_art) {
        return LpOutcome::Unbounded;
    }
    let mut point = vec![Rational::zero(); n];
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        if b < n {
            point[b] = row[first_art].clone();
        }
    }
    let value = lp.objective_at(&point);
    debug_assert_eq!(value, -t.obj[first_art].clone() + &lp.offset);
    LpOutcome::Optimal { value, point }
}
