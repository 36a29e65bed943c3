//! Exhaustive equation checking on a finite OML.
//!
//! Variables range over all lattice elements. The equation is compiled into
//! a hash-consed instruction list; each instruction is evaluated as soon as
//! the last variable it depends on is bound, and each hypothesis is tested
//! at that same point so failing branches are cut early.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{Elem, OmlLattice};
use crate::term::{ConditionalEquation, Hypothesis, Relation, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("variable {0} is not bound")]
    UnboundVariable(String),
}

/// Outcome of checking one equation on one lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// First failing assignment in iteration order, as `(variable, element)`
    /// pairs in equation variable order.
    pub counterexample: Option<Vec<(String, Elem)>>,
    /// Complete assignments that satisfied every hypothesis and had their
    /// conclusion tested.
    pub assignments_tested: u64,
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Test each hypothesis as soon as its variables are bound. When off,
    /// every assignment is evaluated directly from the syntax tree.
    pub pruning: bool,
    /// Split the search over the first variable's values.
    pub parallel: bool,
    /// Binding order; defaults to [`plan_variable_order`].
    pub order: Option<Vec<String>>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            pruning: true,
            parallel: true,
            order: None,
        }
    }
}

/// Evaluates a term under an assignment.
pub fn evaluate_term(
    l: &OmlLattice,
    t: &Term,
    asg: &impl Fn(&str) -> Option<Elem>,
) -> Result<Elem, CheckError> {
    Ok(match t {
        Term::Var(v) => asg(v).ok_or_else(|| CheckError::UnboundVariable(v.clone()))?,
        Term::Zero => l.zero(),
        Term::One => l.one(),
        Term::Comp(a) => l.ortho(evaluate_term(l, a, asg)?),
        Term::Meet(a, b) => l.meet(evaluate_term(l, a, asg)?, evaluate_term(l, b, asg)?),
        Term::Join(a, b) => l.join(evaluate_term(l, a, asg)?, evaluate_term(l, b, asg)?),
        Term::Arrow(a, b) => l.arrow(evaluate_term(l, a, asg)?, evaluate_term(l, b, asg)?),
    })
}

pub fn evaluate_hypothesis(
    l: &OmlLattice,
    h: &Hypothesis,
    asg: &impl Fn(&str) -> Option<Elem>,
) -> Result<bool, CheckError> {
    Ok(match h {
        Hypothesis::Orthogonal(a, b) => l.orthogonal(evaluate_term(l, a, asg)?, evaluate_term(l, b, asg)?),
        Hypothesis::Commutes(a, b) => l.commutes(evaluate_term(l, a, asg)?, evaluate_term(l, b, asg)?),
    })
}

fn relation_holds(l: &OmlLattice, rel: Relation, x: Elem, y: Elem) -> bool {
    match rel {
        Relation::Le => l.leq(x, y),
        Relation::Eq => x == y,
    }
}

/// True when the assignment satisfies every hypothesis but violates the
/// conclusion.
pub fn is_counterexample(
    l: &OmlLattice,
    eq: &ConditionalEquation,
    asg: &[(String, Elem)],
) -> Result<bool, CheckError> {
    let lookup = |v: &str| asg.iter().find(|(n, _)| n == v).map(|&(_, e)| e);
    for h in &eq.hypotheses {
        if !evaluate_hypothesis(l, h, &lookup)? {
            return Ok(false);
        }
    }
    let x = evaluate_term(l, &eq.lhs, &lookup)?;
    let y = evaluate_term(l, &eq.rhs, &lookup)?;
    Ok(!relation_holds(l, eq.relation, x, y))
}

/// Greedy binding order: repeatedly pick the variable that completes the
/// most hypotheses given those already chosen, ties broken by first
/// occurrence.
pub fn plan_variable_order(eq: &ConditionalEquation) -> Vec<String> {
    let hyp_vars: Vec<Vec<String>> = eq.hypotheses.iter().map(Hypothesis::vars).collect();
    let mut chosen: Vec<String> = Vec::with_capacity(eq.variables.len());
    let mut remaining: Vec<&String> = eq.variables.iter().collect();
    while !remaining.is_empty() {
        let score = |v: &String| {
            hyp_vars
                .iter()
                .filter(|hv| hv.contains(v) && hv.iter().all(|u| u == v || chosen.contains(u)))
                .count()
        };
        let mut best = 0;
        let mut best_score = score(remaining[0]);
        for (i, v) in remaining.iter().enumerate().skip(1) {
            let s = score(v);
            if s > best_score {
                best = i;
                best_score = s;
            }
        }
        chosen.push(remaining.remove(best).clone());
    }
    chosen
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Var(usize),
    Const(Elem),
    Comp(usize),
    Meet(usize, usize),
    Join(usize, usize),
    Arrow(usize, usize),
}

#[derive(Debug, Clone, Copy)]
enum Test {
    Orthogonal(usize, usize),
    Commutes(usize, usize),
}

/// Compiled equation. Node indices are topologically ordered.
struct Program {
    nodes: Vec<Node>,
    /// `by_level[p]`: nodes computable once variable `p` is bound.
    by_level: Vec<Vec<usize>>,
    /// Nodes with no variable dependency.
    constant: Vec<usize>,
    var_nodes: Vec<usize>,
    tests_by_level: Vec<Vec<Test>>,
    /// `domain[p] = Some(t)`: a hypothesis `x_p # t` with `t` computed
    /// earlier, so `x_p` only ranges over the elements below `t'`.
    domain: Vec<Option<usize>>,
    relation: Relation,
    lhs: usize,
    rhs: usize,
}

struct Compiler<'a> {
    order: &'a [String],
    nodes: Vec<Node>,
    levels: Vec<Option<usize>>,
    index: HashMap<Node, usize>,
}

impl Compiler<'_> {
    fn intern(&mut self, node: Node, level: Option<usize>) -> usize {
        if let Some(&i) = self.index.get(&node) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(node);
        self.levels.push(level);
        self.index.insert(node, i);
        i
    }

    fn binary(&mut self, a: &Term, b: &Term, make: fn(usize, usize) -> Node) -> usize {
        let x = self.term(a);
        let y = self.term(b);
        let level = self.levels[x].max(self.levels[y]);
        self.intern(make(x, y), level)
    }

    fn term(&mut self, t: &Term) -> usize {
        match t {
            Term::Var(v) => {
                let p = self
                    .order
                    .iter()
                    .position(|o| o == v)
                    .expect("variable present in order");
                self.intern(Node::Var(p), Some(p))
            }
            Term::Zero => self.intern(Node::Const(crate::lattice::ZERO), None),
            Term::One => self.intern(Node::Const(crate::lattice::ONE), None),
            Term::Comp(a) => {
                let x = self.term(a);
                let level = self.levels[x];
                self.intern(Node::Comp(x), level)
            }
            Term::Meet(a, b) => self.binary(a, b, Node::Meet),
            Term::Join(a, b) => self.binary(a, b, Node::Join),
            Term::Arrow(a, b) => self.binary(a, b, Node::Arrow),
        }
    }
}

impl Program {
    fn compile(eq: &ConditionalEquation, order: &[String]) -> Program {
        let k = order.len();
        let mut c = Compiler {
            order,
            nodes: Vec::new(),
            levels: Vec::new(),
            index: HashMap::new(),
        };
        let var_nodes: Vec<usize> = (0..k).map(|p| c.intern(Node::Var(p), Some(p))).collect();
        let mut tests_by_level: Vec<Vec<Test>> = vec![Vec::new(); k.max(1)];
        let mut domain = vec![None; k];
        for h in &eq.hypotheses {
            let (a, b) = h.operands();
            let (x, y) = (c.term(a), c.term(b));
            let level = c.levels[x].max(c.levels[y]).unwrap_or(0);
            if let Hypothesis::Orthogonal(..) = h {
                for (v, other) in [(x, y), (y, x)] {
                    let earlier = c.levels[other].is_none_or(|q| q < level);
                    if level > 0 && v == var_nodes[level] && earlier && domain[level].is_none() {
                        domain[level] = Some(other);
                    }
                }
            }
            tests_by_level[level].push(match h {
                Hypothesis::Orthogonal(..) => Test::Orthogonal(x, y),
                Hypothesis::Commutes(..) => Test::Commutes(x, y),
            });
        }
        let lhs = c.term(&eq.lhs);
        let rhs = c.term(&eq.rhs);
        let mut by_level = vec![Vec::new(); k];
        let mut constant = Vec::new();
        for (i, (node, level)) in c.nodes.iter().zip(&c.levels).enumerate() {
            if matches!(node, Node::Var(_)) {
                continue;
            }
            match level {
                Some(p) => by_level[*p].push(i),
                None => constant.push(i),
            }
        }
        Program {
            nodes: c.nodes,
            by_level,
            constant,
            var_nodes,
            tests_by_level,
            domain,
            relation: eq.relation,
            lhs,
            rhs,
        }
    }

    #[inline]
    fn eval(&self, l: &OmlLattice, vals: &mut [Elem], list: &[usize]) {
        for &i in list {
            vals[i] = match self.nodes[i] {
                Node::Var(_) => unreachable!(),
                Node::Const(e) => e,
                Node::Comp(a) => l.ortho(vals[a]),
                Node::Meet(a, b) => l.meet(vals[a], vals[b]),
                Node::Join(a, b) => l.join(vals[a], vals[b]),
                Node::Arrow(a, b) => l.arrow(vals[a], vals[b]),
            };
        }
    }

    #[inline]
    fn tests_pass(&self, l: &OmlLattice, vals: &[Elem], level: usize) -> bool {
        self.tests_by_level[level].iter().all(|t| match *t {
            Test::Orthogonal(a, b) => l.orthogonal(vals[a], vals[b]),
            Test::Commutes(a, b) => l.commutes(vals[a], vals[b]),
        })
    }

    #[inline]
    fn conclusion_holds(&self, l: &OmlLattice, vals: &[Elem]) -> bool {
        relation_holds(l, self.relation, vals[self.lhs], vals[self.rhs])
    }
}

/// Search state for one worker.
struct Search<'a> {
    l: &'a OmlLattice,
    prog: &'a Program,
    vals: Vec<Elem>,
    assignment: Vec<Elem>,
    tested: u64,
    /// First-variable value of the best counterexample found by any worker.
    cutoff: &'a AtomicUsize,
    first: usize,
    aborted: bool,
}

impl Search<'_> {
    /// Depth-first search from variable `p`; true when a counterexample is
    /// left in `assignment` or the search was cut off.
    fn dfs(&mut self, p: usize) -> bool {
        let l = self.l;
        match self.prog.domain[p] {
            Some(node) => {
                let bound = l.ortho(self.vals[node]);
                l.down_set(bound).ones().any(|value| self.visit(p, value))
            }
            None => (0..l.len()).any(|value| self.visit(p, value)),
        }
    }

    fn visit(&mut self, p: usize, value: Elem) -> bool {
        if self.cutoff.load(Ordering::Relaxed) < self.first {
            self.aborted = true;
            return true;
        }
        self.assignment[p] = value;
        self.vals[self.prog.var_nodes[p]] = value;
        self.prog.eval(self.l, &mut self.vals, &self.prog.by_level[p]);
        if !self.prog.tests_pass(self.l, &self.vals, p) {
            return false;
        }
        if p + 1 == self.assignment.len() {
            self.tested += 1;
            !self.prog.conclusion_holds(self.l, &self.vals)
        } else {
            self.dfs(p + 1)
        }
    }
}

fn pruned_search(l: &OmlLattice, eq: &ConditionalEquation, order: &[String], parallel: bool) -> (u64, Option<Vec<Elem>>) {
    let prog = Program::compile(eq, order);
    let k = order.len();
    let mut base = vec![0; prog.nodes.len()];
    prog.eval(l, &mut base, &prog.constant);

    if k == 0 {
        let ok = prog.tests_pass(l, &base, 0);
        if !ok {
            return (0, None);
        }
        let holds = prog.conclusion_holds(l, &base);
        return (1, if holds { None } else { Some(vec![]) });
    }
    let cutoff = AtomicUsize::new(usize::MAX);
    let run_branch = |first: usize| -> (u64, Option<Vec<Elem>>) {
        let mut s = Search {
            l,
            prog: &prog,
            vals: base.clone(),
            assignment: vec![0; k],
            tested: 0,
            cutoff: &cutoff,
            first,
            aborted: false,
        };
        s.assignment[0] = first;
        s.vals[prog.var_nodes[0]] = first;
        prog.eval(l, &mut s.vals, &prog.by_level[0]);
        if !prog.tests_pass(l, &s.vals, 0) {
            return (0, None);
        }
        let found = if k == 1 {
            s.tested += 1;
            !prog.conclusion_holds(l, &s.vals)
        } else {
            s.dfs(1) && !s.aborted
        };
        if found {
            cutoff.fetch_min(first, Ordering::Relaxed);
            (s.tested, Some(s.assignment))
        } else {
            (s.tested, None)
        }
    };

    let m = l.len();
    let results: Vec<(u64, Option<Vec<Elem>>)> = if parallel {
        (0..m).into_par_iter().map(run_branch).collect()
    } else {
        let mut out = Vec::with_capacity(m);
        for first in 0..m {
            let r = run_branch(first);
            let stop = r.1.is_some();
            out.push(r);
            if stop {
                break;
            }
        }
        out
    };
    // Branches past the first counterexample may have been cut short;
    // only count up to it so the total is independent of scheduling.
    let mut tested = 0;
    for (count, cx) in results {
        tested += count;
        if cx.is_some() {
            return (tested, cx);
        }
    }
    (tested, None)
}

fn brute_force_search(l: &OmlLattice, eq: &ConditionalEquation, order: &[String]) -> (u64, Option<Vec<Elem>>) {
    let k = order.len();
    let m = l.len();
    let mut assignment = vec![0usize; k];
    let mut tested = 0;
    loop {
        let lookup = |v: &str| order.iter().position(|o| o == v).map(|p| assignment[p]);
        let hyps_ok = eq
            .hypotheses
            .iter()
            .all(|h| evaluate_hypothesis(l, h, &lookup).expect("all variables bound"));
        if hyps_ok {
            tested += 1;
            let x = evaluate_term(l, &eq.lhs, &lookup).expect("all variables bound");
            let y = evaluate_term(l, &eq.rhs, &lookup).expect("all variables bound");
            if !relation_holds(l, eq.relation, x, y) {
                return (tested, Some(assignment));
            }
        }
        // Odometer increment, last variable fastest.
        let mut p = k;
        loop {
            if p == 0 {
                return (tested, None);
            }
            p -= 1;
            assignment[p] += 1;
            if assignment[p] < m {
                break;
            }
            assignment[p] = 0;
        }
    }
}

/// Checks `eq` on `l` with the given options.
pub fn check_equation_with(l: &OmlLattice, eq: &ConditionalEquation, opts: &CheckOptions) -> Verdict {
    let order = opts.order.clone().unwrap_or_else(|| plan_variable_order(eq));
    let (tested, cx) = if opts.pruning {
        pruned_search(l, eq, &order, opts.parallel)
    } else {
        brute_force_search(l, eq, &order)
    };
    let counterexample = cx.map(|values| {
        eq.variables
            .iter()
            .map(|v| {
                let p = order.iter().position(|o| o == v).expect("variable in order");
                (v.clone(), values[p])
            })
            .collect()
    });
    Verdict {
        holds: counterexample.is_none(),
        counterexample,
        assignments_tested: tested,
    }
}

/// Checks `eq` on `l` with pruning and parallel search.
pub fn check_equation(l: &OmlLattice, eq: &ConditionalEquation) -> Verdict {
    check_equation_with(l, eq, &CheckOptions::default())
}
