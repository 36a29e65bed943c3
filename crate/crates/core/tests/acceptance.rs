//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use oml_core::checker::{check_equation, check_equation_with, CheckOptions};
use oml_core::corpus::{corpus_get, GoFact, CORPUS};
use oml_core::godp::{go_scan, GoOutcome, DEFAULT_MAX_N};
use oml_core::greechie::parse_diagram;
use oml_core::lattice::OmlLattice;
use oml_core::mgegen::{derive_mge, BlockStatus};
use oml_core::ratlp::{solve, LpOutcome};
use oml_core::states::{admits_state, pair_lp, strong_state_check};
use oml_core::term::{build_family, ConditionalEquation, Family, Hypothesis, MgEquation, Relation, Term};

/// Pass/fail of one criterion with a one-line detail.
type Outcome = Result<String, String>;

const PETERSON: &str = "peterson";

/// Runtime budgets per criterion.
const BUDGETS: [Duration; 10] = [
    Duration::from_secs(1),
    Duration::from_secs(1),
    Duration::from_secs(10),
    Duration::from_secs(120),
    Duration::from_secs(600),
    Duration::from_secs(300),
    Duration::from_secs(300),
    Duration::from_secs(300),
    Duration::from_secs(300),
    Duration::from_secs(60),
];

/// Exact LP tolerance: none.
fn exactly_one(v: &BigRational) -> bool {
    v.is_one()
}

const GO_FIGURE_ENTRIES: [&str; 6] = [
    "23-16-p7go-f8go-a",
    "26-18-p8go-f9go-a",
    "26-18-p9go-f10go-a",
    "26-18-p9go-f10go-b",
    "28-20-p10go-f11go-a",
    "28-20-p11go-f12go-a",
];

fn lattice(name: &str) -> OmlLattice {
    corpus_get(name).unwrap().lattice()
}

fn small(text: &str) -> OmlLattice {
    OmlLattice::from_diagram(&parse_diagram(text).unwrap()).unwrap()
}

fn family(f: Family, n: usize) -> ConditionalEquation {
    build_family(f, n).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let l = lattice(PETERSON);
    let d = l.source();
    let one = l.atom(d.atom_by_label('1').unwrap());
    let seven_c = l.coatom(d.atom_by_label('7').unwrap()).unwrap();
    let lp = pair_lp(&l, one, seven_c, &[]);
    let LpOutcome::Optimal { value, point } = solve(&lp) else {
        return Err("LP not optimal".into());
    };
    ensure(exactly_one(&value), || format!("min m(7') = {value}, expected exactly 1"))?;
    ensure(lp.is_feasible(&point), || "optimal point violates a constraint".into())?;
    let v = strong_state_check(&l);
    ensure(!v.strong, || "states reported strong".into())?;
    let w = v.witness.unwrap();
    Ok(format!(
        "min m(7') given m(1)=1 is exactly {value}; not strong, witness {}, {}",
        l.describe(w.a),
        l.describe(w.b)
    ))
}

fn criterion_2() -> Outcome {
    let l = lattice(PETERSON);
    let d = l.source();
    let w = strong_state_check(&l).witness.ok_or("no witness")?;
    let out = derive_mge(&l, (w.a, w.b)).map_err(|e| e.to_string())?;
    let relaxed: Vec<String> = d
        .blocks()
        .iter()
        .zip(&out.record.statuses)
        .filter(|(_, s)| **s == BlockStatus::Relaxed)
        .map(|(b, _)| b.iter().map(|&a| d.label(a)).collect())
        .collect();
    ensure(relaxed == ["123", "567", "789", "BC1", "4FA", "DEF"], || {
        format!("relaxed blocks {relaxed:?}")
    })?;
    let condensed = out.condensed.to_string();
    ensure(condensed == "45+9A+E8+6D=56+89+4A+DE", || format!("condensed {condensed}"))?;
    let renamed = out.condensed.rename_to_letters().map_err(|e| e.to_string())?.0.to_string();
    ensure(renamed == "ab+cd+ef+gh=bg+fc+ad+he", || format!("renamed {renamed}"))?;
    Ok(format!("{} of 10 blocks relaxed; {condensed} -> {renamed}", relaxed.len()))
}

/// `(a1 v b1) ^ ... == (b1 v a2) ^ ... ^ (bn v a1)` as an MGE.
fn go_mge(n: usize) -> MgEquation {
    let a = |i: usize| format!("a{}", i % n + 1);
    let b = |i: usize| format!("b{}", i % n + 1);
    MgEquation::new(
        (0..n).map(|i| vec![a(i), b(i)]).collect(),
        (0..n).map(|i| vec![b(i), a(i + 1)]).collect(),
    )
    .unwrap()
}

fn criterion_3() -> Outcome {
    let l = lattice(PETERSON);
    let w = strong_state_check(&l).witness.ok_or("no witness")?;
    let out = derive_mge(&l, (w.a, w.b)).map_err(|e| e.to_string())?;
    let mge = &out.generated.mge;
    let eq = mge.to_equation();
    let verdict = check_equation(&l, &eq);
    ensure(!verdict.holds, || "generated MGE holds in Peterson".into())?;
    let reference = go_mge(4);
    let fam = family(Family::MgeGo, 4);
    ensure(reference.to_equation().lhs == fam.lhs && reference.to_equation().rhs == fam.rhs, || {
        "4-Go MGE reference disagrees with family builder".into()
    })?;
    ensure(mge.is_renaming_of(&reference), || format!("{mge} is not a renaming of {reference}"))?;
    Ok(format!("{mge} fails in Peterson and renames to the 4-Go MGE"))
}

fn criterion_4() -> Outcome {
    let mut expected = vec![(PETERSON, 4)];
    expected.extend(GO_FIGURE_ENTRIES.iter().zip([8, 9, 10, 10, 11, 12]).map(|(&n, k)| (n, k)));
    let mut got = Vec::new();
    for (name, first_fail) in &expected {
        let r = go_scan(&lattice(name), DEFAULT_MAX_N);
        ensure(r.outcome == GoOutcome::FirstFail(*first_fail), || {
            format!("{name}: {} (expected first-fail n={first_fail})", r.outcome)
        })?;
        got.push(first_fail.to_string());
    }
    let p = lattice(PETERSON);
    ensure(check_equation(&p, &family(Family::GoGamma, 3)).holds, || "3-Go fails on Peterson".into())?;
    ensure(!check_equation(&p, &family(Family::GoGamma, 4)).holds, || "4-Go holds on Peterson".into())?;
    Ok(format!("first-fail n = {}", got.join(", ")))
}

fn criterion_5() -> Outcome {
    let e3 = family(Family::En, 3);
    let e4 = family(Family::En, 4);
    let mut summary = Vec::new();
    for name in GO_FIGURE_ENTRIES {
        let l = lattice(name);
        let expected_e3 = !matches!(name, "26-18-p9go-f10go-b" | "28-20-p10go-f11go-a");
        let v3 = check_equation(&l, &e3).holds;
        let v4 = check_equation(&l, &e4).holds;
        ensure(v3 == expected_e3, || format!("{name}: E3 holds={v3}, expected {expected_e3}"))?;
        ensure(v4, || format!("{name}: E4 fails"))?;
        summary.push(format!("{name}:E3={}", if v3 { "holds" } else { "fails" }));
    }
    Ok(format!("{}; E4 holds on all six", summary.join(" ")))
}

fn criterion_6() -> Outcome {
    let l = lattice("mayet-30-19");
    ensure(admits_state(&l).is_none(), || "a state exists".into())?;
    let r = go_scan(&l, DEFAULT_MAX_N);
    let GoOutcome::ConvergedAllPass(p) = r.outcome else {
        return Err(format!("goscan: {}", r.outcome));
    };
    ensure(check_equation(&l, &family(Family::En, 3)).holds, || "E3 fails".into())?;
    ensure(check_equation(&l, &family(Family::En, 4)).holds, || "E4 fails".into())?;
    Ok(format!("no state; all n-Go pass (converged at pass {p}); E3 and E4 hold"))
}

fn criterion_7() -> Outcome {
    let eqs = [
        ("go_2n(2)", family(Family::Go2n, 2)),
        ("estar2_commute", family(Family::EStar2Commute, 0)),
        ("en(2)", family(Family::En, 2)),
        ("estarn(2)", family(Family::EStarN, 2)),
    ];
    let mut checks = 0;
    for entry in CORPUS {
        let l = entry.lattice();
        for (label, eq) in &eqs {
            let v = check_equation(&l, eq);
            ensure(v.holds, || format!("{label} fails on {}: {:?}", entry.name, v.counterexample))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} checks, zero violations"))
}

fn criterion_8() -> Outcome {
    let pairs = [
        ("ea3/oa3_4var", family(Family::Ea3, 0), family(Family::Oa3FourVar, 0)),
        ("en(3)/estarn(3)", family(Family::En, 3), family(Family::EStarN, 3)),
        ("go_gamma(3)/go_2n(3)", family(Family::GoGamma, 3), family(Family::Go2n, 3)),
        ("go_gamma(4)/go_2n(4)", family(Family::GoGamma, 4), family(Family::Go2n, 4)),
    ];
    let mut compared = 0;
    for entry in CORPUS {
        let l = entry.lattice();
        for (label, x, y) in &pairs {
            let (vx, vy) = (check_equation(&l, x).holds, check_equation(&l, y).holds);
            ensure(vx == vy, || format!("{label} on {}: {vx} vs {vy}", entry.name))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} verdict pairs, zero discrepancies"))
}

const SMALL_DIAGRAMS: [&str; 7] = ["12.", "123.", "1234.", "12,34.", "12,345.", "123,456.", "123,345."];
const EQUATION_SEED: u64 = 0x5eed_0a11;
const RANDOM_EQUATIONS: usize = 20;

fn random_term(rng: &mut StdRng, vars: &[&str], depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..12) {
            0 => Term::Zero,
            1 => Term::One,
            _ => Term::Var(vars[rng.gen_range(0..vars.len())].to_string()),
        };
    }
    let a = random_term(rng, vars, depth - 1);
    match rng.gen_range(0..4) {
        0 => a.comp(),
        1 => a.meet(random_term(rng, vars, depth - 1)),
        2 => a.join(random_term(rng, vars, depth - 1)),
        _ => a.arrow(random_term(rng, vars, depth - 1)),
    }
}

fn random_equation(rng: &mut StdRng) -> ConditionalEquation {
    let pool = ["a", "b", "c", "d"];
    let k = rng.gen_range(2..=4);
    let vars = &pool[..k];
    let hypotheses = (0..rng.gen_range(0..=2))
        .map(|_| {
            let x = random_term(rng, vars, 1);
            let y = random_term(rng, vars, 1);
            if rng.gen_bool(0.5) {
                Hypothesis::Orthogonal(x, y)
            } else {
                Hypothesis::Commutes(x, y)
            }
        })
        .collect();
    let relation = if rng.gen_bool(0.5) { Relation::Le } else { Relation::Eq };
    ConditionalEquation::new(hypotheses, relation, random_term(rng, vars, 3), random_term(rng, vars, 3))
}

fn criterion_9() -> Outcome {
    let mut rng = StdRng::seed_from_u64(EQUATION_SEED);
    let eqs: Vec<ConditionalEquation> = (0..RANDOM_EQUATIONS).map(|_| random_equation(&mut rng)).collect();
    let brute = CheckOptions {
        pruning: false,
        ..Default::default()
    };
    let mut compared = 0;
    let mut failing = 0;
    for text in SMALL_DIAGRAMS {
        let l = small(text);
        ensure(l.len() <= 16, || format!("{text} has {} elements", l.len()))?;
        for eq in &eqs {
            let pruned = check_equation(&l, eq);
            let plain = check_equation_with(&l, eq, &brute);
            ensure(pruned.holds == plain.holds && pruned.counterexample == plain.counterexample, || {
                format!("{text}: pruning changes the verdict on {eq}")
            })?;
            failing += usize::from(!pruned.holds);
            compared += 1;
        }
    }
    let mut scans = 0;
    let lattices = SMALL_DIAGRAMS
        .iter()
        .map(|t| (t.to_string(), small(t)))
        .chain(CORPUS.iter().map(|e| (e.name.to_string(), e.lattice())));
    for (name, l) in lattices {
        let r = go_scan(&l, DEFAULT_MAX_N);
        for n in [3, 4] {
            let checker = check_equation(&l, &family(Family::GoGamma, n)).holds;
            ensure(r.holds_at(n) == Some(checker), || {
                format!("{name}: godp says {:?} at n={n}, checker {checker}", r.holds_at(n))
            })?;
            scans += 1;
        }
    }
    Ok(format!(
        "{compared} pruned/unpruned comparisons ({failing} failing), {scans} godp/checker comparisons, zero discrepancies"
    ))
}

/// Ortholattice and orthomodular axioms checked from the order relation.
fn axiom_violation(l: &OmlLattice) -> Option<String> {
    let m = l.len();
    let (zero, one) = (l.zero(), l.one());
    for x in 0..m {
        if !l.leq(x, x) || !l.leq(zero, x) || !l.leq(x, one) {
            return Some(format!("bounds/reflexivity at {x}"));
        }
        let xc = l.ortho(x);
        if l.ortho(xc) != x || l.meet(x, xc) != zero || l.join(x, xc) != one {
            return Some(format!("complement laws at {x}"));
        }
        for y in 0..m {
            if l.leq(x, y) && l.leq(y, x) && x != y {
                return Some(format!("antisymmetry at {x},{y}"));
            }
            if l.leq(x, y) != l.leq(l.ortho(y), xc) {
                return Some(format!("order reversal at {x},{y}"));
            }
            let (mt, jn) = (l.meet(x, y), l.join(x, y));
            if l.ortho(jn) != l.meet(xc, l.ortho(y)) || l.ortho(mt) != l.join(xc, l.ortho(y)) {
                return Some(format!("De Morgan at {x},{y}"));
            }
            if l.leq(x, y) && y != l.join(x, l.meet(y, xc)) {
                return Some(format!("orthomodularity at {x},{y}"));
            }
            for z in 0..m {
                if l.leq(x, y) && l.leq(y, z) && !l.leq(x, z) {
                    return Some(format!("transitivity at {x},{y},{z}"));
                }
                if (l.leq(z, x) && l.leq(z, y)) != l.leq(z, mt) {
                    return Some(format!("meet is not the glb at {x},{y},{z}"));
                }
                if (l.leq(x, z) && l.leq(y, z)) != l.leq(jn, z) {
                    return Some(format!("join is not the lub at {x},{y},{z}"));
                }
            }
        }
    }
    None
}

fn criterion_10() -> Outcome {
    let mut elements = 0;
    for entry in CORPUS {
        let l = entry.lattice();
        if let Some(v) = axiom_violation(&l) {
            return Err(format!("{}: {v}", entry.name));
        }
        elements += l.len();
    }
    Ok(format!("{} lattices, {elements} elements, all axioms hold", CORPUS.len()))
}

fn main() -> ExitCode {
    // Corpus facts double as a consistency check on the suite's expectations.
    assert_eq!(corpus_get("mayet-30-19").unwrap().facts.go, Some(GoFact::AllPass));

    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Peterson LP minimum and strong-state verdict", criterion_1),
        ("Peterson block relaxation and condensed form", criterion_2),
        ("generated Peterson MGE fails and is 4-Go", criterion_3),
        ("goscan corpus verdicts", criterion_4),
        ("E3/E4 corpus verdicts", criterion_5),
        ("30-atom stateless lattice", criterion_6),
        ("universal equations on the corpus", criterion_7),
        ("equivalent equation pairs on the corpus", criterion_8),
        ("pruning and godp oracle equivalence", criterion_9),
        ("ortholattice and orthomodular axioms", criterion_10),
    ];
    let mut failures = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let budget = BUDGETS[i];
        let result = match result {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; over budget of {budget:?}")),
            other => other,
        };
        let (status, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {:>2} [{status}] {title}: {detail} ({:.2}s)", i + 1, elapsed.as_secs_f64());
        failures += usize::from(result.is_err());
    }
    if failures == 0 {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
