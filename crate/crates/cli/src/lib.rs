//! `omltool`: command-line front end for finite OML analysis.
//!
//! Input files hold one Greechie diagram per line; blank lines and lines
//! starting with `#` are skipped. Exit status is 0 on success, 1 on I/O or
//! parse errors and 2 when `--fail-on-violation` is set and some check
//! fails.

use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use oml_core::checker::check_equation;
use oml_core::corpus::{corpus_get, CorpusEntry, GoFact, CORPUS};
use oml_core::godp::{go_scan, GoOutcome, GoScanResult, DEFAULT_MAX_N};
use oml_core::greechie::parse_lines;
use oml_core::lattice::{Elem, OmlLattice};
use oml_core::mgegen::derive_mge;
use oml_core::states::{admits_state, strong_state_check, unique_state, StrongVerdict, UniqueStateVerdict};
use oml_core::term::{build_family, parse_equation, ConditionalEquation, Family};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "omltool", version, about = "Finite orthomodular lattice toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Exit with status 2 when any check fails.
    #[arg(long, global = true)]
    fail_on_violation: bool,
    /// Worker threads; output order does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateMode {
    Strong,
    Any,
    Unique,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate each diagram line.
    Parse { file: PathBuf },
    /// Element, atom and block counts per lattice.
    Info { file: PathBuf },
    /// Check an equation on every lattice.
    Check {
        /// Equation text, e.g. "a # b |- a ^ b == 0".
        #[arg(long, conflicts_with = "family", required_unless_present = "family")]
        eq: Option<String>,
        /// Named family, e.g. "go_gamma:4" or "estar2c".
        #[arg(long)]
        family: Option<String>,
        file: PathBuf,
    },
    /// State existence and strong-state questions.
    States {
        #[arg(long, value_enum, default_value_t = StateMode::Strong)]
        mode: StateMode,
        file: PathBuf,
    },
    /// First failing n-Go per lattice.
    Goscan {
        #[arg(long, default_value_t = DEFAULT_MAX_N as u64, value_parser = clap::value_parser!(u64).range(3..))]
        max_n: u64,
        file: PathBuf,
    },
    /// Derive a failing equation from each lattice without strong states.
    Genmge { file: PathBuf },
    /// Built-in lattices.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Debug, Subcommand)]
enum CorpusAction {
    /// List entries.
    List,
    /// Show an entry's notation and recorded facts.
    Show { name: String },
    /// Re-derive recorded facts, for one entry or all.
    Verify { name: Option<String> },
}

/// Failure that ends the run with a given status.
struct Exit {
    code: i32,
    message: String,
}

fn input_error(message: impl Into<String>) -> Exit {
    Exit {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// A lattice read from input, tagged with its line number.
struct Input {
    line: usize,
    lattice: OmlLattice,
}

fn read_source(path: &PathBuf) -> Result<String, Exit> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| input_error(format!("stdin: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
    }
}

/// Parses and builds every lattice, failing on the first bad line.
fn load(path: &PathBuf) -> Result<Vec<Input>, Exit> {
    let text = read_source(path)?;
    let mut out = Vec::new();
    for dl in parse_lines(&text) {
        let diagram = dl
            .result
            .map_err(|e| input_error(format!("{}:{}: {e}", path.display(), dl.line)))?;
        let lattice = OmlLattice::from_diagram(&diagram)
            .map_err(|e| input_error(format!("{}:{}: {e}", path.display(), dl.line)))?;
        out.push(Input { line: dl.line, lattice });
    }
    Ok(out)
}

fn describe_assignment(l: &OmlLattice, asg: &[(String, Elem)]) -> String {
    asg.iter()
        .map(|(v, e)| format!("{v}={}", l.describe(*e)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_family_spec(spec: &str) -> Result<ConditionalEquation, Exit> {
    let (name, n) = match spec.split_once(':') {
        Some((name, n)) => {
            let n: usize = n
                .parse()
                .map_err(|_| input_error(format!("bad family size in {spec:?}")))?;
            (name, Some(n))
        }
        None => (spec, None),
    };
    let family: Family = name.parse().map_err(|e| input_error(format!("{e}")))?;
    let n = match (family.takes_n(), n) {
        (true, Some(n)) => n,
        (true, None) => return Err(input_error(format!("family {family} needs a size, e.g. {family}:3"))),
        (false, _) => 0,
    };
    build_family(family, n).map_err(|e| input_error(format!("{e}")))
}

struct Report {
    text: String,
    violation: bool,
    /// Violations set the exit status even without `--fail-on-violation`.
    strict: bool,
    /// Input problems, reported on stderr with exit status 1.
    errors: Vec<String>,
}

impl Report {
    fn new() -> Self {
        Report {
            text: String::new(),
            violation: false,
            strict: false,
            errors: Vec::new(),
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }
}

fn cmd_parse(path: &PathBuf, format: Format) -> Result<Report, Exit> {
    let text = read_source(path)?;
    let mut r = Report::new();
    if format == Format::Tsv {
        r.line("line\tstatus\tatoms\tblocks\tmessage");
    }
    for dl in parse_lines(&text) {
        let built = dl
            .result
            .map_err(|e| e.to_string())
            .and_then(|d| OmlLattice::from_diagram(&d).map(|l| (d, l)).map_err(|e| e.to_string()));
        match (&built, format) {
            (Ok((d, _)), Format::Text) => {
                r.line(format!("line {}: ok ({} atoms, {} blocks)", dl.line, d.num_atoms(), d.num_blocks()))
            }
            (Ok((d, _)), Format::Tsv) => r.line(format!("{}\tok\t{}\t{}\t", dl.line, d.num_atoms(), d.num_blocks())),
            (Err(e), Format::Text) => r.line(format!("line {}: error: {e}", dl.line)),
            (Err(e), Format::Tsv) => r.line(format!("{}\terror\t\t\t{e}", dl.line)),
        }
        if let Err(e) = built {
            r.errors.push(format!("{}:{}: {e}", path.display(), dl.line));
        }
    }
    Ok(r)
}

fn cmd_info(inputs: &[Input], format: Format) -> Report {
    let mut r = Report::new();
    if format == Format::Tsv {
        r.line("line\tatoms\tblocks\telements");
    }
    for i in inputs {
        let d = i.lattice.source();
        match format {
            Format::Text => r.line(format!(
                "line {}: {} atoms, {} blocks, {} elements",
                i.line,
                d.num_atoms(),
                d.num_blocks(),
                i.lattice.len()
            )),
            Format::Tsv => r.line(format!("{}\t{}\t{}\t{}", i.line, d.num_atoms(), d.num_blocks(), i.lattice.len())),
        }
    }
    r
}

fn cmd_check(inputs: &[Input], eq: &ConditionalEquation, format: Format) -> Report {
    let mut r = Report::new();
    match format {
        Format::Text => r.line(format!("equation: {eq}")),
        Format::Tsv => r.line("line\tholds\tassignments\tcounterexample"),
    }
    for i in inputs {
        let v = check_equation(&i.lattice, eq);
        let cx = v
            .counterexample
            .as_ref()
            .map(|a| describe_assignment(&i.lattice, a))
            .unwrap_or_default();
        r.violation |= !v.holds;
        match format {
            Format::Text if v.holds => r.line(format!("line {}: holds ({} assignments)", i.line, v.assignments_tested)),
            Format::Text => r.line(format!("line {}: fails; counterexample {cx}", i.line)),
            Format::Tsv => r.line(format!("{}\t{}\t{}\t{cx}", i.line, v.holds, v.assignments_tested)),
        }
    }
    r
}

fn strong_summary(l: &OmlLattice, v: &StrongVerdict) -> (String, String, String) {
    match &v.witness {
        None => ("strong".into(), String::new(), String::new()),
        Some(w) => (
            "not strong".into(),
            format!("{}, {}", l.describe(w.a), l.describe(w.b)),
            w.min_value.as_ref().map_or_else(|| "inf".into(), |m| m.to_string()),
        ),
    }
}

fn cmd_states(inputs: &[Input], mode: StateMode, format: Format) -> Report {
    let mut r = Report::new();
    if format == Format::Tsv {
        r.line(match mode {
            StateMode::Strong => "line\tverdict\twitness\tmin",
            StateMode::Any | StateMode::Unique => "line\tverdict\tstate",
        });
    }
    for i in inputs {
        let l = &i.lattice;
        let (verdict, a, b, violation) = match mode {
            StateMode::Strong => {
                let v = strong_state_check(l);
                let (verdict, witness, min) = strong_summary(l, &v);
                (verdict, witness, min, !v.strong)
            }
            StateMode::Any => match admits_state(l) {
                Some(s) => ("admits a state".into(), s.display(l).to_string(), String::new(), false),
                None => ("no state".into(), String::new(), String::new(), true),
            },
            StateMode::Unique => match unique_state(l) {
                UniqueStateVerdict::NoState => ("no state".into(), String::new(), String::new(), true),
                UniqueStateVerdict::Unique(s) => ("unique state".into(), s.display(l).to_string(), String::new(), false),
                UniqueStateVerdict::Many => ("many states".into(), String::new(), String::new(), false),
            },
        };
        r.violation |= violation;
        let line = match (format, mode) {
            (Format::Tsv, StateMode::Strong) => format!("{}\t{verdict}\t{a}\t{b}", i.line),
            (Format::Tsv, _) => format!("{}\t{verdict}\t{a}", i.line),
            (Format::Text, StateMode::Strong) if !a.is_empty() => {
                format!("line {}: {verdict}; witness {a}; min {b}", i.line)
            }
            (Format::Text, _) if !a.is_empty() => format!("line {}: {verdict}: {a}", i.line),
            (Format::Text, _) => format!("line {}: {verdict}", i.line),
        };
        r.line(line);
    }
    r
}

fn outcome_fields(res: &GoScanResult) -> (&'static str, usize) {
    match res.outcome {
        GoOutcome::FirstFail(n) => ("first-fail", n),
        GoOutcome::ConvergedAllPass(p) => ("converged", p),
        GoOutcome::CutoffReached(n) => ("cutoff", n),
    }
}

fn cmd_goscan(inputs: &[Input], max_n: usize, format: Format) -> Report {
    let mut r = Report::new();
    if format == Format::Tsv {
        r.line("line\toutcome\tn_or_pass\tpasses");
    }
    // Lattices are scanned one after another; each scan parallelises
    // internally.
    for i in inputs {
        let res = go_scan(&i.lattice, max_n);
        r.violation |= matches!(res.outcome, GoOutcome::FirstFail(_));
        let (kind, n) = outcome_fields(&res);
        match format {
            Format::Text => r.line(format!("line {}: {} ({} passes)", i.line, res.outcome, res.passes)),
            Format::Tsv => r.line(format!("{}\t{kind}\t{n}\t{}", i.line, res.passes)),
        }
    }
    r
}

fn cmd_genmge(inputs: &[Input], format: Format) -> Report {
    let mut r = Report::new();
    if format == Format::Tsv {
        r.line("line\tstatus\twitness\trelaxed\tcondensed\trenamed\tequation");
    }
    for i in inputs {
        let l = &i.lattice;
        let v = strong_state_check(l);
        let Some(w) = v.witness else {
            match format {
                Format::Text => r.line(format!("line {}: strong; no equation", i.line)),
                Format::Tsv => r.line(format!("{}\tstrong\t\t\t\t\t", i.line)),
            }
            continue;
        };
        let witness = format!("{}, {}", l.describe(w.a), l.describe(w.b));
        match derive_mge(l, (w.a, w.b)) {
            Ok(out) => {
                r.violation = true;
                let relaxed = format!("{}/{}", out.record.num_relaxed(), out.record.statuses.len());
                let g = &out.generated;
                match format {
                    Format::Text => {
                        r.line(format!("line {}: witness {witness}; {relaxed} blocks relaxed", i.line));
                        r.line(format!("  condensed: {}", out.condensed));
                        if g.balanced != out.condensed {
                            r.line(format!("  balanced:  {}", g.balanced));
                        }
                        r.line(format!("  renamed:   {}", g.renamed));
                        r.line(format!("  equation:  {}", g.mge));
                        r.line(format!("  fails at:  {}", describe_assignment(l, &g.counterexample)));
                    }
                    Format::Tsv => r.line(format!(
                        "{}\tok\t{witness}\t{relaxed}\t{}\t{}\t{}",
                        i.line, out.condensed, g.renamed, g.mge
                    )),
                }
            }
            Err(e) => match format {
                Format::Text => r.line(format!("line {}: witness {witness}; no equation: {e}", i.line)),
                Format::Tsv => r.line(format!("{}\terror: {e}\t{witness}\t\t\t\t", i.line)),
            },
        }
    }
    r
}

fn facts_lines(e: &CorpusEntry) -> Vec<String> {
    let f = &e.facts;
    let mut out = Vec::new();
    match f.go {
        Some(GoFact::FirstFail(n)) => out.push(format!("n-Go: first fails at n={n}")),
        Some(GoFact::AllPass) => out.push("n-Go: all pass".into()),
        None => {}
    }
    let verdict = |b: bool| if b { "holds" } else { "fails" };
    if let Some(b) = f.e3 {
        out.push(format!("E3: {}", verdict(b)));
    }
    if let Some(b) = f.e4 {
        out.push(format!("E4: {}", verdict(b)));
    }
    if let Some(b) = f.admits_state {
        out.push(format!("admits a state: {b}"));
    }
    if let Some(b) = f.strong {
        out.push(format!("strong set of states: {b}"));
    }
    out
}

/// Re-derives each recorded fact; returns `(fact, expected, observed)`.
fn verify_entry(e: &CorpusEntry) -> Vec<(String, String, String)> {
    let l = e.lattice();
    let f = &e.facts;
    let mut out = Vec::new();
    if let Some(go) = f.go {
        let res = go_scan(&l, DEFAULT_MAX_N);
        let observed = match res.outcome {
            GoOutcome::FirstFail(n) => format!("first-fail n={n}"),
            GoOutcome::ConvergedAllPass(_) => "all pass".into(),
            GoOutcome::CutoffReached(n) => format!("cutoff at n={n}"),
        };
        let expected = match go {
            GoFact::FirstFail(n) => format!("first-fail n={n}"),
            GoFact::AllPass => "all pass".into(),
        };
        out.push(("n-Go".into(), expected, observed));
    }
    for (label, expected, n) in [("E3", f.e3, 3), ("E4", f.e4, 4)] {
        if let Some(expected) = expected {
            let eq = build_family(Family::En, n).expect("valid size");
            let holds = check_equation(&l, &eq).holds;
            out.push((label.into(), expected.to_string(), holds.to_string()));
        }
    }
    if let Some(expected) = f.admits_state {
        out.push(("admits a state".into(), expected.to_string(), admits_state(&l).is_some().to_string()));
    }
    if let Some(expected) = f.strong {
        out.push(("strong".into(), expected.to_string(), strong_state_check(&l).strong.to_string()));
    }
    out
}

fn cmd_corpus(action: &CorpusAction, format: Format) -> Result<Report, Exit> {
    let mut r = Report::new();
    let lookup = |name: &str| corpus_get(name).map_err(|e| input_error(e.to_string()));
    match action {
        CorpusAction::List => {
            if format == Format::Tsv {
                r.line("name\tatoms\tblocks\tnotation");
            }
            for e in CORPUS {
                match format {
                    Format::Text => r.line(format!("{:<22} {:>2} atoms {:>2} blocks", e.name, e.atoms, e.blocks)),
                    Format::Tsv => r.line(format!("{}\t{}\t{}\t{}", e.name, e.atoms, e.blocks, e.notation)),
                }
            }
        }
        CorpusAction::Show { name } => {
            let e = lookup(name)?;
            r.line(format!("name: {}", e.name));
            r.line(format!("notation: {}", e.notation));
            r.line(format!("atoms: {}, blocks: {}", e.atoms, e.blocks));
            for f in facts_lines(e) {
                r.line(format!("fact: {f}"));
            }
            for p in e.provenance {
                r.line(format!("source: {p}"));
            }
        }
        CorpusAction::Verify { name } => {
            let entries: Vec<&CorpusEntry> = match name {
                Some(n) => vec![lookup(n)?],
                None => CORPUS.iter().collect(),
            };
            r.strict = true;
            if format == Format::Tsv {
                r.line("name\tfact\texpected\tobserved\tstatus");
            }
            for e in entries {
                for (fact, expected, observed) in verify_entry(e) {
                    let ok = expected == observed;
                    r.violation |= !ok;
                    let status = if ok { "PASS" } else { "FAIL" };
                    match format {
                        Format::Text => r.line(format!(
                            "{status} {}: {fact}: expected {expected}, observed {observed}",
                            e.name
                        )),
                        Format::Tsv => r.line(format!("{}\t{fact}\t{expected}\t{observed}\t{status}", e.name)),
                    }
                }
            }
        }
    }
    Ok(r)
}

fn dispatch(cli: &Cli) -> Result<Report, Exit> {
    let f = cli.format;
    Ok(match &cli.command {
        Command::Parse { file } => cmd_parse(file, f)?,
        Command::Info { file } => cmd_info(&load(file)?, f),
        Command::Check { eq, family, file } => {
            let equation = match (eq, family) {
                (Some(text), _) => parse_equation(text).map_err(|e| input_error(format!("equation: {e}")))?,
                (None, Some(spec)) => parse_family_spec(spec)?,
                (None, None) => unreachable!("clap requires one of --eq/--family"),
            };
            cmd_check(&load(file)?, &equation, f)
        }
        Command::States { mode, file } => cmd_states(&load(file)?, *mode, f),
        Command::Goscan { max_n, file } => cmd_goscan(&load(file)?, *max_n as usize, f),
        Command::Genmge { file } => cmd_genmge(&load(file)?, f),
        Command::Corpus { action } => cmd_corpus(action, f)?,
    })
}

/// Runs the tool on `args` (including the program name), writing the report
/// to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let run_all = || dispatch(&cli);
    let result = match cli.jobs {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build() {
            Ok(pool) => pool.install(run_all),
            Err(e) => Err(input_error(format!("thread pool: {e}"))),
        },
        None => run_all(),
    };
    match result {
        Ok(report) => {
            let _ = out.write_all(report.text.as_bytes());
            for e in &report.errors {
                let _ = writeln!(err, "error: {e}");
            }
            if !report.errors.is_empty() {
                EXIT_INPUT
            } else if report.violation && (cli.fail_on_violation || report.strict) {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            }
        }
        Err(Exit { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}
