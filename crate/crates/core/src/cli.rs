//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 bad usage or input,
//! 3 node budget exhausted. Structured output is deterministic; timings only
//! appear in human output.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::girth::{girth_bfs, girth_from_shifts, GirthReport, DEFAULT_CAP};
use crate::girth8::{tally_modulus, verify_theorem3, EnumerationOptions, ModulusTally};
use crate::group::Permutation;
use crate::lifting::{export_alist, import_alist, lift, ShiftMatrix};
use crate::mappings::{
    compatible_pairs, difference_sequence, enumerate_with, is_complete_mapping, product_mapping, EnumerationConfig,
    MappingError,
};
use crate::search::{girth6_even_l, min_lifting_factor, SearchOptions, SearchOutcome, SearchResult};
use crate::textdoc::{sniff_kind, DocWriter};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Smallest lifting factors for girth 6, rows J = 3, 4, 5 and L = 4..12.
pub const TABLE_ONE: [(usize, [Option<u32>; 9]); 3] = [
    (
        3,
        [
            Some(5),
            Some(5),
            Some(7),
            Some(7),
            Some(9),
            Some(9),
            Some(11),
            Some(11),
            Some(13),
        ],
    ),
    (
        4,
        [
            None,
            Some(5),
            Some(7),
            Some(7),
            Some(9),
            Some(10),
            Some(11),
            Some(11),
            Some(13),
        ],
    ),
    (
        5,
        [
            None,
            None,
            Some(7),
            Some(7),
            Some(9),
            Some(10),
            Some(11),
            Some(11),
            Some(13),
        ],
    ),
];

/// Published value for `(J, L)`, if the table has one.
pub fn table_one_entry(j: usize, l: usize) -> Option<u32> {
    let row = TABLE_ONE.iter().find(|(rj, _)| *rj == j)?;
    l.checked_sub(4).and_then(|i| row.1.get(i).copied().flatten())
}

#[derive(Debug, Parser)]
#[command(name = "qcldpc", version, about = "Quasi-cyclic LDPC codes from complete mappings")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Worker threads for the exhaustive searches; results do not depend on it.
    #[arg(long, default_value_t = 1, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: u16,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count, list or check complete mappings of Z/N.
    Mappings {
        #[command(subcommand)]
        action: MappingsAction,
    },
    /// Build a 3 x L shift matrix from a known construction.
    Construct(ConstructArgs),
    /// Girth of a shift matrix or alist file.
    Girth(GirthArgs),
    /// Exhaustive checks of published claims.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Smallest lifting factor for a J x L matrix of the target girth.
    Search(SearchArgs),
}

#[derive(Debug, Subcommand)]
pub enum MappingsAction {
    Count {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        budget: Option<u64>,
        /// Also write the census document here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    Enumerate {
        #[arg(long)]
        n: u64,
        /// Number of mappings to list (the count stays exact).
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    Check {
        /// Image sequence, comma or space separated.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        images: Vec<u32>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructKind {
    /// `i -> h i` with N = L odd.
    Product,
    /// `i -> -i`, the product with h = N - 1.
    Reversal,
    /// `i -> 2 i`.
    Array,
    /// Even L: complete mapping of Z/(L+1) with one column removed.
    EvenL,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub kind: ConstructKind,
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub h: Option<u64>,
    /// Write the shift matrix document here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the lifted parity-check matrix in alist format here.
    #[arg(long)]
    pub alist: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GirthMethod {
    Shifts,
    Bfs,
    Both,
}

#[derive(Debug, Args)]
pub struct GirthArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = GirthMethod::Both)]
    pub method: GirthMethod,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u32,
}

#[derive(Debug, Subcommand)]
pub enum VerifyTarget {
    /// Reproduce rows of the smallest-lifting-factor table.
    Table1 {
        #[arg(long, default_value_t = 3)]
        j: usize,
        #[arg(long)]
        l_min: Option<usize>,
        #[arg(long, default_value_t = 8)]
        l_max: usize,
        /// Node budget per table entry.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check the 3L' - 1 bound on valid tables meeting the intersection hypothesis.
    Theorem3 {
        #[arg(long)]
        lprime: usize,
        #[arg(long)]
        n_max: u32,
        /// Node budget per modulus.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Count valid tables below 3L' - 1 with no hypothesis (reported, not asserted).
    Conjecture {
        #[arg(long)]
        lprime: usize,
        #[arg(long)]
        n_min: Option<u32>,
        #[arg(long)]
        n_max: u32,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Pairwise compatibility among the complete mappings of Z/9.
    Pairwise9 {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub j: usize,
    #[arg(long)]
    pub l: usize,
    #[arg(long, default_value_t = 6)]
    pub girth: u32,
    #[arg(long, default_value_t = 32)]
    pub n_max: u32,
    #[arg(long)]
    pub budget: Option<u64>,
    /// Write the witness shift matrix here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub alist: Option<PathBuf>,
}

/// Failure that ends a command early.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e)
    }
}

/// What a command produced: text for stdout and an exit code.
struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: EXIT_OK }
    }
}

struct Context {
    format: Format,
    workers: usize,
}

impl Context {
    fn structured(&self) -> bool {
        self.format == Format::Structured
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return e.exit_code();
        }
    };
    let ctx = Context {
        format: cli.format,
        workers: cli.workers as usize,
    };
    let result = match cli.command {
        Command::Mappings { action } => cmd_mappings(&ctx, action, stderr),
        Command::Construct(args) => cmd_construct(&ctx, args),
        Command::Girth(args) => cmd_girth(&ctx, args, stderr),
        Command::Verify { target } => cmd_verify(&ctx, target),
        Command::Search(args) => cmd_search(&ctx, args),
    };
    match result {
        Ok(outcome) => {
            if stdout.write_all(outcome.text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            outcome.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn join<T: ToString>(values: impl IntoIterator<Item = T>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn mapping_failure(e: MappingError) -> Failure {
    match e {
        MappingError::BudgetExceeded(partial) => Failure {
            code: EXIT_BUDGET,
            message: MappingError::BudgetExceeded(partial).to_string(),
        },
        other => Failure::usage(other),
    }
}

fn cmd_mappings(ctx: &Context, action: MappingsAction, stderr: &mut dyn Write) -> Result<Outcome, Failure> {
    match action {
        MappingsAction::Count { n, budget, output } => {
            if n % 2 == 0 {
                let _ = writeln!(stderr, "note: Z/{n} has even order, so it has no complete mappings");
            }
            let config = EnumerationConfig {
                witness_cap: if output.is_some() { usize::MAX } else { 0 },
                node_budget: budget,
                workers: ctx.workers,
            };
            let census = enumerate_with(n, &config).map_err(mapping_failure)?;
            if let Some(path) = output {
                write_file(&path, &census.to_text())?;
            }
            let text = if ctx.structured() {
                DocWriter::new("mapping-count")
                    .field("modulus", census.modulus)
                    .field("count", census.count)
                    .field("nodes", census.nodes)
                    .finish()
            } else {
                format!("{}\n", census.count)
            };
            Ok(Outcome::ok(text))
        }
        MappingsAction::Enumerate {
            n,
            limit,
            budget,
            output,
        } => {
            if n % 2 == 0 {
                let _ = writeln!(stderr, "note: Z/{n} has even order, so it has no complete mappings");
            }
            let config = EnumerationConfig {
                witness_cap: limit.unwrap_or(usize::MAX),
                node_budget: budget,
                workers: ctx.workers,
            };
            let census = enumerate_with(n, &config).map_err(mapping_failure)?;
            if let Some(path) = output {
                write_file(&path, &census.to_text())?;
            }
            let text = if ctx.structured() {
                census.to_text()
            } else {
                let mut s = format!("{} complete mappings of Z/{}\n", census.count, census.modulus);
                for m in &census.samples {
                    let _ = writeln!(s, "{}", join(m.images()));
                }
                if !census.has_all_witnesses() {
                    let _ = writeln!(s, "({} listed)", census.samples.len());
                }
                s
            };
            Ok(Outcome::ok(text))
        }
        MappingsAction::Check { images } => {
            let p = Permutation::new(images).map_err(Failure::usage)?;
            let complete = is_complete_mapping(&p);
            let diffs = difference_sequence(&p);
            let text = if ctx.structured() {
                DocWriter::new("mapping-check")
                    .field("modulus", p.modulus())
                    .field("images", join(p.images()))
                    .field("complete", complete)
                    .field("differences", join(&diffs))
                    .finish()
            } else {
                format!("complete: {complete}\ndifferences: {}\n", join(&diffs))
            };
            Ok(Outcome::ok(text))
        }
    }
}

fn construct_matrix(args: &ConstructArgs) -> Result<(ShiftMatrix, Option<u64>), Failure> {
    let l = args.l;
    let from_h = |h: u64| -> Result<ShiftMatrix, Failure> {
        let mapping = product_mapping(h, l as u64).map_err(Failure::usage)?;
        crate::lifting::canonical_from_mapping(mapping.permutation()).map_err(Failure::usage)
    };
    match args.kind {
        ConstructKind::Product => {
            let h = match args.h {
                Some(h) => h,
                None => (2..l.max(3) as u64)
                    .find(|&h| crate::group::gcd(h, l as u64) == 1 && crate::group::gcd(h - 1, l as u64) == 1)
                    .unwrap_or(2),
            };
            Ok((from_h(h)?, Some(h)))
        }
        ConstructKind::Reversal => {
            let h = (l as u64).saturating_sub(1);
            Ok((from_h(h)?, Some(h)))
        }
        ConstructKind::Array => Ok((from_h(2)?, Some(2))),
        ConstructKind::EvenL => {
            let result = girth6_even_l(l).map_err(Failure::usage)?;
            Ok((
                result.witness().expect("construction always has a witness").clone(),
                None,
            ))
        }
    }
}

fn cmd_construct(ctx: &Context, args: ConstructArgs) -> Result<Outcome, Failure> {
    if args.kind != ConstructKind::Product && args.h.is_some() {
        return Err(Failure::usage("--h only applies to the product construction"));
    }
    let (p, h) = construct_matrix(&args)?;
    let h_matrix = lift(&p);
    let by_shifts = girth_from_shifts(&p, DEFAULT_CAP);
    let by_bfs = girth_bfs(&h_matrix, DEFAULT_CAP);
    if let Some(path) = &args.output {
        write_file(path, &p.to_text())?;
    }
    if let Some(path) = &args.alist {
        write_file(path, &export_alist(&h_matrix))?;
    }
    let agree = by_shifts.agrees_with(&by_bfs);
    let kind = ConstructKind::to_possible_value(&args.kind).expect("no skipped variants");
    let text = if ctx.structured() {
        let mut doc = DocWriter::new("construction");
        doc.field("kind", kind.get_name())
            .field("l", p.cols())
            .field("lifting-factor", p.lifting_factor())
            .field("h", h.map_or("none".to_string(), |h| h.to_string()))
            .field("girth", by_bfs.girth_label())
            .field("shortest-cycles", by_bfs.shortest_cycle_count)
            .field("methods-agree", agree)
            .field("rows", p.rows());
        for r in 0..p.rows() {
            doc.numbers(p.row(r));
        }
        doc.finish()
    } else {
        let mut s = format!("{p}\n");
        let _ = writeln!(
            s,
            "N = {}, girth {} ({} shortest cycles), shift and BFS methods {}",
            p.lifting_factor(),
            by_bfs.girth_label(),
            by_bfs.shortest_cycle_count,
            if agree { "agree" } else { "DISAGREE" }
        );
        s
    };
    Ok(Outcome {
        text,
        code: if agree { EXIT_OK } else { EXIT_VIOLATION },
    })
}

enum GirthInput {
    Shifts(ShiftMatrix),
    Alist(crate::lifting::ParityCheckMatrix),
}

fn load_girth_input(path: &Path) -> Result<GirthInput, Failure> {
    let text = read_file(path)?;
    let located = |e: &dyn std::fmt::Display| Failure::usage(format!("{}: {e}", path.display()));
    if sniff_kind(&text) == Some("shift-matrix") {
        ShiftMatrix::from_text(&text)
            .map(GirthInput::Shifts)
            .map_err(|e| located(&e))
    } else {
        import_alist(&text).map(GirthInput::Alist).map_err(|e| located(&e))
    }
}

fn render_report(ctx: &Context, label: &str, report: &GirthReport) -> String {
    if ctx.structured() {
        return report.to_text();
    }
    let witness = report.witness.as_ref().map_or("none".to_string(), |w| {
        w.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ")
    });
    format!(
        "{label}: girth {} (cap {}), {} shortest cycles, witness {witness}\n",
        report.girth_label(),
        report.cap,
        report.shortest_cycle_count
    )
}

fn cmd_girth(ctx: &Context, args: GirthArgs, stderr: &mut dyn Write) -> Result<Outcome, Failure> {
    if args.cap < 4 {
        return Err(Failure::usage("--cap must be at least 4"));
    }
    let input = load_girth_input(&args.input)?;
    let (shifts, h) = match input {
        GirthInput::Shifts(p) => {
            let h = lift(&p);
            (Some(p), h)
        }
        GirthInput::Alist(h) => (None, h),
    };
    let need_shifts = || {
        shifts
            .as_ref()
            .ok_or_else(|| Failure::usage("the shifts method needs a shift-matrix document, not an alist file"))
    };
    match args.method {
        GirthMethod::Shifts => Ok(Outcome::ok(render_report(
            ctx,
            "shifts",
            &girth_from_shifts(need_shifts()?, args.cap),
        ))),
        GirthMethod::Bfs => Ok(Outcome::ok(render_report(ctx, "bfs", &girth_bfs(&h, args.cap)))),
        GirthMethod::Both => {
            let p = need_shifts()?;
            let a = girth_from_shifts(p, args.cap);
            let b = girth_bfs(&h, args.cap);
            if !a.agrees_with(&b) {
                let _ = write!(
                    stderr,
                    "{}{}",
                    render_report(ctx, "shifts", &a),
                    render_report(ctx, "bfs", &b)
                );
                return Err(Failure {
                    code: EXIT_VIOLATION,
                    message: "girth methods disagree".into(),
                });
            }
            let text = if ctx.structured() {
                a.to_text()
            } else {
                format!("{}methods agree\n", render_report(ctx, "shifts", &a))
            };
            Ok(Outcome::ok(text))
        }
    }
}

fn search_options(ctx: &Context, budget: Option<u64>) -> SearchOptions {
    SearchOptions {
        node_budget: budget,
        workers: ctx.workers,
        ..Default::default()
    }
}

fn cmd_search(ctx: &Context, args: SearchArgs) -> Result<Outcome, Failure> {
    let result = min_lifting_factor(
        args.j,
        args.l,
        args.girth,
        args.n_max,
        &search_options(ctx, args.budget),
    )
    .map_err(Failure::usage)?;
    if let Some(w) = result.witness() {
        if let Some(path) = &args.output {
            write_file(path, &w.to_text())?;
        }
        if let Some(path) = &args.alist {
            write_file(path, &export_alist(&lift(w)))?;
        }
    }
    let text = if ctx.structured() {
        result.to_text()
    } else {
        human_search(&result)
    };
    let code = if result.exhaustive { EXIT_OK } else { EXIT_BUDGET };
    Ok(Outcome { text, code })
}

fn human_search(r: &SearchResult) -> String {
    let head = format!("J = {}, L = {}, girth >= {}: ", r.j, r.l, r.target_girth);
    let mut s = match &r.outcome {
        SearchOutcome::Found { n, witness } => format!("{head}smallest N = {n}\n{witness}\n"),
        SearchOutcome::NotFound { n_max } => format!("{head}none with N <= {n_max}\n"),
        SearchOutcome::BudgetExhausted { n } => format!("{head}budget exhausted at N = {n} (smaller N ruled out)\n"),
    };
    let _ = writeln!(s, "{} nodes in {:.3?}", r.stats.nodes, r.stats.elapsed);
    s
}

fn cmd_verify(ctx: &Context, target: VerifyTarget) -> Result<Outcome, Failure> {
    match target {
        VerifyTarget::Table1 {
            j,
            l_min,
            l_max,
            budget,
            output,
        } => verify_table1(ctx, j, l_min, l_max, budget, output),
        VerifyTarget::Theorem3 {
            lprime,
            n_max,
            budget,
            output,
        } => {
            let options = EnumerationOptions {
                node_budget: budget,
                workers: ctx.workers,
                ..Default::default()
            };
            let report = verify_theorem3(lprime, n_max, &options).map_err(Failure::usage)?;
            let doc = report.to_text();
            if let Some(path) = output {
                write_file(&path, &doc)?;
            }
            let violations = report.violation_count();
            let text = if ctx.structured() {
                doc
            } else {
                let mut s = format!(
                    "L' = {lprime}, N = {}..={n_max}, bound 3L' - 1 = {}\n",
                    report.n_min, report.bound
                );
                let _ = writeln!(
                    s,
                    "{:>4} {:>10} {:>10} {:>8} {:>6} {:>6}",
                    "N", "valid", "hypothesis", "disjoint", "case1", "case2"
                );
                for t in &report.tallies {
                    let _ = writeln!(
                        s,
                        "{:>4} {:>10} {:>10} {:>8} {:>6} {:>6}",
                        t.n, t.valid_tables, t.hypothesis_tables, t.disjoint_pairs, t.case1, t.case2
                    );
                }
                let _ = writeln!(s, "violations: {violations}");
                let _ = writeln!(
                    s,
                    "valid tables below the bound (any intersections): {}",
                    report.conjecture_counterexamples()
                );
                if !report.complete {
                    let _ = writeln!(s, "budget exhausted; later moduli not checked");
                }
                let _ = writeln!(s, "elapsed {:.3?}", report.elapsed);
                s
            };
            let code = if violations > 0 {
                EXIT_VIOLATION
            } else if !report.complete {
                EXIT_BUDGET
            } else {
                EXIT_OK
            };
            Ok(Outcome { text, code })
        }
        VerifyTarget::Conjecture {
            lprime,
            n_min,
            n_max,
            budget,
            output,
        } => verify_conjecture(ctx, lprime, n_min, n_max, budget, output),
        VerifyTarget::Pairwise9 { output } => {
            let config = EnumerationConfig {
                witness_cap: usize::MAX,
                node_budget: None,
                workers: ctx.workers,
            };
            let census = enumerate_with(9, &config).map_err(mapping_failure)?;
            let pairs = compatible_pairs(&census).map_err(Failure::usage)?;
            let mut doc = DocWriter::new("pairwise-report");
            doc.field("modulus", 9)
                .field("mappings", census.count)
                .field("compatible-pairs", pairs.len());
            for &(a, b) in &pairs {
                doc.line(format!(
                    "pair {} {}",
                    join(census.samples[a].images()),
                    join(census.samples[b].images())
                ));
            }
            let doc = doc.finish();
            if let Some(path) = output {
                write_file(&path, &doc)?;
            }
            let holds = census.count == 225 && pairs.is_empty();
            let text = if ctx.structured() {
                doc
            } else {
                format!(
                    "{} complete mappings of Z/9, {} compatible pairs\n{}\n",
                    census.count,
                    pairs.len(),
                    if pairs.is_empty() {
                        "no 4 x 9 girth-6 matrix exists at N = 9"
                    } else {
                        "compatible pairs exist"
                    }
                )
            };
            Ok(Outcome {
                text,
                code: if holds { EXIT_OK } else { EXIT_VIOLATION },
            })
        }
    }
}

fn verify_table1(
    ctx: &Context,
    j: usize,
    l_min: Option<usize>,
    l_max: usize,
    budget: Option<u64>,
    output: Option<PathBuf>,
) -> Result<Outcome, Failure> {
    if !(3..=5).contains(&j) {
        return Err(Failure::usage(format!("J = {j} is outside 3..=5")));
    }
    let l_min = l_min.unwrap_or(if j == 3 { 4 } else { j + 1 });
    if l_min > l_max || l_max > 12 || l_min < 3 {
        return Err(Failure::usage("L range must lie within 3..=12 and be nonempty"));
    }
    let mut doc = DocWriter::new("table1-report");
    doc.field("j", j).field("l-min", l_min).field("l-max", l_max);
    doc.line("columns l expected found exhaustive nodes");
    let mut human = format!(
        "J = {j}\n{:>3} {:>8} {:>6} {:>10}  status\n",
        "L", "expected", "found", "nodes"
    );
    let (mut mismatches, mut exhausted) = (0, false);
    for l in l_min..=l_max {
        let expected = table_one_entry(j, l);
        let n_max = 2 * l as u32 + 2;
        let r = min_lifting_factor(j, l, 6, n_max, &search_options(ctx, budget)).map_err(Failure::usage)?;
        let found = r.min_n();
        let status = match (r.exhaustive, expected, found) {
            (false, _, _) => {
                exhausted = true;
                "budget"
            }
            (true, Some(e), Some(f)) if e == f => "match",
            (true, None, _) => "no published value",
            _ => {
                mismatches += 1;
                "MISMATCH"
            }
        };
        let show = |v: Option<u32>| v.map_or("-".to_string(), |v| v.to_string());
        doc.numbers([
            l.to_string(),
            show(expected),
            show(found),
            r.exhaustive.to_string(),
            r.stats.nodes.to_string(),
        ]);
        let _ = writeln!(
            human,
            "{l:>3} {:>8} {:>6} {:>10}  {status}",
            show(expected),
            show(found),
            r.stats.nodes
        );
    }
    doc.field("mismatches", mismatches).field("complete", !exhausted);
    let doc = doc.finish();
    if let Some(path) = output {
        write_file(&path, &doc)?;
    }
    let code = if mismatches > 0 {
        EXIT_VIOLATION
    } else if exhausted {
        EXIT_BUDGET
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        text: if ctx.structured() { doc } else { human },
        code,
    })
}

fn verify_conjecture(
    ctx: &Context,
    lprime: usize,
    n_min: Option<u32>,
    n_max: u32,
    budget: Option<u64>,
    output: Option<PathBuf>,
) -> Result<Outcome, Failure> {
    if !(3..=5).contains(&lprime) {
        return Err(Failure::usage(format!("L' = {lprime} is outside 3..=5")));
    }
    let bound = 3 * lprime as u32 - 1;
    let n_min = n_min.unwrap_or(2 * lprime as u32 + 1).max(1);
    if n_min > n_max {
        return Err(Failure::usage("--n-min exceeds --n-max"));
    }
    let options = EnumerationOptions {
        node_budget: budget,
        workers: ctx.workers,
        ..Default::default()
    };
    let mut tallies: Vec<ModulusTally> = Vec::new();
    let mut complete = true;
    for n in n_min..=n_max {
        match tally_modulus(lprime, n, &options) {
            Some(t) => tallies.push(t),
            None => {
                complete = false;
                break;
            }
        }
    }
    let below: u64 = tallies.iter().filter(|t| t.n < bound).map(|t| t.valid_tables).sum();
    let mut doc = DocWriter::new("conjecture-scan");
    doc.field("l-prime", lprime)
        .field("n-min", n_min)
        .field("n-max", n_max)
        .field("bound", bound)
        .field("complete", complete)
        .field("valid-below-bound", below)
        .line("columns n valid outside-hypothesis");
    for t in &tallies {
        doc.numbers([t.n as u64, t.valid_tables, t.outside_hypothesis]);
    }
    let doc = doc.finish();
    if let Some(path) = output {
        write_file(&path, &doc)?;
    }
    let text = if ctx.structured() {
        doc
    } else {
        let mut s = format!("L' = {lprime}, bound 3L' - 1 = {bound}\n");
        for t in &tallies {
            let _ = writeln!(
                s,
                "N = {:>3}: {} valid tables, {} outside the intersection hypothesis",
                t.n, t.valid_tables, t.outside_hypothesis
            );
        }
        let _ = writeln!(s, "valid tables below the bound: {below}");
        s
    };
    Ok(Outcome {
        text,
        code: if complete { EXIT_OK } else { EXIT_BUDGET },
    })
}
