//! Command-line front end: clone sections, clone-algebra laws, centrality
//! and decomposition, congruence lattices, equation derivability, and the
//! independence test, all driven from algebra files.
//!
//! Exit status is 0 when the command ran and every checked property held,
//! 1 when a checked property failed (a law violation, a non-central element,
//! a non-derivable equation, a missing witness, a non-minimal section), and
//! 2 on usage or input errors. Output is deterministic: stdout and every
//! JSON or DOT artifact are byte-identical across runs with equal inputs.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use blockalg::{
    central_range, check_axioms, check_n_central, clone_close, clv_block_algebra,
    congruence_enumerate, decompose, equation_derivable, is_minimal_bounded, materialize,
    parse_algebra, product_minimality_check, rep_iso_check, term_block, term_clone, Block,
    BlockAlgebra, CheckMode, CloneAlgebra, ClonePresentation, Congruence, CongruenceLattice,
    Error, FinAlgebra, MinimalityVerdict, Term, DEFAULT_SIZE_GUARD,
};

#[derive(Parser)]
#[command(
    name = "blockalg",
    version,
    about = "Clone calculus over finite base sets",
    after_help = "Exit status: 0 success, 1 checked property failed, 2 usage or input error.\n\
                  BLOCKALG_WORKERS limits the worker threads used by exhaustive sweeps."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Close a generator set under composition and list the section
    Close(CloseArgs),
    /// Partition the basic operations into similarity blocks
    Blocks(BlocksArgs),
    /// Check the clone-algebra laws on a block section
    Axioms(AxiomsArgs),
    /// Dimension of a term's block in the clone of an algebra
    Dim(DimArgs),
    /// Check that an element is n-central, or list its central widths
    Central(CentralArgs),
    /// Factor an algebra along an n-central element
    Decompose(DecomposeArgs),
    /// Enumerate the congruence lattice, optionally as a DOT drawing
    Congruences(CongruencesArgs),
    /// Decide whether an equation follows from axioms over a base algebra
    Derive(DeriveArgs),
    /// Summarize the pointed block section of a base algebra
    Clv(ClvArgs),
    /// Check that the section embeds as its own representable functions
    Repiso(RepisoArgs),
    /// Search an independence witness term and check product minimality
    Independence(IndependenceArgs),
    /// Ground-reachability minimality of a section, to a depth bound
    Minimal(MinimalArgs),
}

#[derive(Args)]
struct CloseArgs {
    /// Algebra file
    file: PathBuf,
    /// Arity cap of the section
    #[arg(long)]
    cap: usize,
    /// Comma-separated generator names (default: every basic operation)
    #[arg(long, value_delimiter = ',')]
    generators: Option<Vec<String>>,
    /// Write the listing as a JSON artifact
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BlocksArgs {
    file: PathBuf,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct AxiomsArgs {
    file: PathBuf,
    /// Arity cap of the section the laws are checked on
    #[arg(long)]
    cap: usize,
    /// Largest substitution width to instantiate (default: the cap)
    #[arg(long)]
    width: Option<usize>,
    /// Quantify only over blocks of arity at most this bound
    #[arg(long)]
    domain_arity: Option<usize>,
    /// Check this many random instances per law instead of all of them
    #[arg(long)]
    samples: Option<usize>,
    /// RNG seed; required together with --samples
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct DimArgs {
    file: PathBuf,
    /// Term over v1..v{cap} in prefix notation, e.g. "(and v1 v2)"
    term: String,
    #[arg(long)]
    cap: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CentralArgs {
    /// Algebra file with selection operations q{n} and e1..e{n}
    file: PathBuf,
    /// Element symbol
    element: String,
    /// Width to check
    #[arg(long, conflicts_with = "range")]
    n: Option<usize>,
    /// List every width at which the element is central
    #[arg(long)]
    range: bool,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Algebra file with selection operations q{n} and e1..e{n}
    file: PathBuf,
    /// Element symbol of the central element
    element: String,
    /// Width of the factorization
    #[arg(long)]
    n: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CongruencesArgs {
    file: PathBuf,
    /// Enumerate on the pointed block section at this cap instead of on the
    /// file's algebra itself
    #[arg(long)]
    section: Option<usize>,
    /// Carrier-size guard for the enumeration
    #[arg(long, default_value_t = DEFAULT_SIZE_GUARD)]
    guard: usize,
    /// Write the lattice as a DOT digraph (edges are covering pairs)
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct DeriveArgs {
    file: PathBuf,
    /// Left side of the queried equation, prefix notation
    lhs: String,
    /// Right side of the queried equation, prefix notation
    rhs: String,
    /// Variables range over v1..v{cap}
    #[arg(long)]
    cap: usize,
    /// Axiom equation "lhs = rhs"; repeatable
    #[arg(long = "axiom")]
    axioms: Vec<String>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ClvArgs {
    file: PathBuf,
    #[arg(long)]
    cap: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct RepisoArgs {
    file: PathBuf,
    #[arg(long)]
    cap: usize,
    /// Largest substitution width to check (default: the cap)
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct IndependenceArgs {
    /// First algebra file
    first: PathBuf,
    /// Second algebra file over the same signature
    second: PathBuf,
    /// Largest term depth searched
    #[arg(long)]
    depth: usize,
    /// Arity cap of the product section checked for minimality
    #[arg(long, default_value_t = 2)]
    cap: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct MinimalArgs {
    file: PathBuf,
    #[arg(long)]
    cap: usize,
    /// Ground-term depth bound
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

/// A command failure: what to print and which status to exit with.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            // a verdict, not a usage problem: the checked property fails
            Error::NotCentral { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = init_workers() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// BLOCKALG_WORKERS caps the global worker pool used by exhaustive sweeps.
fn init_workers() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("BLOCKALG_WORKERS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .map_err(|_| usage(format!("BLOCKALG_WORKERS must be a number, got {raw:?}")))?;
    if n == 0 {
        return Err(usage("BLOCKALG_WORKERS must be positive"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(e.to_string()))
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Close(a) => cmd_close(a),
        Command::Blocks(a) => cmd_blocks(a),
        Command::Axioms(a) => cmd_axioms(a),
        Command::Dim(a) => cmd_dim(a),
        Command::Central(a) => cmd_central(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Congruences(a) => cmd_congruences(a),
        Command::Derive(a) => cmd_derive(a),
        Command::Clv(a) => cmd_clv(a),
        Command::Repiso(a) => cmd_repiso(a),
        Command::Independence(a) => cmd_independence(a),
        Command::Minimal(a) => cmd_minimal(a),
    }
}

/// Writes an artifact atomically: a temp file in the target directory is
/// filled and then renamed over the destination.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| Failure::from(e.error))?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}


fn parse_term(text: &str) -> Result<Term, Failure> {
    Term::parse(text).map_err(Failure::from)
}

fn section_handle(alg: &FinAlgebra, cap: usize) -> Result<BlockAlgebra, Failure> {
    Ok(BlockAlgebra::new(term_clone(alg, cap)?)?)
}

fn cmd_close(a: CloseArgs) -> CmdResult {
    let alg = parse_algebra(&a.file)?;
    let pres = match a.generators {
        Some(names) => ClonePresentation::new(alg, names, vec![], a.cap)?,
        None => ClonePresentation::of_algebra(alg, a.cap)?,
    };
    let section = clone_close(&pres)?;
    let ops = section.operations();
    println!(
        "section over {}: cap {}, {} operations in {} blocks",
        section.universe(),
        section.cap(),
        ops.len(),
        section.len()
    );
    for op in &ops {
        println!("  {op}");
    }
    if let Some(path) = &a.json {
        let report = json!({
            "universe": section.universe().to_string(),
            "cap": section.cap(),
            "operations": ops.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            "blocks": section.members().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        });
        write_json(path, &report)?;
    }
    Ok(0)
}

fn cmd_blocks(a: BlocksArgs) -> CmdResult {
    let alg = parse_algebra(&a.file)?;
    let mut groups: BTreeMap<Block, Vec<String>> = BTreeMap::new();
    for (name, op) in alg.ops() {
        groups
            .entry(Block::canonicalize(op))
            .or_default()
            .push(name.to_string());
    }
    println!(
        "{} operations in {} similarity blocks",
        alg.op_count(),
        groups.len()
    );
    for (block, names) in &groups {
        println!("  {block}: {}", names.join(" "));
    }
    if let Some(path) = &a.json {
        let report = json!({
            "universe": alg.universe().to_string(),
            "blocks": groups
                .iter()
                .map(|(b, names)| json!({ "block": b.to_string(), "operations": names }))
                .collect::<Vec<_>>(),
        });
        write_json(path, &report)?;
    }
    Ok(0)
}

fn cmd_axioms(a: AxiomsArgs) -> CmdResult {
    let alg = parse_algebra(&a.file)?;
    let handle = section_handle(&alg, a.cap)?;
    let width = a.width.unwrap_or(a.cap);
    let mode = match a.samples {
        None => CheckMode::Exhaustive { max_n: width },
        Some(per_law) => CheckMode::Sampled {
            max_n: width,
            per_law,
            seed: a.seed.ok_or_else(|| usage("--seed is required with --samples"))?,
        },
    };
    let domain = match a.domain_arity {
        Some(bound) => handle.section().members_with_arity_at_most(bound),
        None => handle.section().members().to_vec(),
    };
    let report = check_axioms(&handle, &domain, &mode)?;
    println!(
        "{} | domain {} | widths up to {} | {}",
        report.handle, report.domain_size, report.max_width, report.mode
    );
    for law in &report.laws {
        println!(
            "  {}: {} instances, {} violations",
            law.law, law.instances, law.violations
        );
    }
    for v in &report.violations {
        println!("  ! {}: {}", v.law, v.detail);
    }
    println!(
        "{}: {} instances checked",
        if report.passed() { "passed" } else { "FAILED" },
        report.total_instances()
    );
    if let Some(path) = &a.json {
        write_json(path, &serde_json::to_value(&report).expect("reports serialize"))?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_dim(a: DimArgs) -> CmdResult {
    let alg = parse_algebra(&a.file)?;
    let term = parse_term(&a.term)?;
    let block = term_block(&alg, &term, a.cap)?;
    println!("term {term}: block {block}, dimension {}", block.arity());
    if let Some(path) = &a.json {
        let report = json!({
            "term": term.to_string(),
            "block": block.to_string(),
            "dimension": block.arity(),
        });
        write_json(path, &report)?;
    }
    Ok(0)
}

fn cmd_central(a: CentralArgs) -> CmdResult {
    let alg = parse_algebra(&a.file)?;
    let elem = alg.universe().index_of(&a.element)?;
    if let Some(n) = a.n {
        let report = check_n_central(&alg, elem, n)?;
        let route = format!("{:?}", report.route).to_lowercase();
        if report.central {
            println!(
                "element {} is {}-central ({} route, {} instances)",
                a.element, n, route, report.instances
            );
        } else {
            println!(
                "element {} is not {}-central: {}",
                a.element,
                n,
                report.witness.as_deref().unwrap_or("no witness recorded")
            );
        }
        if let Some(path) = &a.json {
            write_json(path, &serde_json::to_value(&report).expect("reports serialize"))?;
        }
        return Ok(if report.central { 0 } else { 1 });
    }
    if !a.range {
        return Err(usage("pass --n <width> or --range"));
    }
    let widths = central_range(&alg, elem)?;
    if widths.is_empty() {
        println!("element {} is central at no width", a.element);
    } else {
        let list: Vec<String> = widths.iter().map(ToString::to_string).collect();
        println!("element {} is central at widths {}", a.element, list.join(" "));
    }
    if let Some(path) = &a.json {
        let report = json!({ "element": a.element, "widths": widths });
        write_json(path, &report)?;
    }
    Ok(0)
}

fn cmd_decompose(a: DecomposeArgs) -> CmdResult {
    let alg = parse_algebra(&a.file)?;
    let elem = alg.universe().index_of(&a.element)?;
    let dec = decompose(&alg, elem, a.n)?;
    let sizes: Vec<String> = dec.factor_sizes().iter().map(ToString::to_string).collect();
    println!(
        "element {} splits {} into {} factors of sizes [{}]",
        a.element,
        alg.universe(),
        dec.factors.len(),
        sizes.join(", ")
    );
    for (i, th) in dec.congruences.iter().enumerate() {
        println!("  factor {}: {}", i + 1, partition_label(th));
    }
    if let Some(path) = &a.json {
        let report = json!({
            "element": a.element,
            "n": a.n,
            "factor_sizes": dec.factor_sizes(),
            "congruences": dec
                .congruences
                .iter()
                .map(|th| json!(th.classes()))
                .collect::<Vec<_>>(),
            "factors": dec
                .factors
                .iter()
                .map(|f| serde_json::to_value(blockalg::AlgebraFile::from_algebra(f)).expect("reports serialize"))
                .collect::<Vec<_>>(),
        });
        write_json(path, &report)?;
    }
    Ok(0)
}

/// Classes of a congruence in canonical order, bar-separated:
/// `0,1|2` relates 0 to 1 and isolates 2.
fn partition_label(th: &Congruence) -> String {
    th.classes()
        .iter()
        .map(|class| {
            class
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("|")
}

/// DOT digraph of a congruence lattice: one node per congruence in canonical
/// order, one edge per covering pair, bottom-to-top layout.
fn emit_dot(lat: &CongruenceLattice) -> String {
    let mut out = String::from("digraph congruences {\n  rankdir=BT;\n  node [shape=box];\n");
    for (i, th) in lat.iter().enumerate() {
        out.push_str(&format!("  n{i} [label=\"{}\"];\n", partition_label(th)));
    }
    for (lo, hi) in lat.covers() {
        out.push_str(&format!("  n{lo} -> n{hi};\n"));
    }
    out.push_str("}\n");
    out
}

fn cmd_congruences(a: CongruencesArgs) -> CmdResult {
    let base = parse_algebra(&a.file)?;
    let alg = match a.section {
        Some(cap) => materialize(&clv_block_algebra(&base, cap)?)?.0,
        None => base,
    };
    let lat = congruence_enumerate(&alg, a.guard)?;
    println!("{} congruences on {} elements", lat.len(), lat.carrier_size());
    for th in lat.iter() {
        println!("  {}", partition_label(th));
    }
    if let Some(path) = &a.dot {
        write_atomic(path, emit_dot(&lat).as_bytes())?;
    }
    if let Some(path) = &a.json {
        let report = json!({
            "carrier": lat.carrier_size(),
            "count": lat.len(),
            "congruences": lat.iter().map(partition_label).collect::<Vec<_>>(),
            "covers": lat.covers(),
        });
        write_json(path, &report)?;
    }
    Ok(0)
}

fn cmd_derive(a: DeriveArgs) -> CmdResult {
    let alg = parse_algebra(&a.file)?;
    let lhs = parse_term(&a.lhs)?;
    let rhs = parse_term(&a.rhs)?;
    let mut axioms = Vec::with_capacity(a.axioms.len());
    for raw in &a.axioms {
        let (l, r) = raw
            .split_once('=')
            .ok_or_else(|| usage(format!("axiom {raw:?} is not of the form \"lhs = rhs\"")))?;
        axioms.push((parse_term(l.trim())?, parse_term(r.trim())?));
    }
    let derivable = equation_derivable(&alg, a.cap, &axioms, &lhs, &rhs)?;
    println!(
        "{lhs} = {rhs} is {} from {} axioms over {}",
        if derivable { "derivable" } else { "not derivable" },
        axioms.len(),
        alg.universe()
    );
    if let Some(path) = &a.json {
        let report = json!({
            "lhs": lhs.to_string(),
            "rhs": rhs.to_string(),
            "axioms": a.axioms,
            "cap": a.cap,
            "derivable": derivable,
        });
        write_json(path, &report)?;
    }
    Ok(if derivable { 0 } else { 1 })
}

fn cmd_clv(a: ClvArgs) -> CmdResult {
    let alg = parse_algebra(&a.file)?;
    let clv = clv_block_algebra(&alg, a.cap)?;
    println!("{}", clv.describe());
    println!("operation constants: {}", clv.constants().len());
    for c in clv.constants() {
        println!("  {}/{} -> {}", c.name, c.arity, c.value);
    }
    if let Some(path) = &a.json {
        let report = json!({
            "describe": clv.describe(),
            "cap": a.cap,
            "constants": clv
                .constants()
                .iter()
                .map(|c| json!({
                    "name": c.name,
                    "arity": c.arity,
                    "value": c.value.to_string(),
                }))
                .collect::<Vec<_>>(),
        });
        write_json(path, &report)?;
    }
    Ok(0)
}

fn cmd_repiso(a: RepisoArgs) -> CmdResult {
    let alg = parse_algebra(&a.file)?;
    let handle = section_handle(&alg, a.cap)?;
    let report = rep_iso_check(&handle, a.width.unwrap_or(a.cap))?;
    println!("{report}");
    if let Some(path) = &a.json {
        write_json(path, &serde_json::to_value(&report).expect("reports serialize"))?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_independence(a: IndependenceArgs) -> CmdResult {
    let first = parse_algebra(&a.first)?;
    let second = parse_algebra(&a.second)?;
    let report = product_minimality_check(&first, &second, a.depth, a.cap)?;
    match &report.witness {
        Some(w) => println!("witness: {w}"),
        None => println!("no witness found to depth {}", a.depth),
    }
    let verdict = match &report.minimality.verdict {
        MinimalityVerdict::Minimal => "minimal".to_string(),
        MinimalityVerdict::NotMinimal { missing } => {
            format!("not minimal (missing {missing})")
        }
        MinimalityVerdict::Undecided { missing } => {
            format!("undecided (missing {missing} at the depth bound)")
        }
    };
    println!(
        "product section: {} ({} of {} blocks reached at depth {})",
        verdict, report.minimality.reached, report.minimality.section, report.minimality.depth
    );
    if report.agree {
        println!("verdicts agree");
    } else {
        println!("DEFECT: witness existence disagrees with product minimality");
    }
    if let Some(path) = &a.json {
        write_json(path, &serde_json::to_value(&report).expect("reports serialize"))?;
    }
    Ok(if report.agree && report.witness.is_some() { 0 } else { 1 })
}

fn cmd_minimal(a: MinimalArgs) -> CmdResult {
    let alg = parse_algebra(&a.file)?;
    let handle = section_handle(&alg, a.cap)?;
    let report = is_minimal_bounded(&handle, a.depth)?;
    let (verdict, code) = match &report.verdict {
        MinimalityVerdict::Minimal => ("minimal".to_string(), 0),
        MinimalityVerdict::NotMinimal { missing } => {
            (format!("not minimal (missing {missing})"), 1)
        }
        MinimalityVerdict::Undecided { missing } => (
            format!("undecided (missing {missing} at the depth bound)"),
            1,
        ),
    };
    println!(
        "section is {}: {} of {} blocks reached at depth {}{}",
        verdict,
        report.reached,
        report.section,
        report.depth,
        if report.stabilized { ", stabilized" } else { "" }
    );
    if let Some(path) = &a.json {
        write_json(path, &serde_json::to_value(&report).expect("reports serialize"))?;
    }
    Ok(code)
}
