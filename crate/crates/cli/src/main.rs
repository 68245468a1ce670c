//! `sidki`: evaluate Gupta-Sidki elements on tree levels, re-check printed
//! computations, and explore Nielsen graphs of finite quotients.

#[cfg(test)]
mod tests;
mod verify;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use sidki::catalog::ScenarioPair;
use sidki::group::{GroupDescriptor, GroupElement, GroupError, GroupHandle};
use sidki::nielsen::{self, ExploreOptions, MoveSet, NielsenError, TupleVertex};
use sidki::syntax::{parse_element, parse_tuple, ParseError};
use sidki::tree::{
    project, Evaluator, GeneratorWord, Letter, TreeElement, TreeParams, WordConvention,
};

const DEFAULT_MAX_DEGREE: usize = 59_049;

#[derive(Parser)]
#[command(
    name = "sidki",
    version,
    about = "Gupta-Sidki group computations on finite tree levels"
)]
struct Cli {
    /// Also write each report into this directory.
    #[arg(long, global = true, env = "SIDKI_OUT_DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the level permutation of an element.
    Eval(EvalArgs),
    /// Re-run the printed computations.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
    /// Nielsen-graph experiments.
    Nielsen {
        #[command(subcommand)]
        command: NielsenCommand,
    },
    /// Level quotients G_p / St(depth).
    Quotient {
        #[command(subcommand)]
        command: QuotientCommand,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone, Copy)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Refuse levels with more than this many vertices.
    #[arg(long, default_value_t = DEFAULT_MAX_DEGREE)]
    max_degree: usize,
}

#[derive(Args)]
struct EvalArgs {
    word: String,
    #[arg(long)]
    p: u32,
    #[arg(long)]
    depth: usize,
    /// Add the cycle type to the text output.
    #[arg(long)]
    cycle_type: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum VerifySuite {
    Paper {
        /// Leave timings out so reports compare byte for byte.
        #[arg(long)]
        deterministic: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, value_enum, default_value_t = ConventionArg::LeftToRight, hide = true)]
        convention: ConventionArg,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    LeftToRight,
    RightToLeft,
}

impl From<ConventionArg> for WordConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::LeftToRight => WordConvention::LeftToRight,
            ConventionArg::RightToLeft => WordConvention::RightToLeft,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MovesArg {
    Nielsen,
    Ac,
}

#[derive(Subcommand)]
enum NielsenCommand {
    /// Component structure of the Nielsen graph, exhaustively or from seeds.
    Explore {
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = MovesArg::Nielsen)]
        moves: MovesArg,
        /// Conjugator words for AC moves, separated by ';'.
        #[arg(long)]
        conjugators: Option<String>,
        /// Element cap for enumeration.
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        #[arg(long, default_value_t = 4_000_000)]
        tuple_cap: usize,
        /// Seed tuple, entries separated by ';'. Repeat for several seeds.
        #[arg(long = "seeds", num_args = 1..)]
        seeds: Vec<String>,
        #[arg(long, default_value_t = 10_000)]
        node_cap: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        deterministic: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Commutator cycle-type certificate for two pairs.
    Certify {
        #[arg(long)]
        group: String,
        #[arg(long = "pairA")]
        pair_a: String,
        #[arg(long = "pairB")]
        pair_b: String,
        #[command(flatten)]
        common: Common,
    },
    /// First level separating (x, y z_k) from (x, y z_j), if any.
    Separation {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        j: usize,
        #[arg(long = "maxdepth")]
        max_depth: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum QuotientCommand {
    /// Order via a stabilizer chain.
    Order {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        depth: usize,
        /// Also count elements by closure, up to this many.
        #[arg(long)]
        enumerate: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Check that level images of random words project onto each other.
    ProjectCheck {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 24)]
        max_len: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
enum CliError {
    Parse(String),
    Degree { degree: u128, limit: usize },
    Cap(String),
    NonGenerating(String),
    Failed(String),
    Other(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Degree { .. } => 3,
            CliError::Cap(_) => 4,
            CliError::NonGenerating(_) => 5,
            CliError::Failed(_) | CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Degree { degree, limit } => write!(
                f,
                "level has {degree} vertices, above the limit {limit} (raise --max-degree)"
            ),
            CliError::Cap(m) => write!(f, "cap exceeded: {m}"),
            CliError::NonGenerating(m) => write!(f, "{m}"),
            CliError::Failed(m) | CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            GroupError::BadDescriptor(..) => CliError::Parse(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<NielsenError> for CliError {
    fn from(e: NielsenError) -> Self {
        match e {
            NielsenError::Group(g) => g.into(),
            NielsenError::TupleCapExceeded { .. } => CliError::Cap(e.to_string()),
            NielsenError::NonGeneratingSeed(_) => CliError::NonGenerating(e.to_string()),
            NielsenError::ArityMismatch { .. } => CliError::Parse(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

/// A finished report: the text to print and the name to store it under.
struct Output {
    name: &'static str,
    format: Format,
    body: String,
}

impl Output {
    fn render<T: Serialize>(
        name: &'static str,
        format: Format,
        value: &T,
        text: impl FnOnce() -> String,
    ) -> Self {
        let body = match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(value).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => text(),
        };
        Self { name, format, body }
    }
}

fn params(p: u32) -> Result<TreeParams, CliError> {
    TreeParams::new(p).map_err(|e| CliError::Parse(e.to_string()))
}

fn guard(p: u32, depth: usize, limit: usize) -> Result<(), CliError> {
    let degree = (p as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
    if degree > limit as u128 {
        return Err(CliError::Degree { degree, limit });
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalReport {
    word: String,
    p: u32,
    depth: usize,
    degree: usize,
    permutation: String,
    cycle_type: String,
    order: u64,
}

fn cmd_eval(a: &EvalArgs) -> Result<Output, CliError> {
    let q = params(a.p)?;
    guard(a.p, a.depth, a.common.max_degree)?;
    let e = parse_element(&a.word, q)?;
    let perm = Evaluator::new(q).evaluate(&e, a.depth);
    let ct = perm.cycle_type();
    let report = EvalReport {
        word: a.word.clone(),
        p: a.p,
        depth: a.depth,
        degree: perm.degree(),
        permutation: perm.format_cycles(),
        cycle_type: ct.to_string(),
        order: ct.element_order(),
    };
    Ok(Output::render("eval", a.common.format, &report, || {
        let mut s = format!("{}\n", report.permutation);
        if a.cycle_type {
            s.push_str(&format!("cycle type: {}\n", report.cycle_type));
        }
        s
    }))
}

fn quotient_handle(desc: &GroupDescriptor, max_degree: usize) -> Result<GroupHandle, CliError> {
    if let GroupDescriptor::Quotient { p, depth } = desc {
        params(*p)?;
        guard(*p, *depth, max_degree)?;
    }
    Ok(GroupHandle::from_descriptor(desc)?)
}

fn parse_descriptor(text: &str) -> Result<GroupDescriptor, CliError> {
    Ok(text.parse::<GroupDescriptor>()?)
}

/// `[a,b]` or `(a,b)` with integer entries, for abelian groups.
fn parse_residues(text: &str) -> Option<Vec<i64>> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .or_else(|| t.strip_prefix('(').and_then(|s| s.strip_suffix(')')))?;
    inner.split(',').map(|v| v.trim().parse().ok()).collect()
}

fn parse_group_tuple(h: &GroupHandle, text: &str) -> Result<Vec<GroupElement>, CliError> {
    match h.quotient_params() {
        Some((q, _)) => {
            let mut ev = Evaluator::new(q);
            Ok(parse_tuple(text, q)?
                .iter()
                .map(|e| h.tree_element(&mut ev, e).expect("quotient handle"))
                .collect())
        }
        None => {
            // word letters are the same for every p; 3 only fixes the grammar
            let q = TreeParams::new(3).expect("3 is prime");
            text.split(';')
                .map(|part| match parse_residues(part) {
                    Some(v) => Ok(h.residues(&v)?),
                    None => {
                        let e = parse_element(part, q)?;
                        let w = e.as_word().ok_or_else(|| {
                            CliError::Parse(format!("'{}' is not a plain word", part.trim()))
                        })?;
                        Ok(h.word_element(w))
                    }
                })
                .collect()
        }
    }
}

fn parse_words(text: &str) -> Result<Vec<GeneratorWord>, CliError> {
    let q = TreeParams::new(3).expect("3 is prime");
    text.split(';')
        .map(|part| {
            parse_element(part, q)?.as_word().cloned().ok_or_else(|| {
                CliError::Parse(format!("conjugator '{}' is not a plain word", part.trim()))
            })
        })
        .collect()
}

fn report_text(r: &nielsen::ComponentReport) -> String {
    let mut s = format!(
        "group: {}\nmoves: {}\nmode: {}\n",
        r.group,
        r.moveset,
        serde_json::to_value(r.mode).unwrap().as_str().unwrap()
    );
    if let Some(t) = r.total_vertices {
        s.push_str(&format!("generating tuples: {t}\n"));
    }
    s.push_str(&format!("components: {}\n", r.component_count));
    for (i, c) in r.components.iter().enumerate() {
        let size = c
            .size
            .map_or(format!("visited {} (incomplete)", c.visited), |n| {
                format!("size {n}")
            });
        s.push_str(&format!(
            "  [{}] {size}: ({})",
            i + 1,
            c.representative.join(", ")
        ));
        if let Some(fp) = &c.fingerprint {
            s.push_str(&format!(" fingerprint {fp}"));
        }
        if !c.seeds.is_empty() {
            let seeds: Vec<String> = c.seeds.iter().map(|i| (i + 1).to_string()).collect();
            s.push_str(&format!(" seeds {}", seeds.join(",")));
        }
        s.push('\n');
    }
    if r.caps.hit {
        s.push_str("caps: hit\n");
    }
    s.push_str(&format!(
        "verdict: {}\n",
        serde_json::to_value(r.verdict).unwrap().as_str().unwrap()
    ));
    s
}

fn cmd_nielsen(c: &NielsenCommand) -> Result<Output, CliError> {
    match c {
        NielsenCommand::Explore {
            group,
            k,
            moves,
            conjugators,
            cap,
            tuple_cap,
            seeds,
            node_cap,
            threads,
            deterministic,
            common,
        } => {
            let desc = parse_descriptor(group)?;
            let h = quotient_handle(&desc, common.max_degree)?;
            let ms = match moves {
                MovesArg::Nielsen => MoveSet::nielsen(*k),
                MovesArg::Ac => MoveSet::andrews_curtis(
                    *k,
                    conjugators.as_deref().map(parse_words).transpose()?,
                ),
            };
            let report = if seeds.is_empty() {
                let opts = ExploreOptions {
                    element_cap: *cap,
                    tuple_cap: *tuple_cap,
                    threads: if *deterministic { 1 } else { *threads },
                };
                nielsen::explore_exhaustive(&h, &ms, opts)?
            } else {
                let vertices = seeds
                    .iter()
                    .map(|s| Ok(TupleVertex::new(&h, parse_group_tuple(&h, s)?)?))
                    .collect::<Result<Vec<_>, CliError>>()?;
                nielsen::explore_seeded(&h, &vertices, &ms, *node_cap)?
            };
            Ok(Output::render(
                "nielsen-explore",
                common.format,
                &report,
                || report_text(&report),
            ))
        }
        NielsenCommand::Certify {
            group,
            pair_a,
            pair_b,
            common,
        } => {
            let desc = parse_descriptor(group)?;
            let GroupDescriptor::Quotient { p, depth } = desc else {
                return Err(CliError::Parse("certify needs a quotient group".into()));
            };
            let q = params(p)?;
            guard(p, depth, common.max_degree)?;
            let pair = |text: &str| -> Result<ScenarioPair, CliError> {
                let t = parse_tuple(text, q)?;
                let [u, v]: [TreeElement; 2] = t
                    .try_into()
                    .map_err(|_| CliError::Parse(format!("'{text}' is not a pair")))?;
                Ok(ScenarioPair::new(text.trim(), u, v))
            };
            let cert = nielsen::certify_distinct(
                &mut Evaluator::new(q),
                &pair(pair_a)?,
                &pair(pair_b)?,
                depth,
            );
            Ok(Output::render(
                "nielsen-certify",
                common.format,
                &cert,
                || {
                    format!(
                    "pair A: {}\n[u,v] = {}\ncycle type: {}\npair B: {}\n[u',v'] = {}\ncycle type: {}\nverdict: {}\n",
                    cert.pair_a,
                    cert.commutator_a,
                    cert.cycle_type_a,
                    cert.pair_b,
                    cert.commutator_b,
                    cert.cycle_type_b,
                    cert.verdict
                )
                },
            ))
        }
        NielsenCommand::Separation {
            p,
            k,
            j,
            max_depth,
            common,
        } => {
            let q = params(*p)?;
            guard(*p, *max_depth, common.max_degree)?;
            let pair = |n| ScenarioPair::with_z(n, q).map_err(|e| CliError::Parse(e.to_string()));
            let r = nielsen::separation_depth(
                &mut Evaluator::new(q),
                &pair(*k)?,
                &pair(*j)?,
                *max_depth,
            );
            Ok(Output::render(
                "nielsen-separation",
                common.format,
                &r,
                || {
                    let mut s = format!("{} vs {}, p = {}\n", r.pair_a, r.pair_b, r.p);
                    for o in &r.observations {
                        s.push_str(&format!(
                            "  depth {}: {} | {}{}\n",
                            o.depth,
                            o.fingerprint_a,
                            o.fingerprint_b,
                            if o.differ { "  differ" } else { "" }
                        ));
                    }
                    match r.separated_at {
                        Some(d) => s.push_str(&format!("separated at depth {d}\n")),
                        None => s.push_str(&format!("not separated up to depth {}\n", r.max_depth)),
                    }
                    s
                },
            ))
        }
    }
}

#[derive(Serialize)]
struct OrderReport {
    p: u32,
    depth: usize,
    order: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    enumerated: Option<usize>,
}

#[derive(Serialize)]
struct ProjectReport {
    p: u32,
    depth: usize,
    samples: usize,
    seed: u64,
    compatible: usize,
    failures: Vec<String>,
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> GeneratorWord {
    let len = rng.gen_range(0..=max_len);
    GeneratorWord::new((0..len).map(|_| Letter::ALL[rng.gen_range(0..4)]))
}

fn cmd_quotient(c: &QuotientCommand) -> Result<Output, CliError> {
    match c {
        QuotientCommand::Order {
            p,
            depth,
            enumerate,
            common,
        } => {
            let q = params(*p)?;
            guard(*p, *depth, common.max_degree)?;
            let h = GroupHandle::quotient(q, *depth);
            let enumerated = enumerate
                .map(|cap| h.enumerate(cap).map(|e| e.len()))
                .transpose()?;
            let r = OrderReport {
                p: *p,
                depth: *depth,
                order: h.order().to_string(),
                enumerated,
            };
            Ok(Output::render("quotient-order", common.format, &r, || {
                let mut s = format!("{}\n", r.order);
                if let Some(n) = r.enumerated {
                    s.push_str(&format!("enumerated: {n}\n"));
                }
                s
            }))
        }
        QuotientCommand::ProjectCheck {
            p,
            depth,
            samples,
            seed,
            max_len,
            common,
        } => {
            if *depth == 0 {
                return Err(CliError::Parse("depth must be at least 1".into()));
            }
            let q = params(*p)?;
            guard(*p, *depth, common.max_degree)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut ev = Evaluator::new(q);
            let mut failures = Vec::new();
            for _ in 0..*samples {
                let w = random_word(&mut rng, *max_len);
                let ok = (1..=*depth).all(|d| {
                    let upper = ev.evaluate_word(&w, d);
                    project(&upper, q, d - 1)
                        .is_ok_and(|lower| lower == ev.evaluate_word(&w, d - 1))
                });
                if !ok {
                    failures.push(w.to_string());
                }
            }
            let r = ProjectReport {
                p: *p,
                depth: *depth,
                samples: *samples,
                seed: *seed,
                compatible: samples - failures.len(),
                failures,
            };
            let out = Output::render("quotient-project-check", common.format, &r, || {
                let mut s = format!("compatible: {}/{}\n", r.compatible, r.samples);
                for f in &r.failures {
                    s.push_str(&format!("  incompatible: {f}\n"));
                }
                s
            });
            if r.failures.is_empty() {
                Ok(out)
            } else {
                print!("{}", out.body);
                Err(CliError::Failed(format!(
                    "{} incompatible words",
                    r.failures.len()
                )))
            }
        }
    }
}

fn run(cli: &Cli) -> Result<(Output, bool), CliError> {
    match &cli.command {
        Command::Eval(a) => cmd_eval(a).map(|o| (o, true)),
        Command::Verify {
            suite:
                VerifySuite::Paper {
                    deterministic,
                    format,
                    convention,
                },
        } => {
            let report = verify::run_paper_suite((*convention).into(), *deterministic);
            let ok = report.failed == 0;
            Ok((
                Output::render("verify-paper", *format, &report, || report.to_text()),
                ok,
            ))
        }
        Command::Nielsen { command } => cmd_nielsen(command).map(|o| (o, true)),
        Command::Quotient { command } => cmd_quotient(command).map(|o| (o, true)),
    }
}

fn write_report(dir: &PathBuf, out: &Output) -> Result<(), CliError> {
    let ext = match out.format {
        Format::Text => "txt",
        Format::Json => "json",
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Other(format!("{}: {e}", dir.display())))?;
    let path = dir.join(format!("{}.{ext}", out.name));
    std::fs::write(&path, &out.body)
        .map_err(|e| CliError::Other(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(out, ok)| {
        print!("{}", out.body);
        if let Some(dir) = &cli.out_dir {
            write_report(dir, &out)?;
        }
        if ok {
            Ok(())
        } else {
            Err(CliError::Failed("verification failed".into()))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sidki: {e}");
            ExitCode::from(e.code())
        }
    }
}
