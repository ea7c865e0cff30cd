use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use embedlab::classifier::{census, consistency_verdict, fingerprint, DEFAULT_W, DEFAULT_WINDOW};
use embedlab::forcing::{disjoint_agreement_scan, finiteness_probe, trichotomy_scan, ForcingContext};
use embedlab::generate::{generate, CanonicalSpec, Family, Policy};
use embedlab::ops::formula::Sigma2Sentence;
use embedlab::{run, BudgetSchedule, Error, Fact, FiniteDiagram, Result, RunLog, Signature, StructureStream};

use crate::registry::{self, Context};
use crate::suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SIGNATURE: i32 = 3;
pub const EXIT_SUITE: i32 = 4;

const OPERATOR_HELP: &str = "\
Operator expressions:
  expr  := term ('|' stage)*
  term  := concat(expr,expr) | union(expr,expr) | rev(expr) | atom
  stage := fill:left | fill:right | rev | atom      (a|b feeds a into b)
  atoms: replicate:Q  ord2eq  eq2ord_v1  eq2ord_v2  class_multiplier
         formula2eq[:SEED]  pair_formula2eq  endpoint_pipeline  axioms:FILE
  constructions (alone only): phi_pair  phi_sigma2
Sentences for formula2eq, pair_formula2eq and phi_sigma2 come from --phi/--psi
and default to \"there is a least element\" / \"there is a greatest element\".

Exit codes: 0 success, 2 usage or spec error, 3 signature mismatch, 4 suite failure.";

#[derive(Parser, Debug)]
#[command(name = "embedlab", version, about = "Computable embeddings between linear orders and equivalence structures", after_help = OPERATOR_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a canonical presentation as a stream file.
    Gen(GenArgs),
    /// Run an operator or construction on a stream, writing a JSONL log.
    Run(RunArgs),
    /// Bounded forcing verdicts and scans.
    Force(ForceArgs),
    /// Census, fingerprint and consistency verdict for a run log.
    Classify(ClassifyArgs),
    /// Run the acceptance suite.
    Suite(SuiteArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// omega, omega_star, omega_k, omega_star_k, one_plus_eta, eta_plus_one, eta, e, e_k, e_hat_k
    #[arg(long)]
    pub family: String,
    /// Parameter of the `_k` families.
    #[arg(long)]
    pub k: Option<u32>,
    /// fair, ascending, descending or permuted:SEED
    #[arg(long, default_value = "fair")]
    pub policy: String,
    #[arg(long)]
    pub stages: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Stream file.
    #[arg(long = "in", conflicts_with = "spec")]
    pub input: Option<PathBuf>,
    /// Canonical input as family/policy/stages, e.g. omega_k:2/fair/200.
    #[arg(long)]
    pub spec: Option<String>,
}

#[derive(Args, Debug)]
pub struct SentenceArgs {
    #[arg(long)]
    pub phi: Option<PathBuf>,
    #[arg(long)]
    pub psi: Option<PathBuf>,
    /// Target stream files for phi_pair.
    #[arg(long)]
    pub target_a: Option<PathBuf>,
    #[arg(long)]
    pub target_b: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long)]
    pub op: String,
    #[command(flatten)]
    pub input: InputArgs,
    /// Defaults to every stage of the input.
    #[arg(long)]
    pub stages: Option<usize>,
    /// linear, sqrt, scale:A, const:C or table:B0,B1,...
    #[arg(long, default_value = "linear")]
    pub schedule: String,
    /// Defaults to stdout.
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[command(flatten)]
    pub sentences: SentenceArgs,
}

#[derive(Args, Debug)]
pub struct ForceArgs {
    #[arg(long)]
    pub op: String,
    /// Diagram file for the finite input.
    #[arg(long, required_unless_present = "scan")]
    pub alpha: Option<PathBuf>,
    /// Atom such as "lt 1 4".
    #[arg(long, required_unless_present = "scan")]
    pub atom: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub ext: usize,
    #[arg(long, default_value_t = 32)]
    pub budget: u64,
    /// trichotomy, agreement or finiteness instead of a single verdict.
    #[arg(long)]
    pub scan: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub max_alpha: usize,
    #[command(flatten)]
    pub sentences: SentenceArgs,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub log: PathBuf,
    /// Claimed family, e.g. omega_k:3 or e_hat_k:1.
    #[arg(long)]
    pub claim: Option<String>,
    #[arg(long = "W", default_value_t = DEFAULT_W)]
    pub w: usize,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    /// Run every criterion (the default).
    #[arg(long)]
    pub all: bool,
    /// Comma-separated criterion numbers.
    #[arg(long, value_delimiter = ',', conflicts_with = "all")]
    pub only: Vec<u32>,
    /// Overridden by EMBEDLAB_SEED.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Directory for suite.jsonl and suite.txt.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SignatureMismatch { .. } => EXIT_SIGNATURE,
        _ => EXIT_USAGE,
    }
}

/// Writes through a temporary file in the same directory.
fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_input(args: &InputArgs) -> Result<StructureStream> {
    match (&args.input, &args.spec) {
        (Some(p), _) => StructureStream::parse_text(&read(p)?),
        (None, Some(spec)) => generate(&spec.parse::<CanonicalSpec>()?),
        (None, None) => Err(Error::InvalidSpec("give --in FILE or --spec family/policy/stages".into())),
    }
}

fn context(s: &SentenceArgs, stages: usize) -> Result<Context> {
    let sentence = |p: &Option<PathBuf>| -> Result<Option<Sigma2Sentence>> {
        p.as_ref().map(|p| Sigma2Sentence::parse(&read(p)?)).transpose()
    };
    let target = |p: &Option<PathBuf>| -> Result<Option<StructureStream>> {
        p.as_ref().map(|p| StructureStream::parse_text(&read(p)?)).transpose()
    };
    Ok(Context {
        phi: sentence(&s.phi)?,
        psi: sentence(&s.psi)?,
        target_a: target(&s.target_a)?,
        target_b: target(&s.target_b)?,
        stages,
    })
}

pub fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Force(a) => cmd_force(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Suite(a) => cmd_suite(a),
    }
}

fn cmd_gen(a: GenArgs) -> Result<i32> {
    let family: Family = match a.k {
        Some(k) => format!("{}:{k}", a.family).parse()?,
        None => a.family.parse()?,
    };
    let policy: Policy = a.policy.parse()?;
    let stream = generate(&CanonicalSpec::new(family, policy, a.stages))?;
    emit(a.out.as_deref(), &stream.to_text())?;
    if let Some(out) = &a.out {
        let size = stream.last().map_or(0, |d| d.size());
        eprintln!(
            "{}: {} stages, {} elements, {} -> {}",
            stream.provenance(),
            stream.len(),
            size,
            stream.signature(),
            out.display()
        );
    }
    Ok(EXIT_OK)
}

fn cmd_run(a: RunArgs) -> Result<i32> {
    let input = load_input(&a.input)?;
    let stages = a.stages.unwrap_or(input.len());
    let ctx = context(&a.sentences, stages)?;
    let target = registry::parse(&a.op, &ctx)?;
    let schedule: BudgetSchedule = a.schedule.parse()?;
    let log = run(&target, &input, stages, &schedule)?;
    emit(a.log.as_deref(), &log.to_jsonl()?)?;
    if let Some(p) = &a.log {
        eprintln!("{} on {}: {} records -> {}", log.operator, log.input, log.len(), p.display());
    }
    Ok(EXIT_OK)
}

fn cmd_force(a: ForceArgs) -> Result<i32> {
    let ctx = context(&a.sentences, 0)?;
    let record = match a.scan.as_deref() {
        None => {
            let op = registry::parse_operator(&a.op, &ctx)?;
            let alpha_path = a.alpha.as_ref().expect("clap requires --alpha");
            let alpha = FiniteDiagram::parse_text(&read(alpha_path)?, Some(Signature::LinearOrder))?;
            let atom: Fact = a.atom.as_deref().expect("clap requires --atom").parse().map_err(Error::InvalidSpec)?;
            let fc = ForcingContext::new(op.as_ref(), &alpha, a.ext, a.budget)?;
            let outcome = fc.verdict(&atom)?;
            eprintln!("{} {atom}: {outcome}", op.name());
            json!({"v": 1, "kind": "force", "op": op.name(), "atom": atom.to_string(), "ext": a.ext,
                   "budget": a.budget, "extensions_checked": fc.extensions_checked(), "verdict": outcome})
        }
        Some("trichotomy") => {
            let op = registry::parse_operator(&a.op, &ctx)?;
            let r = trichotomy_scan(op.as_ref(), a.max_alpha, a.ext, a.budget)?;
            eprintln!("{}: {} violations, {} unstable", r.operator, r.violations.len(), r.unstable.len());
            json!({"v": 1, "kind": "trichotomy", "report": r})
        }
        Some("agreement") => {
            let op = registry::parse_operator(&a.op, &ctx)?;
            let r = disjoint_agreement_scan(op.as_ref(), a.max_alpha, a.ext, a.budget)?;
            eprintln!(
                "{}: {} pairs, {} sharing outputs, {} violations",
                r.operator,
                r.pairs_checked,
                r.pairs_sharing_outputs,
                r.violations.len()
            );
            json!({"v": 1, "kind": "agreement", "vacuous": r.vacuous(), "report": r})
        }
        Some("finiteness") => {
            let target = registry::parse(&a.op, &ctx)?;
            let alpha = match &a.alpha {
                Some(p) => FiniteDiagram::parse_text(&read(p)?, Some(Signature::LinearOrder))?,
                None => FiniteDiagram::chain(&(0..a.max_alpha as u64).collect::<Vec<_>>()),
            };
            let r = finiteness_probe(&target, &alpha, a.budget)?;
            eprintln!("{}: final size {}, stable {}", target.name(), r.final_size, r.stable);
            json!({"v": 1, "kind": "finiteness", "op": target.name(), "report": r})
        }
        Some(other) => return Err(Error::InvalidSpec(format!("unknown scan `{other}`"))),
    };
    println!("{}", serde_json::to_string(&record)?);
    Ok(EXIT_OK)
}

fn cmd_classify(a: ClassifyArgs) -> Result<i32> {
    let log = RunLog::from_jsonl(&read(&a.log)?)?;
    let run_id = format!("{}<{}>", log.operator, log.input);
    let mut record = match log.signature {
        Signature::LinearOrder => json!({"v": 1, "run": run_id, "fingerprint": fingerprint(&log, a.w)?.summary}),
        Signature::Equivalence => {
            let c = census(&log, a.window)?;
            json!({"v": 1, "run": run_id, "census": {"stages": c.stages, "rule": c.rule,
                   "frozen": c.frozen().collect::<Vec<_>>(), "histogram": c.histogram()}})
        }
    };
    if let Some(claim) = &a.claim {
        let family: Family = claim.parse()?;
        let v = consistency_verdict(&log, &family, a.w, a.window)?;
        eprintln!("{v}");
        record["verdict"] = serde_json::to_value(&v)?;
    }
    println!("{}", serde_json::to_string(&record)?);
    Ok(EXIT_OK)
}

pub fn effective_seed(flag: u64) -> Result<u64> {
    match std::env::var("EMBEDLAB_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("EMBEDLAB_SEED=`{s}` is not a number"))),
        Err(_) => Ok(flag),
    }
}

fn cmd_suite(a: SuiteArgs) -> Result<i32> {
    let seed = effective_seed(a.seed)?;
    let criteria: Vec<u32> = if a.only.is_empty() {
        suite::CRITERIA.iter().map(|c| c.0).collect()
    } else {
        a.only.clone()
    };
    let results = suite::run_suite(&criteria, seed)?;
    let table = suite::table(&results);
    print!("{table}");
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        write_atomic(&dir.join("suite.jsonl"), &suite::to_jsonl(&results)?)?;
        write_atomic(&dir.join("suite.txt"), &table)?;
    }
    let failed = results.iter().filter(|t| !t.result.pass).count();
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        return Ok(EXIT_SUITE);
    }
    Ok(EXIT_OK)
}
