use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};

use oeisbench::harness::{self, aggregate, load_solvers, Job, Manifests};
use oeisbench::induction::{classify_all, FilterMode};
use oeisbench::interp::{generate_seq, CHECK_LIMIT, VALUE_BOUND_EXP, VERIFY_LIMIT};
use oeisbench::oeis::{
    build_problems, covers, load_solutions, load_stripped, read_ids, read_problems, write_ids,
    write_problems, ProblemRecord, Status,
};
use oeisbench::pipeline::{covering_pairs, run_pipeline, PipelineConfig};
use oeisbench::smt::{export_all, read_manifest, ConjectureVariant, ExportOptions};
use oeisbench::syntax::print_with;
use oeisbench::verify::{emit_nonverified, verify_all, write_reports};
use oeisbench::{eval, parse, Budget, CondStyle, EvalConfig, Program, VarId};

#[derive(Parser)]
#[command(
    name = "oeisbench",
    version,
    about = "Loop programs for OEIS sequences and SMT benchmarks built from them"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Abstract-time limit per call for cover checks and filters.
    #[arg(long, global = true, env = "OEISBENCH_LIMIT", default_value_t = CHECK_LIMIT)]
    limit: u64,
    /// Abstract-time limit per call during verification.
    #[arg(long, global = true, env = "OEISBENCH_VERIFY_LIMIT", default_value_t = VERIFY_LIMIT)]
    verify_limit: u64,
    /// Values with absolute value above 10^N overflow.
    #[arg(long, global = true, env = "OEISBENCH_VALUE_BOUND", default_value_t = VALUE_BOUND_EXP)]
    value_bound: u32,
    /// Worker threads and concurrent solver processes; 0 picks one per core.
    #[arg(
        long,
        short = 'j',
        global = true,
        env = "OEISBENCH_JOBS",
        default_value_t = 0
    )]
    jobs: usize,
    /// per-loop or per-test.
    #[arg(
        long,
        global = true,
        env = "OEISBENCH_FILTER_MODE",
        default_value = "per-loop"
    )]
    filter_mode: FilterMode,
    /// Conjecture variants: base, c0..c8, c2x, strong (comma separated).
    #[arg(
        long,
        global = true,
        env = "OEISBENCH_VARIANT",
        value_delimiter = ',',
        default_value = "base"
    )]
    variant: Vec<ConjectureVariant>,
    /// Write the second c2x point as 2(c+1).
    #[arg(long, global = true, env = "OEISBENCH_C2X_APPENDIX")]
    c2x_appendix: bool,
    /// Print cond as `if a <= 0 then b else c`.
    #[arg(long, global = true, env = "OEISBENCH_IF_THEN_ELSE")]
    if_then_else: bool,
    /// Directory holding stage inputs and outputs.
    #[arg(
        long,
        short = 'w',
        global = true,
        env = "OEISBENCH_WORKDIR",
        default_value = "."
    )]
    workdir: PathBuf,
}

impl Global {
    fn config(&self, limit: u64) -> Result<EvalConfig> {
        ensure!(limit > 0, "limits must be positive");
        Ok(EvalConfig {
            value_bound: BigUint::from(10u32).pow(self.value_bound),
            ..EvalConfig::with_limit(limit)
        })
    }

    fn check(&self) -> Result<EvalConfig> {
        self.config(self.limit)
    }

    fn verification(&self) -> Result<EvalConfig> {
        self.config(self.verify_limit)
    }

    fn style(&self) -> CondStyle {
        if self.if_then_else {
            CondStyle::IfThenElse
        } else {
            CondStyle::Call
        }
    }

    fn width(&self) -> usize {
        if self.jobs == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.jobs
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.workdir.join(name)
    }
}

const PROBLEMS: &str = "problems.jsonl";
const REPORTS: &str = "verify_reports.jsonl";
const VERIFIED: &str = "verified";
const NONVERIFIED: &str = "all_nonverified100";
const SYN: &str = "aind_syn";
const SEM: &str = "aind_sem";
const SMT_DIR: &str = "smt";
const RESULTS: &str = "results.jsonl";

#[derive(Subcommand)]
enum Command {
    /// Print a program in canonical form.
    Fmt { program: String },
    /// Evaluate a program at (x, y) and print value and cost.
    Eval {
        program: String,
        #[arg(allow_negative_numbers = true)]
        x: BigInt,
        #[arg(allow_negative_numbers = true, default_value = "0")]
        y: BigInt,
    },
    /// Print the first N terms f(0), f(1), ... with carried-over budget.
    Seq { program: String, n: usize },
    /// List the sequences of a stripped file that a program covers.
    Cover {
        program: String,
        #[arg(long)]
        stripped: PathBuf,
    },
    /// Group covering solution pairs into problems.
    Build {
        #[arg(long)]
        stripped: PathBuf,
        #[arg(long)]
        solutions: PathBuf,
    },
    /// Check every problem on the first 100 inputs.
    Verify,
    /// Apply the induction filters to verified problems.
    Filter,
    /// Write SMT-LIB scripts for verified and non-verified problems.
    Export,
    /// Run solvers over exported scripts, resuming from the results log.
    Run {
        #[arg(long)]
        solvers: PathBuf,
        /// Results log; defaults to results.jsonl in the work directory.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Tabulate solved problems by filter subset.
    Report {
        #[arg(long)]
        log: Option<PathBuf>,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// build, verify, filter and export in one go.
    Pipeline {
        #[arg(long)]
        stripped: PathBuf,
        #[arg(long)]
        solutions: PathBuf,
        /// Only print the number of survivors at each stage.
        #[arg(long)]
        dry_run: bool,
    },
}

fn program(text: &str) -> Result<Program> {
    parse(text).with_context(|| format!("cannot parse {text:?}"))
}

fn load_problems(g: &Global) -> Result<Vec<ProblemRecord>> {
    let path = g.path(PROBLEMS);
    read_problems(&path).with_context(|| format!("reading {}", path.display()))
}

fn save_problems(g: &Global, problems: &[ProblemRecord]) -> Result<()> {
    fs::create_dir_all(&g.workdir).with_context(|| format!("creating {}", g.workdir.display()))?;
    write_problems(&g.path(PROBLEMS), problems)?;
    Ok(())
}

fn ids_where(problems: &[ProblemRecord], keep: impl Fn(&ProblemRecord) -> bool) -> Vec<&str> {
    problems
        .iter()
        .filter(|p| keep(p))
        .map(|p| p.id.as_str())
        .collect()
}

fn build(g: &Global, stripped: &Path, solutions: &Path) -> Result<()> {
    let seqs =
        load_stripped(stripped).with_context(|| format!("reading {}", stripped.display()))?;
    let sols =
        load_solutions(solutions).with_context(|| format!("reading {}", solutions.display()))?;
    for w in &sols.warnings {
        eprintln!("warning: {w}");
    }
    let covering = covering_pairs(&sols.records, &seqs, &g.check()?)?;
    let problems = build_problems(&covering, &seqs)?;
    save_problems(g, &problems)?;
    println!(
        "{} pairs, {} covering, {} problems -> {}",
        sols.records.len(),
        covering.len(),
        problems.len(),
        g.path(PROBLEMS).display()
    );
    Ok(())
}

fn verify(g: &Global) -> Result<()> {
    let mut problems = load_problems(g)?;
    let reports = verify_all(&problems, &g.verification()?);
    for (p, r) in problems.iter_mut().zip(&reports) {
        p.status = r.status;
    }
    write_reports(&g.path(REPORTS), &reports)?;
    emit_nonverified(&g.path(NONVERIFIED), &reports)?;
    write_ids(
        &g.path(VERIFIED),
        &ids_where(&problems, |p| p.status == Status::Verified),
    )?;
    save_problems(g, &problems)?;
    let count = |s: Status| problems.iter().filter(|p| p.status == s).count();
    println!(
        "{} verified, {} nonverified, {} refuted",
        count(Status::Verified),
        count(Status::NonVerified),
        count(Status::Refuted)
    );
    Ok(())
}

fn filter(g: &Global) -> Result<()> {
    let mut problems = load_problems(g)?;
    ensure!(
        problems.iter().any(|p| p.status != Status::Unverified),
        "problems have not been verified yet; run `verify` first"
    );
    classify_all(&mut problems, g.filter_mode, &g.check()?);
    let syn = ids_where(&problems, |p| p.status == Status::Verified && p.syn_pass);
    let sem = ids_where(&problems, |p| p.status == Status::Verified && p.sem_pass);
    write_ids(&g.path(SYN), &syn)?;
    write_ids(&g.path(SEM), &sem)?;
    println!(
        "{} pass the syntactic filter, {} the semantic filter",
        syn.len(),
        sem.len()
    );
    save_problems(g, &problems)?;
    Ok(())
}

fn export(g: &Global) -> Result<()> {
    let problems: Vec<ProblemRecord> = load_problems(g)?
        .into_iter()
        .filter(|p| matches!(p.status, Status::Verified | Status::NonVerified))
        .collect();
    for &variant in &g.variant {
        let dir = g.path(SMT_DIR).join(variant.to_string());
        let opts = ExportOptions {
            variant,
            c2x_appendix: g.c2x_appendix,
            header_style: g.style(),
        };
        let written = export_all(&problems, &dir, &opts)?;
        println!("{} scripts -> {}", written.len(), dir.display());
    }
    Ok(())
}

fn run_solvers(g: &Global, solvers: &Path, log: Option<PathBuf>) -> Result<()> {
    let specs = load_solvers(solvers)?;
    let mut jobs = Vec::new();
    for variant in &g.variant {
        let dir = g.path(SMT_DIR).join(variant.to_string());
        for e in read_manifest(&dir)
            .with_context(|| format!("no exported scripts for variant {variant}"))?
        {
            jobs.push(Job {
                id: e.id,
                variant: variant.to_string(),
                file: dir.join(e.file),
            });
        }
    }
    let log = log.unwrap_or_else(|| g.path(RESULTS));
    let results = harness::run(&specs, &jobs, g.width(), &log)?;
    let proved = results
        .iter()
        .filter(|r| r.verdict == harness::Verdict::Proved)
        .count();
    println!(
        "{} results ({proved} proved) in {}",
        results.len(),
        log.display()
    );
    Ok(())
}

fn report(g: &Global, log: Option<PathBuf>, csv: Option<PathBuf>) -> Result<()> {
    let log = log.unwrap_or_else(|| g.path(RESULTS));
    let results = harness::read_log(&log)?;
    let ids = |name: &str| {
        let path = g.path(name);
        read_ids(&path).with_context(|| format!("reading {}", path.display()))
    };
    let manifests = Manifests {
        verified: ids(VERIFIED)?,
        aind_syn: ids(SYN)?,
        aind_sem: ids(SEM)?,
        nonverified: ids(NONVERIFIED)?,
    };
    let table = aggregate(&results, &manifests)?;
    print!("{table}");
    if let Some(path) = csv {
        fs::write(&path, table.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn pipeline(g: &Global, stripped: &Path, solutions: &Path, dry_run: bool) -> Result<()> {
    if !dry_run {
        build(g, stripped, solutions)?;
        verify(g)?;
        filter(g)?;
        return export(g);
    }
    let seqs = load_stripped(stripped)?;
    let sols = load_solutions(solutions)?;
    let cfg = PipelineConfig {
        check: g.check()?,
        verify: g.verification()?,
        mode: g.filter_mode,
    };
    let out = run_pipeline(&sols.records, &seqs, &cfg)?;
    for (stage, n) in out.funnel.rows() {
        println!("{stage:<17} {n}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    if g.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(g.jobs)
            .build_global()?;
    }
    match cli.command {
        Command::Fmt { program: text } => println!("{}", print_with(&program(&text)?, g.style())),
        Command::Eval {
            program: text,
            x,
            y,
        } => {
            let p = program(&text)?;
            let cfg = g.check()?;
            let e = eval(&p, &x, &y, &mut Budget::new(cfg.per_call_limit), &cfg)?;
            println!("{} (cost {})", e.value, e.cost);
        }
        Command::Seq { program: text, n } => {
            let p = program(&text)?;
            if p.depends_on(VarId::Y) {
                eprintln!("note: y is 0 at every input");
            }
            let outcomes = generate_seq(&p, n, &g.check()?);
            let terms: Vec<String> = outcomes
                .iter()
                .map_while(|r| r.as_ref().ok())
                .map(|e| e.value.to_string())
                .collect();
            println!("{}", terms.join(" "));
            if let Some(Err(e)) = outcomes.last() {
                bail!("term {} failed: {e}", terms.len());
            }
        }
        Command::Cover {
            program: text,
            stripped,
        } => {
            let p = program(&text)?;
            let cfg = g.check()?;
            for s in load_stripped(&stripped)?
                .iter()
                .filter(|s| covers(&p, s, &cfg))
            {
                println!("{}", s.anum);
            }
        }
        Command::Build {
            stripped,
            solutions,
        } => build(g, &stripped, &solutions)?,
        Command::Verify => verify(g)?,
        Command::Filter => filter(g)?,
        Command::Export => export(g)?,
        Command::Run { solvers, log } => run_solvers(g, &solvers, log)?,
        Command::Report { log, csv } => report(g, log, csv)?,
        Command::Pipeline {
            stripped,
            solutions,
            dry_run,
        } => pipeline(g, &stripped, &solutions, dry_run)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
