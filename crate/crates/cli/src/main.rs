use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use noodle_core::ndl::{DEFAULT_CAP, DEFAULT_FUEL};
use noodle_core::{
    analyze, derive_grammar, evolve, neighbors, optimize, parse, solve, Assignment, EvolutionConfig, Limits, Model,
    Program, SearchConfig,
};

#[derive(Parser)]
#[command(
    name = "noodle",
    version,
    about = "Synthesize and run local-search neighborhood operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model and print a JSON summary.
    Check {
        #[arg(long)]
        model: PathBuf,
    },
    /// Parse an NDL file and print it in canonical form.
    Parse {
        file: PathBuf,
        /// Also run the static analyzer against this model.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Print the optimized program instead.
        #[arg(long)]
        optimize: bool,
    },
    /// Print the BNF grammar derived from a model.
    Grammar {
        #[arg(long)]
        model: PathBuf,
        /// Number of program variables; defaults to the model's budget.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Print the neighborhood of an assignment as JSON lines.
    Neighbors {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long)]
        op: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Only print neighbors that satisfy every constraint.
        #[arg(long)]
        feasible: bool,
        /// Exit with status 1 when enumeration is truncated.
        #[arg(long)]
        strict: bool,
    },
    /// Evolve a neighborhood operator for a model.
    Synth {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        seed: u64,
        /// JSON file with evolution settings; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        pop: Option<usize>,
        #[arg(long)]
        gens: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        /// Write the best program here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Hill-climb with random restarts using an operator.
    Solve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
}

/// Bad input (exit 2) versus a failure while running (exit 1).
enum Failure {
    Input(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn input(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(input)
}

fn load_model(path: &Path) -> Result<Model, Failure> {
    Model::from_json_str(&read(path)?)
        .with_context(|| path.display().to_string())
        .map_err(input)
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    parse(&read(path)?).map_err(|e| input(anyhow!("{}:{e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::Runtime)
}

fn to_json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

fn check(out: &mut impl Write, model: &Path) -> Outcome {
    let m = load_model(model)?;
    let summary = serde_json::json!({
        "name": m.name,
        "variables": m.len(),
        "constraints": m.constraint_names(),
        "kinds": m.kinds(),
        "structural": m.structural.map(|c| c.0),
        "budget": m.budget,
    });
    writeln!(out, "{}", to_json(&summary))?;
    Ok(())
}

fn parse_cmd(out: &mut impl Write, file: &Path, model: Option<&Path>, optimized: bool) -> Outcome {
    let program = load_program(file)?;
    if let Some(model) = model {
        let diagnostics = analyze(&program, &load_model(model)?);
        for w in &diagnostics.warnings {
            eprintln!("warning: {w}");
        }
        for e in &diagnostics.errors {
            eprintln!("error: {e}");
        }
        if !diagnostics.is_ok() {
            return Err(input(anyhow!(
                "{}: {} analysis error(s)",
                file.display(),
                diagnostics.errors.len()
            )));
        }
    }
    let program = if optimized { optimize(&program) } else { program };
    writeln!(out, "{program}")?;
    Ok(())
}

fn grammar(out: &mut impl Write, model: &Path, budget: Option<usize>) -> Outcome {
    let m = load_model(model)?;
    let budget = budget.unwrap_or(m.budget);
    if budget == 0 {
        return Err(input(anyhow!("--budget must be at least 1")));
    }
    write!(out, "{}", derive_grammar(&m, budget).render())?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn neighbors_cmd(
    out: &mut impl Write,
    model: &Path,
    assignment: &Path,
    op: &Path,
    limits: Limits,
    feasible: bool,
    strict: bool,
) -> Outcome {
    let m = load_model(model)?;
    let program = load_program(op)?;
    let start = Assignment::from_json_str(&read(assignment)?).map_err(input)?;
    m.validate_assignment(&start).map_err(input)?;
    let set = neighbors(&program, &m, &start, limits);
    let mut printed = 0;
    for member in set.members.iter().filter(|a| !feasible || m.is_feasible(a)) {
        writeln!(out, "{}", serde_json::to_string(member).expect("assignments serialize"))?;
        printed += 1;
    }
    eprintln!("{printed} neighbors, {} fuel used", set.fuel_used);
    if set.truncated {
        let why = anyhow!("enumeration truncated (fuel {}, cap {})", limits.fuel, limits.cap);
        if strict {
            return Err(Failure::Runtime(why));
        }
        eprintln!("warning: {why}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn synth(
    out: &mut impl Write,
    model: &Path,
    seed: u64,
    config: Option<&Path>,
    pop: Option<usize>,
    gens: Option<usize>,
    samples: Option<usize>,
    best_out: Option<&Path>,
    report_out: Option<&Path>,
) -> Outcome {
    let m = load_model(model)?;
    let mut cfg = match config {
        Some(path) => serde_json::from_str::<EvolutionConfig>(&read(path)?)
            .with_context(|| path.display().to_string())
            .map_err(input)?,
        None => EvolutionConfig::default(),
    };
    cfg.seed = seed;
    cfg.population = pop.unwrap_or(cfg.population);
    cfg.generations = gens.unwrap_or(cfg.generations);
    cfg.samples = samples.unwrap_or(cfg.samples);
    cfg.validate().map_err(input)?;

    let started = Instant::now();
    let report = evolve(&m, &cfg).map_err(|e| Failure::Runtime(e.into()))?;
    let text = to_json(&report);
    writeln!(out, "{text}")?;
    if let Some(path) = report_out {
        write_file(path, &format!("{text}\n"))?;
    }
    let f = &report.best.fitness;
    eprintln!(
        "best: tier {:?}, preserved {}, productivity {}, size {} ({:.2?}, {} fuel)",
        f.tier,
        f.preserved,
        f.productivity,
        f.size,
        started.elapsed(),
        report.fuel_used
    );
    match (&report.best.program, best_out) {
        (Some(program), Some(path)) => write_file(path, &format!("{program}\n"))?,
        (None, Some(_)) => eprintln!("warning: no genome mapped to a program; --out not written"),
        _ => {}
    }
    Ok(())
}

fn solve_cmd(out: &mut impl Write, model: &Path, op: &Path, config: SearchConfig) -> Outcome {
    let m = load_model(model)?;
    let program = load_program(op)?;
    let diagnostics = analyze(&program, &m);
    for e in &diagnostics.errors {
        eprintln!("warning: {e}");
    }
    let result = solve(&m, &program, &config).map_err(|e| Failure::Runtime(e.into()))?;
    writeln!(out, "{}", to_json(&result))?;
    eprintln!("best objective {}", result.best_objective);
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Check { model } => check(&mut out, &model),
        Command::Parse { file, model, optimize } => parse_cmd(&mut out, &file, model.as_deref(), optimize),
        Command::Grammar { model, budget } => grammar(&mut out, &model, budget),
        Command::Neighbors {
            model,
            assignment,
            op,
            fuel,
            cap,
            feasible,
            strict,
        } => neighbors_cmd(
            &mut out,
            &model,
            &assignment,
            &op,
            Limits { fuel, cap },
            feasible,
            strict,
        ),
        Command::Synth {
            model,
            seed,
            config,
            pop,
            gens,
            samples,
            out: best,
            report,
        } => synth(
            &mut out,
            &model,
            seed,
            config.as_deref(),
            pop,
            gens,
            samples,
            best.as_deref(),
            report.as_deref(),
        ),
        Command::Solve {
            model,
            op,
            seed,
            restarts,
            max_steps,
            fuel,
            cap,
        } => solve_cmd(
            &mut out,
            &model,
            &op,
            SearchConfig {
                restarts,
                max_steps,
                limits: Limits { fuel, cap },
                seed,
            },
        ),
    }?;
    out.flush()?;
    Ok(())
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("NOODLE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("NOODLE_THREADS must be a non-negative integer, got `{raw}`"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
