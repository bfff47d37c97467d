use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use rdlmix::formula::expand_shorthand;
use rdlmix::model::{
    abstraction_from_model, build_appendix_model, check_grid_axioms, check_halt_constraints, dump_model,
    intended_model_from_trace, parse_model, required_depth, IntervalModel,
};
use rdlmix::{
    classify, compile_with, emit_smtlib, parse_formula, parse_tm, print_formula, simulate, translate, Formula,
    ReductionOptions, TuringMachine,
};

#[derive(Parser)]
#[command(name = "rdlmix", version, about = "Mixed real/integer difference logic toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Generation depth of the integer-ordered zones
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u32).range(4..))]
    depth: u32,
    /// Simulation step bound
    #[arg(long, global = true, default_value_t = 1000)]
    bound: usize,
    /// Use the literal ¬P(z) for the previous head cell
    #[arg(long, global = true)]
    no_head_fix: bool,
    /// Solver executable (default: z3 on PATH)
    #[arg(long, global = true)]
    solver: Option<PathBuf>,
    /// Solver wall-clock timeout in seconds
    #[arg(long, global = true, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    timeout: u64,
    /// Close free variables existentially in SMT-LIB output
    #[arg(long, global = true)]
    close_free: bool,
    /// Write output here instead of stdout
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a formula in canonical form
    Parse { input: Option<PathBuf> },
    /// Report the fragments a formula belongs to
    Classify { input: Option<PathBuf> },
    /// Translate a guarded formula into pure order logic
    TranslateLmix { input: Option<PathBuf> },
    /// Compile a machine into its halting formula
    CompileTm { input: Option<PathBuf> },
    /// Run a machine and print its trace
    SimulateTm { input: Option<PathBuf> },
    /// Dump the intended model of a run, or the bare grid model
    BuildModel {
        input: Option<PathBuf>,
        /// Build the grid model for this many state bits instead of a run
        #[arg(long, conflicts_with = "input")]
        bits: Option<usize>,
    },
    /// Check grid axioms and halting constraints
    CheckModel {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        tm: Option<PathBuf>,
    },
    /// Emit an SMT-LIB 2 script
    EmitSmt {
        input: Option<PathBuf>,
        /// Treat the input as a machine and emit its halting formula
        #[arg(long)]
        tm: bool,
    },
    /// Emit an SMT-LIB 2 script and run a solver on it
    Solve {
        input: Option<PathBuf>,
        #[arg(long)]
        tm: bool,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Check(String),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type Outcome = Result<(), Failure>;

fn read_input(path: Option<&Path>) -> anyhow::Result<String> {
    match path {
        None => read_stdin(),
        Some(p) if p.as_os_str() == "-" => read_stdin(),
        Some(p) => fs::read_to_string(p).with_context(|| format!("cannot read `{}`", p.display())),
    }
}

fn read_stdin() -> anyhow::Result<String> {
    let mut s = String::new();
    io::stdin().read_to_string(&mut s).context("cannot read standard input")?;
    Ok(s)
}

fn load_formula(path: Option<&Path>) -> anyhow::Result<Formula> {
    let text = read_input(path)?;
    let f = parse_formula(&text).map_err(|e| anyhow!("parse error: {e}"))?;
    Ok(expand_shorthand(&f))
}

fn load_tm(path: Option<&Path>) -> anyhow::Result<TuringMachine> {
    let text = read_input(path)?;
    parse_tm(&text).map_err(|e| anyhow!("machine error: {e}"))
}

struct Ctx {
    common: Common,
    out: String,
}

impl Ctx {
    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn reduction_options(&self) -> ReductionOptions {
        ReductionOptions { head_fix: !self.common.no_head_fix, ..ReductionOptions::default() }
    }

    fn halt_formula(&self, m: &TuringMachine) -> anyhow::Result<Formula> {
        Ok(compile_with(m, &self.reduction_options()).map_err(|e| anyhow!("{e}"))?.halt)
    }

    fn intended(&self, m: &TuringMachine) -> anyhow::Result<(rdlmix::model::GridAbstraction, IntervalModel)> {
        let trace = simulate(m, self.common.bound)?;
        let depth = (self.common.depth as usize).max(required_depth(&trace));
        Ok(intended_model_from_trace(m, &trace, depth)?)
    }

    fn script(&self, input: Option<&Path>, tm: bool) -> anyhow::Result<String> {
        let f = if tm { self.halt_formula(&load_tm(input)?)? } else { load_formula(input)? };
        Ok(emit_smtlib(&f, self.common.close_free)?)
    }
}

fn run(cmd: &Cmd, ctx: &mut Ctx) -> Outcome {
    match cmd {
        Cmd::Parse { input } => {
            let text = read_input(input.as_deref())?;
            let f = parse_formula(&text).map_err(|e| anyhow!("parse error: {e}"))?;
            ctx.line(print_formula(&f));
        }
        Cmd::Classify { input } => {
            let f = load_formula(input.as_deref())?;
            let report = classify(&f).map_err(|e| anyhow!("{e}"))?;
            ctx.line(report.labels_line());
            for v in &report.violations {
                ctx.line(format!("violation: {v}"));
            }
        }
        Cmd::TranslateLmix { input } => {
            let f = load_formula(input.as_deref())?;
            let out = translate(&f).map_err(|e| anyhow!("{e}"))?;
            ctx.line(format!("; integer predicate {}", out.pint_name));
            ctx.line(print_formula(&out.combined));
        }
        Cmd::CompileTm { input } => {
            let m = load_tm(input.as_deref())?;
            let f = ctx.halt_formula(&m)?;
            ctx.line(print_formula(&f));
        }
        Cmd::SimulateTm { input } => {
            let m = load_tm(input.as_deref())?;
            let trace = simulate(&m, ctx.common.bound).map_err(anyhow::Error::from)?;
            for (k, c) in trace.configs.iter().enumerate() {
                let tape: Vec<String> = c.tape.iter().map(|x| x.to_string()).collect();
                ctx.line(format!("{k} {} head={} ones=[{}]", c.state, c.head, tape.join(",")));
            }
            if trace.halted {
                ctx.line(format!("halted after {} steps", trace.steps()));
            } else {
                ctx.line(format!("no halt within {} steps", ctx.common.bound));
            }
        }
        Cmd::BuildModel { input, bits } => {
            let model = match bits {
                Some(n) => build_appendix_model(*n, ctx.common.depth as usize).map_err(anyhow::Error::from)?,
                None => ctx.intended(&load_tm(input.as_deref())?)?.1,
            };
            ctx.out.push_str(&dump_model(&model));
        }
        Cmd::CheckModel { model, tm } => return check_model(ctx, model.as_deref(), tm.as_deref()),
        Cmd::EmitSmt { input, tm } => {
            let s = ctx.script(input.as_deref(), *tm)?;
            ctx.out.push_str(&s);
        }
        Cmd::Solve { input, tm } => return solve(ctx, input.as_deref(), *tm),
    }
    Ok(())
}

fn check_model(ctx: &mut Ctx, model: Option<&Path>, tm: Option<&Path>) -> Outcome {
    let machine = tm.map(|p| load_tm(Some(p))).transpose()?;
    let (model, grid) = match (model, &machine) {
        (Some(p), m) => {
            let text = read_input(Some(p))?;
            let model = parse_model(&text).map_err(|e| anyhow!("model error: {e}"))?;
            let grid = m.as_ref().map(|_| abstraction_from_model(&model, model.periods.len()));
            (model, grid)
        }
        (None, Some(m)) => {
            let (g, model) = ctx.intended(m)?;
            (model, Some(g))
        }
        (None, None) => return Err(anyhow!("check-model needs --model, --tm or both").into()),
    };
    let mut ok = true;
    if let (Some(m), Some(g)) = (&machine, &grid) {
        let report = check_halt_constraints(m, g);
        for c in &report.checks {
            ctx.line(format!("{} {}", c.family, if c.ok { "ok" } else { "FAILED" }));
            if !c.ok {
                ctx.line(format!("  {}", c.detail));
            }
        }
        ok &= report.all_ok();
    }
    let axioms = check_grid_axioms(&model);
    if axioms.all_ok() {
        ctx.line("AXIOMS 1-7 ok");
    } else {
        for c in axioms.checks.iter().filter(|c| !c.ok) {
            ctx.line(format!("AXIOM {} FAILED", c.axiom));
            ctx.line(format!("  {}", c.detail));
        }
        ok = false;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check("model check failed".into()))
    }
}

fn find_on_path(name: &str) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path).map(|d| d.join(name)).find(|p| p.is_file())
}

fn resolve_solver(explicit: Option<&Path>) -> Option<PathBuf> {
    match explicit {
        Some(p) if p.components().count() > 1 => p.is_file().then(|| p.to_path_buf()),
        Some(p) => find_on_path(&p.to_string_lossy()),
        None => find_on_path("z3"),
    }
}

fn solve(ctx: &mut Ctx, input: Option<&Path>, tm: bool) -> Outcome {
    let script = ctx.script(input, tm)?;
    let Some(solver) = resolve_solver(ctx.common.solver.as_deref()) else {
        ctx.out.push_str(&script);
        return Err(anyhow!("solver executable not found").into());
    };
    let mut cmd = Command::new(&solver);
    if solver.file_stem().is_some_and(|s| s == "z3") {
        cmd.arg("-in");
    }
    let mut child = cmd
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .with_context(|| format!("cannot start `{}`", solver.display()))?;
    if let Some(mut stdin) = child.stdin.take() {
        // A solver that exits early closes the pipe; its output still decides.
        let _ = stdin.write_all(script.as_bytes());
    }
    let deadline = Instant::now() + Duration::from_secs(ctx.common.timeout);
    loop {
        if child.try_wait().context("waiting for solver")?.is_some() {
            break;
        }
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            ctx.line("timeout");
            return Ok(());
        }
        std::thread::sleep(Duration::from_millis(10));
    }
    let output = child.wait_with_output().context("reading solver output")?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    let verdict = stdout.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    match verdict {
        "sat" | "unsat" | "unknown" => {
            ctx.line(verdict);
            Ok(())
        }
        _ => {
            ctx.out.push_str(&stdout);
            ctx.out.push_str(&String::from_utf8_lossy(&output.stderr));
            Err(Failure::Check("solver did not report sat, unsat or unknown".into()))
        }
    }
}

fn emit(ctx: &Ctx) -> anyhow::Result<()> {
    match &ctx.common.output {
        Some(p) => fs::write(p, &ctx.out).with_context(|| format!("cannot write `{}`", p.display())),
        None => {
            io::stdout().write_all(ctx.out.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut ctx = Ctx { common: cli.common, out: String::new() };
    let result = run(&cli.command, &mut ctx);
    if let Err(e) = emit(&ctx) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
