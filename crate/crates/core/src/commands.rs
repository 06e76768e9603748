//! The `procbench` command line. Every subcommand first prints an
//! `effective:` line on stderr; running that line again reproduces the
//! outputs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::agents::{agent_by_name, SearchConfig};
use crate::benchmark::{
    evaluate, format_table, gap_report, run_protocol, write_runs_csv, write_runs_json, ProtocolConfig, RunResult,
    Split, TrainSize,
};
use crate::config::FileConfig;
use crate::error::{Error, Result};
use crate::levelgen::{serialize_level, Level};
use crate::render::write_ppm;
use crate::rng::{LevelSeed, Rng, StreamTag};
use crate::validate::validate_game;
use crate::vecenv::{Env, LevelSet, VecEnv, VecEnvConfig};
use crate::Game;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "procbench", version, about = "Procedural environments and generalization benchmark")]
pub struct Cli {
    /// TOML or JSON config file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Seed for episode sampling and random policies.
    #[arg(long, global = true, env = "PROCBENCH_SEED")]
    pub master_seed: Option<u32>,

    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a level as JSON.
    Gen(GenArgs),
    /// Play an episode and write one PPM per frame.
    Render(RenderArgs),
    /// Run the invariant suite over a seed range.
    Validate(ValidateArgs),
    /// Zero-shot evaluation of a built-in agent.
    Eval(EvalArgs),
    /// Random-action stepping rate of a batched env.
    BenchThroughput(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub game: Option<Game>,
    #[arg(long)]
    pub seed: u32,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub game: Option<Game>,
    #[arg(long)]
    pub seed: u32,
    #[arg(long, default_value_t = 100)]
    pub steps: u32,
    /// Comma-separated action indices; a random policy is used when absent.
    #[arg(long, value_delimiter = ',')]
    pub actions: Option<Vec<u32>>,
    #[arg(long)]
    pub no_velocity: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub game: Option<Game>,
    /// Number of seeds.
    #[arg(long, default_value_t = 100)]
    pub seeds: u32,
    #[arg(long, default_value_t = 0)]
    pub start: u32,
    /// Search oracle state budget per level.
    #[arg(long, default_value_t = SearchConfig::default().budget)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub game: Option<Game>,
    #[arg(long)]
    pub agent: Option<String>,
    /// `unbounded`, `range:A..B` or `seeds:a,b,...`.
    #[arg(long)]
    pub levels: Option<LevelSet>,
    #[arg(long)]
    pub episodes: Option<usize>,
    /// Run the train/test protocol over `--sizes` instead of one level set.
    #[arg(long)]
    pub protocol: bool,
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<TrainSize>>,
    #[arg(long)]
    pub test_size: Option<u32>,
    #[arg(long)]
    pub runs: Option<u32>,
    /// Report path prefix: writes PREFIX.csv and PREFIX.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub game: Option<Game>,
    #[arg(long)]
    pub batch: Option<usize>,
    /// Batched steps per measurement.
    #[arg(long, default_value_t = 1000)]
    pub steps: u32,
    /// Measure only this mode; both when absent.
    #[arg(long)]
    pub render: Option<bool>,
}

struct Ctx<'a> {
    file: FileConfig,
    master_seed: u32,
    jobs: usize,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn game(&self, flag: Option<Game>) -> Result<Game> {
        flag.or(self.file.game)
            .ok_or_else(|| Error::Config("no game given (--game or config file)".into()))
    }

    fn effective(&mut self, sub: &str, args: &[(&str, String)]) -> Result<()> {
        let mut line = format!("effective: procbench --master-seed {} --jobs {} {sub}", self.master_seed, self.jobs);
        for (k, v) in args {
            if v.is_empty() {
                line.push_str(&format!(" --{k}"));
            } else {
                line.push_str(&format!(" --{k} {v}"));
            }
        }
        writeln!(self.err, "{line}").map_err(|e| Error::file("<stderr>", e))
    }

    fn say(&mut self, text: impl std::fmt::Display) -> Result<()> {
        writeln!(self.out, "{text}").map_err(|e| Error::file("<stdout>", e))
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::PrivilegedAgent(_) | Error::Parse { .. } => EXIT_USAGE,
        _ => EXIT_CHECK_FAILED,
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = if e.use_stderr() { e.render().to_string() } else { e.to_string() };
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match run(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let master_seed = cli.master_seed.or(file.master_seed).unwrap_or(0);
    let jobs = cli.jobs.or(file.jobs).unwrap_or(1);
    if jobs == 0 {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    let mut ctx = Ctx {
        file,
        master_seed,
        jobs,
        out,
        err,
    };
    match cli.command {
        Command::Gen(a) => cmd_gen(&mut ctx, a),
        Command::Render(a) => cmd_render(&mut ctx, a),
        Command::Validate(a) => cmd_validate(&mut ctx, a),
        Command::Eval(a) => cmd_eval(&mut ctx, a),
        Command::BenchThroughput(a) => cmd_bench(&mut ctx, a),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::file(path, e))
}

fn cmd_gen(ctx: &mut Ctx, a: GenArgs) -> Result<i32> {
    let game = ctx.game(a.game)?;
    let mut args = vec![("game", game.to_string()), ("seed", a.seed.to_string())];
    if let Some(p) = &a.out {
        args.push(("out", p.display().to_string()));
    }
    ctx.effective("gen", &args)?;
    let json = serialize_level(&Level::generate(game, LevelSeed(a.seed)));
    match &a.out {
        Some(p) => write_file(p, json.as_bytes())?,
        None => ctx.say(json)?,
    }
    Ok(EXIT_OK)
}

fn cmd_render(ctx: &mut Ctx, a: RenderArgs) -> Result<i32> {
    let game = ctx.game(a.game)?;
    let paint = !a.no_velocity && ctx.file.paint_velocity.unwrap_or(true);
    let mut args = vec![
        ("game", game.to_string()),
        ("seed", a.seed.to_string()),
        ("steps", a.steps.to_string()),
    ];
    if let Some(acts) = &a.actions {
        args.push(("actions", acts.iter().map(u32::to_string).collect::<Vec<_>>().join(",")));
    }
    if !paint {
        args.push(("no-velocity", String::new()));
    }
    args.push(("out-dir", a.out_dir.display().to_string()));
    ctx.effective("render", &args)?;

    let n = game.action_count() as u32;
    if let Some(bad) = a.actions.iter().flatten().find(|&&x| x >= n) {
        return Err(Error::Config(format!("action {bad} outside 0..{n} for {game}")));
    }
    fs::create_dir_all(&a.out_dir).map_err(|e| Error::file(&a.out_dir, e))?;
    let mut env = Env::new(game, LevelSeed(a.seed));
    let mut policy = Rng::stream(LevelSeed(ctx.master_seed), StreamTag::EpisodeDynamics);
    let frame_path = |i: u32| a.out_dir.join(format!("frame_{i:05}.ppm"));
    write_ppm(&env.render(paint), frame_path(0))?;
    let mut frames = 1;
    let mut ret = 0.0;
    for t in 0..a.steps {
        let action = match &a.actions {
            Some(list) => match list.get(t as usize) {
                Some(&x) => x,
                None => break,
            },
            None => policy.index(n as usize) as u32,
        };
        let (r, done) = env.step(action)?;
        ret += r;
        write_ppm(&env.render(paint), frame_path(t + 1))?;
        frames += 1;
        if done {
            break;
        }
    }
    ctx.say(format!(
        "frames={frames} steps={} return={ret} outcome={:?}",
        env.step_count(),
        env.outcome()
    ))?;
    Ok(EXIT_OK)
}

fn cmd_validate(ctx: &mut Ctx, a: ValidateArgs) -> Result<i32> {
    let game = ctx.game(a.game)?;
    ctx.effective(
        "validate",
        &[
            ("game", game.to_string()),
            ("seeds", a.seeds.to_string()),
            ("start", a.start.to_string()),
            ("budget", a.budget.to_string()),
        ],
    )?;
    let end = a
        .start
        .checked_add(a.seeds)
        .ok_or_else(|| Error::Config("seed range overflows u32".into()))?;
    let search = SearchConfig {
        budget: a.budget,
        ..SearchConfig::default()
    };
    let report = validate_game(game, a.start..end, ctx.jobs, search)?;
    for c in &report.checks {
        let mut line = format!("check={} passed={}/{}", c.name, c.passed, c.total);
        if !c.failures.is_empty() {
            let seeds: Vec<String> = c.failures.iter().map(u32::to_string).collect();
            line.push_str(&format!(" failing_seeds={}", seeds.join(",")));
        }
        ctx.say(line)?;
    }
    Ok(if report.ok() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn write_reports(prefix: &Path, rows: &[RunResult]) -> Result<()> {
    let csv_path = prefix.with_extension("csv");
    let json_path = prefix.with_extension("json");
    let mut csv_buf = Vec::new();
    write_runs_csv(&mut csv_buf, rows)?;
    write_file(&csv_path, &csv_buf)?;
    let mut json_buf = Vec::new();
    write_runs_json(&mut json_buf, rows)?;
    write_file(&json_path, &json_buf)
}

fn cmd_eval(ctx: &mut Ctx, a: EvalArgs) -> Result<i32> {
    let game = ctx.game(a.game)?;
    let agent_name = a.agent.or(ctx.file.agent.clone()).unwrap_or_else(|| "random".to_owned());
    let episodes = a.episodes.or(ctx.file.episodes).unwrap_or(1000);
    let seed = ctx.master_seed;
    let make = |run: u32| agent_by_name(&agent_name, game, u64::from(seed) << 32 | u64::from(run));
    let probe = make(0)?;

    let rows = if a.protocol {
        let cfg = ProtocolConfig {
            game,
            train_sizes: a
                .sizes
                .or(ctx.file.train_sizes.clone())
                .unwrap_or_else(|| TrainSize::preset(game)),
            test_size: a.test_size.or(ctx.file.test_size).unwrap_or(10_000),
            episodes_per_eval: episodes,
            runs: a.runs.or(ctx.file.runs).unwrap_or(5),
            master_seed: seed,
        };
        cfg.validate()?;
        if probe.privileged() {
            return Err(Error::PrivilegedAgent(agent_name));
        }
        let sizes: Vec<String> = cfg.train_sizes.iter().map(TrainSize::to_string).collect();
        let mut args = vec![
            ("game", game.to_string()),
            ("agent", agent_name.clone()),
            ("episodes", episodes.to_string()),
            ("protocol", String::new()),
            ("sizes", sizes.join(",")),
            ("test-size", cfg.test_size.to_string()),
            ("runs", cfg.runs.to_string()),
        ];
        if let Some(p) = &a.out {
            args.push(("out", p.display().to_string()));
        }
        ctx.effective("eval", &args)?;
        let rows = run_protocol(&cfg, make)?;
        let report = gap_report(&agent_name, false, &rows)?;
        ctx.say(format_table(&report).trim_end())?;
        if let Some(p) = &a.out {
            write_file(&p.with_extension("report.json"), report.to_json()?.as_bytes())?;
        }
        rows
    } else {
        let levels = a.levels.or(ctx.file.levels.clone()).unwrap_or(LevelSet::Unbounded);
        let mut args = vec![
            ("game", game.to_string()),
            ("agent", agent_name.clone()),
            ("levels", levels.to_string()),
            ("episodes", episodes.to_string()),
        ];
        if let Some(p) = &a.out {
            args.push(("out", p.display().to_string()));
        }
        ctx.effective("eval", &args)?;
        let mut agent = probe;
        let stats = evaluate(agent.as_mut(), game, &levels, episodes, seed)?;
        ctx.say(format!(
            "game={game} agent={agent_name} episodes={} mean_return={} std_return={} success_pct={} mean_length={}",
            stats.episodes, stats.mean_return, stats.std_return, stats.success_rate_percent, stats.mean_episode_length
        ))?;
        let size = match levels.len() {
            Some(n) => TrainSize::Finite(n as u32),
            None => TrainSize::Unbounded,
        };
        vec![RunResult::new(game, size, 0, Split::Test, &stats)]
    };
    if let Some(p) = &a.out {
        write_reports(p, &rows)?;
    }
    Ok(EXIT_OK)
}

/// Batched random-action steps per second.
pub fn measure_throughput(
    game: Game,
    batch: usize,
    steps: u32,
    render: bool,
    master_seed: u32,
    jobs: usize,
) -> Result<f64> {
    let mut config = VecEnvConfig::new(game, batch, LevelSet::Unbounded, master_seed);
    config.render = render;
    config.jobs = jobs;
    let mut venv = VecEnv::new(config)?;
    venv.reset()?;
    let mut rng = Rng::stream(LevelSeed(master_seed), StreamTag::EpisodeDynamics);
    let n = game.action_count();
    let mut actions = vec![0u32; batch];
    let start = Instant::now();
    for _ in 0..steps {
        for a in &mut actions {
            *a = rng.index(n) as u32;
        }
        venv.step_batch(&actions)?;
    }
    let secs = start.elapsed().as_secs_f64().max(1e-9);
    Ok(f64::from(steps) * batch as f64 / secs)
}

fn cmd_bench(ctx: &mut Ctx, a: BenchArgs) -> Result<i32> {
    let game = a.game.or(ctx.file.game).unwrap_or(Game::CoinRun);
    let batch = a.batch.or(ctx.file.batch).unwrap_or(64);
    let mut args = vec![
        ("game", game.to_string()),
        ("batch", batch.to_string()),
        ("steps", a.steps.to_string()),
    ];
    if let Some(r) = a.render {
        args.push(("render", r.to_string()));
    }
    ctx.effective("bench-throughput", &args)?;
    let modes: &[bool] = match a.render {
        Some(true) => &[true],
        Some(false) => &[false],
        None => &[false, true],
    };
    for &render in modes {
        let rate = measure_throughput(game, batch, a.steps, render, ctx.master_seed, ctx.jobs)?;
        ctx.say(format!("game={game} batch={batch} render={render} steps_per_sec={rate:.1}"))?;
    }
    Ok(EXIT_OK)
}
