use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use robusteq::format::make_game_with_limits;
use robusteq::game::make_matching_game_with;
use robusteq::robustness::remaining_players;
use robusteq::{
    br_dynamics, check_profile, defection_report, direction_invariance_check, find_pure_robust, oracle_is_robust,
    parse_strategy_shorthand, robust_set_scan, sensitivity_check, sensitivity_scan, ActionSet, DynamicsConfig,
    FrequencyVector, Game, GameDocument, Limits, Profile, ProfileDocument, Rational, ResponseRule, Scalar, TieRule,
};

#[derive(Parser)]
#[command(
    name = "robusteq",
    version,
    about = "Verify and search for defection-robust equilibria in anonymous games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a game file from a builtin generator.
    Gen(GenArgs),
    /// Check a profile against every choice of alpha defectors.
    Verify(VerifyArgs),
    /// Print the defection index of a profile.
    Index(IndexArgs),
    /// Search for robust profiles.
    Solve(SolveArgs),
    /// Robust-action sets over a grid of symmetric strategies (CSV).
    Scan(ScanArgs),
    /// Run the sufficient conditions for a non-empty robust-action set.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Matching,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    Inclusive,
    Strict,
}

impl From<Tie> for TieRule {
    fn from(tie: Tie) -> Self {
        match tie {
            Tie::Inclusive => TieRule::Inclusive,
            Tie::Strict => TieRule::Strict,
        }
    }
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compact single-line JSON.
    #[arg(long)]
    canonical: bool,
}

#[derive(Args)]
struct GameInput {
    #[arg(long)]
    game: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    builtin: Builtin,
    #[arg(long)]
    players: usize,
    #[arg(long)]
    actions: usize,
    #[arg(long, value_enum, default_value = "inclusive")]
    tie: Tie,
    /// Write the full utility table instead of the builtin reference.
    #[arg(long)]
    expand: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: GameInput,
    /// `pure:<label>`, `mixed:p1,p2,...` or a profile file.
    #[arg(long)]
    profile: String,
    #[arg(long)]
    alpha: usize,
    /// Cross-check with the brute-force oracle; disagreement exits with 2.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mixed defector profiles sampled by the oracle.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct IndexArgs {
    #[command(flatten)]
    input: GameInput,
    #[arg(long)]
    profile: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: GameInput,
    #[arg(long)]
    alpha: usize,
    /// Also run best-response dynamics from this symmetric strategy.
    #[arg(long)]
    init: Option<String>,
    #[arg(long, default_value = "1")]
    damping: String,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Pure response on the lowest robust action instead of the uniform mixture.
    #[arg(long)]
    lowest: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    input: GameInput,
    #[arg(long)]
    alpha: usize,
    /// Grid denominator.
    #[arg(long)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: GameInput,
    /// Symmetric strategy of the normal players.
    #[arg(long)]
    profile: String,
    #[arg(long)]
    alpha: usize,
    /// Single base configuration, e.g. `3,0,0`; all configurations when absent.
    #[arg(long)]
    base: Option<String>,
    /// Direction tolerance; 0 compares directions exactly.
    #[arg(long, default_value = "0")]
    tolerance: String,
    #[command(flatten)]
    output: Output,
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Positive,
    Negative,
}

type Outcome = Result<Verdict, String>;

fn verdict(positive: bool) -> Verdict {
    if positive {
        Verdict::Positive
    } else {
        Verdict::Negative
    }
}

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(output: &Output, value: &Value) -> Result<(), String> {
    let mut text = if output.canonical {
        serde_json::to_string(value)
    } else {
        serde_json::to_string_pretty(value)
    }
    .map_err(fail)?;
    text.push('\n');
    emit_text(output.out.as_deref(), &text)
}

fn load_game<S: Scalar>(path: &Path, limits: Limits) -> Result<Game<S>, String> {
    let doc = GameDocument::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    make_game_with_limits(&doc, limits).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_profile<S: Scalar>(spec: &str, actions: &ActionSet) -> Result<Profile<S>, String> {
    if spec.starts_with("pure:") || spec.starts_with("mixed:") {
        return parse_strategy_shorthand(spec, actions)
            .map(Profile::symmetric)
            .map_err(fail);
    }
    let path = Path::new(spec);
    let doc = ProfileDocument::from_json(&read(path)?).map_err(|e| format!("{spec}: {e}"))?;
    doc.into_profile(actions).map_err(|e| format!("{spec}: {e}"))
}

fn gen(args: &GenArgs, limits: Limits) -> Outcome {
    let Builtin::Matching = args.builtin;
    let actions = ActionSet::numbered(args.actions).map_err(fail)?;
    let game: Game<Rational> = make_matching_game_with(args.players, actions, args.tie.into(), limits).map_err(fail)?;
    let doc = GameDocument::from_game(&game, args.expand);
    emit_json(&args.output, &json!(doc))?;
    Ok(Verdict::Positive)
}

fn verify<S: Scalar>(args: &VerifyArgs, limits: Limits) -> Outcome {
    let game: Game<S> = load_game(&args.input.game, limits)?;
    let profile: Profile<S> = load_profile(&args.profile, game.actions())?;
    let check = check_profile(&game, &profile, args.alpha).map_err(fail)?;
    let mut doc = json!(check.to_document(game.actions()));
    let mut disagreement = None;
    if args.oracle {
        let full = profile.expand(game.n_players()).map_err(fail)?;
        let mut verdicts = Vec::new();
        for case in &check.cases {
            let normals = Profile::asymmetric(remaining_players(&full, &case.defectors));
            let verdict = oracle_is_robust(&game, &normals, args.alpha, args.samples, args.seed).map_err(fail)?;
            if verdict.robust != case.is_robust() {
                disagreement = Some(format!(
                    "oracle disagrees for defectors {:?}: main path {}, oracle {}",
                    case.defectors,
                    case.is_robust(),
                    verdict.robust
                ));
            }
            verdicts.push(json!(verdict.to_document()));
        }
        doc["oracle"] = Value::Array(verdicts);
        doc["oracle_agrees"] = json!(disagreement.is_none());
    }
    emit_json(&args.output, &doc)?;
    match disagreement {
        Some(message) => Err(message),
        None => Ok(verdict(check.robust)),
    }
}

fn index<S: Scalar>(args: &IndexArgs, limits: Limits) -> Outcome {
    let game: Game<S> = load_game(&args.input.game, limits)?;
    let profile: Profile<S> = load_profile(&args.profile, game.actions())?;
    let report = defection_report(&game, &profile).map_err(fail)?;
    println!("{}", report.index);
    if args.output.out.is_some() {
        emit_json(&args.output, &json!(report.to_document(game.actions())))?;
    }
    Ok(verdict(report.index >= 0))
}

fn solve<S: Scalar>(args: &SolveArgs, limits: Limits) -> Outcome {
    let game: Game<S> = load_game(&args.input.game, limits)?;
    let pure = find_pure_robust(&game, args.alpha).map_err(fail)?;
    let mut found = !pure.robust_profiles.is_empty();
    let mut doc = json!({ "pure": pure.to_document(game.actions()) });
    if let Some(init) = &args.init {
        let init = parse_strategy_shorthand(init, game.actions()).map_err(fail)?;
        let config = DynamicsConfig {
            max_iters: args.max_iters,
            damping: S::parse_scalar(&args.damping).map_err(fail)?,
            rule: if args.lowest {
                ResponseRule::Lowest
            } else {
                ResponseRule::Uniform
            },
        };
        let report = br_dynamics(&game, args.alpha, &init, &config).map_err(fail)?;
        found |= !report.robust_profiles.is_empty();
        doc["dynamics"] = json!(report.to_document(game.actions()));
    }
    emit_json(&args.output, &doc)?;
    Ok(verdict(found))
}

fn scan<S: Scalar>(args: &ScanArgs, limits: Limits) -> Outcome {
    let game: Game<S> = load_game(&args.input.game, limits)?;
    let report = robust_set_scan(&game, args.alpha, args.grid).map_err(fail)?;
    emit_text(args.out.as_deref(), &report.to_csv(game.actions().labels()))?;
    Ok(Verdict::Positive)
}

fn parse_config(text: &str) -> Result<FrequencyVector, String> {
    let counts = text
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad configuration {text:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FrequencyVector::new(counts))
}

fn check<S: Scalar>(args: &CheckArgs, limits: Limits) -> Outcome {
    let game: Game<S> = load_game(&args.input.game, limits)?;
    let profile: Profile<S> = load_profile(&args.profile, game.actions())?;
    if !profile.is_symmetric() {
        return Err("check takes a symmetric profile (pure:<label> or mixed:...)".into());
    }
    let reports = match &args.base {
        Some(base) => vec![sensitivity_check(&game, &profile, args.alpha, &parse_config(base)?).map_err(fail)?],
        None => sensitivity_scan(&game, &profile, args.alpha).map_err(fail)?,
    };
    let tolerance = S::parse_scalar(&args.tolerance).map_err(fail)?;
    let direction = direction_invariance_check(&game, &profile, args.alpha, &tolerance).map_err(fail)?;
    let certified = direction.invariant || reports.iter().any(|r| r.holds);
    let doc = json!({
        "sensitivity": reports.iter().map(|r| json!(r.to_document(game.actions()))).collect::<Vec<_>>(),
        "direction": json!(direction.to_document(game.actions())),
    });
    emit_json(&args.output, &doc)?;
    Ok(verdict(certified))
}

fn run(cli: &Cli) -> Outcome {
    let limits = Limits::from_env().map_err(fail)?;
    macro_rules! by_mode {
        ($f:ident, $args:expr) => {
            match $args.input.mode {
                Mode::Exact => $f::<Rational>($args, limits),
                Mode::Numeric => $f::<f64>($args, limits),
            }
        };
    }
    match &cli.command {
        Command::Gen(args) => gen(args, limits),
        Command::Verify(args) => by_mode!(verify, args),
        Command::Index(args) => by_mode!(index, args),
        Command::Solve(args) => by_mode!(solve, args),
        Command::Scan(args) => by_mode!(scan, args),
        Command::Check(args) => by_mode!(check, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Verdict::Positive) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
