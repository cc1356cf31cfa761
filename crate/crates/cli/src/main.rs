use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use qgames_core::equilibria::{grid_nash, EquilibriumReport, GridOptions};
use qgames_core::games::{
    game_by_name, gvw_honest_state, gvw_interpolated_state, search_domains, Bit, GvwSetup, Variant,
    GAME_NAMES,
};
use qgames_core::market::{min_risk_inclination, risk_spectrum, RiskOscillator};
use qgames_core::numfmt::to_json;
use qgames_core::protocols::{
    simulate_gvw, simulate_wiesner, sweep, write_sweep_csv, BobPolicy, ProtocolResult, SimConfig,
    TrentPolicy,
};
use qgames_core::quantum::{measure_probs, StateVector};
use qgames_core::strategy_spec::parse_strategy;
use qgames_core::{play, Player, QuantumGame, Strategy};

const SCHEMA: &str = "qgames/1";

#[derive(Parser, Serialize)]
#[command(
    name = "qgames",
    version,
    about = "Quantum games: play, solve, simulate"
)]
struct Cli {
    /// Worker threads for grid searches and simulations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write a run manifest (command, parameters, seed, checksum) here.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Play one strategy profile and print expected payoffs.
    Play {
        game: String,
        /// Strategy of player A, e.g. "pure:N" or "mixed:0.5".
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Strategy of player B, e.g. "u2:0.785,0,0;0.785,0,0".
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Grid search for epsilon-Nash profiles.
    Nash {
        game: String,
        #[arg(long, default_value_t = 21)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
    },
    /// Seeded Monte Carlo runs of a protocol.
    #[command(subcommand)]
    Simulate(Protocol),
    /// Risk-inclination oscillator quantities.
    Market(MarketArgs),
    /// List available games.
    ListGames,
}

#[derive(Args, Serialize)]
struct Common {
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    rounds: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Protocol {
    /// Repeated identification rounds against a forging Bob.
    Wiesner {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = VariantArg::Hadamard)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = TrentArg::Haar)]
        trent: TrentArg,
        #[arg(long, value_enum, default_value_t = BobArg::UniformGuess)]
        bob: BobArg,
        /// Emit CSV rows for each round count in N1..N2 instead of JSON.
        #[arg(long, value_parser = parse_range)]
        sweep: Option<(u32, u32)>,
    },
    /// Two-box gambling sessions.
    Gvw {
        #[command(flatten)]
        common: Common,
        /// honest, a, b, or interp:T for T in [0, 1] (honest at 0, box a at 1).
        #[arg(long, default_value = "honest")]
        alice: String,
        /// Probability that Bob verifies instead of opening box b.
        #[arg(long, default_value_t = 0.0)]
        v: f64,
        /// Reward when verification exposes a cheat.
        #[arg(long, default_value_t = 2.0)]
        r: f64,
    },
}

#[derive(Args, Serialize)]
struct MarketArgs {
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = std::f64::consts::TAU, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long = "hbar-e", default_value_t = 1.0, allow_hyphen_values = true)]
    hbar_e: f64,
    #[arg(long = "big-theta", default_value_t = 0.0, allow_hyphen_values = true)]
    big_theta: f64,
    /// Number of ladder levels to print.
    #[arg(long, default_value_t = 5)]
    levels: u32,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum VariantArg {
    Swap,
    Hadamard,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TrentArg {
    Haar,
    TwoPoint,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BobArg {
    UniformGuess,
    Fixed0,
    Fixed1,
    CopyAfterMeasure,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected N1..N2, got `{s}`"))?;
    let a: u32 = a
        .trim()
        .parse()
        .map_err(|_| format!("bad range start `{a}`"))?;
    let b: u32 = b
        .trim()
        .parse()
        .map_err(|_| format!("bad range end `{b}`"))?;
    if a == 0 || a > b {
        return Err(format!("range must satisfy 1 <= N1 <= N2, got {a}..{b}"));
    }
    Ok((a, b))
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("unknown {0}")]
    Unknown(String),
    #[error("{0}")]
    Invalid(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Unknown(_) => 2,
            CliError::Invalid(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<qgames_core::Error> for CliError {
    fn from(e: qgames_core::Error) -> Self {
        use qgames_core::Error as E;
        match e {
            E::Serialization(_)
            | E::NotHermitian(_)
            | E::NotPositive(_)
            | E::InvalidTrace(_)
            | E::NotUnitary(_)
            | E::NotTracePreserving(_) => CliError::Internal(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

/// A command's output: JSON text or CSV, plus the seed it used.
struct Output {
    text: String,
    seed: Option<u64>,
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(to_json(value)? + "\n")
}

fn lookup_game(name: &str) -> Result<QuantumGame, CliError> {
    game_by_name(name).ok_or_else(|| {
        CliError::Unknown(format!("game `{name}` (known: {})", GAME_NAMES.join(", ")))
    })
}

fn spec(text: &str, game: &QuantumGame, player: Player) -> Result<Strategy, CliError> {
    parse_strategy(text, game, player)
        .map_err(|e| CliError::Invalid(format!("strategy for {player}: {e}")))
}

#[derive(Serialize)]
struct Strategies<'a> {
    a: &'a str,
    b: &'a str,
}

#[derive(Serialize)]
struct PlayOut<'a> {
    schema: &'static str,
    game: &'a str,
    strategies: Strategies<'a>,
    payoff_a: f64,
    payoff_b: f64,
    final_probs: Vec<f64>,
}

fn cmd_play(name: &str, a: &str, b: &str) -> Result<Output, CliError> {
    let game = lookup_game(name)?;
    let sa = spec(a, &game, Player::A)?;
    let sb = spec(b, &game, Player::B)?;
    let (rho, pay) = play(&game, &sa, &sb)?;
    Ok(Output {
        text: json(&PlayOut {
            schema: SCHEMA,
            game: name,
            strategies: Strategies { a, b },
            payoff_a: pay.p_a,
            payoff_b: pay.p_b,
            final_probs: measure_probs(&rho),
        })?,
        seed: None,
    })
}

#[derive(Serialize)]
struct NashOut<'a> {
    schema: &'static str,
    game: &'a str,
    #[serde(flatten)]
    report: EquilibriumReport,
}

fn cmd_nash(name: &str, resolution: usize, epsilon: f64) -> Result<Output, CliError> {
    let game = lookup_game(name)?;
    let (da, db) = search_domains(&game);
    let report = grid_nash(
        &game,
        &da,
        &db,
        GridOptions {
            resolution,
            epsilon,
        },
    )?;
    Ok(Output {
        text: json(&NashOut {
            schema: SCHEMA,
            game: name,
            report,
        })?,
        seed: None,
    })
}

#[derive(Serialize)]
struct SimOut<'a> {
    schema: &'static str,
    protocol: &'a str,
    #[serde(flatten)]
    result: ProtocolResult,
}

fn sim_config(c: &Common) -> SimConfig {
    SimConfig::new(c.trials, c.rounds, c.seed)
}

fn alice_state(spec: &str) -> Result<StateVector, CliError> {
    let bad = || {
        CliError::Invalid(format!(
            "--alice must be honest, a, b or interp:T, got `{spec}`"
        ))
    };
    Ok(match spec {
        "honest" => gvw_honest_state(),
        "a" => StateVector::basis(2, 0)?,
        "b" => StateVector::basis(2, 1)?,
        other => {
            let t: f64 = other
                .strip_prefix("interp:")
                .ok_or_else(bad)?
                .parse()
                .map_err(|_| bad())?;
            gvw_interpolated_state(t)?
        }
    })
}

fn cmd_simulate(p: &Protocol) -> Result<Output, CliError> {
    match p {
        Protocol::Wiesner {
            common,
            variant,
            trent,
            bob,
            sweep: range,
        } => {
            let mut cfg = sim_config(common);
            cfg.variant = match variant {
                VariantArg::Swap => Variant::Swap,
                VariantArg::Hadamard => Variant::Hadamard,
            };
            cfg.trent_policy = match trent {
                TrentArg::Haar => TrentPolicy::Haar,
                TrentArg::TwoPoint => TrentPolicy::TwoPoint,
            };
            cfg.bob_policy = match bob {
                BobArg::UniformGuess => BobPolicy::UniformGuess,
                BobArg::Fixed0 => BobPolicy::FixedBit(Bit::Zero),
                BobArg::Fixed1 => BobPolicy::FixedBit(Bit::One),
                BobArg::CopyAfterMeasure => BobPolicy::CopyAfterMeasure,
            };
            log::info!(
                "wiesner: {} trials, seed {}, variant {}",
                cfg.trials,
                cfg.master_seed,
                cfg.variant
            );
            let text = match range {
                Some((lo, hi)) => {
                    let rows = sweep(&cfg, *lo..=*hi)?;
                    let mut buf = Vec::new();
                    write_sweep_csv(&rows, &mut buf)?;
                    String::from_utf8(buf).map_err(|e| CliError::Internal(e.to_string()))?
                }
                None => json(&SimOut {
                    schema: SCHEMA,
                    protocol: "wiesner",
                    result: simulate_wiesner(&cfg)?,
                })?,
            };
            Ok(Output {
                text,
                seed: Some(cfg.master_seed),
            })
        }
        Protocol::Gvw {
            common,
            alice,
            v,
            r,
        } => {
            let setup = GvwSetup::new(alice_state(alice)?, *r, *v)?;
            let cfg = sim_config(common);
            log::info!("gvw: {} trials, seed {}", cfg.trials, cfg.master_seed);
            Ok(Output {
                text: json(&SimOut {
                    schema: SCHEMA,
                    protocol: "gvw",
                    result: simulate_gvw(&setup, &cfg)?,
                })?,
                seed: Some(cfg.master_seed),
            })
        }
    }
}

#[derive(Serialize)]
struct MarketOut {
    schema: &'static str,
    omega: f64,
    hbar_eff: f64,
    e0: f64,
    h_e: f64,
    levels: Vec<f64>,
}

fn cmd_market(a: &MarketArgs) -> Result<Output, CliError> {
    let o = RiskOscillator::new(a.m, a.theta, a.hbar_e, a.big_theta)?;
    Ok(Output {
        text: json(&MarketOut {
            schema: SCHEMA,
            omega: o.omega(),
            hbar_eff: o.hbar_eff(),
            e0: risk_spectrum(&o, 0),
            h_e: min_risk_inclination(&o),
            levels: (0..a.levels).map(|n| risk_spectrum(&o, n)).collect(),
        })?,
        seed: None,
    })
}

#[derive(Serialize)]
struct GameInfo {
    name: &'static str,
    dim: usize,
    turns: Vec<String>,
    moves_a: Vec<String>,
    moves_b: Vec<String>,
    zero_sum: bool,
}

#[derive(Serialize)]
struct ListOut {
    schema: &'static str,
    games: Vec<GameInfo>,
    protocols: [&'static str; 2],
}

fn cmd_list() -> Result<Output, CliError> {
    let labels = |g: &QuantumGame, p| g.space(p).moves.iter().map(|m| m.label.clone()).collect();
    let games = GAME_NAMES
        .iter()
        .map(|&name| {
            let g = game_by_name(name).expect("listed games exist");
            GameInfo {
                name,
                dim: g.dim(),
                turns: g.schedule().turns().iter().map(|p| p.to_string()).collect(),
                moves_a: labels(&g, Player::A),
                moves_b: labels(&g, Player::B),
                zero_sum: g.is_zero_sum(),
            }
        })
        .collect();
    Ok(Output {
        text: json(&ListOut {
            schema: SCHEMA,
            games,
            protocols: ["wiesner", "gvw"],
        })?,
        seed: None,
    })
}

#[derive(Serialize)]
struct RunManifest<'a> {
    schema: &'static str,
    command: String,
    argv: &'a [String],
    parameters: &'a Cli,
    seed: Option<u64>,
    version: &'static str,
    output_sha256: String,
}

fn run(cli: &Cli, argv: &[String]) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let out = match &cli.command {
        Command::Play { game, a, b } => cmd_play(game, a, b)?,
        Command::Nash {
            game,
            resolution,
            epsilon,
        } => cmd_nash(game, *resolution, *epsilon)?,
        Command::Simulate(p) => cmd_simulate(p)?,
        Command::Market(m) => cmd_market(m)?,
        Command::ListGames => cmd_list()?,
    };
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(out.text.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::Internal(format!("writing output: {e}")))?;

    if let Some(path) = &cli.manifest {
        let manifest = RunManifest {
            schema: SCHEMA,
            command: argv.join(" "),
            argv,
            parameters: cli,
            seed: out.seed,
            version: env!("CARGO_PKG_VERSION"),
            output_sha256: format!("{:x}", Sha256::digest(out.text.as_bytes())),
        };
        std::fs::write(path, json(&manifest)?)
            .map_err(|e| CliError::Invalid(format!("writing manifest {}: {e}", path.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand => 2,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_codes() {
        use qgames_core::Error as E;
        assert_eq!(CliError::Unknown("x".into()).code(), 2);
        assert_eq!(CliError::from(E::InvalidParameter("x".into())).code(), 3);
        assert_eq!(CliError::from(E::NotHermitian(1.0)).code(), 4);
        assert_eq!(CliError::from(E::Serialization("x".into())).code(), 4);
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..10"), Ok((1, 10)));
        assert_eq!(parse_range("3..3"), Ok((3, 3)));
        assert!(parse_range("0..3").is_err());
        assert!(parse_range("4..3").is_err());
        assert!(parse_range("4").is_err());
    }
}
