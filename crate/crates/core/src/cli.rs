//! Command-line front end. Verdicts go to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 success or `true`, 1 `false` or a failed check, 2 I/O or
//! schema error, 3 violated precondition (the assumption is named).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::construct::{from_objective_ce, from_subjective_ce, ConstructError, ConstructionOutput};
use crate::coordination::{
    check_self_enforcing, check_strategy_valid, induce, verify_induced_equilibrium, CoordinationStrategy,
    EquilibriumKind, StrategyFile,
};
use crate::formula::{expand, parse, Formula, Vocabulary};
use crate::game::{solve_ce, total_payoff_objective, DistributionFile, Game, GameFile, PlayerId};
use crate::par::Execution;
use crate::semantics::Checker;
use crate::structure::{
    check_assumption1, check_assumption2, check_assumption3, check_individual_rationality, check_prior_positivity,
    check_signal_definitions, EpistemicStructure, StructureError, StructureFile, Verdict,
};
use crate::sweep::{objective_sweep, subjective_sweep};

#[derive(Debug, Parser)]
#[command(name = "epicoord", version, about = "Epistemic model checking and correlated-equilibrium coordination")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the canonical and expanded forms of a formula.
    Parse {
        #[arg(long)]
        game: PathBuf,
        /// Structure supplying declared signals and atoms.
        #[arg(long)]
        structure: Option<PathBuf>,
        formula: String,
    },
    /// Decide a formula at one state for one viewer.
    Check {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long)]
        player: String,
        formula: String,
    },
    /// Report every structural assumption, and the strategy checks if given.
    Validate {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        strategy: Option<PathBuf>,
    },
    /// Print the distribution induced for each viewer (or one).
    Induce {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long)]
        player: Option<String>,
    },
    /// Induce distributions and check the matching equilibrium notion.
    Verify {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Build a structure, strategy and signal map from an equilibrium.
    Construct {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, conflicts_with = "subjective", required_unless_present = "subjective")]
        objective: Option<PathBuf>,
        /// One distribution file per player.
        #[arg(long, num_args = 1..)]
        subjective: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve for a correlated equilibrium maximizing an objective (total payoff by default).
    SolveCe {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        objective: Option<PathBuf>,
    },
    /// Run the seeded random round-trip sweep.
    Sweep {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_enum, default_value_t = SweepKind::Objective)]
        kind: SweepKind,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Objective,
    Subjective,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Precondition { assumption: String, detail: String },
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Precondition { .. } => 3,
        }
    }
}

impl From<StructureError> for Failure {
    fn from(e: StructureError) -> Self {
        match e {
            StructureError::Schema(msg) => Failure::Input(msg),
            StructureError::Precondition { assumption, detail } => {
                Failure::Precondition { assumption: assumption.to_string(), detail }
            }
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<Game, Failure> {
    read_json::<GameFile>(path)?.into_game().map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path, game: &Game) -> Result<EpistemicStructure, Failure> {
    Ok(read_json::<StructureFile>(path)?.into_structure(game)?)
}

fn load_strategy(path: &Path, m: &EpistemicStructure) -> Result<CoordinationStrategy, Failure> {
    read_json::<StrategyFile>(path)?
        .into_strategy(m.game(), &m.signal_names())
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn find_player(game: &Game, token: &str) -> Result<PlayerId, Failure> {
    game.find_player(token).ok_or_else(|| Failure::Input(format!("unknown player `{token}`")))
}

fn parse_in(m: &EpistemicStructure, text: &str) -> Result<Formula, Failure> {
    let vocab = m.vocabulary();
    parse(text, &vocab.get()).map_err(|e| Failure::Input(format!("formula: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

fn require_valid_strategy(m: &EpistemicStructure, c: &CoordinationStrategy) -> Result<(), Failure> {
    let report = check_strategy_valid(m, c);
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Precondition { assumption: "strategy validity".into(), detail: report.to_string() })
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(failure) => {
            let _ = match &failure {
                Failure::Input(msg) => writeln!(err, "error: {msg}"),
                Failure::Precondition { assumption, detail } => {
                    writeln!(err, "precondition failed: {assumption}: {detail}")
                }
            };
            failure.code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| Failure::Input(e.to_string());
    match command {
        Command::Parse { game, structure, formula } => {
            let game = load_game(&game)?;
            let f = match structure {
                Some(path) => parse_in(&load_structure(&path, &game)?, &formula)?,
                None => {
                    parse(&formula, &Vocabulary::new(&game)).map_err(|e| Failure::Input(format!("formula: {e}")))?
                }
            };
            writeln!(out, "canonical: {f}").map_err(io)?;
            writeln!(out, "expanded: {}", expand(&f, &game)).map_err(io)?;
            Ok(0)
        }
        Command::Check { game, structure, state, player, formula } => {
            let game = load_game(&game)?;
            let m = load_structure(&structure, &game)?;
            let f = parse_in(&m, &formula)?;
            let p = find_player(&game, &player)?;
            let s = m.state_index(&state).ok_or_else(|| Failure::Input(format!("unknown state `{state}`")))?;
            let verdict = Checker::new(&m).holds(s, p, &f);
            writeln!(out, "{verdict}").map_err(io)?;
            Ok(if verdict { 0 } else { 1 })
        }
        Command::Validate { game, structure, strategy } => {
            let game = load_game(&game)?;
            let m = load_structure(&structure, &game)?;
            let mut lines: Vec<(&str, bool, String)> = Vec::new();
            let a1 = check_assumption1(&m);
            lines.push(("Assumption 1", a1.passed(), a1.to_string()));
            let a2 = check_assumption2(&m);
            lines.push(("Assumption 2", a2.passed(), a2.to_string()));
            let a3 = check_assumption3(&m);
            lines.push(("Assumption 3", a3.passed(), a3.to_string()));
            let pos = check_prior_positivity(&m);
            lines.push(("prior positivity", pos.passed(), pos.to_string()));
            let a4 = check_individual_rationality(&m);
            lines.push(("Assumption 4", a4.passed(), a4.to_string()));
            let defs = check_signal_definitions(&m);
            lines.push(("signal definitions", defs.passed(), defs.to_string()));
            if let Some(path) = strategy {
                let c = load_strategy(&path, &m)?;
                let sv = check_strategy_valid(&m, &c);
                lines.push(("strategy validity", sv.passed(), sv.to_string()));
                let se = check_self_enforcing(&m, &c);
                lines.push(("self-enforcement", se.passed(), se.to_string()));
            }
            for (name, _, text) in &lines {
                writeln!(out, "{name}: {text}").map_err(io)?;
            }
            Ok(if lines.iter().all(|(_, ok, _)| *ok) { 0 } else { 1 })
        }
        Command::Induce { game, structure, strategy, player } => {
            let game = load_game(&game)?;
            let m = load_structure(&structure, &game)?;
            let c = load_strategy(&strategy, &m)?;
            require_valid_strategy(&m, &c)?;
            let viewers: Vec<PlayerId> = match player {
                Some(token) => vec![find_player(&game, &token)?],
                None => game.players().collect(),
            };
            let mut table = indexmap::IndexMap::new();
            for p in viewers {
                let d = induce(&m, p)
                    .map_err(|e| Failure::Precondition { assumption: "Assumption 3".into(), detail: e.to_string() })?;
                table.insert(game.player_name(p).to_string(), d.to_file(&game));
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&table).expect("serializable")).map_err(io)?;
            Ok(0)
        }
        Command::Verify { game, structure, strategy } => {
            let game = load_game(&game)?;
            let m = load_structure(&structure, &game)?;
            let c = load_strategy(&strategy, &m)?;
            let v = verify_induced_equilibrium(&m, &c);
            for issue in &v.issues {
                writeln!(err, "precondition: {issue}").map_err(io)?;
            }
            for (p, d) in game.players().zip(&v.distributions) {
                writeln!(out, "gamma_{}: {}", game.player_name(p), to_json(&d.to_file(&game))).map_err(io)?;
            }
            let label = match v.kind {
                EquilibriumKind::Objective => "objective CE",
                EquilibriumKind::Subjective => "subjective CE",
            };
            match &v.verdict {
                Some(verdict) => {
                    writeln!(out, "{label}: {}", verdict.holds()).map_err(io)?;
                    for c in &verdict.violations {
                        writeln!(err, "violated: {}", c.describe(&game)).map_err(io)?;
                    }
                }
                None => writeln!(out, "{label}: undetermined").map_err(io)?,
            }
            Ok(if v.holds() { 0 } else { 1 })
        }
        Command::Construct { game, objective, subjective, out: dir } => {
            let game = load_game(&game)?;
            let refuse = |e: ConstructError| match e {
                ConstructError::NotEquilibrium(v) => Failure::Precondition {
                    assumption: "equilibrium".into(),
                    detail: v.violations.iter().map(|c| c.describe(&game)).collect::<Vec<_>>().join("; "),
                },
                ConstructError::Game(e) => Failure::Input(e.to_string()),
            };
            let output: ConstructionOutput = match objective {
                Some(path) => {
                    let d = read_json::<DistributionFile>(&path)?
                        .into_distribution(&game)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    from_objective_ce(&game, &d).map_err(refuse)?
                }
                None => {
                    let ds = subjective
                        .iter()
                        .map(|path| {
                            read_json::<DistributionFile>(path)?
                                .into_distribution(&game)
                                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    from_subjective_ce(&game, &ds).map_err(refuse)?
                }
            };
            fs::create_dir_all(&dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
            write_json(&dir.join("structure.json"), &output.structure_file())?;
            write_json(&dir.join("strategy.json"), &output.strategy_file())?;
            write_json(&dir.join("signal_maps.json"), &output.signal_map_file())?;
            writeln!(err, "wrote structure.json, strategy.json, signal_maps.json to {}", dir.display()).map_err(io)?;
            Ok(0)
        }
        Command::SolveCe { game, objective } => {
            let game = load_game(&game)?;
            let objective = match objective {
                Some(path) => read_json::<DistributionFile>(&path)?
                    .to_vector(&game)
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
                None => total_payoff_objective(&game),
            };
            let d = solve_ce(&game, &objective).map_err(|e| Failure::Input(e.to_string()))?;
            writeln!(out, "{}", serde_json::to_string_pretty(&d.to_file(&game)).expect("serializable")).map_err(io)?;
            Ok(0)
        }
        Command::Sweep { seed, count, kind, sequential } => {
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let reports = match kind {
                SweepKind::Objective => objective_sweep(seed, count, exec),
                SweepKind::Subjective => subjective_sweep(seed, count, exec),
            };
            for r in &reports {
                let status = if r.passed() { "pass".to_string() } else { format!("FAIL ({})", r.failures.join(", ")) };
                writeln!(
                    out,
                    "instance {}: players {} actions {:?} states {}: {status}",
                    r.index, r.players, r.actions, r.states
                )
                .map_err(io)?;
            }
            let passed = reports.iter().filter(|r| r.passed()).count();
            writeln!(out, "{passed}/{} instances passed", reports.len()).map_err(io)?;
            Ok(if passed == reports.len() { 0 } else { 1 })
        }
    }
}
