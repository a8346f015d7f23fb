//! Coordination strategies: tables from (player, signal) to action, rendered
//! as `rec_i σ -> pl_i a` formulas, with checks for validity in a structure,
//! self-enforcement, and the distributions they induce.

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::formula::{Atom, Formula};
use crate::game::{check_objective_ce, check_subjective_ce, CeVerdict, Distribution, Game, PlayerId};
use crate::rational::Rational;
use crate::semantics::Checker;
use crate::stateset::StateSet;
use crate::structure::{
    check_assumption1, check_assumption2, check_assumption3, check_individual_rationality, check_prior_positivity,
    is_common_interpretation, EpistemicStructure, Verdict,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrategyError {
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("unknown signal `{signal}` for player {player}")]
    UnknownSignal { player: String, signal: String },
    #[error("unknown action `{action}` for player {player}")]
    UnknownAction { player: String, action: String },
    #[error("player {player} has no recommendation for signal `{signal}`")]
    Missing { player: String, signal: String },
}

/// A total map `(player, signal) -> action`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinationStrategy {
    signals: Vec<String>,
    /// `table[player][signal]` is an action index.
    table: Vec<Vec<usize>>,
}

impl CoordinationStrategy {
    /// `table[i][k]` is the action index recommended to player `i` on signal `k`.
    pub fn new(game: &Game, signals: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, StrategyError> {
        if table.len() != game.num_players() {
            return Err(StrategyError::Missing {
                player: (table.len() + 1).to_string(),
                signal: signals.first().cloned().unwrap_or_default(),
            });
        }
        for p in game.players() {
            let row = &table[p.0];
            if row.len() != signals.len() {
                let k = row.len().min(signals.len().saturating_sub(1));
                return Err(StrategyError::Missing { player: game.player_name(p).into(), signal: signals[k].clone() });
            }
            if let Some(&a) = row.iter().find(|&&a| a >= game.actions(p).len()) {
                return Err(StrategyError::UnknownAction { player: game.player_name(p).into(), action: a.to_string() });
            }
        }
        Ok(CoordinationStrategy { signals, table })
    }

    pub fn signals(&self) -> &[String] {
        &self.signals
    }

    /// Action index recommended to `player` on signal index `signal`.
    pub fn action(&self, player: PlayerId, signal: usize) -> usize {
        self.table[player.0][signal]
    }

    /// `rec_i σ -> pl_i c(i,σ)` in player order, then signal order.
    pub fn as_formulas(&self, game: &Game) -> Vec<Formula> {
        game.players()
            .flat_map(|p| {
                self.signals.iter().enumerate().map(move |(k, sig)| {
                    Formula::implies(
                        Formula::receive(p, sig.clone()),
                        Formula::play(p, game.actions(p)[self.table[p.0][k]].clone()),
                    )
                })
            })
            .collect()
    }

    pub fn to_file(&self, game: &Game) -> StrategyFile {
        StrategyFile(
            game.players()
                .map(|p| {
                    let row = self
                        .signals
                        .iter()
                        .enumerate()
                        .map(|(k, sig)| (sig.clone(), game.actions(p)[self.table[p.0][k]].clone()))
                        .collect();
                    (game.player_name(p).to_string(), row)
                })
                .collect(),
        )
    }
}

/// On-disk strategy schema: player ↦ signal ↦ action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrategyFile(pub IndexMap<String, IndexMap<String, String>>);

impl StrategyFile {
    pub fn into_strategy(self, game: &Game, signals: &[String]) -> Result<CoordinationStrategy, StrategyError> {
        let mut rows: Vec<Option<Vec<usize>>> = vec![None; game.num_players()];
        for (player, row) in &self.0 {
            let p = game.find_player(player).ok_or_else(|| StrategyError::UnknownPlayer(player.clone()))?;
            let mut table = vec![usize::MAX; signals.len()];
            for (sig, action) in row {
                let k = signals
                    .iter()
                    .position(|s| s == sig)
                    .ok_or_else(|| StrategyError::UnknownSignal { player: player.clone(), signal: sig.clone() })?;
                table[k] = game
                    .action_index(p, action)
                    .ok_or_else(|| StrategyError::UnknownAction { player: player.clone(), action: action.clone() })?;
            }
            if let Some(k) = table.iter().position(|&a| a == usize::MAX) {
                return Err(StrategyError::Missing { player: player.clone(), signal: signals[k].clone() });
            }
            rows[p.0] = Some(table);
        }
        let table = rows
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.ok_or_else(|| StrategyError::Missing {
                    player: game.player_name(PlayerId(i)).into(),
                    signal: signals.first().cloned().unwrap_or_default(),
                })
            })
            .collect::<Result<_, _>>()?;
        CoordinationStrategy::new(game, signals.to_vec(), table)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyFailure {
    pub formula: Formula,
    pub viewer: PlayerId,
    pub state: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyReport {
    pub failures: Vec<StrategyFailure>,
    state_names: Vec<String>,
}

impl Verdict for StrategyReport {
    fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for StrategyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "pass");
        }
        let lines: Vec<String> = self
            .failures
            .iter()
            .map(|x| format!("`{}` false for viewer {} at {}", x.formula, x.viewer, self.state_names[x.state]))
            .collect();
        write!(f, "fail: {}", lines.join("; "))
    }
}

/// Every rendered formula is valid in `m`.
pub fn check_strategy_valid(m: &EpistemicStructure, c: &CoordinationStrategy) -> StrategyReport {
    let mut checker = Checker::new(m);
    let mut failures = Vec::new();
    for formula in c.as_formulas(m.game()) {
        for viewer in m.game().players() {
            let set = checker.intension(viewer, &formula);
            for state in set.complement().iter() {
                failures.push(StrategyFailure { formula: formula.clone(), viewer, state });
            }
        }
    }
    StrategyReport { failures, state_names: m.state_names().to_vec() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnforcementIssue {
    /// No unique own signal at this state.
    NoSignal,
    /// The recommended action is not deemed played.
    NotPlayed { action: usize },
    /// The recommended action is not utility-maximizing.
    NotOptimal { action: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnforcementFailure {
    pub player: PlayerId,
    pub state: usize,
    pub issue: EnforcementIssue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnforcementReport {
    pub failures: Vec<EnforcementFailure>,
    state_names: Vec<String>,
    action_names: Vec<Vec<String>>,
}

impl Verdict for EnforcementReport {
    fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for EnforcementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "pass");
        }
        let lines: Vec<String> = self
            .failures
            .iter()
            .map(|x| {
                let at = format!("player {} at {}", x.player, self.state_names[x.state]);
                match &x.issue {
                    EnforcementIssue::NoSignal => format!("{at}: no unique own signal"),
                    EnforcementIssue::NotPlayed { action } => {
                        format!("{at}: pl({},{}) is false", x.player, self.action_names[x.player.0][*action])
                    }
                    EnforcementIssue::NotOptimal { action } => {
                        format!("{at}: opt_{}({}) is false", x.player, self.action_names[x.player.0][*action])
                    }
                }
            })
            .collect();
        write!(f, "fail: {}", lines.join("; "))
    }
}

/// At every state each player receives a unique signal, plays the recommended
/// action, and that action is utility-maximizing, all according to herself.
pub fn check_self_enforcing(m: &EpistemicStructure, c: &CoordinationStrategy) -> EnforcementReport {
    let game = m.game();
    let mut checker = Checker::new(m);
    let mut failures = Vec::new();
    for p in game.players() {
        let optimal: Vec<StateSet> =
            game.actions(p).iter().map(|a| checker.intension(p, &Formula::optimal(p, a.clone()))).collect();
        for state in 0..m.num_states() {
            let issue = match m.own_signal(p, state) {
                None => Some(EnforcementIssue::NoSignal),
                Some(k) => {
                    let action = c.action(p, k);
                    if !m.is_true(p, state, &Atom::Play(p, game.actions(p)[action].clone())) {
                        Some(EnforcementIssue::NotPlayed { action })
                    } else if !optimal[action].contains(state) {
                        Some(EnforcementIssue::NotOptimal { action })
                    } else {
                        None
                    }
                }
            };
            if let Some(issue) = issue {
                failures.push(EnforcementFailure { player: p, state, issue });
            }
        }
    }
    let action_names = game.players().map(|p| game.actions(p).to_vec()).collect();
    EnforcementReport { failures, state_names: m.state_names().to_vec(), action_names }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InduceError {
    #[error("viewer {viewer} sees no action of player {player} at state `{state}`")]
    NoAction { viewer: PlayerId, player: PlayerId, state: String },
    #[error("viewer {viewer} sees several actions of player {player} at state `{state}`")]
    SeveralActions { viewer: PlayerId, player: PlayerId, state: String },
}

/// `γ_i(a) = μ([[pl_1 a_1 ∧ … ∧ pl_n a_n]]_i)`.
pub fn induce(m: &EpistemicStructure, viewer: PlayerId) -> Result<Distribution, InduceError> {
    let game = m.game();
    let mut weights = vec![Rational::from_integer(0.into()); game.profile_count()];
    for state in 0..m.num_states() {
        let mut profile = Vec::with_capacity(game.num_players());
        for player in game.players() {
            let name = || m.state_names()[state].clone();
            match m.played(viewer, player, state).as_slice() {
                [a] => profile.push(*a),
                [] => return Err(InduceError::NoAction { viewer, player, state: name() }),
                _ => return Err(InduceError::SeveralActions { viewer, player, state: name() }),
            }
        }
        weights[game.profile_index(&profile)] += &m.prior()[state];
    }
    Ok(Distribution::new(game, weights).expect("a prior pushed forward is a distribution"))
}

/// Pairs `(i, a_i)` for which `[[pl_i a_i]]_i` is not a union of `H_i` cells.
pub fn unmeasurable_play(m: &EpistemicStructure) -> Vec<(PlayerId, usize)> {
    let game = m.game();
    game.players()
        .flat_map(|p| (0..game.actions(p).len()).map(move |a| (p, a)))
        .filter(|&(p, a)| {
            let set = m.truth_set(p, &Atom::Play(p, game.actions(p)[a].clone()));
            !m.partition(p).is_measurable(&set)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    Objective,
    Subjective,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedVerdict {
    pub kind: EquilibriumKind,
    /// One distribution per viewer; empty when induction failed.
    pub distributions: Vec<Distribution>,
    pub verdict: Option<CeVerdict>,
    /// Failed preconditions, by name.
    pub issues: Vec<String>,
}

impl InducedVerdict {
    pub fn holds(&self) -> bool {
        self.issues.is_empty() && self.verdict.as_ref().is_some_and(CeVerdict::holds)
    }
}

/// Induces `γ_i` for every viewer and checks the matching equilibrium notion:
/// objective on common-interpretation structures, subjective otherwise.
pub fn verify_induced_equilibrium(m: &EpistemicStructure, c: &CoordinationStrategy) -> InducedVerdict {
    let game = m.game();
    let mut issues = Vec::new();
    let mut note = |name: &str, ok: bool, detail: String| {
        if !ok {
            issues.push(format!("{name}: {detail}"));
        }
    };
    let a1 = check_assumption1(m);
    note("Assumption 1", a1.passed(), a1.to_string());
    let a2 = check_assumption2(m);
    note("Assumption 2", a2.passed(), a2.to_string());
    let a3 = check_assumption3(m);
    note("Assumption 3", a3.passed(), a3.to_string());
    let pos = check_prior_positivity(m);
    note("prior positivity", pos.passed(), pos.to_string());
    let a4 = check_individual_rationality(m);
    note("Assumption 4", a4.passed(), a4.to_string());
    let sv = check_strategy_valid(m, c);
    note("strategy validity", sv.passed(), sv.to_string());

    let kind = if is_common_interpretation(m) { EquilibriumKind::Objective } else { EquilibriumKind::Subjective };
    let induced: Result<Vec<Distribution>, InduceError> = game.players().map(|p| induce(m, p)).collect();
    let distributions = match induced {
        Ok(d) => d,
        Err(e) => {
            issues.push(format!("induce: {e}"));
            return InducedVerdict { kind, distributions: Vec::new(), verdict: None, issues };
        }
    };
    let verdict = match kind {
        EquilibriumKind::Objective => {
            if distributions.windows(2).any(|w| w[0] != w[1]) {
                issues.push("common interpretation: viewers induce different distributions".into());
            }
            check_objective_ce(game, &distributions[0])
        }
        EquilibriumKind::Subjective => check_subjective_ce(game, &distributions),
    }
    .expect("induced distributions match the game");
    InducedVerdict { kind, distributions, verdict: Some(verdict), issues }
}
