//! Finite normal-form games, outcome distributions and correlated-equilibrium
//! verification.
//!
//! Profiles are stored densely in lexicographic order with the first player
//! as the most significant digit, so `T,L < T,C < T,R < M,L < …` for a 3×3
//! game with actions declared `[T, M, B]` and `[L, C, R]`.

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexMap;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, parse_rational, Rational};
use crate::simplex::{LinearProgram, Relation};

/// Zero-based player index. Displayed 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlayerId(pub usize);

impl PlayerId {
    pub fn index(self) -> usize {
        self.0
    }

    /// 1-based player number used in surface syntax.
    pub fn number(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("invalid game: {0}")]
    Invalid(GameReport),
    #[error("distribution has {found} weights but the game has {expected} profiles")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("expected {expected} distributions (one per player), got {found}")]
    ProfileLength { expected: usize, found: usize },
    #[error("unknown profile key `{0}`")]
    UnknownProfile(String),
}

/// A finite game with simultaneous moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    /// `payoffs[profile_index][player]`
    payoffs: Vec<Vec<Rational>>,
}

impl Game {
    /// Builds a game from a payoff function evaluated on every profile.
    pub fn new<F>(players: Vec<String>, actions: Vec<Vec<String>>, mut payoff: F) -> Result<Self, GameError>
    where
        F: FnMut(&[usize]) -> Vec<Rational>,
    {
        let mut file = GameFile {
            players: players.clone(),
            actions: players.iter().cloned().zip(actions.iter().cloned()).collect(),
            payoffs: IndexMap::new(),
        };
        let shell = Game { players, actions, payoffs: Vec::new() };
        for idx in 0..shell.profile_count() {
            let profile = shell.profile_at(idx);
            let values = payoff(&profile).iter().map(format_rational).collect();
            file.payoffs.insert(shell.profile_key(&profile), values);
        }
        file.into_game()
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> impl Iterator<Item = PlayerId> {
        (0..self.players.len()).map(PlayerId)
    }

    pub fn player_name(&self, p: PlayerId) -> &str {
        &self.players[p.0]
    }

    pub fn player_names(&self) -> &[String] {
        &self.players
    }

    /// Resolves a player by name, falling back to a 1-based number.
    pub fn find_player(&self, token: &str) -> Option<PlayerId> {
        if let Some(i) = self.players.iter().position(|p| p == token) {
            return Some(PlayerId(i));
        }
        match token.parse::<usize>() {
            Ok(n) if n >= 1 && n <= self.players.len() => Some(PlayerId(n - 1)),
            _ => None,
        }
    }

    pub fn actions(&self, p: PlayerId) -> &[String] {
        &self.actions[p.0]
    }

    pub fn action_index(&self, p: PlayerId, name: &str) -> Option<usize> {
        self.actions[p.0].iter().position(|a| a == name)
    }

    pub fn max_actions(&self) -> usize {
        self.actions.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn profile_count(&self) -> usize {
        self.actions.iter().map(Vec::len).product()
    }

    pub fn profile_index(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.actions.len());
        profile.iter().zip(&self.actions).fold(0, |acc, (&a, acts)| acc * acts.len() + a)
    }

    pub fn profile_at(&self, mut index: usize) -> Vec<usize> {
        let mut profile = vec![0; self.actions.len()];
        for (slot, acts) in profile.iter_mut().zip(&self.actions).rev() {
            *slot = index % acts.len();
            index /= acts.len();
        }
        profile
    }

    pub fn profiles(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.profile_count()).map(|i| self.profile_at(i))
    }

    /// Profile with `player`'s action replaced.
    pub fn with_action(&self, profile: &[usize], player: PlayerId, action: usize) -> Vec<usize> {
        let mut out = profile.to_vec();
        out[player.0] = action;
        out
    }

    pub fn payoff(&self, player: PlayerId, profile: &[usize]) -> &Rational {
        &self.payoffs[self.profile_index(profile)][player.0]
    }

    pub fn profile_key(&self, profile: &[usize]) -> String {
        profile.iter().enumerate().map(|(p, &a)| self.actions[p][a].as_str()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_profile_key(&self, key: &str) -> Option<Vec<usize>> {
        let parts: Vec<&str> = key.split(',').collect();
        if parts.len() != self.players.len() {
            return None;
        }
        parts.iter().enumerate().map(|(p, name)| self.action_index(PlayerId(p), name)).collect()
    }

    /// Opponent profiles for `player`, each as a full profile with `player`'s slot set to 0.
    pub fn opponent_profiles(&self, player: PlayerId) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for profile in self.profiles() {
            if profile[player.0] == 0 {
                out.push(profile);
            }
        }
        out
    }

    pub fn to_file(&self) -> GameFile {
        GameFile {
            players: self.players.clone(),
            actions: self.players.iter().cloned().zip(self.actions.iter().cloned()).collect(),
            payoffs: self
                .profiles()
                .map(|p| {
                    let values = self.payoffs[self.profile_index(&p)].iter().map(format_rational).collect();
                    (self.profile_key(&p), values)
                })
                .collect(),
        }
    }
}

/// On-disk game schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameFile {
    pub players: Vec<String>,
    pub actions: IndexMap<String, Vec<String>>,
    pub payoffs: IndexMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameViolation {
    TooFewPlayers(usize),
    DuplicatePlayer(String),
    MissingActions(String),
    UnknownPlayerInActions(String),
    NoActions(String),
    DuplicateAction { player: String, action: String },
    BadActionName { player: String, action: String },
    MissingPayoff(String),
    UnknownProfile(String),
    PayoffArity { profile: String, expected: usize, found: usize },
    BadRational { profile: String, value: String },
}

impl fmt::Display for GameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameViolation::TooFewPlayers(n) => write!(f, "need at least 2 players, found {n}"),
            GameViolation::DuplicatePlayer(p) => write!(f, "duplicate player `{p}`"),
            GameViolation::MissingActions(p) => write!(f, "no action list for player `{p}`"),
            GameViolation::UnknownPlayerInActions(p) => write!(f, "action list for undeclared player `{p}`"),
            GameViolation::NoActions(p) => write!(f, "player `{p}` has an empty action set"),
            GameViolation::DuplicateAction { player, action } => {
                write!(f, "player `{player}` declares action `{action}` twice")
            }
            GameViolation::BadActionName { player, action } => {
                write!(f, "action `{action}` of player `{player}` is not a plain identifier")
            }
            GameViolation::MissingPayoff(k) => write!(f, "missing payoff for profile `{k}`"),
            GameViolation::UnknownProfile(k) => write!(f, "payoff given for unknown profile `{k}`"),
            GameViolation::PayoffArity { profile, expected, found } => {
                write!(f, "profile `{profile}` has {found} payoffs, expected {expected}")
            }
            GameViolation::BadRational { profile, value } => {
                write!(f, "profile `{profile}` has non-rational payoff `{value}`")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GameReport {
    pub violations: Vec<GameViolation>,
}

impl GameReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for GameReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", lines.join("; "))
    }
}

pub(crate) fn is_plain_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Checks every game invariant and lists all violations.
pub fn validate_game(file: &GameFile) -> GameReport {
    let mut violations = Vec::new();
    if file.players.len() < 2 {
        violations.push(GameViolation::TooFewPlayers(file.players.len()));
    }
    let mut seen = HashSet::new();
    for p in &file.players {
        if !seen.insert(p) {
            violations.push(GameViolation::DuplicatePlayer(p.clone()));
        }
    }
    for p in file.actions.keys() {
        if !file.players.contains(p) {
            violations.push(GameViolation::UnknownPlayerInActions(p.clone()));
        }
    }
    let mut action_lists = Vec::new();
    for p in &file.players {
        match file.actions.get(p) {
            None => violations.push(GameViolation::MissingActions(p.clone())),
            Some(acts) if acts.is_empty() => violations.push(GameViolation::NoActions(p.clone())),
            Some(acts) => {
                let mut names = HashSet::new();
                for a in acts {
                    if !names.insert(a) {
                        violations.push(GameViolation::DuplicateAction { player: p.clone(), action: a.clone() });
                    }
                    if !is_plain_name(a) {
                        violations.push(GameViolation::BadActionName { player: p.clone(), action: a.clone() });
                    }
                }
                action_lists.push(acts.clone());
            }
        }
    }
    if !violations.is_empty() {
        return GameReport { violations };
    }

    let shell = Game { players: file.players.clone(), actions: action_lists, payoffs: Vec::new() };
    let n = shell.num_players();
    for key in file.payoffs.keys() {
        if shell.parse_profile_key(key).is_none() {
            violations.push(GameViolation::UnknownProfile(key.clone()));
        }
    }
    for profile in shell.profiles() {
        let key = shell.profile_key(&profile);
        match file.payoffs.get(&key) {
            None => violations.push(GameViolation::MissingPayoff(key)),
            Some(values) => {
                if values.len() != n {
                    violations.push(GameViolation::PayoffArity {
                        profile: key.clone(),
                        expected: n,
                        found: values.len(),
                    });
                }
                for v in values {
                    if parse_rational(v).is_err() {
                        violations.push(GameViolation::BadRational { profile: key.clone(), value: v.clone() });
                    }
                }
            }
        }
    }
    GameReport { violations }
}

impl GameFile {
    pub fn into_game(self) -> Result<Game, GameError> {
        let report = validate_game(&self);
        if !report.is_valid() {
            return Err(GameError::Invalid(report));
        }
        let actions: Vec<Vec<String>> = self.players.iter().map(|p| self.actions[p].clone()).collect();
        let mut game = Game { players: self.players, actions, payoffs: Vec::new() };
        let payoffs = game
            .profiles()
            .map(|profile| {
                self.payoffs[&game.profile_key(&profile)]
                    .iter()
                    .map(|v| parse_rational(v).expect("validated"))
                    .collect()
            })
            .collect();
        game.payoffs = payoffs;
        Ok(game)
    }
}

/// A probability distribution over full action profiles.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Distribution {
    weights: Vec<Rational>,
}

impl Distribution {
    /// Checks nonnegativity, exact unit mass, and dimension against `game`.
    pub fn new(game: &Game, weights: Vec<Rational>) -> Result<Self, GameError> {
        if weights.len() != game.profile_count() {
            return Err(GameError::DimensionMismatch { expected: game.profile_count(), found: weights.len() });
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(GameError::InvalidDistribution(format!("negative weight {w}")));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(GameError::InvalidDistribution(format!("weights sum to {total}, not 1")));
        }
        Ok(Distribution { weights })
    }

    pub fn point_mass(game: &Game, profile: &[usize]) -> Self {
        let mut weights = vec![Rational::zero(); game.profile_count()];
        weights[game.profile_index(profile)] = Rational::one();
        Distribution { weights }
    }

    /// Independent product of per-player mixed strategies.
    pub fn product(game: &Game, mixes: &[Vec<Rational>]) -> Result<Self, GameError> {
        let weights = game
            .profiles()
            .map(|profile| profile.iter().enumerate().map(|(p, &a)| mixes[p][a].clone()).product())
            .collect();
        Distribution::new(game, weights)
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, game: &Game, profile: &[usize]) -> &Rational {
        &self.weights[game.profile_index(profile)]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Profile indices with positive weight, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i].is_positive()).collect()
    }

    pub fn to_file(&self, game: &Game) -> DistributionFile {
        DistributionFile {
            weights: self
                .support()
                .into_iter()
                .map(|i| (game.profile_key(&game.profile_at(i)), format_rational(&self.weights[i])))
                .collect(),
        }
    }
}

/// On-disk distribution schema; omitted profiles carry weight 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionFile {
    pub weights: IndexMap<String, String>,
}

impl DistributionFile {
    /// Dense weight vector without probability checks (also used for LP objectives).
    pub fn to_vector(&self, game: &Game) -> Result<Vec<Rational>, GameError> {
        let mut weights = vec![Rational::zero(); game.profile_count()];
        for (key, value) in &self.weights {
            let profile = game.parse_profile_key(key).ok_or_else(|| GameError::UnknownProfile(key.clone()))?;
            weights[game.profile_index(&profile)] =
                parse_rational(value).map_err(|e| GameError::InvalidDistribution(e.to_string()))?;
        }
        Ok(weights)
    }

    pub fn into_distribution(&self, game: &Game) -> Result<Distribution, GameError> {
        Distribution::new(game, self.to_vector(game)?)
    }
}

/// One deviation inequality `Σ_{a_-i} [u_i(a_i,a_-i) − u_i(a_i',a_-i)]·γ(a_i,a_-i) ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationConstraint {
    pub player: PlayerId,
    pub action: usize,
    pub deviation: usize,
    pub slack: Rational,
}

impl DeviationConstraint {
    pub fn describe(&self, game: &Game) -> String {
        format!(
            "player {}: {} -> {} slack {}",
            game.player_name(self.player),
            game.actions(self.player)[self.action],
            game.actions(self.player)[self.deviation],
            self.slack
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CeVerdict {
    /// Every failing inequality, in (player, action, deviation) order.
    pub violations: Vec<DeviationConstraint>,
}

impl CeVerdict {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// All nontrivial deviation inequalities for `player` against `d`.
pub fn deviation_constraints(game: &Game, d: &Distribution, player: PlayerId) -> Vec<DeviationConstraint> {
    let opponents = game.opponent_profiles(player);
    let count = game.actions(player).len();
    let mut out = Vec::with_capacity(count * count.saturating_sub(1));
    for action in 0..count {
        for deviation in (0..count).filter(|&b| b != action) {
            let slack = opponents.iter().fold(Rational::zero(), |acc, base| {
                let on = game.with_action(base, player, action);
                let off = game.with_action(base, player, deviation);
                let w = d.weight(game, &on);
                if w.is_zero() {
                    acc
                } else {
                    acc + (game.payoff(player, &on) - game.payoff(player, &off)) * w
                }
            });
            out.push(DeviationConstraint { player, action, deviation, slack });
        }
    }
    out
}

fn check_dims(game: &Game, d: &Distribution) -> Result<(), GameError> {
    if d.len() != game.profile_count() {
        return Err(GameError::DimensionMismatch { expected: game.profile_count(), found: d.len() });
    }
    Ok(())
}

pub fn check_objective_ce(game: &Game, d: &Distribution) -> Result<CeVerdict, GameError> {
    check_dims(game, d)?;
    let violations =
        game.players().flat_map(|p| deviation_constraints(game, d, p)).filter(|c| c.slack.is_negative()).collect();
    Ok(CeVerdict { violations })
}

/// Player `i`'s constraints are evaluated against `profile[i]`.
pub fn check_subjective_ce(game: &Game, profile: &[Distribution]) -> Result<CeVerdict, GameError> {
    if profile.len() != game.num_players() {
        return Err(GameError::ProfileLength { expected: game.num_players(), found: profile.len() });
    }
    for d in profile {
        check_dims(game, d)?;
    }
    let violations = game
        .players()
        .flat_map(|p| deviation_constraints(game, &profile[p.0], p))
        .filter(|c| c.slack.is_negative())
        .collect();
    Ok(CeVerdict { violations })
}

/// Sum of all players' payoffs at each profile.
pub fn total_payoff_objective(game: &Game) -> Vec<Rational> {
    game.profiles().map(|p| game.players().map(|i| game.payoff(i, &p).clone()).sum()).collect()
}

/// A vertex of the correlated-equilibrium polytope maximizing `objective · γ`,
/// found by exact simplex.
pub fn solve_ce(game: &Game, objective: &[Rational]) -> Result<Distribution, GameError> {
    if objective.len() != game.profile_count() {
        return Err(GameError::DimensionMismatch { expected: game.profile_count(), found: objective.len() });
    }
    let vars = game.profile_count();
    let mut lp = LinearProgram::maximize(objective.to_vec());
    lp.add_constraint(vec![Rational::one(); vars], Relation::Eq, Rational::one());
    for player in game.players() {
        let opponents = game.opponent_profiles(player);
        let count = game.actions(player).len();
        for action in 0..count {
            for deviation in (0..count).filter(|&b| b != action) {
                let mut row = vec![Rational::zero(); vars];
                for base in &opponents {
                    let on = game.with_action(base, player, action);
                    let off = game.with_action(base, player, deviation);
                    row[game.profile_index(&on)] = game.payoff(player, &on) - game.payoff(player, &off);
                }
                lp.add_constraint(row, Relation::Ge, Rational::zero());
            }
        }
    }
    let solution = lp.solve().expect("the correlated-equilibrium polytope of a finite game is nonempty and bounded");
    Distribution::new(game, solution.values)
}
