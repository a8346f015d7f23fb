//! Reference games, structures and strategies, loaded from the JSON files
//! shipped in `fixtures/`.

use crate::coordination::{CoordinationStrategy, StrategyFile};
use crate::game::{Distribution, DistributionFile, Game, GameFile};
use crate::structure::{EpistemicStructure, StructureFile};

pub const CYCLE_GAME: &str = include_str!("../fixtures/cycle_game.json");
pub const COORDINATION_GAME: &str = include_str!("../fixtures/coordination_game.json");
pub const IDLE_GAME: &str = include_str!("../fixtures/idle_game.json");
pub const TWO_READINGS_STRUCTURE: &str = include_str!("../fixtures/two_readings_structure.json");
pub const TWO_READINGS_COMMON_STRUCTURE: &str = include_str!("../fixtures/two_readings_common_structure.json");
pub const CYCLE_STRUCTURE: &str = include_str!("../fixtures/cycle_structure.json");
pub const CYCLE_STRATEGY: &str = include_str!("../fixtures/cycle_strategy.json");
pub const CYCLE_CE: &str = include_str!("../fixtures/cycle_ce.json");
pub const AMBIGUOUS_STRUCTURE: &str = include_str!("../fixtures/ambiguous_structure.json");
pub const AMBIGUOUS_STRATEGY: &str = include_str!("../fixtures/ambiguous_strategy.json");
pub const AMBIGUOUS_GAMMA1: &str = include_str!("../fixtures/ambiguous_gamma1.json");
pub const AMBIGUOUS_GAMMA2: &str = include_str!("../fixtures/ambiguous_gamma2.json");

fn game(text: &str) -> Game {
    serde_json::from_str::<GameFile>(text).expect("fixture game parses").into_game().expect("fixture game is valid")
}

fn structure(text: &str, game: &Game) -> EpistemicStructure {
    serde_json::from_str::<StructureFile>(text)
        .expect("fixture structure parses")
        .into_structure(game)
        .expect("fixture structure is valid")
}

fn strategy(text: &str, m: &EpistemicStructure) -> CoordinationStrategy {
    serde_json::from_str::<StrategyFile>(text)
        .expect("fixture strategy parses")
        .into_strategy(m.game(), &m.signal_names())
        .expect("fixture strategy is valid")
}

fn distribution(text: &str, game: &Game) -> Distribution {
    serde_json::from_str::<DistributionFile>(text)
        .expect("fixture distribution parses")
        .into_distribution(game)
        .expect("fixture distribution is valid")
}

/// 3×3 game whose unique Nash equilibrium mixes uniformly.
pub fn cycle_game() -> Game {
    game(CYCLE_GAME)
}

/// 2×2 pure coordination game.
pub fn coordination_game() -> Game {
    game(COORDINATION_GAME)
}

/// Two players (A, B) with a single action each.
pub fn idle_game() -> Game {
    game(IDLE_GAME)
}

/// Weight 1/6 on each profile with positive payoffs.
pub fn cycle_ce(game: &Game) -> Distribution {
    distribution(CYCLE_CE, game)
}

/// Four states, uniform prior; A and B read `p` differently.
pub fn two_readings() -> EpistemicStructure {
    structure(TWO_READINGS_STRUCTURE, &idle_game())
}

/// [`two_readings`] with both players using A's reading for every atom.
pub fn two_readings_common() -> EpistemicStructure {
    structure(TWO_READINGS_COMMON_STRUCTURE, &idle_game())
}

/// Six-state common-interpretation structure for the cycle equilibrium.
pub fn cycle() -> EpistemicStructure {
    structure(CYCLE_STRUCTURE, &cycle_game())
}

pub fn cycle_strategy() -> CoordinationStrategy {
    strategy(CYCLE_STRATEGY, &cycle())
}

/// Two-state ambiguous structure where player 2 reads every signal as `s`.
pub fn ambiguous() -> EpistemicStructure {
    structure(AMBIGUOUS_STRUCTURE, &coordination_game())
}

pub fn ambiguous_strategy() -> CoordinationStrategy {
    strategy(AMBIGUOUS_STRATEGY, &ambiguous())
}

/// Induced distributions of [`ambiguous`] for players 1 and 2.
pub fn ambiguous_gammas() -> Vec<Distribution> {
    let g = coordination_game();
    vec![distribution(AMBIGUOUS_GAMMA1, &g), distribution(AMBIGUOUS_GAMMA2, &g)]
}

/// [`ambiguous`] where player 1 plays U after `s'` too, against a believed R.
pub fn ambiguous_rewired() -> EpistemicStructure {
    let mut file: StructureFile = serde_json::from_str(AMBIGUOUS_STRUCTURE).expect("fixture structure parses");
    let pi1 = &mut file.interpretation["1"];
    pi1.insert("pl(1,U)".into(), vec!["w".into(), "w'".into()]);
    pi1.shift_remove("pl(1,D)");
    file.into_structure(&coordination_game()).expect("rewired structure is valid")
}

pub fn ambiguous_rewired_strategy() -> CoordinationStrategy {
    let mut file: StrategyFile = serde_json::from_str(AMBIGUOUS_STRATEGY).expect("fixture strategy parses");
    file.0["1"].insert("s'".into(), "U".into());
    file.into_strategy(&coordination_game(), &["s".into(), "s'".into()]).expect("rewired strategy is valid")
}

/// One state where everyone receives `s` and (U, L) is played.
pub fn single_state() -> EpistemicStructure {
    let text = r#"{
        "states": ["w"],
        "prior": {"w": "1"},
        "signals": {"s": null},
        "atoms": ["p"],
        "interpretation": {
            "1": {"rec(1,s)": ["w"], "rec(2,s)": ["w"], "pl(1,U)": ["w"], "pl(2,L)": ["w"], "p": ["w"]},
            "2": {"rec(1,s)": ["w"], "rec(2,s)": ["w"], "pl(1,U)": ["w"], "pl(2,L)": ["w"], "p": ["w"]}
        },
        "partitions": null
    }"#;
    structure(text, &coordination_game())
}

pub fn single_state_strategy() -> CoordinationStrategy {
    strategy(r#"{"1": {"s": "U"}, "2": {"s": "L"}}"#, &single_state())
}
