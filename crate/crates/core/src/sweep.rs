//! Seeded random instances for the equilibrium round trips.
//!
//! Instance `k` of seed `s` draws from its own ChaCha stream, so any single
//! instance can be regenerated without replaying the others and the result
//! does not depend on the execution mode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construct::{from_objective_ce, from_subjective_ce, ConstructionOutput};
use crate::coordination::{
    check_self_enforcing, check_strategy_valid, induce, unmeasurable_play, verify_induced_equilibrium,
};
use crate::formula::Formula;
use crate::game::{check_objective_ce, check_subjective_ce, solve_ce, Distribution, Game};
use crate::par::{map_range, Execution};
use crate::rational::{ratio, Rational};
use crate::semantics::Checker;
use crate::structure::{
    check_assumption1, check_assumption2, check_assumption3, check_individual_rationality, check_prior_positivity,
    is_common_interpretation, Verdict,
};

pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Two or three players with two or three actions each and integer payoffs in `-4..=6`.
pub fn random_game(rng: &mut impl Rng) -> Game {
    let n = rng.gen_range(2..=3);
    let players: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let actions: Vec<Vec<String>> = (0..n)
        .map(|i| {
            let k = rng.gen_range(2..=3);
            (0..k).map(|a| format!("{}{}", (b'a' + i as u8) as char, a)).collect()
        })
        .collect();
    Game::new(players, actions, |_| (0..n).map(|_| Rational::from_integer(rng.gen_range(-4..=6).into())).collect())
        .expect("random game is well formed")
}

/// Weights `p/q` with `p` in `-10..=10` and `q` in `1..=4`.
pub fn random_objective(rng: &mut impl Rng, game: &Game) -> Vec<Rational> {
    (0..game.profile_count()).map(|_| ratio(rng.gen_range(-10..=10), rng.gen_range(1..=4))).collect()
}

#[derive(Debug, Clone)]
pub struct ObjectiveCase {
    pub game: Game,
    pub objective: Vec<Rational>,
    pub gamma: Distribution,
}

#[derive(Debug, Clone)]
pub struct SubjectiveCase {
    pub game: Game,
    pub objectives: Vec<Vec<Rational>>,
    pub gammas: Vec<Distribution>,
}

pub fn objective_case(seed: u64, index: usize) -> ObjectiveCase {
    let mut rng = instance_rng(seed, index);
    let game = random_game(&mut rng);
    let objective = random_objective(&mut rng, &game);
    let gamma = solve_ce(&game, &objective).expect("solver output is a distribution");
    ObjectiveCase { game, objective, gamma }
}

/// One independently solved CE per player, all of the same game.
pub fn subjective_case(seed: u64, index: usize) -> SubjectiveCase {
    let mut rng = instance_rng(seed, index);
    let game = random_game(&mut rng);
    let objectives: Vec<Vec<Rational>> = game.players().map(|_| random_objective(&mut rng, &game)).collect();
    let gammas = objectives.iter().map(|o| solve_ce(&game, o).expect("solver output is a distribution")).collect();
    SubjectiveCase { game, objectives, gammas }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceReport {
    pub index: usize,
    pub players: usize,
    pub actions: Vec<usize>,
    pub states: usize,
    pub common_interpretation: bool,
    /// Names of the checks that failed.
    pub failures: Vec<String>,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every validator, the equilibrium verification, the round trip against
/// `expected` (one distribution per viewer), and both common-belief checks.
pub fn audit(index: usize, out: &ConstructionOutput, expected: &[Distribution], exec: Execution) -> InstanceReport {
    let m = &out.structure;
    let game = m.game();
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_string());
        }
    };
    check("Assumption 1", check_assumption1(m).passed());
    check("Assumption 2", check_assumption2(m).passed());
    check("Assumption 3", check_assumption3(m).passed());
    check("prior positivity", check_prior_positivity(m).passed());
    check("Assumption 4", check_individual_rationality(m).passed());
    check("strategy validity", check_strategy_valid(m, &out.strategy).passed());
    check("self-enforcement", check_self_enforcing(m, &out.strategy).passed());
    check("play measurability", unmeasurable_play(m).is_empty());
    check("signal count", out.signals.len() == game.max_actions());
    check("equilibrium", verify_induced_equilibrium(m, &out.strategy).holds());
    let induced: Vec<Option<Distribution>> = game.players().map(|p| induce(m, p).ok()).collect();
    check("round trip", induced.iter().zip(expected).all(|(got, want)| got.as_ref() == Some(want)));

    let common = is_common_interpretation(m);
    let mut checker = Checker::with_execution(m, exec);
    let beliefs =
        Formula::conjunction(game.players().map(|p| Formula::belief(p, Formula::rational(p)))).expect("players");
    check("common belief in believed rationality", checker.valid(&Formula::common_belief(beliefs)));
    if common {
        let rational = Formula::conjunction(game.players().map(Formula::rational)).expect("players");
        check("common belief in rationality", checker.valid(&Formula::common_belief(rational)));
    }
    InstanceReport {
        index,
        players: game.num_players(),
        actions: game.players().map(|p| game.actions(p).len()).collect(),
        states: m.num_states(),
        common_interpretation: common,
        failures,
    }
}

pub fn run_objective(seed: u64, index: usize, exec: Execution) -> InstanceReport {
    let case = objective_case(seed, index);
    let mut report = match from_objective_ce(&case.game, &case.gamma) {
        Ok(out) => audit(index, &out, &vec![case.gamma.clone(); case.game.num_players()], exec),
        Err(e) => InstanceReport {
            index,
            players: case.game.num_players(),
            actions: case.game.players().map(|p| case.game.actions(p).len()).collect(),
            states: 0,
            common_interpretation: false,
            failures: vec![format!("construction: {e}")],
        },
    };
    if !check_objective_ce(&case.game, &case.gamma).map(|v| v.holds()).unwrap_or(false) {
        report.failures.push("solver output is a CE".into());
    }
    report
}

pub fn run_subjective(seed: u64, index: usize, exec: Execution) -> InstanceReport {
    let case = subjective_case(seed, index);
    let mut report = match from_subjective_ce(&case.game, &case.gammas) {
        Ok(out) => audit(index, &out, &case.gammas, exec),
        Err(e) => InstanceReport {
            index,
            players: case.game.num_players(),
            actions: case.game.players().map(|p| case.game.actions(p).len()).collect(),
            states: 0,
            common_interpretation: false,
            failures: vec![format!("construction: {e}")],
        },
    };
    if !check_subjective_ce(&case.game, &case.gammas).map(|v| v.holds()).unwrap_or(false) {
        report.failures.push("subjective CE".into());
    }
    report
}

/// Instances `0..count`, distributed over threads in `Parallel` mode.
pub fn objective_sweep(seed: u64, count: usize, exec: Execution) -> Vec<InstanceReport> {
    map_range(exec, count, |i| run_objective(seed, i, Execution::Sequential))
}

pub fn subjective_sweep(seed: u64, count: usize, exec: Execution) -> Vec<InstanceReport> {
    map_range(exec, count, |i| run_subjective(seed, i, Execution::Sequential))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible() {
        let a = objective_case(7, 3);
        let b = objective_case(7, 3);
        assert_eq!(a.game, b.game);
        assert_eq!(a.gamma, b.gamma);
        assert_ne!(objective_case(7, 4).game, a.game);
    }

    #[test]
    fn random_games_are_in_range() {
        for i in 0..20 {
            let g = random_game(&mut instance_rng(1, i));
            assert!((2..=3).contains(&g.num_players()));
            assert!(g.players().all(|p| (2..=3).contains(&g.actions(p).len())));
        }
    }

    #[test]
    fn small_sweeps_pass_in_both_modes() {
        let seq = objective_sweep(11, 6, Execution::Sequential);
        let par = objective_sweep(11, 6, Execution::Parallel);
        assert_eq!(seq, par);
        assert!(seq.iter().all(InstanceReport::passed), "{seq:?}");
        let sub = subjective_sweep(11, 4, Execution::Parallel);
        assert!(sub.iter().all(InstanceReport::passed), "{sub:?}");
    }
}
