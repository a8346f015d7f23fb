//! Builders from equilibria back to epistemic structures.
//!
//! Both builders use the canonical signals `sig1..sigK` with `K` the largest
//! action count, and map the k-th declared action of each player to `sig_k`.
//! A signal outside a player's range recommends her first declared action.

use indexmap::IndexMap;
use num_traits::One;

use crate::coordination::{CoordinationStrategy, StrategyFile};
use crate::formula::Atom;
use crate::game::{check_objective_ce, check_subjective_ce, CeVerdict, Distribution, Game, GameError, PlayerId};
use crate::rational::Rational;
use crate::stateset::StateSet;
use crate::structure::{EpistemicStructure, Interpretation, StructureFile, StructureParts};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructError {
    #[error("input is not a correlated equilibrium ({} violated constraints)", .0.violations.len())]
    NotEquilibrium(CeVerdict),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionOutput {
    pub structure: EpistemicStructure,
    pub signals: Vec<String>,
    pub strategy: CoordinationStrategy,
    /// `signal_maps[i][a]` is the signal index assigned to action `a` of player `i`.
    pub signal_maps: Vec<Vec<usize>>,
}

/// On-disk signal assignment: player ↦ action ↦ signal.
pub type SignalMapFile = IndexMap<String, IndexMap<String, String>>;

impl ConstructionOutput {
    pub fn structure_file(&self) -> StructureFile {
        self.structure.to_file()
    }

    pub fn strategy_file(&self) -> StrategyFile {
        self.strategy.to_file(self.structure.game())
    }

    pub fn signal_map_file(&self) -> SignalMapFile {
        let game = self.structure.game();
        game.players()
            .map(|p| {
                let row = game
                    .actions(p)
                    .iter()
                    .zip(&self.signal_maps[p.0])
                    .map(|(a, &k)| (a.clone(), self.signals[k].clone()))
                    .collect();
                (game.player_name(p).to_string(), row)
            })
            .collect()
    }
}

fn canonical_signals(game: &Game) -> (Vec<String>, Vec<Vec<usize>>, CoordinationStrategy) {
    let k = game.max_actions();
    let signals: Vec<String> = (1..=k).map(|i| format!("sig{i}")).collect();
    let maps: Vec<Vec<usize>> = game.players().map(|p| (0..game.actions(p).len()).collect()).collect();
    let table =
        game.players().map(|p| (0..k).map(|s| if s < game.actions(p).len() { s } else { 0 }).collect()).collect();
    let strategy = CoordinationStrategy::new(game, signals.clone(), table).expect("canonical table is total");
    (signals, maps, strategy)
}

/// Marks `rec_j s_j(a_j)` and `pl_j a_j` true at `state` for every `j`.
fn mark_profile(
    game: &Game,
    signals: &[String],
    pi: &mut Interpretation,
    universe: usize,
    state: usize,
    profile: &[usize],
) {
    for j in game.players() {
        let a = profile[j.0];
        for atom in [Atom::Receive(j, signals[a].clone()), Atom::Play(j, game.actions(j)[a].clone())] {
            pi.entry(atom).or_insert_with(|| StateSet::empty(universe)).insert(state);
        }
    }
}

/// Groups states by `key`, cells ordered by first appearance.
fn group_by<K: PartialEq>(universe: usize, key: impl Fn(usize) -> K) -> Vec<StateSet> {
    let mut keys: Vec<K> = Vec::new();
    let mut cells: Vec<StateSet> = Vec::new();
    for s in 0..universe {
        let k = key(s);
        match keys.iter().position(|x| *x == k) {
            Some(c) => cells[c].insert(s),
            None => {
                keys.push(k);
                cells.push(StateSet::from_indices(universe, [s]));
            }
        }
    }
    cells
}

/// A common-interpretation structure with one state per support profile of `gamma`.
pub fn from_objective_ce(game: &Game, gamma: &Distribution) -> Result<ConstructionOutput, ConstructError> {
    let verdict = check_objective_ce(game, gamma)?;
    if !verdict.holds() {
        return Err(ConstructError::NotEquilibrium(verdict));
    }
    let (signals, signal_maps, strategy) = canonical_signals(game);
    let support: Vec<Vec<usize>> = gamma.support().into_iter().map(|i| game.profile_at(i)).collect();
    let n = support.len();
    let mut pi = Interpretation::new();
    for (state, profile) in support.iter().enumerate() {
        mark_profile(game, &signals, &mut pi, n, state, profile);
    }
    let partitions = game.players().map(|p| group_by(n, |s| support[s][p.0])).collect();
    let parts = StructureParts {
        states: support.iter().map(|a| game.profile_key(a)).collect(),
        prior: support.iter().map(|a| gamma.weight(game, a).clone()).collect(),
        signals: signals.iter().map(|name| crate::structure::Signal { name: name.clone(), definition: None }).collect(),
        atoms: Vec::new(),
        interpretation: vec![pi; game.num_players()],
        partitions: Some(partitions),
    };
    let structure = EpistemicStructure::new(game.clone(), parts).expect("construction satisfies structure invariants");
    Ok(ConstructionOutput { structure, signals, strategy, signal_maps })
}

/// A generally ambiguous structure over `×_i supp γ_i` with product prior, where
/// player `i` reads state `(a^1, …, a^n)` as profile `a^i` being played.
pub fn from_subjective_ce(game: &Game, profile: &[Distribution]) -> Result<ConstructionOutput, ConstructError> {
    let verdict = check_subjective_ce(game, profile)?;
    if !verdict.holds() {
        return Err(ConstructError::NotEquilibrium(verdict));
    }
    let (signals, signal_maps, strategy) = canonical_signals(game);
    let supports: Vec<Vec<usize>> = profile.iter().map(Distribution::support).collect();
    let n: usize = supports.iter().map(Vec::len).product();
    // state index -> per-player profile index, first player most significant
    let tuple = |mut s: usize| -> Vec<usize> {
        let mut out = vec![0; supports.len()];
        for (slot, sup) in out.iter_mut().zip(&supports).rev() {
            *slot = sup[s % sup.len()];
            s /= sup.len();
        }
        out
    };
    let tuples: Vec<Vec<usize>> = (0..n).map(tuple).collect();
    let mut interpretation = vec![Interpretation::new(); game.num_players()];
    for (state, t) in tuples.iter().enumerate() {
        for i in game.players() {
            mark_profile(game, &signals, &mut interpretation[i.0], n, state, &game.profile_at(t[i.0]));
        }
    }
    let prior = tuples
        .iter()
        .map(|t| t.iter().zip(profile).map(|(&a, d)| d.weights()[a].clone()).fold(Rational::one(), |acc, w| acc * w))
        .collect();
    let partitions = game.players().map(|i| group_by(n, |s| game.profile_at(tuples[s][i.0])[i.0])).collect();
    let parts = StructureParts {
        states: tuples
            .iter()
            .map(|t| t.iter().map(|&a| game.profile_key(&game.profile_at(a))).collect::<Vec<_>>().join("|"))
            .collect(),
        prior,
        signals: signals.iter().map(|name| crate::structure::Signal { name: name.clone(), definition: None }).collect(),
        atoms: Vec::new(),
        interpretation,
        partitions: Some(partitions),
    };
    let structure = EpistemicStructure::new(game.clone(), parts).expect("construction satisfies structure invariants");
    Ok(ConstructionOutput { structure, signals, strategy, signal_maps })
}

/// Prior mass of each cell of `player`'s partition, in cell order.
pub fn cell_masses(m: &EpistemicStructure, player: PlayerId) -> Vec<Rational> {
    m.partition(player).cells().iter().map(|c| m.measure(c)).collect()
}
