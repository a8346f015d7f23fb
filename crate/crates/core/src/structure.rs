//! Epistemic probability structures with player-relative interpretation, and
//! validators for the standing assumptions on signals, partitions, play and
//! rationality.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::formula::{parse, parse_atom, Atom, Formula, Vocabulary};
use crate::game::{Game, PlayerId};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::semantics::Checker;
use crate::stateset::StateSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("schema error: {0}")]
    Schema(String),
    /// A structural requirement without which the structure cannot be built.
    #[error("{assumption} violated: {detail}")]
    Precondition { assumption: &'static str, detail: String },
}

fn schema<T>(msg: impl Into<String>) -> Result<T, StructureError> {
    Err(StructureError::Schema(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signal {
    pub name: String,
    /// Optional defining formula over generic atoms.
    pub definition: Option<Formula>,
}

/// An information partition: disjoint nonempty cells covering all states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    cells: Vec<StateSet>,
    cell_of: Vec<usize>,
}

impl Partition {
    /// Fails unless `cells` are nonempty, pairwise disjoint and cover `0..universe`.
    pub fn new(universe: usize, cells: Vec<StateSet>) -> Result<Self, String> {
        let mut cell_of = vec![usize::MAX; universe];
        for (c, cell) in cells.iter().enumerate() {
            if cell.universe() != universe {
                return Err("cell over a different state space".into());
            }
            if cell.is_empty() {
                return Err(format!("cell {c} is empty"));
            }
            for s in cell.iter() {
                if cell_of[s] != usize::MAX {
                    return Err(format!("state {s} lies in two cells"));
                }
                cell_of[s] = c;
            }
        }
        if let Some(s) = cell_of.iter().position(|&c| c == usize::MAX) {
            return Err(format!("state {s} is in no cell"));
        }
        Ok(Partition { cells, cell_of })
    }

    pub fn cells(&self) -> &[StateSet] {
        &self.cells
    }

    pub fn cell_index(&self, state: usize) -> usize {
        self.cell_of[state]
    }

    pub fn cell_of(&self, state: usize) -> &StateSet {
        &self.cells[self.cell_of[state]]
    }

    /// Same cells, ignoring order.
    pub fn same_as(&self, other: &Partition) -> bool {
        self.cells.len() == other.cells.len()
            && self.cell_of.len() == other.cell_of.len()
            && (0..self.cell_of.len()).all(|s| self.cell_of(s) == other.cell_of(s))
    }

    /// Whether `set` is a union of cells.
    pub fn is_measurable(&self, set: &StateSet) -> bool {
        self.cells.iter().all(|c| c.is_subset(set) || c.is_disjoint(set))
    }
}

/// One player's truth assignment: atom ↦ set of states where it is true.
pub type Interpretation = BTreeMap<Atom, StateSet>;

/// `M = (Ω, μ, {π_i}, {H_i})` over a fixed game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpistemicStructure {
    game: Game,
    states: Vec<String>,
    prior: Vec<Rational>,
    /// Prior rescaled to integers over the common denominator.
    scaled_prior: Vec<BigInt>,
    signals: Vec<Signal>,
    atoms: Vec<String>,
    interpretation: Vec<Interpretation>,
    partitions: Vec<Partition>,
    partitions_derived: bool,
}

/// Raw components of a structure prior to validation.
#[derive(Debug, Clone)]
pub struct StructureParts {
    pub states: Vec<String>,
    pub prior: Vec<Rational>,
    pub signals: Vec<Signal>,
    pub atoms: Vec<String>,
    pub interpretation: Vec<Interpretation>,
    /// `None` derives partitions from the received signals.
    pub partitions: Option<Vec<Vec<StateSet>>>,
}

impl EpistemicStructure {
    pub fn new(game: Game, parts: StructureParts) -> Result<Self, StructureError> {
        let StructureParts { states, prior, signals, atoms, mut interpretation, partitions } = parts;
        for pi in &mut interpretation {
            pi.retain(|_, set| !set.is_empty());
        }
        let n = states.len();
        if n == 0 {
            return schema("structure has no states");
        }
        let mut seen = HashSet::new();
        if let Some(dup) = states.iter().find(|s| !seen.insert(*s)) {
            return schema(format!("duplicate state `{dup}`"));
        }
        if prior.len() != n {
            return schema(format!("prior has {} entries for {n} states", prior.len()));
        }
        if let Some(w) = prior.iter().find(|w| w.is_negative()) {
            return Err(StructureError::Precondition {
                assumption: "prior",
                detail: format!("negative prior weight {w}"),
            });
        }
        let total: Rational = prior.iter().sum();
        if !total.is_one() {
            return Err(StructureError::Precondition {
                assumption: "prior",
                detail: format!("prior sums to {total}, not 1"),
            });
        }
        let mut seen = HashSet::new();
        for sig in &signals {
            if !seen.insert(&sig.name) {
                return schema(format!("duplicate signal `{}`", sig.name));
            }
            if let Some(def) = &sig.definition {
                if !is_generic(def) {
                    return schema(format!("signal `{}` must be defined over generic atoms only", sig.name));
                }
            }
        }
        let mut seen = HashSet::new();
        for a in &atoms {
            if !crate::formula::is_atom_name(a) {
                return schema(format!("`{a}` is not a valid atom name"));
            }
            if !seen.insert(a) {
                return schema(format!("duplicate atom `{a}`"));
            }
        }
        if interpretation.len() != game.num_players() {
            return schema(format!(
                "interpretation given for {} players, game has {}",
                interpretation.len(),
                game.num_players()
            ));
        }
        let signal_names: Vec<String> = signals.iter().map(|s| s.name.clone()).collect();
        for pi in &interpretation {
            for (atom, set) in pi {
                if set.universe() != n {
                    return schema(format!("truth set of `{atom}` has the wrong state space"));
                }
                let ok = match atom {
                    Atom::Prim(a) => atoms.contains(a),
                    Atom::Play(p, a) => p.0 < game.num_players() && game.action_index(*p, a).is_some(),
                    Atom::Receive(p, s) => p.0 < game.num_players() && signal_names.contains(s),
                };
                if !ok {
                    return schema(format!("interpretation mentions undeclared `{atom}`"));
                }
            }
        }
        for sig in &signals {
            if let Some(def) = &sig.definition {
                let vocab = Vocabulary::new(&game).with_atoms(&atoms);
                def.check_well_formed(&vocab).map_err(StructureError::Schema)?;
            }
        }

        let denominator = prior.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let scaled_prior =
            prior.iter().map(|w| (w * Rational::from_integer(denominator.clone())).to_integer()).collect();

        let mut m = EpistemicStructure {
            game,
            states,
            prior,
            scaled_prior,
            signals,
            atoms,
            interpretation,
            partitions: Vec::new(),
            partitions_derived: partitions.is_none(),
        };
        m.partitions = match partitions {
            Some(given) => {
                if given.len() != m.game.num_players() {
                    return schema("partitions must be given for every player");
                }
                given
                    .into_iter()
                    .enumerate()
                    .map(|(i, cells)| {
                        Partition::new(n, cells).map_err(|e| StructureError::Precondition {
                            assumption: "partition",
                            detail: format!("player {}: {e}", i + 1),
                        })
                    })
                    .collect::<Result<_, _>>()?
            }
            None => derive_partitions(&m)?,
        };
        let positivity = check_prior_positivity(&m);
        if !positivity.passed() {
            return Err(StructureError::Precondition {
                assumption: "prior positivity",
                detail: positivity.to_string(),
            });
        }
        Ok(m)
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn prior(&self) -> &[Rational] {
        &self.prior
    }

    pub fn measure(&self, set: &StateSet) -> Rational {
        set.iter().map(|s| &self.prior[s]).sum()
    }

    pub(crate) fn scaled_measure(&self, set: &StateSet) -> BigInt {
        set.iter().map(|s| &self.scaled_prior[s]).sum()
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn signal_names(&self) -> Vec<String> {
        self.signals.iter().map(|s| s.name.clone()).collect()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn vocabulary(&self) -> OwnedVocabulary<'_> {
        OwnedVocabulary { game: &self.game, signals: self.signal_names(), atoms: &self.atoms }
    }

    pub fn interpretation(&self, viewer: PlayerId) -> &Interpretation {
        &self.interpretation[viewer.0]
    }

    /// `{ω : π_viewer(ω, atom) = 1}`.
    pub fn truth_set(&self, viewer: PlayerId, atom: &Atom) -> StateSet {
        self.interpretation[viewer.0].get(atom).cloned().unwrap_or_else(|| StateSet::empty(self.num_states()))
    }

    pub fn is_true(&self, viewer: PlayerId, state: usize, atom: &Atom) -> bool {
        self.interpretation[viewer.0].get(atom).is_some_and(|s| s.contains(state))
    }

    pub fn partition(&self, player: PlayerId) -> &Partition {
        &self.partitions[player.0]
    }

    pub fn partitions_derived(&self) -> bool {
        self.partitions_derived
    }

    /// `h_i(ω)`.
    pub fn cell(&self, player: PlayerId, state: usize) -> &StateSet {
        self.partitions[player.0].cell_of(state)
    }

    /// Signals `receiver` gets at `state` according to `viewer`.
    pub fn received(&self, viewer: PlayerId, receiver: PlayerId, state: usize) -> Vec<usize> {
        (0..self.signals.len())
            .filter(|&k| self.is_true(viewer, state, &Atom::Receive(receiver, self.signals[k].name.clone())))
            .collect()
    }

    /// `σ_{i,ω}`: the unique signal `i` thinks she observes at `state`.
    pub fn own_signal(&self, player: PlayerId, state: usize) -> Option<usize> {
        match self.received(player, player, state).as_slice() {
            [k] => Some(*k),
            _ => None,
        }
    }

    /// Actions of `player` that `viewer` deems played at `state`.
    pub fn played(&self, viewer: PlayerId, player: PlayerId, state: usize) -> Vec<usize> {
        (0..self.game.actions(player).len())
            .filter(|&a| self.is_true(viewer, state, &Atom::Play(player, self.game.actions(player)[a].clone())))
            .collect()
    }

    pub fn to_file(&self) -> StructureFile {
        let names = |set: &StateSet| set.iter().map(|s| self.states[s].clone()).collect::<Vec<_>>();
        StructureFile {
            states: self.states.clone(),
            prior: self.states.iter().cloned().zip(self.prior.iter().map(format_rational)).collect(),
            signals: self
                .signals
                .iter()
                .map(|s| (s.name.clone(), s.definition.as_ref().map(ToString::to_string)))
                .collect(),
            atoms: self.atoms.clone(),
            interpretation: self
                .game
                .players()
                .map(|p| {
                    let table =
                        self.interpretation[p.0].iter().map(|(atom, set)| (atom.to_string(), names(set))).collect();
                    (self.game.player_name(p).to_string(), table)
                })
                .collect(),
            partitions: if self.partitions_derived {
                None
            } else {
                Some(
                    self.game
                        .players()
                        .map(|p| {
                            let cells = self.partitions[p.0].cells().iter().map(names).collect();
                            (self.game.player_name(p).to_string(), cells)
                        })
                        .collect(),
                )
            },
        }
    }
}

/// Vocabulary view that owns the signal-name list.
pub struct OwnedVocabulary<'a> {
    game: &'a Game,
    signals: Vec<String>,
    atoms: &'a [String],
}

impl OwnedVocabulary<'_> {
    pub fn get(&self) -> Vocabulary<'_> {
        Vocabulary::new(self.game).with_signals(&self.signals).with_atoms(self.atoms)
    }
}

fn is_generic(f: &Formula) -> bool {
    match f {
        Formula::Atom(Atom::Prim(_)) => true,
        Formula::Not(x) => is_generic(x),
        Formula::And(a, b) | Formula::Implies(a, b) => is_generic(a) && is_generic(b),
        _ => false,
    }
}

/// On-disk structure schema. Truth tables list the states where each atom is true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    pub states: Vec<String>,
    pub prior: IndexMap<String, String>,
    pub signals: IndexMap<String, Option<String>>,
    #[serde(default)]
    pub atoms: Vec<String>,
    pub interpretation: IndexMap<String, IndexMap<String, Vec<String>>>,
    #[serde(default)]
    pub partitions: Option<IndexMap<String, Vec<Vec<String>>>>,
}

impl StructureFile {
    pub fn into_structure(self, game: &Game) -> Result<EpistemicStructure, StructureError> {
        let n = self.states.len();
        let index = |name: &str| -> Result<usize, StructureError> {
            self.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| StructureError::Schema(format!("unknown state `{name}`")))
        };
        let to_set = |names: &[String]| -> Result<StateSet, StructureError> {
            let mut set = StateSet::empty(n);
            for name in names {
                set.insert(index(name)?);
            }
            Ok(set)
        };
        let mut prior = vec![Rational::zero(); n];
        for (state, w) in &self.prior {
            prior[index(state)?] = parse_rational(w).map_err(|e| StructureError::Schema(e.to_string()))?;
        }
        let signal_names: Vec<String> = self.signals.keys().cloned().collect();
        let atom_vocab = Vocabulary::new(game).with_atoms(&self.atoms).with_signals(&signal_names);
        let signals = self
            .signals
            .iter()
            .map(|(name, def)| {
                let definition = def
                    .as_ref()
                    .map(|text| parse(text, &atom_vocab))
                    .transpose()
                    .map_err(|e| StructureError::Schema(format!("definition of signal `{name}`: {e}")))?;
                Ok(Signal { name: name.clone(), definition })
            })
            .collect::<Result<Vec<_>, StructureError>>()?;
        for player in self.interpretation.keys() {
            if game.find_player(player).is_none() {
                return schema(format!("interpretation for unknown player `{player}`"));
            }
        }
        let mut interpretation = vec![Interpretation::new(); game.num_players()];
        for (player, table) in &self.interpretation {
            let p = game.find_player(player).expect("checked above");
            for (key, states) in table {
                let atom =
                    parse_atom(key, &atom_vocab).map_err(|e| StructureError::Schema(format!("atom `{key}`: {e}")))?;
                let set = to_set(states)?;
                interpretation[p.0].entry(atom).and_modify(|s: &mut StateSet| *s = s.union(&set)).or_insert(set);
            }
        }
        let partitions = match &self.partitions {
            None => None,
            Some(table) => {
                let mut out = Vec::new();
                for p in game.players() {
                    let cells =
                        table.get(game.player_name(p)).or_else(|| table.get(&p.number().to_string())).ok_or_else(
                            || StructureError::Schema(format!("no partition for player `{}`", game.player_name(p))),
                        )?;
                    out.push(cells.iter().map(|c| to_set(c)).collect::<Result<Vec<_>, _>>()?);
                }
                Some(out)
            }
        };
        EpistemicStructure::new(
            game.clone(),
            StructureParts { states: self.states, prior, signals, atoms: self.atoms, interpretation, partitions },
        )
    }
}

/// Partitions generated by each player's own received signal: `h_i(ω) = [[rec_i σ_{i,ω}]]_i`.
pub fn derive_partitions(m: &EpistemicStructure) -> Result<Vec<Partition>, StructureError> {
    m.game
        .players()
        .map(|p| {
            let mut cells: Vec<StateSet> = Vec::new();
            for state in 0..m.num_states() {
                let sig = match m.received(p, p, state).as_slice() {
                    [k] => *k,
                    [] => {
                        return Err(StructureError::Precondition {
                            assumption: "Assumption 1",
                            detail: format!(
                                "player {} receives no signal at `{}` by her own reading",
                                m.game.player_name(p),
                                m.states[state]
                            ),
                        })
                    }
                    _ => {
                        return Err(StructureError::Precondition {
                            assumption: "Assumption 1",
                            detail: format!(
                                "player {} receives several signals at `{}` by her own reading",
                                m.game.player_name(p),
                                m.states[state]
                            ),
                        })
                    }
                };
                let cell = m.truth_set(p, &Atom::Receive(p, m.signals[sig].name.clone()));
                if !cells.contains(&cell) {
                    cells.push(cell);
                }
            }
            Partition::new(m.num_states(), cells)
                .map_err(|detail| StructureError::Precondition { assumption: "Assumption 1", detail })
        })
        .collect()
}

/// Common interface of validator reports.
pub trait Verdict: fmt::Display {
    fn passed(&self) -> bool;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignalIssue {
    NoSignal { state: usize },
    Overlap { state: usize, signals: Vec<usize> },
    SameIntension { first: usize, second: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalPairCheck {
    pub receiver: PlayerId,
    pub viewer: PlayerId,
    pub issues: Vec<SignalIssue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assumption1Report {
    pub pairs: Vec<SignalPairCheck>,
    state_names: Vec<String>,
    signal_names: Vec<String>,
}

impl Assumption1Report {
    pub fn pair(&self, receiver: PlayerId, viewer: PlayerId) -> &SignalPairCheck {
        self.pairs.iter().find(|c| c.receiver == receiver && c.viewer == viewer).expect("every pair is checked")
    }
}

impl Verdict for Assumption1Report {
    fn passed(&self) -> bool {
        self.pairs.iter().all(|c| c.issues.is_empty())
    }
}

impl fmt::Display for Assumption1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lines = Vec::new();
        for c in &self.pairs {
            for issue in &c.issues {
                let what = match issue {
                    SignalIssue::NoSignal { state } => format!("no signal at {}", self.state_names[*state]),
                    SignalIssue::Overlap { state, signals } => format!(
                        "signals {} all received at {}",
                        signals.iter().map(|s| self.signal_names[*s].as_str()).collect::<Vec<_>>().join(", "),
                        self.state_names[*state]
                    ),
                    SignalIssue::SameIntension { first, second } => {
                        format!(
                            "signals {} and {} have the same intension",
                            self.signal_names[*first], self.signal_names[*second]
                        )
                    }
                };
                lines.push(format!("receiver {} viewed by {}: {what}", c.receiver, c.viewer));
            }
        }
        if lines.is_empty() {
            write!(f, "pass")
        } else {
            write!(f, "fail: {}", lines.join("; "))
        }
    }
}

/// For every receiver `i` and viewer `j`, the nonempty `[[rec_i σ]]_j` partition
/// the states and distinct signals have distinct intensions.
pub fn check_assumption1(m: &EpistemicStructure) -> Assumption1Report {
    let mut pairs = Vec::new();
    for receiver in m.game.players() {
        for viewer in m.game.players() {
            let mut issues = Vec::new();
            for state in 0..m.num_states() {
                let got = m.received(viewer, receiver, state);
                match got.len() {
                    0 => issues.push(SignalIssue::NoSignal { state }),
                    1 => {}
                    _ => issues.push(SignalIssue::Overlap { state, signals: got }),
                }
            }
            let sets: Vec<StateSet> =
                m.signals.iter().map(|s| m.truth_set(viewer, &Atom::Receive(receiver, s.name.clone()))).collect();
            for a in 0..sets.len() {
                for b in (a + 1)..sets.len() {
                    if !sets[a].is_empty() && sets[a] == sets[b] {
                        issues.push(SignalIssue::SameIntension { first: a, second: b });
                    }
                }
            }
            pairs.push(SignalPairCheck { receiver, viewer, issues });
        }
    }
    Assumption1Report { pairs, state_names: m.states.clone(), signal_names: m.signal_names() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionIssue {
    NoOwnSignal { player: PlayerId, state: usize },
    Mismatch { player: PlayerId, state: usize, stored: StateSet, derived: StateSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assumption2Report {
    pub issues: Vec<PartitionIssue>,
    state_names: Vec<String>,
}

impl Verdict for Assumption2Report {
    fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for Assumption2Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "pass");
        }
        let set = |s: &StateSet| {
            format!("{{{}}}", s.iter().map(|i| self.state_names[i].as_str()).collect::<Vec<_>>().join(","))
        };
        let lines: Vec<String> = self
            .issues
            .iter()
            .map(|issue| match issue {
                PartitionIssue::NoOwnSignal { player, state } => {
                    format!("player {player} has no unique own signal at {}", self.state_names[*state])
                }
                PartitionIssue::Mismatch { player, state, stored, derived } => format!(
                    "player {player} at {}: cell {} but signal intension {}",
                    self.state_names[*state],
                    set(stored),
                    set(derived)
                ),
            })
            .collect();
        write!(f, "fail: {}", lines.join("; "))
    }
}

/// `h_i(ω) = [[rec_i σ_{i,ω}]]_i` for every player and state.
pub fn check_assumption2(m: &EpistemicStructure) -> Assumption2Report {
    let mut issues = Vec::new();
    for p in m.game.players() {
        for state in 0..m.num_states() {
            match m.own_signal(p, state) {
                None => issues.push(PartitionIssue::NoOwnSignal { player: p, state }),
                Some(k) => {
                    let derived = m.truth_set(p, &Atom::Receive(p, m.signals[k].name.clone()));
                    let stored = m.cell(p, state);
                    if *stored != derived {
                        issues.push(PartitionIssue::Mismatch { player: p, state, stored: stored.clone(), derived });
                    }
                }
            }
        }
    }
    Assumption2Report { issues, state_names: m.states.clone() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayConflict {
    pub viewer: PlayerId,
    pub state: usize,
    pub player: PlayerId,
    pub actions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assumption3Report {
    pub conflicts: Vec<PlayConflict>,
    /// Informational: (viewer, state, player) where no action is deemed played.
    pub unplayed: Vec<(PlayerId, usize, PlayerId)>,
    state_names: Vec<String>,
}

impl Verdict for Assumption3Report {
    fn passed(&self) -> bool {
        self.conflicts.is_empty()
    }
}

impl fmt::Display for Assumption3Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conflicts.is_empty() {
            write!(f, "pass")?;
        } else {
            let lines: Vec<String> = self
                .conflicts
                .iter()
                .map(|c| {
                    format!(
                        "viewer {} at {}: player {} plays {} actions",
                        c.viewer,
                        self.state_names[c.state],
                        c.player,
                        c.actions.len()
                    )
                })
                .collect();
            write!(f, "fail: {}", lines.join("; "))?;
        }
        if !self.unplayed.is_empty() {
            write!(f, " ({} viewer/state/player triples with no action)", self.unplayed.len())?;
        }
        Ok(())
    }
}

/// Each viewer sees at most one action per player per state.
pub fn check_assumption3(m: &EpistemicStructure) -> Assumption3Report {
    let mut conflicts = Vec::new();
    let mut unplayed = Vec::new();
    for viewer in m.game.players() {
        for state in 0..m.num_states() {
            for player in m.game.players() {
                let actions = m.played(viewer, player, state);
                match actions.len() {
                    0 => unplayed.push((viewer, state, player)),
                    1 => {}
                    _ => conflicts.push(PlayConflict { viewer, state, player, actions }),
                }
            }
        }
    }
    Assumption3Report { conflicts, unplayed, state_names: m.states.clone() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefinitionStatus {
    Pass,
    Fail { received: StateSet, defined: StateSet },
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalDefinitionReport {
    /// (player, signal index, status)
    pub entries: Vec<(PlayerId, usize, DefinitionStatus)>,
    signal_names: Vec<String>,
}

impl SignalDefinitionReport {
    pub fn skipped(&self) -> bool {
        self.entries.iter().all(|(_, _, s)| *s == DefinitionStatus::Undefined)
    }
}

impl Verdict for SignalDefinitionReport {
    fn passed(&self) -> bool {
        !self.entries.iter().any(|(_, _, s)| matches!(s, DefinitionStatus::Fail { .. }))
    }
}

impl fmt::Display for SignalDefinitionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.skipped() {
            return write!(f, "skipped (no signal definitions)");
        }
        let failures: Vec<String> = self
            .entries
            .iter()
            .filter(|(_, _, s)| matches!(s, DefinitionStatus::Fail { .. }))
            .map(|(p, k, _)| format!("player {p} signal {}", self.signal_names[*k]))
            .collect();
        if failures.is_empty() {
            write!(f, "pass")
        } else {
            write!(f, "fail: {}", failures.join("; "))
        }
    }
}

/// `[[rec_i σ]]_i = [[definition(σ)]]_i` for each defined signal.
pub fn check_signal_definitions(m: &EpistemicStructure) -> SignalDefinitionReport {
    let mut checker = Checker::new(m);
    let mut entries = Vec::new();
    for p in m.game.players() {
        for (k, sig) in m.signals.iter().enumerate() {
            let status = match &sig.definition {
                None => DefinitionStatus::Undefined,
                Some(def) => {
                    let received = m.truth_set(p, &Atom::Receive(p, sig.name.clone()));
                    let defined = checker.intension(p, def);
                    if received == defined {
                        DefinitionStatus::Pass
                    } else {
                        DefinitionStatus::Fail { received, defined }
                    }
                }
            };
            entries.push((p, k, status));
        }
    }
    SignalDefinitionReport { entries, signal_names: m.signal_names() }
}

/// All interpretation functions agree pointwise.
pub fn is_common_interpretation(m: &EpistemicStructure) -> bool {
    // empty truth sets are dropped at construction, so map equality is pointwise equality
    m.interpretation.windows(2).all(|w| w[0] == w[1])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorPositivityReport {
    /// (player, cell index) with zero prior mass.
    pub null_cells: Vec<(PlayerId, usize)>,
}

impl Verdict for PriorPositivityReport {
    fn passed(&self) -> bool {
        self.null_cells.is_empty()
    }
}

impl fmt::Display for PriorPositivityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.null_cells.is_empty() {
            write!(f, "pass")
        } else {
            let cells: Vec<String> = self.null_cells.iter().map(|(p, c)| format!("player {p} cell {c}")).collect();
            write!(f, "fail: zero-mass {}", cells.join(", "))
        }
    }
}

/// `μ(h_i(ω)) > 0` for every player and state.
pub fn check_prior_positivity(m: &EpistemicStructure) -> PriorPositivityReport {
    let mut null_cells = Vec::new();
    for (i, part) in m.partitions.iter().enumerate() {
        for (c, cell) in part.cells().iter().enumerate() {
            if !m.scaled_measure(cell).is_positive() {
                null_cells.push((PlayerId(i), c));
            }
        }
    }
    PriorPositivityReport { null_cells }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalityFailure {
    pub player: PlayerId,
    pub state: usize,
    pub played: usize,
    pub better: usize,
    /// Expected payoff of `better` minus that of `played`, under `player`'s posterior.
    pub gap: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalityReport {
    pub failures: Vec<RationalityFailure>,
    state_names: Vec<String>,
    action_names: Vec<Vec<String>>,
}

impl Verdict for RationalityReport {
    fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for RationalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "pass");
        }
        let lines: Vec<String> = self
            .failures
            .iter()
            .map(|x| {
                let acts = &self.action_names[x.player.0];
                format!(
                    "player {} at {} plays {} but {} is better by {}",
                    x.player, self.state_names[x.state], acts[x.played], acts[x.better], x.gap
                )
            })
            .collect();
        write!(f, "fail: {}", lines.join("; "))
    }
}

/// `rat_i` holds at every state according to `i`, for every `i`.
pub fn check_individual_rationality(m: &EpistemicStructure) -> RationalityReport {
    let mut checker = Checker::new(m);
    let mut failures = Vec::new();
    for p in m.game.players() {
        let rational = checker.intension(p, &Formula::rational(p));
        if rational.is_full() {
            continue;
        }
        let opponents = m.game.opponent_profiles(p);
        let beliefs: Vec<StateSet> = opponents
            .iter()
            .map(|profile| {
                let others = Formula::conjunction(
                    m.game
                        .players()
                        .filter(|&q| q != p)
                        .map(|q| Formula::play(q, m.game.actions(q)[profile[q.0]].clone())),
                )
                .expect("at least two players");
                checker.intension(p, &others)
            })
            .collect();
        for state in rational.complement().iter() {
            let cell = m.cell(p, state);
            let mass = m.measure(cell);
            let expected = |action: usize| -> Rational {
                opponents
                    .iter()
                    .zip(&beliefs)
                    .map(|(base, event)| {
                        let prob = m.measure(&event.intersection(cell)) / &mass;
                        m.game.payoff(p, &m.game.with_action(base, p, action)) * prob
                    })
                    .sum()
            };
            let values: Vec<Rational> = (0..m.game.actions(p).len()).map(expected).collect();
            let best = (0..values.len()).fold(0, |b, a| if values[a] > values[b] { a } else { b });
            for played in m.played(p, p, state) {
                if values[played] < values[best] {
                    failures.push(RationalityFailure {
                        player: p,
                        state,
                        played,
                        better: best,
                        gap: &values[best] - &values[played],
                    });
                }
            }
        }
    }
    let action_names = m.game.players().map(|p| m.game.actions(p).to_vec()).collect();
    RationalityReport { failures, state_names: m.states.clone(), action_names }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::int;

    const A: PlayerId = PlayerId(0);
    const B: PlayerId = PlayerId(1);

    fn cells(m: &EpistemicStructure, p: PlayerId) -> Vec<Vec<&str>> {
        let mut out: Vec<Vec<&str>> =
            m.partition(p).cells().iter().map(|c| c.iter().map(|s| m.state_names()[s].as_str()).collect()).collect();
        out.sort();
        out
    }

    #[test]
    fn two_readings_partitions_are_derived() {
        let m = fixtures::two_readings();
        assert!(m.partitions_derived());
        assert_eq!(cells(&m, A), vec![vec!["w1", "w2"], vec!["w3", "w4"]]);
        assert_eq!(cells(&m, B), vec![vec!["w1", "w3"], vec!["w2", "w4"]]);
    }

    #[test]
    fn ambiguous_partitions_are_derived() {
        let m = fixtures::ambiguous();
        assert_eq!(cells(&m, A), vec![vec!["w"], vec!["w'"]]);
        assert_eq!(cells(&m, B), vec![vec!["w", "w'"]]);
    }

    #[test]
    fn single_state_partitions_are_trivial() {
        let m = fixtures::single_state();
        for p in m.game().players() {
            assert_eq!(m.partition(p).cells().len(), 1);
        }
    }

    #[test]
    fn derivation_requires_a_unique_own_signal() {
        let mut file = fixtures::ambiguous().to_file();
        file.interpretation["1"].insert("rec(1,s')".into(), vec!["w".into(), "w'".into()]);
        let err = file.into_structure(&fixtures::coordination_game()).unwrap_err();
        assert!(matches!(err, StructureError::Precondition { assumption: "Assumption 1", .. }), "{err}");
    }

    #[test]
    fn assumption1_on_fixtures() {
        let report = check_assumption1(&fixtures::two_readings());
        assert_eq!(report.pairs.len(), 4);
        assert!(report.passed(), "{report}");
        assert!(check_assumption1(&fixtures::ambiguous()).passed());
    }

    #[test]
    fn assumption1_reports_overlap() {
        let mut file = fixtures::ambiguous().to_file();
        file.interpretation["2"].insert("rec(1,s')".into(), vec!["w".into()]);
        let m = file.into_structure(&fixtures::coordination_game()).unwrap();
        let report = check_assumption1(&m);
        assert!(!report.passed());
        let pair = report.pair(A, B);
        assert_eq!(pair.issues, vec![SignalIssue::Overlap { state: 0, signals: vec![0, 1] }]);
        assert!(report.to_string().contains("all received at w"));
    }

    #[test]
    fn assumption2_on_fixtures() {
        assert!(check_assumption2(&fixtures::two_readings()).passed());
        assert!(check_assumption2(&fixtures::ambiguous()).passed());
        assert!(check_assumption2(&fixtures::cycle()).passed());
    }

    #[test]
    fn assumption2_detects_discrete_partition() {
        let mut file = fixtures::two_readings().to_file();
        let discrete = |states: &[&str]| states.iter().map(|s| vec![s.to_string()]).collect::<Vec<_>>();
        let mut parts = IndexMap::new();
        parts.insert("A".to_string(), discrete(&["w1", "w2", "w3", "w4"]));
        parts.insert("B".to_string(), vec![vec!["w1".into(), "w3".into()], vec!["w2".into(), "w4".into()]]);
        file.partitions = Some(parts);
        let m = file.into_structure(&fixtures::idle_game()).unwrap();
        let report = check_assumption2(&m);
        assert!(!report.passed());
        match &report.issues[0] {
            PartitionIssue::Mismatch { player, state, stored, derived } => {
                assert_eq!((*player, *state), (A, 0));
                assert_eq!(stored, &StateSet::from_indices(4, [0]));
                assert_eq!(derived, &StateSet::from_indices(4, [0, 1]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn assumption3_on_fixtures() {
        let report = check_assumption3(&fixtures::cycle());
        assert!(report.passed());
        assert!(report.unplayed.is_empty());
        assert!(check_assumption3(&fixtures::ambiguous()).passed());
    }

    #[test]
    fn assumption3_reports_double_play() {
        let mut file = fixtures::ambiguous().to_file();
        file.interpretation["1"].insert("pl(1,D)".into(), vec!["w".into(), "w'".into()]);
        let m = file.into_structure(&fixtures::coordination_game()).unwrap();
        let report = check_assumption3(&m);
        assert_eq!(report.conflicts, vec![PlayConflict { viewer: A, state: 0, player: A, actions: vec![0, 1] }]);
    }

    #[test]
    fn signal_definitions() {
        let report = check_signal_definitions(&fixtures::two_readings());
        assert!(!report.skipped());
        assert!(report.passed(), "{report}");

        let report = check_signal_definitions(&fixtures::ambiguous());
        assert!(report.skipped());
        assert_eq!(report.to_string(), "skipped (no signal definitions)");

        let mut file = fixtures::two_readings().to_file();
        file.signals.insert("s_p".into(), Some("!p".into()));
        let m = file.into_structure(&fixtures::idle_game()).unwrap();
        let report = check_signal_definitions(&m);
        assert!(!report.passed());
        let failing: Vec<PlayerId> = report
            .entries
            .iter()
            .filter(|(_, k, s)| *k == 0 && matches!(s, DefinitionStatus::Fail { .. }))
            .map(|(p, _, _)| *p)
            .collect();
        assert_eq!(failing, vec![A, B]);
    }

    #[test]
    fn common_interpretation() {
        assert!(is_common_interpretation(&fixtures::cycle()));
        assert!(!is_common_interpretation(&fixtures::ambiguous()));
        assert!(!is_common_interpretation(&fixtures::two_readings()));
        assert!(is_common_interpretation(&fixtures::two_readings_common()));
    }

    #[test]
    fn individual_rationality_on_fixtures() {
        assert!(check_individual_rationality(&fixtures::cycle()).passed());
        assert!(check_individual_rationality(&fixtures::ambiguous()).passed());
    }

    #[test]
    fn individual_rationality_failure_is_located() {
        let m = fixtures::ambiguous_rewired();
        let report = check_individual_rationality(&m);
        assert_eq!(
            report.failures,
            vec![RationalityFailure { player: A, state: 1, played: 0, better: 1, gap: int(1) }]
        );
    }

    #[test]
    fn zero_prior_states_allowed_when_cells_have_mass() {
        let mut file = fixtures::ambiguous().to_file();
        file.prior.insert("w".into(), "1".into());
        file.prior.insert("w'".into(), "0".into());
        let err = file.clone().into_structure(&fixtures::coordination_game()).unwrap_err();
        assert!(matches!(err, StructureError::Precondition { assumption: "prior positivity", .. }));

        // player 1 sees both states as one cell
        file.interpretation["1"].insert("rec(1,s)".into(), vec!["w".into(), "w'".into()]);
        file.interpretation["1"].shift_remove("rec(1,s')");
        let m = file.into_structure(&fixtures::coordination_game()).unwrap();
        assert!(check_prior_positivity(&m).passed());
    }

    #[test]
    fn schema_errors() {
        let g = fixtures::coordination_game();
        let mut file = fixtures::ambiguous().to_file();
        file.interpretation["1"].insert("pl(1,X)".into(), vec![]);
        assert!(matches!(file.into_structure(&g), Err(StructureError::Schema(_))));

        let mut file = fixtures::ambiguous().to_file();
        file.prior.insert("w".into(), "1/3".into());
        assert!(matches!(file.into_structure(&g), Err(StructureError::Precondition { assumption: "prior", .. })));

        let mut file = fixtures::ambiguous().to_file();
        file.interpretation["1"].insert("rec(1,s)".into(), vec!["nowhere".into()]);
        assert!(matches!(file.into_structure(&g), Err(StructureError::Schema(_))));
    }

    #[test]
    fn file_round_trip() {
        for m in [fixtures::two_readings(), fixtures::cycle(), fixtures::ambiguous()] {
            let again = m.to_file().into_structure(m.game()).unwrap();
            assert_eq!(again, m);
        }
    }

    #[test]
    fn own_signal_lies_in_own_cell() {
        for m in [fixtures::two_readings(), fixtures::cycle(), fixtures::ambiguous()] {
            for p in m.game().players() {
                for s in 0..m.num_states() {
                    let cell = m.cell(p, s);
                    assert!(cell.contains(s));
                    for t in cell.iter() {
                        assert_eq!(m.own_signal(p, t), m.own_signal(p, s));
                    }
                }
            }
        }
    }
}
