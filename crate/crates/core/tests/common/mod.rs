#![allow(dead_code)]

use epicoord::fixtures;
use epicoord::formula::{expand, Atom, Formula};
use epicoord::rational::ratio;
use epicoord::{EpistemicStructure, Game, PlayerId, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::sample::select;

/// Every fixture structure, named.
pub fn all_fixtures() -> Vec<(&'static str, EpistemicStructure)> {
    vec![
        ("two_readings", fixtures::two_readings()),
        ("two_readings_common", fixtures::two_readings_common()),
        ("cycle", fixtures::cycle()),
        ("ambiguous", fixtures::ambiguous()),
        ("ambiguous_rewired", fixtures::ambiguous_rewired()),
        ("single_state", fixtures::single_state()),
    ]
}

/// Identifiers a generated formula may use.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pub game: Game,
    pub signals: Vec<String>,
    pub atoms: Vec<String>,
}

impl Lexicon {
    pub fn of(m: &EpistemicStructure) -> Self {
        Lexicon { game: m.game().clone(), signals: m.signal_names(), atoms: m.atoms().to_vec() }
    }

    pub fn bare(game: &Game) -> Self {
        Lexicon { game: game.clone(), signals: vec![], atoms: vec![] }
    }
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=3).prop_map(|(p, q)| ratio(p, q))
}

/// Well-formed formulas over `lex`, nested up to `depth` connectives deep.
pub fn formulas(lex: &Lexicon, depth: u32) -> BoxedStrategy<Formula> {
    let game = &lex.game;
    let players: Vec<PlayerId> = game.players().collect();
    let moves: Vec<(PlayerId, String)> =
        game.players().flat_map(|p| game.actions(p).iter().map(move |a| (p, a.clone()))).collect();

    let mut leaves: Vec<BoxedStrategy<Formula>> = vec![
        select(moves.clone()).prop_map(|(p, a)| Formula::play(p, a)).boxed(),
        select(moves).prop_map(|(p, a)| Formula::optimal(p, a)).boxed(),
        select(players.clone()).prop_map(Formula::rational).boxed(),
    ];
    if !lex.signals.is_empty() {
        let receipts: Vec<(PlayerId, String)> =
            players.iter().flat_map(|&p| lex.signals.iter().map(move |s| (p, s.clone()))).collect();
        leaves.push(select(receipts).prop_map(|(p, s)| Formula::receive(p, s)).boxed());
    }
    if !lex.atoms.is_empty() {
        leaves.push(select(lex.atoms.clone()).prop_map(Formula::prim).boxed());
    }
    let leaf = proptest::strategy::Union::new(leaves);

    leaf.prop_recursive(depth, 24, 3, move |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (select(players.clone()), inner.clone()).prop_map(|(p, f)| Formula::belief(p, f)),
            (1u32..=2, inner.clone()).prop_map(|(k, f)| Formula::mutual_belief(k, f)),
            inner.clone().prop_map(Formula::common_belief),
            (
                select(players.clone()),
                prop::collection::vec((small_rational(), inner.clone()), 1..=3),
                small_rational()
            )
                .prop_map(|(p, terms, c)| Formula::prob_ge(p, terms, c)),
        ]
    })
    .boxed()
}

/// Draws `count` formulas from a fixed-seed runner.
pub fn sample_formulas(lex: &Lexicon, depth: u32, count: usize) -> Vec<Formula> {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let strategy = formulas(lex, depth);
    let mut runner = TestRunner::deterministic();
    (0..count).map(|_| strategy.new_tree(&mut runner).expect("formula tree").current()).collect()
}

// Brute-force evaluation. Truth sets are plain `Vec<bool>` indexed by state,
// recomputed from scratch at every node, and posteriors are exact quotients of
// prior sums.

type Truth = Vec<bool>;

fn everywhere(m: &EpistemicStructure, value: bool) -> Truth {
    vec![value; m.num_states()]
}

/// `μ(E ∩ h) / μ(h)` for the cell `h` of `player` containing `state`.
pub fn brute_posterior(m: &EpistemicStructure, player: PlayerId, event: &[bool], state: usize) -> Rational {
    let prior = m.prior();
    let mut inside = Rational::zero();
    let mut total = Rational::zero();
    for t in 0..m.num_states() {
        if m.cell(player, t).contains(state) {
            total += &prior[t];
            if event[t] {
                inside += &prior[t];
            }
        }
    }
    inside / total
}

fn everybody_believes(m: &EpistemicStructure, events: &[Truth]) -> Truth {
    (0..m.num_states()).map(|s| m.game().players().all(|p| brute_posterior(m, p, &events[p.0], s).is_one())).collect()
}

/// `⋂_{k=1}^{|Ω|+1} EB^k`: the partial intersections decrease and are fixed
/// once two consecutive ones agree, which takes at most `|Ω| + 1` steps.
fn common_belief(m: &EpistemicStructure, per_viewer: Vec<Truth>) -> Truth {
    let n = m.game().num_players();
    let mut level = everybody_believes(m, &per_viewer);
    let mut acc = level.clone();
    for _ in 0..m.num_states() {
        level = everybody_believes(m, &vec![level; n]);
        acc = acc.iter().zip(&level).map(|(a, b)| *a && *b).collect();
    }
    acc
}

fn linear_event(m: &EpistemicStructure, owner: PlayerId, terms: &[(Rational, Truth)], bound: &Rational) -> Truth {
    (0..m.num_states())
        .map(|s| {
            let lhs: Rational = terms.iter().map(|(c, e)| c * brute_posterior(m, owner, e, s)).sum();
            lhs >= *bound
        })
        .collect()
}

/// Evaluates the fully expanded core formula, with no sharing between nodes.
pub fn core_truth(m: &EpistemicStructure, viewer: PlayerId, f: &Formula) -> Truth {
    match f {
        Formula::Atom(a) => (0..m.num_states()).map(|s| m.is_true(viewer, s, a)).collect(),
        Formula::Not(x) => core_truth(m, viewer, x).into_iter().map(|b| !b).collect(),
        Formula::And(x, y) => {
            core_truth(m, viewer, x).into_iter().zip(core_truth(m, viewer, y)).map(|(a, b)| a && b).collect()
        }
        Formula::ProbGe { owner, terms, bound } => {
            let sets: Vec<(Rational, Truth)> =
                terms.iter().map(|(c, g)| (c.clone(), core_truth(m, *owner, g))).collect();
            linear_event(m, *owner, &sets, bound)
        }
        Formula::CommonBelief(x) => common_belief(m, m.game().players().map(|p| core_truth(m, p, x)).collect()),
        other => panic!("not a core formula: {other}"),
    }
}

/// Oracle for `holds` through the library's own abbreviation expansion.
pub fn expanded_truth(m: &EpistemicStructure, viewer: PlayerId, f: &Formula) -> Truth {
    core_truth(m, viewer, &expand(f, m.game()))
}

/// Evaluates abbreviations directly from their meaning instead of expanding.
pub fn direct_truth(m: &EpistemicStructure, viewer: PlayerId, f: &Formula) -> Truth {
    let game = m.game();
    match f {
        Formula::Atom(a) => (0..m.num_states()).map(|s| m.is_true(viewer, s, a)).collect(),
        Formula::Not(x) => direct_truth(m, viewer, x).into_iter().map(|b| !b).collect(),
        Formula::And(x, y) => {
            direct_truth(m, viewer, x).into_iter().zip(direct_truth(m, viewer, y)).map(|(a, b)| a && b).collect()
        }
        Formula::Implies(x, y) => {
            direct_truth(m, viewer, x).into_iter().zip(direct_truth(m, viewer, y)).map(|(a, b)| !a || b).collect()
        }
        Formula::ProbGe { owner, terms, bound } => {
            let sets: Vec<(Rational, Truth)> =
                terms.iter().map(|(c, g)| (c.clone(), direct_truth(m, *owner, g))).collect();
            linear_event(m, *owner, &sets, bound)
        }
        Formula::Belief(p, x) => {
            let event = direct_truth(m, *p, x);
            (0..m.num_states()).map(|s| brute_posterior(m, *p, &event, s).is_one()).collect()
        }
        Formula::MutualBelief(k, x) => {
            let mut per_viewer: Vec<Truth> = game.players().map(|p| direct_truth(m, p, x)).collect();
            let mut level = everywhere(m, true);
            for _ in 0..*k {
                level = everybody_believes(m, &per_viewer);
                per_viewer = vec![level.clone(); game.num_players()];
            }
            level
        }
        Formula::CommonBelief(x) => common_belief(m, game.players().map(|p| direct_truth(m, p, x)).collect()),
        Formula::Optimal(p, a) => optimal_truth(m, *p, game.action_index(*p, a).expect("action")),
        Formula::Rational(p) => {
            let mut out = everywhere(m, true);
            for (i, a) in game.actions(*p).iter().enumerate() {
                let opt = optimal_truth(m, *p, i);
                for s in 0..m.num_states() {
                    if m.is_true(viewer, s, &Atom::Play(*p, a.clone())) && !opt[s] {
                        out[s] = false;
                    }
                }
            }
            out
        }
    }
}

/// Whether action `chosen` maximizes `p`'s expected payoff, where `p` reads
/// opponents' play through its own interpretation.
fn optimal_truth(m: &EpistemicStructure, p: PlayerId, chosen: usize) -> Truth {
    let game = m.game();
    let opponents: Vec<Vec<usize>> = game.profiles().filter(|prof| prof[p.0] == 0).collect();
    let events: Vec<Truth> = opponents
        .iter()
        .map(|prof| {
            (0..m.num_states())
                .map(|s| {
                    game.players()
                        .filter(|&q| q != p)
                        .all(|q| m.is_true(p, s, &Atom::Play(q, game.actions(q)[prof[q.0]].clone())))
                })
                .collect()
        })
        .collect();
    (0..m.num_states())
        .map(|s| {
            let weights: Vec<Rational> = events.iter().map(|e| brute_posterior(m, p, e, s)).collect();
            let value = |action: usize| -> Rational {
                opponents
                    .iter()
                    .zip(&weights)
                    .map(|(prof, w)| {
                        let mut full = prof.clone();
                        full[p.0] = action;
                        w * game.payoff(p, &full)
                    })
                    .sum()
            };
            let mine = value(chosen);
            (0..game.actions(p).len()).all(|alt| mine >= value(alt))
        })
        .collect()
}

/// Hand-written formulas worth checking on every fixture.
pub fn named_formulas(m: &EpistemicStructure) -> Vec<Formula> {
    let game = m.game();
    let all = |f: fn(PlayerId) -> Formula| Formula::conjunction(game.players().map(f)).expect("players");
    let beliefs = Formula::conjunction(game.players().map(|p| Formula::belief(p, Formula::rational(p)))).unwrap();
    let mut out = vec![
        all(Formula::rational),
        Formula::common_belief(all(Formula::rational)),
        Formula::common_belief(beliefs.clone()),
        Formula::mutual_belief(3, beliefs),
    ];
    for atom in m.atoms() {
        let p = Formula::prim(atom.clone());
        out.push(Formula::mutual_belief(2, p.clone()));
        out.push(Formula::common_belief(p.clone()));
        for q in game.players() {
            for r in game.players() {
                out.push(Formula::not(Formula::belief(q, Formula::belief(r, p.clone()))));
            }
        }
    }
    out
}
