mod common;

use epicoord::construct::from_objective_ce;
use epicoord::fixtures;
use epicoord::formula::{expand, parse, Formula, Vocabulary};
use epicoord::game::{check_objective_ce, check_subjective_ce, solve_ce, Distribution, Game};
use epicoord::rational::{int, ratio};
use epicoord::semantics::{posterior, Checker};
use epicoord::structure::{is_common_interpretation, StructureFile};
use epicoord::sweep::{instance_rng, random_game, random_objective};
use epicoord::{EpistemicStructure, PlayerId, Rational, StateSet};
use num_traits::{One, Zero};
use proptest::prelude::*;

use common::{all_fixtures, formulas, Lexicon};

fn fixture(index: usize) -> EpistemicStructure {
    all_fixtures().swap_remove(index % 6).1
}

/// A fixture together with a formula over its vocabulary.
fn fixture_and_formula(depth: u32) -> impl Strategy<Value = (EpistemicStructure, Formula)> {
    (0usize..6).prop_flat_map(move |i| {
        let m = fixture(i);
        let lex = Lexicon::of(&m);
        (Just(m), formulas(&lex, depth))
    })
}

fn game_from(seed: u64) -> Game {
    random_game(&mut instance_rng(seed, 0))
}

fn random_distribution(game: &Game, raw: &[u8]) -> Distribution {
    let mut weights: Vec<Rational> = (0..game.profile_count()).map(|i| int(raw[i % raw.len()] as i64 % 5)).collect();
    if weights.iter().all(Zero::is_zero) {
        weights[0] = Rational::one();
    }
    let total: Rational = weights.iter().sum();
    Distribution::new(game, weights.into_iter().map(|w| w / &total).collect()).unwrap()
}

/// The deviation inequalities written out profile by profile.
fn brute_force_ce(game: &Game, d: &Distribution) -> bool {
    game.players().all(|i| {
        let k = game.actions(i).len();
        (0..k).all(|a| {
            (0..k).all(|b| {
                let gain: Rational = game
                    .profiles()
                    .filter(|p| p[i.0] == a)
                    .map(|p| {
                        let mut q = p.clone();
                        q[i.0] = b;
                        d.weight(game, &p) * (game.payoff(i, &p) - game.payoff(i, &q))
                    })
                    .sum();
                gain >= Rational::zero()
            })
        })
    })
}

fn pure_nash(game: &Game) -> Vec<Vec<usize>> {
    game.profiles()
        .filter(|p| {
            game.players().all(|i| {
                (0..game.actions(i).len()).all(|b| {
                    let mut q = p.clone();
                    q[i.0] = b;
                    game.payoff(i, p) >= game.payoff(i, &q)
                })
            })
        })
        .collect()
}

fn value(objective: &[Rational], d: &Distribution) -> Rational {
    objective.iter().zip(d.weights()).map(|(c, w)| c * w).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_then_parse_is_identity((m, f) in fixture_and_formula(4)) {
        let vocab = m.vocabulary();
        let text = f.to_string();
        let back = parse(&text, &vocab.get());
        prop_assert_eq!(back, Ok(f), "{}", text);
    }

    #[test]
    fn printing_is_stable((m, f) in fixture_and_formula(4)) {
        let vocab = m.vocabulary();
        let once = f.to_string();
        let twice = parse(&once, &vocab.get()).unwrap().to_string();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn expansion_preserves_meaning((m, f) in fixture_and_formula(3)) {
        let core = expand(&f, m.game());
        prop_assert!(core.is_core());
        let mut checker = Checker::new(&m);
        for v in m.game().players() {
            prop_assert_eq!(checker.intension(v, &f), checker.intension(v, &core), "{}", f);
        }
    }

    #[test]
    fn probability_and_common_belief_ignore_the_viewer((m, f) in fixture_and_formula(2), owner in 0usize..2) {
        let owner = PlayerId(owner % m.game().num_players());
        let mut checker = Checker::new(&m);
        for g in [
            Formula::common_belief(f.clone()),
            Formula::prob_ge(owner, vec![(ratio(1, 2), f.clone())], ratio(1, 3)),
            Formula::belief(owner, f.clone()),
        ] {
            let first = checker.intension(PlayerId(0), &g);
            for v in m.game().players() {
                prop_assert_eq!(&checker.intension(v, &g), &first, "{}", g);
            }
        }
    }

    #[test]
    fn common_interpretation_gives_one_intension(i in prop::sample::select(vec![1usize, 2, 5]), seed in any::<u64>()) {
        let m = fixture(i);
        prop_assume!(is_common_interpretation(&m));
        let lex = Lexicon::of(&m);
        let f = common::sample_formulas(&lex, 3, 1 + (seed % 16) as usize).pop().unwrap();
        let mut checker = Checker::new(&m);
        let first = checker.intension(PlayerId(0), &f);
        for v in m.game().players() {
            prop_assert_eq!(&checker.intension(v, &f), &first);
        }
    }

    #[test]
    fn common_belief_lies_inside_every_mutual_belief((m, f) in fixture_and_formula(2)) {
        let mut checker = Checker::new(&m);
        let cb = checker.cb_intension(&f);
        for k in 1..=4 {
            prop_assert!(cb.is_subset(&checker.intension(PlayerId(0), &Formula::mutual_belief(k, f.clone()))));
        }
    }

    #[test]
    fn posteriors_of_complements_sum_to_one((m, f) in fixture_and_formula(2)) {
        let p = PlayerId(0);
        let event = Checker::new(&m).intension(p, &f);
        for s in 0..m.num_states() {
            let total = posterior(&m, p, &event, s) + posterior(&m, p, &event.complement(), s);
            prop_assert!(total.is_one());
        }
    }

    #[test]
    fn parse_errors_point_into_the_input(text in "[a-zA-Z0-9_(),&!<>=+*/^ -]{0,24}") {
        let game = fixtures::cycle_game();
        let atoms = vec!["p".to_string()];
        let vocab = Vocabulary::new(&game).with_atoms(&atoms);
        if let Err(e) = parse(&text, &vocab) {
            prop_assert!(e.position <= text.len());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn objective_check_matches_brute_force(seed in any::<u64>(), raw in prop::collection::vec(any::<u8>(), 1..30)) {
        let game = game_from(seed);
        let d = random_distribution(&game, &raw);
        prop_assert_eq!(check_objective_ce(&game, &d).unwrap().holds(), brute_force_ce(&game, &d));
    }

    #[test]
    fn objective_is_subjective_with_identical_copies(seed in any::<u64>(), raw in prop::collection::vec(any::<u8>(), 1..30)) {
        let game = game_from(seed);
        let d = random_distribution(&game, &raw);
        let copies = vec![d.clone(); game.num_players()];
        prop_assert_eq!(check_objective_ce(&game, &d).unwrap().holds(), check_subjective_ce(&game, &copies).unwrap().holds());
    }

    #[test]
    fn pure_nash_point_masses_are_equilibria(seed in any::<u64>()) {
        let game = game_from(seed);
        for p in pure_nash(&game) {
            prop_assert!(check_objective_ce(&game, &Distribution::point_mass(&game, &p)).unwrap().holds());
        }
    }

    #[test]
    fn solver_returns_an_optimal_equilibrium(seed in any::<u64>()) {
        let game = game_from(seed);
        let objective = random_objective(&mut instance_rng(seed, 1), &game);
        let d = solve_ce(&game, &objective).unwrap();
        prop_assert!(d.weights().iter().all(|w| *w >= Rational::zero()));
        prop_assert!(d.weights().iter().sum::<Rational>().is_one());
        prop_assert!(brute_force_ce(&game, &d));
        // Any pure Nash point mass is feasible, so it cannot beat the optimum.
        for p in pure_nash(&game) {
            prop_assert!(value(&objective, &d) >= value(&objective, &Distribution::point_mass(&game, &p)));
        }
    }

    #[test]
    fn constructed_structures_survive_serialization(seed in any::<u64>()) {
        let game = game_from(seed);
        let d = solve_ce(&game, &random_objective(&mut instance_rng(seed, 1), &game)).unwrap();
        let out = from_objective_ce(&game, &d).unwrap();
        let text = serde_json::to_string(&out.structure_file()).unwrap();
        let file: StructureFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(file.into_structure(&game).unwrap(), out.structure.clone());
        prop_assert!(is_common_interpretation(&out.structure));
    }
}

#[test]
fn state_sets_behave_like_sets() {
    let a = StateSet::from_indices(10, [1, 3, 5, 7]);
    let b = StateSet::from_indices(10, [3, 4, 5]);
    assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![3, 5]);
    assert_eq!(a.union(&b).len(), 5);
    assert_eq!(a.complement().len(), 6);
    assert!(a.intersection(&b).is_subset(&a));
    assert!(a.is_disjoint(&a.complement()));
}
