use num_traits::{One, Zero};

use super::{Atom, Formula};
use crate::game::{Game, PlayerId};
use crate::rational::Rational;

/// Target of abbreviation expansion. Tree output uses [`Formula`]; the model
/// checker builds a shared DAG through the same rules.
pub trait CoreBuilder {
    type Node: Clone;

    fn atom(&mut self, atom: &Atom) -> Self::Node;
    fn not(&mut self, inner: Self::Node) -> Self::Node;
    fn and(&mut self, left: Self::Node, right: Self::Node) -> Self::Node;
    fn prob_ge(&mut self, owner: PlayerId, terms: Vec<(Rational, Self::Node)>, bound: Rational) -> Self::Node;
    fn common_belief(&mut self, inner: Self::Node) -> Self::Node;
}

/// Rewrites every abbreviation into core connectives.
pub fn expand(f: &Formula, game: &Game) -> Formula {
    expand_with(f, game, &mut TreeBuilder)
}

pub fn expand_with<B: CoreBuilder>(f: &Formula, game: &Game, b: &mut B) -> B::Node {
    match f {
        Formula::Atom(atom) => b.atom(atom),
        Formula::Not(inner) => {
            let x = expand_with(inner, game, b);
            b.not(x)
        }
        Formula::And(l, r) => {
            let x = expand_with(l, game, b);
            let y = expand_with(r, game, b);
            b.and(x, y)
        }
        Formula::ProbGe { owner, terms, bound } => {
            let terms = terms.iter().map(|(c, f)| (c.clone(), expand_with(f, game, b))).collect();
            b.prob_ge(*owner, terms, bound.clone())
        }
        Formula::CommonBelief(inner) => {
            let x = expand_with(inner, game, b);
            b.common_belief(x)
        }
        Formula::Implies(l, r) => {
            let x = expand_with(l, game, b);
            let y = expand_with(r, game, b);
            implication(b, x, y)
        }
        Formula::Belief(p, inner) => {
            let x = expand_with(inner, game, b);
            belief(b, *p, x)
        }
        Formula::MutualBelief(order, inner) => {
            let mut x = expand_with(inner, game, b);
            for _ in 0..(*order).max(1) {
                x = everybody_believes(b, game, x);
            }
            x
        }
        Formula::Optimal(p, action) => optimal(b, game, *p, action),
        Formula::Rational(p) => {
            let parts: Vec<B::Node> = game
                .actions(*p)
                .iter()
                .map(|a| {
                    let play = b.atom(&Atom::Play(*p, a.clone()));
                    let opt = optimal(b, game, *p, a);
                    implication(b, play, opt)
                })
                .collect();
            conjoin(b, parts)
        }
    }
}

fn conjoin<B: CoreBuilder>(b: &mut B, parts: Vec<B::Node>) -> B::Node {
    let mut iter = parts.into_iter();
    let first = iter.next().expect("nonempty conjunction");
    iter.fold(first, |acc, x| b.and(acc, x))
}

/// `φ -> ψ` is `!(φ & !ψ)`.
fn implication<B: CoreBuilder>(b: &mut B, x: B::Node, y: B::Node) -> B::Node {
    let ny = b.not(y);
    let conj = b.and(x, ny);
    b.not(conj)
}

/// `B_j φ` is `pr_j(φ) >= 1 & -1*pr_j(φ) >= -1`.
fn belief<B: CoreBuilder>(b: &mut B, player: PlayerId, x: B::Node) -> B::Node {
    let one = Rational::one();
    let lower = b.prob_ge(player, vec![(one.clone(), x.clone())], one.clone());
    let upper = b.prob_ge(player, vec![(-one.clone(), x)], -one);
    b.and(lower, upper)
}

fn everybody_believes<B: CoreBuilder>(b: &mut B, game: &Game, x: B::Node) -> B::Node {
    let parts = game.players().map(|p| belief(b, p, x.clone())).collect();
    conjoin(b, parts)
}

/// `opt_i(a)`: for each `a'`, `Σ_{a_-i} [u_i(a,a_-i) − u_i(a',a_-i)]·pr_i(pl_-i a_-i) >= 0`.
fn optimal<B: CoreBuilder>(b: &mut B, game: &Game, player: PlayerId, action: &str) -> B::Node {
    let chosen = game
        .action_index(player, action)
        .unwrap_or_else(|| panic!("action `{action}` not available to player {player}"));
    let opponents = game.opponent_profiles(player);
    let others: Vec<B::Node> = opponents
        .iter()
        .map(|profile| {
            let parts = game
                .players()
                .filter(|&q| q != player)
                .map(|q| b.atom(&Atom::Play(q, game.actions(q)[profile[q.0]].clone())))
                .collect();
            conjoin(b, parts)
        })
        .collect();
    let parts = (0..game.actions(player).len())
        .map(|alt| {
            let terms = opponents
                .iter()
                .zip(&others)
                .map(|(base, node)| {
                    let on = game.with_action(base, player, chosen);
                    let off = game.with_action(base, player, alt);
                    (game.payoff(player, &on) - game.payoff(player, &off), node.clone())
                })
                .collect();
            b.prob_ge(player, terms, Rational::zero())
        })
        .collect();
    conjoin(b, parts)
}

struct TreeBuilder;

impl CoreBuilder for TreeBuilder {
    type Node = Formula;

    fn atom(&mut self, atom: &Atom) -> Formula {
        Formula::Atom(atom.clone())
    }

    fn not(&mut self, inner: Formula) -> Formula {
        Formula::not(inner)
    }

    fn and(&mut self, left: Formula, right: Formula) -> Formula {
        Formula::and(left, right)
    }

    fn prob_ge(&mut self, owner: PlayerId, terms: Vec<(Rational, Formula)>, bound: Rational) -> Formula {
        Formula::prob_ge(owner, terms, bound)
    }

    fn common_belief(&mut self, inner: Formula) -> Formula {
        Formula::common_belief(inner)
    }
}
