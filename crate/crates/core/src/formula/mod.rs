//! The formula language: AST, surface syntax, and expansion of abbreviations.
//!
//! Core connectives are atoms, `!`, `&`, linear probability inequalities and
//! `CB`. Implication, `B_i`, `EB^m`, `opt_i(a)` and `rat_i` are sugar; the
//! parser keeps them as written and [`expand`] rewrites them into the core.

mod expand;
mod parse;
mod print;

use std::fmt;

use crate::game::{Game, PlayerId};
use crate::rational::Rational;

pub use expand::{expand, expand_with, CoreBuilder};
pub(crate) use parse::is_atom_name;
pub use parse::{parse, parse_atom, ParseError, ParseErrorKind, Vocabulary};

/// A primitive proposition as seen by interpretation functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Prim(String),
    /// `pl(i, a)`: player `i` plays action `a`.
    Play(PlayerId, String),
    /// `rec(i, s)`: player `i` received signal `s`.
    Receive(PlayerId, String),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Prim(name) => write!(f, "{name}"),
            Atom::Play(p, a) => write!(f, "pl({p},{a})"),
            Atom::Receive(p, s) => write!(f, "rec({p},{s})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// `b_1·pr_j(φ_1) + … + b_k·pr_j(φ_k) >= c`
    ProbGe {
        owner: PlayerId,
        terms: Vec<(Rational, Formula)>,
        bound: Rational,
    },
    CommonBelief(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Belief(PlayerId, Box<Formula>),
    /// `EB^order`, with `order >= 1`.
    MutualBelief(u32, Box<Formula>),
    /// `opt_i(a)`: action `a` is utility-maximizing for `i`.
    Optimal(PlayerId, String),
    /// `rat_i`: `i` never plays a non-maximizing action.
    Rational(PlayerId),
}

impl Formula {
    pub fn prim(name: impl Into<String>) -> Self {
        Formula::Atom(Atom::Prim(name.into()))
    }

    pub fn play(player: PlayerId, action: impl Into<String>) -> Self {
        Formula::Atom(Atom::Play(player, action.into()))
    }

    pub fn receive(player: PlayerId, signal: impl Into<String>) -> Self {
        Formula::Atom(Atom::Receive(player, signal.into()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Self {
        Formula::Not(Box::new(inner))
    }

    pub fn and(left: Formula, right: Formula) -> Self {
        Formula::And(Box::new(left), Box::new(right))
    }

    pub fn implies(left: Formula, right: Formula) -> Self {
        Formula::Implies(Box::new(left), Box::new(right))
    }

    pub fn prob_ge(owner: PlayerId, terms: Vec<(Rational, Formula)>, bound: Rational) -> Self {
        Formula::ProbGe { owner, terms, bound }
    }

    pub fn belief(player: PlayerId, inner: Formula) -> Self {
        Formula::Belief(player, Box::new(inner))
    }

    pub fn mutual_belief(order: u32, inner: Formula) -> Self {
        Formula::MutualBelief(order, Box::new(inner))
    }

    pub fn common_belief(inner: Formula) -> Self {
        Formula::CommonBelief(Box::new(inner))
    }

    pub fn optimal(player: PlayerId, action: impl Into<String>) -> Self {
        Formula::Optimal(player, action.into())
    }

    pub fn rational(player: PlayerId) -> Self {
        Formula::Rational(player)
    }

    /// Left-nested conjunction; `None` for an empty iterator.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    /// `pl_1 a_1 & … & pl_n a_n` for a full profile of action indices.
    pub fn plays_profile(game: &Game, profile: &[usize]) -> Formula {
        Formula::conjunction(game.players().map(|p| Formula::play(p, game.actions(p)[profile[p.0]].clone())))
            .expect("games have at least one player")
    }

    pub fn is_sugar(&self) -> bool {
        matches!(
            self,
            Formula::Implies(..)
                | Formula::Belief(..)
                | Formula::MutualBelief(..)
                | Formula::Optimal(..)
                | Formula::Rational(..)
        )
    }

    /// True when no sugar node occurs anywhere in the tree.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(f) | Formula::CommonBelief(f) => f.is_core(),
            Formula::And(a, b) => a.is_core() && b.is_core(),
            Formula::ProbGe { terms, .. } => terms.iter().all(|(_, f)| f.is_core()),
            _ => false,
        }
    }

    /// Checks identifier references and structural side conditions.
    pub fn check_well_formed(&self, vocab: &Vocabulary<'_>) -> Result<(), String> {
        let game = vocab.game;
        let player_ok = |p: &PlayerId| {
            if p.0 < game.num_players() {
                Ok(())
            } else {
                Err(format!("unknown player {p}"))
            }
        };
        match self {
            Formula::Atom(Atom::Prim(name)) => {
                if vocab.atoms.is_some_and(|atoms| !atoms.iter().any(|a| a == name)) {
                    return Err(format!("undeclared atom `{name}`"));
                }
                Ok(())
            }
            Formula::Atom(Atom::Play(p, a)) | Formula::Optimal(p, a) => {
                player_ok(p)?;
                game.action_index(*p, a).map(|_| ()).ok_or_else(|| format!("unknown action `{a}` for player {p}"))
            }
            Formula::Atom(Atom::Receive(p, s)) => {
                player_ok(p)?;
                if vocab.signals.is_some_and(|sigs| !sigs.iter().any(|x| x == s)) {
                    return Err(format!("unknown signal `{s}`"));
                }
                Ok(())
            }
            Formula::Not(f) | Formula::CommonBelief(f) => f.check_well_formed(vocab),
            Formula::And(a, b) | Formula::Implies(a, b) => {
                a.check_well_formed(vocab)?;
                b.check_well_formed(vocab)
            }
            Formula::ProbGe { owner, terms, .. } => {
                player_ok(owner)?;
                if terms.is_empty() {
                    return Err("probability formula without terms".into());
                }
                terms.iter().try_for_each(|(_, f)| f.check_well_formed(vocab))
            }
            Formula::Belief(p, f) => {
                player_ok(p)?;
                f.check_well_formed(vocab)
            }
            Formula::MutualBelief(order, f) => {
                if *order == 0 {
                    return Err("EB order must be at least 1".into());
                }
                f.check_well_formed(vocab)
            }
            Formula::Rational(p) => player_ok(p),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Optimal(..) | Formula::Rational(_) => 1,
            Formula::Not(f) | Formula::CommonBelief(f) | Formula::Belief(_, f) | Formula::MutualBelief(_, f) => {
                1 + f.size()
            }
            Formula::And(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
            Formula::ProbGe { terms, .. } => 1 + terms.iter().map(|(_, f)| f.size()).sum::<usize>(),
        }
    }
}

impl From<Atom> for Formula {
    fn from(atom: Atom) -> Self {
        Formula::Atom(atom)
    }
}
