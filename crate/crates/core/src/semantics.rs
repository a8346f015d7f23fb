//! Model checking: satisfaction relative to a state and a viewer, intensions,
//! Bayes posteriors, and the common-belief fixed point.
//!
//! Formulas are expanded into a hash-consed DAG so that shared subformulas
//! (nested `EB`, the opponent-profile conjunctions of `opt_i`) are evaluated
//! once per viewer. Probability formulas and `CB` do not depend on the viewer
//! and are cached once.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::formula::{expand_with, Atom, CoreBuilder, Formula};
use crate::game::PlayerId;
use crate::par::{map_slice, Execution};
use crate::rational::Rational;
use crate::stateset::StateSet;
use crate::structure::EpistemicStructure;

/// Below this many cells, per-cell work stays on the calling thread.
const PARALLEL_CELLS: usize = 64;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Atom(Atom),
    Not(NodeId),
    And(NodeId, NodeId),
    ProbGe { owner: PlayerId, terms: Vec<(Rational, NodeId)>, bound: Rational },
    CommonBelief(NodeId),
}

#[derive(Debug, Default)]
struct Dag {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
}

impl Dag {
    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }
}

impl CoreBuilder for Dag {
    type Node = NodeId;

    fn atom(&mut self, atom: &Atom) -> NodeId {
        self.intern(Node::Atom(atom.clone()))
    }

    fn not(&mut self, inner: NodeId) -> NodeId {
        self.intern(Node::Not(inner))
    }

    fn and(&mut self, left: NodeId, right: NodeId) -> NodeId {
        self.intern(Node::And(left, right))
    }

    fn prob_ge(&mut self, owner: PlayerId, terms: Vec<(Rational, NodeId)>, bound: Rational) -> NodeId {
        self.intern(Node::ProbGe { owner, terms, bound })
    }

    fn common_belief(&mut self, inner: NodeId) -> NodeId {
        self.intern(Node::CommonBelief(inner))
    }
}

/// A memoizing evaluator bound to one structure.
pub struct Checker<'m> {
    model: &'m EpistemicStructure,
    dag: Dag,
    /// Keyed by node and viewer; viewer-independent nodes use `None`.
    memo: HashMap<(NodeId, Option<PlayerId>), StateSet>,
    exec: Execution,
}

impl<'m> Checker<'m> {
    pub fn new(model: &'m EpistemicStructure) -> Self {
        Self::with_execution(model, Execution::default())
    }

    pub fn with_execution(model: &'m EpistemicStructure, exec: Execution) -> Self {
        Checker { model, dag: Dag::default(), memo: HashMap::new(), exec }
    }

    pub fn model(&self) -> &'m EpistemicStructure {
        self.model
    }

    /// Expands `f` into the shared DAG.
    pub fn compile(&mut self, f: &Formula) -> NodeId {
        expand_with(f, self.model.game(), &mut self.dag)
    }

    /// `[[f]]_viewer`.
    pub fn intension(&mut self, viewer: PlayerId, f: &Formula) -> StateSet {
        let node = self.compile(f);
        self.eval(node, viewer)
    }

    pub fn holds(&mut self, state: usize, viewer: PlayerId, f: &Formula) -> bool {
        self.intension(viewer, f).contains(state)
    }

    /// True at every state for every viewer.
    pub fn valid(&mut self, f: &Formula) -> bool {
        let node = self.compile(f);
        self.model.game().players().all(|p| self.eval(node, p).is_full())
    }

    /// `[[CB f]]`, identical for every viewer.
    pub fn cb_intension(&mut self, f: &Formula) -> StateSet {
        let node = self.compile(f);
        let cb = self.dag.common_belief(node);
        self.eval(cb, PlayerId(0))
    }

    /// Number of distinct core nodes compiled so far.
    pub fn dag_size(&self) -> usize {
        self.dag.nodes.len()
    }

    fn eval(&mut self, node: NodeId, viewer: PlayerId) -> StateSet {
        let independent = matches!(self.dag.nodes[node], Node::ProbGe { .. } | Node::CommonBelief(_));
        let key = (node, if independent { None } else { Some(viewer) });
        if let Some(set) = self.memo.get(&key) {
            return set.clone();
        }
        let result = match self.dag.nodes[node].clone() {
            Node::Atom(atom) => self.model.truth_set(viewer, &atom),
            Node::Not(inner) => self.eval(inner, viewer).complement(),
            Node::And(l, r) => {
                let left = self.eval(l, viewer);
                if left.is_empty() {
                    left
                } else {
                    left.intersection(&self.eval(r, viewer))
                }
            }
            Node::ProbGe { owner, terms, bound } => {
                let sets: Vec<(Rational, StateSet)> =
                    terms.into_iter().map(|(c, t)| (c, self.eval(t, owner))).collect();
                probability_event(self.model, self.exec, owner, &sets, &bound)
            }
            Node::CommonBelief(inner) => {
                let per_viewer: Vec<StateSet> = self.model.game().players().map(|p| self.eval(inner, p)).collect();
                common_belief_event(self.model, self.exec, &per_viewer)
            }
        };
        self.memo.insert(key, result.clone());
        result
    }
}

/// `{ω : Σ_k b_k·μ(S_k | h_owner(ω)) ≥ c}`, decided cell by cell in integers.
fn probability_event(
    m: &EpistemicStructure,
    exec: Execution,
    owner: PlayerId,
    terms: &[(Rational, StateSet)],
    bound: &Rational,
) -> StateSet {
    let cells = m.partition(owner).cells();
    let decide = |cell: &StateSet| -> bool {
        // μ(h) > 0, so compare Σ b_k·μ(S_k ∩ h) with c·μ(h), all scaled by the
        // common prior denominator.
        let lhs: Rational = terms
            .iter()
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, set)| c * Rational::from_integer(m.scaled_measure(&set.intersection(cell))))
            .sum();
        lhs >= bound * Rational::from_integer(m.scaled_measure(cell))
    };
    let verdicts =
        if cells.len() >= PARALLEL_CELLS { map_slice(exec, cells, decide) } else { cells.iter().map(decide).collect() };
    let mut out = StateSet::empty(m.num_states());
    for (cell, yes) in cells.iter().zip(verdicts) {
        if yes {
            for s in cell.iter() {
                out.insert(s);
            }
        }
    }
    out
}

/// `{ω : μ(E_j | h_j(ω)) = 1 for every j}` where `E_j` is `events[j]`.
pub fn everybody_believes_event(m: &EpistemicStructure, exec: Execution, events: &[StateSet]) -> StateSet {
    let mut out = StateSet::full(m.num_states());
    for p in m.game().players() {
        let cells = m.partition(p).cells();
        let outside = events[p.0].complement();
        let certain = |cell: &StateSet| m.scaled_measure(&cell.intersection(&outside)).is_zero();
        let verdicts = if cells.len() >= PARALLEL_CELLS {
            map_slice(exec, cells, certain)
        } else {
            cells.iter().map(certain).collect()
        };
        for (cell, yes) in cells.iter().zip(verdicts) {
            if !yes {
                for s in cell.iter() {
                    out.remove(s);
                }
            }
        }
    }
    out
}

/// Intersection of the orbit `F_1 = EB(E)`, `F_{k+1} = EB(F_k)`, run until a set repeats.
fn common_belief_event(m: &EpistemicStructure, exec: Execution, per_viewer: &[StateSet]) -> StateSet {
    let n = m.game().num_players();
    let mut current = everybody_believes_event(m, exec, per_viewer);
    let mut seen: Vec<StateSet> = Vec::new();
    while !seen.contains(&current) {
        seen.push(current.clone());
        current = everybody_believes_event(m, exec, &vec![current; n]);
    }
    seen.iter().fold(StateSet::full(m.num_states()), |acc, f| acc.intersection(f))
}

/// `μ(E | h_i(ω))`.
pub fn posterior(m: &EpistemicStructure, player: PlayerId, event: &StateSet, state: usize) -> Rational {
    let cell = m.cell(player, state);
    m.measure(&event.intersection(cell)) / m.measure(cell)
}

/// `(M, ω, i) ⊨ f`.
pub fn holds(m: &EpistemicStructure, state: usize, viewer: PlayerId, f: &Formula) -> bool {
    Checker::new(m).holds(state, viewer, f)
}

pub fn intension(m: &EpistemicStructure, viewer: PlayerId, f: &Formula) -> StateSet {
    Checker::new(m).intension(viewer, f)
}

pub fn cb_intension(m: &EpistemicStructure, f: &Formula) -> StateSet {
    Checker::new(m).cb_intension(f)
}

pub fn valid(m: &EpistemicStructure, f: &Formula) -> bool {
    Checker::new(m).valid(f)
}

/// Players whose cells contain a state of positive prior outside `event`.
pub fn doubters(m: &EpistemicStructure, event: &StateSet, state: usize) -> Vec<PlayerId> {
    m.game()
        .players()
        .filter(|&p| {
            let cell = m.cell(p, state);
            m.scaled_measure(&cell.intersection(&event.complement())).is_positive()
        })
        .collect()
}
