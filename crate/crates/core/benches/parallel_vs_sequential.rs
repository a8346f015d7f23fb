use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use epicoord::fixtures;
use epicoord::formula::{parse, Atom};
use epicoord::par::Execution;
use epicoord::rational::ratio;
use epicoord::semantics::Checker;
use epicoord::structure::{Interpretation, StructureParts};
use epicoord::sweep::{objective_sweep, subjective_sweep};
use epicoord::{EpistemicStructure, PlayerId, StateSet};

/// `n` equiprobable states on a ring. Player 1's cells are `{2k, 2k+1}`,
/// player 2's are `{2k+1, 2k+2}`, and `p` fails at every seventh state as
/// each player reads it, with the players' readings offset by one.
fn ring(n: usize) -> EpistemicStructure {
    let game = fixtures::coordination_game();
    let pairs = |offset: usize| -> Vec<StateSet> {
        (0..n / 2).map(|k| StateSet::from_indices(n, [(2 * k + offset) % n, (2 * k + 1 + offset) % n])).collect()
    };
    let reading = |shift: usize| -> Interpretation {
        let mut pi = Interpretation::new();
        pi.insert(Atom::Prim("p".into()), StateSet::from_predicate(n, |s| !(s + shift).is_multiple_of(7)));
        pi
    };
    let parts = StructureParts {
        states: (0..n).map(|s| format!("s{s}")).collect(),
        prior: vec![ratio(1, n as i64); n],
        signals: vec![],
        atoms: vec!["p".into()],
        interpretation: vec![reading(0), reading(1)],
        partitions: Some(vec![pairs(0), pairs(1)]),
    };
    EpistemicStructure::new(game, parts).expect("ring structure is valid")
}

fn model_checking(c: &mut Criterion) {
    let mut group = c.benchmark_group("model_checking");
    group.sample_size(10);
    for n in [512usize, 2048] {
        let m = ring(n);
        let vocab = m.vocabulary();
        let f = parse("!CB(p) -> EB^3(pr_1(p) >= 1/2 & pr_2(!p) >= 1/4)", &vocab.get()).expect("formula parses");
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, n), &f, |b, f| {
                b.iter(|| Checker::with_execution(&m, exec).intension(PlayerId(0), black_box(f)))
            });
        }
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(BenchmarkId::new("objective", label), |b| {
            b.iter(|| objective_sweep(black_box(7), 16, exec))
        });
        group.bench_function(BenchmarkId::new("subjective", label), |b| {
            b.iter(|| subjective_sweep(black_box(7), 8, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, model_checking, sweeps);
criterion_main!(benches);
