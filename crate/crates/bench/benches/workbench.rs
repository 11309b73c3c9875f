use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use menger_core::algebra::{is_stable, zeta};
use menger_core::function::DEFAULT_CLOSURE_CAP;
use menger_core::harness::{random_system, GenParams};
use menger_core::transforms::DEFAULT_TRANSFORM_CAP;
use menger_core::{abstractify, check_axioms, check_theorem2, close_system, tn_closure, ElementSet, MengerAlgebra};

/// The largest of the first few random (2, 2) systems, with and without meet.
fn sample(with_meet: bool) -> (GenParams, menger_core::harness::GeneratedSystem) {
    let params = GenParams::random(2, 2, 2, with_meet, 0, 1);
    let best = (0..16)
        .map(|s| random_system(&params, s).unwrap())
        .filter(|g| g.system.len() <= 40)
        .max_by_key(|g| g.system.len())
        .unwrap();
    (params, best)
}

fn closure(c: &mut Criterion) {
    for meet in [false, true] {
        let (params, g) = sample(meet);
        let carrier = g.system.carrier();
        c.bench_function(&format!("close_system meet={meet} size={}", g.system.len()), |b| {
            b.iter(|| close_system(carrier, params.arity, black_box(&g.generators), meet, DEFAULT_CLOSURE_CAP).unwrap())
        });
    }
}

fn algebra(meet: bool) -> MengerAlgebra {
    abstractify(&sample(meet).1.system).unwrap()
}

fn axioms(c: &mut Criterion) {
    for meet in [false, true] {
        let alg = algebra(meet);
        c.bench_function(&format!("check_axioms meet={meet} size={}", alg.size()), |b| {
            b.iter(|| check_axioms(black_box(&alg)))
        });
    }
    let alg = algebra(true);
    let le = zeta(&alg);
    c.bench_function(&format!("zeta stability size={}", alg.size()), |b| b.iter(|| is_stable(&alg, black_box(&le))));
}

fn transforms(c: &mut Criterion) {
    let alg = algebra(true);
    c.bench_function(&format!("tn_closure size={}", alg.size()), |b| {
        b.iter(|| tn_closure(black_box(&alg), DEFAULT_TRANSFORM_CAP).unwrap())
    });
}

fn sweep(c: &mut Criterion) {
    let params = GenParams::random(2, 2, 2, false, 0, 1);
    let g = (0..64).map(|s| random_system(&params, s).unwrap()).find(|g| (6..=10).contains(&g.system.len())).unwrap();
    let alg = abstractify(&g.system).unwrap();
    let tn = tn_closure(&alg, DEFAULT_TRANSFORM_CAP).unwrap();
    let size = alg.size();
    c.bench_function(&format!("theorem2 sweep size={size}"), |b| {
        b.iter_batched(
            || (1u64..1 << size).map(|m| ElementSet::from_mask(size, m)).collect::<Vec<_>>(),
            |sets| sets.iter().filter(|h| check_theorem2(&alg, &tn, h).unwrap().pass).count(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, closure, axioms, transforms, sweep);
criterion_main!(benches);
