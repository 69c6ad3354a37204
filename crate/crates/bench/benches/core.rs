use criterion::{black_box, criterion_group, criterion_main, Criterion};

use rotnorm_core::circle::defect_experiment;
use rotnorm_core::coset::theta_sup;
use rotnorm_core::group::{commutator_length, named};
use rotnorm_core::rational::{parse_q_list, q};
use rotnorm_core::{AffineCoset, IntLattice};

fn groups(c: &mut Criterion) {
    let a5 = named::alternating(5);
    c.bench_function("cl A5", |b| b.iter(|| commutator_length(black_box(&a5))));
    let s5 = named::symmetric(5);
    c.bench_function("conjugacy classes S5", |b| b.iter(|| black_box(&s5).conjugacy_classes()));
}

fn cosets(c: &mut Criterion) {
    let a = IntLattice::normalize(4, &[vec![0, 1, -1, -4], vec![3, 1, -6, -2], vec![5, -2, -3, 1], vec![4, -5, -6, -5]])
        .unwrap();
    let z = AffineCoset::new(a.clone(), parse_q_list("-8/5,-12/7,-2,3/2").unwrap()).unwrap();
    c.bench_function("theta rank 4", |b| b.iter(|| black_box(&z).theta()));
    let b2 = IntLattice::normalize(2, &[vec![2, 1], vec![0, 3]]).unwrap();
    c.bench_function("theta_sup rank 2", |b| b.iter(|| theta_sup(black_box(&b2), &q(1, 16))));
}

fn defect(c: &mut Criterion) {
    c.bench_function("defect 100 trials", |b| b.iter(|| defect_experiment(black_box(7), 100)));
}

criterion_group!(benches, groups, cosets, defect);
criterion_main!(benches);
