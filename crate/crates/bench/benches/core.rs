//! Benchmarks for the hot paths: exterior products, the O(n) torsion
//! decomposition, the Killing form, and full brick classification.

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use torsionlab::exterior::{KForm, Space};
use torsionlab::lie::MetricLieAlgebra;
use torsionlab::tau::TauStructure;
use torsionlab::torsion::TorsionTensor;

fn random_form(space: Space, degree: usize, rng: &mut ChaCha8Rng) -> KForm {
    let n = space.dim();
    let mut f = KForm::zero(space, degree);
    let mut fill = |idx: Vec<usize>, f: &mut KForm| {
        f.add_term(idx, rng.gen_range(-1.0..1.0)).unwrap();
    };
    match degree {
        2 => {
            for i in 0..n {
                for j in (i + 1)..n {
                    fill(vec![i, j], &mut f);
                }
            }
        }
        3 => {
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in (j + 1)..n {
                        fill(vec![i, j, k], &mut f);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    f
}

fn bench_wedge(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let space = Space::new(8).unwrap();
    let a = random_form(space, 2, &mut rng);
    let b = random_form(space, 3, &mut rng);
    c.bench_function("wedge_2x3_dim8", |bench| {
        bench.iter(|| black_box(&a).wedge(black_box(&b)).unwrap())
    });
}

fn bench_decompose(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let space = Space::new(8).unwrap();
    let slices = (0..8).map(|_| random_form(space, 2, &mut rng)).collect();
    let t = TorsionTensor::new(space, slices).unwrap();
    c.bench_function("decompose_dim8", |bench| {
        bench.iter(|| black_box(&t).decompose().unwrap())
    });
}

fn bench_killing(c: &mut Criterion) {
    let so5 = MetricLieAlgebra::so(5).unwrap();
    c.bench_function("killing_form_so5", |bench| {
        bench.iter(|| black_box(&so5).killing_form())
    });
}

fn bench_classify(c: &mut Criterion) {
    let omega = MetricLieAlgebra::su3().canonical_three_form().unwrap();
    let s = TauStructure::new(omega).unwrap();
    c.bench_function("classify_bricks_su3", |bench| {
        bench.iter(|| black_box(&s).classify_bricks(42, 1e-8).unwrap())
    });
}

criterion_group!(benches, bench_wedge, bench_decompose, bench_killing, bench_classify);
criterion_main!(benches);
