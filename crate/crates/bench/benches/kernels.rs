use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use syswork_core::cohomology::CohomologyRing;
use syswork_core::dga::{build_chevalley_eilenberg, LieStructure};
use syswork_core::geometry::{comass, isoperimetric_quotient, GeometryOptions, InvariantMetric};
use syswork_core::lattice::{successive_minima, NormOracle, NormedLattice};
use syswork_core::linalg::{smith_normal_form, IntMatrix};
use syswork_core::massey::all_triples;
use syswork_core::pipeline::verify_chain_thm22;
use syswork_core::rational::rat;
use syswork_core::RatMatrix;

fn smith(c: &mut Criterion) {
    let m = IntMatrix::from_i64(&[&[2, 4, 4, 1], &[-6, 6, 12, 3], &[10, -4, -16, 5], &[3, 1, 0, 7]]);
    c.bench_function("smith_normal_form 4x4", |b| b.iter(|| smith_normal_form(black_box(&m))));
}

fn cohomology(c: &mut Criterion) {
    let model = build_chevalley_eilenberg(&LieStructure::abelian(6), "t6").unwrap();
    c.bench_function("cohomology T^6", |b| b.iter(|| CohomologyRing::compute(black_box(&model)).unwrap()));
    let h = CohomologyRing::compute(&build_chevalley_eilenberg(&LieStructure::heisenberg(), "h").unwrap()).unwrap();
    c.bench_function("massey triples heisenberg", |b| b.iter(|| all_triples(black_box(&h), 1).unwrap()));
}

fn minima(c: &mut Criterion) {
    let rows = vec![
        vec![rat(3), rat(1), rat(0), rat(2)],
        vec![rat(1), rat(4), rat(1), rat(0)],
        vec![rat(0), rat(2), rat(5), rat(1)],
        vec![rat(1), rat(0), rat(1), rat(6)],
    ];
    let l = NormedLattice::new(RatMatrix::from_rows(rows).unwrap(), NormOracle::euclidean(4)).unwrap();
    c.bench_function("successive minima rank 4 euclidean", |b| b.iter(|| successive_minima(black_box(&l)).unwrap()));
    let p = NormedLattice::new(l.basis().clone(), NormOracle::l1(4)).unwrap();
    c.bench_function("successive minima rank 4 l1", |b| b.iter(|| successive_minima(black_box(&p)).unwrap()));
}

fn geometry(c: &mut Criterion) {
    let opts = GeometryOptions::default();
    let g = InvariantMetric::identity(6);
    let f: Vec<_> = (0..20).map(|i| rat(i % 3 - 1)).collect();
    c.bench_function("comass 3-form in R^6 (ascent)", |b| b.iter(|| comass(&g, 3, black_box(&f), &opts)));
    let h = CohomologyRing::compute(&build_chevalley_eilenberg(&LieStructure::heisenberg(), "h").unwrap()).unwrap();
    let gh = InvariantMetric::diagonal(&[rat(1), rat(1), rat(4)]).unwrap();
    c.bench_function("IQ_2 heisenberg", |b| b.iter(|| isoperimetric_quotient(&h, black_box(&gh), 2, &opts).unwrap()));
    c.bench_function("thm22 chain heisenberg", |b| b.iter(|| verify_chain_thm22(&h, black_box(&gh), 1, &opts).unwrap()));
}

criterion_group!(benches, smith, cohomology, minima, geometry);
criterion_main!(benches);
