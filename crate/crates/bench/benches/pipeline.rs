use std::hint::black_box;

use c1kahler::kesolve::kaehler_profile;
use c1kahler::{
    enumerate_bundles, flag_data, flat_divisibility, ode_data, quadrature_profile, rk_verify,
    solve_algebraic, BundleSpec, Family, PaintedDiagram, ProfileRequest, Q,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn flags(c: &mut Criterion) {
    let mut g = c.benchmark_group("flag_data");
    for (family, rank) in [(Family::A, 4), (Family::B, 4), (Family::D, 5)] {
        let d = PaintedDiagram::new(family, rank, [0, 2]).unwrap();
        g.bench_function(BenchmarkId::from_parameter(format!("{family}{rank}")), |b| {
            b.iter(|| flag_data(black_box(&d)).unwrap())
        });
    }
    g.finish();
}

fn algebra(c: &mut Criterion) {
    let d = PaintedDiagram::new(Family::D, 4, [0]).unwrap();
    c.bench_function("enumerate_bundles/D4", |b| b.iter(|| enumerate_bundles(black_box(&d), 2)));
    let spec = BundleSpec::new(d, vec![2, 1, 3], Some(c1kahler::End::Left), vec![2]).unwrap();
    c.bench_function("solve_algebraic/D4", |b| {
        b.iter(|| solve_algebraic(black_box(&spec), Q::from_integer(-2)).unwrap().unwrap())
    });
    c.bench_function("flat_divisibility/D4", |b| b.iter(|| flat_divisibility(black_box(&spec)).unwrap()));
}

fn profiles(c: &mut Criterion) {
    let mut g = c.benchmark_group("profile");
    g.sample_size(20);
    for (n, lambda) in [(3, -2), (4, 5)] {
        let spec = BundleSpec::su_seed(n).unwrap();
        let p = solve_algebraic(&spec, Q::from_integer(lambda)).unwrap().unwrap();
        let data = ode_data(&p).unwrap();
        let req = ProfileRequest::default();
        g.bench_function(BenchmarkId::new("quadrature", format!("SU({n}),lambda={lambda}")), |b| {
            b.iter(|| quadrature_profile(black_box(&data), &req).unwrap())
        });
        let prof = quadrature_profile(&data, &req).unwrap();
        g.bench_function(BenchmarkId::new("rk_verify", format!("SU({n}),lambda={lambda}")), |b| {
            b.iter(|| rk_verify(black_box(&data), &prof).unwrap())
        });
    }
    g.bench_function("kaehler_closed_form", |b| b.iter(|| kaehler_profile(2.0, 0.5, 10.0, 1001).unwrap()));
    g.finish();
}

criterion_group!(benches, flags, algebra, profiles);
criterion_main!(benches);
