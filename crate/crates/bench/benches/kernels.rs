use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ghostdyn_core::render::{render_dynamical_plane, RenderSpec, Window};
use ghostdyn_core::transient::{holomorphic_index_numeric, measure_passage, ContourSpec, PassageWindow, DEFAULT_DELTA};
use ghostdyn_core::{fixed_points_g, orbit_fate, Complex, EpsilonOffset, FEpsMap, Family, Thresholds};

const MU: f64 = 4.0;
const GAMMA: f64 = 0.2;

fn f_eps(e: f64) -> FEpsMap {
    FEpsMap::new(MU, GAMMA, EpsilonOffset::new(e).unwrap()).unwrap()
}

fn map_eval(c: &mut Criterion) {
    let f = f_eps(1e-6);
    let z = Complex::new(0.23, 0.01);
    c.bench_function("eval", |b| b.iter(|| f.eval(black_box(z))));
    c.bench_function("derivative", |b| b.iter(|| f.derivative(black_box(z)).unwrap()));
}

fn orbits(c: &mut Criterion) {
    let f = f_eps(1e-6);
    c.bench_function("orbit_fate 1e5", |b| {
        b.iter(|| orbit_fate(&f, black_box(Complex::new(0.5, 0.02)), Thresholds::default(), 100_000))
    });
}

fn passage(c: &mut Criterion) {
    let mut group = c.benchmark_group("passage");
    for e in [1e-4, 1e-6] {
        let f = f_eps(e);
        let w = PassageWindow::around_fold(&f.critical(), DEFAULT_DELTA).unwrap();
        group.bench_function(format!("eps {e:e}"), |b| {
            b.iter(|| measure_passage(&f, e, w, w.upper(), 100_000_000, None).unwrap())
        });
    }
    group.finish();
}

fn index(c: &mut Criterion) {
    let e = 1e-6;
    let f = f_eps(e);
    let pts = fixed_points_g(MU, GAMMA, EpsilonOffset::new(e).unwrap()).unwrap();
    let x_c = f.x_c();
    let fixed = pts.minus.location + x_c;
    let contour = ContourSpec::isolating(fixed, &[pts.plus.location + x_c, Complex::new(0.0, 0.0)]).unwrap();
    c.bench_function("holomorphic index", |b| b.iter(|| holomorphic_index_numeric(&f, contour).unwrap()));
}

fn render(c: &mut Criterion) {
    let f = f_eps(1e-6);
    let spec = RenderSpec::new(Window::new(-0.6, 1.0, -0.4, 0.4).unwrap(), 80, 40, 10_000).unwrap();
    let mut group = c.benchmark_group("render 80x40");
    group.sample_size(10);
    group.bench_function("1 thread", |b| b.iter(|| render_dynamical_plane(&f, &spec, Some(1)).unwrap()));
    group.bench_function("pool", |b| b.iter(|| render_dynamical_plane(&f, &spec, None).unwrap()));
    group.finish();
}

criterion_group!(benches, map_eval, orbits, passage, index, render);
criterion_main!(benches);
