use criterion::{black_box, criterion_group, criterion_main, Criterion};

use kscatter::algebra::{Levels, Mode};
use kscatter::euler::{kronecker_euler, Framing};
use kscatter::quiver::{build_covering_fragment, RootKind};
use kscatter::sorting::{initial_diagram, SortOptions, SortingDiagram};
use kscatter::tropical::{stable_diagram, CurveCatalog};
use kscatter::verify::{q1, q2, q3};
use kscatter::Slope;

fn sorting(c: &mut Criterion) {
    let mut g = c.benchmark_group("sort");
    for (name, q) in [("q1", q1()), ("q2", q2())] {
        g.bench_function(format!("{name}_naive"), |b| {
            b.iter(|| {
                let mut d = initial_diagram(&q, 1, Mode::Naive).unwrap();
                d.stabilize().unwrap();
                black_box(d.seq().len())
            })
        });
    }
    let q = q3();
    for k in [1, 2] {
        g.bench_function(format!("q3_nilpotent_k{k}"), |b| {
            b.iter(|| {
                let levels = Levels::uniform(q.n(), k).unwrap();
                let opts = SortOptions {
                    max_steps: Some(100_000_000),
                    ..Default::default()
                };
                let mut d = SortingDiagram::new(&q, Some(levels), opts).unwrap();
                d.stabilize().unwrap();
                black_box(d.step_count())
            })
        });
    }
    g.sample_size(10);
    g.finish();
}

fn curves(c: &mut Criterion) {
    let q = build_covering_fragment(2, 4, RootKind::Source).unwrap();
    let d = stable_diagram(&q, 1, None).unwrap();
    let mu = Slope::new(2, 5).unwrap();
    c.bench_function("catalog_zigzag_2/5", |b| {
        b.iter(|| black_box(CurveCatalog::new(&d, mu).unwrap().curves.len()))
    });
}

fn euler(c: &mut Criterion) {
    let mut g = c.benchmark_group("chi");
    g.sample_size(10);
    for dbar in [(1, 2), (2, 2), (2, 3)] {
        g.bench_function(format!("k2_{}_{}", dbar.0, dbar.1), |b| {
            b.iter(|| black_box(kronecker_euler(2, dbar, Framing::B).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, sorting, curves, euler);
criterion_main!(benches);
