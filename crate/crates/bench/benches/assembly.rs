use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use symlap_core::discretization::{assemble_dec, Assembly};
use symlap_core::models::MeshRecipe;

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assembly");
    group.sample_size(10);
    for recipe in ["icosphere:3", "icosphere:4", "torus-grid:64", "hyperbolic-genus2:3"] {
        let mesh = recipe.parse::<MeshRecipe>().unwrap().build().unwrap();
        group.bench_with_input(BenchmarkId::new("dec", recipe), &mesh, |b, m| {
            b.iter(|| assemble_dec(m).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("all", recipe), &mesh, |b, m| {
            b.iter(|| Assembly::new(m.clone()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, assembly);
criterion_main!(benches);
