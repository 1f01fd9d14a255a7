use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use dispersa::acoustic::{
    assemble_implicit_system, lagrangian_explicit_step, lagrangian_implicit_step, relaxation_speed,
    solve_banded, AcousticContext, SourceTreatment, DEFAULT_SAFETY,
};
use dispersa::mesh::{build_grid, gaussian_initial_condition, BoundaryPolicy, FieldSet};
use dispersa::model::{GasClosure, ModelCoefficients};

fn bump(n: usize, st: f64) -> (FieldSet, AcousticContext, f64) {
    let grid = build_grid(-1.0, 1.0, n).unwrap();
    let fields = gaussian_initial_condition(&grid, 0.01, BoundaryPolicy::Transmissive).unwrap();
    let gas = GasClosure::new(0.0, 0.1).unwrap();
    let coeffs = ModelCoefficients::new(st, &gas).unwrap();
    let ctx = AcousticContext {
        gas,
        coeffs,
        dx: grid.dx,
        boundary: BoundaryPolicy::Transmissive,
        sources: SourceTreatment::Upwinded,
    };
    let a = relaxation_speed(&fields.primitives().unwrap(), &coeffs, DEFAULT_SAFETY).unwrap().a;
    (fields, ctx, a)
}

fn lagrangian_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("lagrangian");
    for n in [100, 2000] {
        let (fields, ctx, a) = bump(n, 1e-4);
        let dt = 0.4 * ctx.dx / a;
        group.bench_with_input(BenchmarkId::new("explicit", n), &n, |b, _| {
            b.iter(|| lagrangian_explicit_step(black_box(&fields), &ctx, a, dt).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("implicit_m50", n), &n, |b, _| {
            b.iter(|| lagrangian_implicit_step(black_box(&fields), &ctx, a, 50.0 * dt).unwrap())
        });
    }
    group.finish();
}

fn banded_solve(c: &mut Criterion) {
    let (fields, ctx, a) = bump(2000, 1e-4);
    let system = assemble_implicit_system(&fields, &ctx, a, 1e-3).unwrap();
    c.bench_function("banded_solve_4000", |b| b.iter(|| solve_banded(black_box(&system)).unwrap()));
}

criterion_group!(benches, lagrangian_steps, banded_solve);
criterion_main!(benches);
