use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use torelli_core::deriv::{beta_matrix, dk_basis, morita_rank};
use torelli_core::filtration::{catalog, discover};
use torelli_core::tree::{check_relators, image_lattice};

/// Runs `f` once per execution mode: a one-thread pool stands in for the
/// sequential path, the global pool for the parallel one.
#[cfg(feature = "parallel")]
fn modes() -> Vec<(&'static str, rayon::ThreadPool)> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    vec![
        ("sequential", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("parallel", rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()),
    ]
}

#[cfg(feature = "parallel")]
fn run_modes(c: &mut Criterion, group: &str, param: &str, f: impl Fn() + Sync) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    for (name, pool) in modes() {
        g.bench_function(BenchmarkId::new(name, param), |b| b.iter(|| pool.install(&f)));
    }
    g.finish();
}

#[cfg(not(feature = "parallel"))]
fn run_modes(c: &mut Criterion, group: &str, param: &str, f: impl Fn() + Sync) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    g.bench_function(BenchmarkId::new("sequential", param), |b| b.iter(&f));
    g.finish();
}

fn eta_image(c: &mut Criterion) {
    dk_basis(3, 3);
    run_modes(c, "eta_image", "g3_k3", || {
        black_box(image_lattice(3, 3).unwrap());
    });
}

fn beta_assembly(c: &mut Criterion) {
    run_modes(c, "beta_matrix", "g3_k3", || {
        black_box(beta_matrix(3, 3));
    });
}

fn relators(c: &mut Criterion) {
    run_modes(c, "check_relators", "g2_k4", || {
        black_box(check_relators(2, 4));
    });
}

fn trace_rank(c: &mut Criterion) {
    dk_basis(3, 3);
    run_modes(c, "morita_rank", "g3_k3", || {
        black_box(morita_rank(3, 3));
    });
}

fn discover_search(c: &mut Criterion) {
    let entries: Vec<_> = catalog(2).into_iter().filter(|e| e.rel_boundary && e.name != "identity").collect();
    run_modes(c, "discover", "g2_len3_k2", || {
        black_box(discover(&entries, 3, 2).unwrap());
    });
}

criterion_group!(kernels, eta_image, beta_assembly, relators, trace_rank, discover_search);
criterion_main!(kernels);
