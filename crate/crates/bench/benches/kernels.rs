use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;

use singmod::casecheck::{builtin_case_tables, check_cases};
use singmod::jfun::{j_coefficients, singular_modulus};
use singmod::quadforms::{class_group_summary, reduced_forms, Discriminant, ReducedForm};
use singmod::relations::relation_lattice_bruteforce;
use singmod::searches::{sieve_class_numbers_with, SieveOptions};

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve");
    g.sample_size(10);
    for bound in [100_000u64, 1_000_000] {
        for threads in [1usize, 4] {
            let opts = SieveOptions { threads, chunks: 4 * threads, ..SieveOptions::default() };
            g.bench_with_input(BenchmarkId::new(format!("threads{threads}"), bound), &bound, |b, &n| {
                b.iter(|| sieve_class_numbers_with(n, &opts).unwrap())
            });
        }
    }
    g.finish();
}

fn forms(c: &mut Criterion) {
    let d = Discriminant::new(-991_027).unwrap();
    c.bench_function("reduced_forms 991027", |b| b.iter(|| reduced_forms(black_box(&d)).unwrap()));
    let d = Discriminant::new(-87_360).unwrap();
    c.bench_function("class_group_summary 87360", |b| b.iter(|| class_group_summary(black_box(&d)).unwrap()));
}

fn jfun(c: &mut Criterion) {
    c.bench_function("j_coefficients 1000", |b| b.iter(|| j_coefficients(black_box(1000)).unwrap()));
    let f = ReducedForm::try_from([1, 1, 5]).unwrap();
    let d = Discriminant::new(-19).unwrap();
    let mut g = c.benchmark_group("singular_modulus");
    for prec in [128u32, 256, 1024] {
        g.bench_with_input(BenchmarkId::from_parameter(prec), &prec, |b, &p| {
            b.iter(|| singular_modulus(&f, &d, p).unwrap())
        });
    }
    g.finish();
}

fn cases(c: &mut Criterion) {
    let rows = builtin_case_tables();
    c.bench_function("check_cases all", |b| b.iter(|| check_cases(black_box(&rows), 1)));
}

fn lattice(c: &mut Criterion) {
    let v: Vec<BigInt> = [1728, -32768, -884736].into_iter().map(BigInt::from).collect();
    let mut g = c.benchmark_group("lattice_bruteforce");
    g.sample_size(10);
    g.bench_function("cap 12", |b| b.iter(|| relation_lattice_bruteforce(black_box(&v), 12).unwrap()));
    g.finish();
}

criterion_group!(benches, sieve, forms, jfun, cases, lattice);
criterion_main!(benches);
