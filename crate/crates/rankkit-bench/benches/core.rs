//! End-to-end timings for the load-bearing paths: closed-form ranking
//! against the brute-force oracle it replaces, compression maps and their
//! witness scans, and the two simulators.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use rankkit::{
    brute_rank, build_set, diag_phi_catalog, diag_run, priority_phi_catalog, priority_run,
    retarget_rec, thm30_sets, BStr, DiagMode, Partial,
};

fn parse(s: &str) -> BStr {
    s.parse().unwrap()
}

fn bench_rank(c: &mut Criterion) {
    let mut g = c.benchmark_group("rank");

    let sigma_star = build_set("sigma_star").unwrap();
    let long = parse(&"01".repeat(32));
    let ranker = sigma_star.ranker.clone().unwrap();
    g.bench_function("closed_form/sigma_star_len64", |b| {
        b.iter(|| ranker.eval(&long).unwrap())
    });

    let beacons = build_set("beacons").unwrap();
    let beacon = parse(&format!("{}00{}", "1".repeat(15), "0".repeat(15)));
    let ranker = beacons.ranker.clone().unwrap();
    g.bench_function("closed_form/beacons_len32", |b| {
        b.iter(|| ranker.eval(&beacon).unwrap())
    });

    let thm30 = thm30_sets();
    let member = parse("1010000000");
    let ranker = thm30.a.ranker.clone().unwrap();
    g.bench_function("closed_form/thm30_A_len10", |b| {
        b.iter(|| ranker.eval(&member).unwrap())
    });

    let evens = build_set("evens").unwrap();
    let mid = parse("0110011001");
    let member = evens.member.clone();
    g.bench_function("brute/evens_len10", |b| {
        b.iter(|| brute_rank(&*member, &mid))
    });

    g.finish();
}

fn bench_compress(c: &mut Criterion) {
    let mut g = c.benchmark_group("compress");

    let evens = build_set("evens").unwrap();
    let comp = evens.compressor.clone().unwrap();
    let member = parse(&"10".repeat(6));
    g.bench_function("evens/map_len12", |b| {
        b.iter(|| (comp.map)(&member).unwrap())
    });

    let witness = comp.witness.clone().unwrap();
    let target = parse("110011");
    g.bench_function("evens/witness_len6", |b| b.iter(|| witness(&target).unwrap()));

    let sigma_star1 = build_set("sigma_star1").unwrap();
    let probe = parse("01010101");
    g.bench_function("evens/retarget_rec_scan10", |b| {
        b.iter(|| {
            let g = retarget_rec(&comp, &sigma_star1, 10);
            match (g.map)(&probe).unwrap() {
                Partial::Defined(y) => y,
                Partial::Undefined => unreachable!("total on members"),
            }
        })
    });

    g.finish();
}

fn bench_simulate(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate");
    g.sample_size(20).measurement_time(Duration::from_secs(3));

    let phis = diag_phi_catalog();
    g.bench_function("diag/union_budget256", |b| {
        b.iter(|| diag_run(DiagMode::Union, &phis, 256, 9).unwrap())
    });

    let phis = priority_phi_catalog();
    g.bench_function("priority/stages60", |b| {
        b.iter(|| priority_run(&phis, 60).unwrap())
    });

    g.finish();
}

criterion_group!(benches, bench_rank, bench_compress, bench_simulate);
criterion_main!(benches);
