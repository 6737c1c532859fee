mod common;

use common::{binomial, replay_clamping, replay_incumbent, replay_isolation};
use dimsched::direct::{Bounds, DirectConfig};
use dimsched::harness::trace::{write_trace, TraceOptions};
use dimsched::objectives::benchmarks::{additive_sphere_rosenbrock, sphere};
use dimsched::optimize::{
    run_bo, run_dsa, run_dsa_parallel, run_dsa_with_registry, Algorithm, IterationRecord,
    RunConfig, RunResult, RunStatus,
};

fn small_config(max_iter: usize, seed: u64) -> RunConfig {
    RunConfig {
        n_init: 10,
        max_iter,
        seed,
        train_max_iters: 60,
        direct: DirectConfig {
            max_evals: 400,
            ..DirectConfig::default()
        },
        ..RunConfig::default()
    }
}

fn all(r: &RunResult) -> Vec<IterationRecord> {
    r.all_records().cloned().collect()
}

fn trace_bytes(r: &RunResult, dim: usize) -> Vec<u8> {
    let mut buf = Vec::new();
    write_trace(&mut buf, dim, &all(r), TraceOptions { timings: false }).unwrap();
    buf
}

#[test]
fn dsa_trace_replay_invariants() {
    let d = 6;
    let b = Bounds::uniform(d, -2.048, 2.048).unwrap();
    let cfg = small_config(50, 3);
    let mut calls = 0usize;
    let (r, reg) = run_dsa_with_registry(
        |x: &[f64]| {
            calls += 1;
            additive_sphere_rosenbrock(x)
        },
        &b,
        &cfg,
    )
    .unwrap();
    let rec = all(&r);
    assert!(r.is_completed());
    assert_eq!(calls, cfg.n_init + cfg.max_iter);
    assert_eq!(r.evaluations(), calls);
    assert_eq!(r.records.len(), cfg.max_iter);
    replay_incumbent(&rec).unwrap();
    replay_clamping(&rec, cfg.n_init).unwrap();
    let distinct = replay_isolation(&rec, cfg.n_init).unwrap();
    assert_eq!(distinct, reg.len());
    assert_eq!(r.gp_count, reg.len());
    assert!(reg.len() <= binomial(d, cfg.subset_size));
    assert_eq!(reg.total_augments(), cfg.max_iter);
    for (_, e) in reg.entries() {
        let m = e.model.as_ref().unwrap();
        assert_eq!(m.dim(), e.subset.len());
        assert_eq!(m.len(), cfg.n_init + e.augment_count);
    }
    assert!(rec.iter().all(|x| b.contains(&x.x)));
    let brute = rec.iter().map(|x| x.y).fold(f64::INFINITY, f64::min);
    assert_eq!(r.incumbent.y, brute);
    for w in rec.windows(2) {
        assert!(w[1].y_best <= w[0].y_best);
        assert_eq!(w[1].iter, w[0].iter + 1);
    }
}

#[test]
fn sequential_runs_are_deterministic() {
    let b = Bounds::uniform(4, -5.12, 5.12).unwrap();
    let cfg = small_config(25, 11);
    let a = run_dsa(sphere, &b, &cfg).unwrap();
    let c = run_dsa(sphere, &b, &cfg).unwrap();
    assert_eq!(trace_bytes(&a, 4), trace_bytes(&c, 4));
    let a = run_bo(sphere, &b, &small_config(8, 11)).unwrap();
    let c = run_bo(sphere, &b, &small_config(8, 11)).unwrap();
    assert_eq!(trace_bytes(&a, 4), trace_bytes(&c, 4));
}

#[test]
fn bo_and_dsa_share_the_initial_design() {
    let b = Bounds::uniform(5, -5.0, 5.0).unwrap();
    let cfg = small_config(5, 42);
    let bo = run_bo(sphere, &b, &cfg).unwrap();
    let dsa = run_dsa(sphere, &b, &cfg).unwrap();
    let key = |r: &RunResult| -> Vec<(Vec<f64>, f64)> {
        r.design.iter().map(|d| (d.x.clone(), d.y)).collect()
    };
    assert_eq!(key(&bo), key(&dsa));
    assert_eq!(bo.design.len(), cfg.n_init);
}

#[test]
fn bo_contract_and_constant_objective() {
    let b = Bounds::uniform(3, 0.0, 1.0).unwrap();
    let cfg = small_config(12, 0);
    let mut calls = 0;
    let r = run_bo(
        |_: &[f64]| {
            calls += 1;
            4.5
        },
        &b,
        &cfg,
    )
    .unwrap();
    assert_eq!(calls, cfg.n_init + cfg.max_iter);
    assert_eq!(r.incumbent.y, 4.5);
    assert_eq!(r.records.len(), cfg.max_iter);
    assert_eq!(r.algorithm, Algorithm::Bo);
    replay_incumbent(&all(&r)).unwrap();
    assert!(r.records.iter().all(|x| x.subset.is_none()));
    assert_eq!(r.records.last().unwrap().gp_size, cfg.n_init + cfg.max_iter);
}

#[test]
fn bo_finds_two_dimensional_sphere_minimum() {
    // Dense 401² grid oracle over the box: minimum 0 at the origin.
    let grid_min = (0..=400)
        .flat_map(|i| (0..=400).map(move |j| (i, j)))
        .map(|(i, j)| sphere(&[-2.0 + i as f64 * 0.01, -2.0 + j as f64 * 0.01]))
        .fold(f64::INFINITY, f64::min);
    assert!(grid_min < 1e-20);
    let b = Bounds::uniform(2, -2.0, 2.0).unwrap();
    let cfg = RunConfig {
        n_init: 10,
        max_iter: 60,
        seed: 1,
        ..RunConfig::default()
    };
    let r = run_bo(sphere, &b, &cfg).unwrap();
    assert!(r.incumbent.y - grid_min < 1e-2, "{}", r.incumbent.y);
}

#[test]
fn full_subset_uses_one_gp() {
    let d = 3;
    let b = Bounds::uniform(d, -1.0, 1.0).unwrap();
    let cfg = RunConfig {
        subset_size: d,
        ..small_config(15, 5)
    };
    let (r, reg) = run_dsa_with_registry(sphere, &b, &cfg).unwrap();
    assert_eq!(reg.len(), 1);
    assert!(r
        .records
        .iter()
        .all(|x| x.subset.as_ref().unwrap().len() == d));
    assert_eq!(r.records.last().unwrap().gp_size, cfg.n_init + cfg.max_iter);
}

#[test]
fn non_finite_objective_aborts_with_partial_result() {
    let b = Bounds::uniform(3, -1.0, 1.0).unwrap();
    let cfg = small_config(30, 2);
    let mut calls = 0;
    let f = |x: &[f64]| {
        calls += 1;
        if calls > cfg.n_init + 4 {
            f64::NAN
        } else {
            sphere(x)
        }
    };
    let r = run_dsa(f, &b, &cfg).unwrap();
    assert!(matches!(r.status, RunStatus::Aborted { .. }));
    assert_eq!(r.records.len(), 4);
    replay_incumbent(&all(&r)).unwrap();

    let mut calls = 0;
    let f = |x: &[f64]| {
        calls += 1;
        if calls > cfg.n_init + 2 {
            f64::INFINITY
        } else {
            sphere(x)
        }
    };
    let r = run_bo(f, &b, &cfg).unwrap();
    assert!(!r.is_completed());
    assert_eq!(r.records.len(), 2);
}

#[test]
fn parallel_with_one_worker_reproduces_sequential() {
    let d = 5;
    let b = Bounds::uniform(d, -5.12, 5.12).unwrap();
    let cfg = small_config(30, 9);
    let seq = run_dsa(sphere, &b, &cfg).unwrap();
    let par = run_dsa_parallel(sphere, &b, &cfg, 1).unwrap();
    assert_eq!(par.algorithm, Algorithm::DsaParallel);
    assert_eq!(trace_bytes(&seq, d), trace_bytes(&par, d));
}

#[test]
fn parallel_with_four_workers_keeps_invariants() {
    let d = 6;
    let b = Bounds::uniform(d, -2.048, 2.048).unwrap();
    let cfg = small_config(40, 4);
    let mut calls = 0;
    let r = run_dsa_parallel(
        |x: &[f64]| {
            calls += 1;
            additive_sphere_rosenbrock(x)
        },
        &b,
        &cfg,
        4,
    )
    .unwrap();
    let rec = all(&r);
    assert_eq!(calls, cfg.n_init + cfg.max_iter);
    replay_incumbent(&rec).unwrap();
    let brute = rec.iter().map(|x| x.y).fold(f64::INFINITY, f64::min);
    assert_eq!(r.incumbent.y, brute);
    assert!(r.gp_count <= binomial(d, 2));
    // Each committed row grows exactly one GP by one.
    replay_isolation(&rec, cfg.n_init).unwrap();
}

#[test]
fn config_errors() {
    let b = Bounds::uniform(3, 0.0, 1.0).unwrap();
    let bad_k = RunConfig {
        subset_size: 4,
        ..small_config(5, 0)
    };
    assert!(run_dsa(sphere, &b, &bad_k).is_err());
    assert!(run_bo(sphere, &b, &bad_k).is_ok());
    let bad_n = RunConfig {
        n_init: 1,
        ..small_config(5, 0)
    };
    assert!(run_bo(sphere, &b, &bad_n).is_err());
    assert!(run_dsa_parallel(sphere, &b, &small_config(5, 0), 0).is_err());
}
