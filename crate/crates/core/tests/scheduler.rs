mod common;

use std::collections::{BTreeMap, BTreeSet};

use dimsched::scheduler::{
    canonical_key, compute_dimension_probabilities, sample_covariance, sample_subset,
    DimensionSubset, ProbabilityVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn single_varying_dimension() {
    let (d, eps) = (4, 0.1);
    let pts: Vec<Vec<f64>> = (0..9)
        .map(|i| vec![i as f64 * 0.3, 1.0, -2.0, 5.0])
        .collect();
    let w = compute_dimension_probabilities(&pts, eps).unwrap();
    let p = w.probabilities.as_slice();
    assert!((p[0] - ((1.0 - eps) + eps / d as f64)).abs() < 1e-12);
    for &pj in &p[1..] {
        assert!((pj - eps / d as f64).abs() < 1e-12);
    }
}

#[test]
fn isotropic_and_identical_points() {
    // The 2^3 cube corners have covariance proportional to I.
    let pts: Vec<Vec<f64>> = (0..8)
        .map(|m| (0..3).map(|j| ((m >> j) & 1) as f64).collect())
        .collect();
    let w = compute_dimension_probabilities(&pts, 0.1).unwrap();
    for p in w.probabilities.as_slice() {
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
    }
    let same = vec![vec![1.0, 2.0]; 5];
    let w = compute_dimension_probabilities(&same, 0.1).unwrap();
    assert!(w.degenerate);
    assert_eq!(w.probabilities.as_slice(), &[0.5, 0.5]);
}

#[test]
fn eigen_importance_equals_covariance_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let d = rng.random_range(2..=12);
        let n = rng.random_range(3..40);
        let mix: Vec<f64> = (0..d * d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let z: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                (0..d)
                    .map(|i| (0..d).map(|k| mix[i * d + k] * z[k]).sum())
                    .collect()
            })
            .collect();
        let w = compute_dimension_probabilities(&pts, 0.1).unwrap();
        // Covariance diagonal computed directly from the definition.
        let mean: Vec<f64> = (0..d)
            .map(|j| pts.iter().map(|p| p[j]).sum::<f64>() / n as f64)
            .collect();
        let c = sample_covariance(&pts);
        for j in 0..d {
            let cjj: f64 =
                pts.iter().map(|p| (p[j] - mean[j]).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!((c.get(j, j) - cjj).abs() < 1e-12 * (1.0 + cjj));
            assert!((w.importance[j] - cjj).abs() < 1e-10 * (1.0 + cjj), "{j}");
        }
        let sum: f64 = w.probabilities.as_slice().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(w
            .probabilities
            .as_slice()
            .iter()
            .all(|&p| p >= 0.1 / d as f64 - 1e-15));
    }
}

#[test]
fn full_subset_when_k_equals_d() {
    let p = ProbabilityVector::from_weights(&[10.0, 0.0, 1.0, 0.5], 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..50 {
        assert_eq!(sample_subset(&p, 4, &mut rng), DimensionSubset::full(4));
    }
}

#[test]
fn concentrated_single_draw_frequency() {
    let p = ProbabilityVector::from_weights(&[0.97, 0.01, 0.01, 0.01], 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 100_000;
    let hits = (0..n)
        .filter(|_| sample_subset(&p, 1, &mut rng).dims() == [0])
        .count();
    let freq = hits as f64 / n as f64;
    assert!((freq - 0.97).abs() < 0.01, "{freq}");
}

#[test]
fn uniform_pairs_of_three() {
    let p = ProbabilityVector::uniform(3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 100_000;
    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for _ in 0..n {
        *counts
            .entry(sample_subset(&p, 2, &mut rng).dims().to_vec())
            .or_default() += 1;
    }
    assert_eq!(counts.len(), 3);
    for c in counts.values() {
        assert!((*c as f64 / n as f64 - 1.0 / 3.0).abs() < 0.01);
    }
}

/// Inclusion probability of each coordinate under successive renormalized
/// draws, by enumerating every ordered draw sequence.
fn inclusion_oracle(p: &[f64], k: usize) -> Vec<f64> {
    fn rec(p: &[f64], k: usize, taken: &mut Vec<usize>, prob: f64, out: &mut [f64]) {
        if taken.len() == k {
            for &j in taken.iter() {
                out[j] += prob;
            }
            return;
        }
        let rest: f64 = (0..p.len())
            .filter(|j| !taken.contains(j))
            .map(|j| p[j])
            .sum();
        for j in 0..p.len() {
            if !taken.contains(&j) {
                taken.push(j);
                rec(p, k, taken, prob * p[j] / rest, out);
                taken.pop();
            }
        }
    }
    let mut out = vec![0.0; p.len()];
    rec(p, k, &mut Vec::new(), 1.0, &mut out);
    out
}

#[test]
fn inclusion_frequencies_match_sequential_oracle() {
    let p = ProbabilityVector::from_weights(&[5.0, 1.0, 3.0, 0.5, 2.0], 0.1);
    for k in 1..=3 {
        let oracle = inclusion_oracle(p.as_slice(), k);
        let mut rng = ChaCha8Rng::seed_from_u64(10 + k as u64);
        let n = 100_000;
        let mut counts = vec![0usize; 5];
        for _ in 0..n {
            for &j in sample_subset(&p, k, &mut rng).dims() {
                counts[j] += 1;
            }
        }
        for j in 0..5 {
            let q = oracle[j];
            let se = (q * (1.0 - q) / n as f64).sqrt();
            let f = counts[j] as f64 / n as f64;
            assert!((f - q).abs() < 3.0 * se + 1e-12, "k={k} j={j}: {f} vs {q}");
        }
    }
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let p = ProbabilityVector::from_weights(&[1.0, 2.0, 3.0, 4.0], 0.1);
    let draw = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..100)
            .map(|_| sample_subset(&p, 2, &mut rng))
            .collect::<Vec<_>>()
    };
    assert_eq!(draw(4), draw(4));
    assert_ne!(draw(4), draw(5));
}

#[test]
fn keys_are_order_insensitive_and_injective() {
    let a = DimensionSubset::new(vec![3, 1], 5).unwrap();
    let b = DimensionSubset::new(vec![1, 3], 5).unwrap();
    assert_eq!(canonical_key(&a), canonical_key(&b));
    let c = DimensionSubset::new(vec![0, 1], 5).unwrap();
    let e = DimensionSubset::new(vec![0, 2], 5).unwrap();
    assert_ne!(canonical_key(&c), canonical_key(&e));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = ProbabilityVector::uniform(5);
    let keys: BTreeSet<_> = (0..10_000)
        .map(|_| canonical_key(&sample_subset(&p, 2, &mut rng)))
        .collect();
    assert_eq!(keys.len(), common::binomial(5, 2));
}
