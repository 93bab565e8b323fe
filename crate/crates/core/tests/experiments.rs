mod common;

use common::*;
use ttsvd::algebra::MultiRank;
use ttsvd::lab::{
    aggregate, bound_samples, even_rank_profile, gen_synthetic, psnr, rel_error, run_phase_experiment,
    sample_bernoulli, sample_uniform, ssim, BoundSpec, PhaseConfig,
};
use ttsvd::solver::{admm_complete, SolverConfig};
use ttsvd::tensor::Tensor3;
use ttsvd::transform::{TransformKind, UnitaryTransform};

#[test]
fn bernoulli_rate_matches() {
    let dims = (20, 20, 20);
    let n = 8000.0;
    let mean = (0..100).map(|s| sample_bernoulli(dims, 0.3, s).unwrap().rho()).sum::<f64>() / 100.0;
    // standard error of the mean of 100 binomial proportions
    let sigma = (0.3f64 * 0.7 / n).sqrt() / 10.0;
    assert!((mean - 0.3).abs() <= 3.0 * sigma, "mean {mean}");
}

#[test]
fn uniform_inclusion_frequency() {
    let dims = (4, 4, 4);
    let (m, seeds) = (16, 2000);
    let mut counts = [0usize; 64];
    for s in 0..seeds {
        for &(i, j, k) in sample_uniform(dims, m, s).unwrap().indices() {
            counts[i + 4 * j + 16 * k] += 1;
        }
    }
    let p = m as f64 / 64.0;
    let sigma = (seeds as f64 * p * (1.0 - p)).sqrt();
    let expected = seeds as f64 * p;
    // 64 cells; allow 4σ so the family-wise false alarm rate stays small
    for c in counts {
        assert!((c as f64 - expected).abs() <= 4.0 * sigma, "count {c} vs {expected}");
    }
}

#[test]
fn bound_growth_ratios() {
    for n in [20usize, 50, 100, 300] {
        let nf = n as f64;
        let multi = |n| bound_samples(&BoundSpec::multirank(1.0, 30, n).unwrap()) as f64;
        let tubal = |n| bound_samples(&BoundSpec::tubal(1.0, 3, n).unwrap()) as f64;
        let log_ratio = (4.0 * nf * nf).ln() / (nf * nf).ln();
        assert!((multi(2 * n) / multi(n) - 2.0 * log_ratio).abs() < 1e-3);
        assert!((tubal(2 * n) / tubal(n) - 4.0 * log_ratio).abs() < 1e-3);
    }
}

#[test]
fn metric_scaling() {
    let mut r = rng(1);
    let reference = uniform_tensor(8, 8, 3, &mut r);
    let noise = gaussian_tensor(8, 8, 3, &mut r, false);
    let est1 = &reference + &noise.scale(0.01);
    let est2 = &reference + &noise.scale(0.02);
    let drop = psnr(&est1, &reference).unwrap() - psnr(&est2, &reference).unwrap();
    assert!((drop - 20.0 * 2f64.log10()).abs() < 1e-10, "{drop}");

    let pert = noise.scale(0.01 * reference.frobenius_norm() / noise.frobenius_norm());
    assert!((rel_error(&(&reference + &pert), &reference).unwrap() - 0.01).abs() < 1e-12);

    for seed in 0..20 {
        let mut r = rng(seed);
        let a = uniform_tensor(6, 6, 2, &mut r);
        let b = uniform_tensor(6, 6, 2, &mut r);
        let s = ssim(&a, &b).unwrap();
        assert!((-1.0..=1.0).contains(&s));
    }

    let centered = Tensor3::from_fn(4, 4, 2, |i, j, _| C::new(if (i + j) % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
    assert!(ssim(&-&centered, &centered).unwrap() < 0.0);
}

#[test]
fn synthetic_recovery_at_unit_constant() {
    let (n, n3, sum) = (40, 20, 60);
    let t = UnitaryTransform::fft(n3);
    let ranks = even_rank_profile(sum, sum, n3, n).unwrap();
    let truth = gen_synthetic(n, n, n3, &ranks, &t, 11).unwrap();
    let m = (1.0 * sum as f64 * n as f64 * ((n * n) as f64).ln()).ceil() as usize;
    let omega = sample_uniform(truth.dims(), m, 12).unwrap();
    let report = admm_complete(&truth, &omega, &t, &SolverConfig::default()).unwrap();
    let rel = rel_error(&report.z, &truth).unwrap();
    assert!(rel <= 1e-2, "rel {rel}");
}

#[test]
fn recovery_is_monotone_in_samples() {
    let (n, sum) = (20, 10);
    let t = UnitaryTransform::dct(n);
    let ranks = even_rank_profile(sum, 2, n, n).unwrap();
    let truth = gen_synthetic(n, n, n, &ranks, &t, 21).unwrap();
    let bound = bound_samples(&BoundSpec::multirank(1.0, sum, n).unwrap()) as f64;
    let successes: Vec<bool> = [0.25, 1.0, 4.0]
        .iter()
        .map(|c| {
            let m = ((c * bound).ceil() as usize).min(truth.len());
            let omega = sample_uniform(truth.dims(), m, 22).unwrap();
            let z = admm_complete(&truth, &omega, &t, &SolverConfig::default()).unwrap().z;
            rel_error(&z, &truth).unwrap() <= 1e-2
        })
        .collect();
    assert!(successes.windows(2).all(|w| !w[0] || w[1]), "{successes:?}");
    assert!(successes[2]);
}

fn phase(n: usize, sum_rank: usize, tubal: usize, constant: f64) -> PhaseConfig {
    PhaseConfig {
        n_list: vec![n],
        sum_rank,
        tubal,
        const_list: vec![constant],
        trials: 1,
        seed: 5,
        ..Default::default()
    }
}

#[test]
fn phase_oversampled_succeeds() {
    let recs = run_phase_experiment(&phase(20, 10, 2, 3.0)).unwrap();
    assert_eq!(recs.len(), 1);
    assert!(recs[0].success, "rel {}", recs[0].rel);
}

#[test]
fn phase_clamps_to_full_observation() {
    let recs = run_phase_experiment(&phase(10, 5, 1, 1e6)).unwrap();
    assert_eq!(recs[0].m, 1000);
    assert!(recs[0].success);
}

#[test]
fn phase_undersampled_fails() {
    let recs = run_phase_experiment(&phase(40, 60, 2, 0.05)).unwrap();
    assert!(recs[0].rel > 0.1, "rel {}", recs[0].rel);
    assert!(!aggregate(&recs)[0].success());
}

#[test]
fn phase_is_independent_of_thread_count() {
    let cfg = PhaseConfig {
        n_list: vec![8, 10],
        sum_rank: 6,
        tubal: 2,
        transforms: vec![TransformKind::Fft, TransformKind::Data],
        const_list: vec![0.8, 2.0],
        trials: 2,
        seed: 9,
        ..Default::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_phase_experiment(&cfg).unwrap())
    };
    let strip = |mut v: Vec<ttsvd::lab::ExperimentRecord>| {
        v.iter_mut().for_each(|r| r.wall_seconds = 0.0);
        v
    };
    let one = strip(run(1));
    let many = strip(run(4));
    assert_eq!(one.len(), 16);
    assert_eq!(one, many);
}

#[test]
fn synthetic_complex_under_fft() {
    let t = UnitaryTransform::fft(2);
    let z = gen_synthetic(10, 10, 2, &MultiRank::new(vec![3, 3]), &t, 1).unwrap();
    assert!(!z.is_real());
}

#[test]
fn phase_with_learned_transform() {
    let cfg = PhaseConfig { transforms: vec![TransformKind::Data], ..phase(16, 8, 2, 3.0) };
    let recs = run_phase_experiment(&cfg).unwrap();
    assert_eq!(recs[0].transform, "data");
    assert!(recs[0].success, "rel {}", recs[0].rel);
}
