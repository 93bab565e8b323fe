mod common;

use common::*;
use proptest::prelude::*;
use ttsvd::algebra::{
    multi_rank, phi_product, spectral_norm, svt_prox, t_svd, ttnn, MultiRank, DEFAULT_RANK_TOL,
};
use ttsvd::io::{decode_tensor, encode_tensor};
use ttsvd::lab::{gen_synthetic, sample_uniform};
use ttsvd::solver::{admm_complete, project_omega, SolverConfig};
use ttsvd::tensor::{fold_mode3, inner_product, norm, unfold_mode3, NormKind, Tensor3, WeightVector};
use ttsvd::transform::UnitaryTransform;

fn shape() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..6, 1usize..6, 1usize..5)
}

fn transform_of(which: u8, n3: usize, seed: u64) -> UnitaryTransform {
    match which % 4 {
        0 => UnitaryTransform::fft(n3),
        1 => UnitaryTransform::dct(n3),
        2 => UnitaryTransform::identity(n3),
        _ => UnitaryTransform::random(n3, seed),
    }
}

fn tensor(dims: (usize, usize, usize), seed: u64) -> Tensor3 {
    gaussian_tensor(dims.0, dims.1, dims.2, &mut rng(seed), true)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fold_unfold_round_trip(dims in shape(), seed: u64) {
        let a = tensor(dims, seed);
        let back = fold_mode3(&unfold_mode3(&a), dims.0, dims.1).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn frobenius_matches_inner_product(dims in shape(), seed: u64) {
        let a = tensor(dims, seed);
        let ip = inner_product(&a, &a).unwrap();
        let f2 = a.frobenius_norm().powi(2);
        prop_assert!((ip.re - f2).abs() <= 1e-12 * f2);
        prop_assert!(ip.im.abs() <= 1e-12 * f2);
    }

    #[test]
    fn weighted_norm_below_slab_norm(dims in shape(), seed: u64, raw in prop::collection::vec(0.01f64..1.0, 4)) {
        let a = tensor(dims, seed);
        let w = &raw[..dims.2];
        let len = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let weights = WeightVector::new(w.iter().map(|x| x / len).collect()).unwrap();
        let lw = norm(&a, NormKind::LInfW(&weights)).unwrap();
        let l2 = norm(&a, NormKind::LInf2).unwrap();
        prop_assert!(lw <= l2 * (1.0 + 1e-12));
    }

    #[test]
    fn transforms_are_unitary_and_norm_preserving(dims in shape(), which: u8, seed: u64) {
        let a = tensor(dims, seed);
        let t = transform_of(which, dims.2, seed);
        prop_assert!(t.unitarity_residual() <= 1e-10);
        let hat = t.apply(&a).unwrap();
        prop_assert!((hat.frobenius_norm() - a.frobenius_norm()).abs() <= 1e-12 * a.frobenius_norm());
        let back = t.apply_inverse(&hat).unwrap();
        prop_assert!(back.max_abs_diff(&a).unwrap() <= 1e-12 * a.max_abs().max(1.0));
        let data = UnitaryTransform::data_driven(&a).unwrap();
        prop_assert!(data.unitarity_residual() <= 1e-10);
    }

    #[test]
    fn data_driven_transform_concentrates_energy(n in 2usize..6, n3 in 2usize..9, mode_rank in 1usize..4, seed: u64) {
        let mut r = rng(seed);
        // z = fold(B · C) with a mode-3 unfolding of rank at most `mode_rank`
        let coeff = gaussian_tensor(n, n, mode_rank, &mut r, false);
        let mix = gaussian_tensor(mode_rank, n3, 1, &mut r, false);
        let z = Tensor3::from_fn(n, n, n3, |i, j, k| {
            (0..mode_rank).map(|q| coeff.get(i, j, q) * mix.get(q, k, 0)).sum()
        });
        for keep in 1..=n3.min(mode_rank + 1) {
            let tail = |t: &UnitaryTransform, best_rows: bool| {
                let u = unfold_mode3(&t.apply(&z).unwrap());
                let mut rows: Vec<f64> = (0..n3).map(|k| u.row(k).norm_squared()).collect();
                if best_rows {
                    rows.sort_by(|a, b| b.total_cmp(a));
                }
                rows[keep..].iter().sum::<f64>()
            };
            let data = tail(&UnitaryTransform::data_driven(&z).unwrap(), false);
            let total = z.frobenius_norm().powi(2);
            for other in [UnitaryTransform::fft(n3), UnitaryTransform::dct(n3)] {
                prop_assert!(data <= tail(&other, true) + 1e-10 * total);
            }
        }
    }

    #[test]
    fn product_is_associative(n1 in 1usize..5, n2 in 1usize..5, n3 in 1usize..5, n4 in 1usize..5, k in 1usize..5, which: u8, seed: u64) {
        let t = transform_of(which, k, seed);
        let mut r = rng(seed);
        let a = gaussian_tensor(n1, n2, k, &mut r, true);
        let b = gaussian_tensor(n2, n3, k, &mut r, true);
        let c = gaussian_tensor(n3, n4, k, &mut r, true);
        let left = phi_product(&phi_product(&a, &b, &t).unwrap(), &c, &t).unwrap();
        let right = phi_product(&a, &phi_product(&b, &c, &t).unwrap(), &t).unwrap();
        prop_assert!(left.max_abs_diff(&right).unwrap() <= 1e-10 * left.max_abs().max(1.0));
    }

    #[test]
    fn blockdiag_homomorphism(n1 in 1usize..5, n2 in 1usize..5, n3 in 1usize..5, k in 1usize..5, which: u8, seed: u64) {
        let t = transform_of(which, k, seed);
        let phi = t.matrix().clone();
        let mut r = rng(seed);
        let a = gaussian_tensor(n1, n2, k, &mut r, true);
        let b = gaussian_tensor(n2, n3, k, &mut r, true);
        let c = phi_product(&a, &b, &t).unwrap();
        let lhs = blockdiag(&forward(&c, &phi));
        let rhs = blockdiag(&forward(&a, &phi)) * blockdiag(&forward(&b, &phi));
        prop_assert!(max_abs(&(lhs - rhs)) <= 1e-12 * 10.0);
    }

    #[test]
    fn nuclear_spectral_duality(dims in shape(), which: u8, seed: u64) {
        let t = transform_of(which, dims.2, seed);
        let mut r = rng(seed);
        let a = gaussian_tensor(dims.0, dims.1, dims.2, &mut r, true);
        let b = gaussian_tensor(dims.0, dims.1, dims.2, &mut r, true);
        let ip = inner_product(&a, &b).unwrap().norm();
        prop_assert!(ip <= ttnn(&a, &t).unwrap() * spectral_norm(&b, &t).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn nuclear_norm_below_rank_in_unit_ball(dims in shape(), which: u8, seed: u64) {
        let t = transform_of(which, dims.2, seed);
        let a = tensor(dims, seed);
        let a = a.scale(1.0 / spectral_norm(&a, &t).unwrap());
        let ranks = multi_rank(&a, &t, DEFAULT_RANK_TOL).unwrap();
        prop_assert!(ttnn(&a, &t).unwrap() <= ranks.sum() as f64 * (1.0 + 1e-12));
    }

    #[test]
    fn svt_is_nonexpansive(dims in shape(), which: u8, seed: u64, tau in 0.01f64..3.0) {
        let t = transform_of(which, dims.2, seed);
        let mut r = rng(seed);
        let a = gaussian_tensor(dims.0, dims.1, dims.2, &mut r, true);
        let b = gaussian_tensor(dims.0, dims.1, dims.2, &mut r, true);
        let d = (&svt_prox(&a, &t, tau).unwrap() - &svt_prox(&b, &t, tau).unwrap()).frobenius_norm();
        prop_assert!(d <= (&a - &b).frobenius_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn tsvd_singular_values_sorted(dims in shape(), which: u8, seed: u64) {
        let t = transform_of(which, dims.2, seed);
        let f = t_svd(&tensor(dims, seed), &t).unwrap();
        for k in 0..dims.2 {
            prop_assert!(f.singular_values(k).windows(2).all(|w| w[0] >= w[1]));
            prop_assert_eq!(f.singular_values(k).len(), f.rank());
        }
    }

    #[test]
    fn tensor_file_round_trip(dims in shape(), seed: u64, real: bool) {
        let a = tensor(dims, seed);
        let a = if real { a.to_real() } else { a };
        let back = decode_tensor(&encode_tensor(&a)).unwrap();
        prop_assert!(a.as_slice().iter().zip(back.as_slice()).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    }

    #[test]
    fn uniform_sample_has_exactly_m(dims in shape(), frac in 0.0f64..=1.0, seed: u64) {
        let total = dims.0 * dims.1 * dims.2;
        let m = (frac * total as f64) as usize;
        let s = sample_uniform(dims, m, seed).unwrap();
        prop_assert_eq!(s.m(), m);
        let mut idx = s.indices().to_vec();
        idx.dedup();
        prop_assert_eq!(idx.len(), m);
    }

    #[test]
    fn projection_is_idempotent(dims in shape(), frac in 0.0f64..=1.0, seed: u64) {
        let a = tensor(dims, seed);
        let m = (frac * a.len() as f64) as usize;
        let s = sample_uniform(dims, m, seed).unwrap();
        let p = project_omega(&a, &s).unwrap();
        prop_assert_eq!(project_omega(&p, &s).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_invariants(n in 4usize..9, n3 in 1usize..5, r in 1usize..3, which: u8, seed: u64) {
        let t = transform_of(which, n3, seed);
        let ranks = MultiRank::new(vec![r.min(n); n3]);
        let truth = gen_synthetic(n, n, n3, &ranks, &t, seed).unwrap();
        let s = sample_uniform(truth.dims(), truth.len() * 3 / 5, seed ^ 1).unwrap();
        let cfg = SolverConfig { max_iter: 300, ..Default::default() };
        let a = admm_complete(&truth, &s, &t, &cfg).unwrap();
        let b = admm_complete(&truth, &s, &t, &cfg).unwrap();
        prop_assert_eq!(&a.z, &b.z);
        prop_assert_eq!(&a.history, &b.history);
        prop_assert_eq!(a.history.len(), a.iterations);
        prop_assert_eq!(project_omega(&a.y, &s).unwrap(), project_omega(&truth, &s).unwrap());
        let last = a.final_kkt();
        prop_assert_eq!(a.converged, last.eta <= cfg.tol);
        if a.converged {
            prop_assert!(last.eta <= a.history[0].eta);
        }
    }
}
