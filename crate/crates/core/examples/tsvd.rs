//! Transformed tensor SVD, multi-rank and the nuclear norm.

use ttsvd::algebra::{multi_rank, spectral_norm, t_svd, truncated_multirank, ttnn, DEFAULT_RANK_TOL};
use ttsvd::lab::gen_synthetic;
use ttsvd::{MultiRank, UnitaryTransform};

fn main() {
    let t = UnitaryTransform::dct(5);
    let ranks = MultiRank::new(vec![3, 2, 2, 1, 0]);
    let a = gen_synthetic(8, 6, 5, &ranks, &t, 42).unwrap();

    let f = t_svd(&a, &t).unwrap();
    println!("multi-rank  {}", f.multi_rank());
    println!("tubal rank  {}", f.rank());
    println!("U {:?}  S {:?}  V {:?}", f.u().unwrap().dims(), f.s().unwrap().dims(), f.v().unwrap().dims());
    for k in 0..5 {
        println!("  slice {k}: {:?}", f.singular_values(k).iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>());
    }

    let back = f.reconstruct().unwrap();
    println!("reconstruction error {:.2e}", (&back - &a).frobenius_norm() / a.frobenius_norm());
    println!("ttnn {:.4}, spectral norm {:.4}", ttnn(&a, &t).unwrap(), spectral_norm(&a, &t).unwrap());
    assert_eq!(multi_rank(&a, &t, DEFAULT_RANK_TOL).unwrap(), ranks);

    for varpi in [0.5, 0.8, 0.95, 1.0] {
        println!("effective multi-rank at {varpi}: {}", truncated_multirank(&a, &t, varpi).unwrap());
    }
}
