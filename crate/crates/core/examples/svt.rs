//! Singular value thresholding, the proximal map of the nuclear norm.

use ttsvd::algebra::{multi_rank, svt_prox, ttnn, DEFAULT_RANK_TOL};
use ttsvd::{Tensor3, UnitaryTransform, C64};

fn main() {
    let t = UnitaryTransform::fft(4);
    let w = Tensor3::from_fn(6, 5, 4, |i, j, k| {
        C64::new(((i * 3 + j * 7 + k * 5) % 11) as f64 / 11.0 - 0.5, 0.0)
    });
    println!("input: ttnn {:.3}, multi-rank {}", ttnn(&w, &t).unwrap(), multi_rank(&w, &t, DEFAULT_RANK_TOL).unwrap());
    for tau in [0.1, 0.5, 1.0, 2.0] {
        let z = svt_prox(&w, &t, tau).unwrap();
        let objective = tau * ttnn(&z, &t).unwrap() + 0.5 * (&z - &w).frobenius_norm().powi(2);
        println!(
            "tau {tau:>4}: multi-rank {}  objective {objective:.4}",
            multi_rank(&z, &t, DEFAULT_RANK_TOL).unwrap()
        );
    }
}
