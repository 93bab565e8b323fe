//! Relative error, PSNR and SSIM between two tensors.

use ttsvd::lab::{psnr, rel_error, ssim};
use ttsvd::{Tensor3, C64};

fn main() {
    let reference = Tensor3::from_fn(16, 16, 3, |i, j, k| {
        C64::new(((i as f64 / 3.0).sin() * (j as f64 / 5.0).cos() + k as f64) / 4.0, 0.0)
    });
    for noise in [0.0, 0.001, 0.01, 0.1] {
        let est = Tensor3::from_fn(16, 16, 3, |i, j, k| {
            reference.get(i, j, k) + C64::new(noise * (((i * 31 + j * 17 + k * 7) % 13) as f64 - 6.0) / 6.0, 0.0)
        });
        println!(
            "noise {noise:<6} rel {:.2e}  psnr {:>7.2}  ssim {:.5}",
            rel_error(&est, &reference).unwrap(),
            psnr(&est, &reference).unwrap(),
            ssim(&est, &reference).unwrap()
        );
    }
}
