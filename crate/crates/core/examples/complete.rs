//! Recovering a low-rank tensor from a fraction of its entries.

use ttsvd::lab::{bound_samples, even_rank_profile, gen_synthetic, psnr, rel_error, sample_uniform, BoundSpec};
use ttsvd::{admm_complete, SolverConfig, UnitaryTransform};

fn main() {
    let (n, n3, sum_rank) = (24, 12, 24);
    let t = UnitaryTransform::fft(n3);
    let ranks = even_rank_profile(sum_rank, 3, n3, n).unwrap();
    let truth = gen_synthetic(n, n, n3, &ranks, &t, 2024).unwrap();

    let m = bound_samples(&BoundSpec::multirank(1.5, sum_rank, n).unwrap()) as usize;
    let omega = sample_uniform(truth.dims(), m, 7).unwrap();
    println!("observing {m} of {} entries (rho = {:.3})", truth.len(), omega.rho());

    let report = admm_complete(&truth, &omega, &t, &SolverConfig::default()).unwrap();
    for (it, k) in report.history.iter().enumerate().filter(|(i, _)| i % 20 == 0) {
        println!("  iter {it:>3}: eta_x {:.2e} eta_y {:.2e}", k.eta_x, k.eta_y);
    }
    println!(
        "{} after {} iterations, rel {:.2e}, psnr {:.1} dB",
        if report.converged { "converged" } else { "stopped" },
        report.iterations,
        rel_error(&report.z, &truth).unwrap(),
        psnr(&report.z, &truth).unwrap()
    );
}
