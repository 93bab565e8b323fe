//! Incoherence, tangent-space projections and the unit-tensor bound.

use ttsvd::algebra::{basis, conj_transpose, incoherence_mu, phi_product, project_t, project_t_perp, t_svd, Basis};
use ttsvd::lab::gen_synthetic;
use ttsvd::{MultiRank, UnitaryTransform};

fn main() {
    let (n, n3) = (8, 4);
    let t = UnitaryTransform::fft(n3);
    let z = gen_synthetic(n, n, n3, &MultiRank::new(vec![2, 1, 1, 2]), &t, 3).unwrap();
    let f = t_svd(&z, &t).unwrap();
    let inc = incoherence_mu(&f).unwrap();
    println!("mu = {:.3} (columns {:.3}, rows {:.3})", inc.mu(), inc.column, inc.row);

    let limit = 2.0 * inc.mu() * f.multi_rank().sum() as f64 / (n * n3) as f64;
    let mut worst: f64 = 0.0;
    for k in 0..n3 {
        let tube = basis(Basis::TransformedTube { k }, 1, &t).unwrap();
        for i in 0..n {
            for j in 0..n {
                let ei = basis(Basis::Column { i, k }, n, &t).unwrap();
                let ej = conj_transpose(&basis(Basis::Column { i: j, k }, n, &t).unwrap(), &t).unwrap();
                let e = phi_product(&phi_product(&ei, &tube, &t).unwrap(), &ej, &t).unwrap();
                worst = worst.max(project_t(&e, &f).unwrap().frobenius_norm().powi(2));
            }
        }
    }
    println!("max |P_T(E_ijk)|² = {worst:.4} <= {limit:.4}");

    let split = (&project_t(&z, &f).unwrap() - &z).frobenius_norm() + project_t_perp(&z, &f).unwrap().frobenius_norm();
    println!("Z lies in its own tangent space: residual {split:.1e}");
}
