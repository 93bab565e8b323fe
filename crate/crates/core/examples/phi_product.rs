//! Multiplying third-order tensors through a unitary transform.

use ttsvd::algebra::{conj_transpose, identity_tensor, phi_product};
use ttsvd::{Tensor3, UnitaryTransform, C64};

fn main() {
    let a = Tensor3::from_fn(3, 2, 4, |i, j, k| C64::new((i + 2 * j) as f64, k as f64 * 0.5));
    let b = Tensor3::from_fn(2, 3, 4, |i, j, k| C64::new(1.0 + (i * j) as f64, -(k as f64)));

    for t in [UnitaryTransform::fft(4), UnitaryTransform::dct(4), UnitaryTransform::random(4, 7)] {
        let c = phi_product(&a, &b, &t).unwrap();
        let id = identity_tensor(3, &t).unwrap();
        let same = phi_product(&id, &a, &t).unwrap();

        // (A ⋄ B)ᴴ = Bᴴ ⋄ Aᴴ
        let lhs = conj_transpose(&c, &t).unwrap();
        let rhs = phi_product(&conj_transpose(&b, &t).unwrap(), &conj_transpose(&a, &t).unwrap(), &t).unwrap();

        println!(
            "{:>6}: A⋄B is {:?}, |I⋄A - A| = {:.1e}, |(A⋄B)ᴴ - Bᴴ⋄Aᴴ| = {:.1e}",
            t.kind().to_string(),
            c.dims(),
            same.max_abs_diff(&a).unwrap(),
            lhs.max_abs_diff(&rhs).unwrap()
        );
    }
}
