//! The transforms on offer and how much they compress a smooth tensor.

use ttsvd::algebra::truncated_multirank;
use ttsvd::{Tensor3, UnitaryTransform, C64};

fn main() {
    let (n, n3) = (10, 12);
    // tubes are quadratics in k, so the mode-3 unfolding has rank 3
    let z = Tensor3::from_fn(n, n, n3, |i, j, k| {
        let x = k as f64 / n3 as f64;
        let (a, b, c) = ((i as f64).sin(), ((i * j) as f64).cos(), (j as f64 * 0.3).sin());
        C64::new(a + b * x + c * x * x, 0.0)
    });

    let transforms = [
        UnitaryTransform::fft(n3),
        UnitaryTransform::dct(n3),
        UnitaryTransform::data_driven(&z).unwrap(),
        UnitaryTransform::random(n3, 1),
    ];
    for t in &transforms {
        let hat = t.apply(&z).unwrap();
        let energy: Vec<f64> = (0..n3).map(|k| hat.frontal_slice(k).norm_squared()).collect();
        let top3: f64 = {
            let mut e = energy.clone();
            e.sort_by(|a, b| b.total_cmp(a));
            e[..3].iter().sum::<f64>() / e.iter().sum::<f64>()
        };
        println!(
            "{:>6}  unitarity {:.1e}  energy in best 3 slices {:.4}  Σr at 0.9: {}",
            t.kind().to_string(),
            t.unitarity_residual(),
            top3,
            truncated_multirank(&z, t, 0.9).unwrap().sum()
        );
    }
}
