//! Writing and reading tensors, masks and transforms.

use ttsvd::io::{read_mask, read_tensor, read_transform, write_mask, write_tensor, write_transform};
use ttsvd::lab::sample_uniform;
use ttsvd::{Tensor3, UnitaryTransform, C64};

fn main() -> ttsvd::Result<()> {
    let dir = tempfile::tempdir()?;

    let real = Tensor3::from_fn(3, 4, 2, |i, j, k| C64::new((i + 10 * j + 100 * k) as f64, 0.0));
    let complex = real.map(|z| z * C64::new(0.0, 1.0) + 1.0);
    for (name, t) in [("real", &real), ("complex", &complex)] {
        let path = dir.path().join(format!("{name}.tt3d"));
        write_tensor(&path, t)?;
        let size = std::fs::metadata(&path)?.len();
        assert_eq!(&read_tensor(&path)?, t);
        println!("{name:>7} tensor: {size} bytes");
    }

    let omega = sample_uniform(real.dims(), 5, 1)?;
    let mask = dir.path().join("mask.csv");
    write_mask(&mask, &omega)?;
    print!("{}", std::fs::read_to_string(&mask)?);
    assert_eq!(read_mask(&mask, real.dims())?.indices(), omega.indices());

    let phi = dir.path().join("phi.tt3d");
    write_transform(&phi, &UnitaryTransform::random(5, 9))?;
    println!("custom transform residual {:.1e}", read_transform(&phi)?.unitarity_residual());
    Ok(())
}
