//! Unitary transforms along the third mode.
//!
//! A transform is an `n3 × n3` unitary matrix `Φ` acting on every tube
//! `A(i, j, :)`. The transformed tensor `Φ[A]` has tube `Φ · A(i, j, :)`; its
//! frontal slices are where products, SVDs and nuclear norms are taken.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;
use crate::tensor::{unfold_mode3, Tensor3, WeightVector, C64};

/// Maximum entrywise deviation of `ΦΦᴴ` and `ΦᴴΦ` from the identity accepted
/// for any transform.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Fft,
    Dct,
    Data,
    Custom,
}

impl TransformKind {
    pub fn label(self) -> &'static str {
        match self {
            TransformKind::Fft => "fft",
            TransformKind::Dct => "dct",
            TransformKind::Data => "data",
            TransformKind::Custom => "custom",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fft" => Ok(TransformKind::Fft),
            "dct" => Ok(TransformKind::Dct),
            "data" => Ok(TransformKind::Data),
            "custom" => Ok(TransformKind::Custom),
            other => Err(Error::InvalidArgument(format!("unknown transform '{other}'"))),
        }
    }
}

/// An `n3 × n3` unitary matrix together with what produced it.
#[derive(Clone, Debug)]
pub struct UnitaryTransform {
    phi: DMatrix<C64>,
    // Φᵀ and conj(Φ): right factors for the tube matrix in `apply`/`apply_inverse`
    phi_t: DMatrix<C64>,
    phi_conj: DMatrix<C64>,
    kind: TransformKind,
}

impl UnitaryTransform {
    fn from_matrix(phi: DMatrix<C64>, kind: TransformKind) -> Self {
        let phi_t = phi.transpose();
        let phi_conj = phi.map(|z| z.conj());
        Self { phi, phi_t, phi_conj, kind }
    }

    /// Unitary DFT: `Φ[t, k] = exp(−2πi·t·k/n3) / √n3`.
    ///
    /// # Panics
    ///
    /// Panics if `n3 == 0`.
    pub fn fft(n3: usize) -> Self {
        assert!(n3 > 0, "transform size must be positive");
        let scale = 1.0 / (n3 as f64).sqrt();
        let phi = DMatrix::from_fn(n3, n3, |t, k| {
            // reduce the exponent first so large sizes keep full accuracy
            let e = (t * k) % n3;
            C64::from_polar(scale, -2.0 * PI * e as f64 / n3 as f64)
        });
        Self::from_matrix(phi, TransformKind::Fft)
    }

    /// Orthonormal DCT-II: `Φ[t, k] = s_t · cos(π(2k+1)t / 2n3)` with
    /// `s_0 = √(1/n3)` and `s_t = √(2/n3)` otherwise.
    ///
    /// # Panics
    ///
    /// Panics if `n3 == 0`.
    pub fn dct(n3: usize) -> Self {
        assert!(n3 > 0, "transform size must be positive");
        let n = n3 as f64;
        let phi = DMatrix::from_fn(n3, n3, |t, k| {
            let s = if t == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            C64::new(s * (PI * ((2 * k + 1) * t) as f64 / (2.0 * n)).cos(), 0.0)
        });
        Self::from_matrix(phi, TransformKind::Dct)
    }

    /// The identity matrix, labelled `custom`.
    pub fn identity(n3: usize) -> Self {
        assert!(n3 > 0, "transform size must be positive");
        Self::from_matrix(DMatrix::identity(n3, n3), TransformKind::Custom)
    }

    /// Wraps a user-supplied matrix after checking it is square and unitary.
    pub fn custom(phi: DMatrix<C64>) -> Result<Self> {
        if phi.nrows() != phi.ncols() || phi.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "transform must be square and non-empty, got {}x{}",
                phi.nrows(),
                phi.ncols()
            )));
        }
        if phi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("transform has non-finite entries".into()));
        }
        let residual = linalg::unitarity_residual(&phi);
        if residual > UNITARITY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self::from_matrix(phi, TransformKind::Custom))
    }

    /// Haar-distributed random unitary matrix from a seed, labelled `custom`.
    pub fn random(n3: usize, seed: u64) -> Self {
        assert!(n3 > 0, "transform size must be positive");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n3, n3, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        });
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        // rescale by the phases of diag(R) so Q is Haar-distributed
        for c in 0..n3 {
            let d = r[(c, c)];
            if d.norm() > 0.0 {
                let phase = d / d.norm();
                q.column_mut(c).iter_mut().for_each(|z| *z *= phase);
            }
        }
        Self::from_matrix(q, TransformKind::Custom)
    }

    /// `Φ = Uᴴ` where `U` holds the left singular vectors of the mode-3
    /// unfolding of `z`, ordered by decreasing singular value.
    ///
    /// Each singular vector is rotated so its first nonzero entry is real and
    /// positive. When the unfolding has rank `r < n3` the remaining rows are
    /// filled by Gram–Schmidt over the standard basis `e_1, e_2, …`. The zero
    /// tensor gives the identity.
    pub fn data_driven(z: &Tensor3) -> Result<Self> {
        let n3 = z.n3();
        let unfolded = unfold_mode3(z);
        let svd = linalg::thin_svd(unfolded.as_view())?;
        let smax = svd.s.first().copied().unwrap_or(0.0);
        let tol = smax * 1e-12 * n3.max(z.n1() * z.n2()) as f64;
        let rank = svd.s.iter().take_while(|&&s| s > tol && s > 0.0).count();

        let mut basis: Vec<nalgebra::DVector<C64>> =
            (0..rank).map(|c| svd.u.column(c).into_owned()).collect();
        let min_residual = 0.5 / (n3 as f64).sqrt();
        for e in 0..n3 {
            if basis.len() == n3 {
                break;
            }
            let mut v = nalgebra::DVector::<C64>::zeros(n3);
            v[e] = C64::new(1.0, 0.0);
            // two passes of classical Gram–Schmidt
            for _ in 0..2 {
                for b in &basis {
                    let coef = b.dotc(&v);
                    v -= b * coef;
                }
            }
            let nrm = v.norm();
            if nrm > min_residual {
                basis.push(v / C64::new(nrm, 0.0));
            }
        }
        if basis.len() != n3 {
            return Err(Error::Numerical("failed to complete the unitary basis".into()));
        }
        let mut u = DMatrix::from_columns(&basis);
        linalg::normalize_phases(&mut u, None);
        Ok(Self::from_matrix(u.adjoint(), TransformKind::Data))
    }

    pub fn n3(&self) -> usize {
        self.phi.nrows()
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.phi
    }

    /// True when every entry of `Φ` has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.phi.iter().all(|z| z.im == 0.0)
    }

    pub fn unitarity_residual(&self) -> f64 {
        linalg::unitarity_residual(&self.phi)
    }

    fn check(&self, a: &Tensor3) -> Result<()> {
        if a.n3() != self.n3() {
            return Err(Error::DimensionMismatch(format!(
                "tensor has n3 = {}, transform is {}x{}",
                a.n3(),
                self.n3(),
                self.n3()
            )));
        }
        Ok(())
    }

    /// `Φ[a]`: every tube multiplied by `Φ`.
    pub fn apply(&self, a: &Tensor3) -> Result<Tensor3> {
        self.check(a)?;
        Ok(Tensor3::from_tube_matrix(a.n1(), a.n2(), a.tube_matrix() * &self.phi_t))
    }

    /// `Φᴴ[a]`: every tube multiplied by `Φᴴ`.
    pub fn apply_inverse(&self, a: &Tensor3) -> Result<Tensor3> {
        self.check(a)?;
        Ok(Tensor3::from_tube_matrix(a.n1(), a.n2(), a.tube_matrix() * &self.phi_conj))
    }

    /// Weights `α_t = |Φ[t, k]|` from column `k` (zero-based).
    pub fn weights_from_column(&self, k: usize) -> Result<WeightVector> {
        if k >= self.n3() {
            return Err(Error::IndexOutOfRange(format!("column {k} of a {}-point transform", self.n3())));
        }
        let col: Vec<f64> = self.phi.column(k).iter().map(|z| z.norm()).collect();
        // unitarity holds to UNITARITY_TOL; renormalize to the weight tolerance
        let nrm = col.iter().map(|a| a * a).sum::<f64>().sqrt();
        WeightVector::new(col.into_iter().map(|a| a / nrm).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_tensor(n1: usize, n2: usize, n3: usize, seed: u64) -> Tensor3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Tensor3::from_fn(n1, n2, n3, |_, _, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            c(re, im)
        })
    }

    #[test]
    fn small_fft_and_dct_matrices() {
        assert_eq!(UnitaryTransform::fft(1).matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(UnitaryTransform::dct(1).matrix()[(0, 0)], c(1.0, 0.0));
        let h = 1.0 / 2f64.sqrt();
        for t in [UnitaryTransform::fft(2), UnitaryTransform::dct(2)] {
            let expected = [[h, h], [h, -h]];
            for r in 0..2 {
                for col in 0..2 {
                    assert!((t.matrix()[(r, col)] - c(expected[r][col], 0.0)).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn constructors_are_unitary() {
        for n in [1, 2, 3, 4, 7, 16, 33] {
            assert!(UnitaryTransform::fft(n).unitarity_residual() < 1e-12);
            assert!(UnitaryTransform::dct(n).unitarity_residual() < 1e-12);
            assert!(UnitaryTransform::random(n, n as u64).unitarity_residual() < 1e-12);
        }
        let z = random_tensor(6, 5, 4, 1);
        assert!(UnitaryTransform::data_driven(&z).unwrap().unitarity_residual() < 1e-12);
    }

    #[test]
    fn fft_columns_orthonormal_gram() {
        let t = UnitaryTransform::fft(4);
        let m = t.matrix();
        for a in 0..4 {
            for b in 0..4 {
                let g: C64 = m.column(a).iter().zip(m.column(b).iter()).map(|(x, y)| x.conj() * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((g - c(target, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn custom_rejects_non_unitary() {
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(UnitaryTransform::custom(m), Err(Error::NotUnitary { .. })));
        let m = DMatrix::from_element(2, 3, c(0.0, 0.0));
        assert!(UnitaryTransform::custom(m).is_err());
        let ok = UnitaryTransform::random(5, 3).matrix().clone();
        assert_eq!(UnitaryTransform::custom(ok).unwrap().kind(), TransformKind::Custom);
    }

    #[test]
    fn apply_two_point_fft() {
        let t = UnitaryTransform::fft(2);
        let a = Tensor3::new((1, 1, 2), vec![c(3.0, 1.0), c(1.0, -2.0)]).unwrap();
        let b = t.apply(&a).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((b.get(0, 0, 0) - c(4.0, -1.0) * h).norm() < 1e-15);
        assert!((b.get(0, 0, 1) - c(2.0, 3.0) * h).norm() < 1e-15);
    }

    #[test]
    fn identity_and_round_trip() {
        let a = random_tensor(3, 3, 5, 9);
        assert_eq!(UnitaryTransform::identity(5).apply(&a).unwrap(), a);
        for t in [UnitaryTransform::fft(5), UnitaryTransform::dct(5), UnitaryTransform::random(5, 2)] {
            let b = t.apply_inverse(&t.apply(&a).unwrap()).unwrap();
            assert!(b.max_abs_diff(&a).unwrap() <= 1e-12);
            let fa = t.apply(&a).unwrap().frobenius_norm();
            assert!((fa - a.frobenius_norm()).abs() <= 1e-12 * a.frobenius_norm());
        }
        assert!(UnitaryTransform::fft(4).apply(&a).is_err());
    }

    #[test]
    fn data_driven_degenerate_cases() {
        let t = UnitaryTransform::data_driven(&Tensor3::zeros(2, 3, 4)).unwrap();
        assert_eq!(t.matrix(), &DMatrix::<C64>::identity(4, 4));

        // single nonzero slice k = 2
        let z = Tensor3::from_fn(3, 2, 4, |i, j, k| if k == 2 { c((i + 2 * j) as f64 + 1.0, 0.5) } else { c(0.0, 0.0) });
        let t = UnitaryTransform::data_driven(&z).unwrap();
        let row0 = t.matrix().row(0);
        for col in 0..4 {
            let expected = if col == 2 { 1.0 } else { 0.0 };
            assert!((row0[col].norm() - expected).abs() < 1e-12);
        }
        // phase convention makes it exactly real positive
        assert!(row0[2].im.abs() < 1e-14 && row0[2].re > 0.0);
        assert!(t.unitarity_residual() < 1e-12);
    }

    #[test]
    fn data_driven_rows_have_decreasing_energy() {
        let z = random_tensor(6, 5, 4, 17);
        let t = UnitaryTransform::data_driven(&z).unwrap();
        let u = unfold_mode3(&t.apply(&z).unwrap());
        let norms: Vec<f64> = (0..4).map(|r| u.row(r).norm()).collect();
        assert!(norms.windows(2).all(|w| w[0] >= w[1] - 1e-12), "{norms:?}");
    }

    #[test]
    fn data_driven_completes_wide_unfolding() {
        // n1·n2 = 2 < n3 = 5: unfolding rank ≤ 2
        let z = random_tensor(1, 2, 5, 4);
        let t = UnitaryTransform::data_driven(&z).unwrap();
        assert!(t.unitarity_residual() < 1e-12);
        let u = unfold_mode3(&t.apply(&z).unwrap());
        for r in 2..5 {
            assert!(u.row(r).norm() < 1e-12);
        }
    }

    #[test]
    fn weights() {
        let w = UnitaryTransform::identity(3).weights_from_column(1).unwrap();
        assert_eq!(w.as_slice(), &[0.0, 1.0, 0.0]);
        let w = UnitaryTransform::fft(5).weights_from_column(3).unwrap();
        assert!(w.as_slice().iter().all(|a| (a - 1.0 / 5f64.sqrt()).abs() < 1e-15));
        let w = UnitaryTransform::dct(4).weights_from_column(0).unwrap();
        let expected: Vec<f64> = (0..4)
            .map(|t| {
                let s = if t == 0 { 0.5 } else { (0.5f64).sqrt() };
                (s * (PI * t as f64 / 8.0).cos()).abs()
            })
            .collect();
        for (a, b) in w.as_slice().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((w.as_slice().iter().map(|a| a * a).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(UnitaryTransform::fft(3).weights_from_column(3).is_err());
    }

    #[test]
    fn kind_labels_round_trip() {
        for k in [TransformKind::Fft, TransformKind::Dct, TransformKind::Data, TransformKind::Custom] {
            assert_eq!(k.label().parse::<TransformKind>().unwrap(), k);
        }
        assert!("wavelet".parse::<TransformKind>().is_err());
    }
}
