//! The Φ-product algebra.
//!
//! Every operation here maps its operands into the transformed domain with a
//! [`UnitaryTransform`], works slice by slice on the `n3` frontal matrices,
//! and maps back with `Φᴴ`. Slices are independent, so the per-slice work
//! runs on the rayon pool; each slice is computed the same way regardless of
//! scheduling, so results do not depend on the thread count.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, MatSvd};
use crate::tensor::{Tensor3, C64};
use crate::transform::UnitaryTransform;

/// Relative cutoff used to count nonzero singular values: a singular value
/// counts when it exceeds this times the largest one over all slices.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Frontal slices of `Φ[a]`.
pub fn transformed_slices(a: &Tensor3, t: &UnitaryTransform) -> Result<Vec<DMatrix<C64>>> {
    let hat = t.apply(a)?;
    Ok((0..hat.n3()).map(|k| hat.frontal_slice(k).clone_owned()).collect())
}

/// Inverse of [`transformed_slices`]: stacks the slices and applies `Φᴴ`.
pub fn from_transformed_slices(slices: &[DMatrix<C64>], t: &UnitaryTransform) -> Result<Tensor3> {
    let (n1, n2) = slices.first().map(|s| s.shape()).ok_or_else(|| {
        Error::InvalidArgument("no slices given".into())
    })?;
    if slices.iter().any(|s| s.shape() != (n1, n2)) {
        return Err(Error::DimensionMismatch("slices differ in shape".into()));
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidTensor("slices must be non-empty".into()));
    }
    t.apply_inverse(&Tensor3::from_slices(n1, n2, slices))
}

fn check_n3(a: &Tensor3, t: &UnitaryTransform) -> Result<()> {
    if a.n3() != t.n3() {
        return Err(Error::DimensionMismatch(format!(
            "tensor has n3 = {} but transform is {}-point",
            a.n3(),
            t.n3()
        )));
    }
    Ok(())
}

/// `a ⋄ b`: slice-wise matrix products in the transformed domain.
pub fn phi_product(a: &Tensor3, b: &Tensor3, t: &UnitaryTransform) -> Result<Tensor3> {
    check_n3(a, t)?;
    check_n3(b, t)?;
    if a.n2() != b.n1() {
        return Err(Error::DimensionMismatch(format!(
            "inner dimensions differ: {:?} ⋄ {:?}",
            a.dims(),
            b.dims()
        )));
    }
    let ha = transformed_slices(a, t)?;
    let hb = transformed_slices(b, t)?;
    let prod: Vec<DMatrix<C64>> = ha.par_iter().zip(hb.par_iter()).map(|(x, y)| x * y).collect();
    from_transformed_slices(&prod, t)
}

/// Conjugate transpose with respect to `Φ`: each transformed slice is
/// replaced by its adjoint.
pub fn conj_transpose(a: &Tensor3, t: &UnitaryTransform) -> Result<Tensor3> {
    check_n3(a, t)?;
    let h: Vec<DMatrix<C64>> = transformed_slices(a, t)?.iter().map(|s| s.adjoint()).collect();
    from_transformed_slices(&h, t)
}

/// `n × n × n3` tensor whose transformed slices are all the identity.
pub fn identity_tensor(n: usize, t: &UnitaryTransform) -> Result<Tensor3> {
    if n == 0 {
        return Err(Error::InvalidArgument("identity size must be positive".into()));
    }
    let slices = vec![DMatrix::<C64>::identity(n, n); t.n3()];
    from_transformed_slices(&slices, t)
}

/// Transformed multi-rank: the rank of every transformed frontal slice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiRank {
    ranks: Vec<usize>,
}

impl MultiRank {
    pub fn new(ranks: Vec<usize>) -> Self {
        Self { ranks }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// `Σ r_i`.
    pub fn sum(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// Transformed tubal rank, `max r_i`.
    pub fn tubal(&self) -> usize {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    /// Checks `r_i ≤ min(n1, n2)` and the slice count.
    pub fn validate_for(&self, n1: usize, n2: usize, n3: usize) -> Result<()> {
        if self.ranks.len() != n3 {
            return Err(Error::DimensionMismatch(format!(
                "{} ranks for {n3} slices",
                self.ranks.len()
            )));
        }
        let cap = n1.min(n2);
        if let Some((i, r)) = self.ranks.iter().enumerate().find(|(_, &r)| r > cap) {
            return Err(Error::InvalidArgument(format!(
                "rank {r} of slice {i} exceeds min(n1, n2) = {cap}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for MultiRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ranks.iter().map(|r| r.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for MultiRank {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad rank '{p}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(MultiRank::new)
    }
}

/// Skinny transformed tensor SVD `A = U ⋄ S ⋄ Vᴴ`.
///
/// `U` is `n1 × r × n3`, `S` is `r × r × n3` and `V` is `n2 × r × n3` with
/// `r` the transformed tubal rank. Slices whose rank is below `r` keep their
/// next singular vectors with explicit zero singular values, so every slice
/// has the same width and `Uᴴ ⋄ U = Vᴴ ⋄ V = I`. The zero tensor has `r = 0`
/// and no factors.
#[derive(Clone, Debug)]
pub struct TSVDFactors {
    dims: (usize, usize, usize),
    transform: UnitaryTransform,
    multi_rank: MultiRank,
    u_hat: Vec<DMatrix<C64>>,
    s_hat: Vec<Vec<f64>>,
    v_hat: Vec<DMatrix<C64>>,
    spatial: Option<(Tensor3, Tensor3, Tensor3)>,
}

impl TSVDFactors {
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn transform(&self) -> &UnitaryTransform {
        &self.transform
    }

    pub fn multi_rank(&self) -> &MultiRank {
        &self.multi_rank
    }

    /// Transformed tubal rank `r`, the common factor width.
    pub fn rank(&self) -> usize {
        self.multi_rank.tubal()
    }

    pub fn u(&self) -> Option<&Tensor3> {
        self.spatial.as_ref().map(|f| &f.0)
    }

    pub fn s(&self) -> Option<&Tensor3> {
        self.spatial.as_ref().map(|f| &f.1)
    }

    pub fn v(&self) -> Option<&Tensor3> {
        self.spatial.as_ref().map(|f| &f.2)
    }

    /// Diagonal of transformed slice `k` of `S` (length `r`).
    pub fn singular_values(&self, k: usize) -> &[f64] {
        &self.s_hat[k]
    }

    /// `U ⋄ S ⋄ Vᴴ`.
    pub fn reconstruct(&self) -> Result<Tensor3> {
        let (n1, n2, n3) = self.dims;
        if self.rank() == 0 {
            return Ok(Tensor3::zeros(n1, n2, n3));
        }
        let slices: Vec<DMatrix<C64>> = (0..n3)
            .into_par_iter()
            .map(|k| linalg::compose(&self.u_hat[k], &self.s_hat[k], &self.v_hat[k]))
            .collect();
        from_transformed_slices(&slices, &self.transform)
    }
}

fn slice_svds(a: &Tensor3, t: &UnitaryTransform) -> Result<Vec<MatSvd>> {
    check_n3(a, t)?;
    let hat = t.apply(a)?;
    (0..hat.n3())
        .into_par_iter()
        .map(|k| linalg::thin_svd(hat.frontal_slice(k)))
        .collect()
}

fn slice_singular_values(a: &Tensor3, t: &UnitaryTransform) -> Result<Vec<Vec<f64>>> {
    check_n3(a, t)?;
    let hat = t.apply(a)?;
    (0..hat.n3())
        .into_par_iter()
        .map(|k| linalg::singular_values(hat.frontal_slice(k)))
        .collect()
}

fn count_ranks(values: &[Vec<f64>], tol: f64) -> MultiRank {
    let smax = values.iter().flatten().copied().fold(0.0, f64::max);
    let cut = tol * smax;
    MultiRank::new(values.iter().map(|s| s.iter().filter(|&&x| x > cut).count()).collect())
}

/// Transformed tensor SVD at the default rank tolerance.
pub fn t_svd(a: &Tensor3, t: &UnitaryTransform) -> Result<TSVDFactors> {
    t_svd_with_tol(a, t, DEFAULT_RANK_TOL)
}

/// Transformed tensor SVD counting singular values above `tol · σ_max`.
pub fn t_svd_with_tol(a: &Tensor3, t: &UnitaryTransform, tol: f64) -> Result<TSVDFactors> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument("rank tolerance must be nonnegative".into()));
    }
    let svds = slice_svds(a, t)?;
    let values: Vec<Vec<f64>> = svds.iter().map(|s| s.s.clone()).collect();
    let multi_rank = count_ranks(&values, tol);
    let r = multi_rank.tubal();
    let (n1, n2, n3) = a.dims();
    let mut u_hat = Vec::with_capacity(n3);
    let mut s_hat = Vec::with_capacity(n3);
    let mut v_hat = Vec::with_capacity(n3);
    for (svd, &rk) in svds.into_iter().zip(multi_rank.as_slice()) {
        u_hat.push(svd.u.columns(0, r).into_owned());
        v_hat.push(svd.v.columns(0, r).into_owned());
        s_hat.push((0..r).map(|c| if c < rk { svd.s[c] } else { 0.0 }).collect::<Vec<_>>());
    }
    let spatial = if r == 0 {
        None
    } else {
        let s_slices: Vec<DMatrix<C64>> = s_hat
            .iter()
            .map(|s| DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(r, s.iter().map(|&x| C64::new(x, 0.0)))))
            .collect();
        Some((
            from_transformed_slices(&u_hat, t)?,
            from_transformed_slices(&s_slices, t)?,
            from_transformed_slices(&v_hat, t)?,
        ))
    };
    Ok(TSVDFactors { dims: (n1, n2, n3), transform: t.clone(), multi_rank, u_hat, s_hat, v_hat, spatial })
}

/// Ranks of the transformed slices, counting singular values above
/// `tol · (largest singular value over all slices)`.
pub fn multi_rank(a: &Tensor3, t: &UnitaryTransform, tol: f64) -> Result<MultiRank> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument("rank tolerance must be nonnegative".into()));
    }
    Ok(count_ranks(&slice_singular_values(a, t)?, tol))
}

/// Transformed tensor nuclear norm: the sum of the nuclear norms of the
/// transformed slices.
pub fn ttnn(a: &Tensor3, t: &UnitaryTransform) -> Result<f64> {
    Ok(slice_singular_values(a, t)?.iter().flatten().sum())
}

/// Spectral norm of the block-diagonal transformed matrix.
pub fn spectral_norm(a: &Tensor3, t: &UnitaryTransform) -> Result<f64> {
    Ok(slice_singular_values(a, t)?.iter().flatten().copied().fold(0.0, f64::max))
}

/// Proximal map of `tau · TTNN`: soft-thresholds the singular values of every
/// transformed slice by `tau`.
pub fn svt_prox(w: &Tensor3, t: &UnitaryTransform, tau: f64) -> Result<Tensor3> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidArgument(format!("threshold must be positive, got {tau}")));
    }
    check_n3(w, t)?;
    let hat = t.apply(w)?;
    let (n1, n2, n3) = w.dims();
    let slices: Vec<DMatrix<C64>> = (0..n3)
        .into_par_iter()
        .map(|k| -> Result<DMatrix<C64>> {
            let svd = linalg::thin_svd(hat.frontal_slice(k))?;
            let keep = svd.s.iter().take_while(|&&s| s > tau).count();
            if keep == 0 {
                return Ok(DMatrix::zeros(n1, n2));
            }
            let shrunk: Vec<f64> = svd.s[..keep].iter().map(|s| s - tau).collect();
            Ok(linalg::compose(
                &svd.u.columns(0, keep).into_owned(),
                &shrunk,
                &svd.v.columns(0, keep).into_owned(),
            ))
        })
        .collect::<Result<_>>()?;
    from_transformed_slices(&slices, t)
}

/// The tensor bases used by the incoherence conditions. Indices are zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// `n × 1 × n3` with a one at `(i, 0, k)`.
    Column { i: usize, k: usize },
    /// `1 × 1 × n3` with a one at `(0, 0, k)`.
    Tube { k: usize },
    /// `1 × 1 × n3` tube whose transformed entries are `1 / conj(Φ[j, k])`
    /// where `Φ[j, k] ≠ 0` and zero elsewhere. With this choice
    /// `Column{i,k} ⋄ TransformedTube{k} ⋄ Column{j,k}ᴴ` is the unit tensor
    /// `E_ijk` for every unitary `Φ`.
    TransformedTube { k: usize },
}

/// Entries of `Φ` below this modulus are treated as zero by
/// [`Basis::TransformedTube`].
pub const TUBE_ZERO_TOL: f64 = 1e-12;

/// Builds a basis tensor; `n` is the row count of a column basis and is
/// ignored for tubes.
pub fn basis(kind: Basis, n: usize, t: &UnitaryTransform) -> Result<Tensor3> {
    let n3 = t.n3();
    let check_k = |k: usize| {
        if k >= n3 {
            Err(Error::IndexOutOfRange(format!("slice index {k} with n3 = {n3}")))
        } else {
            Ok(())
        }
    };
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match kind {
        Basis::Column { i, k } => {
            check_k(k)?;
            if i >= n {
                return Err(Error::IndexOutOfRange(format!("row index {i} with n = {n}")));
            }
            Ok(Tensor3::from_fn(n, 1, n3, |a, _, c| if a == i && c == k { one } else { zero }))
        }
        Basis::Tube { k } => {
            check_k(k)?;
            Ok(Tensor3::from_fn(1, 1, n3, |_, _, c| if c == k { one } else { zero }))
        }
        Basis::TransformedTube { k } => {
            check_k(k)?;
            let col = t.matrix().column(k);
            let hat: Vec<C64> = col
                .iter()
                .map(|&p| if p.norm() > TUBE_ZERO_TOL { one / p.conj() } else { zero })
                .collect();
            t.apply_inverse(&Tensor3::from_parts((1, 1, n3), hat))
        }
    }
}

fn check_factor_dims(z: &Tensor3, f: &TSVDFactors) -> Result<()> {
    if z.dims() != f.dims {
        return Err(Error::DimensionMismatch(format!(
            "tensor {:?} vs factors of {:?}",
            z.dims(),
            f.dims
        )));
    }
    Ok(())
}

/// Orthogonal projection onto `T = {U ⋄ Yᴴ + W ⋄ Vᴴ}`:
/// `P_T(Z) = UUᴴZ + ZVVᴴ − UUᴴZVVᴴ` in Φ-products.
pub fn project_t(z: &Tensor3, f: &TSVDFactors) -> Result<Tensor3> {
    check_factor_dims(z, f)?;
    let (n1, n2, n3) = z.dims();
    if f.rank() == 0 {
        return Ok(Tensor3::zeros(n1, n2, n3));
    }
    let hat = transformed_slices(z, &f.transform)?;
    let out: Vec<DMatrix<C64>> = (0..n3)
        .into_par_iter()
        .map(|k| {
            let (u, v, zk) = (&f.u_hat[k], &f.v_hat[k], &hat[k]);
            // UUᴴZ + (Z − UUᴴZ)VVᴴ
            let left = u * (u.adjoint() * zk);
            let rest = zk - &left;
            left + (&rest * v) * v.adjoint()
        })
        .collect();
    from_transformed_slices(&out, &f.transform)
}

/// `P_T⊥(Z) = (I − UUᴴ) ⋄ Z ⋄ (I − VVᴴ)`.
pub fn project_t_perp(z: &Tensor3, f: &TSVDFactors) -> Result<Tensor3> {
    check_factor_dims(z, f)?;
    let (_, _, n3) = z.dims();
    if f.rank() == 0 {
        return Ok(z.clone());
    }
    let hat = transformed_slices(z, &f.transform)?;
    let out: Vec<DMatrix<C64>> = (0..n3)
        .into_par_iter()
        .map(|k| {
            let (u, v, zk) = (&f.u_hat[k], &f.v_hat[k], &hat[k]);
            let left = zk - u * (u.adjoint() * zk);
            &left - (&left * v) * v.adjoint()
        })
        .collect();
    from_transformed_slices(&out, &f.transform)
}

/// Incoherence of a set of t-SVD factors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Incoherence {
    /// Smallest `μ` satisfying both column and row conditions.
    pub raw: f64,
    /// `max_ik ‖Uᴴ ⋄ e_ik‖_F² · n1·n3 / Σr_i`.
    pub column: f64,
    /// `max_jk ‖Vᴴ ⋄ e_jk‖_F² · n2·n3 / Σr_i`.
    pub row: f64,
}

impl Incoherence {
    /// `max(raw, 1)`, the normalization under which the conditions are stated.
    pub fn mu(&self) -> f64 {
        self.raw.max(1.0)
    }
}

/// Incoherence parameter of the factors.
///
/// Uses `‖Uᴴ ⋄ e_ik‖_F² = Σ_l |Φ[l, k]|² · ‖row i of Û_l‖²`, which follows
/// from `Φ[e_ik]` having slice `l` equal to `Φ[l, k] · e_i`.
pub fn incoherence_mu(f: &TSVDFactors) -> Result<Incoherence> {
    let total = f.multi_rank.sum();
    if total == 0 {
        return Err(Error::InvalidArgument("incoherence is undefined for Σr_i = 0".into()));
    }
    let (n1, n2, n3) = f.dims;
    let phi = f.transform.matrix();
    let side = |hats: &[DMatrix<C64>], n: usize| -> f64 {
        // row energies per slice: e[l][i] = ‖row i of Û_l‖²
        let e: Vec<Vec<f64>> = hats
            .iter()
            .map(|m| (0..n).map(|i| m.row(i).norm_squared()).collect())
            .collect();
        let mut best = 0.0f64;
        for k in 0..n3 {
            for i in 0..n {
                let v: f64 = (0..n3).map(|l| phi[(l, k)].norm_sqr() * e[l][i]).sum();
                best = best.max(v);
            }
        }
        best * (n * n3) as f64 / total as f64
    };
    let column = side(&f.u_hat, n1);
    let row = side(&f.v_hat, n2);
    Ok(Incoherence { raw: column.max(row), column, row })
}

/// How pooled singular values are ordered before the cumulative cut in
/// [`truncated_multirank_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TruncationOrder {
    /// Largest first: the kept values carry a `ϖ` share of the mass.
    #[default]
    Descending,
    /// Smallest first, the literal reading of the truncation rule.
    Ascending,
}

/// Effective multi-rank keeping a `varpi` share of the singular-value mass.
pub fn truncated_multirank(a: &Tensor3, t: &UnitaryTransform, varpi: f64) -> Result<MultiRank> {
    truncated_multirank_with(a, t, varpi, TruncationOrder::Descending)
}

/// Pools the singular values of all transformed slices, sorts them, finds the
/// smallest `k` whose cumulative share reaches `varpi`, and counts per slice
/// the singular values at or above the `k`-th sorted value.
pub fn truncated_multirank_with(
    a: &Tensor3,
    t: &UnitaryTransform,
    varpi: f64,
    order: TruncationOrder,
) -> Result<MultiRank> {
    if !(varpi > 0.0 && varpi <= 1.0) {
        return Err(Error::InvalidArgument(format!("varpi must lie in (0, 1], got {varpi}")));
    }
    let values = slice_singular_values(a, t)?;
    let mut pooled: Vec<f64> = values.iter().flatten().copied().collect();
    match order {
        TruncationOrder::Descending => pooled.sort_by(|x, y| y.total_cmp(x)),
        TruncationOrder::Ascending => pooled.sort_by(|x, y| x.total_cmp(y)),
    }
    let total: f64 = pooled.iter().sum();
    if total == 0.0 {
        return Ok(MultiRank::new(vec![0; values.len()]));
    }
    let mut acc = 0.0;
    let mut cutoff = *pooled.last().expect("nonzero total");
    for &s in &pooled {
        acc += s;
        if acc / total >= varpi {
            cutoff = s;
            break;
        }
    }
    Ok(MultiRank::new(
        values.iter().map(|s| s.iter().filter(|&&x| x >= cutoff && x > 0.0).count()).collect(),
    ))
}
