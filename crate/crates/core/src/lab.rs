//! Synthetic instances, sampling models, sample-size bounds, recovery
//! experiments and image-quality metrics.

use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::algebra::{from_transformed_slices, MultiRank};
use crate::error::{Error, Result};
use crate::solver::{admm_complete, SampleSet, SolverConfig};
use crate::tensor::{ensure_same_dims, Tensor3, C64};
use crate::transform::{TransformKind, UnitaryTransform};

/// Relative error at or below which a recovery counts as a success.
pub const SUCCESS_REL: f64 = 1e-2;

/// Random tensor with prescribed transformed multi-rank.
///
/// Transformed slice `k` is the product of an `n1 × r_k` and an `r_k × n2`
/// matrix of real standard normal entries; the result is `Φᴴ` of those
/// slices, so it is complex whenever `Φ` is.
pub fn gen_synthetic(
    n1: usize,
    n2: usize,
    n3: usize,
    ranks: &MultiRank,
    t: &UnitaryTransform,
    seed: u64,
) -> Result<Tensor3> {
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(Error::InvalidArgument("dimensions must be positive".into()));
    }
    if t.n3() != n3 {
        return Err(Error::DimensionMismatch(format!("transform is {}-point, n3 = {n3}", t.n3())));
    }
    ranks.validate_for(n1, n2, n3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = |r: usize, c: usize| {
        DMatrix::<C64>::from_fn(r, c, |_, _| C64::new(StandardNormal.sample(&mut rng), 0.0))
    };
    let slices: Vec<DMatrix<C64>> = ranks
        .as_slice()
        .iter()
        .map(|&r| {
            let a = gauss(n1, r);
            let b = gauss(r, n2);
            a * b
        })
        .collect();
    from_transformed_slices(&slices, t)
}

fn check_dims(dims: (usize, usize, usize)) -> Result<usize> {
    let (n1, n2, n3) = dims;
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(Error::InvalidArgument(format!("dimensions must be positive, got {dims:?}")));
    }
    Ok(n1 * n2 * n3)
}

/// Exactly `m` distinct entries, uniform over all subsets of that size.
pub fn sample_uniform(dims: (usize, usize, usize), m: usize, seed: u64) -> Result<SampleSet> {
    let total = check_dims(dims)?;
    if m > total {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds the {total} entries")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mask = vec![false; total];
    for p in rand::seq::index::sample(&mut rng, total, m) {
        mask[p] = true;
    }
    Ok(SampleSet::from_mask(dims, mask, seed))
}

/// Each entry observed independently with probability `rho`.
pub fn sample_bernoulli(dims: (usize, usize, usize), rho: f64, seed: u64) -> Result<SampleSet> {
    let total = check_dims(dims)?;
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!("rho must lie in [0, 1], got {rho}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = (0..total).map(|_| rng.random_bool(rho)).collect();
    Ok(SampleSet::from_mask(dims, mask, seed))
}

/// Which rank measure a sample bound scales with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// `c · Σr_i · n · ln(n²)`.
    MultiRank,
    /// `c · r · n² · ln(n²)`.
    Tubal,
}

/// Parameters of a sample-size bound for an `n × n × n3` tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundSpec {
    constant: f64,
    kind: BoundKind,
    /// `Σr_i` for [`BoundKind::MultiRank`], the tubal rank otherwise.
    rank: usize,
    n: usize,
}

impl BoundSpec {
    pub fn new(constant: f64, kind: BoundKind, rank: usize, n: usize) -> Result<Self> {
        if !(constant > 0.0 && constant.is_finite()) {
            return Err(Error::InvalidArgument(format!("bound constant must be positive, got {constant}")));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        Ok(Self { constant, kind, rank, n })
    }

    pub fn multirank(constant: f64, sum_rank: usize, n: usize) -> Result<Self> {
        Self::new(constant, BoundKind::MultiRank, sum_rank, n)
    }

    pub fn tubal(constant: f64, tubal_rank: usize, n: usize) -> Result<Self> {
        Self::new(constant, BoundKind::Tubal, tubal_rank, n)
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Sample count required by the bound, rounded up (natural logarithm).
pub fn bound_samples(spec: &BoundSpec) -> u64 {
    let n = spec.n as f64;
    let log = (n * n).ln();
    let size = match spec.kind {
        BoundKind::MultiRank => n,
        BoundKind::Tubal => n * n,
    };
    (spec.constant * spec.rank as f64 * size * log).ceil() as u64
}

/// General recovery bound `c0 · μ · Σr_i · n_max · ln(n_max · n3)` for an
/// `n1 × n2 × n3` tensor, where `n_max = max(n1, n2)`.
pub fn recovery_bound(c0: f64, mu: f64, sum_rank: usize, dims: (usize, usize, usize)) -> f64 {
    let n = dims.0.max(dims.1) as f64;
    c0 * mu * sum_rank as f64 * n * (n * dims.2 as f64).ln()
}

/// `‖est − reference‖_F / ‖reference‖_F`.
pub fn rel_error(est: &Tensor3, reference: &Tensor3) -> Result<f64> {
    ensure_same_dims(est, reference)?;
    let denom = reference.frobenius_norm();
    if denom == 0.0 {
        return Err(Error::InvalidArgument("relative error against a zero reference".into()));
    }
    Ok((est - reference).frobenius_norm() / denom)
}

fn real_range(t: &Tensor3) -> (f64, f64) {
    t.as_slice()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.re), hi.max(z.re)))
}

/// Peak signal-to-noise ratio in dB,
/// `10·log10(N · (max − min)² / ‖est − reference‖_F²)` with the peak taken
/// over the real parts of `reference`. Returns `f64::INFINITY` when the two
/// tensors are equal.
pub fn psnr(est: &Tensor3, reference: &Tensor3) -> Result<f64> {
    ensure_same_dims(est, reference)?;
    let (lo, hi) = real_range(reference);
    if !(hi > lo) {
        return Err(Error::InvalidArgument("PSNR needs a non-constant reference".into()));
    }
    let err = (est - reference).frobenius_norm().powi(2);
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    let peak = (hi - lo).powi(2);
    Ok(10.0 * (reference.len() as f64 * peak / err).log10())
}

/// Mean over frontal slices of the global-statistics SSIM of the real parts.
///
/// Each slice uses its whole-image means, variances and covariance with
/// `c1 = (0.01 L)²`, `c2 = (0.03 L)²` and `L` the range of `reference`. A
/// slice pair whose formula is `0/0` (both constant zero with `L = 0`)
/// counts as identical.
pub fn ssim(est: &Tensor3, reference: &Tensor3) -> Result<f64> {
    ensure_same_dims(est, reference)?;
    let (lo, hi) = real_range(reference);
    let l = hi - lo;
    let c1 = (0.01 * l).powi(2);
    let c2 = (0.03 * l).powi(2);
    let (n1, n2, n3) = reference.dims();
    let area = n1 * n2;
    let mut total = 0.0;
    for k in 0..n3 {
        let x: Vec<f64> = est.as_slice()[k * area..(k + 1) * area].iter().map(|z| z.re).collect();
        let y: Vec<f64> = reference.as_slice()[k * area..(k + 1) * area].iter().map(|z| z.re).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / area as f64;
        let (mx, my) = (mean(&x), mean(&y));
        let cov = |a: &[f64], ma: f64, b: &[f64], mb: f64| {
            a.iter().zip(b).map(|(p, q)| (p - ma) * (q - mb)).sum::<f64>() / area as f64
        };
        let (vx, vy, vxy) = (cov(&x, mx, &x, mx), cov(&y, my, &y, my), cov(&x, mx, &y, my));
        let num = (2.0 * mx * my + c1) * (2.0 * vxy + c2);
        let den = (mx * mx + my * my + c1) * (vx + vy + c2);
        total += if den == 0.0 { 1.0 } else { num / den };
    }
    Ok(total / n3 as f64)
}

/// Spreads `sum` over `n3` slices as evenly as possible with every entry at
/// most `min(tubal, cap)`. The first slices take the larger shares.
pub fn even_rank_profile(sum: usize, tubal: usize, n3: usize, cap: usize) -> Result<MultiRank> {
    let limit = tubal.min(cap);
    if n3 == 0 || sum > limit * n3 {
        return Err(Error::InvalidArgument(format!(
            "cannot place Σr = {sum} over {n3} slices with ranks at most {limit}"
        )));
    }
    let (base, extra) = (sum / n3, sum % n3);
    Ok(MultiRank::new((0..n3).map(|k| base + usize::from(k < extra)).collect()))
}

/// One solve of a recovery experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub ranks: MultiRank,
    pub transform: String,
    pub constant: f64,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub rel: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub iterations: usize,
    pub eta: f64,
    pub wall_seconds: f64,
    pub success: bool,
}

/// Grid and solver settings of [`run_phase_experiment`].
#[derive(Clone, Debug)]
pub struct PhaseConfig {
    /// Side lengths; instances are `n × n × n3`.
    pub n_list: Vec<usize>,
    /// Third dimension; `None` uses `n`.
    pub n3: Option<usize>,
    pub sum_rank: usize,
    pub tubal: usize,
    /// Transforms to solve under; [`TransformKind::Custom`] is not supported.
    pub transforms: Vec<TransformKind>,
    /// Multiples of the multi-rank bound to sample.
    pub const_list: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl Default for PhaseConfig {
    fn default() -> Self {
        Self {
            n_list: vec![20],
            n3: None,
            sum_rank: 10,
            tubal: 5,
            transforms: vec![TransformKind::Fft],
            const_list: vec![1.0],
            trials: 5,
            seed: 0,
            solver: SolverConfig::default(),
        }
    }
}

/// Seed of trial `trial` derived from the experiment seed.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng.next_u64()
}

/// One synthetic recovery problem and its solve.
pub struct Trial<'a> {
    pub n: usize,
    pub n3: usize,
    pub ranks: &'a MultiRank,
    pub transform: TransformKind,
    pub constant: f64,
    pub trial: usize,
    pub seed: u64,
    pub solver: &'a SolverConfig,
}

fn fixed_transform(kind: TransformKind, n3: usize) -> Result<UnitaryTransform> {
    match kind {
        TransformKind::Fft => Ok(UnitaryTransform::fft(n3)),
        TransformKind::Dct => Ok(UnitaryTransform::dct(n3)),
        TransformKind::Data | TransformKind::Custom => Err(Error::InvalidArgument(format!(
            "no fixed {} transform for experiments",
            kind.label()
        ))),
    }
}

impl Trial<'_> {
    /// Generates the instance from `seed`, samples `⌈c · bound⌉` entries
    /// (clamped to the tensor size) and solves.
    ///
    /// For the data-driven transform, the transform is first learned from a
    /// pilot instance generated under the DCT; the trial instance is then
    /// generated under the learned transform and solved with it.
    pub fn run(&self) -> Result<ExperimentRecord> {
        let (n, n3) = (self.n, self.n3);
        let t = match self.transform {
            TransformKind::Data => {
                let pilot_seed = trial_seed(self.seed, 2);
                let pilot = gen_synthetic(n, n, n3, self.ranks, &UnitaryTransform::dct(n3), pilot_seed)?;
                UnitaryTransform::data_driven(&pilot)?
            }
            kind => fixed_transform(kind, n3)?,
        };
        let truth = gen_synthetic(n, n, n3, self.ranks, &t, self.seed)?;
        let bound = BoundSpec::multirank(self.constant, self.ranks.sum(), n)?;
        let m = (bound_samples(&bound) as usize).min(n * n * n3);
        let sample_seed = trial_seed(self.seed, 1);
        let omega = sample_uniform(truth.dims(), m, sample_seed)?;
        let report = admm_complete(&truth, &omega, &t, self.solver)?;
        let rel = rel_error(&report.z, &truth)?;
        Ok(ExperimentRecord {
            n1: n,
            n2: n,
            n3,
            ranks: self.ranks.clone(),
            transform: self.transform.label().to_string(),
            constant: self.constant,
            m,
            trial: self.trial,
            seed: self.seed,
            rel,
            psnr: psnr(&report.z, &truth)?,
            ssim: ssim(&report.z, &truth)?,
            iterations: report.iterations,
            eta: report.final_kkt().eta,
            wall_seconds: report.wall_seconds,
            success: rel <= SUCCESS_REL,
        })
    }
}

/// Recovery experiment over `n × const × transform × trial`.
///
/// Trial `t` of every grid point uses the instance seed
/// [`trial_seed`]`(cfg.seed, t)`, so all grid points share instances where
/// the shapes agree. Records come back in grid order (`n`, then transform,
/// then constant, then trial) whatever the scheduling.
pub fn run_phase_experiment(cfg: &PhaseConfig) -> Result<Vec<ExperimentRecord>> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    cfg.solver.validate()?;
    let mut jobs = Vec::new();
    for &n in &cfg.n_list {
        let n3 = cfg.n3.unwrap_or(n);
        let ranks = even_rank_profile(cfg.sum_rank, cfg.tubal, n3, n)?;
        for &transform in &cfg.transforms {
            if transform == TransformKind::Custom {
                return Err(Error::InvalidArgument("custom transforms are not supported in experiments".into()));
            }
            for &constant in &cfg.const_list {
                BoundSpec::multirank(constant, cfg.sum_rank, n)?;
                for trial in 0..cfg.trials {
                    jobs.push((n, n3, ranks.clone(), transform, constant, trial));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|(n, n3, ranks, transform, constant, trial)| {
            Trial {
                n: *n,
                n3: *n3,
                ranks,
                transform: *transform,
                constant: *constant,
                trial: *trial,
                seed: trial_seed(cfg.seed, *trial),
                solver: &cfg.solver,
            }
            .run()
        })
        .collect()
}

/// Success counts of one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub n: usize,
    pub transform: String,
    pub constant: f64,
    pub successes: usize,
    pub trials: usize,
}

impl PhasePoint {
    /// Every trial recovered.
    pub fn success(&self) -> bool {
        self.successes == self.trials
    }
}

/// Groups records by `(n, transform, constant)` in first-seen order.
pub fn aggregate(records: &[ExperimentRecord]) -> Vec<PhasePoint> {
    let mut points: Vec<PhasePoint> = Vec::new();
    for r in records {
        let pos = points
            .iter()
            .position(|p| p.n == r.n1 && p.transform == r.transform && p.constant == r.constant);
        let p = match pos {
            Some(i) => &mut points[i],
            None => {
                points.push(PhasePoint {
                    n: r.n1,
                    transform: r.transform.clone(),
                    constant: r.constant,
                    successes: 0,
                    trials: 0,
                });
                points.last_mut().expect("just pushed")
            }
        };
        p.trials += 1;
        p.successes += usize::from(r.success);
    }
    points
}
