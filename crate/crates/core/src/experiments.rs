//! Planted-signal denoising experiments.
//!
//! A unit-norm signal inside im(D_n) is corrupted with noise of expected unit norm,
//! filtered with `(I + gamma Q_n(z))^{-1}` over a grid of `(z, gamma)`, and scored by
//! the error relative to the unfiltered noisy signal.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::complex::SimplicialComplex2;
use crate::error::{Error, Result};
use crate::filters::{build_regularizer, Filter, Regularizer};
use crate::operators::{DiracOperator, NormalizationMode, SimplicialSignal};
use crate::scalar::Scalar;
use crate::spectral::{Alignment, SpectralBasis, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    /// Random combination of the eigenvectors of im(D_n) with the alignment opposite
    /// to the planted signal.
    OppositeSymmetry,
    /// Isotropic Gaussian inside im(D_n).
    GaussianSubspace,
}

impl NoiseKind {
    pub fn label(self) -> &'static str {
        match self {
            NoiseKind::OppositeSymmetry => "opposite",
            NoiseKind::GaussianSubspace => "gaussian",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub variant: Variant,
    /// Alignment of the planted signal; opposite-symmetry noise uses the other one.
    pub signal_alignment: Alignment,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, variant: Variant, seed: u64) -> Self {
        Self { kind, variant, signal_alignment: Alignment::Anti, seed }
    }
}

/// Draws noise with `E ||eps||^2 = 1`.
pub fn sample_noise<T: Scalar>(basis: &SpectralBasis<T>, spec: &NoiseSpec) -> Result<SimplicialSignal<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let eps = draw_noise(basis, spec.kind, spec.variant, spec.signal_alignment, &mut rng)?;
    SimplicialSignal::from_vector(basis.dims(), eps)
}

fn draw_noise<T: Scalar, R: Rng>(
    basis: &SpectralBasis<T>,
    kind: NoiseKind,
    variant: Variant,
    signal_alignment: Alignment,
    rng: &mut R,
) -> Result<DVector<T>> {
    if basis.subspace_dim(variant) == 0 {
        return Err(Error::EmptySubspace(variant.index()));
    }
    let phi = match kind {
        NoiseKind::OppositeSymmetry => {
            if signal_alignment == Alignment::Harmonic {
                return Err(Error::InvalidParameter("harmonic signals have no opposite symmetry".into()));
            }
            basis.block(variant, signal_alignment.opposite()).clone()
        }
        NoiseKind::GaussianSubspace => basis.phi(variant),
    };
    // per-coefficient variance 1/k over k orthonormal columns
    let std = 1.0 / (phi.ncols() as f64).sqrt();
    let x = DVector::from_fn(phi.ncols(), |_, _| {
        let g: f64 = rng.sample(StandardNormal);
        T::lit(g * std)
    });
    Ok(phi * x)
}

/// `||s_true - s_hat|| / ||s_true - s_tilde||`.
pub fn relative_error<T: Scalar>(
    s_true: &SimplicialSignal<T>,
    s_tilde: &SimplicialSignal<T>,
    s_hat: &SimplicialSignal<T>,
) -> Result<T> {
    s_tilde.check_dims(s_true.dims())?;
    s_hat.check_dims(s_true.dims())?;
    let denom = (s_true.as_vector() - s_tilde.as_vector()).norm();
    if denom == T::zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok((s_true.as_vector() - s_hat.as_vector()).norm() / denom)
}

/// `n` points log-spaced between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
        }
    }
}

/// 40 log-spaced values in `[1e-2, 1e2]`.
pub fn default_gamma_grid() -> Vec<f64> {
    log_grid(1e-2, 1e2, 40)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub gamma_grid: Vec<f64>,
    pub z_values: Vec<f64>,
    pub realizations: usize,
    pub variant: Variant,
    pub noise: NoiseKind,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            gamma_grid: default_gamma_grid(),
            z_values: vec![-0.95, 0.0, 0.95],
            realizations: 50,
            variant: Variant::D1,
            noise: NoiseKind::OppositeSymmetry,
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gamma_grid.is_empty() {
            return Err(Error::InvalidParameter("gamma grid is empty".into()));
        }
        if let Some(g) = self.gamma_grid.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter(format!("gamma must be finite and >= 0, got {g}")));
        }
        if self.z_values.is_empty() {
            return Err(Error::InvalidParameter("no z values".into()));
        }
        if let Some(z) = self.z_values.iter().find(|z| !(z.abs() < 1.0)) {
            return Err(Error::InvalidParameter(format!("|z| must be < 1, got {z}")));
        }
        if self.realizations == 0 {
            return Err(Error::InvalidParameter("realizations must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorPoint {
    pub z: f64,
    pub gamma: f64,
    pub mean_delta: f64,
    /// Sample standard deviation over realizations (zero for a single realization).
    pub std_delta: f64,
}

/// Mean and spread of the relative error for every `(z, gamma)`, z-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurve {
    pub points: Vec<ErrorPoint>,
    pub realizations: usize,
}

impl ErrorCurve {
    pub fn for_z(&self, z: f64) -> impl Iterator<Item = &ErrorPoint> {
        self.points.iter().filter(move |p| p.z == z)
    }

    /// Smallest mean error over the gamma grid for this `z`.
    pub fn min_mean(&self, z: f64) -> Option<f64> {
        self.for_z(z).map(|p| p.mean_delta).min_by(f64::total_cmp)
    }

    /// Mean error at the largest gamma for this `z`.
    pub fn mean_at_largest_gamma(&self, z: f64) -> Option<f64> {
        self.for_z(z).max_by(|a, b| a.gamma.total_cmp(&b.gamma)).map(|p| p.mean_delta)
    }
}

/// Per-realization stream derived from the master seed. Depends only on the index,
/// never on scheduling.
fn realization_rng(master_seed: u64, realization: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(realization as u64);
    rng
}

/// Denoising of the extremal anti-aligned eigenvector of `D_n` on an unweighted,
/// spectrally normalized operator.
pub fn run_experiment<T: Scalar>(complex: &SimplicialComplex2, config: &ExperimentConfig) -> Result<ErrorCurve> {
    config.validate()?;
    let op = DiracOperator::<T>::unweighted(complex, NormalizationMode::Spectral)?;
    let basis = SpectralBasis::compute(&op)?;
    let planted = basis.planted_eigenvector(config.variant)?;
    run_planted(&op, &basis, &planted, Alignment::Anti, config)
}

/// Denoising of an arbitrary clean signal whose dominant symmetry is `alignment`.
pub fn run_planted<T: Scalar>(
    op: &DiracOperator<T>,
    basis: &SpectralBasis<T>,
    planted: &SimplicialSignal<T>,
    alignment: Alignment,
    config: &ExperimentConfig,
) -> Result<ErrorCurve> {
    config.validate()?;
    planted.check_dims(op.dims())?;
    let s = planted.as_vector();
    let r = config.realizations;

    let noises: Vec<DVector<T>> = (0..r)
        .into_par_iter()
        .map(|i| {
            let mut rng = realization_rng(config.master_seed, i);
            draw_noise(basis, config.noise, config.variant, alignment, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mut noisy = DMatrix::zeros(op.size(), r);
    let mut denominators = Vec::with_capacity(r);
    for (i, eps) in noises.iter().enumerate() {
        noisy.set_column(i, &(s + eps));
        let d = eps.norm();
        if d == T::zero() {
            return Err(Error::ZeroDenominator);
        }
        denominators.push(d);
    }

    let regularizers: Vec<DMatrix<T>> = config
        .z_values
        .iter()
        .map(|z| build_regularizer(op, &Regularizer::dirac(config.variant, T::lit(*z))?))
        .collect::<Result<_>>()?;

    let grid: Vec<(usize, f64)> = (0..config.z_values.len())
        .flat_map(|zi| config.gamma_grid.iter().map(move |g| (zi, *g)))
        .collect();
    let deltas: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&(zi, gamma)| {
            let filter = Filter::from_regularizer(&regularizers[zi], T::lit(gamma))?;
            let filtered = filter.apply_columns(&noisy);
            Ok(filtered
                .column_iter()
                .zip(&denominators)
                .map(|(hat, d)| ((s - hat).norm() / *d).as_f64())
                .collect())
        })
        .collect::<Result<_>>()?;

    let points = grid
        .iter()
        .zip(&deltas)
        .map(|(&(zi, gamma), d)| {
            let (mean, std) = mean_std(d);
            ErrorPoint { z: config.z_values[zi], gamma, mean_delta: mean, std_delta: std }
        })
        .collect();
    Ok(ErrorCurve { points, realizations: r })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Full signal consistent with an observed edge flow: `s = (sigma + D sigma) / ||.||`.
///
/// The node block is `B1 sigma`, the edge block `sigma` and the triangle block `B2^T sigma`.
pub fn drifter_total_signal<T: Scalar>(op: &DiracOperator<T>, sigma: &DVector<T>) -> Result<SimplicialSignal<T>> {
    let dims = op.dims();
    if sigma.len() != dims.edges {
        return Err(Error::DimensionMismatch { what: "edge flow length", expected: dims.edges, actual: sigma.len() });
    }
    if sigma.iter().all(|v| *v == T::zero()) {
        return Err(Error::ZeroFlow);
    }
    let nodes = DMatrix::from(op.b1()) * sigma;
    let tris = DMatrix::from(op.b2()).transpose() * sigma;
    let s = SimplicialSignal::from_blocks(&nodes, sigma, &tris);
    let norm = s.norm();
    Ok(s.with_data(s.as_vector() / norm))
}

/// Component of the drifter signal inside im(D_n), renormalized to unit norm.
pub fn drifter_planted<T: Scalar>(
    op: &DiracOperator<T>,
    basis: &SpectralBasis<T>,
    sigma: &DVector<T>,
    variant: Variant,
) -> Result<SimplicialSignal<T>> {
    let total = drifter_total_signal(op, sigma)?;
    let part = basis.decompose(&total)?.component(variant.into()).clone();
    let norm = part.norm();
    if !(norm > T::lit(T::RANK_TOLERANCE)) {
        return Err(Error::EmptySubspace(variant.index()));
    }
    Ok(part.with_data(part.as_vector() / norm))
}

/// Drifter-style experiment: the clean signal is built from an edge flow and treated
/// as aligned, so opposite-symmetry noise is anti-aligned.
pub fn run_drifter_experiment<T: Scalar>(
    complex: &SimplicialComplex2,
    sigma: &DVector<T>,
    config: &ExperimentConfig,
) -> Result<ErrorCurve> {
    config.validate()?;
    let op = DiracOperator::<T>::unweighted(complex, NormalizationMode::Spectral)?;
    let basis = SpectralBasis::compute(&op)?;
    let planted = drifter_planted(&op, &basis, sigma, config.variant)?;
    run_planted(&op, &basis, &planted, Alignment::Aligned, config)
}

/// Smooth synthetic edge flow on [`crate::complex::grid_complex`]: a vortex around the
/// grid centre plus a uniform drift, integrated along each edge, with a small seeded
/// perturbation.
pub fn synthetic_grid_flow(complex: &SimplicialComplex2, rows: usize, cols: usize, seed: u64) -> Result<DVector<f64>> {
    if complex.num_vertices() != rows * cols {
        return Err(Error::DimensionMismatch {
            what: "grid vertex count",
            expected: rows * cols,
            actual: complex.num_vertices(),
        });
    }
    let pos = |v: usize| ((v % cols) as f64, (v / cols) as f64);
    let (cx, cy) = ((cols - 1) as f64 / 2.0, (rows - 1) as f64 / 2.0);
    let width = (rows.min(cols) as f64 / 3.0).powi(2).max(1.0);
    let field = |x: f64, y: f64| {
        let (dx, dy) = (x - cx, y - cy);
        let w = (-(dx * dx + dy * dy) / width).exp();
        (0.3 - dy * w, 0.1 + dx * w)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(DVector::from_iterator(
        complex.num_edges(),
        complex.edges().iter().map(|&[a, b]| {
            let ((xa, ya), (xb, yb)) = (pos(a), pos(b));
            let (fx, fy) = field((xa + xb) / 2.0, (ya + yb) / 2.0);
            let jitter: f64 = rng.sample(StandardNormal);
            fx * (xb - xa) + fy * (yb - ya) + 0.05 * jitter
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{grid_complex, ngf_generate, NgfConfig};

    fn setup(t: usize) -> (DiracOperator<f64>, SpectralBasis<f64>) {
        let c = ngf_generate(&NgfConfig::new(t, 21)).unwrap();
        let op = DiracOperator::unweighted(&c, NormalizationMode::Spectral).unwrap();
        let b = SpectralBasis::compute(&op).unwrap();
        (op, b)
    }

    #[test]
    fn relative_error_cases() {
        let dims = crate::operators::BlockDims::new(2, 1, 0);
        let mk = |v: [f64; 3]| SimplicialSignal::from_vector(dims, DVector::from_row_slice(&v)).unwrap();
        let truth = mk([1.0, 0.0, 0.0]);
        let noisy = mk([1.0, 2.0, -1.0]);
        assert_eq!(relative_error(&truth, &noisy, &noisy).unwrap(), 1.0);
        assert_eq!(relative_error(&truth, &noisy, &truth).unwrap(), 0.0);
        let mid = mk([1.0, 1.0, -0.5]);
        assert!((relative_error(&truth, &noisy, &mid).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(relative_error(&truth, &truth, &noisy), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn opposite_noise_lives_in_aligned_block() {
        let (_, b) = setup(20);
        for variant in [Variant::D1, Variant::D2] {
            let eps = sample_noise(&b, &NoiseSpec::new(NoiseKind::OppositeSymmetry, variant, 4)).unwrap();
            let anti = b.block(variant, Alignment::Anti);
            assert!((anti.transpose() * eps.as_vector()).norm() < 1e-12);
            assert!(eps.norm() > 0.0);
        }
    }

    #[test]
    fn noise_is_seeded() {
        let (_, b) = setup(12);
        let spec = NoiseSpec::new(NoiseKind::GaussianSubspace, Variant::D2, 77);
        assert_eq!(sample_noise(&b, &spec).unwrap(), sample_noise(&b, &spec).unwrap());
        let other = NoiseSpec { seed: 78, ..spec };
        assert_ne!(sample_noise(&b, &spec).unwrap(), sample_noise(&b, &other).unwrap());
    }

    #[test]
    fn gaussian_noise_has_unit_expected_energy() {
        // Monte-Carlo: mean of ||eps||^2 over 10^4 draws within 0.05 of 1
        let (_, b) = setup(15);
        for kind in [NoiseKind::GaussianSubspace, NoiseKind::OppositeSymmetry] {
            let mut rng = ChaCha8Rng::seed_from_u64(2024);
            let n = 10_000;
            let total: f64 = (0..n)
                .map(|_| draw_noise(&b, kind, Variant::D1, Alignment::Anti, &mut rng).unwrap().norm_squared())
                .sum();
            let mean = total / n as f64;
            assert!((mean - 1.0).abs() < 0.05, "{kind:?}: {mean}");
        }
    }

    #[test]
    fn empty_subspace_noise() {
        let c = SimplicialComplex2::build([[0, 1], [1, 2]]).unwrap();
        let op = DiracOperator::<f64>::unweighted(&c, NormalizationMode::Spectral).unwrap();
        let b = SpectralBasis::compute(&op).unwrap();
        let spec = NoiseSpec::new(NoiseKind::GaussianSubspace, Variant::D2, 0);
        assert!(matches!(sample_noise(&b, &spec), Err(Error::EmptySubspace(2))));
    }

    #[test]
    fn zero_gamma_gives_unit_error() {
        let c = ngf_generate(&NgfConfig::new(10, 1)).unwrap();
        let cfg = ExperimentConfig { gamma_grid: vec![0.0], realizations: 3, ..Default::default() };
        let curve = run_experiment::<f64>(&c, &cfg).unwrap();
        assert_eq!(curve.points.len(), 3);
        assert!(curve.points.iter().all(|p| p.mean_delta == 1.0 && p.std_delta == 0.0));
    }

    #[test]
    fn config_validation() {
        let c = ngf_generate(&NgfConfig::new(5, 1)).unwrap();
        for cfg in [
            ExperimentConfig { gamma_grid: vec![], ..Default::default() },
            ExperimentConfig { realizations: 0, ..Default::default() },
            ExperimentConfig { z_values: vec![1.0], ..Default::default() },
            ExperimentConfig { gamma_grid: vec![-1.0], ..Default::default() },
        ] {
            assert!(matches!(run_experiment::<f64>(&c, &cfg), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn drifter_blocks() {
        let c = SimplicialComplex2::build([[0, 1, 2]]).unwrap();
        let op = DiracOperator::<f64>::unweighted(&c, NormalizationMode::None).unwrap();
        let sigma = DVector::from_vec(vec![0.3, -1.2, 0.7]);
        let s = drifter_total_signal(&op, &sigma).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-14);
        // edge block is sigma rescaled by the same factor as the other blocks
        let k = s.edge_block()[0] / sigma[0];
        assert!((s.edge_block() - &sigma * k).amax() < 1e-14);
        let b1 = DMatrix::from(op.b1());
        assert!((s.node_block() - b1 * &sigma * k).amax() < 1e-14);

        let curl = DMatrix::from(op.b2()).column(0).into_owned();
        let s = drifter_total_signal(&op, &curl).unwrap();
        assert!(s.node_block().amax() < 1e-15);

        assert!(matches!(drifter_total_signal(&op, &DVector::zeros(3)), Err(Error::ZeroFlow)));
        assert!(drifter_total_signal(&op, &DVector::zeros(2)).is_err());
    }

    #[test]
    fn drifter_planted_is_unit_and_in_subspace() {
        let g = grid_complex(4, 4).unwrap();
        let sigma = synthetic_grid_flow(&g, 4, 4, 1).unwrap();
        let op = DiracOperator::unweighted(&g, NormalizationMode::Spectral).unwrap();
        let b = SpectralBasis::compute(&op).unwrap();
        let s2 = drifter_planted(&op, &b, &sigma, Variant::D2).unwrap();
        assert!((s2.norm() - 1.0).abs() < 1e-12);
        let d = b.decompose(&s2).unwrap();
        assert!((d.s2.as_vector() - s2.as_vector()).norm() < 1e-10);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = default_gamma_grid();
        assert_eq!(g.len(), 40);
        assert!((g[0] - 1e-2).abs() < 1e-15 && (g[39] - 1e2).abs() < 1e-10);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
