//! Dirac eigenstructure built from the singular value decompositions of the
//! boundary blocks.
//!
//! With `B1 = U1 S1 V1^T` and `B2 = U2 S2 V2^T` (reduced), the nonzero eigenpairs of
//! the Dirac operator are
//!
//! ```text
//!   [U1; +V1; 0] / sqrt 2  -> +S1        [0; U2; +V2] / sqrt 2  -> +S2
//!   [U1; -V1; 0] / sqrt 2  -> -S1        [0; U2; -V2] / sqrt 2  -> -S2
//! ```
//!
//! Positive eigenvalues belong to aligned signals (the upper block is the boundary of
//! the lower one up to a positive factor), negative eigenvalues to anti-aligned ones.
//! The kernel is assembled from the kernels of the three Hodge Laplacians.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::complex::SimplicialComplex2;
use crate::error::{Error, Result};
use crate::operators::{BlockDims, DiracOperator, SimplicialSignal};
use crate::scalar::Scalar;

/// Which half of the split `D = D1 + D2` a filter or planted signal refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Node/edge coupling.
    D1,
    /// Edge/triangle coupling.
    D2,
}

impl Variant {
    pub fn from_index(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Variant::D1),
            2 => Ok(Variant::D2),
            other => Err(Error::InvalidParameter(format!("variant must be 1 or 2, got {other}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Variant::D1 => 1,
            Variant::D2 => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    D1,
    D2,
    Harmonic,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::D1 => "d1",
            Family::D2 => "d2",
            Family::Harmonic => "harm",
        }
    }
}

impl From<Variant> for Family {
    fn from(v: Variant) -> Self {
        match v {
            Variant::D1 => Family::D1,
            Variant::D2 => Family::D2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alignment {
    Aligned,
    Anti,
    Harmonic,
}

impl Alignment {
    pub fn label(self) -> &'static str {
        match self {
            Alignment::Aligned => "aligned",
            Alignment::Anti => "anti",
            Alignment::Harmonic => "harm",
        }
    }

    /// Aligned <-> anti-aligned; harmonic maps to itself.
    pub fn opposite(self) -> Self {
        match self {
            Alignment::Aligned => Alignment::Anti,
            Alignment::Anti => Alignment::Aligned,
            Alignment::Harmonic => Alignment::Harmonic,
        }
    }
}

/// Reduced SVD with singular values sorted in decreasing order and
/// sign-canonicalized singular vectors.
#[derive(Clone, Debug)]
pub struct ReducedSvd<T: Scalar> {
    pub u: DMatrix<T>,
    pub sigma: DVector<T>,
    pub v: DMatrix<T>,
}

impl<T: Scalar> ReducedSvd<T> {
    /// Numerical rank, i.e. the number of retained singular triplets.
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    fn empty(rows: usize, cols: usize) -> Self {
        Self { u: DMatrix::zeros(rows, 0), sigma: DVector::zeros(0), v: DMatrix::zeros(cols, 0) }
    }

    /// Drops singular triplets with `sigma <= rank_tol * sigma_max`. Tolerances below
    /// the solver resolution `eps * max(rows, cols)` are raised to it.
    pub fn compute(m: &DMatrix<T>, rank_tol: T) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows == 0 || cols == 0 {
            return Ok(Self::empty(rows, cols));
        }
        let (u, sigma, v) = jacobi_svd(m)?;

        let mut order: Vec<usize> = (0..sigma.len()).collect();
        // stable: equal singular values keep the solver's order
        order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap_or(std::cmp::Ordering::Equal));
        let sigma_max = order.first().map(|&i| sigma[i]).unwrap_or_else(T::zero);
        let floor = T::default_epsilon() * T::lit(rows.max(cols) as f64);
        let cutoff = rank_tol.max(floor) * sigma_max;
        let keep: Vec<usize> = order.into_iter().filter(|&i| sigma[i] > cutoff).collect();
        if keep.is_empty() {
            return Ok(Self::empty(rows, cols));
        }

        let mut out_u = DMatrix::zeros(rows, keep.len());
        let mut out_v = DMatrix::zeros(cols, keep.len());
        let mut out_s = DVector::zeros(keep.len());
        for (k, &i) in keep.iter().enumerate() {
            let mut uk = u.column(i).into_owned();
            let mut vk = v.column(i).into_owned();
            if canonical_flip(&vk) {
                uk.neg_mut();
                vk.neg_mut();
            }
            out_u.set_column(k, &uk);
            out_v.set_column(k, &vk);
            out_s[k] = sigma[i];
        }
        let svd = Self { u: out_u, sigma: out_s, v: out_v };
        svd.check_residual(m, sigma_max)?;
        Ok(svd)
    }

    /// Rejects decompositions whose triplets do not satisfy `M v = sigma u`.
    fn check_residual(&self, m: &DMatrix<T>, sigma_max: T) -> Result<()> {
        let (rows, cols) = m.shape();
        let bound = T::default_epsilon() * T::lit(1e3 * (rows + cols) as f64) * sigma_max;
        let residual = m * &self.v - &self.u * DMatrix::from_diagonal(&self.sigma);
        if residual.column_iter().any(|c| !(c.norm() <= bound)) {
            return Err(Error::SvdFailure);
        }
        Ok(())
    }
}

const MAX_JACOBI_SWEEPS: usize = 80;

/// Thin SVD `m = U diag(sigma) V^T` by one-sided (Hestenes) Jacobi rotations.
///
/// Works on the tall orientation: columns of a working copy are rotated pairwise
/// until mutually orthogonal; their norms are the singular values. Singular vectors
/// of numerically zero singular values are left as zero columns in `U`.
fn jacobi_svd<T: Scalar>(m: &DMatrix<T>) -> Result<(DMatrix<T>, DVector<T>, DMatrix<T>)> {
    if m.nrows() < m.ncols() {
        let (u, s, v) = jacobi_svd(&m.transpose())?;
        return Ok((v, s, u));
    }
    let (rows, cols) = m.shape();
    let mut w = m.clone();
    let mut v = DMatrix::<T>::identity(cols, cols);
    let eps = T::default_epsilon();
    // columns this small are numerically zero and carry no singular value
    let negligible = (eps * m.norm()).powi(2);
    let mut converged = cols < 2;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..cols.saturating_sub(1) {
            for q in p + 1..cols {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if alpha <= negligible || beta <= negligible || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdFailure);
    }
    let sigma = DVector::from_fn(cols, |j, _| w.column(j).norm());
    let mut u = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        if sigma[j] > T::zero() {
            u.set_column(j, &(w.column(j) / sigma[j]));
        }
    }
    Ok((u, sigma, v))
}

fn rotate_columns<T: Scalar>(m: &mut DMatrix<T>, p: usize, q: usize, c: T, s: T) {
    for i in 0..m.nrows() {
        let (a, b) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = c * a - s * b;
        m[(i, q)] = s * a + c * b;
    }
}

/// True when the entry of largest magnitude (first one on ties) is negative.
fn canonical_flip<T: Scalar>(v: &DVector<T>) -> bool {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    !v.is_empty() && v[best] < T::zero()
}

/// One column of the spectral basis.
#[derive(Clone, Debug)]
pub struct Eigenpair<T: Scalar> {
    pub family: Family,
    pub alignment: Alignment,
    pub eigenvalue: T,
    pub vector: DVector<T>,
}

/// Orthonormal eigenbasis of the Dirac operator split into aligned, anti-aligned and
/// harmonic families.
#[derive(Clone, Debug)]
pub struct SpectralBasis<T: Scalar> {
    dims: BlockDims,
    pub svd1: ReducedSvd<T>,
    pub svd2: ReducedSvd<T>,
    pub phi1_aligned: DMatrix<T>,
    pub phi1_anti: DMatrix<T>,
    pub phi2_aligned: DMatrix<T>,
    pub phi2_anti: DMatrix<T>,
    pub phi_harm: DMatrix<T>,
    harmonic_dims: [usize; 3],
}

impl<T: Scalar> SpectralBasis<T> {
    /// Builds the basis with the default relative rank tolerance for `T`.
    pub fn compute(op: &DiracOperator<T>) -> Result<Self> {
        Self::with_tolerance(op, T::lit(T::RANK_TOLERANCE))
    }

    pub fn with_tolerance(op: &DiracOperator<T>, rank_tol: T) -> Result<Self> {
        if !(rank_tol > T::zero()) {
            return Err(Error::InvalidParameter("rank tolerance must be positive".into()));
        }
        let dims = op.dims();
        let (n, e, t) = (dims.nodes, dims.edges, dims.triangles);
        let b1 = DMatrix::from(op.b1());
        let b2 = DMatrix::from(op.b2());
        let svd1 = ReducedSvd::compute(&b1, rank_tol)?;
        let svd2 = ReducedSvd::compute(&b2, rank_tol)?;

        let h = T::one() / T::lit(2.0).sqrt();
        let total = dims.total();
        let pair = |svd: &ReducedSvd<T>, offset: usize, sign: T| {
            let r = svd.rank();
            let mut phi = DMatrix::zeros(total, r);
            phi.view_mut((offset, 0), (svd.u.nrows(), r)).copy_from(&(&svd.u * h));
            phi.view_mut((offset + svd.u.nrows(), 0), (svd.v.nrows(), r))
                .copy_from(&(&svd.v * (h * sign)));
            phi
        };
        let phi1_aligned = pair(&svd1, 0, T::one());
        let phi1_anti = pair(&svd1, 0, -T::one());
        let phi2_aligned = pair(&svd2, n, T::one());
        let phi2_anti = pair(&svd2, n, -T::one());

        let (r1, r2) = (svd1.rank(), svd2.rank());
        let harmonic_dims = [
            n.checked_sub(r1),
            e.checked_sub(r1 + r2),
            t.checked_sub(r2),
        ]
        .map(|d| d.expect("rank cannot exceed dimension"));

        let lap = op.laplacians();
        let kernels = [
            kernel_basis(DMatrix::from(&lap.l0), harmonic_dims[0])?,
            kernel_basis(DMatrix::from(&lap.l1), harmonic_dims[1])?,
            kernel_basis(DMatrix::from(&lap.l2), harmonic_dims[2])?,
        ];
        let mut phi_harm = DMatrix::zeros(total, harmonic_dims.iter().sum());
        let mut row = 0;
        let mut col = 0;
        for k in &kernels {
            phi_harm.view_mut((row, col), k.shape()).copy_from(k);
            row += k.nrows();
            col += k.ncols();
        }

        Ok(Self {
            dims,
            svd1,
            svd2,
            phi1_aligned,
            phi1_anti,
            phi2_aligned,
            phi2_anti,
            phi_harm,
            harmonic_dims,
        })
    }

    pub fn dims(&self) -> BlockDims {
        self.dims
    }

    /// dim im(D1) = 2 rank(B1).
    pub fn d1_dim(&self) -> usize {
        2 * self.svd1.rank()
    }

    /// dim im(D2) = 2 rank(B2).
    pub fn d2_dim(&self) -> usize {
        2 * self.svd2.rank()
    }

    pub fn subspace_dim(&self, variant: Variant) -> usize {
        match variant {
            Variant::D1 => self.d1_dim(),
            Variant::D2 => self.d2_dim(),
        }
    }

    pub fn harmonic_dim(&self) -> usize {
        self.phi_harm.ncols()
    }

    /// Dimensions of the kernels of `L0`, `L1`, `L2`.
    pub fn harmonic_dims(&self) -> [usize; 3] {
        self.harmonic_dims
    }

    pub fn svd(&self, variant: Variant) -> &ReducedSvd<T> {
        match variant {
            Variant::D1 => &self.svd1,
            Variant::D2 => &self.svd2,
        }
    }

    /// Eigenvectors of one alignment within im(D_n); columns follow decreasing singular value.
    pub fn block(&self, variant: Variant, alignment: Alignment) -> &DMatrix<T> {
        match (variant, alignment) {
            (Variant::D1, Alignment::Aligned) => &self.phi1_aligned,
            (Variant::D1, Alignment::Anti) => &self.phi1_anti,
            (Variant::D2, Alignment::Aligned) => &self.phi2_aligned,
            (Variant::D2, Alignment::Anti) => &self.phi2_anti,
            (_, Alignment::Harmonic) => &self.phi_harm,
        }
    }

    /// `[Phi_n^= | Phi_n^±]`, an orthonormal basis of im(D_n).
    pub fn phi(&self, variant: Variant) -> DMatrix<T> {
        let a = self.block(variant, Alignment::Aligned);
        let b = self.block(variant, Alignment::Anti);
        let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
        out.columns_mut(0, a.ncols()).copy_from(a);
        out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
        out
    }

    /// `[Phi_1 | Phi_2 | Phi_harm]`, square and orthogonal.
    pub fn full_basis(&self) -> DMatrix<T> {
        let blocks = [self.phi(Variant::D1), self.phi(Variant::D2), self.phi_harm.clone()];
        let mut out = DMatrix::zeros(self.dims.total(), self.dims.total());
        let mut col = 0;
        for b in &blocks {
            out.columns_mut(col, b.ncols()).copy_from(b);
            col += b.ncols();
        }
        out
    }

    /// Every eigenpair, grouped by family and alignment.
    pub fn eigenpairs(&self) -> Vec<Eigenpair<T>> {
        let mut out = Vec::with_capacity(self.dims.total());
        for variant in [Variant::D1, Variant::D2] {
            let sigma = &self.svd(variant).sigma;
            for (alignment, sign) in [(Alignment::Aligned, T::one()), (Alignment::Anti, -T::one())] {
                let phi = self.block(variant, alignment);
                for (k, s) in sigma.iter().enumerate() {
                    out.push(Eigenpair {
                        family: variant.into(),
                        alignment,
                        eigenvalue: *s * sign,
                        vector: phi.column(k).into_owned(),
                    });
                }
            }
        }
        for k in 0..self.phi_harm.ncols() {
            out.push(Eigenpair {
                family: Family::Harmonic,
                alignment: Alignment::Harmonic,
                eigenvalue: T::zero(),
                vector: self.phi_harm.column(k).into_owned(),
            });
        }
        out
    }

    /// Signed eigenvalues `±sigma` followed by the harmonic zeros, unsorted.
    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigenpairs().into_iter().map(|p| p.eigenvalue).collect()
    }

    /// Orthogonal projection onto im(D1), im(D2) and ker(D).
    pub fn decompose(&self, signal: &SimplicialSignal<T>) -> Result<SignalDecomposition<T>> {
        signal.check_dims(self.dims)?;
        let project = |phi: &DMatrix<T>| signal.with_data(phi * (phi.transpose() * signal.as_vector()));
        Ok(SignalDecomposition {
            s1: project(&self.phi(Variant::D1)),
            s2: project(&self.phi(Variant::D2)),
            s_harm: project(&self.phi_harm),
        })
    }

    /// `(b0, b1, b2)` from the numerical ranks of the boundary blocks.
    pub fn betti_numbers(&self, complex: &SimplicialComplex2) -> Result<(usize, usize, usize)> {
        let dims = BlockDims::of(complex);
        if dims != self.dims {
            return Err(Error::DimensionMismatch {
                what: "complex size",
                expected: self.dims.total(),
                actual: dims.total(),
            });
        }
        let [b0, b1, b2] = self.harmonic_dims;
        Ok((b0, b1, b2))
    }

    /// Unit anti-aligned eigenvector of `D_n` with the most negative eigenvalue.
    ///
    /// Among equal singular values the first triplet in sorted order wins.
    pub fn planted_eigenvector(&self, variant: Variant) -> Result<SimplicialSignal<T>> {
        let phi = self.block(variant, Alignment::Anti);
        if phi.ncols() == 0 {
            return Err(Error::EmptySubspace(variant.index()));
        }
        SimplicialSignal::from_vector(self.dims, phi.column(0).into_owned())
    }

    /// Eigenvalue of [`Self::planted_eigenvector`].
    pub fn planted_eigenvalue(&self, variant: Variant) -> Result<T> {
        self.svd(variant)
            .sigma
            .iter()
            .next()
            .map(|s| -*s)
            .ok_or(Error::EmptySubspace(variant.index()))
    }
}

/// Orthonormal basis of the `dim` eigenvectors of a PSD matrix with the smallest eigenvalues.
fn kernel_basis<T: Scalar>(laplacian: DMatrix<T>, dim: usize) -> Result<DMatrix<T>> {
    let n = laplacian.nrows();
    if dim == 0 || n == 0 {
        return Ok(DMatrix::zeros(n, 0));
    }
    let eig = SymmetricEigen::try_new(laplacian, T::default_epsilon(), 0).ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out = DMatrix::zeros(n, dim);
    for (k, &i) in order.iter().take(dim).enumerate() {
        let mut col = eig.eigenvectors.column(i).into_owned();
        if canonical_flip(&col) {
            col.neg_mut();
        }
        out.set_column(k, &col);
    }
    Ok(out)
}

/// `s = s1 + s2 + s_harm` with `s1 ∈ im(D1)`, `s2 ∈ im(D2)`, `s_harm ∈ ker(D)`.
#[derive(Clone, Debug)]
pub struct SignalDecomposition<T: Scalar> {
    pub s1: SimplicialSignal<T>,
    pub s2: SimplicialSignal<T>,
    pub s_harm: SimplicialSignal<T>,
}

impl<T: Scalar> SignalDecomposition<T> {
    pub fn component(&self, family: Family) -> &SimplicialSignal<T> {
        match family {
            Family::D1 => &self.s1,
            Family::D2 => &self.s2,
            Family::Harmonic => &self.s_harm,
        }
    }

    pub fn reconstruct(&self) -> SimplicialSignal<T> {
        self.s1
            .with_data(self.s1.as_vector() + self.s2.as_vector() + self.s_harm.as_vector())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex2;
    use crate::operators::NormalizationMode;

    fn basis(simplices: &[&[usize]], mode: NormalizationMode) -> (SimplicialComplex2, SpectralBasis<f64>) {
        let c = SimplicialComplex2::build(simplices.iter().copied()).unwrap();
        let op = DiracOperator::unweighted(&c, mode).unwrap();
        let b = SpectralBasis::compute(&op).unwrap();
        (c, b)
    }

    #[test]
    fn filled_triangle_eigenvalues() {
        let (_, b) = basis(&[&[0, 1, 2]], NormalizationMode::None);
        let mut ev = b.eigenvalues();
        ev.sort_by(f64::total_cmp);
        let s3 = 3f64.sqrt();
        for (a, e) in ev.iter().zip([-s3, -s3, -s3, 0.0, s3, s3, s3]) {
            assert!((a - e).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn hollow_triangle_has_no_d2() {
        let (c, b) = basis(&[&[0, 1], &[1, 2], &[0, 2]], NormalizationMode::Spectral);
        assert_eq!(b.d2_dim(), 0);
        assert_eq!(b.phi2_aligned.ncols(), 0);
        assert_eq!(b.harmonic_dim(), 2);
        assert_eq!(b.betti_numbers(&c).unwrap(), (1, 1, 0));
        assert!(matches!(b.planted_eigenvector(Variant::D2), Err(Error::EmptySubspace(2))));
    }

    #[test]
    fn betti_of_fixtures() {
        let (c, b) = basis(&[&[0, 1, 2]], NormalizationMode::Spectral);
        assert_eq!(b.betti_numbers(&c).unwrap(), (1, 0, 0));
        let (c, b) = basis(&[&[0, 1], &[2, 3]], NormalizationMode::Spectral);
        assert_eq!(b.betti_numbers(&c).unwrap().0, 2);
    }

    #[test]
    fn alignment_semantics() {
        let (_, b) = basis(&[&[0, 1, 2], &[1, 2, 3]], NormalizationMode::None);
        let b1 = &b.svd1;
        for k in 0..b1.rank() {
            let aligned = b.phi1_aligned.column(k);
            let u = aligned.rows(0, 4);
            let v = aligned.rows(4, 5);
            let c = SimplicialComplex2::build([[0, 1, 2], [1, 2, 3]]).unwrap();
            let bm = DMatrix::from(&c.boundary_matrix::<f64>(1).unwrap());
            let r = (&bm * v - u * b1.sigma[k]).norm();
            assert!(r < 1e-12, "k={k} sigma={} r={r}", b1.sigma[k]);
        }
    }

    #[test]
    fn planted_vector_of_filled_triangle() {
        let (_, b) = basis(&[&[0, 1, 2]], NormalizationMode::None);
        let s = b.planted_eigenvector(Variant::D2).unwrap();
        assert_eq!(s.node_block().amax(), 0.0);
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!((b.planted_eigenvalue(Variant::D2).unwrap() + 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn decomposition_of_basis_vectors() {
        let (_, b) = basis(&[&[0, 1, 2], &[2, 3]], NormalizationMode::Spectral);
        let s = SimplicialSignal::from_vector(b.dims(), b.phi1_anti.column(0).into_owned()).unwrap();
        let d = b.decompose(&s).unwrap();
        assert!((d.s1.as_vector() - s.as_vector()).norm() < 1e-12);
        assert!(d.s2.norm() < 1e-12 && d.s_harm.norm() < 1e-12);

        let h = SimplicialSignal::from_vector(b.dims(), b.phi_harm.column(0).into_owned()).unwrap();
        let d = b.decompose(&h).unwrap();
        assert!((d.s_harm.as_vector() - h.as_vector()).norm() < 1e-12);
        assert!(d.s1.norm() < 1e-12 && d.s2.norm() < 1e-12);
    }

    #[test]
    fn canonical_sign_rule() {
        assert!(canonical_flip(&DVector::from_vec(vec![0.1, -0.9, 0.9])));
        assert!(!canonical_flip(&DVector::from_vec(vec![0.9, -0.9])));
        assert!(!canonical_flip(&DVector::<f64>::zeros(0)));
    }

    #[test]
    fn jacobi_svd_reconstructs_wide_and_tall() {
        let c = crate::complex::grid_complex(4, 4).unwrap();
        let b1 = DMatrix::from(&c.boundary_matrix::<f64>(1).unwrap());
        for m in [b1.clone(), b1.transpose()] {
            let (u, s, v) = jacobi_svd(&m).unwrap();
            let recon = &u * DMatrix::from_diagonal(&s) * v.transpose();
            assert!((recon - &m).amax() < 1e-12);
            let svd = ReducedSvd::compute(&m, 1e-10).unwrap();
            let k = svd.rank();
            assert!((svd.v.transpose() * &svd.v - DMatrix::identity(k, k)).amax() < 1e-12);
            assert!((svd.u.transpose() * &svd.u - DMatrix::identity(k, k)).amax() < 1e-12);
        }
        // L0 = B1 B1^T, so the squared singular values are its eigenvalues
        let mut ev: Vec<f64> = (&b1 * b1.transpose()).symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        let svd = ReducedSvd::compute(&b1, 1e-10).unwrap();
        assert_eq!(svd.rank(), 15);
        for (s, e) in svd.sigma.iter().zip(&ev) {
            assert!((s * s - e).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_non_positive_tolerance() {
        let c = SimplicialComplex2::build([[0, 1]]).unwrap();
        let op = DiracOperator::<f64>::unweighted(&c, NormalizationMode::None).unwrap();
        assert!(SpectralBasis::with_tolerance(&op, 0.0).is_err());
    }
}
