//! Dirac operator, its split `D = D1 + D2`, and the Hodge Laplacians it squares to.

use nalgebra::{DMatrix, DVector, DVectorView, SymmetricEigen};
use nalgebra_sparse::{CooMatrix, CscMatrix};

use crate::complex::{weighted_boundary, SimplicialComplex2, WeightingScheme};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Block sizes `(N, E, T)` of a signal on a two-dimensional complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockDims {
    pub nodes: usize,
    pub edges: usize,
    pub triangles: usize,
}

impl BlockDims {
    pub fn new(nodes: usize, edges: usize, triangles: usize) -> Self {
        Self { nodes, edges, triangles }
    }

    pub fn of(complex: &SimplicialComplex2) -> Self {
        let (n, e, t) = complex.counts();
        Self::new(n, e, t)
    }

    pub fn total(&self) -> usize {
        self.nodes + self.edges + self.triangles
    }
}

/// A signal on all simplices at once: node block, then edge block, then triangle block.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialSignal<T: Scalar> {
    dims: BlockDims,
    data: DVector<T>,
}

impl<T: Scalar> SimplicialSignal<T> {
    pub fn zeros(dims: BlockDims) -> Self {
        Self { dims, data: DVector::zeros(dims.total()) }
    }

    pub fn from_vector(dims: BlockDims, data: DVector<T>) -> Result<Self> {
        if data.len() != dims.total() {
            return Err(Error::DimensionMismatch {
                what: "signal length",
                expected: dims.total(),
                actual: data.len(),
            });
        }
        Ok(Self { dims, data })
    }

    pub fn from_blocks(nodes: &DVector<T>, edges: &DVector<T>, triangles: &DVector<T>) -> Self {
        let dims = BlockDims::new(nodes.len(), edges.len(), triangles.len());
        let data = DVector::from_iterator(
            dims.total(),
            nodes.iter().chain(edges.iter()).chain(triangles.iter()).copied(),
        );
        Self { dims, data }
    }

    pub fn dims(&self) -> BlockDims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn node_block(&self) -> DVectorView<'_, T> {
        self.data.rows(0, self.dims.nodes)
    }

    pub fn edge_block(&self) -> DVectorView<'_, T> {
        self.data.rows(self.dims.nodes, self.dims.edges)
    }

    pub fn triangle_block(&self) -> DVectorView<'_, T> {
        self.data.rows(self.dims.nodes + self.dims.edges, self.dims.triangles)
    }

    pub fn as_vector(&self) -> &DVector<T> {
        &self.data
    }

    pub fn into_vector(self) -> DVector<T> {
        self.data
    }

    pub fn norm(&self) -> T {
        self.data.norm()
    }

    /// Same block layout, new coefficients.
    pub(crate) fn with_data(&self, data: DVector<T>) -> Self {
        debug_assert_eq!(data.len(), self.dims.total());
        Self { dims: self.dims, data }
    }

    pub(crate) fn check_dims(&self, dims: BlockDims) -> Result<()> {
        if self.dims != dims {
            return Err(Error::DimensionMismatch {
                what: "signal length",
                expected: dims.total(),
                actual: self.len(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum NormalizationMode {
    /// Weighted boundaries used as given.
    None,
    /// Each weighted boundary divided by its largest singular value.
    #[default]
    Spectral,
}

/// Record of the scaling applied to the weighted boundaries during assembly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalization<T> {
    pub mode: NormalizationMode,
    pub scale1: T,
    pub scale2: T,
}

/// The (weighted, optionally normalized) Dirac operator of a two-dimensional complex.
///
/// Only the two weighted boundary blocks are stored; the full operator, its split and
/// the Laplacians are assembled from them on demand.
#[derive(Clone, Debug)]
pub struct DiracOperator<T: Scalar> {
    dims: BlockDims,
    b1: CscMatrix<T>,
    b2: CscMatrix<T>,
    normalization: Normalization<T>,
}

impl<T: Scalar> DiracOperator<T> {
    pub fn assemble(
        complex: &SimplicialComplex2,
        weights: &WeightingScheme<T>,
        mode: NormalizationMode,
    ) -> Result<Self> {
        weights.validate(complex)?;
        let b1 = weighted_boundary(&complex.boundary_matrix(1)?, &weights.g0, &weights.g1)?;
        let b2 = weighted_boundary(&complex.boundary_matrix(2)?, &weights.g1, &weights.g2)?;
        Self::from_boundaries(b1, b2, mode)
    }

    /// Unit weights.
    pub fn unweighted(complex: &SimplicialComplex2, mode: NormalizationMode) -> Result<Self> {
        Self::assemble(complex, &WeightingScheme::unit(complex), mode)
    }

    /// Builds the operator from already weighted boundary blocks `B1` (N x E) and `B2` (E x T).
    pub fn from_boundaries(mut b1: CscMatrix<T>, mut b2: CscMatrix<T>, mode: NormalizationMode) -> Result<Self> {
        if b1.ncols() != b2.nrows() {
            return Err(Error::DimensionMismatch {
                what: "rows of B2",
                expected: b1.ncols(),
                actual: b2.nrows(),
            });
        }
        let dims = BlockDims::new(b1.nrows(), b1.ncols(), b2.ncols());
        let (scale1, scale2) = match mode {
            NormalizationMode::None => (T::one(), T::one()),
            NormalizationMode::Spectral => (spectral_scale(&b1)?, spectral_scale(&b2)?),
        };
        if scale1 != T::one() {
            b1.values_mut().iter_mut().for_each(|v| *v /= scale1);
        }
        if scale2 != T::one() {
            b2.values_mut().iter_mut().for_each(|v| *v /= scale2);
        }
        Ok(Self { dims, b1, b2, normalization: Normalization { mode, scale1, scale2 } })
    }

    pub fn dims(&self) -> BlockDims {
        self.dims
    }

    /// N + E + T
    pub fn size(&self) -> usize {
        self.dims.total()
    }

    /// Weighted (and normalized) `B1`, shape N x E.
    pub fn b1(&self) -> &CscMatrix<T> {
        &self.b1
    }

    /// Weighted (and normalized) `B2`, shape E x T.
    pub fn b2(&self) -> &CscMatrix<T> {
        &self.b2
    }

    pub fn normalization(&self) -> Normalization<T> {
        self.normalization
    }

    /// Sparse `D1`: the node/edge coupling through `B1`.
    pub fn d1(&self) -> CscMatrix<T> {
        let mut coo = CooMatrix::new(self.size(), self.size());
        push_symmetric_block(&mut coo, &self.b1, 0, self.dims.nodes);
        CscMatrix::from(&coo)
    }

    /// Sparse `D2`: the edge/triangle coupling through `B2`.
    pub fn d2(&self) -> CscMatrix<T> {
        let mut coo = CooMatrix::new(self.size(), self.size());
        push_symmetric_block(&mut coo, &self.b2, self.dims.nodes, self.dims.nodes + self.dims.edges);
        CscMatrix::from(&coo)
    }

    /// `(D1, D2)` with `D = D1 + D2`.
    pub fn split(&self) -> (CscMatrix<T>, CscMatrix<T>) {
        (self.d1(), self.d2())
    }

    /// Sparse `D`.
    pub fn dirac(&self) -> CscMatrix<T> {
        let mut coo = CooMatrix::new(self.size(), self.size());
        push_symmetric_block(&mut coo, &self.b1, 0, self.dims.nodes);
        push_symmetric_block(&mut coo, &self.b2, self.dims.nodes, self.dims.nodes + self.dims.edges);
        CscMatrix::from(&coo)
    }

    pub fn dense_dirac(&self) -> DMatrix<T> {
        DMatrix::from(&self.dirac())
    }

    pub fn laplacians(&self) -> HodgeLaplacians<T> {
        let b1t = self.b1.transpose();
        let b2t = self.b2.transpose();
        HodgeLaplacians {
            l0: &self.b1 * &b1t,
            l1: &(&b1t * &self.b1) + &(&self.b2 * &b2t),
            l2: &b2t * &self.b2,
        }
    }

    /// Matrix-free `D s`.
    pub fn apply(&self, signal: &SimplicialSignal<T>) -> Result<SimplicialSignal<T>> {
        signal.check_dims(self.dims)?;
        let edges = signal.edge_block().into_owned();
        let nodes = signal.node_block().into_owned();
        let tris = signal.triangle_block().into_owned();
        let out_nodes = &self.b1 * &edges;
        let out_edges = &(&self.b1.transpose() * &nodes) + &(&self.b2 * &tris);
        let out_tris = &self.b2.transpose() * &edges;
        Ok(SimplicialSignal::from_blocks(&out_nodes, &out_edges, &out_tris))
    }
}

/// Writes `B` at block position (row_offset, col_offset) and `B^T` at the mirrored position.
fn push_symmetric_block<T: Scalar>(coo: &mut CooMatrix<T>, b: &CscMatrix<T>, row_offset: usize, col_offset: usize) {
    for (i, j, v) in b.triplet_iter() {
        coo.push(row_offset + i, col_offset + j, *v);
        coo.push(col_offset + j, row_offset + i, *v);
    }
}

/// Largest singular value of `b`, or one when `b` is empty or zero.
fn spectral_scale<T: Scalar>(b: &CscMatrix<T>) -> Result<T> {
    let sigma = largest_singular_value(&DMatrix::from(b))?;
    // Guard: a zero block has nothing to normalize.
    if sigma <= T::lit(T::RANK_TOLERANCE) {
        Ok(T::one())
    } else {
        Ok(sigma)
    }
}

/// `sqrt` of the largest eigenvalue of the smaller Gram matrix.
pub(crate) fn largest_singular_value<T: Scalar>(m: &DMatrix<T>) -> Result<T> {
    if m.is_empty() {
        return Ok(T::zero());
    }
    let gram = if m.nrows() <= m.ncols() { m * m.transpose() } else { m.transpose() * m };
    let eig = SymmetricEigen::try_new(gram, T::default_epsilon(), 0).ok_or(Error::EigenFailure)?;
    let max = eig.eigenvalues.iter().copied().fold(T::zero(), |a, b| a.max(b));
    Ok(max.sqrt())
}

/// The Hodge Laplacians `L0 = B1 B1^T`, `L1 = B1^T B1 + B2 B2^T`, `L2 = B2^T B2`.
#[derive(Clone, Debug)]
pub struct HodgeLaplacians<T: Scalar> {
    pub l0: CscMatrix<T>,
    pub l1: CscMatrix<T>,
    pub l2: CscMatrix<T>,
}

impl<T: Scalar> HodgeLaplacians<T> {
    /// Dense `diag(L0, L1, L2)`.
    pub fn block_diagonal(&self) -> DMatrix<T> {
        let (n, e, t) = (self.l0.nrows(), self.l1.nrows(), self.l2.nrows());
        let mut out = DMatrix::zeros(n + e + t, n + e + t);
        out.view_mut((0, 0), (n, n)).copy_from(&DMatrix::from(&self.l0));
        out.view_mut((n, n), (e, e)).copy_from(&DMatrix::from(&self.l1));
        out.view_mut((n + e, n + e), (t, t)).copy_from(&DMatrix::from(&self.l2));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{ngf_generate, NgfConfig};

    fn tri() -> SimplicialComplex2 {
        SimplicialComplex2::build([[0, 1, 2]]).unwrap()
    }

    fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn single_edge_dirac() {
        let c = SimplicialComplex2::build([[0, 1]]).unwrap();
        let op = DiracOperator::<f64>::unweighted(&c, NormalizationMode::None).unwrap();
        let d = op.dense_dirac();
        assert_eq!(d, DMatrix::from_row_slice(3, 3, &[0., 0., -1., 0., 0., 1., -1., 1., 0.]));
        let ev = sorted_eigenvalues(d);
        assert!((ev[0] + 2f64.sqrt()).abs() < 1e-12);
        assert!(ev[1].abs() < 1e-12);
        assert!((ev[2] - 2f64.sqrt()).abs() < 1e-12);
        let l = op.laplacians();
        assert_eq!(DMatrix::from(&l.l1).as_slice(), &[2.0]);
    }

    #[test]
    fn filled_triangle_spectrum() {
        let op = DiracOperator::<f64>::unweighted(&tri(), NormalizationMode::None).unwrap();
        let ev = sorted_eigenvalues(op.dense_dirac());
        let s3 = 3f64.sqrt();
        let expected = [-s3, -s3, -s3, 0.0, s3, s3, s3];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        let l0 = sorted_eigenvalues(DMatrix::from(&op.laplacians().l0));
        assert!((l0[0]).abs() < 1e-12 && (l0[1] - 3.0).abs() < 1e-12 && (l0[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_normalization_bounds_spectrum() {
        let c = ngf_generate(&NgfConfig::new(30, 5)).unwrap();
        let op = DiracOperator::<f64>::unweighted(&c, NormalizationMode::Spectral).unwrap();
        let ev = sorted_eigenvalues(op.dense_dirac());
        assert!(ev.iter().all(|x| x.abs() <= 1.0 + 1e-10));
        assert!((ev.last().unwrap() - 1.0).abs() < 1e-10);
        assert!(op.normalization().scale1 > 1.0);
    }

    #[test]
    fn split_without_triangles() {
        let c = SimplicialComplex2::build([[0, 1], [1, 2], [0, 2]]).unwrap();
        let op = DiracOperator::<f64>::unweighted(&c, NormalizationMode::Spectral).unwrap();
        let (d1, d2) = op.split();
        assert_eq!(d2.nnz(), 0);
        assert_eq!(DMatrix::from(&d1), op.dense_dirac());
        assert_eq!(op.normalization().scale2, 1.0);
    }

    #[test]
    fn split_blocks_annihilate() {
        let op = DiracOperator::<f64>::unweighted(&tri(), NormalizationMode::None).unwrap();
        let (d1, d2) = op.split();
        let (d1, d2) = (DMatrix::from(&d1), DMatrix::from(&d2));
        assert!((&d1 * &d2).amax() <= 1e-12);
        assert!((&d2 * &d1).amax() <= 1e-12);
        assert_eq!(&d1 + &d2, op.dense_dirac());
    }

    #[test]
    fn apply_matches_dense_multiply() {
        let c = SimplicialComplex2::build([[0, 1]]).unwrap();
        let op = DiracOperator::<f64>::unweighted(&c, NormalizationMode::Spectral).unwrap();
        let s = SimplicialSignal::from_vector(op.dims(), DVector::from_vec(vec![0.0, 0.0, 1.0])).unwrap();
        let out = op.apply(&s).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((out.node_block()[0] + h).abs() < 1e-15);
        assert!((out.node_block()[1] - h).abs() < 1e-15);
        assert_eq!(out.as_vector(), &(op.dense_dirac() * s.as_vector()));

        let bad = SimplicialSignal::<f64>::zeros(BlockDims::new(2, 2, 0));
        assert!(op.apply(&bad).is_err());
    }

    #[test]
    fn weight_length_mismatch() {
        let c = tri();
        let mut w = WeightingScheme::<f64>::unit(&c);
        w.g1 = DVector::from_element(2, 1.0);
        assert!(matches!(
            DiracOperator::assemble(&c, &w, NormalizationMode::None),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn generic_over_f32() {
        let op = DiracOperator::<f32>::unweighted(&tri(), NormalizationMode::Spectral).unwrap();
        let d = op.dense_dirac();
        let lap = op.laplacians().block_diagonal();
        assert!((&d * &d - lap).amax() < 1e-5);
    }
}
