//! Two-dimensional simplicial complexes, their boundary matrices and the
//! network-geometry-with-flavor (NGF) growth model.
//!
//! Every simplex is stored with its vertices in strictly increasing order, which
//! fixes its orientation. Edges and triangles are kept sorted lexicographically;
//! the position of a simplex in that order is its row/column index in the
//! boundary matrices and its coordinate in a signal block.

use std::collections::{BTreeSet, HashMap};

use nalgebra::DVector;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An oriented simplex of dimension 0, 1 or 2 with strictly increasing vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Simplex {
    Vertex(usize),
    Edge([usize; 2]),
    Triangle([usize; 3]),
}

impl Simplex {
    /// Builds a simplex from an arbitrary vertex list, sorting it into canonical order.
    pub fn from_vertices(vertices: &[usize]) -> Result<Self> {
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::RepeatedVertex(vertices.to_vec()));
        }
        match *sorted.as_slice() {
            [] => Err(Error::EmptySimplex),
            [a] => Ok(Simplex::Vertex(a)),
            [a, b] => Ok(Simplex::Edge([a, b])),
            [a, b, c] => Ok(Simplex::Triangle([a, b, c])),
            _ => Err(Error::DimensionTooHigh(vertices.to_vec())),
        }
    }

    pub fn dim(&self) -> usize {
        self.vertices().len() - 1
    }

    pub fn vertices(&self) -> &[usize] {
        match self {
            Simplex::Vertex(v) => std::slice::from_ref(v),
            Simplex::Edge(e) => e,
            Simplex::Triangle(t) => t,
        }
    }
}

impl std::fmt::Display for Simplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for v in self.vertices() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// A downward-closed simplicial complex of dimension at most two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex2 {
    num_vertices: usize,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    edge_index: HashMap<[usize; 2], usize>,
}

impl SimplicialComplex2 {
    /// Builds the downward closure of `simplices`.
    ///
    /// Duplicates are dropped. Vertex ids must cover `0..N` without gaps once the
    /// closure is taken.
    pub fn build<I, S>(simplices: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[usize]>,
    {
        let mut vertices = BTreeSet::new();
        let mut edges = BTreeSet::new();
        let mut triangles = BTreeSet::new();
        for raw in simplices {
            match Simplex::from_vertices(raw.as_ref())? {
                Simplex::Vertex(a) => {
                    vertices.insert(a);
                }
                Simplex::Edge([a, b]) => {
                    vertices.extend([a, b]);
                    edges.insert([a, b]);
                }
                Simplex::Triangle([a, b, c]) => {
                    vertices.extend([a, b, c]);
                    edges.extend([[a, b], [a, c], [b, c]]);
                    triangles.insert([a, b, c]);
                }
            }
        }
        // BTreeSet iterates in ascending order, so the ids are dense iff the i-th id is i.
        if let Some(missing) = vertices.iter().enumerate().find(|(i, v)| i != *v).map(|(i, _)| i) {
            return Err(Error::NonContiguousVertices(missing));
        }
        Ok(Self::from_sorted(
            vertices.len(),
            edges.into_iter().collect(),
            triangles.into_iter().collect(),
        ))
    }

    fn from_sorted(num_vertices: usize, edges: Vec<[usize; 2]>, triangles: Vec<[usize; 3]>) -> Self {
        let edge_index = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        Self { num_vertices, edges, triangles, edge_index }
    }

    /// N
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// E
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// T
    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// `(N, E, T)`
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.num_vertices, self.edges.len(), self.triangles.len())
    }

    /// Total number of simplices, N + E + T.
    pub fn size(&self) -> usize {
        self.num_vertices + self.edges.len() + self.triangles.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Index of the edge `(a, b)` in canonical order, if present. The pair may be given in
    /// either order.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { [a, b] } else { [b, a] };
        self.edge_index.get(&key).copied()
    }

    /// All simplices in signal layout order: vertices, then edges, then triangles.
    pub fn simplices(&self) -> impl Iterator<Item = Simplex> + '_ {
        (0..self.num_vertices)
            .map(Simplex::Vertex)
            .chain(self.edges.iter().map(|e| Simplex::Edge(*e)))
            .chain(self.triangles.iter().map(|t| Simplex::Triangle(*t)))
    }

    /// Position of `simplex` in the concatenated signal layout.
    pub fn signal_index(&self, simplex: &Simplex) -> Option<usize> {
        match simplex {
            Simplex::Vertex(v) => (*v < self.num_vertices).then_some(*v),
            Simplex::Edge([a, b]) => self.edge_index(*a, *b).map(|i| self.num_vertices + i),
            Simplex::Triangle(t) => self
                .triangles
                .binary_search(t)
                .ok()
                .map(|i| self.num_vertices + self.edges.len() + i),
        }
    }

    /// Number of triangles incident to each edge, in edge order.
    pub fn edge_triangle_degrees(&self) -> Vec<usize> {
        let mut degrees = vec![0; self.edges.len()];
        for &[a, b, c] in &self.triangles {
            for (u, v) in [(a, b), (a, c), (b, c)] {
                degrees[self.edge_index[&[u, v]]] += 1;
            }
        }
        degrees
    }

    /// Simplices not contained in any larger simplex, in the order
    /// triangles, free edges, isolated vertices.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let degrees = self.edge_triangle_degrees();
        let mut vertex_used = vec![false; self.num_vertices];
        for &[a, b] in &self.edges {
            vertex_used[a] = true;
            vertex_used[b] = true;
        }
        self.triangles
            .iter()
            .map(|t| Simplex::Triangle(*t))
            .chain(
                self.edges
                    .iter()
                    .zip(&degrees)
                    .filter(|(_, d)| **d == 0)
                    .map(|(e, _)| Simplex::Edge(*e)),
            )
            .chain((0..self.num_vertices).filter(|v| !vertex_used[*v]).map(Simplex::Vertex))
            .collect()
    }

    /// Unweighted boundary matrix `B_k` for `k` in {1, 2}.
    ///
    /// The face obtained by dropping the i-th vertex of a simplex receives sign `(-1)^i`.
    pub fn boundary_matrix<T: Scalar>(&self, k: usize) -> Result<CscMatrix<T>> {
        let (n, e, t) = self.counts();
        match k {
            1 => {
                let mut coo = CooMatrix::new(n, e);
                for (j, &[a, b]) in self.edges.iter().enumerate() {
                    coo.push(a, j, -T::one());
                    coo.push(b, j, T::one());
                }
                Ok(CscMatrix::from(&coo))
            }
            2 => {
                let mut coo = CooMatrix::new(e, t);
                for (j, &[a, b, c]) in self.triangles.iter().enumerate() {
                    coo.push(self.edge_index[&[b, c]], j, T::one());
                    coo.push(self.edge_index[&[a, c]], j, -T::one());
                    coo.push(self.edge_index[&[a, b]], j, T::one());
                }
                Ok(CscMatrix::from(&coo))
            }
            other => Err(Error::InvalidBoundaryIndex(other)),
        }
    }
}

/// Diagonal weights `G_0`, `G_1`, `G_2` on vertices, edges and triangles.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightingScheme<T: Scalar> {
    pub g0: DVector<T>,
    pub g1: DVector<T>,
    pub g2: DVector<T>,
}

impl<T: Scalar> WeightingScheme<T> {
    /// All-ones weights, i.e. the unweighted setting.
    pub fn unit(complex: &SimplicialComplex2) -> Self {
        let (n, e, t) = complex.counts();
        Self {
            g0: DVector::from_element(n, T::one()),
            g1: DVector::from_element(e, T::one()),
            g2: DVector::from_element(t, T::one()),
        }
    }

    /// Checks lengths against `complex` and strict positivity of every entry.
    pub fn validate(&self, complex: &SimplicialComplex2) -> Result<()> {
        let (n, e, t) = complex.counts();
        for (level, (g, expected)) in [(&self.g0, n), (&self.g1, e), (&self.g2, t)].into_iter().enumerate() {
            if g.len() != expected {
                return Err(Error::DimensionMismatch {
                    what: ["G0 length", "G1 length", "G2 length"][level],
                    expected,
                    actual: g.len(),
                });
            }
            check_positive(g, level)?;
        }
        Ok(())
    }
}

fn check_positive<T: Scalar>(g: &DVector<T>, level: usize) -> Result<()> {
    match g.iter().position(|w| !(*w > T::zero())) {
        Some(index) => Err(Error::NonPositiveWeight { level, index, value: g[index].as_f64() }),
        None => Ok(()),
    }
}

/// Returns `G_lower^{1/2} B G_upper^{-1/2}`, where `G_lower` weights the rows
/// ((k-1)-simplices) and `G_upper` the columns (k-simplices) of `B`.
pub fn weighted_boundary<T: Scalar>(
    boundary: &CscMatrix<T>,
    lower: &DVector<T>,
    upper: &DVector<T>,
) -> Result<CscMatrix<T>> {
    if lower.len() != boundary.nrows() {
        return Err(Error::DimensionMismatch {
            what: "row weights",
            expected: boundary.nrows(),
            actual: lower.len(),
        });
    }
    if upper.len() != boundary.ncols() {
        return Err(Error::DimensionMismatch {
            what: "column weights",
            expected: boundary.ncols(),
            actual: upper.len(),
        });
    }
    check_positive(lower, 0)?;
    check_positive(upper, 1)?;
    let row_scale = lower.map(|w| w.sqrt());
    let col_scale = upper.map(|w| w.sqrt());
    let mut out = boundary.clone();
    for j in 0..out.ncols() {
        let mut col = out.col_mut(j);
        let (rows, values) = col.rows_and_values_mut();
        for (i, v) in rows.iter().zip(values.iter_mut()) {
            *v = *v * row_scale[*i] / col_scale[j];
        }
    }
    Ok(out)
}

/// Parameters of the NGF growth model.
#[derive(Clone, Debug, PartialEq)]
pub struct NgfConfig {
    pub flavor: i32,
    pub beta: f64,
    pub target_triangles: usize,
    pub seed: u64,
}

impl NgfConfig {
    pub fn new(target_triangles: usize, seed: u64) -> Self {
        Self { flavor: -1, beta: 0.0, target_triangles, seed }
    }
}

/// Grows a two-dimensional NGF complex with flavor -1 and zero inverse temperature.
///
/// Starting from one filled triangle, each step picks uniformly an edge incident to
/// exactly one triangle and glues a new triangle (with a new vertex) onto it. Edges
/// that already border two triangles have zero attachment probability, so every
/// edge ends up in one or two triangles.
pub fn ngf_generate(config: &NgfConfig) -> Result<SimplicialComplex2> {
    if config.flavor != -1 || config.beta != 0.0 {
        return Err(Error::UnsupportedNgf { flavor: config.flavor, beta: config.beta });
    }
    if config.target_triangles == 0 {
        return Err(Error::InvalidParameter("target_triangles must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut triangles = vec![[0, 1, 2]];
    let mut free_edges = vec![[0, 1], [0, 2], [1, 2]];
    let mut next_vertex = 3;
    while triangles.len() < config.target_triangles {
        let pick = rng.random_range(0..free_edges.len());
        let [a, b] = free_edges.swap_remove(pick);
        let v = next_vertex;
        next_vertex += 1;
        triangles.push([a, b, v]);
        free_edges.push([a, v]);
        free_edges.push([b, v]);
    }
    SimplicialComplex2::build(triangles)
}

/// Triangulated `rows x cols` grid of vertices; every unit square is split along
/// its main diagonal into two triangles.
pub fn grid_complex(rows: usize, cols: usize) -> Result<SimplicialComplex2> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 rows and 2 columns".into()));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut triangles = Vec::with_capacity(2 * (rows - 1) * (cols - 1));
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            triangles.push([id(r, c), id(r, c + 1), id(r + 1, c + 1)]);
            triangles.push([id(r, c), id(r + 1, c), id(r + 1, c + 1)]);
        }
    }
    SimplicialComplex2::build(triangles)
}
