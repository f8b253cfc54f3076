//! Gaussian width of polynomial images of `{0,1}^n`, spectral norms of sparse
//! matrices and the Gaussian-series norm experiment.

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::poly::{self, BitVector};
use crate::rng::{map_streams, stream, BoxMuller};
use crate::sparse::{LinearOperator, SparseMatrix, WeightedSum};
use crate::stats::McEstimate;

/// Largest `n` for which `{0,1}^n` is enumerated.
pub const MAX_CUBE_N: usize = 24;

/// `ψ = (p_{H_1}, …, p_{H_k})` on a common vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    n: usize,
    components: Vec<Hypergraph>,
}

impl PolyMap {
    pub fn new(components: Vec<Hypergraph>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::param("k", "need at least one component"))?;
        let n = first.n();
        if let Some(h) = components.iter().find(|h| h.n() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: h.n(),
            });
        }
        Ok(Self { n, components })
    }

    /// `ψ(x) = x`, one singleton edge per coordinate.
    pub fn identity(n: usize) -> Result<Self> {
        let components = (0..n)
            .map(|i| Hypergraph::new(n, [vec![i]]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(components)
    }

    /// `k` random `d`-uniform components in which no vertex has degree above
    /// `t`. Each component tries `⌈tn/d⌉` random `d`-sets and keeps those that
    /// respect the degree cap.
    pub fn random(n: usize, k: usize, d: usize, t: usize, seed: u64) -> Result<Self> {
        if d == 0 || d > n {
            return Err(Error::param("d", format!("must lie in 1..={n}")));
        }
        if t == 0 {
            return Err(Error::param("t", "must be positive"));
        }
        if k == 0 {
            return Err(Error::param("k", "must be positive"));
        }
        let vertices: Vec<usize> = (0..n).collect();
        let attempts = (t * n).div_ceil(d);
        let components = (0..k)
            .map(|i| {
                let mut rng = stream(seed, i as u64);
                let mut degree = vec![0usize; n];
                let mut h = Hypergraph::empty(n);
                for _ in 0..attempts {
                    let edge: Vec<usize> = vertices.choose_multiple(&mut rng, d).copied().collect();
                    if edge.iter().all(|&v| degree[v] < t) {
                        edge.iter().for_each(|&v| degree[v] += 1);
                        h.push_edge(edge)?;
                    }
                }
                Ok(h)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(components)
    }

    /// Quadratic map `ψ_i(x) = ½ xᵀA_i x` for symmetric 0/1 matrices with zero
    /// diagonal.
    pub fn from_adjacency(matrices: &[SparseMatrix]) -> Result<Self> {
        let components = matrices
            .iter()
            .map(|a| {
                if !a.is_symmetric() {
                    return Err(Error::param("matrix", "must be symmetric"));
                }
                let mut h = Hypergraph::empty(a.dim());
                for (r, c, v) in a.entries() {
                    if r == c || v != 1 {
                        return Err(Error::param("matrix", "must be 0/1 with zero diagonal"));
                    }
                    if r < c {
                        h.push_edge([r, c])?;
                    }
                }
                Ok(h)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(components)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Hypergraph] {
        &self.components
    }

    /// Largest edge size over all components.
    pub fn degree(&self) -> usize {
        self.components.iter().map(Hypergraph::max_edge_size).max().unwrap_or(0)
    }

    /// Largest vertex degree over all components.
    pub fn multiplicity(&self) -> usize {
        self.components.iter().map(Hypergraph::max_degree).max().unwrap_or(0)
    }

    pub fn eval_bits(&self, x: &BitVector) -> Result<Vec<u64>> {
        self.components.iter().map(|h| poly::eval_bits(h, x)).collect()
    }
}

/// A finite point set in `R^k`, optionally labelled by hypercube preimages.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSet {
    k: usize,
    points: Vec<Vec<f64>>,
    /// Lexicographically smallest preimage of each point.
    preimages: Option<Vec<BitVector>>,
}

impl ImageSet {
    pub fn explicit(points: Vec<Vec<f64>>) -> Result<Self> {
        let k = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::param("points", "need at least one point"))?;
        if let Some(p) = points.iter().find(|p| p.len() != k) {
            return Err(Error::LengthMismatch {
                expected: k,
                actual: p.len(),
            });
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::param("points", "coordinates must be finite"));
        }
        Ok(Self {
            k,
            points,
            preimages: None,
        })
    }

    /// `ψ({0,1}^n)`, deduplicated, in order of first preimage.
    pub fn hypercube(map: &PolyMap) -> Result<Self> {
        if map.n() > MAX_CUBE_N {
            return Err(Error::BudgetExceeded {
                required: 1u128 << map.n(),
                budget: 1u128 << MAX_CUBE_N,
            });
        }
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut points = Vec::new();
        let mut preimages = Vec::new();
        for x in BitVector::all(map.n()) {
            let y = map.eval_bits(&x)?;
            if seen.insert(y.clone()) {
                points.push(y.into_iter().map(|v| v as f64).collect());
                preimages.push(x);
            }
        }
        Ok(Self {
            k: map.k(),
            points,
            preimages: Some(preimages),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn preimage(&self, index: usize) -> Option<&BitVector> {
        self.preimages.as_ref().map(|p| &p[index])
    }

    /// `c · T`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            k: self.k,
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(|v| v * c).collect())
                .collect(),
            preimages: self.preimages.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerMax {
    pub value: f64,
    /// Index into [`ImageSet::points`].
    pub index: usize,
    /// Smallest hypercube preimage attaining the maximum, if known.
    pub argmax: Option<BitVector>,
}

/// `max_{y ∈ T} ⟨g, y⟩`; ties go to the earliest point, which for hypercube
/// images is the lexicographically smallest `x`.
pub fn gw_exact_inner(set: &ImageSet, g: &[f64]) -> Result<InnerMax> {
    if g.len() != set.k {
        return Err(Error::LengthMismatch {
            expected: set.k,
            actual: g.len(),
        });
    }
    let (index, value) = best_point(set, g);
    Ok(InnerMax {
        value,
        index,
        argmax: set.preimage(index).cloned(),
    })
}

fn best_point(set: &ImageSet, g: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, p) in set.points.iter().enumerate() {
        let v: f64 = p.iter().zip(g).map(|(a, b)| a * b).sum();
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Monte Carlo estimate of `E max_{y∈T} ⟨g, y⟩` for standard Gaussian `g`.
pub fn gw_estimate(set: &ImageSet, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    let values = map_streams(samples, seed, |_, rng| {
        let g = BoxMuller::new(rng).vector(set.k);
        best_point(set, &g).1
    });
    Ok(McEstimate::from_values(values, seed))
}

/// Largest singular value from power iteration, bracketed from above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    /// `sqrt` of the last Rayleigh quotient of `AᵀA`; never above the true norm.
    pub estimate: f64,
    /// `sqrt(max row sum · max column sum)`.
    pub upper_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITERS: usize = 10_000;

/// Power iteration on `AᵀA` from the normalized all-ones vector, stopping once
/// successive Rayleigh quotients agree to relative tolerance `tol`.
pub fn spectral_norm<A: LinearOperator + ?Sized>(a: &A, tol: f64, max_iters: usize) -> Result<NormEstimate> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    let dim = a.dim();
    let upper_bound = a.norm_upper_bound();
    if dim == 0 {
        return Ok(NormEstimate {
            estimate: 0.0,
            upper_bound,
            iterations: 0,
            converged: true,
        });
    }
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut av = vec![0.0; dim];
    let mut u = vec![0.0; dim];
    let mut prev = f64::NAN;
    for it in 1..=max_iters {
        a.apply(&v, &mut av);
        let lambda: f64 = av.iter().map(|x| x * x).sum();
        if lambda == 0.0 {
            return Ok(NormEstimate {
                estimate: 0.0,
                upper_bound,
                iterations: it,
                converged: true,
            });
        }
        if (lambda - prev).abs() < tol * lambda {
            return Ok(NormEstimate {
                estimate: lambda.sqrt(),
                upper_bound,
                iterations: it,
                converged: true,
            });
        }
        prev = lambda;
        a.apply_transpose(&av, &mut u);
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().zip(&u).for_each(|(vi, ui)| *vi = ui / norm);
    }
    Ok(NormEstimate {
        estimate: prev.sqrt(),
        upper_bound,
        iterations: max_iters,
        converged: false,
    })
}

/// Spectral norm of a dense row-major square matrix by eigen or singular value
/// decomposition.
pub fn dense_norm(dim: usize, data: &[f64], symmetric: bool) -> f64 {
    let m = DMatrix::from_row_slice(dim, dim, data);
    if dim == 0 {
        return 0.0;
    }
    if symmetric {
        m.symmetric_eigenvalues().iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    } else {
        m.singular_values().max()
    }
}

/// Adjacency matrix of a uniformly random perfect matching on `[dim]`.
pub fn random_matching_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<SparseMatrix> {
    if dim % 2 != 0 || dim == 0 {
        return Err(Error::param("N", "must be positive and even"));
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.shuffle(rng);
    let triplets = order
        .chunks(2)
        .flat_map(|p| [(p[0], p[1], 1), (p[1], p[0], 1)]);
    SparseMatrix::from_triplets(dim, triplets)
}

/// `k` independent random perfect matchings on `[dim]`.
pub fn random_matchings(dim: usize, k: usize, seed: u64) -> Result<Vec<SparseMatrix>> {
    (0..k)
        .map(|i| random_matching_matrix(dim, &mut stream(seed, i as u64)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TjReport {
    pub dim: usize,
    /// `E‖Σ g_i A_i‖`.
    pub lhs: McEstimate,
    /// `sqrt(ln N) · (Σ ‖A_i‖²)^{1/2}`.
    pub rhs: f64,
    pub ratio: f64,
    pub norms: Vec<f64>,
}

/// Compares `E‖Σ g_i A_i‖` with `sqrt(ln N) (Σ ‖A_i‖²)^{1/2}`. Norms are exact
/// dense decompositions.
pub fn tj_ratio_experiment(matrices: &[SparseMatrix], samples: usize, seed: u64) -> Result<TjReport> {
    let dim = matrices
        .first()
        .map(SparseMatrix::dim)
        .ok_or_else(|| Error::param("matrices", "need at least one matrix"))?;
    if dim < 2 {
        return Err(Error::param("N", "must be at least 2"));
    }
    if samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    WeightedSum::new(matrices, vec![0.0; matrices.len()])?;
    let symmetric = matrices.iter().all(SparseMatrix::is_symmetric);
    let norms: Vec<f64> = matrices
        .iter()
        .map(|a| dense_norm(dim, &a.to_dense(), a.is_symmetric()))
        .collect();
    let values = map_streams(samples, seed, |_, rng| {
        let g = BoxMuller::new(rng).vector(matrices.len());
        let sum = WeightedSum::new(matrices, g).expect("dimensions checked");
        dense_norm(dim, &sum.to_dense(), symmetric)
    });
    let lhs = McEstimate::from_values(values, seed);
    let rhs = (dim as f64).ln().sqrt() * norms.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ratio = if rhs > 0.0 { lhs.mean / rhs } else { 0.0 };
    Ok(TjReport {
        dim,
        lhs,
        rhs,
        ratio,
        norms,
    })
}

/// `n t sqrt(k n^{1-1/⌈d/2⌉} ln n)`.
pub fn theorem_bound(n: usize, k: usize, d: usize, t: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("n", "must be at least 2"));
    }
    if d == 0 {
        return Err(Error::param("d", "must be positive"));
    }
    let nf = n as f64;
    let half = d.div_ceil(2) as f64;
    Ok(nf * t as f64 * (k as f64 * nf.powf(1.0 - 1.0 / half) * nf.ln()).sqrt())
}

/// Per-sample comparison of the quadratic inner maximum with the operator
/// norm of the matching sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticCheck {
    pub gw: McEstimate,
    /// `n ‖Σ g_i A_i‖` with `A_i` the half-adjacency matrices.
    pub norm_bound: McEstimate,
    /// Whether every sample satisfied the inequality.
    pub holds: bool,
}

/// For `ψ_i(x) = ½ xᵀM_i x`, checks `max_x Σ g_i ψ_i(x) <= n ‖Σ g_i M_i / 2‖`
/// sample by sample.
pub fn quadratic_cross_check(matrices: &[SparseMatrix], samples: usize, seed: u64) -> Result<QuadraticCheck> {
    let map = PolyMap::from_adjacency(matrices)?;
    let set = ImageSet::hypercube(&map)?;
    if samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    let n = map.n();
    let pairs = map_streams(samples, seed, |_, rng| {
        let g = BoxMuller::new(rng).vector(matrices.len());
        let inner = best_point(&set, &g).1;
        let half: Vec<f64> = g.iter().map(|v| v / 2.0).collect();
        let sum = WeightedSum::new(matrices, half).expect("dimensions checked");
        (inner, n as f64 * dense_norm(n, &sum.to_dense(), true))
    });
    // slack for the eigensolver's rounding
    let holds = pairs.iter().all(|(a, b)| *a <= b * (1.0 + 1e-9) + 1e-9);
    Ok(QuadraticCheck {
        gw: McEstimate::from_values(pairs.iter().map(|p| p.0), seed),
        norm_bound: McEstimate::from_values(pairs.iter().map(|p| p.1), seed),
        holds,
    })
}

/// One rung of a width-versus-bound ladder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderRow {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub t: usize,
    pub gw: McEstimate,
    pub bound: f64,
}

impl LadderRow {
    pub fn ratio(&self) -> f64 {
        self.gw.mean / self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderFit {
    /// Smallest `C` with `gw <= C · bound` on every rung.
    pub fitted_c: f64,
    pub ratios: Vec<f64>,
    /// Whether no later rung exceeds the first by more than three standard
    /// errors.
    pub nongrowing: bool,
    /// Least-squares slope of `ln gw` against `ln n`.
    pub observed_exponent: f64,
}

pub fn ladder_row(map: &PolyMap, samples: usize, seed: u64) -> Result<LadderRow> {
    let set = ImageSet::hypercube(map)?;
    let gw = gw_estimate(&set, samples, seed)?;
    let (n, k, d, t) = (map.n(), map.k(), map.degree(), map.multiplicity());
    Ok(LadderRow {
        n,
        k,
        d,
        t,
        gw,
        bound: theorem_bound(n, k, d.max(1), t)?,
    })
}

pub fn fit_ladder(rows: &[LadderRow]) -> Result<LadderFit> {
    if rows.is_empty() {
        return Err(Error::param("ladder", "need at least one rung"));
    }
    let ratios: Vec<f64> = rows.iter().map(LadderRow::ratio).collect();
    let fitted_c = ratios.iter().copied().fold(0.0, f64::max);
    let first = &rows[0];
    let nongrowing = rows.iter().all(|row| {
        let slack = 3.0 * (first.gw.std_error / first.bound + row.gw.std_error / row.bound);
        row.ratio() <= first.ratio() + slack
    });
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.gw.mean > 0.0)
        .map(|r| ((r.n as f64).ln(), r.gw.mean.ln()))
        .collect();
    let observed_exponent = if pts.len() >= 2 {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            f64::NAN
        }
    } else {
        f64::NAN
    };
    Ok(LadderFit {
        fitted_c,
        ratios,
        nongrowing,
        observed_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

    #[test]
    fn inner_max_examples() {
        let zero = ImageSet::explicit(vec![vec![0.0, 0.0]]).unwrap();
        assert_eq!(gw_exact_inner(&zero, &[1.5, -2.0]).unwrap().value, 0.0);

        let id = ImageSet::hypercube(&PolyMap::identity(4).unwrap()).unwrap();
        let g = [0.3, -1.0, 2.0, 0.0];
        let best = gw_exact_inner(&id, &g).unwrap();
        assert!((best.value - 2.3).abs() < 1e-12);
        // g_3 = 0 ties; the smaller x leaves it at 0
        assert_eq!(best.argmax.unwrap().members(), vec![0, 2]);

        let edge = PolyMap::new(vec![Hypergraph::new(2, [vec![0, 1]]).unwrap()]).unwrap();
        let set = ImageSet::hypercube(&edge).unwrap();
        let best = gw_exact_inner(&set, &[-1.0]).unwrap();
        assert_eq!(best.value, 0.0);
        assert_eq!(best.argmax.unwrap(), BitVector::zeros(2));
        assert!(gw_exact_inner(&set, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn hypercube_images_deduplicate() {
        let map = PolyMap::new(vec![Hypergraph::new(3, [vec![0, 1, 2]]).unwrap()]).unwrap();
        let set = ImageSet::hypercube(&map).unwrap();
        assert_eq!(set.points(), &[vec![0.0], vec![1.0]]);
        assert_eq!(set.preimage(1).unwrap().members(), vec![0, 1, 2]);
    }

    #[test]
    fn identity_width() {
        let set = ImageSet::hypercube(&PolyMap::identity(10).unwrap()).unwrap();
        let est = gw_estimate(&set, 10_000, 1).unwrap();
        let target = 10.0 * INV_SQRT_2PI;
        assert!((est.mean - target).abs() <= 0.03 * target, "{est:?}");
    }

    #[test]
    fn two_point_width() {
        let set = ImageSet::explicit(vec![vec![-1.0], vec![1.0]]).unwrap();
        let est = gw_estimate(&set, 20_000, 2).unwrap();
        assert!(est.within((2.0 / std::f64::consts::PI).sqrt(), 4.0), "{est:?}");
    }

    #[test]
    fn singleton_width_is_zero() {
        let set = ImageSet::explicit(vec![vec![3.0, -1.0, 0.5]]).unwrap();
        let est = gw_estimate(&set, 5_000, 3).unwrap();
        assert!(est.within(0.0, 3.0), "{est:?}");
    }

    #[test]
    fn width_is_homogeneous() {
        let map = PolyMap::random(8, 3, 2, 2, 4).unwrap();
        let set = ImageSet::hypercube(&map).unwrap();
        let a = gw_estimate(&set, 2000, 5).unwrap();
        let b = gw_estimate(&set.scaled(2.5), 2000, 5).unwrap();
        // same Gaussian draws, so the scaling is exact up to rounding
        assert!((b.mean - 2.5 * a.mean).abs() < 1e-9);
    }

    #[test]
    fn symmetric_set_has_nonnegative_width() {
        let pts = vec![vec![1.0, 2.0], vec![-1.0, -2.0], vec![0.5, -3.0], vec![-0.5, 3.0]];
        let set = ImageSet::explicit(pts).unwrap();
        let mut bm = BoxMuller::new(stream(6, 0));
        for _ in 0..200 {
            let g = bm.vector(2);
            let neg: Vec<f64> = g.iter().map(|v| -v).collect();
            let s = gw_exact_inner(&set, &g).unwrap().value + gw_exact_inner(&set, &neg).unwrap().value;
            assert!(s >= 0.0);
        }
    }

    #[test]
    fn random_map_respects_caps() {
        let map = PolyMap::random(12, 5, 3, 2, 8).unwrap();
        assert_eq!(map.k(), 5);
        assert!(map.multiplicity() <= 2);
        assert!(map.components().iter().all(|h| h.is_uniform(3)));
        assert_eq!(map, PolyMap::random(12, 5, 3, 2, 8).unwrap());
    }

    #[test]
    fn norm_examples() {
        let id = SparseMatrix::from_triplets(5, (0..5).map(|i| (i, i, 1))).unwrap();
        let est = spectral_norm(&id, DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert!((est.estimate - 1.0).abs() < 1e-9 && est.converged);

        let matching = random_matching_matrix(10, &mut stream(1, 0)).unwrap();
        let est = spectral_norm(&matching, DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert!((est.estimate - 1.0).abs() < 1e-9);

        let ones = SparseMatrix::from_triplets(4, (0..16).map(|i| (i / 4, i % 4, 1))).unwrap();
        let est = spectral_norm(&ones, DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert!((est.estimate - 4.0).abs() < 1e-9);
        assert_eq!(est.upper_bound, 4.0);

        let zero = SparseMatrix::zeros(3);
        assert_eq!(spectral_norm(&zero, DEFAULT_TOL, 10).unwrap().estimate, 0.0);
        assert!(spectral_norm(&zero, 0.0, 10).is_err());
    }

    #[test]
    fn power_iteration_matches_dense_decomposition() {
        let triplets = [(0, 1, 2), (1, 0, 2), (1, 2, 1), (2, 1, 1), (0, 0, 3), (2, 3, 5), (3, 2, 5)];
        let a = SparseMatrix::from_triplets(4, triplets).unwrap();
        let est = spectral_norm(&a, 1e-12, DEFAULT_MAX_ITERS).unwrap();
        let exact = dense_norm(4, &a.to_dense(), true);
        assert!((est.estimate - exact).abs() < 1e-5 * exact, "{} vs {}", est.estimate, exact);
        assert!(est.estimate <= exact * (1.0 + 1e-12));
        assert!(exact <= est.upper_bound);

        let upper = SparseMatrix::from_triplets(3, [(0, 1, 1), (0, 2, 2), (1, 2, 3)]).unwrap();
        let est = spectral_norm(&upper, 1e-12, DEFAULT_MAX_ITERS).unwrap();
        let exact = dense_norm(3, &upper.to_dense(), false);
        assert!((est.estimate - exact).abs() < 1e-5 * exact);
    }

    #[test]
    fn tj_single_matrix() {
        let a = random_matchings(16, 1, 3).unwrap();
        let report = tj_ratio_experiment(&a, 20_000, 4).unwrap();
        let expect = (2.0 / std::f64::consts::PI).sqrt();
        assert!(report.lhs.within(expect, 4.0), "{report:?}");
        assert!((report.ratio - report.lhs.mean / 16f64.ln().sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tj_zero_matrices() {
        let zeros = vec![SparseMatrix::zeros(8); 3];
        let report = tj_ratio_experiment(&zeros, 10, 0).unwrap();
        assert_eq!(report.lhs.mean, 0.0);
        assert_eq!(report.ratio, 0.0);
        let mixed = vec![SparseMatrix::zeros(8), SparseMatrix::zeros(6)];
        assert!(tj_ratio_experiment(&mixed, 10, 0).is_err());
    }

    #[test]
    fn tj_matching_sum_bounded() {
        let a = random_matchings(64, 16, 9).unwrap();
        let report = tj_ratio_experiment(&a, 50, 10).unwrap();
        assert!(report.ratio <= 4.0);
        assert!(report.norms.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn bound_examples() {
        let b = theorem_bound(16, 4, 2, 1).unwrap();
        assert!((b - 16.0 * (4.0 * 16f64.ln()).sqrt()).abs() < 1e-12);
        assert!((b - 53.3).abs() < 0.05);
        assert_eq!(theorem_bound(20, 3, 1, 2).unwrap(), theorem_bound(20, 3, 2, 2).unwrap());
        assert!(theorem_bound(1, 1, 1, 1).is_err());
        let mut last = 0.0;
        for n in 2..40 {
            let v = theorem_bound(n, 3, 4, 2).unwrap();
            assert!(v >= last);
            last = v;
        }
        assert!(theorem_bound(10, 4, 3, 2).unwrap() >= theorem_bound(10, 3, 3, 2).unwrap());
        assert!(theorem_bound(10, 3, 3, 3).unwrap() >= theorem_bound(10, 3, 3, 2).unwrap());
    }

    #[test]
    fn quadratic_bound_holds() {
        let a = random_matchings(10, 4, 12).unwrap();
        let check = quadratic_cross_check(&a, 300, 13).unwrap();
        assert!(check.holds);
        assert!(check.gw.mean <= check.norm_bound.mean);
    }

    #[test]
    fn identity_ladder_does_not_grow() {
        let rows: Vec<LadderRow> = [4, 8, 16]
            .iter()
            .map(|&n| ladder_row(&PolyMap::identity(n).unwrap(), 2000, 14).unwrap())
            .collect();
        let fit = fit_ladder(&rows).unwrap();
        assert!(fit.nongrowing, "{fit:?}");
        assert!((fit.observed_exponent - 1.0).abs() < 0.1);
        for row in &rows {
            assert!(row.gw.mean <= fit.fitted_c * row.bound + 1e-12);
        }
    }
}
