//! Exact construction of the tensor-power matrix for a `2r`-uniform
//! hypergraph.
//!
//! Coordinates of `x^{⊗m}` are indexed by maps `f: [m] → [n]`. Given a
//! maximal matching `M` of `2r`-sets, a map `g` *complements* `f` when the two
//! differ on exactly one `r`-set of positions `I` and `f(I) ∪ g(I)` is an edge
//! `S` of `M`; the pair then *covers* `S` and, for sign vectors,
//! `(x^{⊗m})_f (x^{⊗m})_g = Π_{j∈S} x_j`. Keeping only pairs whose first map
//! is `s`-good and summing over a matching decomposition of `H` gives a
//! symmetric integer matrix `A` with
//! `⟨A x^{⊗m}, x^{⊗m}⟩ = 2 · cover_count · p_H(x)` on `{-1,1}^n`.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{complete_to_maximal_matching, Hypergraph};
use crate::poly::{self, SignVector};
use crate::sparse::SparseMatrix;

/// Default cap on the number of maps `n^m` enumerated.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// A map `f: [m] → [n]` encoded by its base-`n` rank `Σ f(i) n^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MapWord {
    m: usize,
    n: usize,
    rank: u64,
}

impl MapWord {
    pub fn new(m: usize, n: usize, rank: u64) -> Result<Self> {
        let count = checked_pow(n, m).ok_or(Error::Overflow("n^m"))?;
        if n == 0 || rank >= count {
            return Err(Error::param("rank", format!("must be below n^m = {count}")));
        }
        Ok(Self { m, n, rank })
    }

    pub fn from_values(n: usize, values: &[usize]) -> Result<Self> {
        if let Some(&v) = values.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        checked_pow(n, values.len()).ok_or(Error::Overflow("n^m"))?;
        let rank = values.iter().rev().fold(0u64, |acc, &v| acc * n as u64 + v as u64);
        Ok(Self {
            m: values.len(),
            n,
            rank,
        })
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(f(0), …, f(m-1))`.
    pub fn values(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.m);
        decode_into(self.rank, self.n, self.m, &mut out);
        out
    }

    /// `|f^{-1}(i)|` for every `i ∈ [n]`.
    pub fn histogram(&self) -> Vec<u64> {
        let mut hist = vec![0u64; self.n];
        for v in self.values() {
            hist[v] += 1;
        }
        hist
    }
}

fn checked_pow(n: usize, m: usize) -> Option<u64> {
    (n as u64).checked_pow(u32::try_from(m).ok()?)
}

fn decode_into(mut rank: u64, n: usize, m: usize, out: &mut Vec<usize>) {
    out.clear();
    for _ in 0..m {
        out.push((rank % n as u64) as usize);
        rank /= n as u64;
    }
}

/// Parameters of the construction: `n` vertices, words of length `m`,
/// matching edges of size `2r`, goodness threshold `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LiftParams {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub s: u64,
    /// Largest `n^m` that may be enumerated.
    pub budget: u64,
}

impl LiftParams {
    pub fn new(n: usize, m: usize, r: usize, s: u64) -> Result<Self> {
        let p = Self {
            n,
            m,
            r,
            s,
            budget: DEFAULT_BUDGET,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::param("r", "must be positive"));
        }
        if self.n < 2 * self.r {
            return Err(Error::param("n", format!("must be at least 2r = {}", 2 * self.r)));
        }
        if self.m < self.r {
            return Err(Error::param("m", format!("must be at least r = {}", self.r)));
        }
        if self.s == 0 {
            return Err(Error::param("s", "must be positive"));
        }
        Ok(())
    }

    /// `N = n^m`, checked against the budget.
    pub fn num_maps(&self) -> Result<u64> {
        let required = checked_pow(self.n, self.m);
        match required {
            Some(count) if count <= self.budget => Ok(count),
            _ => Err(Error::BudgetExceeded {
                required: (self.n as u128).saturating_pow(self.m as u32),
                budget: u128::from(self.budget),
            }),
        }
    }

    pub fn r_factorial(&self) -> u64 {
        (1..=self.r as u64).product()
    }
}

/// Elementary symmetric polynomial `e_r` of `values`.
pub fn elementary_symmetric(values: &[u64], r: usize) -> u64 {
    let mut e = vec![0u64; r + 1];
    e[0] = 1;
    for &v in values {
        for k in (1..=r).rev() {
            e[k] += e[k - 1] * v;
        }
    }
    e[r]
}

/// `μ_S(f) = Σ_{T ⊆ S, |T| = r} Π_{i∈T} |f^{-1}(i)|`: the number of
/// `r`-sets of positions mapped injectively into `S`.
pub fn mu_s(f: &MapWord, set: &[usize], r: usize) -> Result<u64> {
    if set.len() != 2 * r {
        return Err(Error::param("S", format!("must have 2r = {} elements", 2 * r)));
    }
    let hist = f.histogram();
    let counts: Vec<u64> = set.iter().map(|&v| hist.get(v).copied().unwrap_or(0)).collect();
    Ok(elementary_symmetric(&counts, r))
}

/// Vertex → index of the matching edge containing it.
struct Owners {
    owner: Vec<Option<usize>>,
}

impl Owners {
    fn new(matching: &Hypergraph, r: usize) -> Result<Self> {
        if !matching.is_uniform(2 * r) {
            return Err(Error::NotUniform { expected: 2 * r });
        }
        if !matching.is_matching() {
            return Err(Error::NotMatching("two edges share a vertex".into()));
        }
        let mut owner = vec![None; matching.n()];
        for (k, e) in matching.edges().iter().enumerate() {
            for &v in e {
                owner[v] = Some(k);
            }
        }
        Ok(Self { owner })
    }

    /// `φ(f)` from the values of `f`, touching only edges `f` meets.
    fn phi(&self, values: &[usize], matching: &Hypergraph, r: usize) -> u64 {
        let mut touched: Vec<usize> = values.iter().filter_map(|&v| self.owner[v]).collect();
        touched.sort_unstable();
        touched.dedup();
        touched
            .into_iter()
            .map(|k| {
                let counts: Vec<u64> = matching.edges()[k]
                    .iter()
                    .map(|&v| values.iter().filter(|&&w| w == v).count() as u64)
                    .collect();
                elementary_symmetric(&counts, r)
            })
            .sum()
    }

    /// Number of `r`-sets `I` of positions with `f(I) ∪ g(I) ∈ M`.
    fn covering_subsets(&self, f: &[usize], g: &[usize], matching: &Hypergraph, r: usize) -> usize {
        let mut union = Vec::with_capacity(2 * r);
        (0..f.len())
            .combinations(r)
            .filter(|positions| {
                union.clear();
                union.extend(positions.iter().map(|&i| f[i]));
                union.extend(positions.iter().map(|&i| g[i]));
                union.sort_unstable();
                union.dedup();
                union.len() == 2 * r
                    && match self.owner[union[0]] {
                        Some(k) => union.iter().all(|&v| self.owner[v] == Some(k)),
                        None => false,
                    }
                    && matching.edges()[self.owner[union[0]].unwrap()].len() == union.len()
            })
            .count()
    }

    /// Calls `emit(g_values, g_rank, covered_edge)` for every map `g`
    /// complementing `f`.
    fn for_each_complement(
        &self,
        f: &[usize],
        f_rank: u64,
        n: usize,
        matching: &Hypergraph,
        r: usize,
        mut emit: impl FnMut(&[usize], u64, usize),
    ) {
        let m = f.len();
        let powers: Vec<u64> = (0..m).map(|i| (n as u64).pow(i as u32)).collect();
        let mut g = f.to_vec();
        for positions in (0..m).combinations(r) {
            let Some(edge) = self.owner[f[positions[0]]] else {
                continue;
            };
            let image: Vec<usize> = positions.iter().map(|&i| f[i]).collect();
            if image.iter().any(|&v| self.owner[v] != Some(edge)) || !image.iter().all_unique() {
                continue;
            }
            let rest: Vec<usize> = matching.edges()[edge]
                .iter()
                .copied()
                .filter(|v| !image.contains(v))
                .collect();
            for order in rest.iter().copied().permutations(r) {
                let mut rank = f_rank;
                for (&i, &v) in positions.iter().zip(&order) {
                    g[i] = v;
                    rank = rank - f[i] as u64 * powers[i] + v as u64 * powers[i];
                }
                if self.covering_subsets(f, &g, matching, r) == 1 {
                    emit(&g, rank, edge);
                }
                for &i in &positions {
                    g[i] = f[i];
                }
            }
        }
    }
}

/// `φ(f) = Σ_{S∈M} μ_S(f)`.
pub fn phi(f: &MapWord, matching: &Hypergraph, r: usize) -> Result<u64> {
    if matching.n() != f.n() {
        return Err(Error::LengthMismatch {
            expected: f.n(),
            actual: matching.n(),
        });
    }
    let owners = Owners::new(matching, r)?;
    Ok(owners.phi(&f.values(), matching, r))
}

/// Whether `1 <= φ(f) <= s`.
pub fn is_good(f: &MapWord, matching: &Hypergraph, r: usize, s: u64) -> Result<bool> {
    let p = phi(f, matching, r)?;
    Ok((1..=s).contains(&p))
}

/// All maps complementing `f`, ascending by rank.
pub fn complements(f: &MapWord, matching: &Hypergraph, r: usize) -> Result<Vec<MapWord>> {
    if matching.n() != f.n() {
        return Err(Error::LengthMismatch {
            expected: f.n(),
            actual: matching.n(),
        });
    }
    let owners = Owners::new(matching, r)?;
    let mut out = Vec::new();
    owners.for_each_complement(&f.values(), f.rank(), f.n(), matching, r, |_, rank, _| {
        out.push(MapWord {
            m: f.m(),
            n: f.n(),
            rank,
        })
    });
    out.sort_unstable();
    Ok(out)
}

/// The ordered pairs `(f, g)` with `f` `s`-good and `g` complementing `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    /// 0/1 incidence matrix on `[n]^m`.
    pub incidence: SparseMatrix,
    /// Number of pairs covering each edge of the matching, in edge order.
    pub cover_counts: Vec<u64>,
}

impl PairSet {
    pub fn len(&self) -> u64 {
        self.cover_counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether every matching edge is covered by the same number of pairs.
    pub fn equal_cover(&self) -> bool {
        self.cover_counts.windows(2).all(|w| w[0] == w[1])
    }

    /// `|P| / |M|` when the cover counts are all equal.
    pub fn cover_count(&self) -> Option<u64> {
        match self.cover_counts.first() {
            Some(&c) if self.equal_cover() => Some(c),
            _ => None,
        }
    }
}

/// Enumerates `P` for `matching`; pairs covering an edge whose index fails
/// `keep` are counted in `cover_counts` but left out of the returned triplets.
fn enumerate_pairs(
    params: &LiftParams,
    matching: &Hypergraph,
    keep: impl Fn(usize) -> bool,
) -> Result<(Vec<(usize, usize, u64)>, Vec<u64>)> {
    params.validate()?;
    if matching.n() != params.n {
        return Err(Error::LengthMismatch {
            expected: params.n,
            actual: matching.n(),
        });
    }
    let count = params.num_maps()?;
    let owners = Owners::new(matching, params.r)?;
    let mut triplets = Vec::new();
    let mut cover_counts = vec![0u64; matching.num_edges()];
    let mut f = Vec::with_capacity(params.m);
    for rank in 0..count {
        decode_into(rank, params.n, params.m, &mut f);
        let phi = owners.phi(&f, matching, params.r);
        if !(1..=params.s).contains(&phi) {
            continue;
        }
        owners.for_each_complement(&f, rank, params.n, matching, params.r, |_, g, edge| {
            cover_counts[edge] += 1;
            if keep(edge) {
                triplets.push((rank as usize, g as usize, 1));
            }
        });
    }
    Ok((triplets, cover_counts))
}

/// Builds the incidence matrix of `P` for a matching of `2r`-sets.
pub fn build_pair_set(params: &LiftParams, matching: &Hypergraph) -> Result<PairSet> {
    let (triplets, cover_counts) = enumerate_pairs(params, matching, |_| true)?;
    let dim = params.num_maps()? as usize;
    Ok(PairSet {
        incidence: SparseMatrix::from_triplets(dim, triplets)?,
        cover_counts,
    })
}

/// Diagnostics of one matching class of the decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    /// Edges of `H` in this class.
    pub edges: usize,
    /// Size of the maximal completion.
    pub matching_size: usize,
    /// `|P_i|` before pruning.
    pub pairs: u64,
    /// Pairs kept after dropping those covering completion edges.
    pub kept_pairs: u64,
    pub equal_cover: bool,
    pub max_row_count: u64,
    pub max_col_count: u64,
}

/// The assembled symmetric matrix and its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixLemma {
    pub params: LiftParams,
    /// `A = B + Bᵀ` with `B` the sum of the pruned incidence matrices.
    pub matrix: SparseMatrix,
    /// `|P_i| / |M_i|`, the same for every class.
    pub cover_count: u64,
    pub classes: Vec<ClassReport>,
    pub max_degree: usize,
    pub max_row_sum: u64,
    /// `2 Δ(H) s² r!`.
    pub row_sum_bound: u64,
}

impl MatrixLemma {
    pub fn num_colors(&self) -> usize {
        self.classes.len()
    }
}

/// Runs the full construction for a `2r`-uniform hypergraph on `params.n`
/// vertices.
///
/// The greedy edge coloring splits `H` into matchings `F_i`; each is completed
/// to a maximal matching `M_i` by ascending packing. Maximal matchings all have
/// `⌊n/2r⌋` edges and are related by vertex permutations, so the pair sets
/// `P_i` have equal size and each edge is covered `|P_i|/|M_i|` times.
pub fn build_matrix_lemma(h: &Hypergraph, params: &LiftParams) -> Result<MatrixLemma> {
    params.validate()?;
    if h.n() != params.n {
        return Err(Error::LengthMismatch {
            expected: params.n,
            actual: h.n(),
        });
    }
    if !h.is_uniform(2 * params.r) {
        return Err(Error::NotUniform {
            expected: 2 * params.r,
        });
    }
    let dim = params.num_maps()? as usize;
    let coloring = h.greedy_edge_coloring();
    let mut classes = Vec::with_capacity(coloring.num_colors);
    let mut all_triplets = Vec::new();
    let mut cover_count = None;

    let reference = complete_to_maximal_matching(&Hypergraph::empty(params.n), params.r)?;
    let mut class_list = h.matchings(&coloring);
    if class_list.is_empty() {
        // no edges: the cover count still comes from a maximal matching
        let (_, counts) = enumerate_pairs(params, &reference, |_| false)?;
        let c = positive_cover(counts[0])?;
        return Ok(MatrixLemma {
            params: *params,
            matrix: SparseMatrix::zeros(dim),
            cover_count: c,
            classes,
            max_degree: 0,
            max_row_sum: 0,
            row_sum_bound: 0,
        });
    }

    for class in class_list.drain(..) {
        let completed = complete_to_maximal_matching(&class, params.r)?;
        let own = class.num_edges();
        let (triplets, counts) = enumerate_pairs(params, &completed, |edge| edge < own)?;
        let incidence = SparseMatrix::from_triplets(dim, triplets.iter().copied())?;
        let pairs: u64 = counts.iter().sum();
        let equal = counts.windows(2).all(|w| w[0] == w[1]);
        let c = pairs / completed.num_edges() as u64;
        if !equal || pairs % completed.num_edges() as u64 != 0 {
            return Err(Error::param(
                "matching",
                "pair counts differ across matching edges",
            ));
        }
        match cover_count {
            None => cover_count = Some(c),
            Some(prev) if prev != c => {
                return Err(Error::param(
                    "matching",
                    format!("cover counts differ between classes ({prev} vs {c})"),
                ))
            }
            _ => {}
        }
        classes.push(ClassReport {
            edges: own,
            matching_size: completed.num_edges(),
            pairs,
            kept_pairs: triplets.len() as u64,
            equal_cover: equal,
            max_row_count: incidence.max_row_sum(),
            max_col_count: incidence.max_col_sum(),
        });
        all_triplets.extend(triplets);
    }

    let cover_count = positive_cover(cover_count.expect("at least one class"))?;
    let b = SparseMatrix::from_triplets(dim, all_triplets)?;
    let matrix = b.add(&b.transpose())?;
    let max_degree = h.max_degree();
    let max_row_sum = matrix.max_row_sum();
    Ok(MatrixLemma {
        params: *params,
        matrix,
        cover_count,
        classes,
        max_degree,
        max_row_sum,
        row_sum_bound: 2 * max_degree as u64 * params.s * params.s * params.r_factorial(),
    })
}

fn positive_cover(c: u64) -> Result<u64> {
    if c == 0 {
        return Err(Error::param("s", "no complementary pair is s-good, so the cover count is 0"));
    }
    Ok(c)
}

/// `x^{⊗m}` for a sign vector, indexed by map rank.
pub fn tensor_power_signs(x: &SignVector, m: usize) -> Vec<i8> {
    let n = x.len();
    let mut y = vec![1i8];
    for _ in 0..m {
        let block = y.len();
        let mut next = Vec::with_capacity(block * n);
        for &xv in x.signs() {
            next.extend(y.iter().map(|&v| v * xv));
        }
        debug_assert_eq!(next.len(), block * n);
        y = next;
    }
    y
}

/// A sign vector at which the identity fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub x: Vec<i8>,
    /// `⟨A x^{⊗m}, x^{⊗m}⟩`.
    pub quadratic_form: i128,
    /// `2 · cover_count · p_H(x)`.
    pub expected: i128,
}

/// Outcome of an exhaustive identity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub holds: bool,
    pub checked: u64,
    pub counterexample: Option<Counterexample>,
}

/// Largest `n` accepted by the exhaustive sign-vector checks.
pub const MAX_IDENTITY_N: usize = 16;

/// Checks `⟨A x^{⊗m}, x^{⊗m}⟩ = 2 · cover_count · p_H(x)` on all of
/// `{-1,1}^n`, stopping at the first failure.
pub fn check_identity(
    matrix: &SparseMatrix,
    h: &Hypergraph,
    m: usize,
    cover_count: u64,
) -> Result<IdentityCheck> {
    let n = h.n();
    if n > MAX_IDENTITY_N {
        return Err(Error::BudgetExceeded {
            required: 1u128 << n,
            budget: 1u128 << MAX_IDENTITY_N,
        });
    }
    let dim = checked_pow(n, m).ok_or(Error::Overflow("n^m"))?;
    if dim != matrix.dim() as u64 {
        return Err(Error::LengthMismatch {
            expected: dim as usize,
            actual: matrix.dim(),
        });
    }
    let mut checked = 0;
    for x in SignVector::all(n) {
        let y = tensor_power_signs(&x, m);
        let lhs = matrix.sign_quadratic_form(&y);
        let rhs = 2 * i128::from(cover_count) * i128::from(poly::eval_signs(h, &x)?);
        checked += 1;
        if lhs != rhs {
            return Ok(IdentityCheck {
                holds: false,
                checked,
                counterexample: Some(Counterexample {
                    x: x.signs().to_vec(),
                    quadratic_form: lhs,
                    expected: rhs,
                }),
            });
        }
    }
    Ok(IdentityCheck {
        holds: true,
        checked,
        counterexample: None,
    })
}

/// Builds the matrix for `h` and checks the identity exhaustively.
pub fn verify_lift_identity(h: &Hypergraph, params: &LiftParams) -> Result<(MatrixLemma, IdentityCheck)> {
    if h.n() > MAX_IDENTITY_N {
        return Err(Error::BudgetExceeded {
            required: 1u128 << h.n(),
            budget: 1u128 << MAX_IDENTITY_N,
        });
    }
    let lemma = build_matrix_lemma(h, params)?;
    let check = check_identity(&lemma.matrix, h, params.m, lemma.cover_count)?;
    Ok((lemma, check))
}
