//! Hypergraphs of arithmetic progressions in `Z/NZ`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gwidth::PolyMap;
use crate::hypergraph::Hypergraph;
use crate::poly::BitVector;
use crate::rng::stream;

/// Modulus `N` and progression length `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ApParams {
    #[serde(rename = "N")]
    pub modulus: usize,
    pub k: usize,
}

impl ApParams {
    pub fn new(modulus: usize, k: usize) -> Result<Self> {
        if modulus < 3 {
            return Err(Error::param("N", "must be at least 3"));
        }
        if k < 2 {
            return Err(Error::param("k", "must be at least 2"));
        }
        Ok(Self { modulus, k })
    }

    /// `ℓ = k - 1`.
    pub fn ell(&self) -> usize {
        self.k - 1
    }

    fn require_prime(&self) -> Result<()> {
        if !is_prime(self.modulus) {
            return Err(Error::param("N", format!("{} is not prime", self.modulus)));
        }
        if self.k > self.modulus {
            return Err(Error::param("k", format!("must not exceed N = {}", self.modulus)));
        }
        Ok(())
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `{a, a+b, …, a+(k-1)b} mod N` as a sorted vertex list (possibly with
/// repeats removed).
fn progression(a: usize, b: usize, k: usize, modulus: usize) -> Vec<usize> {
    let mut e: Vec<usize> = (0..k).map(|t| (a + t * b) % modulus).collect();
    e.sort_unstable();
    e.dedup();
    e
}

/// One edge per unordered proper `k`-AP: the orbit `{(a,b), (a+(k-1)b, -b)}`
/// is represented by its member with `1 <= b <= (N-1)/2`. Coinciding vertex
/// sets from different orbits stay as parallel edges.
pub fn ap_hypergraph(params: &ApParams) -> Result<Hypergraph> {
    params.require_prime()?;
    let n = params.modulus;
    let mut h = Hypergraph::empty(n);
    for a in 0..n {
        for b in 1..=(n - 1) / 2 {
            h.push_edge(progression(a, b, params.k, n))?;
        }
    }
    Ok(h)
}

/// Like [`ap_hypergraph`] for any modulus, keeping only progressions with `k`
/// distinct elements and differences `b < N/2`.
pub fn ap_hypergraph_loose(params: &ApParams) -> Result<Hypergraph> {
    let n = params.modulus;
    let mut h = Hypergraph::empty(n);
    for a in 0..n {
        for b in (1..n).take_while(|&b| 2 * b < n) {
            let e = progression(a, b, params.k, n);
            if e.len() == params.k {
                h.push_edge(e)?;
            }
        }
    }
    Ok(h)
}

/// The `N` progressions `{x, x+y, …, x+ℓy}`.
pub fn fixed_difference_hypergraph(params: &ApParams, y: usize) -> Result<Hypergraph> {
    params.require_prime()?;
    let n = params.modulus;
    if y % n == 0 {
        return Err(Error::param("y", "must be nonzero mod N"));
    }
    let mut h = Hypergraph::empty(n);
    for x in 0..n {
        h.push_edge(progression(x, y % n, params.k, n))?;
    }
    Ok(h)
}

/// `Λ_k(1_A)`: ordered pairs `(a, b)`, `b ≠ 0`, with `a + tb ∈ A` for all
/// `t < k`.
pub fn lambda_k(set: &BitVector, k: usize) -> u64 {
    let n = set.len();
    let mut count = 0;
    for a in 0..n {
        for b in 1..n {
            if (0..k).all(|t| set.get((a + t * b) % n)) {
                count += 1;
            }
        }
    }
    count
}

/// Number of edges through each unordered vertex pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairIncidence {
    pub max: usize,
    /// Symmetric `n × n` table with zero diagonal.
    pub table: Vec<Vec<usize>>,
}

impl PairIncidence {
    /// The common off-diagonal value, if every pair has the same count.
    pub fn constant(&self) -> Option<usize> {
        let n = self.table.len();
        let first = *self.table.first()?.get(1)?;
        let all = (0..n).all(|i| (0..n).all(|j| i == j || self.table[i][j] == first));
        all.then_some(first)
    }
}

pub fn pair_incidence_profile(h: &Hypergraph) -> PairIncidence {
    let n = h.n();
    let mut table = vec![vec![0usize; n]; n];
    for e in h.edges() {
        for (x, &u) in e.iter().enumerate() {
            for &v in &e[x + 1..] {
                table[u][v] += 1;
                table[v][u] += 1;
            }
        }
    }
    let max = table.iter().flatten().copied().max().unwrap_or(0);
    PairIncidence { max, table }
}

/// Whether `vertex ↦ map[vertex]` sends the edge multiset of `h` onto itself.
pub fn preserves_edges(h: &Hypergraph, map: &[usize]) -> Result<bool> {
    if map.len() != h.n() {
        return Err(Error::LengthMismatch {
            expected: h.n(),
            actual: map.len(),
        });
    }
    let mut original: Vec<Vec<usize>> = h.edges().to_vec();
    let mut image: Vec<Vec<usize>> = h
        .edges()
        .iter()
        .map(|e| {
            let mut f: Vec<usize> = e.iter().map(|&v| map[v]).collect();
            f.sort_unstable();
            f
        })
        .collect();
    original.sort_unstable();
    image.sort_unstable();
    Ok(original == image)
}

fn inverse_mod_prime(x: usize, p: usize) -> usize {
    let (mut result, mut base, mut exp) = (1u64, x as u64 % p as u64, p as u64 - 2);
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    result as usize
}

/// The affine map `x ↦ c + (d-c)(x-a)(b-a)^{-1} mod N` sending `a ↦ c`,
/// `b ↦ d`.
pub fn affine_map(modulus: usize, a: usize, b: usize, c: usize, d: usize) -> Result<Vec<usize>> {
    if !is_prime(modulus) {
        return Err(Error::param("N", format!("{modulus} is not prime")));
    }
    if a == b || c == d || [a, b, c, d].iter().any(|&v| v >= modulus) {
        return Err(Error::param("pairs", "need distinct residues below N"));
    }
    let n = modulus;
    let scale = (d + n - c) % n * inverse_mod_prime((b + n - a) % n, n) % n;
    Ok((0..n).map(|x| (c + scale * ((x + n - a) % n)) % n).collect())
}

/// Draws `trials` pairs of ordered distinct pairs and checks that the affine
/// map between them fixes the AP hypergraph.
pub fn two_transitivity_check(params: &ApParams, trials: usize, seed: u64) -> Result<bool> {
    let h = ap_hypergraph(params)?;
    let n = params.modulus;
    for trial in 0..trials {
        let mut rng = stream(seed, trial as u64);
        let mut distinct = || {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            (a, b)
        };
        let (a, b) = distinct();
        let (c, d) = distinct();
        let map = affine_map(n, a, b, c, d)?;
        if map[a] != c || map[b] != d || !preserves_edges(&h, &map)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The derived hypergraphs `H_i = {e \ {i} : i ∈ e}` of a uniform `H` with
/// edges of size at least 2.
pub fn gradient_hypergraphs(h: &Hypergraph) -> Result<Vec<Hypergraph>> {
    let d = h.max_edge_size();
    if !h.is_uniform(d) {
        return Err(Error::NotUniform { expected: d });
    }
    if d == 1 {
        return Err(Error::param("H", "edges must have at least two vertices"));
    }
    (0..h.n()).map(|i| h.link(i)).collect()
}

/// `∇p_H` for the AP hypergraph, as a polynomial map with `k = N`.
pub fn ap_gradient_map(params: &ApParams) -> Result<PolyMap> {
    PolyMap::new(gradient_hypergraphs(&ap_hypergraph(params)?)?)
}
