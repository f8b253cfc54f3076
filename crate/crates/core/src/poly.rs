//! Hypergraph polynomials `p_H(x) = Σ_{e∈E} Π_{i∈e} x_i`, their gradients and
//! symmetric multilinear forms.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// A point of `{0,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BitVector {
    bits: Vec<bool>,
}

impl BitVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![false; n])
    }

    /// Coordinate `i` is bit `i` of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self::new((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn from_members(n: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(n);
        for i in members {
            v.bits[i] = true;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Indices of the set coordinates, ascending.
    pub fn members(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.bits[i]).collect()
    }

    pub fn to_mask(&self) -> u64 {
        assert!(self.len() <= 64);
        self.bits
            .iter()
            .enumerate()
            .fold(0, |m, (i, &b)| m | (u64::from(b) << i))
    }

    pub fn to_ints(&self) -> Vec<i64> {
        self.bits.iter().map(|&b| i64::from(b)).collect()
    }

    pub fn to_reals(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| f64::from(u8::from(b))).collect()
    }

    pub fn complement(&self) -> Self {
        Self::new(self.bits.iter().map(|b| !b).collect())
    }

    /// All of `{0,1}^n` in lexicographic order (coordinate 0 most significant).
    pub fn all(n: usize) -> impl Iterator<Item = BitVector> {
        assert!(n < 64);
        (0u64..1 << n).map(move |c| BitVector::new((0..n).map(|i| c >> (n - 1 - i) & 1 == 1).collect()))
    }
}

/// A point of `{-1,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SignVector {
    signs: Vec<i8>,
}

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(i) = signs.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::param("signs", format!("entry {i} is not ±1")));
        }
        Ok(Self { signs })
    }

    /// Coordinate `i` is `-1` exactly when bit `i` of `mask` is set.
    pub fn from_mask(n: usize, negative: u64) -> Self {
        Self {
            signs: (0..n).map(|i| if negative >> i & 1 == 1 { -1 } else { 1 }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Bit mask of the negative coordinates.
    pub fn negative_mask(&self) -> u64 {
        assert!(self.len() <= 64);
        self.signs
            .iter()
            .enumerate()
            .fold(0, |m, (i, &s)| m | (u64::from(s < 0) << i))
    }

    pub fn to_ints(&self) -> Vec<i64> {
        self.signs.iter().map(|&s| i64::from(s)).collect()
    }

    pub fn to_reals(&self) -> Vec<f64> {
        self.signs.iter().map(|&s| f64::from(s)).collect()
    }

    /// All of `{-1,1}^n`, indexed by the mask of negative coordinates.
    pub fn all(n: usize) -> impl Iterator<Item = SignVector> {
        assert!(n < 64);
        (0u64..1 << n).map(move |m| SignVector::from_mask(n, m))
    }
}

fn check_len(h: &Hypergraph, len: usize) -> Result<()> {
    if len != h.n() {
        return Err(Error::LengthMismatch {
            expected: h.n(),
            actual: len,
        });
    }
    Ok(())
}

/// `p_H(x)` over the reals.
pub fn eval(h: &Hypergraph, x: &[f64]) -> Result<f64> {
    check_len(h, x.len())?;
    Ok(h.edges()
        .iter()
        .map(|e| e.iter().map(|&i| x[i]).product::<f64>())
        .sum())
}

/// `p_H(x)` in exact integer arithmetic, failing on `i128` overflow.
pub fn eval_int(h: &Hypergraph, x: &[i64]) -> Result<i128> {
    check_len(h, x.len())?;
    h.edges().iter().try_fold(0i128, |acc, e| {
        let term = e
            .iter()
            .try_fold(1i128, |p, &i| p.checked_mul(i128::from(x[i])))
            .ok_or(Error::Overflow("p_H"))?;
        acc.checked_add(term).ok_or(Error::Overflow("p_H"))
    })
}

/// `p_H` on a point of the hypercube: the number of edges inside the support.
pub fn eval_bits(h: &Hypergraph, x: &BitVector) -> Result<u64> {
    check_len(h, x.len())?;
    Ok(h.edges()
        .iter()
        .filter(|e| e.iter().all(|&i| x.get(i)))
        .count() as u64)
}

/// `p_H` on a sign vector: edges with an even number of negative coordinates
/// count `+1`, the others `-1`.
pub fn eval_signs(h: &Hypergraph, x: &SignVector) -> Result<i64> {
    check_len(h, x.len())?;
    Ok(h.edges()
        .iter()
        .map(|e| e.iter().map(|&i| i64::from(x.signs()[i])).product::<i64>())
        .sum())
}

/// Gradient of `p_H` at `x`: coordinate `i` is `Σ_{e∋i} Π_{j∈e, j≠i} x_j`.
pub fn gradient(h: &Hypergraph, x: &[f64]) -> Result<Vec<f64>> {
    check_len(h, x.len())?;
    let mut grad = vec![0.0; h.n()];
    for e in h.edges() {
        for (k, &i) in e.iter().enumerate() {
            let others: f64 = e
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != k)
                .map(|(_, &j)| x[j])
                .product();
            grad[i] += others;
        }
    }
    Ok(grad)
}

/// Exact integer gradient, failing on overflow.
pub fn gradient_int(h: &Hypergraph, x: &[i64]) -> Result<Vec<i128>> {
    check_len(h, x.len())?;
    let mut grad = vec![0i128; h.n()];
    for e in h.edges() {
        for (k, &i) in e.iter().enumerate() {
            let others = e
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != k)
                .try_fold(1i128, |p, (_, &j)| p.checked_mul(i128::from(x[j])))
                .ok_or(Error::Overflow("gradient"))?;
            grad[i] = grad[i].checked_add(others).ok_or(Error::Overflow("gradient"))?;
        }
    }
    Ok(grad)
}

/// The symmetric `d`-linear form of a `d`-uniform hypergraph,
/// `Λ(x_1,…,x_d) = Σ_e (1/d!) Σ_σ Π_j (x_j)_{e_σ(j)}`, so that
/// `Λ(x,…,x) = p_H(x)`.
pub fn multilinear_form(h: &Hypergraph, args: &[&[f64]]) -> Result<f64> {
    let d = args.len();
    if d == 0 {
        return Err(Error::param("args", "need at least one vector"));
    }
    if !h.is_uniform(d) {
        return Err(Error::NotUniform { expected: d });
    }
    for a in args {
        check_len(h, a.len())?;
    }
    let factorial: f64 = (1..=d).map(|k| k as f64).product();
    let mut total = 0.0;
    for e in h.edges() {
        let permanent: f64 = e
            .iter()
            .permutations(d)
            .map(|perm| perm.iter().zip(args).map(|(&&v, x)| x[v]).product::<f64>())
            .sum();
        total += permanent / factorial;
    }
    Ok(total)
}
