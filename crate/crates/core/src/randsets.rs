//! Random subsets of `Z/NZ`: AP counts, upper tails and intersectivity.

use rand::Rng;
use serde::Serialize;

use crate::apmod::{ap_hypergraph, ApParams};
use crate::error::{Error, Result};
use crate::poly::BitVector;
use crate::rng::{map_streams, stream, StreamRng};
use crate::stats::McEstimate;

/// Largest modulus for which sets are stored as 64-bit masks.
pub const MAX_MASK_N: usize = 64;
/// Largest modulus for exhaustive enumeration.
pub const MAX_EXACT_N: usize = 24;

/// `[Z/NZ]_p` with a seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandomSetParams {
    #[serde(rename = "N")]
    pub modulus: usize,
    pub p: f64,
    pub seed: u64,
}

impl RandomSetParams {
    pub fn new(modulus: usize, p: f64, seed: u64) -> Result<Self> {
        if modulus < 3 {
            return Err(Error::param("N", "must be at least 3"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param("p", "must lie strictly between 0 and 1"));
        }
        Ok(Self { modulus, p, seed })
    }
}

pub fn sample_subset_with<R: Rng + ?Sized>(modulus: usize, p: f64, rng: &mut R) -> BitVector {
    BitVector::new((0..modulus).map(|_| rng.gen::<f64>() < p).collect())
}

/// Each residue kept independently with probability `p`, from the stream of
/// `params.seed`.
pub fn sample_subset(params: &RandomSetParams) -> BitVector {
    sample_subset_with(params.modulus, params.p, &mut stream(params.seed, 0))
}

/// Counts unordered proper `k`-APs inside a set via edge masks of the AP
/// hypergraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApCounter {
    modulus: usize,
    k: usize,
    masks: Vec<u64>,
}

impl ApCounter {
    pub fn new(modulus: usize, k: usize) -> Result<Self> {
        if modulus > MAX_MASK_N {
            return Err(Error::BudgetExceeded {
                required: modulus as u128,
                budget: MAX_MASK_N as u128,
            });
        }
        let h = ap_hypergraph(&ApParams::new(modulus, k)?)?;
        Ok(Self {
            modulus,
            k,
            masks: h.edge_masks(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn count_mask(&self, set: u64) -> u64 {
        self.masks.iter().filter(|&&m| m & set == m).count() as u64
    }

    pub fn count(&self, set: &BitVector) -> Result<u64> {
        if set.len() != self.modulus {
            return Err(Error::LengthMismatch {
                expected: self.modulus,
                actual: set.len(),
            });
        }
        Ok(self.count_mask(set.to_mask()))
    }
}

/// `X_k(A)`: unordered proper `k`-APs contained in `A` (`N` prime).
pub fn count_xk(set: &BitVector, k: usize) -> Result<u64> {
    ApCounter::new(set.len(), k)?.count(set)
}

/// `E X_k = p^k N(N-1)/2`.
pub fn expected_xk(params: &RandomSetParams, k: usize) -> f64 {
    let n = params.modulus as f64;
    params.p.powi(k as i32) * n * (n - 1.0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailQuery {
    pub k: usize,
    pub delta: f64,
}

impl TailQuery {
    pub fn new(k: usize, delta: f64) -> Result<Self> {
        if k < 3 {
            return Err(Error::param("k", "must be at least 3"));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::param("delta", "must be positive"));
        }
        Ok(Self { k, delta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailReport {
    /// `(1+δ) E X_k`.
    pub threshold: f64,
    pub prob: McEstimate,
    /// `3 / samples` when no sample reached the threshold.
    pub zero_hit_bound: Option<f64>,
    /// `ln` of the estimate, or of the zero-hit bound.
    pub log_prob: f64,
    /// `N min(sqrt(δ) p^{k/2} ln(1/p), δ² p)`.
    pub reference_rate: f64,
}

impl TailReport {
    /// The point estimate, or the rule-of-three bound on zero hits.
    pub fn value(&self) -> f64 {
        self.zero_hit_bound.unwrap_or(self.prob.mean)
    }

    /// The standard error, or the bound on zero hits.
    pub fn se_or_bound(&self) -> f64 {
        self.zero_hit_bound.unwrap_or(self.prob.std_error)
    }
}

pub fn reference_rate(params: &RandomSetParams, query: &TailQuery) -> f64 {
    let p = params.p;
    let a = query.delta.sqrt() * p.powf(query.k as f64 / 2.0) * (1.0 / p).ln();
    let b = query.delta * query.delta * p;
    params.modulus as f64 * a.min(b)
}

/// Plain Monte Carlo estimate of `Pr[X_k >= (1+δ) E X_k]`.
pub fn upper_tail_mc(params: &RandomSetParams, query: &TailQuery, samples: usize, seed: u64) -> Result<TailReport> {
    if samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    let counter = ApCounter::new(params.modulus, query.k)?;
    let threshold = (1.0 + query.delta) * expected_xk(params, query.k);
    let hits = map_streams(samples, seed, |_, rng| {
        let set = sample_subset_with(params.modulus, params.p, rng);
        if counter.count_mask(set.to_mask()) as f64 >= threshold {
            1.0
        } else {
            0.0
        }
    });
    let prob = McEstimate::from_values(hits, seed);
    let zero_hit_bound = (prob.mean == 0.0).then(|| 3.0 / samples as f64);
    Ok(TailReport {
        threshold,
        prob,
        zero_hit_bound,
        log_prob: zero_hit_bound.unwrap_or(prob.mean).ln(),
        reference_rate: reference_rate(params, query),
    })
}

/// `Pr[X_k >= (1+δ) E X_k]` by summing over all `2^N` subsets. `X_k` is
/// computed as half the ordered progression count.
pub fn exact_upper_tail(params: &RandomSetParams, query: &TailQuery) -> Result<f64> {
    let n = params.modulus;
    if n > MAX_EXACT_N {
        return Err(Error::BudgetExceeded {
            required: 1u128 << n,
            budget: 1u128 << MAX_EXACT_N,
        });
    }
    ApParams::new(n, query.k)?;
    let threshold = (1.0 + query.delta) * expected_xk(params, query.k);
    let (p, q) = (params.p, 1.0 - params.p);
    let mut total = 0.0;
    for mask in 0..1u64 << n {
        let mut ordered = 0u64;
        for a in 0..n {
            for b in 1..n {
                if (0..query.k).all(|t| mask >> ((a + t * b) % n) & 1 == 1) {
                    ordered += 1;
                }
            }
        }
        if (ordered / 2) as f64 >= threshold {
            let size = mask.count_ones() as i32;
            total += p.powi(size) * q.powi(n as i32 - size);
        }
    }
    Ok(total)
}

/// Masks of all proper `(ℓ+1)`-term progressions with a difference in `diffs`.
fn progression_masks(modulus: usize, ell: usize, diffs: &[usize]) -> Vec<u64> {
    let mut masks = Vec::new();
    for &d in diffs {
        if d % modulus == 0 {
            continue;
        }
        for a in 0..modulus {
            let mask = (0..=ell).fold(0u64, |m, t| m | 1 << ((a + t * d) % modulus));
            if mask.count_ones() as usize == ell + 1 {
                masks.push(mask);
            }
        }
    }
    masks.sort_unstable();
    masks.dedup();
    masks
}

/// Whether `set` contains a proper `(ℓ+1)`-AP whose difference lies in `diffs`.
pub fn contains_progression(set: &BitVector, ell: usize, diffs: &[usize]) -> bool {
    let s = set.to_mask();
    progression_masks(set.len(), ell, diffs).iter().any(|&m| m & s == m)
}

/// `⌈αN⌉`, with a small slack so that `α = K/N` parses back to `K`.
pub fn min_density_size(modulus: usize, alpha: f64) -> usize {
    (alpha * modulus as f64 - 1e-9).ceil().max(0.0) as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Intersectivity {
    Intersective,
    /// A dense set with no qualifying progression.
    NotIntersective(Vec<usize>),
    /// Heuristic search found no witness; intersectivity is not proven.
    NoWitnessFound,
}

impl Intersectivity {
    /// `true` unless a witness was found.
    pub fn holds(&self) -> bool {
        !matches!(self, Self::NotIntersective(_))
    }

    pub fn witness(&self) -> Option<&[usize]> {
        match self {
            Self::NotIntersective(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub seed: u64,
    /// Annealing moves per restart.
    pub iterations: usize,
    pub restarts: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            iterations: 20_000,
            restarts: 8,
        }
    }
}

fn validate_intersectivity(modulus: usize, ell: usize, alpha: f64) -> Result<()> {
    if modulus < 3 {
        return Err(Error::param("N", "must be at least 3"));
    }
    if ell == 0 {
        return Err(Error::param("ell", "must be positive"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", "must lie in (0, 1]"));
    }
    Ok(())
}

/// Decides whether every subset of density `α` contains a proper `(ℓ+1)`-AP
/// with difference in `diffs`. Exact for `N <= 24`; larger moduli fall back
/// to a seeded annealing search.
pub fn intersectivity_check(modulus: usize, ell: usize, alpha: f64, diffs: &[usize]) -> Result<Intersectivity> {
    intersectivity_check_with(modulus, ell, alpha, diffs, &SearchConfig::default())
}

pub fn intersectivity_check_with(
    modulus: usize,
    ell: usize,
    alpha: f64,
    diffs: &[usize],
    config: &SearchConfig,
) -> Result<Intersectivity> {
    validate_intersectivity(modulus, ell, alpha)?;
    if modulus <= MAX_EXACT_N {
        Ok(exact_intersectivity(modulus, ell, alpha, diffs))
    } else if modulus <= MAX_MASK_N {
        Ok(anneal_intersectivity(modulus, ell, alpha, diffs, config))
    } else {
        Err(Error::BudgetExceeded {
            required: modulus as u128,
            budget: MAX_MASK_N as u128,
        })
    }
}

/// Exhaustive search for a progression-free set of size exactly `K = ⌈αN⌉`.
///
/// Any denser progression-free set has a progression-free subset of size `K`,
/// so checking size `K` suffices. Translates of a progression-free set are
/// progression-free, so the search fixes `0` in the set. Elements are tried in
/// ascending order, including before excluding, which makes the witness the
/// lexicographically first such set.
pub fn exact_intersectivity(modulus: usize, ell: usize, alpha: f64, diffs: &[usize]) -> Intersectivity {
    let size = min_density_size(modulus, alpha);
    if size > modulus {
        return Intersectivity::Intersective;
    }
    if size == 0 {
        return Intersectivity::NotIntersective(Vec::new());
    }
    let masks = progression_masks(modulus, ell, diffs);
    let mut through = vec![Vec::new(); modulus];
    for &m in &masks {
        for (v, list) in through.iter_mut().enumerate() {
            if m >> v & 1 == 1 {
                list.push(m);
            }
        }
    }

    fn search(set: u64, count: usize, next: usize, modulus: usize, size: usize, through: &[Vec<u64>]) -> Option<u64> {
        if count == size {
            return Some(set);
        }
        if modulus - next < size - count {
            return None;
        }
        let with = set | 1 << next;
        if through[next].iter().all(|&m| m & with != m) {
            if let Some(found) = search(with, count + 1, next + 1, modulus, size, through) {
                return Some(found);
            }
        }
        search(set, count, next + 1, modulus, size, through)
    }

    match search(1, 1, 1, modulus, size, &through) {
        Some(set) => Intersectivity::NotIntersective((0..modulus).filter(|&v| set >> v & 1 == 1).collect()),
        None => Intersectivity::Intersective,
    }
}

fn anneal_intersectivity(modulus: usize, ell: usize, alpha: f64, diffs: &[usize], config: &SearchConfig) -> Intersectivity {
    let size = min_density_size(modulus, alpha);
    if size > modulus {
        return Intersectivity::Intersective;
    }
    let masks = progression_masks(modulus, ell, diffs);
    let energy = |set: u64| masks.iter().filter(|&&m| m & set == m).count();
    for restart in 0..config.restarts {
        let mut rng: StreamRng = stream(config.seed, restart as u64);
        let mut order: Vec<usize> = (0..modulus).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let mut set = order[..size].iter().fold(0u64, |s, &v| s | 1 << v);
        let mut e = energy(set);
        for it in 0..config.iterations {
            if e == 0 {
                return Intersectivity::NotIntersective((0..modulus).filter(|&v| set >> v & 1 == 1).collect());
            }
            let members: Vec<usize> = (0..modulus).filter(|&v| set >> v & 1 == 1).collect();
            let outside: Vec<usize> = (0..modulus).filter(|&v| set >> v & 1 == 0).collect();
            if outside.is_empty() {
                break;
            }
            let out = members[rng.gen_range(0..members.len())];
            let inn = outside[rng.gen_range(0..outside.len())];
            let candidate = set & !(1 << out) | 1 << inn;
            let ce = energy(candidate);
            let temperature = 2.0 * (1.0 - it as f64 / config.iterations as f64) + 1e-3;
            let accept = ce <= e || rng.gen::<f64>() < (-((ce - e) as f64) / temperature).exp();
            if accept {
                set = candidate;
                e = ce;
            }
        }
        if e == 0 {
            return Intersectivity::NotIntersective((0..modulus).filter(|&v| set >> v & 1 == 1).collect());
        }
    }
    Intersectivity::NoWitnessFound
}

/// How the random difference set is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DifferenceModel {
    /// Each nonzero residue independently with probability `p`.
    Bernoulli(f64),
    /// `k` uniform draws from the nonzero residues, with replacement.
    Draws(usize),
}

impl DifferenceModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Bernoulli(_) => "bernoulli",
            Self::Draws(_) => "draws",
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            Self::Bernoulli(p) => p,
            Self::Draws(k) => k as f64,
        }
    }

    /// One uniform per nonzero residue in the Bernoulli model, so that the
    /// drawn sets are nested in `p` for a fixed stream.
    pub fn draw<R: Rng + ?Sized>(&self, modulus: usize, rng: &mut R) -> Vec<usize> {
        match *self {
            Self::Bernoulli(p) => (1..modulus).filter(|_| rng.gen::<f64>() < p).collect(),
            Self::Draws(k) => {
                let mut d: Vec<usize> = (0..k).map(|_| rng.gen_range(1..modulus)).collect();
                d.sort_unstable();
                d.dedup();
                d
            }
        }
    }
}

/// Fraction of random difference sets that are intersective.
pub fn random_intersectivity_experiment(
    modulus: usize,
    ell: usize,
    alpha: f64,
    model: DifferenceModel,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    validate_intersectivity(modulus, ell, alpha)?;
    if modulus > MAX_EXACT_N {
        return Err(Error::BudgetExceeded {
            required: modulus as u128,
            budget: MAX_EXACT_N as u128,
        });
    }
    if let DifferenceModel::Bernoulli(p) = model {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", "must lie in [0, 1]"));
        }
    }
    if trials == 0 {
        return Err(Error::param("trials", "must be positive"));
    }
    let values = map_streams(trials, seed, |_, rng| {
        let diffs = model.draw(modulus, rng);
        if exact_intersectivity(modulus, ell, alpha, &diffs).holds() {
            1.0
        } else {
            0.0
        }
    });
    Ok(McEstimate::from_values(values, seed))
}

/// `Pr[D is intersective]` for the Bernoulli model, by weighting all
/// `2^{N-1}` difference sets.
pub fn exact_random_intersectivity(modulus: usize, ell: usize, alpha: f64, p: f64) -> Result<f64> {
    validate_intersectivity(modulus, ell, alpha)?;
    if modulus > 21 {
        return Err(Error::BudgetExceeded {
            required: 1u128 << (modulus - 1),
            budget: 1u128 << 20,
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", "must lie in [0, 1]"));
    }
    let slots = modulus as i32 - 1;
    let mut total = 0.0;
    for mask in 0u32..1 << slots {
        let diffs: Vec<usize> = (1..modulus).filter(|d| mask >> (d - 1) & 1 == 1).collect();
        if exact_intersectivity(modulus, ell, alpha, &diffs).holds() {
            let c = diffs.len() as i32;
            total += p.powi(c) * (1.0 - p).powi(slots - c);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apmod::lambda_k;
    use proptest::prelude::*;

    #[test]
    fn subsets_are_seeded() {
        let p = RandomSetParams::new(30, 0.4, 5).unwrap();
        assert_eq!(sample_subset(&p), sample_subset(&p));
        assert_ne!(sample_subset(&p), sample_subset(&RandomSetParams { seed: 6, ..p }));
        assert!(RandomSetParams::new(30, 1.0, 0).is_err());
        assert!(RandomSetParams::new(30, 0.0, 0).is_err());
    }

    #[test]
    fn subset_size_mean() {
        let sizes = map_streams(10_000, 1, |_, rng| sample_subset_with(20, 0.3, rng).count_ones() as f64);
        let est = McEstimate::from_values(sizes, 1);
        assert!(est.within(6.0, 3.0), "{est:?}");
    }

    #[test]
    fn complement_symmetry() {
        use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete};
        let n = 20;
        let samples = 20_000;
        let mut observed = vec![0u64; n + 1];
        for set in map_streams(samples, 2, |_, rng| sample_subset_with(n, 0.3, rng)) {
            observed[set.complement().count_ones()] += 1;
        }
        let binom = statrs::distribution::Binomial::new(0.7, n as u64).unwrap();
        // merge bins with small expectation into their neighbours
        let mut stat = 0.0;
        let mut bins = 0;
        let (mut o_acc, mut e_acc) = (0.0, 0.0);
        for (size, &o) in observed.iter().enumerate() {
            o_acc += o as f64;
            e_acc += binom.pmf(size as u64) * samples as f64;
            if e_acc >= 5.0 {
                stat += (o_acc - e_acc).powi(2) / e_acc;
                bins += 1;
                o_acc = 0.0;
                e_acc = 0.0;
            }
        }
        stat += (o_acc - e_acc).powi(2) / e_acc.max(1e-12);
        let p_value = 1.0 - ChiSquared::new(bins as f64).unwrap().cdf(stat);
        assert!(p_value > 1e-3, "stat {stat} bins {bins}");
    }

    #[test]
    fn count_examples() {
        let all = BitVector::from_members(5, 0..5);
        assert_eq!(count_xk(&all, 3).unwrap(), 10);
        assert_eq!(count_xk(&BitVector::from_members(5, [0, 1, 2]), 3).unwrap(), 1);
        assert_eq!(count_xk(&BitVector::from_members(7, [0, 3]), 3).unwrap(), 0);
        assert!(count_xk(&BitVector::zeros(9), 3).is_err());
    }

    #[test]
    fn expected_count() {
        let p = RandomSetParams::new(13, 0.5, 0).unwrap();
        assert_eq!(expected_xk(&p, 3), 9.75);
        let counter = ApCounter::new(13, 3).unwrap();
        let draws = map_streams(10_000, 3, |_, rng| counter.count_mask(sample_subset_with(13, 0.5, rng).to_mask()) as f64);
        let est = McEstimate::from_values(draws, 3);
        assert!(est.within(9.75, 3.0), "{est:?}");
        let near_one = RandomSetParams::new(13, 1.0 - 1e-12, 0).unwrap();
        assert!((expected_xk(&near_one, 3) - 78.0).abs() < 1e-6);
        assert!(expected_xk(&RandomSetParams::new(13, 0.6, 0).unwrap(), 3) > 9.75);
    }

    #[test]
    fn tail_near_zero_delta() {
        let p = RandomSetParams::new(13, 0.5, 0).unwrap();
        let r = upper_tail_mc(&p, &TailQuery::new(3, 1e-6).unwrap(), 5_000, 4).unwrap();
        assert!(r.prob.mean >= 0.1);
        assert!(r.zero_hit_bound.is_none());
    }

    #[test]
    fn tail_is_monotone_in_delta() {
        let p = RandomSetParams::new(13, 0.5, 0).unwrap();
        let mut last = 1.0;
        for delta in [0.1, 0.5, 1.0, 2.0] {
            let r = upper_tail_mc(&p, &TailQuery::new(3, delta).unwrap(), 3_000, 5).unwrap();
            assert!(r.prob.mean <= last);
            last = r.prob.mean;
        }
    }

    #[test]
    fn tail_matches_enumeration() {
        let p = RandomSetParams::new(13, 0.5, 0).unwrap();
        let q = TailQuery::new(3, 1.0).unwrap();
        let exact = exact_upper_tail(&p, &q).unwrap();
        let r = upper_tail_mc(&p, &q, 50_000, 6).unwrap();
        assert!(r.prob.within(exact, 3.0), "exact {exact} vs {:?}", r.prob);
    }

    #[test]
    fn zero_hits_report_rule_of_three() {
        let p = RandomSetParams::new(11, 0.05, 0).unwrap();
        let r = upper_tail_mc(&p, &TailQuery::new(3, 500.0).unwrap(), 200, 7).unwrap();
        assert_eq!(r.zero_hit_bound, Some(0.015));
        assert_eq!(r.value(), 0.015);
        assert!((r.log_prob - 0.015f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn intersectivity_examples() {
        assert_eq!(
            intersectivity_check(5, 2, 0.6, &[1]).unwrap(),
            Intersectivity::NotIntersective(vec![0, 1, 3])
        );
        let all: Vec<usize> = (1..9).collect();
        assert_eq!(intersectivity_check(9, 1, 0.3, &all).unwrap(), Intersectivity::Intersective);
        let empty = intersectivity_check(7, 2, 0.5, &[]).unwrap();
        assert_eq!(empty.witness().unwrap().len(), 4);
        assert!(intersectivity_check(7, 0, 0.5, &[1]).is_err());
        assert!(intersectivity_check(7, 1, 0.0, &[1]).is_err());
    }

    /// Every subset of size at least `⌈αN⌉`, checked directly.
    fn naive_intersective(n: usize, ell: usize, alpha: f64, diffs: &[usize]) -> bool {
        let size = min_density_size(n, alpha);
        (0..1u64 << n).filter(|m| m.count_ones() as usize >= size).all(|m| {
            (0..n).any(|a| {
                diffs.iter().any(|&d| {
                    let elems: Vec<usize> = (0..=ell).map(|t| (a + t * d) % n).collect();
                    let mut u = elems.clone();
                    u.sort_unstable();
                    u.dedup();
                    u.len() == ell + 1 && elems.iter().all(|&v| m >> v & 1 == 1)
                })
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn exact_agrees_with_naive(
            n in 3usize..=12,
            ell in 1usize..=3,
            alpha in 0.05f64..=1.0,
            diff_mask in any::<u16>(),
        ) {
            let diffs: Vec<usize> = (1..n).filter(|d| diff_mask >> d & 1 == 1).collect();
            let got = intersectivity_check(n, ell, alpha, &diffs).unwrap();
            prop_assert_eq!(got.holds(), naive_intersective(n, ell, alpha, &diffs));
            if let Some(w) = got.witness() {
                prop_assert_eq!(w.len(), min_density_size(n, alpha));
                prop_assert!(!contains_progression(&BitVector::from_members(n, w.iter().copied()), ell, &diffs));
            }
        }

        #[test]
        fn counter_is_half_lambda(n in prop::sample::select(vec![5usize, 7, 11, 13, 17]), k in 3usize..=5, mask in any::<u64>()) {
            let set = BitVector::from_mask(n, mask);
            prop_assert_eq!(2 * count_xk(&set, k).unwrap(), lambda_k(&set, k));
        }
    }

    #[test]
    fn annealing_finds_witness() {
        // N = 29, difference 1, 3-APs: the even residues up to 26 avoid them
        let r = intersectivity_check(29, 2, 0.3, &[1]).unwrap();
        let w = r.witness().expect("an easy witness exists");
        assert!(!contains_progression(&BitVector::from_members(29, w.iter().copied()), 2, &[1]));
        let all: Vec<usize> = (1..29).collect();
        assert_eq!(intersectivity_check(29, 1, 0.5, &all).unwrap(), Intersectivity::NoWitnessFound);
    }

    #[test]
    fn random_model_limits() {
        let full = random_intersectivity_experiment(11, 1, 0.5, DifferenceModel::Bernoulli(1.0), 50, 1).unwrap();
        assert_eq!(full.mean, 1.0);
        let mut last = 0.0;
        for p in [0.0, 0.02, 0.05, 0.1, 0.3] {
            let est = random_intersectivity_experiment(11, 2, 0.4, DifferenceModel::Bernoulli(p), 300, 8).unwrap();
            assert!(est.mean >= last);
            last = est.mean;
        }
        let draws = random_intersectivity_experiment(11, 1, 0.5, DifferenceModel::Draws(1), 50, 1).unwrap();
        assert_eq!(draws.mean, 1.0);
    }

    #[test]
    fn random_model_matches_exact_weighting() {
        let (n, ell, alpha, p) = (11usize, 1, 0.5, 0.1f64);
        let mut exact = 0.0;
        for mask in 0u32..1 << (n - 1) {
            let diffs: Vec<usize> = (1..n).filter(|d| mask >> (d - 1) & 1 == 1).collect();
            if exact_intersectivity(n, ell, alpha, &diffs).holds() {
                let c = diffs.len() as i32;
                exact += p.powi(c) * (1.0 - p).powi(n as i32 - 1 - c);
            }
        }
        assert!((exact - (1.0 - 0.9f64.powi(10))).abs() < 1e-12);
        assert!((exact_random_intersectivity(n, ell, alpha, p).unwrap() - exact).abs() < 1e-15);
        let est = random_intersectivity_experiment(n, ell, alpha, DifferenceModel::Bernoulli(p), 5_000, 9).unwrap();
        assert!(est.within(exact, 3.0), "{exact} vs {est:?}");
    }
}
