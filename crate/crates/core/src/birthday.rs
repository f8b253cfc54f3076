//! Generalized birthday paradox: how often a uniformly random map
//! `h: [m] → [n]` is `s`-good for a maximal matching of `2r`-sets, plus the
//! Poisson approximation used to bound it.

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::hypergraph::{complete_to_maximal_matching, Hypergraph};
use crate::rng::{map_streams, open_unit, StreamRng};
use crate::stats::McEstimate;
use crate::tensorlift::elementary_symmetric;

/// `C_r = (6er)^{1/r}`, the default `s = 200·4^r` and `n_0 = 4(C_r r)^r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BirthdayConstants {
    pub c_r: f64,
    pub s: u64,
    pub n_0: f64,
}

pub fn birthday_constants(r: usize) -> Result<BirthdayConstants> {
    if r == 0 {
        return Err(Error::param("r", "must be positive"));
    }
    let rf = r as f64;
    let c_r = (6.0 * std::f64::consts::E * rf).powf(1.0 / rf);
    let s = 4u64
        .checked_pow(r as u32)
        .and_then(|p| p.checked_mul(200))
        .ok_or(Error::Overflow("200·4^r"))?;
    Ok(BirthdayConstants {
        c_r,
        s,
        n_0: 4.0 * (c_r * rf).powi(r as i32),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BirthdayParams {
    pub r: usize,
    pub n: usize,
    pub m: usize,
    pub s: u64,
    pub c_r: f64,
    pub n_0: f64,
}

impl BirthdayParams {
    /// Defaults: `m = ⌊C_r n^{1-1/r}⌋`, `s = 200·4^r`.
    pub fn new(r: usize, n: usize) -> Result<Self> {
        let c = birthday_constants(r)?;
        if n < 2 * r {
            return Err(Error::param("n", format!("must be at least 2r = {}", 2 * r)));
        }
        let m = (c.c_r * (n as f64).powf(1.0 - 1.0 / r as f64)).floor() as usize;
        let p = Self {
            r,
            n,
            m: m.max(1),
            s: c.s,
            c_r: c.c_r,
            n_0: c.n_0,
        };
        Ok(p)
    }

    pub fn with_m(mut self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("m", "must be positive"));
        }
        self.m = m;
        Ok(self)
    }

    pub fn with_s(mut self, s: u64) -> Result<Self> {
        if s == 0 {
            return Err(Error::param("s", "must be positive"));
        }
        self.s = s;
        Ok(self)
    }

    /// `μ = C_r m / n`.
    pub fn mu(&self) -> f64 {
        self.c_r * self.m as f64 / self.n as f64
    }

    /// The default threshold `200·4^r` used by the Markov step.
    pub fn default_s(&self) -> u64 {
        200 * 4u64.pow(self.r as u32)
    }
}

/// The maximal matching obtained by packing `[n]` into consecutive blocks.
pub fn default_matching(n: usize, r: usize) -> Result<Hypergraph> {
    complete_to_maximal_matching(&Hypergraph::empty(n), r)
}

/// `φ` of a map given only its histogram over `[n]`.
pub fn phi_from_histogram(hist: &[u64], matching: &Hypergraph, r: usize) -> u64 {
    let mut counts = Vec::with_capacity(2 * r);
    matching
        .edges()
        .iter()
        .map(|e| {
            counts.clear();
            counts.extend(e.iter().map(|&v| hist[v]));
            elementary_symmetric(&counts, r)
        })
        .sum()
}

fn check_matching(params: &BirthdayParams, matching: &Hypergraph) -> Result<()> {
    if matching.n() != params.n {
        return Err(Error::LengthMismatch {
            expected: params.n,
            actual: matching.n(),
        });
    }
    if !matching.is_uniform(2 * params.r) {
        return Err(Error::NotUniform {
            expected: 2 * params.r,
        });
    }
    if !matching.is_matching() {
        return Err(Error::NotMatching("two edges share a vertex".into()));
    }
    Ok(())
}

fn balls_in_bins(m: usize, n: usize, rng: &mut StreamRng, hist: &mut [u64]) {
    hist.iter_mut().for_each(|h| *h = 0);
    for _ in 0..m {
        hist[rng.gen_range(0..n)] += 1;
    }
}

/// `φ(h)` for `samples` independent uniform maps, in sample order.
pub fn sample_phi(params: &BirthdayParams, matching: &Hypergraph, samples: usize, seed: u64) -> Result<Vec<u64>> {
    check_matching(params, matching)?;
    if samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    Ok(map_streams(samples, seed, |_, rng| {
        let mut hist = vec![0u64; params.n];
        balls_in_bins(params.m, params.n, rng, &mut hist);
        phi_from_histogram(&hist, matching, params.r)
    }))
}

/// All birthday statistics from one set of draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BirthdayReport {
    pub params: BirthdayParams,
    /// `Pr[1 <= φ <= s]`.
    pub p_good: McEstimate,
    pub mean_phi: McEstimate,
    /// `Pr[φ > 200·4^r]`.
    pub p_exceeds: McEstimate,
    /// `Pr[φ = 0]`.
    pub p_zero: McEstimate,
}

pub fn run_birthday(params: &BirthdayParams, matching: &Hypergraph, samples: usize, seed: u64) -> Result<BirthdayReport> {
    let phis = sample_phi(params, matching, samples, seed)?;
    let indicator = |pred: &dyn Fn(u64) -> bool| {
        McEstimate::from_values(phis.iter().map(|&p| if pred(p) { 1.0 } else { 0.0 }), seed)
    };
    let default_s = params.default_s();
    Ok(BirthdayReport {
        params: *params,
        p_good: indicator(&|p| (1..=params.s).contains(&p)),
        mean_phi: McEstimate::from_values(phis.iter().map(|&p| p as f64), seed),
        p_exceeds: indicator(&|p| p > default_s),
        p_zero: indicator(&|p| p == 0),
    })
}

/// Monte Carlo estimate of `Pr[h is s-good]`.
pub fn estimate_good_probability(
    params: &BirthdayParams,
    matching: &Hypergraph,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    Ok(run_birthday(params, matching, samples, seed)?.p_good)
}

/// Monte Carlo estimate of `E[φ(h)]`.
pub fn mean_phi(params: &BirthdayParams, matching: &Hypergraph, samples: usize, seed: u64) -> Result<McEstimate> {
    Ok(run_birthday(params, matching, samples, seed)?.mean_phi)
}

/// `e^{-μ} μ^ℓ / ℓ!`.
pub fn poisson_pmf(mu: f64, l: u64) -> f64 {
    if mu == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    (-mu + l as f64 * mu.ln() - ln_factorial(l)).exp()
}

/// Poisson draw by inverting the cumulative density.
pub fn sample_poisson<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> u64 {
    let u = 1.0 - open_unit(rng);
    let mut k = 0u64;
    let mut p = (-mu).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mu / k as f64;
        cdf += p;
        if p < f64::MIN_POSITIVE && k as f64 > mu {
            // the remaining mass is below resolution
            break;
        }
    }
    k
}

/// `E[Φ(X)]` and `E[Φ(Y)]` for one functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationSide {
    pub exact: McEstimate,
    pub poisson: McEstimate,
    /// Whether `E[Φ(X)] <= 2 E[Φ(Y)] + 3·SE`, with SE combining both sides.
    pub holds: bool,
}

impl DominationSide {
    fn new(exact: McEstimate, poisson: McEstimate) -> Self {
        let se = (exact.std_error.powi(2) + 4.0 * poisson.std_error.powi(2)).sqrt();
        Self {
            exact,
            poisson,
            holds: exact.mean <= 2.0 * poisson.mean + 3.0 * se,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationReport {
    /// `ψ`: indicator that `φ = 0`.
    pub psi: DominationSide,
    /// `χ`: `φ` itself.
    pub chi: DominationSide,
}

impl DominationReport {
    pub fn holds(&self) -> bool {
        self.psi.holds && self.chi.holds
    }
}

/// Compares `Φ` on the balls-in-bins histogram `X` against independent
/// `Poisson(m/n)` bins `Y`, for `Φ ∈ {ψ, χ}`.
pub fn poisson_domination_check(
    params: &BirthdayParams,
    matching: &Hypergraph,
    samples: usize,
    seed: u64,
) -> Result<DominationReport> {
    check_matching(params, matching)?;
    if samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    let mu = params.m as f64 / params.n as f64;
    let draws = map_streams(samples, seed, |_, rng| {
        let mut hist = vec![0u64; params.n];
        balls_in_bins(params.m, params.n, rng, &mut hist);
        let x = phi_from_histogram(&hist, matching, params.r);
        hist.iter_mut().for_each(|h| *h = sample_poisson(mu, rng));
        let y = phi_from_histogram(&hist, matching, params.r);
        (x, y)
    });
    let est = |f: &dyn Fn(&(u64, u64)) -> f64| McEstimate::from_values(draws.iter().map(f), seed);
    let zero = |v: u64| if v == 0 { 1.0 } else { 0.0 };
    Ok(DominationReport {
        psi: DominationSide::new(est(&|d| zero(d.0)), est(&|d| zero(d.1))),
        chi: DominationSide::new(est(&|d| d.0 as f64), est(&|d| d.1 as f64)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Observed and expected counts per bin; the last bin is the upper tail.
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
}

impl ChiSquareReport {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

/// Pearson goodness-of-fit of `Y_a + Y_b` against `Poisson(μ_a + μ_b)`.
///
/// Bins `0, 1, …` are kept while their expected count is at least 5; the rest
/// of the mass goes into one tail bin.
pub fn poisson_sum_chi_square(mu_a: f64, mu_b: f64, samples: usize, seed: u64) -> Result<ChiSquareReport> {
    if !(mu_a > 0.0 && mu_b > 0.0 && mu_a.is_finite() && mu_b.is_finite()) {
        return Err(Error::param("mu", "rates must be positive and finite"));
    }
    let mu = mu_a + mu_b;
    let total = samples as f64;
    let mut expected = Vec::new();
    let mut mass = 0.0;
    loop {
        let e = poisson_pmf(mu, expected.len() as u64) * total;
        if e < 5.0 && (expected.len() as f64) > mu {
            break;
        }
        mass += e / total;
        expected.push(e);
    }
    expected.push((1.0 - mass).max(0.0) * total);
    if expected.len() < 3 || *expected.last().unwrap() < 1.0 {
        return Err(Error::param("samples", "too few samples for a chi-square test"));
    }
    let tail = expected.len() - 1;
    let mut observed = vec![0u64; expected.len()];
    for v in map_streams(samples, seed, |_, rng| sample_poisson(mu_a, rng) + sample_poisson(mu_b, rng)) {
        observed[(v as usize).min(tail)] += 1;
    }
    let statistic: f64 = observed
        .iter()
        .zip(&expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = expected.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::param("dof", e.to_string()))?;
    Ok(ChiSquareReport {
        statistic,
        dof,
        p_value: 1.0 - dist.cdf(statistic),
        observed,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorlift::{phi, MapWord};

    #[test]
    fn constants() {
        let c1 = birthday_constants(1).unwrap();
        assert!((c1.c_r - 6.0 * std::f64::consts::E).abs() < 1e-12);
        assert!((c1.c_r - 16.3097).abs() < 1e-4);
        assert_eq!(c1.s, 800);
        assert!((c1.n_0 - 24.0 * std::f64::consts::E).abs() < 1e-9);
        let c2 = birthday_constants(2).unwrap();
        assert!((c2.c_r - 5.7114).abs() < 1e-4);
        assert_eq!(c2.s, 3200);
        assert!((c2.n_0 - 192.0 * std::f64::consts::E).abs() < 1e-9);
        for r in 2..8 {
            assert_eq!(birthday_constants(r).unwrap().s, 4 * birthday_constants(r - 1).unwrap().s);
        }
        assert!(birthday_constants(0).is_err());
    }

    #[test]
    fn default_parameters() {
        let p = BirthdayParams::new(2, 600).unwrap();
        assert_eq!((p.m, p.s), (139, 3200));
        assert!(p.n as f64 >= p.n_0);
        let p = BirthdayParams::new(1, 100).unwrap();
        assert_eq!((p.m, p.s), (16, 800));
        assert!((p.mu() - p.c_r * 0.16).abs() < 1e-12);
    }

    #[test]
    fn histogram_phi_matches_map_phi() {
        let m = default_matching(7, 1).unwrap();
        for rank in 0..343 {
            let f = MapWord::new(3, 7, rank).unwrap();
            assert_eq!(phi_from_histogram(&f.histogram(), &m, 1), phi(&f, &m, 1).unwrap());
        }
        let m = default_matching(9, 2).unwrap();
        for rank in (0..6561).step_by(7) {
            let f = MapWord::new(4, 9, rank).unwrap();
            assert_eq!(phi_from_histogram(&f.histogram(), &m, 2), phi(&f, &m, 2).unwrap());
        }
    }

    #[test]
    fn one_coordinate_probability() {
        // m = 1, r = 1: good iff the single value lies in the matching
        let n = 7;
        let matching = default_matching(n, 1).unwrap();
        let params = BirthdayParams::new(1, n).unwrap().with_m(1).unwrap();
        let est = estimate_good_probability(&params, &matching, 20_000, 3).unwrap();
        assert!(est.within(6.0 / 7.0, 4.0), "{est:?}");
    }

    #[test]
    fn exact_mean_small_case() {
        let matching = Hypergraph::new(4, [vec![0, 1], vec![2, 3]]).unwrap();
        let params = BirthdayParams::new(1, 4).unwrap().with_m(2).unwrap();
        let est = mean_phi(&params, &matching, 500, 1).unwrap();
        assert_eq!(est.mean, 2.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn larger_threshold_is_more_likely() {
        let params = BirthdayParams::new(2, 60).unwrap().with_m(20).unwrap().with_s(2).unwrap();
        let matching = default_matching(60, 2).unwrap();
        let low = estimate_good_probability(&params, &matching, 3000, 5).unwrap();
        let high = estimate_good_probability(&params.with_s(u64::MAX).unwrap(), &matching, 3000, 5).unwrap();
        assert!(high.mean >= low.mean);
    }

    #[test]
    fn mean_is_linear_in_matching_size() {
        // same marginals: φ over two edges is the sum of φ over each
        let params = BirthdayParams::new(1, 8).unwrap().with_m(5).unwrap();
        let both = Hypergraph::new(8, [vec![0, 1], vec![4, 5]]).unwrap();
        let first = Hypergraph::new(8, [vec![0, 1]]).unwrap();
        let second = Hypergraph::new(8, [vec![4, 5]]).unwrap();
        let a = mean_phi(&params, &both, 2000, 9).unwrap().mean;
        let b = mean_phi(&params, &first, 2000, 9).unwrap().mean + mean_phi(&params, &second, 2000, 9).unwrap().mean;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let params = BirthdayParams::new(1, 6).unwrap();
        let overlapping = Hypergraph::new(6, [vec![0, 1], vec![1, 2]]).unwrap();
        assert!(sample_phi(&params, &overlapping, 10, 0).is_err());
        let wide = Hypergraph::new(6, [vec![0, 1, 2, 3]]).unwrap();
        assert!(sample_phi(&params, &wide, 10, 0).is_err());
        assert!(sample_phi(&params, &default_matching(6, 1).unwrap(), 0, 0).is_err());
        assert!(params.with_m(0).is_err());
    }

    #[test]
    fn poisson_pmf_and_sampler() {
        let total: f64 = (0..60).map(|l| poisson_pmf(3.5, l)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((poisson_pmf(2.0, 3) - (-2.0f64).exp() * 8.0 / 6.0).abs() < 1e-15);
        let draws = map_streams(20_000, 4, |_, rng| sample_poisson(2.5, rng) as f64);
        let est = McEstimate::from_values(draws, 4);
        assert!(est.within(2.5, 4.0), "{est:?}");
        assert_eq!(sample_poisson(0.0, &mut crate::rng::stream(0, 0)), 0);
    }

    #[test]
    fn poisson_sum_passes_chi_square() {
        let report = poisson_sum_chi_square(1.3, 2.1, 20_000, 11).unwrap();
        assert!(report.passes(1e-3), "{report:?}");
        assert_eq!(report.observed.iter().sum::<u64>(), 20_000);
    }

    #[test]
    fn chi_square_detects_wrong_rate() {
        // a sum of Poisson(1) and Poisson(2) is far from Poisson(1 + 1)
        let report = poisson_sum_chi_square(1.0, 2.0, 20_000, 11).unwrap();
        let dist = ChiSquared::new(report.dof as f64).unwrap();
        let mut wrong = 0.0;
        let total = 20_000.0;
        let tail = report.observed.len() - 1;
        let mut mass = 0.0;
        for (l, &o) in report.observed.iter().enumerate() {
            let e = if l == tail { (1.0 - mass) * total } else { poisson_pmf(2.0, l as u64) * total };
            mass += poisson_pmf(2.0, l as u64);
            wrong += (o as f64 - e).powi(2) / e;
        }
        assert!(1.0 - dist.cdf(wrong) < 1e-3);
    }

    #[test]
    fn domination_small_instance() {
        let params = BirthdayParams::new(1, 50).unwrap().with_m(10).unwrap();
        let matching = default_matching(50, 1).unwrap();
        let report = poisson_domination_check(&params, &matching, 20_000, 2).unwrap();
        assert!(report.holds(), "{report:?}");
        // χ is exactly m for the exact histogram when the matching covers [n]
        assert_eq!(report.chi.exact.mean, 10.0);
    }
}
