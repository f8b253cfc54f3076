//! One function per subcommand, each a thin wrapper over a library call.

use std::fs;
use std::path::Path;

use gwpoly::apmod::{self, ApParams};
use gwpoly::birthday::{self, BirthdayParams};
use gwpoly::gwidth::{self, ImageSet, PolyMap};
use gwpoly::randsets::{self, DifferenceModel, Intersectivity, RandomSetParams, SearchConfig, TailQuery};
use gwpoly::rng::{derive_seed, stream};
use gwpoly::tensorlift::{self, LiftParams};
use gwpoly::{poly, BitVector, Error, Hypergraph, SparseMatrix};

use crate::cli::*;
use crate::report::{Report, Value};

/// Why a command did not succeed; each kind has its own exit code.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Budget(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

pub struct Outcome {
    pub report: Report,
    /// Set when a deterministic check came out false.
    pub verification_failure: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self {
            report,
            verification_failure: None,
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn require<T>(value: Option<T>, flag: &str, context: &str) -> Result<T> {
    value.ok_or_else(|| invalid(format!("missing `--{flag}` ({context})")))
}

fn parse_list(flag: &str, text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| invalid(format!("invalid value for `--{flag}`: `{t}` is not a nonnegative integer")))
        })
        .collect()
}

fn read(flag: &str, path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| invalid(format!("cannot read `--{flag}` {}: {e}", path.display())))
}

fn write(flag: &str, path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write `--{flag}` {}: {e}", path.display())))
}

fn positive(flag: &str, v: usize) -> Result<usize> {
    if v == 0 {
        Err(invalid(format!("`--{flag}` must be positive")))
    } else {
        Ok(v)
    }
}

pub fn run(command: &Command, seed: u64) -> Result<Outcome> {
    match command {
        Command::GwEstimate(a) => gw_estimate(a, seed).map(Into::into),
        Command::MatrixVerify(a) => matrix_verify(a),
        Command::Birthday(a) => birthday(a, seed).map(Into::into),
        Command::PoissonCheck(a) => poisson_check(a, seed).map(Into::into),
        Command::TjRatio(a) => tj_ratio(a, seed).map(Into::into),
        Command::ApCount(a) => ap_count(a).map(Into::into),
        Command::ApStructure(a) => ap_structure(a, seed),
        Command::UpperTail(a) => upper_tail(a, seed).map(Into::into),
        Command::Intersective(a) => intersective(a, seed),
        Command::BoundEval(a) => bound_eval(a).map(Into::into),
    }
}

fn gw_estimate(a: &GwEstimateArgs, seed: u64) -> Result<Report> {
    let mut report = Report::new(
        "gw-estimate",
        &["n", "k", "d", "t", "samples", "seed", "gw_mean", "gw_se", "bound", "fitted_C"],
    );
    let samples = positive("samples", a.samples)?;
    if a.family == Family::Points {
        let path = require(a.points.as_deref(), "points", "family points")?;
        let points = parse_points(&read("points", path)?)?;
        let set = ImageSet::explicit(points)?;
        let est = gwidth::gw_estimate(&set, samples, seed)?;
        report.push(vec![
            Value::Empty,
            set.k().into(),
            Value::Empty,
            Value::Empty,
            samples.into(),
            seed.into(),
            est.mean.into(),
            est.std_error.into(),
            Value::Empty,
            Value::Empty,
        ]);
        return Ok(report);
    }

    let sizes = match &a.ladder {
        Some(text) => parse_list("ladder", text)?,
        None if a.family == Family::ApGradient => vec![require(a.modulus, "N", "family ap-gradient")?],
        None => vec![require(a.n, "n", "families identity and random")?],
    };
    if sizes.is_empty() {
        return Err(invalid("`--ladder` lists no sizes"));
    }
    let rows = sizes
        .iter()
        .map(|&size| {
            let map = match a.family {
                Family::Identity => PolyMap::identity(size)?,
                Family::Random => PolyMap::random(
                    size,
                    require(a.k, "k", "family random")?,
                    require(a.d, "d", "family random")?,
                    require(a.t, "t", "family random")?,
                    derive_seed(seed, size as u64),
                )?,
                Family::ApGradient => {
                    apmod::ap_gradient_map(&ApParams::new(size, require(a.k, "k", "family ap-gradient")?)?)?
                }
                Family::Points => unreachable!("handled above"),
            };
            Ok(gwidth::ladder_row(&map, samples, seed)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = gwidth::fit_ladder(&rows)?;
    for row in &rows {
        report.push(vec![
            row.n.into(),
            row.k.into(),
            row.d.into(),
            row.t.into(),
            samples.into(),
            seed.into(),
            row.gw.mean.into(),
            row.gw.std_error.into(),
            row.bound.into(),
            fit.fitted_c.into(),
        ]);
    }
    if a.ladder.is_some() {
        report.note("nongrowing", fit.nongrowing);
        report.note("observed_exponent", fit.observed_exponent);
    }
    Ok(report)
}

fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| invalid(format!("`--points` line {}: `{t}` is not a number", i + 1)))
                })
                .collect()
        })
        .collect()
}

fn matrix_verify(a: &MatrixVerifyArgs) -> Result<Outcome> {
    let h: Hypergraph = read("hypergraph", &a.hypergraph)?.parse()?;
    if let Some(n) = a.n {
        if n != h.n() {
            return Err(invalid(format!("`--n` is {n} but the hypergraph file has n = {}", h.n())));
        }
    }
    let s = match a.s {
        Some(s) => s,
        None => birthday::birthday_constants(a.r)?.s,
    };
    let params = LiftParams::new(h.n(), a.m, a.r, s)?.with_budget(a.budget);
    if h.n() > tensorlift::MAX_IDENTITY_N {
        return Err(Failure::Budget(format!(
            "`--n` = {} exceeds the sign-vector budget of {}",
            h.n(),
            tensorlift::MAX_IDENTITY_N
        )));
    }
    let lemma = tensorlift::build_matrix_lemma(&h, &params)?;
    if let Some(path) = &a.write_matrix {
        write("write-matrix", path, &lemma.matrix.to_string())?;
    }
    let matrix: SparseMatrix = match &a.matrix {
        Some(path) => read("matrix", path)?.parse()?,
        None => lemma.matrix.clone(),
    };
    let check = tensorlift::check_identity(&matrix, &h, a.m, lemma.cover_count)?;
    let norm = gwidth::spectral_norm(&matrix, gwidth::DEFAULT_TOL, gwidth::DEFAULT_MAX_ITERS)?;

    let r_fact: u128 = (1..=a.r as u128).product();
    let pow = |b: u128| b.saturating_pow(a.r as u32);
    let rigorous = (lemma.num_colors() as u128)
        .saturating_mul(u128::from(s) + pow(4) + pow(2).saturating_mul(u128::from(s)))
        .saturating_mul(r_fact);
    let equal_cover = lemma.classes.iter().all(|c| c.equal_cover);
    let pairs: u64 = lemma.classes.iter().map(|c| c.pairs).sum();
    let max_row_count = lemma.classes.iter().map(|c| c.max_row_count).max().unwrap_or(0);
    let max_col_count = lemma.classes.iter().map(|c| c.max_col_count).max().unwrap_or(0);

    let mut report = Report::new(
        "matrix-verify",
        &[
            "n",
            "m",
            "r",
            "s",
            "edges",
            "colors",
            "cover_count",
            "equal_cover",
            "pairs",
            "nnz",
            "max_row_count",
            "max_col_count",
            "max_row_sum",
            "row_sum_bound",
            "rigorous_row_bound",
            "spectral_norm",
            "norm_upper",
            "checked",
            "identity",
        ],
    );
    report.status = Some(format!(
        "identity: {}, cover_count={}",
        if check.holds { "OK" } else { "FAILED" },
        lemma.cover_count
    ));
    report.push(vec![
        h.n().into(),
        a.m.into(),
        a.r.into(),
        s.into(),
        h.num_edges().into(),
        lemma.num_colors().into(),
        lemma.cover_count.into(),
        equal_cover.into(),
        pairs.into(),
        matrix.nnz().into(),
        max_row_count.into(),
        max_col_count.into(),
        matrix.max_row_sum().into(),
        lemma.row_sum_bound.into(),
        (rigorous as i128).into(),
        norm.estimate.into(),
        norm.upper_bound.into(),
        check.checked.into(),
        check.holds.into(),
    ]);
    let verification_failure = check.counterexample.map(|cx| {
        format!(
            "identity fails at x = {:?}: quadratic form {} but 2 c p_H(x) = {}",
            cx.x, cx.quadratic_form, cx.expected
        )
    });
    Ok(Outcome {
        report,
        verification_failure,
    })
}

fn birthday_params(r: usize, n: usize, m: Option<usize>, s: Option<u64>) -> Result<BirthdayParams> {
    let mut params = BirthdayParams::new(r, n)?;
    if let Some(m) = m {
        params = params.with_m(m)?;
    }
    if let Some(s) = s {
        params = params.with_s(s)?;
    }
    Ok(params)
}

fn birthday(a: &BirthdayArgs, seed: u64) -> Result<Report> {
    let params = birthday_params(a.r, a.n, a.m, a.s)?;
    let matching = birthday::default_matching(a.n, a.r)?;
    let run = birthday::run_birthday(&params, &matching, a.samples, seed)?;
    let mut report = Report::new(
        "birthday",
        &[
            "r",
            "n",
            "m",
            "s",
            "samples",
            "seed",
            "p_good",
            "se",
            "mean_phi",
            "se_phi",
            "p_exceeds",
            "se_exceeds",
        ],
    );
    report.push(vec![
        params.r.into(),
        params.n.into(),
        params.m.into(),
        params.s.into(),
        a.samples.into(),
        seed.into(),
        run.p_good.mean.into(),
        run.p_good.std_error.into(),
        run.mean_phi.mean.into(),
        run.mean_phi.std_error.into(),
        run.p_exceeds.mean.into(),
        run.p_exceeds.std_error.into(),
    ]);
    Ok(report)
}

fn poisson_check(a: &PoissonCheckArgs, seed: u64) -> Result<Report> {
    let params = birthday_params(a.r, a.n, a.m, None)?;
    let matching = birthday::default_matching(a.n, a.r)?;
    let dom = birthday::poisson_domination_check(&params, &matching, a.samples, seed)?;
    let chi = birthday::poisson_sum_chi_square(a.mu_a, a.mu_b, a.samples, derive_seed(seed, 0))?;
    let mut report = Report::new(
        "poisson-check",
        &[
            "check",
            "exact_mean",
            "exact_se",
            "poisson_mean",
            "poisson_se",
            "statistic",
            "p_value",
            "holds",
        ],
    );
    for (name, side) in [("psi", dom.psi), ("chi", dom.chi)] {
        report.push(vec![
            name.into(),
            side.exact.mean.into(),
            side.exact.std_error.into(),
            side.poisson.mean.into(),
            side.poisson.std_error.into(),
            Value::Empty,
            Value::Empty,
            side.holds.into(),
        ]);
    }
    report.push(vec![
        "poisson_sum".into(),
        Value::Empty,
        Value::Empty,
        Value::Empty,
        Value::Empty,
        chi.statistic.into(),
        chi.p_value.into(),
        chi.passes(a.alpha).into(),
    ]);
    Ok(report)
}

fn tj_ratio(a: &TjRatioArgs, seed: u64) -> Result<Report> {
    let samples = positive("samples", a.samples)?;
    let rungs: Vec<(usize, usize)> = match &a.ladder {
        Some(text) => parse_list("ladder", text)?.into_iter().map(|n| (n, n / 4)).collect(),
        None => {
            let n = require(a.dim, "N", "or give `--ladder`")?;
            vec![(n, a.k.unwrap_or(n / 4))]
        }
    };
    let mut report = Report::new(
        "tj-ratio",
        &["N", "k", "samples", "seed", "lhs_mean", "lhs_se", "rhs", "ratio"],
    );
    let mut ratios = Vec::new();
    for (n, k) in rungs {
        positive("k", k)?;
        let matrices = gwidth::random_matchings(n, k, derive_seed(seed, n as u64))?;
        let tj = gwidth::tj_ratio_experiment(&matrices, samples, seed)?;
        ratios.push(tj.ratio);
        report.push(vec![
            n.into(),
            k.into(),
            samples.into(),
            seed.into(),
            tj.lhs.mean.into(),
            tj.lhs.std_error.into(),
            tj.rhs.into(),
            tj.ratio.into(),
        ]);
    }
    if a.ladder.is_some() {
        report.note("max_ratio", ratios.iter().copied().fold(0.0, f64::max));
        report.note("strictly_increasing", ratios.windows(2).all(|w| w[1] > w[0]));
    }
    Ok(report)
}

fn parse_set(modulus: usize, text: &str) -> Result<BitVector> {
    let members = parse_list("set", text)?;
    if let Some(v) = members.iter().find(|&&v| v >= modulus) {
        return Err(invalid(format!("`--set` element {v} is not below N = {modulus}")));
    }
    Ok(BitVector::from_members(modulus, members))
}

fn ap_count(a: &ApCountArgs) -> Result<Report> {
    let params = ApParams::new(a.modulus, a.k)?;
    let h = if a.loose {
        apmod::ap_hypergraph_loose(&params)?
    } else {
        apmod::ap_hypergraph(&params)?
    };
    if let Some(path) = &a.write_hypergraph {
        write("write-hypergraph", path, &h.to_string())?;
    }
    let x_k = match &a.set {
        Some(text) => Some(poly::eval_bits(&h, &parse_set(a.modulus, text)?)?),
        None => None,
    };
    let mut report = Report::new("ap-count", &["N", "k", "edges", "max_degree", "x_k"]);
    report.push(vec![
        a.modulus.into(),
        a.k.into(),
        h.num_edges().into(),
        h.max_degree().into(),
        x_k.into(),
    ]);
    Ok(report)
}

fn ap_structure(a: &ApStructureArgs, seed: u64) -> Result<Outcome> {
    let params = ApParams::new(a.modulus, a.k)?;
    let h = apmod::ap_hypergraph(&params)?;
    let (n, k) = (a.modulus, a.k);
    let pair = apmod::pair_incidence_profile(&h).constant();
    let (degrees, _) = h.degree_profile();
    let degree = degrees.iter().all(|&d| d == degrees[0]).then_some(degrees[0]);

    let lambda_ok = (0..a.samples).all(|i| {
        let set = randsets::sample_subset_with(n, 0.5, &mut stream(seed, i as u64));
        2 * poly::eval_bits(&h, &set).expect("matching length") == apmod::lambda_k(&set, k)
    });

    let fixed: Vec<Hypergraph> = (1..n)
        .map(|y| apmod::fixed_difference_hypergraph(&params, y))
        .collect::<std::result::Result<_, _>>()?;
    let mut union: Vec<Vec<usize>> = fixed[..(n - 1) / 2].iter().flat_map(|f| f.edges().to_vec()).collect();
    let mut edges = h.edges().to_vec();
    union.sort();
    edges.sort();
    let partition_ok = union == edges;
    let fixed_degree = fixed.iter().map(Hypergraph::max_degree).max().unwrap_or(0);

    let transitive = apmod::two_transitivity_check(&params, a.trials, derive_seed(seed, 0))?;
    let gradients = apmod::gradient_hypergraphs(&h)?;
    let gradient_degree = gradients.iter().map(Hypergraph::max_degree).max().unwrap_or(0);
    let gradient_edges: usize = gradients.iter().map(Hypergraph::num_edges).sum();

    let expected_pair = k * (k - 1) / 2;
    let checks = [
        ("edges", h.num_edges() == n * (n - 1) / 2),
        ("pair_incidence", pair == Some(expected_pair)),
        ("vertex_degree", degree == Some(k * (n - 1) / 2)),
        ("lambda", lambda_ok),
        ("partition", partition_ok),
        ("transitive", transitive),
        ("fixed_diff_degree", fixed_degree == k),
        ("gradient_degree", gradient_degree == expected_pair),
        ("gradient_edges", gradient_edges == k * h.num_edges()),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();

    let mut report = Report::new(
        "ap-structure",
        &[
            "N",
            "k",
            "edges",
            "pair_incidence",
            "vertex_degree",
            "lambda_ok",
            "partition_ok",
            "transitive",
            "fixed_diff_max_degree",
            "gradient_max_degree",
            "ok",
        ],
    );
    report.push(vec![
        n.into(),
        k.into(),
        h.num_edges().into(),
        pair.into(),
        degree.into(),
        lambda_ok.into(),
        partition_ok.into(),
        transitive.into(),
        fixed_degree.into(),
        gradient_degree.into(),
        failed.is_empty().into(),
    ]);
    Ok(Outcome {
        report,
        verification_failure: (!failed.is_empty()).then(|| format!("structure checks failed: {}", failed.join(", "))),
    })
}

fn upper_tail(a: &UpperTailArgs, seed: u64) -> Result<Report> {
    let params = RandomSetParams::new(a.modulus, a.p, seed)?;
    let query = TailQuery::new(a.k, a.delta)?;
    let tail = randsets::upper_tail_mc(&params, &query, a.samples, seed)?;
    let mut columns = vec![
        "N",
        "k",
        "p",
        "delta",
        "samples",
        "seed",
        "prob",
        "se_or_bound",
        "bound_kind",
        "log_prob",
        "reference_rate",
    ];
    if a.exact {
        columns.push("exact");
    }
    let mut report = Report::new("upper-tail", &columns);
    let mut row = vec![
        a.modulus.into(),
        a.k.into(),
        a.p.into(),
        a.delta.into(),
        a.samples.into(),
        seed.into(),
        tail.prob.mean.into(),
        tail.se_or_bound().into(),
        if tail.zero_hit_bound.is_some() { "rule_of_three" } else { "se" }.into(),
        tail.log_prob.into(),
        tail.reference_rate.into(),
    ];
    if a.exact {
        row.push(randsets::exact_upper_tail(&params, &query)?.into());
    }
    report.push(row);
    Ok(report)
}

fn intersective(a: &IntersectiveArgs, seed: u64) -> Result<Outcome> {
    if let Some(text) = &a.diffs {
        let diffs = parse_list("D", text)?;
        let config = SearchConfig {
            seed,
            ..SearchConfig::default()
        };
        let result = randsets::intersectivity_check_with(a.modulus, a.ell, a.alpha, &diffs, &config)?;
        let mode = if a.modulus <= randsets::MAX_EXACT_N { "exact" } else { "heuristic" };
        let (label, witness) = match &result {
            Intersectivity::Intersective => ("intersective", None),
            Intersectivity::NotIntersective(w) => ("not_intersective", Some(w.clone())),
            Intersectivity::NoWitnessFound => ("no_witness_found", None),
        };
        let verification_failure = witness.as_ref().and_then(|w| {
            let set = BitVector::from_members(a.modulus, w.iter().copied());
            randsets::contains_progression(&set, a.ell, &diffs)
                .then(|| format!("witness {w:?} contains a progression"))
        });
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let mut report = Report::new(
            "intersective",
            &["N", "ell", "alpha", "D", "size", "mode", "result", "witness"],
        );
        report.push(vec![
            a.modulus.into(),
            a.ell.into(),
            a.alpha.into(),
            join(&diffs).into(),
            randsets::min_density_size(a.modulus, a.alpha).into(),
            mode.into(),
            label.into(),
            witness.as_deref().map(join).into(),
        ]);
        return Ok(Outcome {
            report,
            verification_failure,
        });
    }

    let model = match require(a.model, "model", "or give `--D`")? {
        Model::Bernoulli => DifferenceModel::Bernoulli(require(a.p, "p", "model bernoulli")?),
        Model::Draws => DifferenceModel::Draws(require(a.draws, "draws", "model draws")?),
    };
    let est = randsets::random_intersectivity_experiment(a.modulus, a.ell, a.alpha, model, a.trials, seed)?;
    let mut columns = vec!["N", "ell", "alpha", "model", "param", "trials", "prob", "se"];
    if a.exact {
        columns.push("exact");
    }
    let mut report = Report::new("intersective", &columns);
    let mut row = vec![
        a.modulus.into(),
        a.ell.into(),
        a.alpha.into(),
        model.name().into(),
        model.param().into(),
        a.trials.into(),
        est.mean.into(),
        est.std_error.into(),
    ];
    if a.exact {
        let DifferenceModel::Bernoulli(p) = model else {
            return Err(invalid("`--exact` needs `--model bernoulli`"));
        };
        row.push(randsets::exact_random_intersectivity(a.modulus, a.ell, a.alpha, p)?.into());
    }
    report.push(row);
    Ok(report.into())
}

fn bound_eval(a: &BoundEvalArgs) -> Result<Report> {
    let ns = parse_list("n", &a.n)?;
    let mut report = Report::new("bound-eval", &["n", "k", "d", "t", "exponent", "bound"]);
    for n in ns {
        let bound = gwidth::theorem_bound(n, a.k, a.d, a.t)?;
        let exponent = 1.0 - 1.0 / a.d.div_ceil(2) as f64;
        report.push(vec![
            n.into(),
            a.k.into(),
            a.d.into(),
            a.t.into(),
            exponent.into(),
            bound.into(),
        ]);
    }
    Ok(report)
}
