use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use concentro::bounds::{eta_tail_gamma, gaussian_moment_bound, sobolev_moment_bound, weibull_moment_bound, BoundReport};
use concentro::graphs::{cycle_norm_bound, er_tail_experiment, expected_count, subgraph_norm_bound, GraphSpec};
use concentro::montecarlo::{
    chaos_moment, empirical_moment, hermite_tetrahedral_convergence, sample_polynomial, sandwich_check, sobolev_check,
    tail_from_samples, BoundKind, ChaosMode, MCConfig, MIN_TAIL_SAMPLES,
};
use concentro::norms::{mixed_norm_terms, norm_j, NormOptions};
use concentro::poly::{hermite, hermite_expansion};
use concentro::report::{csv, fmt_num, RunHeader};
use concentro::rmt::{linstat_tail_bound, wigner_experiment, VarianceConvention, WignerSpec};
use concentro::{Law, Polynomial, ProductDistribution, SetPartition, SplitPartition, Tensor};

use crate::args::*;
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Norm(c) => norm(c),
        Command::Mixednorm(c) => mixednorm(c),
        Command::Bounds(c) => bounds(c),
        Command::Tail(c) => tail(c),
        Command::Mc(McCmd::Moments(c)) => mc_moments(c),
        Command::Mc(McCmd::Tail(c)) => mc_tail(c),
        Command::Mc(McCmd::Chaos(c)) => mc_chaos(c),
        Command::Mc(McCmd::Sandwich(c)) => mc_sandwich(c),
        Command::Mc(McCmd::Hermite(c)) => mc_hermite(c),
        Command::Mc(McCmd::Sobolev(c)) => mc_sobolev(c),
        Command::Graphs(GraphsCmd::Triangles(c)) => graphs_triangles(c),
        Command::Graphs(GraphsCmd::Cyclebound(c)) => graphs_cyclebound(c),
        Command::Rmt(c) => rmt(c),
        Command::Hermite(c) => hermite_cmd(c),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

/// Writes the report to `out`, or to stdout when no path is given.
fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Header echoing every parameter of the command.
fn header(command: &str, seed: Option<u64>, params: &impl Serialize) -> RunHeader {
    let mut h = RunHeader::new(command);
    if let Some(s) = seed {
        h = h.seed(s);
    }
    if let Ok(Value::Object(map)) = serde_json::to_value(params) {
        for (k, v) in map {
            if k == "seed" {
                continue;
            }
            let text = match v {
                Value::Null => "none".to_string(),
                Value::String(s) => s,
                Value::Array(items) => items.iter().map(value_text).collect::<Vec<_>>().join(";"),
                other => value_text(&other),
            };
            h = h.param(k, text);
        }
    }
    h
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), fmt_num),
        other => other.to_string(),
    }
}

fn load_tensor(path: &Path) -> Result<Tensor> {
    Ok(Tensor::from_json(&read(path)?)?)
}

fn load_poly(path: &Path) -> Result<Polynomial> {
    Ok(Polynomial::from_json(&read(path)?)?)
}

fn load_dist(args: &LawArgs, n: usize) -> Result<ProductDistribution> {
    if let Some(path) = &args.dist {
        let dist = ProductDistribution::from_json(&read(path)?)?;
        if dist.n() != n {
            return Err(CliError::Usage(format!(
                "distribution in {} has {} coordinates, polynomial has {n} variables",
                path.display(),
                dist.n()
            )));
        }
        return Ok(dist);
    }
    let law = match args.law.as_str() {
        "gaussian" => Law::Gaussian,
        "rademacher" => Law::Rademacher,
        "bernoulli" => Law::Bernoulli { p: args.pp.ok_or_else(|| CliError::Usage("law bernoulli requires --pp".into()))? },
        "weibull" => Law::Weibull { alpha: args.alpha.ok_or_else(|| CliError::Usage("law weibull requires --alpha".into()))? },
        other => return Err(CliError::Usage(format!("unknown law {other:?}; use gaussian, rademacher, bernoulli or weibull"))),
    };
    law.validate()?;
    Ok(ProductDistribution::iid(law, n))
}

fn norm_options(args: &NormArgs, seed: u64) -> NormOptions {
    NormOptions { restarts: args.restarts, tol: args.tol, max_sweeps: args.max_sweeps, seed }
}

/// `L` from the flag, else the configured Sobolev constant, else the ψ₂ bound.
fn resolve_l(constants: &ConstantArgs, dist: &ProductDistribution) -> Result<f64> {
    match constants.l.as_deref() {
        None | Some("auto") => dist
            .sobolev()
            .map(|s| s.0)
            .or_else(|| dist.psi2())
            .ok_or_else(|| CliError::Usage("the law has no sub-Gaussian constant; pass --L".into())),
        Some(text) => text.parse::<f64>().map_err(|_| CliError::Usage(format!("--L expects a number or auto, got {text:?}"))),
    }
}

fn resolve_gamma(constants: &ConstantArgs, dist: &ProductDistribution) -> f64 {
    constants.gamma.or_else(|| dist.sobolev().map(|s| s.1)).unwrap_or(0.5)
}

fn resolve_kind(
    kind: Option<KindArg>,
    constants: &ConstantArgs,
    dist: &ProductDistribution,
) -> Result<BoundKind> {
    let gaussian = dist.laws().iter().all(|l| *l == Law::Gaussian);
    let kind = kind.unwrap_or(if gaussian {
        KindArg::Gaussian
    } else if dist.weibull_alpha().is_some() {
        KindArg::Weibull
    } else {
        KindArg::Sobolev
    });
    Ok(match kind {
        KindArg::Gaussian => BoundKind::Gaussian,
        KindArg::Sobolev => BoundKind::Sobolev { l: resolve_l(constants, dist)?, gamma: resolve_gamma(constants, dist) },
        KindArg::Weibull => BoundKind::Weibull {
            alpha: dist
                .weibull_alpha()
                .ok_or_else(|| CliError::Usage("the weibull bound needs an iid weibull law".into()))?,
        },
    })
}

fn moment_bound(f: &Polynomial, dist: &ProductDistribution, p: f64, kind: BoundKind, opts: &NormOptions) -> Result<BoundReport> {
    Ok(match kind {
        BoundKind::Gaussian => gaussian_moment_bound(f, dist, p, opts)?,
        BoundKind::Sobolev { l, gamma } => sobolev_moment_bound(f, dist, p, l, gamma, opts)?,
        BoundKind::Weibull { alpha } => weibull_moment_bound(f, dist, p, alpha, opts)?,
    })
}

fn norm(c: NormCmd) -> Result<()> {
    let a = load_tensor(&c.tensor)?;
    let j: SetPartition = c.partition.parse()?;
    let r = norm_j(&a, &j, &norm_options(&c.norm, c.seed))?;
    let cert = match &c.cert {
        Some(path) => {
            let body = serde_json::json!({
                "partition": j.to_string(),
                "value": r.value,
                "method": r.method.label(),
                "vectors": r.certificate,
            });
            write(path, &format!("{body}\n"))?;
            path.display().to_string()
        }
        None => "none".into(),
    };
    println!("{}", fmt_num(r.value));
    println!("method={}", r.method.label());
    println!("certificate={cert}");
    if let Some(out) = &c.out {
        let rows = vec![vec![
            j.to_string(),
            fmt_num(r.value),
            r.method.label().into(),
            if r.is_lower_bound() { "lower-bound".into() } else { "exact".into() },
            r.sweeps_used.to_string(),
            r.restarts_used.to_string(),
        ]];
        let h = header("norm", Some(c.seed), &c);
        write(out, &csv(&h, &["partition", "value", "method", "flag", "sweeps", "restarts"], &rows))?;
    }
    Ok(())
}

fn mixednorm(c: MixedCmd) -> Result<()> {
    let a = load_tensor(&c.tensor)?;
    let split = SplitPartition::parse(&c.split)?;
    let terms = mixed_norm_terms(&a, &split, c.alpha, &norm_options(&c.norm, c.seed))?;
    let total: f64 = terms.iter().map(|t| t.value).sum();
    let mut rows: Vec<Vec<String>> = terms
        .iter()
        .map(|t| vec![t.choice.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";"), fmt_num(t.value)])
        .collect();
    rows.push(vec!["total".into(), fmt_num(total)]);
    emit(&c.out, &csv(&header("mixednorm", Some(c.seed), &c), &["choice", "value"], &rows))
}

fn bounds(c: BoundsCmd) -> Result<()> {
    let f = load_poly(&c.poly)?;
    let dist = load_dist(&c.law, f.nvars())?;
    let kind = resolve_kind(c.kind, &c.constants, &dist)?;
    let report = moment_bound(&f, &dist, c.p, kind, &norm_options(&c.norm, c.seed))?;
    emit(&c.out, &report.to_csv(&header("bounds", Some(c.seed), &c)))
}

fn tail(c: TailCmd) -> Result<()> {
    let f = load_poly(&c.poly)?;
    let dist = load_dist(&c.law, f.nvars())?;
    let l = resolve_l(&c.constants, &dist)?;
    let gamma = resolve_gamma(&c.constants, &dist);
    let report = eta_tail_gamma(&f, &dist, c.t, l, gamma, c.c, &norm_options(&c.norm, c.seed))?;
    emit(&c.out, &report.to_csv(&header("tail", Some(c.seed), &c)))
}

fn mc_config(s: &SampleArgs, p: &[f64]) -> MCConfig {
    MCConfig { n_samples: s.n_samples, seed: s.seed, p_list: p.to_vec(), batch: s.batch }
}

fn mc_moments(c: McMomentsCmd) -> Result<()> {
    let f = load_poly(&c.poly)?;
    let dist = load_dist(&c.law, f.nvars())?;
    let est = empirical_moment(&f, &dist, &mc_config(&c.sample, &c.p))?;
    let rows: Vec<Vec<String>> =
        est.iter().map(|e| vec![fmt_num(e.p), fmt_num(e.value), fmt_num(e.stderr), e.n.to_string()]).collect();
    emit(&c.out, &csv(&header("mc moments", Some(c.sample.seed), &c), &["p", "moment", "stderr", "n"], &rows))
}

fn mc_tail(c: McTailCmd) -> Result<()> {
    let f = load_poly(&c.poly)?;
    let dist = load_dist(&c.law, f.nvars())?;
    if c.sample.n_samples < MIN_TAIL_SAMPLES {
        return Err(CliError::Usage(format!("tail estimates need --N ≥ {MIN_TAIL_SAMPLES}")));
    }
    if let Some(t) = c.t.iter().find(|t| t.is_nan() || **t < 0.0) {
        return Err(CliError::Usage(format!("threshold t = {t} must be nonnegative")));
    }
    let samples = sample_polynomial(&f, &dist, c.sample.n_samples, c.sample.batch, c.sample.seed)?;
    let rows: Vec<Vec<String>> = tail_from_samples(&samples, &c.t)
        .iter()
        .map(|e| vec![fmt_num(e.t), fmt_num(e.prob), fmt_num(e.lo), fmt_num(e.hi), e.n.to_string()])
        .collect();
    emit(&c.out, &csv(&header("mc tail", Some(c.sample.seed), &c), &["t", "prob", "lo", "hi", "n"], &rows))
}

fn mc_chaos(c: McChaosCmd) -> Result<()> {
    let a = load_tensor(&c.tensor)?;
    let cfg = mc_config(&c.sample, &c.p);
    cfg.validate()?;
    let modes: &[ChaosMode] = match c.mode {
        ChaosArg::Decoupled => &[ChaosMode::Decoupled],
        ChaosArg::Undecoupled => &[ChaosMode::Undecoupled],
        ChaosArg::Both => &[ChaosMode::Decoupled, ChaosMode::Undecoupled],
    };
    let mut rows = Vec::new();
    for &mode in modes {
        for &p in &c.p {
            let e = chaos_moment(&a, mode, p, &cfg)?;
            let label = if mode == ChaosMode::Decoupled { "decoupled" } else { "undecoupled" };
            rows.push(vec![label.to_string(), fmt_num(p), fmt_num(e.value), fmt_num(e.stderr)]);
        }
    }
    emit(&c.out, &csv(&header("mc chaos", Some(c.sample.seed), &c), &["mode", "p", "moment", "stderr"], &rows))
}

fn mc_sandwich(c: McSandwichCmd) -> Result<()> {
    let f = load_poly(&c.poly)?;
    let dist = load_dist(&c.law, f.nvars())?;
    let kind = resolve_kind(c.kind, &c.constants, &dist)?;
    let cfg = mc_config(&c.sample, &c.p);
    let rows = sandwich_check(&f, &dist, &cfg, kind, (c.lo, c.hi), &norm_options(&c.norm, c.sample.seed))?;
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_num(r.p),
                fmt_num(r.empirical.value),
                fmt_num(r.empirical.stderr),
                fmt_num(r.bound),
                r.ratio.map_or_else(|| "none".into(), fmt_num),
                if r.pass { "PASS".into() } else { "FAIL".into() },
            ]
        })
        .collect();
    let cols = ["p", "empirical", "stderr", "bound", "ratio", "verdict"];
    emit(&c.out, &csv(&header("mc sandwich", Some(c.sample.seed), &c), &cols, &rows))
}

fn mc_hermite(c: McHermiteCmd) -> Result<()> {
    let cfg = MCConfig { n_samples: c.n_samples, seed: c.seed, p_list: vec![2.0], batch: c.batch };
    let rows = hermite_tetrahedral_convergence(c.d, &c.sizes, &cfg)?;
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_num(r.mean_sq),
                fmt_num(r.stderr),
                r.closed_form.map_or_else(|| "none".into(), fmt_num),
            ]
        })
        .collect();
    emit(&c.out, &csv(&header("mc hermite", Some(c.seed), &c), &["N", "mean_sq", "stderr", "closed_form"], &rows))
}

fn mc_sobolev(c: McSobolevCmd) -> Result<()> {
    let f = load_poly(&c.poly)?;
    let mut dist = load_dist(&c.law, f.nvars())?;
    if c.constants.l.is_some() || c.constants.gamma.is_some() {
        let l = resolve_l(&c.constants, &dist)?;
        let gamma = resolve_gamma(&c.constants, &dist);
        dist = dist.with_sobolev(l, gamma)?;
    }
    let rows = sobolev_check(&dist, &f, &mc_config(&c.sample, &c.p), c.c)?;
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_num(r.p),
                fmt_num(r.lhs),
                fmt_num(r.rhs),
                fmt_num(r.ratio),
                if r.pass { "PASS".into() } else { "FAIL".into() },
            ]
        })
        .collect();
    emit(&c.out, &csv(&header("mc sobolev", Some(c.sample.seed), &c), &["p", "lhs", "rhs", "ratio", "verdict"], &rows))
}

fn graphs_triangles(c: TrianglesCmd) -> Result<()> {
    let h = GraphSpec::cycle(c.k)?;
    let expected = expected_count(&h, c.n, c.p)?;
    let ts: Vec<f64> = c.eps.iter().map(|e| e * expected).collect();
    let cfg = MCConfig { n_samples: c.sample.n_samples, seed: c.sample.seed, p_list: vec![2.0], batch: c.sample.batch };
    let report = er_tail_experiment(c.k, c.n, c.p, &ts, &cfg, c.c)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .zip(&c.eps)
        .map(|(r, e)| {
            vec![
                fmt_num(*e),
                fmt_num(r.t),
                fmt_num(r.empirical.prob),
                fmt_num(r.empirical.lo),
                fmt_num(r.empirical.hi),
                fmt_num(r.bound),
                r.triangle_bound.map_or_else(|| "none".into(), fmt_num),
            ]
        })
        .collect();
    let h = header("graphs triangles", Some(c.sample.seed), &c)
        .param("expected", fmt_num(report.expected))
        .param("mean", fmt_num(report.mean))
        .param("stderr", fmt_num(report.stderr));
    let cols = ["eps", "t", "prob", "lo", "hi", "cycle_bound", "triangle_bound"];
    emit(&c.out, &csv(&h, &cols, &rows))
}

fn graphs_cyclebound(c: CycleBoundCmd) -> Result<()> {
    let j: SetPartition = c.partition.parse()?;
    let h = header("graphs cyclebound", None, &c);
    let text = match &c.graph {
        Some(path) => {
            let g = GraphSpec::from_json(&read(path)?)?;
            let sum = subgraph_norm_bound(&g, c.d, &j, c.n, c.p)?;
            let per_copy = sum / g.aut_size()? as f64;
            csv(&h, &["sequence_sum", "per_copy"], &[vec![fmt_num(sum), fmt_num(per_copy)]])
        }
        None => {
            let g = GraphSpec::cycle(c.k)?;
            let b = cycle_norm_bound(&g, c.d, &j, c.n, c.p)?;
            csv(&h, &["sequence_sum", "per_copy", "shape"], &[vec![fmt_num(b.sequence_sum), fmt_num(b.per_copy), fmt_num(b.shape)]])
        }
    };
    emit(&c.out, &text)
}

fn rmt(c: RmtCmd) -> Result<()> {
    let f = load_poly(&c.f)?;
    let convention = match c.convention {
        ConventionArg::Unit => VarianceConvention::Unit,
        ConventionArg::Goe => VarianceConvention::Goe,
    };
    let spec = WignerSpec::gaussian(c.n).with_convention(convention);
    let cfg = MCConfig { n_samples: c.replicas, seed: c.seed, p_list: vec![2.0], batch: c.batch };
    let report = wigner_experiment(&f, &spec, &cfg, &c.t, c.cl)?;
    let mut rows = Vec::with_capacity(report.rows.len());
    for r in &report.rows {
        let bound = linstat_tail_bound(&f, c.n, r.t, c.cl, c.k)?.tail;
        rows.push(vec![
            fmt_num(r.t),
            fmt_num(r.empirical.prob),
            fmt_num(r.empirical.lo),
            fmt_num(r.empirical.hi),
            fmt_num(bound),
        ]);
    }
    let h = header("rmt", Some(c.seed), &c)
        .param("mean_z", fmt_num(report.mean_z))
        .param("stderr_z", fmt_num(report.stderr_z))
        .param("sobolev_term", fmt_num(report.sobolev_term))
        .param("sobolev_stderr", fmt_num(report.sobolev_stderr))
        .param("semicircle_term", fmt_num(report.semicircle_term));
    emit(&c.out, &csv(&h, &["t", "prob", "lo", "hi", "bound"], &rows))
}

fn hermite_cmd(c: HermiteCmd) -> Result<()> {
    let h = header("hermite", None, &c);
    let text = match (&c.k, &c.poly) {
        (Some(k), _) => {
            let coeffs = hermite(*k)?;
            let rows: Vec<Vec<String>> =
                coeffs.coeffs.iter().enumerate().map(|(j, v)| vec![j.to_string(), v.to_string()]).collect();
            csv(&h, &["power", "coef"], &rows)
        }
        (None, Some(path)) => {
            let f = load_poly(path)?;
            let rows: Vec<Vec<String>> = hermite_expansion(&f)?
                .iter()
                .map(|(idx, v)| vec![idx.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(";"), fmt_num(*v)])
                .collect();
            csv(&h, &["multi_index", "coef"], &rows)
        }
        (None, None) => return Err(CliError::Usage("pass --k or --poly".into())),
    };
    emit(&c.out, &text)
}
