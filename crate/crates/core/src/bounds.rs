//! Moment and tail bound functionals built from the partition norms of the
//! expected derivative tensors.
//!
//! Every unspecified universal constant is an explicit parameter (default 1),
//! so reported values hold up to that constant.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::norms::{mixed_norm, norm_j, NormOptions, NormResult};
use crate::partitions::{enumerate_partitions, enumerate_splits, SetPartition, MAX_SPLIT_ORDER};
use crate::poly::{expected_derivative_tensor, Polynomial, ProductDistribution};
use crate::report::{csv, fmt_num, RunHeader};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Aggregate {
    Sum,
    Min,
}

/// One `(d, partition)` term.
#[derive(Debug, Clone, Serialize)]
pub struct BoundTerm {
    pub d: usize,
    pub partition: String,
    /// Power of `p` for moment bounds, power of the ratio `t / (L^d ‖·‖)` for η.
    pub exponent: f64,
    pub l_power: f64,
    pub norm: f64,
    /// The norm came from alternating maximization and may be too small.
    pub lower_bound: bool,
    pub term: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub kind: String,
    pub aggregate: Aggregate,
    pub terms: Vec<BoundTerm>,
    pub total: f64,
    /// `2 exp(-η / C)` for η functionals.
    pub tail: Option<f64>,
    pub meta: Vec<(String, String)>,
}

impl BoundReport {
    fn new(kind: &str, aggregate: Aggregate, terms: Vec<BoundTerm>, meta: Vec<(String, String)>) -> Self {
        let total = match aggregate {
            Aggregate::Sum => terms.iter().map(|t| t.term).sum(),
            Aggregate::Min => terms.iter().map(|t| t.term).fold(f64::INFINITY, f64::min),
        };
        Self { kind: kind.into(), aggregate, terms, total, tail: None, meta }
    }

    pub fn has_lower_bound_terms(&self) -> bool {
        self.terms.iter().any(|t| t.lower_bound)
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self
            .terms
            .iter()
            .map(|t| {
                vec![
                    t.d.to_string(),
                    t.partition.clone(),
                    fmt_num(t.exponent),
                    fmt_num(t.norm),
                    if t.lower_bound { "lower-bound".into() } else { "exact".into() },
                    fmt_num(t.term),
                ]
            })
            .collect();
        let flag = if self.has_lower_bound_terms() { "contains-lower-bounds" } else { "exact" };
        let label = match self.aggregate {
            Aggregate::Sum => "total",
            Aggregate::Min => "min",
        };
        rows.push(vec!["".into(), label.into(), "".into(), "".into(), flag.into(), fmt_num(self.total)]);
        if let Some(tail) = self.tail {
            rows.push(vec!["".into(), "tail".into(), "".into(), "".into(), flag.into(), fmt_num(tail)]);
        }
        rows
    }

    pub fn to_csv(&self, header: &RunHeader) -> String {
        let mut h = header.clone();
        for (k, v) in &self.meta {
            h = h.param(k.clone(), v);
        }
        h = h.param("note", "values hold up to universal constants");
        csv(&h, &["d", "partition", "exponent", "norm", "flag", "term"], &self.csv_rows())
    }
}

/// `‖E D^d f‖_J` for every `1 ≤ d ≤ deg f` and `J ∈ P_d`, in (d, canonical) order.
#[derive(Debug, Clone)]
pub struct NormRow {
    pub d: usize,
    pub partition: SetPartition,
    pub result: NormResult,
}

pub fn derivative_norms(f: &Polynomial, dist: &ProductDistribution, opts: &NormOptions) -> Result<Vec<NormRow>> {
    let mut rows = Vec::new();
    for d in 1..=f.degree() {
        let tensor = expected_derivative_tensor(f, dist, d)?;
        for j in enumerate_partitions(d)? {
            let result = norm_j(&tensor, &j, opts)?;
            rows.push(NormRow { d, partition: j, result });
        }
    }
    Ok(rows)
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(domain(format!("moment order p = {p} must be at least 2")));
    }
    Ok(())
}

fn meta(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// `Σ_d Σ_J p^{#J/2} ‖E D^d f‖_J`.
pub fn gaussian_moment_bound(f: &Polynomial, dist: &ProductDistribution, p: f64, opts: &NormOptions) -> Result<BoundReport> {
    check_p(p)?;
    let terms = derivative_norms(f, dist, opts)?
        .into_iter()
        .map(|row| {
            let exponent = row.partition.num_blocks() as f64 / 2.0;
            BoundTerm {
                d: row.d,
                partition: row.partition.to_string(),
                exponent,
                l_power: 0.0,
                norm: row.result.value,
                lower_bound: row.result.is_lower_bound(),
                term: p.powf(exponent) * row.result.value,
            }
        })
        .collect();
    Ok(BoundReport::new(
        "gaussian-moment",
        Aggregate::Sum,
        terms,
        meta(&[("p", fmt_num(p)), ("law", dist.describe())]),
    ))
}

/// `Σ_d Σ_J L^d p^{(γ-1/2)d + #J/2} ‖E D^d f‖_J`.
pub fn sobolev_moment_bound(
    f: &Polynomial,
    dist: &ProductDistribution,
    p: f64,
    l: f64,
    gamma: f64,
    opts: &NormOptions,
) -> Result<BoundReport> {
    check_p(p)?;
    if !(gamma >= 0.5) {
        return Err(domain(format!("gamma = {gamma} must be at least 1/2")));
    }
    if !(l > 0.0) {
        return Err(domain(format!("L = {l} must be positive")));
    }
    let terms = derivative_norms(f, dist, opts)?
        .into_iter()
        .map(|row| {
            let exponent = (gamma - 0.5) * row.d as f64 + row.partition.num_blocks() as f64 / 2.0;
            BoundTerm {
                d: row.d,
                partition: row.partition.to_string(),
                exponent,
                l_power: row.d as f64,
                norm: row.result.value,
                lower_bound: row.result.is_lower_bound(),
                term: l.powi(row.d as i32) * p.powf(exponent) * row.result.value,
            }
        })
        .collect();
    Ok(BoundReport::new(
        "sobolev-moment",
        Aggregate::Sum,
        terms,
        meta(&[("p", fmt_num(p)), ("L", fmt_num(l)), ("gamma", fmt_num(gamma)), ("law", dist.describe())]),
    ))
}

/// `η_f(t) = min_{d,J} (t / (L^d ‖E D^d f‖_J))^{2/#J}` and the tail `2 exp(-η/C)`.
pub fn eta_tail(
    f: &Polynomial,
    dist: &ProductDistribution,
    t: f64,
    l: f64,
    c: f64,
    opts: &NormOptions,
) -> Result<BoundReport> {
    eta_tail_gamma(f, dist, t, l, 0.5, c, opts)
}

/// The `γ` version: exponents `2 / ((2γ-1)d + #J)`, which reduces to
/// [`eta_tail`] at `γ = 1/2`.
pub fn eta_tail_gamma(
    f: &Polynomial,
    dist: &ProductDistribution,
    t: f64,
    l: f64,
    gamma: f64,
    c: f64,
    opts: &NormOptions,
) -> Result<BoundReport> {
    if !(t > 0.0) {
        return Err(domain(format!("t = {t} must be positive")));
    }
    if !(l > 0.0) {
        return Err(domain(format!("L = {l} must be positive")));
    }
    if !(gamma >= 0.5) {
        return Err(domain(format!("gamma = {gamma} must be at least 1/2")));
    }
    if !(c > 0.0) {
        return Err(domain(format!("constant C = {c} must be positive")));
    }
    let terms: Vec<BoundTerm> = derivative_norms(f, dist, opts)?
        .into_iter()
        .filter(|row| row.result.value > 0.0)
        .map(|row| {
            let blocks = row.partition.num_blocks() as f64;
            let exponent = 2.0 / ((2.0 * gamma - 1.0) * row.d as f64 + blocks);
            let ratio = t / (l.powi(row.d as i32) * row.result.value);
            BoundTerm {
                d: row.d,
                partition: row.partition.to_string(),
                exponent,
                l_power: row.d as f64,
                norm: row.result.value,
                lower_bound: row.result.is_lower_bound(),
                term: ratio.powf(exponent),
            }
        })
        .collect();
    if terms.is_empty() {
        return Err(Error::DegeneratePolynomial);
    }
    let mut report = BoundReport::new(
        "eta",
        Aggregate::Min,
        terms,
        meta(&[
            ("t", fmt_num(t)),
            ("L", fmt_num(l)),
            ("gamma", fmt_num(gamma)),
            ("C", fmt_num(c)),
            ("law", dist.describe()),
        ]),
    );
    report.tail = Some(2.0 * (-report.total / c).exp());
    Ok(report)
}

/// Inputs of the additive-functional tail for `Z = f(X_1) + … + f(X_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveInput {
    /// Order `D` of the bounded derivative.
    pub order: usize,
    /// `‖f^{(D)}‖_∞`.
    pub sup_top: f64,
    /// `mean_derivatives[d-1][i] = E f^{(d)}(X_i)` for `1 ≤ d ≤ D-1`.
    pub mean_derivatives: Vec<Vec<f64>>,
}

impl AdditiveInput {
    /// Identically distributed coordinates: one mean per derivative order.
    pub fn iid(order: usize, sup_top: f64, means: &[f64], n: usize) -> Self {
        Self { order, sup_top, mean_derivatives: means.iter().map(|&m| vec![m; n]).collect() }
    }
}

/// The three exponential terms of the additive-functional tail and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdditiveTail {
    pub top: f64,
    pub subgaussian: f64,
    pub lower_orders: f64,
    pub total: f64,
}

/// One constant `C` is shared by all three exponentials.
pub fn additive_functional_tail(input: &AdditiveInput, n: usize, l: f64, t: f64, c: f64) -> Result<AdditiveTail> {
    let big_d = input.order;
    if big_d == 0 {
        return Err(domain("derivative order D must be at least 1"));
    }
    if input.mean_derivatives.len() != big_d - 1 {
        return Err(domain(format!("expected {} mean-derivative rows, got {}", big_d - 1, input.mean_derivatives.len())));
    }
    if input.mean_derivatives.iter().any(|row| row.len() != n) {
        return Err(domain(format!("every mean-derivative row must have n = {n} entries")));
    }
    if !(t > 0.0) || !(l > 0.0) || !(c > 0.0) || n == 0 {
        return Err(domain("additive tail requires t > 0, L > 0, C > 0 and n ≥ 1"));
    }
    let s = input.sup_top;
    let dd = big_d as f64;
    let top_exp = if s > 0.0 {
        let a = t * t / (l.powi(2 * big_d as i32) * n as f64 * s * s);
        let b = t.powf(2.0 / dd) / (l * l * s.powf(2.0 / dd));
        a.min(b)
    } else {
        f64::INFINITY
    };
    let mut sub = f64::INFINITY;
    let mut lower = f64::INFINITY;
    for (k, row) in input.mean_derivatives.iter().enumerate() {
        let d = k + 1;
        let sq: f64 = row.iter().map(|m| m * m).sum();
        if sq > 0.0 {
            sub = sub.min(t * t / (l.powi(2 * d as i32) * sq));
        }
        let mx = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if d >= 2 && mx > 0.0 {
            lower = lower.min(t.powf(2.0 / d as f64) / (l * l * mx.powf(2.0 / d as f64)));
        }
    }
    let term = |x: f64| 2.0 * (-x / c).exp();
    let (top, subgaussian, lower_orders) = (term(top_exp), term(sub), term(lower));
    Ok(AdditiveTail { top, subgaussian, lower_orders, total: top + subgaussian + lower_orders })
}

/// `m_d(p, A) = Σ_{(J,K)} p^{#J/2 + #K/α} ‖A‖_{J|K}`, summed over `d = 1..D`.
pub fn weibull_moment_bound(
    f: &Polynomial,
    dist: &ProductDistribution,
    p: f64,
    alpha: f64,
    opts: &NormOptions,
) -> Result<BoundReport> {
    check_p(p)?;
    if !(1.0..=2.0).contains(&alpha) {
        return Err(domain(format!("alpha = {alpha} is outside [1, 2]")));
    }
    if f.degree() > MAX_SPLIT_ORDER {
        return Err(Error::Unsupported(format!("Weibull bounds are implemented for degree ≤ {MAX_SPLIT_ORDER}")));
    }
    let mut terms = Vec::new();
    for d in 1..=f.degree() {
        let tensor = expected_derivative_tensor(f, dist, d)?;
        for split in enumerate_splits(d)? {
            let exponent = split.inner().len() as f64 / 2.0 + split.outer().len() as f64 / alpha;
            let norm = mixed_norm(&tensor, &split, alpha, opts)?;
            let lower_bound = split.merged().num_blocks() >= 3 || !split.outer().is_empty();
            terms.push(BoundTerm {
                d,
                partition: split.to_string(),
                exponent,
                l_power: 0.0,
                norm,
                lower_bound,
                term: p.powf(exponent) * norm,
            });
        }
    }
    Ok(BoundReport::new(
        "weibull-moment",
        Aggregate::Sum,
        terms,
        meta(&[("p", fmt_num(p)), ("alpha", fmt_num(alpha)), ("law", dist.describe())]),
    ))
}
