//! Sparse multivariate polynomials and their expected derivative tensors
//! under product measures.
//!
//! Variables are 0-based in the API and 1-based in the JSON form
//! `{"nvars": n, "terms": [{"exps": [[var, power], ..], "coef": c}, ..]}`.

mod distribution;
mod hermite;

pub use distribution::{Law, ProductDistribution};
pub use hermite::{hermite, hermite_expansion, hermite_reconstruct, HermiteCoeffs, MAX_HERMITE_DEGREE};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, shape, Error, Result};
use crate::tensor::Tensor;

/// Sorted `(variable, power)` pairs with every power at least one.
pub type Monomial = Vec<(usize, u32)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Vec::new(), c).expect("constant term is always valid");
        p
    }

    /// `Σ a_i x_i`.
    pub fn linear(a: &[f64]) -> Self {
        let mut p = Self::zero(a.len());
        for (i, &c) in a.iter().enumerate() {
            p.add_term(vec![(i, 1)], c).expect("index in range");
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, f64)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c)?;
        }
        Ok(p)
    }

    /// Adds `c · m`, merging with an existing term. Zero powers are dropped
    /// and repeated variables multiplied out.
    pub fn add_term(&mut self, m: Monomial, c: f64) -> Result<()> {
        if !c.is_finite() {
            return Err(domain("polynomial coefficients must be finite"));
        }
        let mut powers: BTreeMap<usize, u32> = BTreeMap::new();
        for (v, k) in m {
            if v >= self.nvars {
                return Err(domain(format!("variable {} out of range for {} variables", v + 1, self.nvars)));
            }
            if k > 0 {
                *powers.entry(v).or_default() += k;
            }
        }
        let key: Monomial = powers.into_iter().collect();
        let entry = self.terms.entry(key.clone()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(total_degree).max().unwrap_or(0)
    }

    /// True when no variable appears with power above one.
    pub fn is_tetrahedral(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&(_, k)| k == 1))
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.nvars {
            return Err(shape(format!("point of length {} for {} variables", x.len(), self.nvars)));
        }
        Ok(self.terms.iter().map(|(m, c)| c * m.iter().map(|&(v, k)| x[v].powi(k as i32)).product::<f64>()).sum())
    }

    /// Partial derivative in variable `v`.
    pub fn derivative(&self, v: usize) -> Result<Polynomial> {
        if v >= self.nvars {
            return Err(domain(format!("variable {} out of range for {} variables", v + 1, self.nvars)));
        }
        let mut out = Self::zero(self.nvars);
        for (m, &c) in &self.terms {
            if let Some(pos) = m.iter().position(|&(w, _)| w == v) {
                let k = m[pos].1;
                let mut dm = m.clone();
                dm[pos].1 -= 1;
                out.add_term(dm, c * k as f64)?;
            }
        }
        Ok(out)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.nvars {
            return Err(shape(format!("point of length {} for {} variables", x.len(), self.nvars)));
        }
        let mut g = vec![0.0; self.nvars];
        for (m, &c) in &self.terms {
            for (pos, &(v, k)) in m.iter().enumerate() {
                let rest: f64 = m
                    .iter()
                    .enumerate()
                    .map(|(q, &(w, kw))| if q == pos { x[w].powi(kw as i32 - 1) } else { x[w].powi(kw as i32) })
                    .product();
                g[v] += c * k as f64 * rest;
            }
        }
        Ok(g)
    }

    pub fn scaled(&self, s: f64) -> Polynomial {
        let mut out = Self::zero(self.nvars);
        for (m, &c) in &self.terms {
            out.add_term(m.clone(), s * c).expect("finite scale");
        }
        out
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.nvars != other.nvars {
            return Err(shape("polynomials over different numbers of variables"));
        }
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.nvars != other.nvars {
            return Err(shape("polynomials over different numbers of variables"));
        }
        let mut out = Self::zero(self.nvars);
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                out.add_term(m1.iter().chain(m2).copied().collect(), c1 * c2)?;
            }
        }
        Ok(out)
    }

    /// `Σ_i a_i x_{i_1} ⋯ x_{i_d}` for an order-`d` tensor `a` over `n` variables.
    pub fn from_tensor(a: &Tensor) -> Result<Polynomial> {
        let mut p = Self::zero(a.dim());
        for (off, &v) in a.values().iter().enumerate() {
            if v != 0.0 {
                p.add_term(a.index_of(off).into_iter().map(|i| (i, 1)).collect(), v)?;
            }
        }
        Ok(p)
    }

    pub fn from_json(text: &str) -> Result<Polynomial> {
        let raw: PolyJson = serde_json::from_str(text)?;
        let mut p = Self::zero(raw.nvars);
        for t in raw.terms {
            let mut m = Vec::with_capacity(t.exps.len());
            for [v, k] in t.exps {
                if v == 0 {
                    return Err(Error::Parse("polynomial variables are 1-based".into()));
                }
                let k = u32::try_from(k).map_err(|_| Error::Parse(format!("power {k} is too large")))?;
                m.push((v - 1, k));
            }
            p.add_term(m, t.coef)?;
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        let raw = PolyJson {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, &coef)| TermJson { exps: m.iter().map(|&(v, k)| [v + 1, k as usize]).collect(), coef })
                .collect(),
        };
        serde_json::to_string(&raw).expect("polynomial serializes")
    }

    /// `E f(X)` under a product law.
    pub fn expected_value(&self, dist: &ProductDistribution) -> Result<f64> {
        self.check_dist(dist)?;
        let mut sum = 0.0;
        for (m, &c) in &self.terms {
            let mut prod = c;
            for &(v, k) in m {
                prod *= dist.moment(v, k)?;
            }
            sum += prod;
        }
        Ok(sum)
    }

    fn check_dist(&self, dist: &ProductDistribution) -> Result<()> {
        if dist.n() != self.nvars {
            return Err(shape(format!("distribution over {} coordinates for {} variables", dist.n(), self.nvars)));
        }
        Ok(())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            for &(v, k) in m {
                if k == 1 {
                    write!(f, "*x{}", v + 1)?;
                } else {
                    write!(f, "*x{}^{k}", v + 1)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exps: Vec<[usize; 2]>,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    nvars: usize,
    terms: Vec<TermJson>,
}

fn total_degree(m: &Monomial) -> usize {
    m.iter().map(|&(_, k)| k as usize).sum()
}

fn falling(k: u32, j: u32) -> f64 {
    (0..j).map(|i| (k - i) as f64).product()
}

/// The symmetric order-`d` tensor `E ∂^d f / ∂x_{i_1}⋯∂x_{i_d}(X)`.
///
/// Each monomial is differentiated symbolically; the resulting value is
/// written to every index arrangement of the derivative multiset, so the
/// output is exactly symmetric. Orders above the degree give the zero tensor.
pub fn expected_derivative_tensor(f: &Polynomial, dist: &ProductDistribution, d: usize) -> Result<Tensor> {
    f.check_dist(dist)?;
    if d == 0 {
        return Err(domain("derivative order must be at least 1"));
    }
    let n = f.nvars;
    let mut out = Tensor::zeros(d, n)?;
    if d > f.degree() {
        return Ok(out);
    }
    let mut buf: Vec<f64> = vec![0.0; out.len()];
    for (m, &c) in &f.terms {
        if total_degree(m) < d {
            continue;
        }
        // moment table for this monomial: E X_v^{k - j} for j = 0..=k
        let mut moments = Vec::with_capacity(m.len());
        for &(v, k) in m {
            let row: Vec<f64> = (0..=k).map(|j| dist.moment(v, k - j)).collect::<Result<_>>()?;
            moments.push(row);
        }
        let mut counts = vec![0u32; m.len()];
        distribute(m, d as u32, 0, &mut counts, &mut |counts| {
            let mut value = c;
            for (q, &(_, k)) in m.iter().enumerate() {
                value *= falling(k, counts[q]) * moments[q][counts[q] as usize];
            }
            if value == 0.0 {
                return;
            }
            let mut multiset: Vec<usize> = Vec::with_capacity(d);
            for (q, &(v, _)) in m.iter().enumerate() {
                multiset.extend(std::iter::repeat_n(v, counts[q] as usize));
            }
            for_each_arrangement(&mut multiset, &mut |idx| {
                let off = idx.iter().fold(0, |acc, &i| acc * n + i);
                buf[off] += value;
            });
        });
    }
    out = Tensor::new(d, n, buf)?;
    Ok(out)
}

/// Enumerates `counts[q] ≤ k_q` with `Σ counts = remaining`.
fn distribute(m: &Monomial, remaining: u32, q: usize, counts: &mut [u32], visit: &mut impl FnMut(&[u32])) {
    if q == m.len() {
        if remaining == 0 {
            visit(counts);
        }
        return;
    }
    let rest: u32 = m[q + 1..].iter().map(|&(_, k)| k).sum();
    let lo = remaining.saturating_sub(rest);
    for j in lo..=m[q].1.min(remaining) {
        counts[q] = j;
        distribute(m, remaining - j, q + 1, counts, visit);
    }
    counts[q] = 0;
}

/// Visits each distinct permutation of a sorted multiset once.
fn for_each_arrangement(items: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    items.sort_unstable();
    loop {
        visit(items);
        // next lexicographic permutation
        let Some(i) = (1..items.len()).rev().find(|&i| items[i - 1] < items[i]) else {
            return;
        };
        let j = (i..items.len()).rev().find(|&j| items[j] > items[i - 1]).expect("successor exists");
        items.swap(i - 1, j);
        items[i..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x1x2() -> Polynomial {
        Polynomial::from_terms(2, [(vec![(0, 1), (1, 1)], 1.0)]).unwrap()
    }

    #[test]
    fn evaluation() {
        assert_eq!(x1x2().evaluate(&[2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(Polynomial::zero(3).evaluate(&[1.0, 2.0, 3.0]).unwrap(), 0.0);
        let f = Polynomial::from_terms(2, [(vec![(0, 2)], 1.0), (vec![(1, 1)], 2.0)]).unwrap();
        assert_eq!(f.evaluate(&[1.0, 1.0]).unwrap(), 3.0);
        assert!(f.evaluate(&[1.0]).is_err());
        assert_eq!(f.degree(), 2);
    }

    #[test]
    fn merging_and_zero_terms() {
        let mut f = Polynomial::zero(2);
        f.add_term(vec![(1, 1), (0, 1)], 2.0).unwrap();
        f.add_term(vec![(0, 1), (1, 1)], -2.0).unwrap();
        assert!(f.is_zero());
        assert_eq!(f.degree(), 0);
        f.add_term(vec![(0, 1), (0, 2)], 1.0).unwrap();
        assert_eq!(f.terms().next().unwrap().0, &vec![(0, 3)]);
    }

    #[test]
    fn json_round_trip() {
        let f = Polynomial::from_terms(3, [(vec![(0, 2), (2, 1)], 1.5), (vec![], -1.0)]).unwrap();
        let g = Polynomial::from_json(&f.to_json()).unwrap();
        assert_eq!(f, g);
        let h = Polynomial::from_json(r#"{"nvars":2,"terms":[{"exps":[[1,1],[2,1]],"coef":1.0}]}"#).unwrap();
        assert_eq!(h, x1x2());
        assert!(Polynomial::from_json(r#"{"nvars":2,"terms":[{"exps":[[0,1]],"coef":1.0}]}"#).is_err());
        assert!(Polynomial::from_json(r#"{"nvars":2,"terms":[{"exps":[[3,1]],"coef":1.0}]}"#).is_err());
    }

    #[test]
    fn derivative_tensor_examples() {
        let g = ProductDistribution::iid(Law::Gaussian, 2);
        let f = Polynomial::from_terms(2, [(vec![(0, 1)], 3.0), (vec![(1, 2)], 1.0)]).unwrap();
        let d1 = expected_derivative_tensor(&f, &g, 1).unwrap();
        assert_eq!(d1.values(), &[3.0, 0.0]);
        let sq = Polynomial::from_terms(2, [(vec![(1, 2)], 1.0)]).unwrap();
        let d2 = expected_derivative_tensor(&sq, &ProductDistribution::iid(Law::Bernoulli { p: 0.3 }, 2), 2).unwrap();
        assert_eq!(d2.values(), &[0.0, 0.0, 0.0, 2.0]);
        let d3 = expected_derivative_tensor(&sq, &g, 3).unwrap();
        assert!(d3.is_zero());
    }

    #[test]
    fn derivative_tensor_mixed_powers() {
        // f = x1^2 x2^3 under Bernoulli(p): E ∂1∂2 f = 2·3·E X1 E X2^2 = 6p^2
        let p = 0.4;
        let f = Polynomial::from_terms(2, [(vec![(0, 2), (1, 3)], 1.0)]).unwrap();
        let dist = ProductDistribution::iid(Law::Bernoulli { p }, 2);
        let t = expected_derivative_tensor(&f, &dist, 2).unwrap();
        assert!((t.get(&[0, 1]) - 6.0 * p * p).abs() < 1e-15);
        assert_eq!(t.get(&[0, 1]), t.get(&[1, 0]));
        assert!((t.get(&[0, 0]) - 2.0 * p).abs() < 1e-15);
        assert!((t.get(&[1, 1]) - 6.0 * p * p).abs() < 1e-15);
        assert!(t.is_symmetric(0.0));
    }

    #[test]
    fn gradient_matches_derivative() {
        let f = Polynomial::from_terms(3, [(vec![(0, 2), (1, 1)], 2.0), (vec![(2, 3)], -1.0), (vec![(1, 1)], 0.5)]).unwrap();
        let x = [0.3, -1.2, 2.0];
        let g = f.gradient(&x).unwrap();
        for (v, gv) in g.iter().enumerate() {
            assert!((gv - f.derivative(v).unwrap().evaluate(&x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn arrangements_are_distinct() {
        let mut seen = Vec::new();
        for_each_arrangement(&mut [2, 0, 2], &mut |idx| seen.push(idx.to_vec()));
        assert_eq!(seen, vec![vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]]);
    }
}
