//! Probabilists' Hermite polynomials and expansions of polynomials in the
//! product Hermite basis.

use std::collections::BTreeMap;

use super::Polynomial;
use crate::error::{domain, Result};

pub const MAX_HERMITE_DEGREE: usize = 12;
const MAX_EXPANSION_DEGREE: usize = 6;
const MAX_EXPANSION_VARS: usize = 12;

/// Integer monomial coefficients of `h_k`; `coeffs[j]` multiplies `x^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteCoeffs {
    pub k: usize,
    pub coeffs: Vec<i64>,
}

impl HermiteCoeffs {
    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }

    /// `h_k(x_var)` as a polynomial over `nvars` variables.
    pub fn to_polynomial(&self, var: usize, nvars: usize) -> Result<Polynomial> {
        let mut p = Polynomial::zero(nvars);
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                p.add_term(vec![(var, j as u32)], c as f64)?;
            }
        }
        Ok(p)
    }
}

/// `h_k` from `h_{k+1} = x h_k - k h_{k-1}`.
pub fn hermite(k: usize) -> Result<HermiteCoeffs> {
    if k > MAX_HERMITE_DEGREE {
        return Err(domain(format!("Hermite degree {k} exceeds {MAX_HERMITE_DEGREE}")));
    }
    let mut prev = vec![1i64];
    if k == 0 {
        return Ok(HermiteCoeffs { k, coeffs: prev });
    }
    let mut cur = vec![0i64, 1];
    for j in 1..k {
        let mut next = vec![0i64; j + 2];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= j as i64 * c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(HermiteCoeffs { k, coeffs: cur })
}

/// `x^k = Σ_j c_{k,j} h_j(x)` with `c_{k,j} = k! / (j! m! 2^m)`, `k - j = 2m`.
fn power_in_hermite(k: u32) -> Vec<(u32, f64)> {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    (0..=k)
        .rev()
        .step_by(2)
        .map(|j| {
            let m = (k - j) / 2;
            (j, fact(k) / (fact(j) * fact(m) * 2f64.powi(m as i32)))
        })
        .collect()
}

/// Coefficients `a_d` with `f = Σ_d a_d ∏_i h_{d_i}(x_i)`, keyed by the
/// multi-degree `d` (one entry per variable).
pub fn hermite_expansion(f: &Polynomial) -> Result<BTreeMap<Vec<u32>, f64>> {
    if f.degree() > MAX_EXPANSION_DEGREE || f.nvars() > MAX_EXPANSION_VARS {
        return Err(domain(format!(
            "Hermite expansion is limited to degree ≤ {MAX_EXPANSION_DEGREE} and ≤ {MAX_EXPANSION_VARS} variables"
        )));
    }
    let mut out: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (m, c) in f.terms() {
        let mut partial: Vec<(Vec<u32>, f64)> = vec![(vec![0; f.nvars()], c)];
        for &(v, k) in m {
            let expansion = power_in_hermite(k);
            partial = partial
                .into_iter()
                .flat_map(|(deg, a)| {
                    expansion.iter().map(move |&(j, b)| {
                        let mut d = deg.clone();
                        d[v] = j;
                        (d, a * b)
                    })
                })
                .collect();
        }
        for (d, a) in partial {
            *out.entry(d).or_insert(0.0) += a;
        }
    }
    out.retain(|_, a| *a != 0.0);
    Ok(out)
}

/// Re-expands Hermite coefficients into the monomial basis.
pub fn hermite_reconstruct(coeffs: &BTreeMap<Vec<u32>, f64>, nvars: usize) -> Result<Polynomial> {
    let mut out = Polynomial::zero(nvars);
    for (deg, &a) in coeffs {
        if deg.len() != nvars {
            return Err(domain("multi-degree length does not match the number of variables"));
        }
        let mut term = Polynomial::constant(nvars, a);
        for (v, &j) in deg.iter().enumerate() {
            if j > 0 {
                term = term.mul(&hermite(j as usize)?.to_polynomial(v, nvars)?)?;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degrees() {
        assert_eq!(hermite(0).unwrap().coeffs, vec![1]);
        assert_eq!(hermite(2).unwrap().coeffs, vec![-1, 0, 1]);
        assert_eq!(hermite(3).unwrap().coeffs, vec![0, -3, 0, 1]);
        assert_eq!(hermite(4).unwrap().coeffs, vec![3, 0, -6, 0, 1]);
        assert!(hermite(13).is_err());
        for k in 0..=MAX_HERMITE_DEGREE {
            assert_eq!(*hermite(k).unwrap().coeffs.last().unwrap(), 1);
        }
    }

    #[test]
    fn expansions() {
        let x2 = Polynomial::from_terms(1, [(vec![(0, 2)], 1.0)]).unwrap();
        let e = hermite_expansion(&x2).unwrap();
        assert_eq!(e.get(&vec![2]), Some(&1.0));
        assert_eq!(e.get(&vec![0]), Some(&1.0));
        let x3 = Polynomial::from_terms(1, [(vec![(0, 3)], 1.0)]).unwrap();
        let e = hermite_expansion(&x3).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.get(&vec![1]), Some(&3.0));
        let x1x2 = Polynomial::from_terms(2, [(vec![(0, 1), (1, 1)], 1.0)]).unwrap();
        let e = hermite_expansion(&x1x2).unwrap();
        assert_eq!(e.into_iter().collect::<Vec<_>>(), vec![(vec![1, 1], 1.0)]);
    }

    #[test]
    fn round_trip() {
        let f = Polynomial::from_terms(
            3,
            [(vec![(0, 4), (2, 1)], 0.5), (vec![(1, 3)], -2.0), (vec![(0, 2), (1, 2), (2, 2)], 1.25), (vec![], 3.0)],
        )
        .unwrap();
        let g = hermite_reconstruct(&hermite_expansion(&f).unwrap(), 3).unwrap();
        assert_eq!(f, g);
    }
}
