//! Coordinate laws of product measures: closed-form moments, samplers and
//! the constants entering the moment bounds.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Deserialize;
use statrs::function::gamma::gamma;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Law {
    Gaussian,
    Rademacher,
    /// Raw `{0, 1}` values, not centered.
    Bernoulli { p: f64 },
    /// Symmetric with `P(|Y| ≥ t) = exp(-t^α)`.
    Weibull { alpha: f64 },
    /// User-supplied moment table `E X^k`, `k = 0..moments.len()`.
    Custom { moments: Vec<f64>, psi2: Option<f64> },
}

impl Law {
    pub fn validate(&self) -> Result<()> {
        match self {
            Law::Bernoulli { p } if !(*p > 0.0 && *p <= 1.0) => Err(domain(format!("bernoulli p = {p} is outside (0, 1]"))),
            Law::Weibull { alpha } if !(*alpha > 0.0 && alpha.is_finite()) => {
                Err(domain(format!("weibull alpha = {alpha} must be positive")))
            }
            Law::Custom { moments, .. } if moments.first() != Some(&1.0) => {
                Err(domain("custom moment table must start with E X^0 = 1"))
            }
            _ => Ok(()),
        }
    }

    pub fn moment(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        Ok(match self {
            Law::Gaussian => {
                if k % 2 == 1 {
                    0.0
                } else {
                    (1..k).step_by(2).map(f64::from).product()
                }
            }
            Law::Rademacher => {
                if k % 2 == 1 {
                    0.0
                } else {
                    1.0
                }
            }
            Law::Bernoulli { p } => *p,
            Law::Weibull { alpha } => {
                if k % 2 == 1 {
                    0.0
                } else {
                    gamma(1.0 + f64::from(k) / alpha)
                }
            }
            Law::Custom { moments, .. } => *moments
                .get(k as usize)
                .ok_or_else(|| domain(format!("custom law has no moment of order {k}")))?,
        })
    }

    /// Upper bound on the ψ₂ norm, when the law is sub-Gaussian.
    pub fn psi2(&self) -> Option<f64> {
        match self {
            Law::Gaussian => Some((8.0f64 / 3.0).sqrt()),
            Law::Rademacher => Some(1.0 / std::f64::consts::LN_2.sqrt()),
            Law::Bernoulli { p } => Some(2f64.sqrt() / (2.0 / p).ln().sqrt()),
            Law::Weibull { alpha } if *alpha >= 2.0 => Some(2f64.sqrt()),
            Law::Weibull { .. } => None,
            Law::Custom { psi2, .. } => *psi2,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        Ok(match self {
            Law::Gaussian => StandardNormal.sample(rng),
            Law::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Law::Bernoulli { p } => {
                if rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Weibull { alpha } => {
                // 1 - U lies in (0, 1]
                let u = 1.0 - rng.random::<f64>();
                let r = (-u.ln()).powf(1.0 / alpha);
                if rng.random::<bool>() {
                    r
                } else {
                    -r
                }
            }
            Law::Custom { .. } => return Err(Error::Unsupported("custom laws have no sampler".into())),
        })
    }

    pub fn name(&self) -> String {
        match self {
            Law::Gaussian => "gaussian".into(),
            Law::Rademacher => "rademacher".into(),
            Law::Bernoulli { p } => format!("bernoulli({p})"),
            Law::Weibull { alpha } => format!("weibull({alpha})"),
            Law::Custom { .. } => "custom".into(),
        }
    }
}

/// Independent coordinates, each with its own law.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDistribution {
    laws: Vec<Law>,
    sobolev: Option<(f64, f64)>,
}

impl ProductDistribution {
    pub fn iid(law: Law, n: usize) -> Self {
        let sobolev = if law == Law::Gaussian { Some((1.0, 0.5)) } else { None };
        Self { laws: vec![law; n], sobolev }
    }

    pub fn new(laws: Vec<Law>) -> Result<Self> {
        for l in &laws {
            l.validate()?;
        }
        let sobolev = if laws.iter().all(|l| *l == Law::Gaussian) { Some((1.0, 0.5)) } else { None };
        Ok(Self { laws, sobolev })
    }

    /// Overrides the Sobolev pair `(L, γ)`.
    pub fn with_sobolev(mut self, l: f64, gamma: f64) -> Result<Self> {
        if !(l > 0.0) || !(gamma >= 0.5) {
            return Err(domain(format!("sobolev pair requires L > 0 and gamma ≥ 1/2, got ({l}, {gamma})")));
        }
        self.sobolev = Some((l, gamma));
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.laws.len()
    }

    pub fn laws(&self) -> &[Law] {
        &self.laws
    }

    pub fn law(&self, i: usize) -> &Law {
        &self.laws[i]
    }

    pub fn moment(&self, i: usize, k: u32) -> Result<f64> {
        self.laws[i].moment(k)
    }

    /// Largest ψ₂ bound over the coordinates.
    pub fn psi2(&self) -> Option<f64> {
        self.laws.iter().try_fold(0.0f64, |m, l| l.psi2().map(|v| m.max(v)))
    }

    pub fn sobolev(&self) -> Option<(f64, f64)> {
        self.sobolev
    }

    /// Common Weibull exponent, if every coordinate is Weibull with the same α.
    pub fn weibull_alpha(&self) -> Option<f64> {
        match self.laws.first()? {
            Law::Weibull { alpha } if self.laws.iter().all(|l| l == &self.laws[0]) => Some(*alpha),
            _ => None,
        }
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> Result<()> {
        for (x, law) in out.iter_mut().zip(&self.laws) {
            *x = law.sample(rng)?;
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        match self.laws.first() {
            Some(first) if self.laws.iter().all(|l| l == first) => format!("{} x {}", first.name(), self.n()),
            _ => "mixed".into(),
        }
    }

    /// Parses `{"law": "bernoulli", "p": 0.5, "n": 15}` and friends.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DistJson = serde_json::from_str(text)?;
        raw.build()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DistJson {
    law: String,
    n: usize,
    p: Option<f64>,
    alpha: Option<f64>,
    moments: Option<Vec<f64>>,
    psi2: Option<f64>,
    #[serde(rename = "L")]
    sobolev_l: Option<f64>,
    gamma: Option<f64>,
}

impl DistJson {
    fn build(self) -> Result<ProductDistribution> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Parse(format!("law {} requires {name}", self.law)));
        let law = match self.law.as_str() {
            "gaussian" => Law::Gaussian,
            "rademacher" => Law::Rademacher,
            "bernoulli" => Law::Bernoulli { p: need(self.p, "p")? },
            "weibull" => Law::Weibull { alpha: need(self.alpha, "alpha")? },
            "custom" => Law::Custom {
                moments: self.moments.clone().ok_or_else(|| Error::Parse("law custom requires moments".into()))?,
                psi2: self.psi2,
            },
            other => return Err(Error::Parse(format!("unknown law {other:?}"))),
        };
        let dist = ProductDistribution::new(vec![law; self.n])?;
        match (self.sobolev_l, self.gamma) {
            (Some(l), Some(g)) => dist.with_sobolev(l, g),
            (None, None) => Ok(dist),
            _ => Err(Error::Parse("sobolev pair needs both L and gamma".into())),
        }
    }
}
