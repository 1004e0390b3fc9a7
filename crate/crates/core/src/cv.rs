//! Gaussian outcome generators for continuous variables.
//!
//! For `v ∈ {x_i, p_i}` the generator is `v·P(v)` with `P` normal around the
//! center `v̂`. The widths are tied by a quality factor `f`:
//! `σ_x = l_p f/√2`, `σ_p = (E_p/c)/(√2 f)`, so `σ_x σ_p = l_p E_p/(2c)`,
//! which is `ħ/2` in natural units. Only widths, moments and sampling are
//! modelled here; there is no pair or time-evolution model.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::trial_rng;
use crate::numeric::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvObservable {
    Position,
    Momentum,
}

impl fmt::Display for CvObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CvObservable::Position => "x",
            CvObservable::Momentum => "p",
        })
    }
}

impl FromStr for CvObservable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "position" => Ok(CvObservable::Position),
            "p" | "momentum" => Ok(CvObservable::Momentum),
            _ => Err(Error::UnknownTag { what: "observable", name: s.to_string() }),
        }
    }
}

/// `l_p`, `E_p/c` and `ħ`; all 1 by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalConstants {
    pub planck_length: f64,
    pub planck_momentum: f64,
    pub hbar: f64,
}

impl Default for NaturalConstants {
    fn default() -> Self {
        Self { planck_length: 1.0, planck_momentum: 1.0, hbar: 1.0 }
    }
}

pub fn cv_width(observable: CvObservable, quality: f64) -> Result<f64> {
    cv_width_with(observable, quality, &NaturalConstants::default())
}

pub fn cv_width_with(observable: CvObservable, quality: f64, constants: &NaturalConstants) -> Result<f64> {
    if !quality.is_finite() || quality <= 0.0 {
        return Err(Error::Domain { what: "quality factor", value: quality });
    }
    Ok(match observable {
        CvObservable::Position => constants.planck_length * quality / SQRT_2,
        CvObservable::Momentum => constants.planck_momentum / (SQRT_2 * quality),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvGenerator {
    pub observable: CvObservable,
    pub center: f64,
    pub quality: f64,
    pub constants: NaturalConstants,
}

impl CvGenerator {
    pub fn new(observable: CvObservable, center: f64, quality: f64) -> Result<Self> {
        let g = Self { observable, center, quality, constants: NaturalConstants::default() };
        g.sigma()?;
        Ok(g)
    }

    pub fn sigma(&self) -> Result<f64> {
        cv_width_with(self.observable, self.quality, &self.constants)
    }

    fn sigma_unchecked(&self) -> f64 {
        self.sigma().expect("quality validated at construction")
    }

    /// `v·P(v)`.
    pub fn value(&self, v: f64) -> f64 {
        cv_generator_value(v, self.center, self.sigma_unchecked())
    }

    /// `∫ v P(v) dv` by the trapezoid rule over `v̂ ± 10σ`.
    pub fn first_moment_quadrature(&self, nodes: usize) -> f64 {
        let sigma = self.sigma_unchecked();
        let (lo, hi) = (self.center - 10.0 * sigma, self.center + 10.0 * sigma);
        let n = nodes.max(2);
        let h = (hi - lo) / (n - 1) as f64;
        let mut sum = CompensatedSum::new();
        for k in 0..n {
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            sum.add(w * self.value(lo + h * k as f64));
        }
        sum.value() * h
    }
}

/// `v/(σ√(2π))·exp(−(v − v̂)²/(2σ²))`.
pub fn cv_generator_value(v: f64, center: f64, sigma: f64) -> f64 {
    let d = (v - center) / sigma;
    v / (sigma * (2.0 * PI).sqrt()) * (-0.5 * d * d).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSampleReport {
    pub n: u64,
    pub mean: f64,
    pub mean_std_error: f64,
    pub variance: f64,
    pub variance_std_error: f64,
    pub samples: Vec<f64>,
}

/// `n` draws from `N(v̂, σ²)`; draw `k` uses substream `(seed, k)`.
pub fn cv_sample(gen: &CvGenerator, seed: u64, n: u64) -> Result<CvSampleReport> {
    if n < 2 {
        return Err(Error::InvalidArgument("cv_sample needs n >= 2".into()));
    }
    let sigma = gen.sigma()?;
    let normal = Normal::new(gen.center, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let base = trial_rng(seed, 0);
    let samples: Vec<f64> = (0..n)
        .map(|k| {
            let mut rng = base.clone();
            rng.set_stream(k);
            normal.sample(&mut rng)
        })
        .collect();

    let nf = n as f64;
    let mean = samples.iter().copied().collect::<CompensatedSum>().value() / nf;
    let variance = samples.iter().map(|x| (x - mean) * (x - mean)).collect::<CompensatedSum>().value() / (nf - 1.0);
    Ok(CvSampleReport {
        n,
        mean,
        mean_std_error: (variance / nf).sqrt(),
        variance,
        variance_std_error: variance * (2.0 / (nf - 1.0)).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn width_examples() {
        assert_abs_diff_eq!(cv_width(CvObservable::Position, 1.0).unwrap(), 1.0 / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(cv_width(CvObservable::Momentum, 2.0).unwrap(), 1.0 / (2.0 * SQRT_2), epsilon = 1e-15);
        for f in [0.1, 1.0, 3.0, 1e5] {
            let p = cv_width(CvObservable::Position, f).unwrap() * cv_width(CvObservable::Momentum, f).unwrap();
            assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);
        }
        assert!(cv_width(CvObservable::Position, 0.0).is_err());
        assert!(cv_width(CvObservable::Momentum, -1.0).is_err());
        assert!(cv_width(CvObservable::Momentum, f64::NAN).is_err());
    }

    #[test]
    fn generator_value_examples() {
        let g = CvGenerator::new(CvObservable::Position, 1.0, 1.0).unwrap();
        assert_eq!(g.value(0.0), 0.0);
        assert_abs_diff_eq!(g.value(1.0), 1.0 / ((2.0 * PI).sqrt() / SQRT_2), epsilon = 1e-15);
        assert_abs_diff_eq!(g.value(1.0), 0.5641895835477563, epsilon = 1e-15);
    }

    #[test]
    fn first_moment_is_center() {
        for (center, f) in [(0.0, 1.0), (1.0, 1.0), (-3.5, 0.2), (12.0, 7.0)] {
            let g = CvGenerator::new(CvObservable::Momentum, center, f).unwrap();
            assert_abs_diff_eq!(g.first_moment_quadrature(2001), center, epsilon = 1e-10);
        }
    }

    #[test]
    fn small_sample_is_deterministic() {
        let g = CvGenerator::new(CvObservable::Position, 0.0, 1.0).unwrap();
        let a = cv_sample(&g, 9, 2).unwrap();
        let b = cv_sample(&g, 9, 2).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_ne!(a.samples[0], a.samples[1]);
        assert!(cv_sample(&g, 9, 1).is_err());
    }

    #[test]
    fn observable_tags() {
        assert_eq!("x".parse::<CvObservable>().unwrap(), CvObservable::Position);
        assert!("q".parse::<CvObservable>().is_err());
    }
}
