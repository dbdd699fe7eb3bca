//! Valuation priors on the unit interval.
//!
//! Every prior used by the solvers belongs to the power family
//! `F(x) = x^α`. The three named presets are `sqrt` (α = 1/2),
//! `uniform` (α = 1) and `quadratic` (α = 2).

use std::fmt;
use std::str::FromStr;

use rand::distributions::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("argument {x} outside the support [0, 1]")]
    Domain { x: f64 },
    #[error("density diverges at 0 for exponent {alpha}")]
    SingularDensity { alpha: f64 },
    #[error("degenerate interval [{lo}, {hi}]")]
    DegenerateInterval { lo: f64, hi: f64 },
    #[error("exponent must be finite and positive, got {0}")]
    BadExponent(f64),
    #[error("unknown distribution `{0}` (expected sqrt, uniform, quadratic or power:<alpha>)")]
    UnknownName(String),
}

/// Extension point for priors outside the power family. Only
/// [`ValuationDistribution`] implements it today.
pub trait ValuationPrior {
    fn cdf(&self, x: f64) -> Result<f64, DistError>;
    fn pdf(&self, x: f64) -> Result<f64, DistError>;
    fn inverse_cdf(&self, q: f64) -> Result<f64, DistError>;
}

/// Power-law prior `F(x) = x^α` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValuationDistribution {
    alpha: f64,
}

impl ValuationDistribution {
    pub const SQRT: Self = Self { alpha: 0.5 };
    pub const UNIFORM: Self = Self { alpha: 1.0 };
    pub const QUADRATIC: Self = Self { alpha: 2.0 };

    pub fn power(alpha: f64) -> Result<Self, DistError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(DistError::BadExponent(alpha));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn cdf(&self, x: f64) -> Result<f64, DistError> {
        check_unit(x)?;
        Ok(self.cdf_clamped(x))
    }

    /// `F(x)` with `x` clamped into `[0, 1]` first.
    pub fn cdf_clamped(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        if self.alpha == 1.0 {
            x
        } else if self.alpha == 2.0 {
            x * x
        } else if self.alpha == 0.5 {
            x.sqrt()
        } else {
            x.powf(self.alpha)
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64, DistError> {
        check_unit(x)?;
        if x == 0.0 {
            if self.alpha < 1.0 {
                return Err(DistError::SingularDensity { alpha: self.alpha });
            }
            return Ok(if self.alpha == 1.0 { 1.0 } else { 0.0 });
        }
        Ok(self.alpha * x.powf(self.alpha - 1.0))
    }

    pub fn inverse_cdf(&self, q: f64) -> Result<f64, DistError> {
        check_unit(q)?;
        Ok(self.quantile_clamped(q))
    }

    /// `F⁻¹(q)` with `q` clamped into `[0, 1]` first.
    pub fn quantile_clamped(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, 1.0);
        if self.alpha == 1.0 {
            q
        } else if self.alpha == 2.0 {
            q.sqrt()
        } else if self.alpha == 0.5 {
            q * q
        } else {
            q.powf(1.0 / self.alpha)
        }
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + 1.0)
    }

    /// `∫_lo^hi x f(x) dx`, the unnormalised first moment over `[lo, hi]`.
    pub fn partial_moment(&self, lo: f64, hi: f64) -> f64 {
        let (lo, hi) = (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0));
        if hi <= lo {
            return 0.0;
        }
        let a = self.alpha;
        a / (a + 1.0) * (hi.powf(a + 1.0) - lo.powf(a + 1.0))
    }

    /// `E[v | lo ≤ v ≤ hi]`.
    pub fn conditional_mean(&self, lo: f64, hi: f64) -> Result<f64, DistError> {
        check_unit(lo)?;
        check_unit(hi)?;
        if hi - lo < 1e-12 {
            return Err(DistError::DegenerateInterval { lo, hi });
        }
        let mass = self.cdf_clamped(hi) - self.cdf_clamped(lo);
        Ok(self.partial_moment(lo, hi) / mass)
    }

    /// Cdf of the prior truncated to `[lo, hi]`, evaluated at `x`.
    pub fn truncated_cdf(&self, x: f64, lo: f64, hi: f64) -> f64 {
        if x < lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let (flo, fhi) = (self.cdf_clamped(lo), self.cdf_clamped(hi));
        (self.cdf_clamped(x) - flo) / (fhi - flo)
    }

    /// Inverse-cdf transform of a uniform draw from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let q: f64 = rng.sample(Open01);
        self.quantile_clamped(q)
    }

    /// Preset name if this is one of the three named priors.
    pub fn preset_name(&self) -> Option<&'static str> {
        match self.alpha {
            a if a == 0.5 => Some("sqrt"),
            a if a == 1.0 => Some("uniform"),
            a if a == 2.0 => Some("quadratic"),
            _ => None,
        }
    }
}

impl ValuationPrior for ValuationDistribution {
    fn cdf(&self, x: f64) -> Result<f64, DistError> {
        ValuationDistribution::cdf(self, x)
    }

    fn pdf(&self, x: f64) -> Result<f64, DistError> {
        ValuationDistribution::pdf(self, x)
    }

    fn inverse_cdf(&self, q: f64) -> Result<f64, DistError> {
        ValuationDistribution::inverse_cdf(self, q)
    }
}

impl fmt::Display for ValuationDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.preset_name() {
            Some(name) => f.write_str(name),
            None => write!(f, "power:{}", self.alpha),
        }
    }
}

impl FromStr for ValuationDistribution {
    type Err = DistError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "sqrt" => Ok(Self::SQRT),
            "uniform" => Ok(Self::UNIFORM),
            "quadratic" => Ok(Self::QUADRATIC),
            other => {
                let alpha = other
                    .strip_prefix("power:")
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| DistError::UnknownName(other.to_string()))?;
                Self::power(alpha)
            }
        }
    }
}

fn check_unit(x: f64) -> Result<(), DistError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(DistError::Domain { x })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const PRESETS: [ValuationDistribution; 3] = [
        ValuationDistribution::SQRT,
        ValuationDistribution::UNIFORM,
        ValuationDistribution::QUADRATIC,
    ];

    #[test]
    fn cdf_examples() {
        assert_eq!(ValuationDistribution::QUADRATIC.cdf(0.5).unwrap(), 0.25);
        assert_eq!(ValuationDistribution::UNIFORM.cdf(0.3).unwrap(), 0.3);
        let x = 0.757919_f64 * 0.757919;
        assert!((ValuationDistribution::SQRT.cdf(x).unwrap() - 0.757919).abs() < 1e-12);
        assert!(matches!(
            ValuationDistribution::UNIFORM.cdf(1.5),
            Err(DistError::Domain { .. })
        ));
        assert!(ValuationDistribution::UNIFORM.cdf(-0.1).is_err());
    }

    #[test]
    fn pdf_examples() {
        assert_eq!(ValuationDistribution::UNIFORM.pdf(0.7).unwrap(), 1.0);
        assert!((ValuationDistribution::QUADRATIC.pdf(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((ValuationDistribution::SQRT.pdf(0.25).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            ValuationDistribution::SQRT.pdf(0.0),
            Err(DistError::SingularDensity { .. })
        ));
    }

    #[test]
    fn pdf_integrates_to_one() {
        for d in PRESETS {
            let q = integrate(|x| d.pdf(x).unwrap(), 0.0, 1.0, 1e-11);
            assert!((q.value - 1.0).abs() < 1e-9, "{d}: {}", q.value);
        }
    }

    #[test]
    fn conditional_mean_examples() {
        let u = ValuationDistribution::UNIFORM;
        let q = ValuationDistribution::QUADRATIC;
        assert!((u.conditional_mean(0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((q.conditional_mean(0.0, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        // (2/3)(1 - lo^3)/(1 - lo^2) at lo = 0.382981, checked by quadrature below.
        let m = q.conditional_mean(0.382981, 1.0).unwrap();
        assert!((m - 0.737371).abs() < 1e-6, "{m}");
        let num = integrate(|x| x * 2.0 * x, 0.382981, 1.0, 1e-13).value;
        let den = integrate(|x| 2.0 * x, 0.382981, 1.0, 1e-13).value;
        assert!((m - num / den).abs() < 1e-10);
        assert!(matches!(
            q.conditional_mean(0.4, 0.4 + 1e-13),
            Err(DistError::DegenerateInterval { .. })
        ));
    }

    #[test]
    fn unconditional_mean_matches() {
        for d in PRESETS {
            let m = d.conditional_mean(0.0, 1.0).unwrap();
            assert!((m - d.alpha / (d.alpha + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn conditional_mean_matches_quadrature_on_random_intervals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in PRESETS {
            for _ in 0..100 {
                let a: f64 = rng.gen();
                let b: f64 = rng.gen();
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                if hi - lo < 1e-6 {
                    continue;
                }
                let closed = d.conditional_mean(lo, hi).unwrap();
                let num = integrate(|x| x * d.pdf(x).unwrap(), lo, hi, 1e-13).value;
                let den = integrate(|x| d.pdf(x).unwrap(), lo, hi, 1e-13).value;
                assert!((closed - num / den).abs() < 1e-9, "{d} [{lo},{hi}]");
            }
        }
    }

    #[test]
    fn inverse_transform_examples() {
        assert!((ValuationDistribution::QUADRATIC.inverse_cdf(0.25).unwrap() - 0.5).abs() < 1e-15);
        assert!((ValuationDistribution::SQRT.inverse_cdf(0.25).unwrap() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let d = ValuationDistribution::QUADRATIC;
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        let xs: Vec<f64> = (0..100).map(|_| d.sample(&mut a)).collect();
        let ys: Vec<f64> = (0..100).map(|_| d.sample(&mut b)).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn kolmogorov_smirnov_distance_small() {
        for d in PRESETS {
            let mut rng = ChaCha8Rng::seed_from_u64(2024);
            let n = 100_000;
            let mut xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let ks = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let f = d.cdf(x).unwrap();
                    let lo = i as f64 / n as f64;
                    let hi = (i + 1) as f64 / n as f64;
                    (f - lo).abs().max((hi - f).abs())
                })
                .fold(0.0, f64::max);
            assert!(ks < 0.01, "{d}: KS = {ks}");
        }
    }

    #[test]
    fn parses_names() {
        assert_eq!("sqrt".parse::<ValuationDistribution>().unwrap(), ValuationDistribution::SQRT);
        assert_eq!(
            "power:2".parse::<ValuationDistribution>().unwrap(),
            ValuationDistribution::QUADRATIC
        );
        assert_eq!("power:3.5".parse::<ValuationDistribution>().unwrap().alpha(), 3.5);
        assert!("cubic".parse::<ValuationDistribution>().is_err());
        assert!("power:-1".parse::<ValuationDistribution>().is_err());
        assert_eq!(ValuationDistribution::power(3.0).unwrap().to_string(), "power:3");
    }

    proptest! {
        #[test]
        fn inverse_cdf_round_trips(x in 1e-6f64..1.0, alpha in 0.2f64..5.0) {
            let d = ValuationDistribution::power(alpha).unwrap();
            let back = d.inverse_cdf(d.cdf(x).unwrap()).unwrap();
            prop_assert!((back - x).abs() < 1e-12);
        }

        #[test]
        fn cdf_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0, alpha in 0.2f64..5.0) {
            let d = ValuationDistribution::power(alpha).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(d.cdf(lo).unwrap() <= d.cdf(hi).unwrap());
        }
    }

    #[test]
    fn cdf_endpoints() {
        for d in PRESETS {
            assert_eq!(d.cdf(0.0).unwrap(), 0.0);
            assert_eq!(d.cdf(1.0).unwrap(), 1.0);
        }
    }
}
