//! Symmetric Bayes–Nash deposit function when both bidders move at once.
//!
//! Bids equal deposits in this regime. Differentiating the interim profit
//! `F(w)·v − ∫₀^w d(z) f(z) dz − c·d(w)` in the reported type `w` and
//! setting `w = v` gives `c·d′(v) = f(v)·(v − d(v))` with `d(0) = 0`.

use serde::Serialize;
use thiserror::Error;

use crate::dist::ValuationDistribution;
use crate::numerics::{integrate, solve_ivp_variable, Curve, NumericsError};

pub const DEFAULT_STEP: f64 = 1e-4;

/// Left end of the march for priors whose density diverges at zero.
pub const SINGULAR_START: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimultaneousError {
    #[error("deposit cost must be positive, got {0}")]
    BadCost(f64),
    #[error("valuation {0} outside [0, 1]")]
    Domain(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, PartialEq)]
enum DepositRule {
    UniformClosedForm,
    Curve(Curve),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimultaneousEquilibrium {
    c: f64,
    dist: ValuationDistribution,
    rule: DepositRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimultaneousSummary {
    pub regime: &'static str,
    pub dist: f64,
    pub cost: f64,
    pub deposit_at_one: f64,
    pub max_shading: f64,
}

impl SimultaneousEquilibrium {
    /// Solve for the equilibrium deposit function. The uniform prior uses
    /// the closed form `v − c(1 − e^{−v/c})`; other priors integrate the ODE.
    pub fn solve(dist: ValuationDistribution, c: f64, step: f64) -> Result<Self, SimultaneousError> {
        check_cost(c)?;
        if dist == ValuationDistribution::UNIFORM {
            return Ok(Self { c, dist, rule: DepositRule::UniformClosedForm });
        }
        Self::solve_ode(dist, c, step)
    }

    /// Always integrate the ODE, even when a closed form exists.
    pub fn solve_ode(dist: ValuationDistribution, c: f64, step: f64) -> Result<Self, SimultaneousError> {
        check_cost(c)?;
        let start = if dist.alpha() < 1.0 { SINGULAR_START } else { 0.0 };
        if !(step.is_finite() && step > 0.0) {
            return Err(NumericsError::BadStep(step).into());
        }
        // powf gives 0^(α-1) = 0 for α > 1 and 1 for α = 1, as required at v = 0
        let density = |v: f64| dist.alpha() * v.powf(dist.alpha() - 1.0);
        let rhs = |v: f64, d: f64| density(v) * (v - d) / c;
        // the decay rate f(v)/c makes the march stiff for small c; keep h·f/c ≤ 1/2
        let max_step = |v: f64| {
            let bound = f64::max(density(v), density((v + step).min(1.0)));
            step.min(0.5 * c / bound)
        };
        let curve = solve_ivp_variable(rhs, start, 0.0, 1.0, max_step)?;
        Ok(Self { c, dist, rule: DepositRule::Curve(curve) })
    }

    pub fn cost(&self) -> f64 {
        self.c
    }

    pub fn dist(&self) -> ValuationDistribution {
        self.dist
    }

    pub fn curve(&self) -> Option<&Curve> {
        match &self.rule {
            DepositRule::Curve(c) => Some(c),
            DepositRule::UniformClosedForm => None,
        }
    }

    pub fn eval_deposit(&self, v: f64) -> Result<f64, SimultaneousError> {
        if !(0.0..=1.0).contains(&v) {
            return Err(SimultaneousError::Domain(v));
        }
        Ok(self.deposit(v))
    }

    /// Deposit at `v`, clamped into `[0, 1]`.
    pub fn deposit(&self, v: f64) -> f64 {
        let v = v.clamp(0.0, 1.0);
        match &self.rule {
            DepositRule::UniformClosedForm => uniform_closed_form(self.c, v),
            DepositRule::Curve(curve) => {
                if v < curve.x_range().0 {
                    0.0
                } else {
                    curve.eval(v)
                }
            }
        }
    }

    pub fn deposit_derivative(&self, v: f64) -> f64 {
        match &self.rule {
            DepositRule::UniformClosedForm => 1.0 - (-v / self.c).exp(),
            DepositRule::Curve(curve) => curve.derivative(v),
        }
    }

    /// Interim profit of type `v` reporting type `w`:
    /// `F(w)·v − ∫₀^{F(w)} d(F⁻¹(q)) dq − c·d(w)`.
    pub fn deviation_payoff(&self, v: f64, w: f64) -> f64 {
        let fw = self.dist.cdf_clamped(w);
        let paid = integrate(|q| self.deposit(self.dist.quantile_clamped(q)), 0.0, fw, 1e-11).value;
        fw * v - paid - self.c * self.deposit(w)
    }

    pub fn summary(&self) -> SimultaneousSummary {
        let max_shading = (0..=1000)
            .map(|i| {
                let v = i as f64 / 1000.0;
                v - self.deposit(v)
            })
            .fold(0.0, f64::max);
        SimultaneousSummary {
            regime: "simultaneous",
            dist: self.dist.alpha(),
            cost: self.c,
            deposit_at_one: self.deposit(1.0),
            max_shading,
        }
    }
}

pub fn uniform_closed_form(c: f64, v: f64) -> f64 {
    v - c * (1.0 - (-v / c).exp())
}

fn check_cost(c: f64) -> Result<(), SimultaneousError> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(SimultaneousError::BadCost(c))
    }
}
