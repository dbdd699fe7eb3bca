//! Two-level pooling equilibrium under the quadratic prior `F(x) = x²`.
//!
//! Bidder 1 deposits 1 if `v₁ ≥ u` and nothing otherwise. After a deposit
//! `d₁ > u` bidder 2 believes `v₁` is drawn from the prior truncated to
//! `[u, min(1, d₁)]`, so bidder 1 bids his value, and bidder 2 enters only
//! when his value clears a threshold `v(d₁)`.

use serde::Serialize;
use thiserror::Error;

use crate::dist::ValuationDistribution;
use crate::numerics::{find_root, integrate, NumericsError, RootBracket};

pub const DEFAULT_MAX_DEPOSIT: f64 = 4.0;
pub const POOL_DEPOSIT: f64 = 1.0;

const SCAN_LO: f64 = 0.01;
const SCAN_HI: f64 = 0.99;
const SCAN_STEP: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoolingError {
    #[error("deposit cost must be positive, got {0}")]
    BadCost(f64),
    #[error("no marginal-type solution found for u in ({lo}, {hi})")]
    NoSolution { lo: f64, hi: f64 },
    #[error("small-deposit incentive fails: (u(1+c))² = {lhs} > c = {c}")]
    InequalityViolated { u: f64, v: f64, lhs: f64, c: f64 },
    #[error("interior deposit undefined: v2² = {v2_sq} < 2c(d1² − u²) = {bound}")]
    NegativeDiscriminant { v2_sq: f64, bound: f64 },
    #[error("invalid pooling parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoolingParams {
    pub c: f64,
    pub u: f64,
    pub v: f64,
    pub dbar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `u·v² − c`
    pub indifference: f64,
    /// bidder 2's maximized profit at `d₁ = 1`, `v₂ = v`
    pub zero_profit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub c: f64,
    pub holds: bool,
}

impl PoolingParams {
    /// No checks; use [`PoolingParams::validate`] or [`solve_marginal_types`].
    pub fn from_parts(c: f64, u: f64, v: f64, dbar: f64) -> Self {
        Self { c, u, v, dbar }
    }

    pub fn validate(&self) -> Result<(), PoolingError> {
        check_cost(self.c)?;
        if !(0.0 < self.u && self.u < self.v && self.v <= 1.0) {
            return Err(PoolingError::Invalid(format!("need 0 < u < v ≤ 1, got u = {}, v = {}", self.u, self.v)));
        }
        if self.dbar < POOL_DEPOSIT {
            return Err(PoolingError::Invalid(format!("dbar = {} below the pool deposit", self.dbar)));
        }
        let r = self.residuals();
        if r.indifference.abs() > 1e-8 {
            return Err(PoolingError::Invalid(format!("u·v² − c = {:e}", r.indifference)));
        }
        let check = self.inequality_check();
        if !check.holds {
            return Err(PoolingError::InequalityViolated { u: self.u, v: self.v, lhs: check.lhs, c: self.c });
        }
        Ok(())
    }

    pub fn residuals(&self) -> Residuals {
        Residuals {
            indifference: self.u * self.v * self.v - self.c,
            zero_profit: max_profit(self, self.v, POOL_DEPOSIT),
        }
    }

    pub fn inequality_check(&self) -> InequalityCheck {
        let lhs = (self.u * (1.0 + self.c)).powi(2);
        InequalityCheck { lhs, c: self.c, holds: lhs <= self.c }
    }

    pub fn with_max_deposit(mut self, dbar: f64) -> Self {
        self.dbar = dbar;
        self
    }

    pub fn dist(&self) -> ValuationDistribution {
        ValuationDistribution::QUADRATIC
    }

    /// `d₁² − u²` with `d₁` capped at 1: the prior mass of bidder 2's belief
    /// support after a deposit above `u`.
    pub fn belief_mass(&self, d1: f64) -> f64 {
        let top = d1.min(1.0);
        top * top - self.u * self.u
    }
}

/// Solve `u·v(u)² = c` where `v(u)` is bidder 2's zero-profit entry type
/// after the pool deposit. Sign changes are bracketed on a grid of `u`; the
/// first valid root with `u < v` that passes the small-deposit inequality
/// is returned.
pub fn solve_marginal_types(c: f64) -> Result<PoolingParams, PoolingError> {
    check_cost(c)?;
    let gap = |u: f64| {
        let v = entry_threshold(&PoolingParams::from_parts(c, u, 1.0, DEFAULT_MAX_DEPOSIT), POOL_DEPOSIT);
        u * v * v - c
    };
    let steps = ((SCAN_HI - SCAN_LO) / SCAN_STEP).round() as usize;
    let mut first_violation = None;
    let mut prev = (SCAN_LO, gap(SCAN_LO));
    for i in 1..=steps {
        let u = SCAN_LO + SCAN_STEP * i as f64;
        let g = gap(u);
        if prev.1.signum() != g.signum() {
            let root = find_root(gap, RootBracket::new(prev.0, u).with_tol(1e-15))?;
            let params = PoolingParams::from_parts(
                c,
                root,
                entry_threshold(&PoolingParams::from_parts(c, root, 1.0, DEFAULT_MAX_DEPOSIT), POOL_DEPOSIT),
                DEFAULT_MAX_DEPOSIT,
            );
            if params.u < params.v {
                let check = params.inequality_check();
                if check.holds {
                    return Ok(params);
                }
                first_violation.get_or_insert(PoolingError::InequalityViolated {
                    u: params.u,
                    v: params.v,
                    lhs: check.lhs,
                    c,
                });
            }
        }
        prev = (u, g);
    }
    Err(first_violation.unwrap_or(PoolingError::NoSolution { lo: SCAN_LO, hi: SCAN_HI }))
}

/// Bidder 2's expected profit from depositing (and bidding) `d₂ ∈ [u, d₁]`
/// after observing `d₁ > u`.
pub fn profit(params: &PoolingParams, v2: f64, d1: f64, d2: f64) -> f64 {
    let u = params.u;
    let mass = params.belief_mass(d1);
    ((d2 * d2 - u * u) * v2 - 2.0 * (d2.powi(3) - u.powi(3)) / 3.0) / mass - params.c * d2
}

/// Larger root of the first-order condition, capped at `min(d₁, 1)`.
pub fn bidder2_interior_deposit(params: &PoolingParams, d1: f64, v2: f64) -> Result<f64, PoolingError> {
    let bound = 2.0 * params.c * params.belief_mass(d1);
    let v2_sq = v2 * v2;
    if v2_sq < bound {
        return Err(PoolingError::NegativeDiscriminant { v2_sq, bound });
    }
    Ok((0.5 * (v2 + (v2_sq - bound).sqrt())).min(d1.min(1.0)))
}

/// Best profit over `d₂ ∈ [u, min(d₁, 1)]`; the cubic profit attains its
/// maximum at an end point or at the larger critical point.
pub fn max_profit(params: &PoolingParams, v2: f64, d1: f64) -> f64 {
    let top = d1.min(1.0);
    let mut best = profit(params, v2, d1, params.u).max(profit(params, v2, d1, top));
    if let Ok(d2) = bidder2_interior_deposit(params, d1, v2) {
        if d2 >= params.u {
            best = best.max(profit(params, v2, d1, d2));
        }
    }
    best
}

/// Lowest type of bidder 2 that enters after `d₁ > u`; 1 when no type
/// below 1 makes a nonnegative profit.
pub fn entry_threshold(params: &PoolingParams, d1: f64) -> f64 {
    let g = |v2: f64| max_profit(params, v2, d1);
    if g(1.0) < 0.0 {
        return 1.0;
    }
    // profit is negative for v2 ≤ u since every bid is at least u
    find_root(g, RootBracket::new(params.u, 1.0).with_tol(1e-15)).unwrap_or(1.0)
}

pub fn pooling_bidder1_deposit(params: &PoolingParams, v1: f64) -> f64 {
    if v1 >= params.u {
        POOL_DEPOSIT
    } else {
        0.0
    }
}

pub fn pooling_bidder1_bid(params: &PoolingParams, v1: f64) -> f64 {
    if v1 >= params.u {
        v1
    } else {
        0.0
    }
}

/// Bidder 2's deposit after `d₁`, or `None` if he stays out. After a low
/// deposit he matches it whenever `v₂ ≥ (1+c)·d₁`; after `d₁ = 0` he
/// enters with a zero bid.
pub fn bidder2_pooling_response(params: &PoolingParams, d1: f64, v2: f64) -> Option<f64> {
    if d1 <= params.u {
        return (v2 >= (1.0 + params.c) * d1).then_some(d1);
    }
    bidder2_response_with_threshold(params, d1, v2, entry_threshold(params, d1))
}

/// As [`bidder2_pooling_response`] for `d₁ > u` with a precomputed threshold.
pub fn bidder2_response_with_threshold(params: &PoolingParams, d1: f64, v2: f64, threshold: f64) -> Option<f64> {
    if v2 < threshold {
        return None;
    }
    Some(bidder2_interior_deposit(params, d1, v2).unwrap_or(d1.min(1.0)))
}

/// Bidder 2's type at which his interior bid reaches `b₁`:
/// `b₁ + c(d₁² − u²)/(2b₁)`, capped at 1.
pub fn crossing_type(params: &PoolingParams, d1: f64, b1: f64) -> f64 {
    (b1 + params.c * params.belief_mass(d1) / (2.0 * b1)).min(1.0)
}

/// Expected profit of bidder-1 type `v₁` who deposits `d₁ > u` and bids
/// `min(v₁, d₁)`, by numeric integration over bidder 2's entering types.
pub fn bidder1_deviation_profit(params: &PoolingParams, v1: f64, d1: f64) -> f64 {
    if d1 <= params.u {
        return low_deposit_profit(params, v1, d1);
    }
    let threshold = entry_threshold(params, d1);
    let b1 = v1.min(d1);
    let win_cap = crossing_type(params, d1, b1).max(threshold);
    let interior = integrate(
        |v2| {
            let d2 = bidder2_response_with_threshold(params, d1, v2, threshold).unwrap_or(0.0);
            if d2 < b1 {
                (v1 - d2) * 2.0 * v2
            } else {
                0.0
            }
        },
        threshold,
        win_cap,
        1e-12,
    );
    threshold * threshold * v1 + interior.value - params.c * d1
}

/// Closed form of [`bidder1_deviation_profit`] for `d₁ > u`, using
/// `∫ v₂·d₂(v₂) dv₂ = v₂³/6 + (v₂² − 2c(d₁² − u²))^{3/2}/6`.
pub fn bidder1_deviation_profit_closed(params: &PoolingParams, v1: f64, d1: f64) -> f64 {
    if d1 <= params.u {
        return low_deposit_profit(params, v1, d1);
    }
    let threshold = entry_threshold(params, d1);
    let b1 = v1.min(d1);
    let hi = crossing_type(params, d1, b1).max(threshold);
    let k = 2.0 * params.c * params.belief_mass(d1);
    let anti = |x: f64| x.powi(3) / 3.0 + (x * x - k).max(0.0).powf(1.5) / 3.0;
    hi * hi * v1 - (anti(hi) - anti(threshold)) - params.c * d1
}

/// Profit after a deposit `d₁ ≤ u`: bidder 1 wins only if bidder 2, who
/// matches `d₁` when `v₂ ≥ (1+c)d₁`, stays out.
pub fn low_deposit_profit(params: &PoolingParams, v1: f64, d1: f64) -> f64 {
    if d1 <= 0.0 {
        return 0.0;
    }
    let cutoff = ((1.0 + params.c) * d1).min(1.0);
    cutoff * cutoff * v1 - params.c * d1
}

fn check_cost(c: f64) -> Result<(), PoolingError> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(PoolingError::BadCost(c))
    }
}
