//! Closed-form sequential equilibria in which bidder 1's deposit reveals
//! his type: full separation under the square-root prior and separation
//! conditional on entry under the uniform prior. Types at or above
//! `1/(1+c)` pool on a single top deposit in both.

use serde::Serialize;
use thiserror::Error;

use crate::dist::ValuationDistribution;

pub const DEFAULT_MAX_DEPOSIT: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SequentialError {
    #[error("deposit cost must be positive, got {0}")]
    BadCost(f64),
    #[error("the uniform entry equilibrium needs c < 1, got {0}")]
    CostTooHigh(f64),
    #[error("deposit {d1} exceeds the separating range (top deposit {top})")]
    OutOfRange { d1: f64, top: f64 },
    #[error("maximum deposit {dbar} is below the top equilibrium deposit {top}")]
    MaxDepositTooSmall { dbar: f64, top: f64 },
}

/// Bidder 2's belief about bidder 1's type after observing a deposit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Belief {
    PointMass { at: f64 },
    /// Prior conditioned on `lo ≤ v₁ ≤ hi`.
    Truncated { lo: f64, hi: f64 },
}

impl Belief {
    pub fn cdf(&self, dist: &ValuationDistribution, x: f64) -> f64 {
        match *self {
            Belief::PointMass { at } => {
                if x >= at {
                    1.0
                } else {
                    0.0
                }
            }
            Belief::Truncated { lo, hi } => dist.truncated_cdf(x, lo, hi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequentialKind {
    /// Square-root prior: separating, under-deposit then over-deposit.
    Separating,
    /// Uniform prior: low types stay out, entrants separate.
    ConditionalOnEntry,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Lowest type depositing a positive amount.
    pub entry: f64,
    /// Type at which bidder 1 switches from under- to over-depositing.
    pub over_deposit_switch: Option<f64>,
    /// Lowest type in the top pool.
    pub pool_start: f64,
    /// Deposit posted by the top pool.
    pub top_deposit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequentialEquilibrium {
    pub c: f64,
    pub kind: SequentialKind,
    pub dbar: f64,
    pub thresholds: Thresholds,
}

impl SequentialEquilibrium {
    /// Square-root prior. Three branches when `4c² < 1`; otherwise every
    /// type under-deposits on the low branch and there is no top pool.
    pub fn sqrt_separating(c: f64) -> Result<Self, SequentialError> {
        check_cost(c)?;
        let thresholds = if 4.0 * c * c < 1.0 {
            let pool_start = 1.0 / (1.0 + c);
            Thresholds {
                entry: 0.0,
                over_deposit_switch: Some(4.0 * c * c / (1.0 + c)),
                pool_start,
                top_deposit: sqrt_middle(c, pool_start),
            }
        } else {
            Thresholds {
                entry: 0.0,
                over_deposit_switch: None,
                pool_start: 1.0,
                top_deposit: sqrt_low(c, 1.0),
            }
        };
        Self::build(c, SequentialKind::Separating, thresholds)
    }

    pub fn uniform_entry(c: f64) -> Result<Self, SequentialError> {
        check_cost(c)?;
        if c >= 1.0 {
            return Err(SequentialError::CostTooHigh(c));
        }
        let thresholds = Thresholds {
            entry: c / (1.0 + c),
            over_deposit_switch: None,
            pool_start: 1.0 / (1.0 + c),
            top_deposit: (1.0 + c * c) / (2.0 * c * (1.0 + c)),
        };
        Self::build(c, SequentialKind::ConditionalOnEntry, thresholds)
    }

    fn build(c: f64, kind: SequentialKind, thresholds: Thresholds) -> Result<Self, SequentialError> {
        let dbar = DEFAULT_MAX_DEPOSIT.max(thresholds.top_deposit * 1.5);
        Ok(Self { c, kind, dbar, thresholds })
    }

    pub fn with_max_deposit(mut self, dbar: f64) -> Result<Self, SequentialError> {
        if dbar < self.thresholds.top_deposit {
            return Err(SequentialError::MaxDepositTooSmall { dbar, top: self.thresholds.top_deposit });
        }
        self.dbar = dbar;
        Ok(self)
    }

    pub fn dist(&self) -> ValuationDistribution {
        match self.kind {
            SequentialKind::Separating => ValuationDistribution::SQRT,
            SequentialKind::ConditionalOnEntry => ValuationDistribution::UNIFORM,
        }
    }

    pub fn bidder1_deposit(&self, v1: f64) -> f64 {
        let c = self.c;
        let t = &self.thresholds;
        match self.kind {
            SequentialKind::Separating => match t.over_deposit_switch {
                Some(_) if v1 >= t.pool_start => t.top_deposit,
                Some(switch) if v1 >= switch => sqrt_middle(c, v1),
                _ => sqrt_low(c, v1),
            },
            SequentialKind::ConditionalOnEntry => {
                if v1 < t.entry {
                    0.0
                } else if v1 < t.pool_start {
                    (1.0 + c) / (2.0 * c) * v1 * v1 + c / (2.0 * (1.0 + c))
                } else {
                    t.top_deposit
                }
            }
        }
    }

    pub fn bidder1_bid(&self, v1: f64) -> f64 {
        v1.min(self.bidder1_deposit(v1))
    }

    /// Type whose equilibrium deposit is `d1`, for `d1` in the separating
    /// range `[d₁(entry), top]`.
    pub fn inverse_type(&self, d1: f64) -> Result<f64, SequentialError> {
        let c = self.c;
        let t = &self.thresholds;
        if d1 > t.top_deposit {
            return Err(SequentialError::OutOfRange { d1, top: t.top_deposit });
        }
        let v = match self.kind {
            SequentialKind::Separating => match t.over_deposit_switch {
                Some(switch) if d1 > switch => {
                    (3.0 * c * (1.0 + c) * d1 - 4.0 * c.powi(3)).powf(2.0 / 3.0) / (1.0 + c)
                }
                _ => (4.0 * c * c * d1 / (1.0 + c)).sqrt(),
            },
            SequentialKind::ConditionalOnEntry => {
                let arg = 2.0 * c * d1 / (1.0 + c) - c * c / ((1.0 + c) * (1.0 + c));
                arg.max(0.0).sqrt()
            }
        };
        Ok(self.snap_up(v.min(t.pool_start), d1))
    }

    // The closed-form inverse can land a few ulps below the true type, and
    // bidder 2's price must not fall below the bid of the type he faces.
    // Move to the largest nearby float whose deposit does not exceed `d1`.
    fn snap_up(&self, mut v: f64, d1: f64) -> f64 {
        for _ in 0..16 {
            if v > 0.0 && self.bidder1_deposit(v) > d1 {
                v = v.next_down();
            } else {
                break;
            }
        }
        for _ in 0..16 {
            let up = v.next_up();
            if up <= self.thresholds.pool_start && self.bidder1_deposit(up) <= d1 {
                v = up;
            } else {
                break;
            }
        }
        v
    }

    pub fn belief(&self, d1: f64) -> Belief {
        let t = &self.thresholds;
        let has_pool = t.pool_start < 1.0;
        if has_pool && d1 >= t.top_deposit {
            return Belief::Truncated { lo: t.pool_start, hi: 1.0 };
        }
        if d1 > t.top_deposit {
            return Belief::PointMass { at: 1.0 };
        }
        match self.kind {
            SequentialKind::ConditionalOnEntry if d1 == 0.0 => Belief::Truncated { lo: 0.0, hi: t.entry },
            SequentialKind::ConditionalOnEntry if d1 < t.entry => Belief::PointMass { at: t.entry },
            _ => Belief::PointMass { at: self.inverse_type(d1).expect("d1 within range") },
        }
    }

    /// Bidder 2's deposit (equal to his bid) after observing `d1`, and
    /// whether he takes part at all.
    pub fn bidder2_response(&self, d1: f64, v2: f64) -> (f64, bool) {
        let c = self.c;
        let price = match self.belief(d1) {
            // the top pool deters every type
            Belief::Truncated { lo, .. } if lo > 0.0 => return (0.0, false),
            Belief::Truncated { .. } => 0.0,
            Belief::PointMass { at } => d1.min(at),
        };
        if v2 >= (1.0 + c) * price {
            (price, true)
        } else {
            (0.0, false)
        }
    }

    /// Entry cutoff on bidder 2's type after observing `d1`.
    pub fn bidder2_entry_threshold(&self, d1: f64) -> f64 {
        match self.belief(d1) {
            Belief::Truncated { lo, .. } if lo > 0.0 => f64::INFINITY,
            Belief::Truncated { .. } => 0.0,
            Belief::PointMass { at } => (1.0 + self.c) * d1.min(at),
        }
    }

    /// Type breakpoints of bidder 1's deposit rule.
    pub fn type_breakpoints(&self) -> Vec<f64> {
        let t = &self.thresholds;
        let mut out = vec![t.entry, t.pool_start];
        out.extend(t.over_deposit_switch);
        out.retain(|&x| x > 0.0 && x < 1.0);
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            SequentialKind::Separating => "sequential-sqrt",
            SequentialKind::ConditionalOnEntry => "sequential-uniform",
        }
    }
}

/// Free functions mirroring the closed forms for the square-root prior.
pub fn sqrt_bidder1_deposit(c: f64, v1: f64) -> Result<f64, SequentialError> {
    Ok(SequentialEquilibrium::sqrt_separating(c)?.bidder1_deposit(v1))
}

pub fn sqrt_bidder1_bid(c: f64, v1: f64) -> Result<f64, SequentialError> {
    Ok(SequentialEquilibrium::sqrt_separating(c)?.bidder1_bid(v1))
}

pub fn sqrt_inverse_type(c: f64, d1: f64) -> Result<f64, SequentialError> {
    SequentialEquilibrium::sqrt_separating(c)?.inverse_type(d1)
}

pub fn sqrt_bidder2_response(c: f64, d1: f64, v2: f64) -> Result<f64, SequentialError> {
    Ok(SequentialEquilibrium::sqrt_separating(c)?.bidder2_response(d1, v2).0)
}

pub fn uniform_bidder1_deposit(c: f64, v1: f64) -> Result<f64, SequentialError> {
    Ok(SequentialEquilibrium::uniform_entry(c)?.bidder1_deposit(v1))
}

pub fn uniform_bidder2_response(c: f64, d1: f64, v2: f64) -> Result<f64, SequentialError> {
    Ok(SequentialEquilibrium::uniform_entry(c)?.bidder2_response(d1, v2).0)
}

fn sqrt_low(c: f64, v1: f64) -> f64 {
    (1.0 + c) * v1 * v1 / (4.0 * c * c)
}

// integration constant 4c³ makes d(4c²/(1+c)) = 4c²/(1+c)
fn sqrt_middle(c: f64, v1: f64) -> f64 {
    (((1.0 + c) * v1).powf(1.5) + 4.0 * c.powi(3)) / (3.0 * c * (1.0 + c))
}

fn check_cost(c: f64) -> Result<(), SequentialError> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(SequentialError::BadCost(c))
    }
}
