use super::{Bidder2Plan, StrategyProfile};
use crate::dist::ValuationDistribution;
use crate::numerics::integrate;
use crate::pooling::{self, PoolingParams, POOL_DEPOSIT};
use crate::sequential::{Belief, SequentialEquilibrium, SequentialError};
use crate::simultaneous::SimultaneousEquilibrium;

/// Both bidders deposit `d(v)` at once and bid it; bidder 2 cannot react.
pub struct Simultaneous {
    pub eq: SimultaneousEquilibrium,
}

impl Simultaneous {
    pub fn new(eq: SimultaneousEquilibrium) -> Self {
        Self { eq }
    }

    // type whose deposit is `d`, by bisection on the increasing curve
    fn preimage(&self, d: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        if self.eq.deposit(hi) <= d {
            return hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eq.deposit(mid) <= d {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

impl StrategyProfile for Simultaneous {
    fn name(&self) -> String {
        "simultaneous".into()
    }

    fn cost(&self) -> f64 {
        self.eq.cost()
    }

    fn dist(&self) -> ValuationDistribution {
        self.eq.dist()
    }

    fn max_deposit(&self) -> f64 {
        1.0
    }

    fn bidder1_deposit(&self, v1: f64) -> f64 {
        self.eq.deposit(v1)
    }

    fn observes_deposit(&self) -> bool {
        false
    }

    fn bidder2_plan(&self, _d1: f64) -> Bidder2Plan<'_> {
        Bidder2Plan::new(0.0, move |v2| self.eq.deposit(v2))
    }

    fn belief(&self, _d1: f64) -> Belief {
        Belief::Truncated { lo: 0.0, hi: 1.0 }
    }

    fn bidder2_payoff(&self, v2: f64, _d1: f64, d2: f64) -> f64 {
        let dist = self.dist();
        let w = self.preimage(d2);
        let fw = dist.cdf_clamped(w);
        let paid = integrate(|q| self.eq.deposit(dist.quantile_clamped(q)), 0.0, fw, 1e-12).value;
        fw * v2 - paid - self.cost() * d2
    }

    fn bidder2_bid_cap(&self, _d1: f64) -> f64 {
        self.eq.deposit(1.0)
    }
}

/// Sequential regimes with a closed-form deposit rule.
pub struct Sequential {
    pub eq: SequentialEquilibrium,
}

impl Sequential {
    pub fn new(eq: SequentialEquilibrium) -> Self {
        Self { eq }
    }

    pub fn sqrt(c: f64) -> Result<Self, SequentialError> {
        Ok(Self::new(SequentialEquilibrium::sqrt_separating(c)?))
    }

    pub fn uniform(c: f64) -> Result<Self, SequentialError> {
        Ok(Self::new(SequentialEquilibrium::uniform_entry(c)?))
    }
}

impl StrategyProfile for Sequential {
    fn name(&self) -> String {
        self.eq.label().into()
    }

    fn cost(&self) -> f64 {
        self.eq.c
    }

    fn dist(&self) -> ValuationDistribution {
        self.eq.dist()
    }

    fn max_deposit(&self) -> f64 {
        self.eq.dbar
    }

    fn bidder1_deposit(&self, v1: f64) -> f64 {
        self.eq.bidder1_deposit(v1)
    }

    fn bidder2_plan(&self, d1: f64) -> Bidder2Plan<'_> {
        let threshold = self.eq.bidder2_entry_threshold(d1);
        let price = if threshold.is_finite() { self.eq.bidder2_response(d1, f64::INFINITY).0 } else { 0.0 };
        Bidder2Plan::constant(threshold, price)
    }

    fn belief(&self, d1: f64) -> Belief {
        self.eq.belief(d1)
    }

    fn type_breakpoints(&self) -> Vec<f64> {
        self.eq.type_breakpoints()
    }
}

/// Two-level pooling under the quadratic prior.
pub struct Pooling {
    pub params: PoolingParams,
    threshold_at_pool: f64,
}

impl Pooling {
    pub fn new(params: PoolingParams) -> Self {
        let threshold_at_pool = pooling::entry_threshold(&params, POOL_DEPOSIT);
        Self { params, threshold_at_pool }
    }

    pub fn threshold(&self, d1: f64) -> f64 {
        if d1 >= POOL_DEPOSIT {
            self.threshold_at_pool
        } else {
            pooling::entry_threshold(&self.params, d1)
        }
    }
}

impl StrategyProfile for Pooling {
    fn name(&self) -> String {
        "pooling".into()
    }

    fn cost(&self) -> f64 {
        self.params.c
    }

    fn dist(&self) -> ValuationDistribution {
        ValuationDistribution::QUADRATIC
    }

    fn max_deposit(&self) -> f64 {
        self.params.dbar
    }

    fn bidder1_deposit(&self, v1: f64) -> f64 {
        pooling::pooling_bidder1_deposit(&self.params, v1)
    }

    fn bidder1_bid(&self, v1: f64) -> f64 {
        pooling::pooling_bidder1_bid(&self.params, v1)
    }

    fn bidder2_plan(&self, d1: f64) -> Bidder2Plan<'_> {
        let p = self.params;
        if d1 <= p.u {
            return Bidder2Plan::constant((1.0 + p.c) * d1, d1);
        }
        Bidder2Plan::new(self.threshold(d1), move |v2| {
            pooling::bidder2_interior_deposit(&p, d1, v2).unwrap_or(d1.min(1.0))
        })
    }

    fn belief(&self, d1: f64) -> Belief {
        let u = self.params.u;
        if d1 <= u {
            Belief::Truncated { lo: d1.max(0.0), hi: u }
        } else {
            Belief::Truncated { lo: u, hi: d1.min(1.0) }
        }
    }

    fn type_breakpoints(&self) -> Vec<f64> {
        vec![self.params.u]
    }
}

/// Bidder 1's deposits multiplied by a constant while bidder 2 keeps the
/// base profile's responses and beliefs.
pub struct Scaled<P> {
    pub base: P,
    pub scale: f64,
}

impl<P: StrategyProfile> Scaled<P> {
    pub fn new(base: P, scale: f64) -> Self {
        Self { base, scale }
    }
}

impl<P: StrategyProfile> StrategyProfile for Scaled<P> {
    fn name(&self) -> String {
        format!("{}-scaled-{}", self.base.name(), self.scale)
    }

    fn cost(&self) -> f64 {
        self.base.cost()
    }

    fn dist(&self) -> ValuationDistribution {
        self.base.dist()
    }

    fn max_deposit(&self) -> f64 {
        self.base.max_deposit() * self.scale.max(1.0)
    }

    fn bidder1_deposit(&self, v1: f64) -> f64 {
        self.scale * self.base.bidder1_deposit(v1)
    }

    fn observes_deposit(&self) -> bool {
        self.base.observes_deposit()
    }

    fn bidder2_plan(&self, d1: f64) -> Bidder2Plan<'_> {
        self.base.bidder2_plan(d1)
    }

    fn belief(&self, d1: f64) -> Belief {
        self.base.belief(d1)
    }

    fn type_breakpoints(&self) -> Vec<f64> {
        self.base.type_breakpoints()
    }

    fn bidder2_payoff(&self, v2: f64, d1: f64, d2: f64) -> f64 {
        self.base.bidder2_payoff(v2, d1, d2)
    }

    fn bidder2_bid_cap(&self, d1: f64) -> f64 {
        self.base.bidder2_bid_cap(d1)
    }
}

/// Everyone deposits and bids his value; bidder 2 reads bidder 1's type
/// off the deposit. An equilibrium only in the limit of free deposits.
pub struct Truthful {
    pub c: f64,
    pub dist: ValuationDistribution,
}

impl StrategyProfile for Truthful {
    fn name(&self) -> String {
        "truthful".into()
    }

    fn cost(&self) -> f64 {
        self.c
    }

    fn dist(&self) -> ValuationDistribution {
        self.dist
    }

    fn max_deposit(&self) -> f64 {
        1.0
    }

    fn bidder1_deposit(&self, v1: f64) -> f64 {
        v1
    }

    fn bidder2_plan(&self, _d1: f64) -> Bidder2Plan<'_> {
        Bidder2Plan::new(0.0, |v2| v2)
    }

    fn belief(&self, d1: f64) -> Belief {
        Belief::PointMass { at: d1.clamp(0.0, 1.0) }
    }
}
