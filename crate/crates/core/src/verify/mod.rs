//! Numerical check of the equilibrium conditions for a strategy profile:
//! no profitable deposit deviation for either bidder given the other's
//! strategy and bidder 2's beliefs, and Bayes-consistent beliefs on path.
//!
//! Bidder 2 wins ties. Bidder 1 wins against a bidder 2 who stays out as
//! long as he bids something positive.

mod profiles;

pub use profiles::{Pooling, Scaled, Sequential, Simultaneous, Truthful};

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::ValuationDistribution;
use crate::numerics::{integrate, maximize_1d};
use crate::sequential::Belief;

pub const DEFAULT_EPS: f64 = 1e-3;
pub const DEFAULT_TYPES: usize = 50;
pub const DEFAULT_DEPOSITS: usize = 200;
pub const BAYES_TOL: f64 = 1e-6;

const PAYOFF_TOL: f64 = 1e-11;
const BISECTIONS: usize = 200;

/// Bidder 2's strategy after a particular `d₁`: he enters iff
/// `v₂ ≥ entry_threshold` and then bids (and deposits) `bid(v₂)`, which is
/// nondecreasing in `v₂`. An infinite threshold means nobody enters.
pub struct Bidder2Plan<'a> {
    pub entry_threshold: f64,
    bid: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
}

impl<'a> Bidder2Plan<'a> {
    pub fn new(entry_threshold: f64, bid: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Self {
        Self { entry_threshold, bid: Box::new(bid) }
    }

    pub fn constant(entry_threshold: f64, bid: f64) -> Self {
        Self::new(entry_threshold, move |_| bid)
    }

    pub fn respond(&self, v2: f64) -> Option<f64> {
        (v2 >= self.entry_threshold).then(|| (self.bid)(v2))
    }

    pub fn bid(&self, v2: f64) -> f64 {
        (self.bid)(v2)
    }

    /// Lowest entering type whose bid reaches `b1`, or 1 if none does.
    pub fn crossing(&self, b1: f64) -> f64 {
        let t = self.entry_threshold;
        if t >= 1.0 {
            return 1.0;
        }
        let t = t.max(0.0);
        if self.bid(t) >= b1 {
            return t;
        }
        if self.bid(1.0) < b1 {
            return 1.0;
        }
        let (mut lo, mut hi) = (t, 1.0);
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.bid(mid) >= b1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

pub trait StrategyProfile: Sync {
    fn name(&self) -> String;
    fn cost(&self) -> f64;
    fn dist(&self) -> ValuationDistribution;
    fn max_deposit(&self) -> f64;
    fn bidder1_deposit(&self, v1: f64) -> f64;

    fn bidder1_bid(&self, v1: f64) -> f64 {
        v1.min(self.bidder1_deposit(v1))
    }

    /// False when bidder 2 moves without seeing `d₁`.
    fn observes_deposit(&self) -> bool {
        true
    }

    fn bidder2_plan(&self, d1: f64) -> Bidder2Plan<'_>;
    fn belief(&self, d1: f64) -> Belief;

    /// Types at which bidder 1's deposit rule changes branch.
    fn type_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Bidder 2's expected payoff from depositing and bidding `d2` after
    /// seeing `d1`, against bidder 1 bidding `min(v₁, d₁)` with `v₁`
    /// distributed according to the belief.
    fn bidder2_payoff(&self, v2: f64, d1: f64, d2: f64) -> f64 {
        belief_payoff(&self.dist(), self.belief(d1), v2, d1, d2) - self.cost() * d2
    }

    /// Upper end of bidder 1's possible bids after `d1`; bidding above it
    /// only adds cost for bidder 2.
    fn bidder2_bid_cap(&self, d1: f64) -> f64 {
        match self.belief(d1) {
            Belief::PointMass { at } => at.min(d1),
            Belief::Truncated { hi, .. } => hi.min(d1),
        }
    }

    fn bidder2_response(&self, d1: f64, v2: f64) -> Option<f64> {
        self.bidder2_plan(d1).respond(v2)
    }
}

impl<T: StrategyProfile + ?Sized> StrategyProfile for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn cost(&self) -> f64 {
        (**self).cost()
    }
    fn dist(&self) -> ValuationDistribution {
        (**self).dist()
    }
    fn max_deposit(&self) -> f64 {
        (**self).max_deposit()
    }
    fn bidder1_deposit(&self, v1: f64) -> f64 {
        (**self).bidder1_deposit(v1)
    }
    fn bidder1_bid(&self, v1: f64) -> f64 {
        (**self).bidder1_bid(v1)
    }
    fn observes_deposit(&self) -> bool {
        (**self).observes_deposit()
    }
    fn bidder2_plan(&self, d1: f64) -> Bidder2Plan<'_> {
        (**self).bidder2_plan(d1)
    }
    fn belief(&self, d1: f64) -> Belief {
        (**self).belief(d1)
    }
    fn type_breakpoints(&self) -> Vec<f64> {
        (**self).type_breakpoints()
    }
    fn bidder2_payoff(&self, v2: f64, d1: f64, d2: f64) -> f64 {
        (**self).bidder2_payoff(v2, d1, d2)
    }
    fn bidder2_bid_cap(&self, d1: f64) -> f64 {
        (**self).bidder2_bid_cap(d1)
    }
}

/// `E[(v₂ − b₁)·1{b₁ ≤ d₂}]` for `b₁ = min(v₁, d₁)`, `v₁ ~ belief`.
pub fn belief_payoff(dist: &ValuationDistribution, belief: Belief, v2: f64, d1: f64, d2: f64) -> f64 {
    match belief {
        Belief::PointMass { at } => {
            let b1 = at.min(d1);
            if b1 <= d2 {
                v2 - b1
            } else {
                0.0
            }
        }
        Belief::Truncated { lo, hi } => {
            let mass = dist.cdf_clamped(hi) - dist.cdf_clamped(lo);
            if mass <= 0.0 || hi - lo < 1e-12 {
                return belief_payoff(dist, Belief::PointMass { at: lo }, v2, d1, d2);
            }
            if d1 <= d2 {
                let split = d1.clamp(lo, hi);
                let below = dist.partial_moment(lo, split);
                let capped = d1 * (dist.cdf_clamped(hi) - dist.cdf_clamped(split));
                v2 - (below + capped) / mass
            } else {
                let x = d2.clamp(lo, hi);
                let p = (dist.cdf_clamped(x) - dist.cdf_clamped(lo)) / mass;
                p * v2 - dist.partial_moment(lo, x) / mass
            }
        }
    }
}

/// Bidder 1's expected payoff from depositing `d1` and bidding `b1 ≤ d1`
/// against a given plan of bidder 2.
pub fn bidder1_payoff_with_plan(
    dist: &ValuationDistribution,
    cost: f64,
    plan: &Bidder2Plan<'_>,
    v1: f64,
    d1: f64,
    b1: f64,
) -> f64 {
    let q_out = dist.cdf_clamped(plan.entry_threshold.min(1.0));
    let out = if b1 > 0.0 { q_out * v1 } else { 0.0 };
    let q_cross = dist.cdf_clamped(plan.crossing(b1));
    let beaten = if q_cross > q_out {
        integrate(|q| v1 - plan.bid(dist.quantile_clamped(q)), q_out, q_cross, PAYOFF_TOL).value
    } else {
        0.0
    };
    out + beaten - cost * d1
}

/// Expected payoff of bidder-1 type `v1` depositing `d1` and bidding
/// `min(v1, d1)`.
pub fn bidder1_expected_payoff<P: StrategyProfile + ?Sized>(profile: &P, v1: f64, d1: f64) -> f64 {
    let plan = profile.bidder2_plan(d1);
    bidder1_payoff_with_plan(&profile.dist(), profile.cost(), &plan, v1, d1, v1.min(d1))
}

/// Expected payoff of bidder-2 type `v2` following the profile after `d1`.
pub fn bidder2_expected_payoff<P: StrategyProfile + ?Sized>(profile: &P, d1: f64, v2: f64) -> f64 {
    match profile.bidder2_response(d1, v2) {
        Some(d2) => profile.bidder2_payoff(v2, d1, d2),
        None => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub n_types: usize,
    pub n_deposits: usize,
    pub eps: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { n_types: DEFAULT_TYPES, n_deposits: DEFAULT_DEPOSITS, eps: DEFAULT_EPS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bidder1Check {
    pub max_gain: f64,
    pub at_type: f64,
    pub equilibrium_deposit: f64,
    pub best_deviation: f64,
    pub equilibrium_payoff: f64,
    pub deviation_payoff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bidder2Check {
    pub max_gain: f64,
    pub at_deposit: f64,
    pub at_type: f64,
    /// Best alternative deposit; `None` means staying out.
    pub best_deviation: Option<f64>,
    pub equilibrium_payoff: f64,
    pub deviation_payoff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BayesCheck {
    pub max_gap: f64,
    pub at_deposit: f64,
    pub deposits_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub profile: String,
    pub cost: f64,
    pub dist: String,
    pub eps: f64,
    pub bidder1: Bidder1Check,
    pub bidder2: Bidder2Check,
    pub bayes: Option<BayesCheck>,
    pub max_gain: f64,
    pub pass: bool,
}

pub fn verify<P: StrategyProfile + ?Sized>(profile: &P, config: VerifyConfig) -> VerificationReport {
    let bidder1 = check_bidder1(profile, config);
    let bidder2 = check_bidder2(profile, config);
    let bayes = profile.observes_deposit().then(|| check_bayes_consistency(profile));
    let max_gain = bidder1.max_gain.max(bidder2.max_gain);
    let pass = max_gain <= config.eps && bayes.map_or(true, |b| b.max_gap <= BAYES_TOL);
    VerificationReport {
        profile: profile.name(),
        cost: profile.cost(),
        dist: profile.dist().to_string(),
        eps: config.eps,
        bidder1,
        bidder2,
        bayes,
        max_gain,
        pass,
    }
}

/// Midpoint grid plus the profile's breakpoints and the top type.
pub fn type_grid<P: StrategyProfile + ?Sized>(profile: &P, n: usize) -> Vec<f64> {
    let mut types: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    types.extend(profile.type_breakpoints().into_iter().filter(|v| (0.0..=1.0).contains(v)));
    types.push(1.0);
    types.sort_by(f64::total_cmp);
    types.dedup();
    types
}

fn deposit_candidates<P: StrategyProfile + ?Sized>(profile: &P, types: &[f64], n: usize) -> Vec<f64> {
    let dbar = profile.max_deposit();
    let mut out: Vec<f64> = (0..=n).map(|i| dbar * i as f64 / n as f64).collect();
    out.extend(types.iter().map(|&v| profile.bidder1_deposit(v)));
    out.retain(|d| d.is_finite() && (0.0..=dbar).contains(d));
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Largest gain any bidder-1 type on the grid gets from switching to a
/// candidate deposit (grid over `[0, d̄]`, every on-path level, 0 and `d̄`).
pub fn check_bidder1<P: StrategyProfile + ?Sized>(profile: &P, config: VerifyConfig) -> Bidder1Check {
    let types = type_grid(profile, config.n_types);
    let deposits = deposit_candidates(profile, &types, config.n_deposits);
    let dist = profile.dist();
    let cost = profile.cost();
    let plans: Vec<Bidder2Plan<'_>> = deposits.par_iter().map(|&d| profile.bidder2_plan(d)).collect();
    types
        .par_iter()
        .map(|&v1| {
            let d_eq = profile.bidder1_deposit(v1);
            let u_eq = bidder1_payoff_with_plan(&dist, cost, &profile.bidder2_plan(d_eq), v1, d_eq, profile.bidder1_bid(v1));
            let mut best = (f64::NEG_INFINITY, d_eq);
            for (&d, plan) in deposits.iter().zip(&plans) {
                let u = bidder1_payoff_with_plan(&dist, cost, plan, v1, d, v1.min(d));
                if u > best.0 {
                    best = (u, d);
                }
            }
            Bidder1Check {
                max_gain: (best.0 - u_eq).max(0.0),
                at_type: v1,
                equilibrium_deposit: d_eq,
                best_deviation: best.1,
                equilibrium_payoff: u_eq,
                deviation_payoff: best.0,
            }
        })
        .reduce_with(|a, b| if b.max_gain > a.max_gain { b } else { a })
        .expect("nonempty type grid")
}

/// Largest gain of a bidder-2 type from deviating after any observed
/// deposit on the candidate grid (on-path levels included).
pub fn check_bidder2<P: StrategyProfile + ?Sized>(profile: &P, config: VerifyConfig) -> Bidder2Check {
    let types = type_grid(profile, config.n_types);
    let observed = if profile.observes_deposit() {
        deposit_candidates(profile, &types, config.n_deposits)
    } else {
        vec![0.0]
    };
    observed
        .par_iter()
        .flat_map_iter(|&d1| {
            let plan = profile.bidder2_plan(d1);
            let cap = profile.bidder2_bid_cap(d1).max(0.0);
            let mut atoms = vec![0.0, cap, d1.min(cap)];
            if let Belief::Truncated { lo, .. } = profile.belief(d1) {
                atoms.push(lo.min(cap));
            }
            types
                .iter()
                .map(|&v2| {
                    let prescribed = plan.respond(v2);
                    let u_eq = prescribed.map_or(0.0, |d2| profile.bidder2_payoff(v2, d1, d2));
                    let payoff = |d2: f64| profile.bidder2_payoff(v2, d1, d2);
                    let mut best = (0.0, None);
                    let refined = maximize_1d(payoff, 0.0, cap, 64, 1e-10);
                    for (u, d2) in atoms.iter().map(|&a| (payoff(a), a)).chain([(refined.max, refined.argmax)]) {
                        if u > best.0 {
                            best = (u, Some(d2));
                        }
                    }
                    Bidder2Check {
                        max_gain: (best.0 - u_eq).max(0.0),
                        at_deposit: d1,
                        at_type: v2,
                        best_deviation: best.1,
                        equilibrium_payoff: u_eq,
                        deviation_payoff: best.0,
                    }
                })
                .collect::<Vec<_>>()
        })
        .reduce_with(|a, b| if b.max_gain > a.max_gain { b } else { a })
        .expect("nonempty grid")
}

const BAYES_GRID: usize = 2000;
const BAYES_QUANTILES: usize = 20;

/// On-path beliefs against Bayes' rule. Bidder 1's deposit rule is sampled
/// on a fine type grid; runs of equal deposits are pools whose ends are
/// located by bisection, and isolated deposits must map to a point mass at
/// their preimage.
pub fn check_bayes_consistency<P: StrategyProfile + ?Sized>(profile: &P) -> BayesCheck {
    let dist = profile.dist();
    let types: Vec<f64> = (0..=BAYES_GRID).map(|i| i as f64 / BAYES_GRID as f64).collect();
    let deposits: Vec<f64> = types.iter().map(|&v| profile.bidder1_deposit(v)).collect();
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1.0);
    let mut worst = BayesCheck { max_gap: 0.0, at_deposit: 0.0, deposits_checked: 0 };
    let mut i = 0;
    while i < types.len() {
        let d = deposits[i];
        let mut j = i;
        while j + 1 < types.len() && same(deposits[j + 1], d) {
            j += 1;
        }
        let belief = profile.belief(d);
        let gap = if j > i {
            let in_pool = |v: f64| same(profile.bidder1_deposit(v), d);
            let lo = if i == 0 { 0.0 } else { boundary(types[i - 1], types[i], |v| in_pool(v)) };
            let hi = if j + 1 == types.len() { 1.0 } else { boundary(types[j + 1], types[j], |v| in_pool(v)) };
            let (f_lo, f_hi) = (dist.cdf_clamped(lo), dist.cdf_clamped(hi));
            (0..BAYES_QUANTILES)
                .map(|k| {
                    let q = (k as f64 + 0.5) / BAYES_QUANTILES as f64;
                    let x = dist.quantile_clamped(f_lo + q * (f_hi - f_lo));
                    (belief.cdf(&dist, x) - q).abs()
                })
                .fold(0.0, f64::max)
        } else {
            let v = types[i];
            match belief {
                Belief::PointMass { at } => (at - v).abs(),
                Belief::Truncated { lo, hi } => (lo - v).abs().max((hi - v).abs()),
            }
        };
        worst.deposits_checked += 1;
        if gap > worst.max_gap {
            worst.max_gap = gap;
            worst.at_deposit = d;
        }
        i = j + 1;
    }
    worst
}

// point between `outside` and `inside` where membership switches
fn boundary(mut outside: f64, mut inside: f64, member: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (outside + inside);
        if mid == outside || mid == inside {
            break;
        }
        if member(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}
