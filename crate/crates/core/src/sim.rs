//! Monte Carlo evaluation of a strategy profile, with an exact quadrature
//! of the misallocation probability as a cross-check.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::numerics::integrate_piecewise;
use crate::verify::StrategyProfile;

const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Bidder1,
    Bidder2,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuctionOutcome {
    pub v1: f64,
    pub v2: f64,
    pub d1: f64,
    pub d2: f64,
    pub b1: f64,
    pub b2: f64,
    pub bidder2_entered: bool,
    pub winner: Winner,
    pub price: f64,
    pub payoff1: f64,
    pub payoff2: f64,
    pub welfare: f64,
}

impl AuctionOutcome {
    /// The item went to the lower valuation, or nobody got it.
    pub fn misallocated(&self) -> bool {
        match self.winner {
            Winner::Bidder1 => self.v1 < self.v2,
            Winner::Bidder2 => self.v2 < self.v1,
            Winner::None => self.v1 > 0.0 || self.v2 > 0.0,
        }
    }

    /// Deposit posted beyond the bid, at cost.
    pub fn over_deposit_cost(&self, c: f64) -> f64 {
        c * ((self.d1 - self.b1) + (self.d2 - self.b2))
    }
}

/// Play one auction. Bidder 2 wins whenever he takes part and bids at least
/// `b₁`; otherwise bidder 1 wins if he bid anything. The winner pays the
/// losing bid.
pub fn run_auction<P: StrategyProfile + ?Sized>(profile: &P, v1: f64, v2: f64) -> AuctionOutcome {
    let c = profile.cost();
    let d1 = profile.bidder1_deposit(v1);
    let b1 = profile.bidder1_bid(v1);
    let response = profile.bidder2_response(d1, v2);
    let d2 = response.unwrap_or(0.0);
    let b2 = d2;
    let winner = match response {
        Some(b2) if b2 >= b1 => Winner::Bidder2,
        _ if b1 > b2 => Winner::Bidder1,
        _ => Winner::None,
    };
    let (price, value) = match winner {
        Winner::Bidder1 => (b2, v1),
        Winner::Bidder2 => (b1, v2),
        Winner::None => (0.0, 0.0),
    };
    let payoff1 = if winner == Winner::Bidder1 { v1 - price } else { 0.0 } - c * d1;
    let payoff2 = if winner == Winner::Bidder2 { v2 - price } else { 0.0 } - c * d2;
    AuctionOutcome {
        v1,
        v2,
        d1,
        d2,
        b1,
        b2,
        bidder2_entered: response.is_some(),
        winner,
        price,
        payoff1,
        payoff2,
        welfare: value - c * (d1 + d2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloMetrics {
    pub n: u64,
    pub misallocation_prob: f64,
    pub misallocation_stderr: f64,
    pub expected_welfare: f64,
    pub expected_revenue: f64,
    pub expected_deposit_waste: f64,
    pub bidder1_entry_rate: f64,
    pub bidder2_entry_rate: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Totals {
    misallocated: u64,
    welfare: f64,
    revenue: f64,
    waste: f64,
    entered1: u64,
    entered2: u64,
}

impl Totals {
    fn merge(self, o: Totals) -> Totals {
        Totals {
            misallocated: self.misallocated + o.misallocated,
            welfare: self.welfare + o.welfare,
            revenue: self.revenue + o.revenue,
            waste: self.waste + o.waste,
            entered1: self.entered1 + o.entered1,
            entered2: self.entered2 + o.entered2,
        }
    }
}

/// Valuation pair for draw `index`: stream `index` of a ChaCha8 generator
/// seeded with `seed`, so draws do not depend on how work is split.
pub fn draw_valuations<P: StrategyProfile + ?Sized>(profile: &P, seed: u64, index: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let dist = profile.dist();
    (dist.sample(&mut rng), dist.sample(&mut rng))
}

/// Simulate `n` independent auctions. Results are identical for a given
/// seed regardless of the number of threads.
pub fn monte_carlo<P: StrategyProfile + ?Sized>(profile: &P, n: u64, seed: u64) -> MonteCarloMetrics {
    let c = profile.cost();
    let chunks = n.div_ceil(CHUNK as u64);
    let partial: Vec<Totals> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let start = k * CHUNK as u64;
            let end = (start + CHUNK as u64).min(n);
            let mut t = Totals::default();
            for i in start..end {
                let (v1, v2) = draw_valuations(profile, seed, i);
                let o = run_auction(profile, v1, v2);
                t.misallocated += o.misallocated() as u64;
                t.welfare += o.welfare;
                t.revenue += o.price;
                t.waste += o.over_deposit_cost(c);
                t.entered1 += (o.d1 > 0.0) as u64;
                t.entered2 += o.bidder2_entered as u64;
            }
            t
        })
        .collect();
    let t = partial.into_iter().fold(Totals::default(), Totals::merge);
    let nf = n.max(1) as f64;
    let p = t.misallocated as f64 / nf;
    MonteCarloMetrics {
        n,
        misallocation_prob: p,
        misallocation_stderr: (p * (1.0 - p) / nf).sqrt(),
        expected_welfare: t.welfare / nf,
        expected_revenue: t.revenue / nf,
        expected_deposit_waste: t.waste / nf,
        bidder1_entry_rate: t.entered1 as f64 / nf,
        bidder2_entry_rate: t.entered2 as f64 / nf,
    }
}

/// Probability of misallocation by quadrature over bidder 1's quantile.
/// For each `v₁` the set of misallocating `v₂` is a union of intervals cut
/// by bidder 2's entry threshold and the type at which his bid reaches
/// `b₁`, so the inner integral is exact.
pub fn misallocation_quadrature<P: StrategyProfile + ?Sized>(profile: &P) -> f64 {
    let dist = profile.dist();
    let mass = |lo: f64, hi: f64| {
        if hi > lo {
            dist.cdf_clamped(hi) - dist.cdf_clamped(lo)
        } else {
            0.0
        }
    };
    let inner = |v1: f64| {
        let d1 = profile.bidder1_deposit(v1);
        let b1 = profile.bidder1_bid(v1);
        let plan = profile.bidder2_plan(d1);
        let t = plan.entry_threshold.clamp(0.0, 1.0);
        let cross = plan.crossing(b1).max(t);
        // bidder 2 out: bidder 1 wins if he bid, else nobody does
        let out = if b1 > 0.0 { mass(v1, t) } else { mass(0.0, t) };
        // bidder 2 in but outbid, then bidder 2 winning
        out + mass(v1.max(t), cross) + mass(cross, v1)
    };
    let breaks: Vec<f64> = profile.type_breakpoints().into_iter().map(|v| dist.cdf_clamped(v)).collect();
    integrate_piecewise(|q| inner(dist.quantile_clamped(q)), 0.0, 1.0, &breaks, 1e-11).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ValuationDistribution;
    use crate::pooling::solve_marginal_types;
    use crate::simultaneous::{SimultaneousEquilibrium, DEFAULT_STEP};
    use crate::verify::{Pooling, Sequential, Simultaneous};

    fn pooling() -> Pooling {
        Pooling::new(solve_marginal_types(0.22).unwrap())
    }

    fn simultaneous(dist: ValuationDistribution, c: f64) -> Simultaneous {
        Simultaneous::new(SimultaneousEquilibrium::solve(dist, c, DEFAULT_STEP).unwrap())
    }

    // misallocation probability on a midpoint grid, from run_auction alone
    fn grid_misallocation<P: StrategyProfile>(profile: &P, n: usize) -> f64 {
        let dist = profile.dist();
        let mut hits = 0usize;
        for i in 0..n {
            let v1 = dist.quantile_clamped((i as f64 + 0.5) / n as f64);
            for j in 0..n {
                let v2 = dist.quantile_clamped((j as f64 + 0.5) / n as f64);
                hits += run_auction(profile, v1, v2).misallocated() as usize;
            }
        }
        hits as f64 / (n * n) as f64
    }

    #[test]
    fn pooling_outcomes() {
        let profile = pooling();
        let o = run_auction(&profile, 0.9, 0.5);
        assert_eq!((o.d1, o.b1, o.b2), (1.0, 0.9, 0.0));
        assert_eq!(o.winner, Winner::Bidder1);
        assert_eq!(o.price, 0.0);
        assert!((o.payoff1 - 0.68).abs() < 1e-12);
        assert_eq!(o.payoff2, 0.0);
        let o = run_auction(&profile, 0.4, 0.7);
        assert_eq!(o.winner, Winner::Bidder1);
        assert!(o.misallocated());
        // low type stays out, bidder 2 takes the item for free
        let o = run_auction(&profile, 0.1, 0.05);
        assert_eq!(o.winner, Winner::Bidder2);
        assert_eq!(o.price, 0.0);
        assert!(o.misallocated());
    }

    #[test]
    fn simultaneous_outcome() {
        let profile = simultaneous(ValuationDistribution::UNIFORM, 0.15);
        let o = run_auction(&profile, 0.8, 0.3);
        assert_eq!(o.winner, Winner::Bidder1);
        let price = 0.3 - 0.15 * (1.0 - (-2.0f64).exp());
        assert!((o.price - price).abs() < 1e-12);
        assert!((price - 0.170300).abs() < 1e-6);
        assert!((o.payoff2 + 0.15 * price).abs() < 1e-12);
        assert!((o.payoff1 - (0.8 - price - 0.15 * o.d1)).abs() < 1e-12);
        assert!((o.welfare - (0.8 - 0.15 * (o.d1 + o.d2))).abs() < 1e-12);
    }

    #[test]
    fn outcome_accounting() {
        let profile = Sequential::sqrt(0.15).unwrap();
        for (v1, v2) in [(0.1, 0.9), (0.5, 0.3), (0.95, 0.99), (0.3, 0.31)] {
            let o = run_auction(&profile, v1, v2);
            let c = 0.15;
            let (pay_w, pay_l, v_w, d_w, d_l) = match o.winner {
                Winner::Bidder1 => (o.payoff1, o.payoff2, v1, o.d1, o.d2),
                Winner::Bidder2 => (o.payoff2, o.payoff1, v2, o.d2, o.d1),
                Winner::None => continue,
            };
            assert!((pay_w - (v_w - o.price - c * d_w)).abs() < 1e-12);
            assert!((pay_l + c * d_l).abs() < 1e-12);
            assert!(o.price <= o.b1.max(o.b2));
            assert!(o.price <= o.welfare + c * (o.d1 + o.d2) + 1e-12);
        }
    }

    #[test]
    fn simultaneous_allocation_is_efficient() {
        for dist in [ValuationDistribution::SQRT, ValuationDistribution::UNIFORM, ValuationDistribution::QUADRATIC] {
            let profile = simultaneous(dist, 0.15);
            let m = monte_carlo(&profile, 200_000, 1);
            assert_eq!(m.misallocation_prob, 0.0);
            assert_eq!(m.misallocation_stderr, 0.0);
            assert!(m.expected_deposit_waste.abs() < 1e-15);
            assert!(misallocation_quadrature(&profile).abs() < 1e-12);
        }
    }

    #[test]
    fn pooling_misallocation_quadrature_and_monte_carlo() {
        let profile = pooling();
        let q = misallocation_quadrature(&profile);
        assert!((q - grid_misallocation(&profile, 2000)).abs() < 2e-3, "{q}");
        let m = monte_carlo(&profile, 1_000_000, 42);
        assert!((m.misallocation_prob - q).abs() < 3.0 * m.misallocation_stderr, "{m:?} vs {q}");
        assert!(q > 0.0);
        // regression value, reproduced by an independent one-dimensional quadrature
        assert!((q - 0.282173029).abs() < 1e-6, "{q}");
    }

    #[test]
    fn sequential_misallocation_quadrature_matches_grid() {
        for profile in [Sequential::sqrt(0.15).unwrap(), Sequential::uniform(0.15).unwrap()] {
            let q = misallocation_quadrature(&profile);
            let g = grid_misallocation(&profile, 2000);
            assert!((q - g).abs() < 2e-3, "{}: {q} vs {g}", profile.name());
        }
    }

    #[test]
    fn over_depositing_is_wasteful() {
        let m = monte_carlo(&Sequential::sqrt(0.15).unwrap(), 100_000, 3);
        assert!(m.expected_deposit_waste > 0.0);
    }

    #[test]
    fn seed_determinism() {
        let profile = pooling();
        assert_eq!(monte_carlo(&profile, 100_000, 9), monte_carlo(&profile, 100_000, 9));
        assert_ne!(monte_carlo(&profile, 100_000, 9), monte_carlo(&profile, 100_000, 10));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| monte_carlo(&profile, 100_000, 9));
        assert_eq!(single, monte_carlo(&profile, 100_000, 9));
    }

    #[test]
    fn stderr_halves_with_four_times_the_draws() {
        let profile = pooling();
        let a = monte_carlo(&profile, 1_000_000, 5).misallocation_stderr;
        let b = monte_carlo(&profile, 4_000_000, 5).misallocation_stderr;
        assert!((a / b - 2.0).abs() < 0.2, "{a} / {b}");
    }

    #[test]
    fn pooling_wastes_more_than_simultaneous() {
        let pool = monte_carlo(&pooling(), 400_000, 11);
        let sim = monte_carlo(&simultaneous(ValuationDistribution::QUADRATIC, 0.22), 400_000, 11);
        assert!(pool.expected_welfare < sim.expected_welfare);
        assert!(pool.bidder1_entry_rate < 1.0 && pool.bidder2_entry_rate < 1.0);
    }
}
