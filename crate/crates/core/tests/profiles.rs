use deposit_auction::verify::{Pooling, Sequential, Simultaneous};
use deposit_auction::{
    misallocation_quadrature, monte_carlo, run_auction, solve_marginal_types, verify, SimultaneousEquilibrium,
    StrategyProfile, ValuationDistribution, VerifyConfig, Winner,
};
use proptest::prelude::*;

fn boxed_profiles() -> Vec<Box<dyn StrategyProfile>> {
    vec![
        Box::new(Pooling::new(solve_marginal_types(0.22).unwrap())),
        Box::new(Sequential::sqrt(0.15).unwrap()),
        Box::new(Sequential::uniform(0.15).unwrap()),
        Box::new(Simultaneous::new(
            SimultaneousEquilibrium::solve(ValuationDistribution::QUADRATIC, 0.22, 1e-4).unwrap(),
        )),
    ]
}

#[test]
fn boxed_profiles_behave_like_their_contents() {
    let direct = Pooling::new(solve_marginal_types(0.22).unwrap());
    let boxed: Box<dyn StrategyProfile> = Box::new(Pooling::new(solve_marginal_types(0.22).unwrap()));
    assert_eq!(verify(&direct, VerifyConfig::default()), verify(&boxed, VerifyConfig::default()));
    assert_eq!(monte_carlo(&direct, 10_000, 1), monte_carlo(&boxed, 10_000, 1));
    assert_eq!(misallocation_quadrature(&direct), misallocation_quadrature(&boxed));
}

#[test]
fn misallocation_is_a_probability() {
    for p in boxed_profiles() {
        let q = misallocation_quadrature(&p);
        assert!((-1e-12..=1.0).contains(&q), "{}: {q}", p.name());
    }
}

proptest! {
    #[test]
    fn deposits_cover_bids_and_payments_are_bounded(v1 in 0.0f64..=1.0, v2 in 0.0f64..=1.0) {
        for p in boxed_profiles() {
            let o = run_auction(&p, v1, v2);
            prop_assert!(o.b1 <= o.d1 + 1e-15 && o.b2 <= o.d2 + 1e-15);
            prop_assert!(o.price >= 0.0);
            match o.winner {
                Winner::Bidder1 => prop_assert!(o.price <= o.b1),
                Winner::Bidder2 => prop_assert!(o.price <= o.b2),
                Winner::None => prop_assert_eq!(o.price, 0.0),
            }
        }
    }

    #[test]
    fn deposits_are_monotone_in_type(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        for p in boxed_profiles() {
            prop_assert!(p.bidder1_deposit(lo) <= p.bidder1_deposit(hi) + 1e-12, "{}", p.name());
        }
    }
}
