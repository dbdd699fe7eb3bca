//! Equilibrium deposits in a two-bidder second-price auction where every
//! bid must be backed by a costly deposit that the other bidder can see.
//!
//! - [`dist`]: power-family valuation priors `F(x) = x^α`.
//! - [`numerics`]: ODE marching, root finding, quadrature, 1-D maximization.
//! - [`simultaneous`]: symmetric deposit function when both bidders move at once.
//! - [`sequential`]: closed-form equilibria when bidder 2 sees bidder 1's deposit.
//! - [`pooling`]: the two-level pooling equilibrium under the quadratic prior.
//! - [`verify`]: numerical check of best responses and beliefs for any profile.
//! - [`sim`]: Monte Carlo outcomes and exact misallocation probabilities.

pub mod dist;
pub mod numerics;
pub mod pooling;
pub mod sequential;
pub mod sim;
pub mod simultaneous;
pub mod verify;

pub use dist::{DistError, ValuationDistribution, ValuationPrior};
pub use numerics::{Curve, NumericsError};
pub use pooling::{solve_marginal_types, PoolingError, PoolingParams};
pub use sequential::{Belief, SequentialEquilibrium, SequentialError};
pub use sim::{misallocation_quadrature, monte_carlo, run_auction, AuctionOutcome, MonteCarloMetrics, Winner};
pub use simultaneous::{SimultaneousEquilibrium, SimultaneousError};
pub use verify::{verify, StrategyProfile, VerificationReport, VerifyConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Simultaneous(#[from] SimultaneousError),
    #[error(transparent)]
    Sequential(#[from] SequentialError),
    #[error(transparent)]
    Pooling(#[from] PoolingError),
}
