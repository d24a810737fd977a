//! Reserve price recommendation for second-price ad auctions.
//!
//! A separation classifier and a boosted high-value cascade decide which
//! auctions get a raised hard reserve; a one-vs-rest bucket predictor decides
//! how high. The simulator replays auction logs to measure revenue lift over
//! the static reserves.

pub mod auction;
pub mod boosting;
pub mod cascade;
pub mod featurization;
pub mod money;
pub mod policy;
pub mod simulator;

pub use auction::{
    effective_static_reserve, transaction_revenue, transaction_revenue_soft, AuctionError,
    AuctionOutcome, BidPair, StaticReserves,
};
pub use money::{Money, MoneyError, SignedMoney};
