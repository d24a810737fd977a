//! Second-price auction outcomes under hard and soft reserves.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::money::Money;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuctionError {
    #[error("top bid {top} is below second bid {second}")]
    InvertedBids { top: Money, second: Money },
    #[error("systemwide reserve must be positive")]
    ZeroSystemwide,
    #[error("hard reserve {hard} exceeds soft reserve {soft}")]
    HardAboveSoft { hard: Money, soft: Money },
}

/// The two highest bids of an auction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BidPair {
    top: Money,
    second: Money,
}

impl BidPair {
    pub fn new(top: Money, second: Money) -> Result<Self, AuctionError> {
        if top < second {
            return Err(AuctionError::InvertedBids { top, second });
        }
        Ok(BidPair { top, second })
    }

    pub fn top(&self) -> Money {
        self.top
    }

    pub fn second(&self) -> Money {
        self.second
    }

    /// `top - second`, never negative.
    pub fn gap(&self) -> Money {
        self.top.saturating_sub(self.second)
    }
}

impl<'de> Deserialize<'de> for BidPair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            top: Money,
            second: Money,
        }
        let raw = Raw::deserialize(deserializer)?;
        BidPair::new(raw.top, raw.second).map_err(serde::de::Error::custom)
    }
}

/// Static hard reserves configured on the exchange.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StaticReserves {
    systemwide: Money,
    #[serde(skip_serializing_if = "Option::is_none")]
    uniform: Option<Money>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deal: Option<Money>,
}

impl StaticReserves {
    pub fn new(
        systemwide: Money,
        uniform: Option<Money>,
        deal: Option<Money>,
    ) -> Result<Self, AuctionError> {
        if systemwide == Money::ZERO {
            return Err(AuctionError::ZeroSystemwide);
        }
        Ok(StaticReserves {
            systemwide,
            uniform,
            deal,
        })
    }

    pub fn systemwide(&self) -> Money {
        self.systemwide
    }

    pub fn uniform(&self) -> Option<Money> {
        self.uniform
    }

    pub fn deal(&self) -> Option<Money> {
        self.deal
    }
}

impl<'de> Deserialize<'de> for StaticReserves {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            systemwide: Money,
            #[serde(default)]
            uniform: Option<Money>,
            #[serde(default)]
            deal: Option<Money>,
        }
        let raw = Raw::deserialize(deserializer)?;
        StaticReserves::new(raw.systemwide, raw.uniform, raw.deal).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuctionOutcome {
    pub sold: bool,
    pub clearing_price: Money,
    /// Unsold because the reserve exceeded the top bid.
    pub blocked: bool,
}

impl AuctionOutcome {
    pub fn sold_at(price: Money) -> Self {
        AuctionOutcome {
            sold: true,
            clearing_price: price,
            blocked: false,
        }
    }

    pub fn blocked() -> Self {
        AuctionOutcome {
            sold: false,
            clearing_price: Money::ZERO,
            blocked: true,
        }
    }

    /// Seller revenue; zero when unsold.
    pub fn revenue(&self) -> Money {
        self.clearing_price
    }
}

/// The binding static reserve: the maximum of all configured ones.
pub fn effective_static_reserve(reserves: &StaticReserves) -> Money {
    [Some(reserves.systemwide), reserves.uniform, reserves.deal]
        .into_iter()
        .flatten()
        .max()
        .unwrap_or(reserves.systemwide)
}

/// Second-price outcome under a hard reserve `r`.
///
/// The sale goes through when `r <= top` and clears at `max(second, r)`.
pub fn transaction_revenue(reserve: Money, bids: BidPair) -> AuctionOutcome {
    if reserve > bids.top {
        AuctionOutcome::blocked()
    } else {
        AuctionOutcome::sold_at(bids.second.max(reserve))
    }
}

/// Outcome with a hard reserve below a soft reserve. Between the two the
/// winner pays its own bid; above the soft reserve it is a price support.
pub fn transaction_revenue_soft(
    hard: Money,
    soft: Money,
    bids: BidPair,
) -> Result<AuctionOutcome, AuctionError> {
    if hard > soft {
        return Err(AuctionError::HardAboveSoft { hard, soft });
    }
    let outcome = if bids.top < hard {
        AuctionOutcome::blocked()
    } else if bids.top < soft {
        AuctionOutcome::sold_at(bids.top)
    } else {
        AuctionOutcome::sold_at(bids.second.max(soft))
    };
    Ok(outcome)
}
