use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AgeBucket {
    #[serde(rename = "0-17")]
    Under18,
    #[serde(rename = "18-20")]
    From18To20,
    #[serde(rename = "21-24")]
    From21To24,
    #[serde(rename = "25-34")]
    From25To34,
    #[serde(rename = "35-44")]
    From35To44,
    #[serde(rename = "45-54")]
    From45To54,
    #[serde(rename = "55-64")]
    From55To64,
    #[serde(rename = "65+")]
    Over64,
}

impl AgeBucket {
    pub const ALL: [AgeBucket; 8] = [
        AgeBucket::Under18,
        AgeBucket::From18To20,
        AgeBucket::From21To24,
        AgeBucket::From25To34,
        AgeBucket::From35To44,
        AgeBucket::From45To54,
        AgeBucket::From55To64,
        AgeBucket::Over64,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AgeBucket::Under18 => "0-17",
            AgeBucket::From18To20 => "18-20",
            AgeBucket::From21To24 => "21-24",
            AgeBucket::From25To34 => "25-34",
            AgeBucket::From35To44 => "35-44",
            AgeBucket::From45To54 => "45-54",
            AgeBucket::From55To64 => "55-64",
            AgeBucket::Over64 => "65+",
        }
    }
}

impl fmt::Display for AgeBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Right-closed age buckets: 17 is in `0-17`, 18 in `18-20`.
pub fn bucketize_age(age: u32) -> AgeBucket {
    match age {
        0..=17 => AgeBucket::Under18,
        18..=20 => AgeBucket::From18To20,
        21..=24 => AgeBucket::From21To24,
        25..=34 => AgeBucket::From25To34,
        35..=44 => AgeBucket::From35To44,
        45..=54 => AgeBucket::From45To54,
        55..=64 => AgeBucket::From55To64,
        _ => AgeBucket::Over64,
    }
}

/// Demand-side buyer groups; thousands of seats collapse onto these ten.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BuyerGroup {
    AdNetwork,
    AgencyTradingDesk,
    #[serde(rename = "DSP")]
    Dsp,
    #[serde(rename = "DSPPowered")]
    DspPowered,
    PersonalizedRetargeter,
    Adx,
    Gemini,
    Sidekick,
    YamPlus,
    #[serde(rename = "notag")]
    NoTag,
}

impl BuyerGroup {
    pub const ALL: [BuyerGroup; 10] = [
        BuyerGroup::AdNetwork,
        BuyerGroup::AgencyTradingDesk,
        BuyerGroup::Dsp,
        BuyerGroup::DspPowered,
        BuyerGroup::PersonalizedRetargeter,
        BuyerGroup::Adx,
        BuyerGroup::Gemini,
        BuyerGroup::Sidekick,
        BuyerGroup::YamPlus,
        BuyerGroup::NoTag,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BuyerGroup::AdNetwork => "AdNetwork",
            BuyerGroup::AgencyTradingDesk => "AgencyTradingDesk",
            BuyerGroup::Dsp => "DSP",
            BuyerGroup::DspPowered => "DSPPowered",
            BuyerGroup::PersonalizedRetargeter => "PersonalizedRetargeter",
            BuyerGroup::Adx => "Adx",
            BuyerGroup::Gemini => "Gemini",
            BuyerGroup::Sidekick => "Sidekick",
            BuyerGroup::YamPlus => "YamPlus",
            BuyerGroup::NoTag => "notag",
        }
    }
}

impl fmt::Display for BuyerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Seat id to buyer group. Persisted as a JSON object.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BuyerGroupMap(BTreeMap<String, BuyerGroup>);

impl BuyerGroupMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, seat: impl Into<String>, group: BuyerGroup) {
        self.0.insert(seat.into(), group);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, BuyerGroup)> for BuyerGroupMap {
    fn from_iter<I: IntoIterator<Item = (String, BuyerGroup)>>(iter: I) -> Self {
        BuyerGroupMap(iter.into_iter().collect())
    }
}

/// Unmapped or empty seats fall into `notag`.
pub fn group_buyer_seat(seat_id: &str, map: &BuyerGroupMap) -> BuyerGroup {
    if seat_id.is_empty() {
        return BuyerGroup::NoTag;
    }
    map.0.get(seat_id).copied().unwrap_or(BuyerGroup::NoTag)
}
