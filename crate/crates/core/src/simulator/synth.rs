//! Seeded synthetic auction logs.
//!
//! Two latent variables drive each auction: `value` (how much buyers want the
//! impression) and `spread` (how far apart the top two bids are). Signal
//! features are noisy functions of the latents, the rest are pure noise.
//! `feature_signal_strength` sets how much of the top bid and of the gap is
//! explained by the latents the features can see.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::auction::{BidPair, StaticReserves};
use crate::featurization::{BuyerGroup, BuyerGroupMap, RawRecord};
use crate::money::Money;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub n_records: usize,
    pub seed: u64,
    /// Probability that the top bid is at or above `high_value_cutoff`.
    pub high_value_fraction: f64,
    pub feature_signal_strength: f64,
    pub high_value_cutoff: Money,
    pub outlier_cap: Money,
    /// Log-normal location/spread of low-value top bids (dollars).
    pub low_log_location: f64,
    pub low_log_spread: f64,
    /// Log-normal location/spread of the excess over the cutoff for high-value top bids.
    pub high_log_location: f64,
    pub high_log_spread: f64,
    /// Mean of the exponential gap fraction `(T - S) / T` at neutral spread.
    pub gap_scale: f64,
    /// Sensitivity of the gap fraction to the spread latent.
    pub gap_signal: f64,
    pub systemwide_reserve: Money,
    pub deal_fraction: f64,
    pub first_record_id: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_records: 100_000,
            seed: 7,
            high_value_fraction: 0.05,
            feature_signal_strength: 0.8,
            high_value_cutoff: Money::whole(10),
            outlier_cap: Money::whole(41),
            low_log_location: 0.2,
            low_log_spread: 0.6,
            high_log_location: 0.9,
            high_log_spread: 0.7,
            gap_scale: 0.35,
            gap_signal: 1.2,
            systemwide_reserve: Money::from_units(500).expect("positive"),
            deal_fraction: 0.03,
            first_record_id: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let prob = |v: f64| (0.0..=1.0).contains(&v);
        if !(self.high_value_fraction > 0.0 && self.high_value_fraction < 1.0) {
            return Err(SimError::Config(
                "high_value_fraction must be in (0, 1)".into(),
            ));
        }
        if !prob(self.feature_signal_strength) {
            return Err(SimError::Config(
                "feature_signal_strength must be in [0, 1]".into(),
            ));
        }
        if !prob(self.deal_fraction) {
            return Err(SimError::Config("deal_fraction must be in [0, 1]".into()));
        }
        if self.outlier_cap <= self.high_value_cutoff {
            return Err(SimError::Config(
                "outlier_cap must exceed high_value_cutoff".into(),
            ));
        }
        if self.systemwide_reserve == Money::ZERO {
            return Err(SimError::Config(
                "systemwide_reserve must be positive".into(),
            ));
        }
        if self.low_log_spread <= 0.0 || self.high_log_spread < 0.0 || self.gap_scale <= 0.0 {
            return Err(SimError::Config(
                "spreads and gap scale must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticLogs {
    pub records: Vec<RawRecord>,
    pub buyer_groups: BuyerGroupMap,
}

const AD_SIZES: [&str; 8] = [
    "120x600", "160x600", "300x50", "300x250", "300x600", "320x50", "728x90", "970x250",
];
const POSITIONS: [&str; 4] = ["atf", "btf", "sidebar", "footer"];
const LAYOUTS: [&str; 4] = ["grid", "stream", "article", "gallery"];
const SSP_HOSTS: [&str; 3] = ["ssp-east", "ssp-west", "ssp-intl"];
const GENDERS: [&str; 3] = ["f", "m", "u"];
const DEVICES: [&str; 3] = ["desktop", "phone", "tablet"];
const BROWSERS: [&str; 5] = ["chrome", "edge", "firefox", "safari", "other"];
const COLOS: [&str; 6] = ["bf1", "gq1", "ir2", "ne1", "sg3", "tp2"];
const SITES: usize = 150;
const SECTIONS: usize = 40;
const GEOS: usize = 30;
const SEATS: usize = 60;
/// Seats at or above this index are absent from the group map.
const MAPPED_SEATS: usize = 54;
const DEMAND_SEATS: usize = 80;
const APPS: usize = 20;
const QUERIES: usize = 50;
const DAYS: usize = 28;

/// Standard normal CDF.
pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile by bisection on the CDF.
pub(crate) fn normal_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    fn exp1(&mut self) -> f64 {
        Exp1.sample(&mut self.rng)
    }

    fn uniform(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Mixes `latent` with fresh noise at correlation `rho`.
    fn blend(&mut self, latent: f64, rho: f64) -> f64 {
        rho * latent + (1.0 - rho * rho).sqrt() * self.normal()
    }

    /// Category index in `0..n`, ordered by a noisy copy of `latent`.
    fn latent_category(&mut self, latent: f64, rho: f64, n: usize) -> usize {
        let z = self.blend(latent, rho);
        ((normal_cdf(z) * n as f64) as usize).min(n - 1)
    }

    fn count(&mut self, location: f64, latent: f64, weight: f64) -> u32 {
        let z = self.blend(latent, weight);
        (location + 0.6 * z).exp().floor().min(1e6) as u32
    }

    fn price(&mut self, location: f64, latent: f64, noise: f64, cap: Money) -> Money {
        let dollars = (location + latent + noise * self.normal()).exp();
        Money::from_dollars(dollars)
            .expect("finite positive")
            .min(cap)
    }
}

/// Generates `config.n_records` auctions. Identical configs yield identical logs.
pub fn generate_synthetic_logs(config: &SyntheticConfig) -> Result<SyntheticLogs, SimError> {
    config.validate()?;
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
    };

    let mut site_names: Vec<String> = (0..SITES).map(|i| format!("site{i:03}.com")).collect();
    site_names.shuffle(&mut g.rng);
    let buyer_groups: BuyerGroupMap = (0..MAPPED_SEATS)
        .map(|k| {
            (
                format!("seat-{k:03}"),
                BuyerGroup::ALL[k * 9 / MAPPED_SEATS],
            )
        })
        .collect();

    let s = config.feature_signal_strength;
    let noise = (1.0 - s * s).sqrt();
    let q = normal_quantile(1.0 - config.high_value_fraction);
    let cutoff = config.high_value_cutoff;
    let cap = config.outlier_cap;

    let mut records = Vec::with_capacity(config.n_records);
    for i in 0..config.n_records {
        let value = g.normal();
        let spread = g.normal();

        let z = s * value + noise * g.normal();
        let top = if z > q {
            let excess =
                (config.high_log_location + config.high_log_spread * g.blend(value, s)).exp();
            (cutoff + Money::from_dollars(excess).expect("finite")).min(cap)
        } else {
            loop {
                let t = (config.low_log_location + config.low_log_spread * g.blend(value, s)).exp();
                let t = Money::from_dollars(t).expect("finite");
                if t < cutoff && t > Money::ZERO {
                    break t;
                }
            }
        };
        let w = s * spread + noise * g.normal();
        let gap_fraction = (config.gap_scale * g.exp1() * (config.gap_signal * w).exp()).min(0.95);
        let second_units = (top.units() as f64 * (1.0 - gap_fraction)).round() as i64;
        let second = Money::from_units(second_units.clamp(0, top.units())).expect("non-negative");
        let bids = BidPair::new(top, second).expect("second <= top");

        let size_idx = g.latent_category(value, 0.7, AD_SIZES.len());
        let position = g.latent_category(value, 0.5, POSITIONS.len());
        let site = g.latent_category(value, 0.6, SITES);
        let seat = g.latent_category(spread, 0.7, SEATS);
        let demand_seat = g.latent_category(spread, 0.5, DEMAND_SEATS);
        let device = g.latent_category(spread, 0.3, DEVICES.len());
        let age = 13 + g.latent_category(value, 0.4, 62) as u32;
        let hour = g.latent_category(value, 0.3, 24) as u8;

        let n_clearing = 1 + g.uniform(8);
        let prev_clearing_prices: Vec<Money> = (0..n_clearing)
            .map(|_| g.price(0.4, 0.8 * value, 0.15, cap))
            .collect();
        let n_wins = g.uniform(5);
        let prev_win_stats: Vec<Money> = (0..n_wins)
            .map(|_| g.price(0.0, 0.6 * spread + 0.3 * value, 0.35, cap))
            .collect();

        let page_views = g.count(1.5, value, 0.5);
        let visit_count = g.count(1.0, value, 0.3);
        let impressions = g.count(2.5, value, 0.2);
        let clicks = g.count(-0.5, spread, 0.2);

        let uniform = size_idx
            .is_multiple_of(2)
            .then(|| Money::from_units(1_000 + 500 * size_idx as i64).expect("positive"));
        let deal = if g.rng.random_bool(config.deal_fraction) {
            Some(Money::from_dollars(g.rng.random_range(0.5..3.0)).expect("finite"))
        } else {
            None
        };
        let reserves = StaticReserves::new(config.systemwide_reserve, uniform, deal)
            .expect("positive systemwide");

        let app = g.uniform(APPS + 1);
        let query = g.uniform(QUERIES * 2);
        records.push(RawRecord {
            record_id: config.first_record_id + i as u64,
            ad_section: format!("sec-{:02}", g.uniform(SECTIONS)),
            site_tld: site_names[site].clone(),
            layout: LAYOUTS[g.uniform(LAYOUTS.len())].to_string(),
            ad_size: AD_SIZES[size_idx].to_string(),
            ssp_host: SSP_HOSTS[g.uniform(SSP_HOSTS.len())].to_string(),
            ad_position: POSITIONS[position].to_string(),
            age,
            gender: GENDERS[g.uniform(GENDERS.len())].to_string(),
            device_type: DEVICES[device].to_string(),
            geo: format!("geo-{:02}", g.uniform(GEOS)),
            app_info: if app == APPS {
                String::new()
            } else {
                format!("app-{app:02}")
            },
            browser: BROWSERS[g.uniform(BROWSERS.len())].to_string(),
            colo: COLOS[g.uniform(COLOS.len())].to_string(),
            page_views,
            prev_clearing_prices,
            visit_count,
            impressions,
            clicks,
            prev_win_stats,
            search_query: if query < QUERIES {
                format!("q{query:02}")
            } else {
                String::new()
            },
            buyer_seat: format!("seat-{seat:03}"),
            winning_demand_seat: format!("dseat-{demand_seat:02}"),
            date: format!("2016-02-{:02}", 1 + g.uniform(DAYS)),
            hour,
            dow: g.uniform(7) as u8,
            bids,
            reserves,
        });
    }
    Ok(SyntheticLogs {
        records,
        buyer_groups,
    })
}
