use serde::{Deserialize, Serialize};

use super::{RevenueReport, SimError};
use crate::money::SignedMoney;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentDeltas {
    pub effected_high_value: SignedMoney,
    pub effected_low_value: SignedMoney,
    pub uneffected: SignedMoney,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftResult {
    pub absolute_lift: SignedMoney,
    /// `absolute_lift / baseline`, as a fraction.
    pub relative_lift: f64,
    pub segment_deltas: SegmentDeltas,
}

pub fn compute_lift(new: &RevenueReport, baseline: &RevenueReport) -> Result<LiftResult, SimError> {
    if baseline.total_revenue.units() == 0 {
        return Err(SimError::ZeroBaseline);
    }
    let absolute_lift = new.total_revenue - baseline.total_revenue;
    Ok(LiftResult {
        absolute_lift,
        relative_lift: absolute_lift.units() as f64 / baseline.total_revenue.units() as f64,
        segment_deltas: SegmentDeltas {
            effected_high_value: new.effected_high_value.revenue
                - baseline.effected_high_value.revenue,
            effected_low_value: new.effected_low_value.revenue
                - baseline.effected_low_value.revenue,
            uneffected: new.uneffected.revenue - baseline.uneffected.revenue,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::money::Money;

    fn report(units: i64) -> RevenueReport {
        let mut r = RevenueReport::default();
        r.total_revenue = Money::from_units(units).unwrap();
        r.uneffected.revenue = r.total_revenue;
        r
    }

    #[test]
    fn lift_arithmetic() {
        let l = compute_lift(&report(11_000), &report(10_000)).unwrap();
        assert_eq!(l.absolute_lift.units(), 1_000);
        assert_eq!(l.relative_lift, 0.1);
        assert_eq!(l.segment_deltas.uneffected.units(), 1_000);
        let l = compute_lift(&report(9_000), &report(10_000)).unwrap();
        assert_eq!(l.relative_lift, -0.1);
    }

    #[test]
    fn zero_baseline_errors() {
        assert!(matches!(
            compute_lift(&report(5), &report(0)),
            Err(SimError::ZeroBaseline)
        ));
    }
}
