use chrono::{Duration, Timelike};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::TimelineSpec;
use crate::error::{Error, Result};
use crate::market::{Instant, PriceBar, PRE_WINDOW_MINUTES};

/// Minutes of bars generated before the pre-event window opens.
pub const LEAD_MINUTES: i64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceSpec {
    pub base_price: f64,
    /// Standard deviation of one-minute log returns.
    pub per_minute_vol: f64,
    /// Log drift added to each one-minute return inside the Q&A window.
    pub drift_during_qa: f64,
    /// Volatility multiplier for returns after the conference ends.
    pub vol_after_factor: f64,
}

impl PriceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_price > 0.0) || !(self.per_minute_vol >= 0.0) || !(self.vol_after_factor >= 0.0) {
            return Err(Error::Scenario(format!("invalid price spec {self:?}")));
        }
        if !self.drift_during_qa.is_finite() {
            return Err(Error::Scenario("drift must be finite".into()));
        }
        Ok(())
    }
}

/// Population parameters per window, for checking estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceTruth {
    pub qa_minutes: i64,
    pub expected_r_d: f64,
    pub vol_before: f64,
    pub vol_after: f64,
}

fn on_minute(t: &Instant) -> bool {
    t.second() == 0 && t.nanosecond() == 0
}

/// One-minute geometric random walk covering `[tau1 - 30 min, tau4]`.
pub fn gen_price_series(
    spec: &PriceSpec,
    timeline: &TimelineSpec,
    rng: &mut impl Rng,
) -> Result<(Vec<PriceBar>, PriceTruth)> {
    spec.validate()?;
    timeline.validate()?;
    let tau2 = timeline.qa_start;
    let tau3 = timeline.conference_end;
    let tau4 = timeline.trading_close;
    let start = tau2 - Duration::minutes(PRE_WINDOW_MINUTES + LEAD_MINUTES);
    let minutes = (tau4 - start).num_minutes();

    let mut log_level = 0.0f64;
    let mut prev = start;
    let mut bars = vec![PriceBar {
        timestamp: start,
        price: spec.base_price,
    }];
    for m in 1..=minutes {
        let t = start + Duration::minutes(m);
        let mut r = 0.0;
        if prev >= tau2 && t <= tau3 {
            r += spec.drift_during_qa;
        }
        let vol = if prev >= tau3 {
            spec.per_minute_vol * spec.vol_after_factor
        } else {
            spec.per_minute_vol
        };
        if vol > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            r += vol * z;
        }
        log_level += r;
        bars.push(PriceBar {
            timestamp: t,
            price: spec.base_price * log_level.exp(),
        });
        prev = t;
    }
    let qa_minutes = (tau3 - tau2).num_minutes();
    Ok((
        bars,
        PriceTruth {
            qa_minutes,
            expected_r_d: spec.drift_during_qa * qa_minutes as f64,
            vol_before: spec.per_minute_vol,
            vol_after: spec.per_minute_vol * spec.vol_after_factor,
        },
    ))
}

pub(super) fn check_timeline(t: &TimelineSpec) -> Result<()> {
    if !(t.qa_start < t.conference_end && t.conference_end < t.trading_close) {
        return Err(Error::Scenario("timeline must satisfy qa_start < conference_end < trading_close".into()));
    }
    if ![t.qa_start, t.conference_end, t.trading_close].iter().all(on_minute) {
        return Err(Error::Scenario("timeline instants must fall on whole minutes".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{build_timeline, event_window_stats, PriceSeries};
    use chrono::DateTime;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn timeline() -> TimelineSpec {
        let t = |hm: &str| DateTime::parse_from_rfc3339(&format!("2013-06-19T{hm}:00-04:00")).unwrap();
        TimelineSpec { qa_start: t("14:40"), conference_end: t("15:25"), trading_close: t("16:00") }
    }

    fn stats(spec: PriceSpec, seed: u64) -> crate::market::EventWindowStats {
        let tl = timeline();
        let (bars, _) = gen_price_series(&spec, &tl, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let series = PriceSeries::new(bars).unwrap();
        let t = build_timeline(tl.qa_start, tl.conference_end, tl.trading_close).unwrap();
        event_window_stats("x", &series, &t).unwrap()
    }

    #[test]
    fn flat_path_has_zero_stats() {
        let s = stats(PriceSpec { base_price: 1500.0, per_minute_vol: 0.0, drift_during_qa: 0.0, vol_after_factor: 1.0 }, 1);
        assert_eq!((s.r_d, s.r_a, s.sigma_b, s.sigma_a), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn drift_only_gives_exact_return() {
        let drift = 1e-4;
        let s = stats(PriceSpec { base_price: 1500.0, per_minute_vol: 0.0, drift_during_qa: drift, vol_after_factor: 1.0 }, 1);
        assert!((s.r_d - drift * 45.0).abs() < 1e-12);
        assert!(s.r_a.abs() < 1e-12);
    }

    #[test]
    fn planted_drift_shows_in_during_window() {
        let s = stats(PriceSpec { base_price: 1500.0, per_minute_vol: 1e-6, drift_during_qa: 1e-3, vol_after_factor: 1.0 }, 4);
        assert!(s.r_d > 0.04);
        assert!(s.r_a.abs() < 1e-4);
    }

    #[test]
    fn vol_drop_after_conference() {
        let mut ratio = 0.0;
        let seeds = 200;
        for seed in 0..seeds {
            let s = stats(PriceSpec { base_price: 1500.0, per_minute_vol: 5e-4, drift_during_qa: 0.0, vol_after_factor: 0.5 }, seed);
            ratio += s.sigma_a / s.sigma_b;
        }
        let mean = ratio / seeds as f64;
        assert!((mean - 0.5).abs() < 0.03, "mean ratio {mean}");
    }

    #[test]
    fn off_minute_timeline_rejected() {
        let mut tl = timeline();
        tl.qa_start += Duration::seconds(20);
        assert!(check_timeline(&tl).is_err());
    }
}
