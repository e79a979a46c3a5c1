//! Event timeline and intraday return / realized-volatility windows on
//! one-minute index bars.

use chrono::{DateTime, Duration, FixedOffset, NaiveTime, TimeZone};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Instant = DateTime<FixedOffset>;

/// Minutes between the start of the pre-event volatility window and the
/// start of the Q&A.
pub const PRE_WINDOW_MINUTES: i64 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceBar {
    pub timestamp: Instant,
    pub price: f64,
}

/// Bars with strictly increasing timestamps and positive prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    bars: Vec<PriceBar>,
}

impl PriceSeries {
    pub fn new(bars: Vec<PriceBar>) -> Result<Self> {
        if let Some(b) = bars.iter().find(|b| !(b.price > 0.0 && b.price.is_finite())) {
            return Err(Error::Structural(format!(
                "bar at {} has non-positive price {}",
                b.timestamp.to_rfc3339(),
                b.price
            )));
        }
        if let Some(w) = bars.windows(2).find(|w| w[1].timestamp <= w[0].timestamp) {
            return Err(Error::Structural(format!(
                "bar timestamps not strictly increasing at {}",
                w[1].timestamp.to_rfc3339()
            )));
        }
        Ok(Self { bars })
    }

    pub fn bars(&self) -> &[PriceBar] {
        &self.bars
    }

    /// Index of the latest bar at or before `t`.
    fn index_at(&self, t: Instant) -> Option<usize> {
        self.bars.partition_point(|b| b.timestamp <= t).checked_sub(1)
    }

    /// Price of the latest bar at or before `t`.
    pub fn price_at(&self, t: Instant) -> Result<f64> {
        self.index_at(t)
            .map(|i| self.bars[i].price)
            .ok_or_else(|| Error::Coverage(format!("no bar at or before {}", t.to_rfc3339())))
    }

    /// `ln(P(t_to) / P(t_from))`.
    pub fn window_log_return(&self, t_from: Instant, t_to: Instant) -> Result<f64> {
        if t_from >= t_to {
            return Err(Error::Structural(format!(
                "return window [{}, {}] is empty",
                t_from.to_rfc3339(),
                t_to.to_rfc3339()
            )));
        }
        Ok((self.price_at(t_to)? / self.price_at(t_from)?).ln())
    }

    /// One-minute log returns whose both endpoints lie in `(t_from, t_to]`.
    pub fn window_returns(&self, t_from: Instant, t_to: Instant) -> Vec<f64> {
        let lo = self.bars.partition_point(|b| b.timestamp <= t_from);
        let hi = self.bars.partition_point(|b| b.timestamp <= t_to);
        if hi <= lo {
            return Vec::new();
        }
        self.bars[lo..hi]
            .windows(2)
            .map(|w| (w[1].price / w[0].price).ln())
            .collect()
    }

    /// Root mean square of the window's one-minute log returns (no mean
    /// removal, no annualisation).
    pub fn realized_vol(&self, t_from: Instant, t_to: Instant) -> Result<RealizedVol> {
        let r = self.window_returns(t_from, t_to);
        if r.is_empty() {
            return Err(Error::Coverage(format!(
                "no one-minute returns inside ({}, {}]",
                t_from.to_rfc3339(),
                t_to.to_rfc3339()
            )));
        }
        let ms = r.iter().map(|x| x * x).sum::<f64>() / r.len() as f64;
        Ok(RealizedVol {
            sigma: ms.sqrt(),
            returns: r.len(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizedVol {
    pub sigma: f64,
    pub returns: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConferenceTimeline {
    pub tau1: Instant,
    pub tau2: Instant,
    pub tau3: Instant,
    pub tau4: Instant,
}

pub fn build_timeline(qa_start: Instant, conference_end: Instant, trading_close: Instant) -> Result<ConferenceTimeline> {
    if !(qa_start < conference_end && conference_end < trading_close) {
        return Err(Error::Config(format!(
            "timeline out of order: Q&A start {}, conference end {}, close {}",
            qa_start.to_rfc3339(),
            conference_end.to_rfc3339(),
            trading_close.to_rfc3339()
        )));
    }
    Ok(ConferenceTimeline {
        tau1: qa_start - Duration::minutes(PRE_WINDOW_MINUTES),
        tau2: qa_start,
        tau3: conference_end,
        tau4: trading_close,
    })
}

/// The trading close on the calendar day of `on`, in `on`'s offset.
pub fn close_on_day(on: Instant, close: NaiveTime) -> Result<Instant> {
    on.offset()
        .from_local_datetime(&on.date_naive().and_time(close))
        .single()
        .ok_or_else(|| Error::Config(format!("cannot place close {close} on {}", on.to_rfc3339())))
}

pub fn parse_close(s: &str) -> Result<NaiveTime> {
    NaiveTime::parse_from_str(s, "%H:%M")
        .map_err(|e| Error::Config(format!("trading close {s:?} is not HH:MM: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventWindowStats {
    pub conference_id: String,
    pub r_d: f64,
    pub r_a: f64,
    pub sigma_b: f64,
    pub sigma_a: f64,
    pub vol_change: f64,
    pub returns_before: usize,
    pub returns_after: usize,
}

pub fn event_window_stats(
    conference_id: &str,
    series: &PriceSeries,
    timeline: &ConferenceTimeline,
) -> Result<EventWindowStats> {
    let named = |window: &'static str| {
        move |e: Error| match e {
            Error::Coverage(m) => Error::Coverage(format!("{conference_id} {window}: {m}")),
            other => other,
        }
    };
    let (first, last) = match (series.bars.first(), series.bars.last()) {
        (Some(f), Some(l)) => (f.timestamp, l.timestamp),
        _ => return Err(Error::Coverage(format!("{conference_id}: empty price series"))),
    };
    if first > timeline.tau1 {
        return Err(named("pre-event window (tau1, tau2]")(Error::Coverage(format!(
            "first bar {} is after {}",
            first.to_rfc3339(),
            timeline.tau1.to_rfc3339()
        ))));
    }
    if last < timeline.tau4 {
        return Err(named("after window [tau3, tau4]")(Error::Coverage(format!(
            "last bar {} is before {}",
            last.to_rfc3339(),
            timeline.tau4.to_rfc3339()
        ))));
    }
    let r_d = series
        .window_log_return(timeline.tau2, timeline.tau3)
        .map_err(named("during window [tau2, tau3]"))?;
    let r_a = series
        .window_log_return(timeline.tau3, timeline.tau4)
        .map_err(named("after window [tau3, tau4]"))?;
    let before = series
        .realized_vol(timeline.tau1, timeline.tau2)
        .map_err(named("pre-event volatility window (tau1, tau2]"))?;
    let after = series
        .realized_vol(timeline.tau3, timeline.tau4)
        .map_err(named("post-event volatility window (tau3, tau4]"))?;
    Ok(EventWindowStats {
        conference_id: conference_id.to_string(),
        r_d,
        r_a,
        sigma_b: before.sigma,
        sigma_a: after.sigma,
        vol_change: after.sigma - before.sigma,
        returns_before: before.returns,
        returns_after: after.returns,
    })
}
