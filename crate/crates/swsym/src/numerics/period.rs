//! Period estimation from mean-crossing spacings.

use thiserror::Error;

use crate::numerics::rk::TimeSeries;

#[derive(Debug, Error)]
pub enum PeriodError {
    #[error("state `{0}` not present in the series")]
    UnknownState(String),
    #[error("non-oscillatory input: only {0} sign changes about the mean")]
    NonOscillatory(usize),
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PeriodEstimate {
    pub period: f64,
    pub std_dev: f64,
    pub crossings: usize,
}

/// Mean spacing of upward mean-crossings of one state column.
pub fn period_estimate(ts: &TimeSeries, state: &str) -> Result<PeriodEstimate, PeriodError> {
    let col = ts
        .column(state)
        .ok_or_else(|| PeriodError::UnknownState(state.to_string()))?;
    let mean = col.iter().sum::<f64>() / col.len() as f64;
    let mut sign_changes = 0usize;
    let mut upward: Vec<f64> = Vec::new();
    for i in 1..col.len() {
        let a = col[i - 1] - mean;
        let b = col[i] - mean;
        if a == 0.0 {
            continue;
        }
        if a * b < 0.0 {
            sign_changes += 1;
            if b > 0.0 {
                // linear interpolation of the crossing time
                let t = ts.times[i - 1] + (ts.times[i] - ts.times[i - 1]) * (-a) / (b - a);
                upward.push(t);
            }
        }
    }
    if sign_changes < 3 || upward.len() < 2 {
        return Err(PeriodError::NonOscillatory(sign_changes));
    }
    let spacings: Vec<f64> = upward.windows(2).map(|w| w[1] - w[0]).collect();
    let n = spacings.len() as f64;
    let mean_sp = spacings.iter().sum::<f64>() / n;
    let var = spacings
        .iter()
        .map(|s| (s - mean_sp) * (s - mean_sp))
        .sum::<f64>()
        / n;
    Ok(PeriodEstimate {
        period: mean_sp,
        std_dev: var.sqrt(),
        crossings: sign_changes,
    })
}

/// Count of sign changes about the mean, for oscillation checks.
pub fn mean_crossings(ts: &TimeSeries, state: &str) -> Result<usize, PeriodError> {
    let col = ts
        .column(state)
        .ok_or_else(|| PeriodError::UnknownState(state.to_string()))?;
    let mean = col.iter().sum::<f64>() / col.len() as f64;
    let mut changes = 0usize;
    for i in 1..col.len() {
        let a = col[i - 1] - mean;
        let b = col[i] - mean;
        if a != 0.0 && a * b < 0.0 {
            changes += 1;
        }
    }
    Ok(changes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rk::Stats;

    fn cosine_series() -> TimeSeries {
        let times: Vec<f64> = (0..2001).map(|i| 20.0 * i as f64 / 2000.0).collect();
        let states: Vec<Vec<f64>> = times.iter().map(|t| vec![t.cos()]).collect();
        TimeSeries {
            state_names: vec!["V".into()],
            times,
            states,
            events: vec![],
            stats: Stats::default(),
        }
    }

    #[test]
    fn cosine_period() {
        let ts = cosine_series();
        let est = period_estimate(&ts, "V").unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        assert!((est.period - tau).abs() / tau < 0.01, "period {}", est.period);
    }

    #[test]
    fn flat_input_is_non_oscillatory() {
        let times: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let states: Vec<Vec<f64>> = times.iter().map(|t| vec![*t]).collect();
        let ts = TimeSeries {
            state_names: vec!["V".into()],
            times,
            states,
            events: vec![],
            stats: Stats::default(),
        };
        assert!(matches!(
            period_estimate(&ts, "V"),
            Err(PeriodError::NonOscillatory(_))
        ));
    }
}
