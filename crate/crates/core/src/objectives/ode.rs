//! Fixed-step RK4 simulation, weighted least-squares fitting error, and the
//! time-series CSV format.

use std::io::{Read, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::direct::Bounds;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("state became non-finite after {:.1}% of the horizon", fraction * 100.0)]
    NonFiniteState { fraction: f64 },
    #[error("time grid must be strictly increasing with at least one point")]
    BadTimes,
    #[error("expected {expected} parameters, got {got}")]
    ParamDimension { expected: usize, got: usize },
    #[error("channel mismatch: {0}")]
    ChannelMismatch(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed time series: {0}")]
    Malformed(String),
}

/// Right-hand side `dy/dt = f(t, y, params)`, written into the last slot.
pub type OdeRhs = Arc<dyn Fn(f64, &[f64], &[f64], &mut [f64]) + Send + Sync>;

#[derive(Clone)]
pub struct OdeProblem {
    pub state_dim: usize,
    pub rhs: OdeRhs,
    /// State at the first requested time.
    pub y0: Vec<f64>,
    pub param_dim: usize,
    pub param_bounds: Bounds,
}

impl std::fmt::Debug for OdeProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OdeProblem")
            .field("state_dim", &self.state_dim)
            .field("y0", &self.y0)
            .field("param_dim", &self.param_dim)
            .finish_non_exhaustive()
    }
}

/// Named measurement channels sampled on a shared time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesData {
    pub times: Vec<f64>,
    pub channels: Vec<(String, Vec<f64>)>,
}

impl TimeSeriesData {
    pub fn new(times: Vec<f64>, channels: Vec<(String, Vec<f64>)>) -> Result<Self, OdeError> {
        if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(OdeError::BadTimes);
        }
        for (name, v) in &channels {
            if v.len() != times.len() {
                return Err(OdeError::Malformed(format!(
                    "channel {name} has {} values for {} times",
                    v.len(),
                    times.len()
                )));
            }
        }
        Ok(Self { times, channels })
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Header `time,<channel>...`, one row per time point.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), OdeError> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["time".to_string()];
        header.extend(self.channels.iter().map(|(n, _)| n.clone()));
        wtr.write_record(&header)?;
        for (i, t) in self.times.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(self.channels.iter().map(|(_, v)| v[i].to_string()));
            wtr.write_record(&row)?;
        }
        wtr.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, OdeError> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers()?.clone();
        if header.get(0) != Some("time") || header.len() < 2 {
            return Err(OdeError::Malformed(
                "header must be time,<channel>...".into(),
            ));
        }
        let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut times = Vec::new();
        let mut cols = vec![Vec::new(); names.len()];
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |s: &str| -> Result<f64, OdeError> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| OdeError::Malformed(format!("row {}: {s:?}: {e}", line + 2)))
            };
            times.push(parse(&rec[0])?);
            for (c, col) in cols.iter_mut().enumerate() {
                col.push(parse(&rec[c + 1])?);
            }
        }
        Self::new(times, names.into_iter().zip(cols).collect())
    }
}

/// Integration step used for an interval `Δt` on a grid whose smallest
/// spacing is `min_dt`: `h = min_dt / substeps`, rounded so each interval is
/// covered by a whole number of steps.
fn steps_for(dt: f64, min_dt: f64, substeps: usize) -> usize {
    let h = min_dt / substeps as f64;
    ((dt / h) - 1e-9).ceil().max(1.0) as usize
}

/// Classical RK4 with internal step `min(Δt)/20`.
pub fn rk4_integrate(
    problem: &OdeProblem,
    params: &[f64],
    times: &[f64],
) -> Result<TimeSeriesData, OdeError> {
    rk4_integrate_with_substeps(problem, params, times, 20)
}

pub fn rk4_integrate_with_substeps(
    problem: &OdeProblem,
    params: &[f64],
    times: &[f64],
    substeps: usize,
) -> Result<TimeSeriesData, OdeError> {
    if params.len() != problem.param_dim {
        return Err(OdeError::ParamDimension {
            expected: problem.param_dim,
            got: params.len(),
        });
    }
    if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(OdeError::BadTimes);
    }
    let n = problem.state_dim;
    let min_dt = times
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let horizon = times[times.len() - 1] - times[0];

    let mut y = problem.y0.clone();
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(times.len()); n];
    for (c, col) in out.iter_mut().enumerate() {
        col.push(y[c]);
    }
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let rhs = &problem.rhs;

    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let steps = steps_for(dt, min_dt, substeps);
        let h = dt / steps as f64;
        for s in 0..steps {
            let t = w[0] + s as f64 * h;
            rhs(t, &y, params, &mut k1);
            for i in 0..n {
                tmp[i] = y[i] + 0.5 * h * k1[i];
            }
            rhs(t + 0.5 * h, &tmp, params, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + 0.5 * h * k2[i];
            }
            rhs(t + 0.5 * h, &tmp, params, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + h * k3[i];
            }
            rhs(t + h, &tmp, params, &mut k4);
            for i in 0..n {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if y.iter().any(|v| !v.is_finite()) {
                let fraction = if horizon > 0.0 {
                    (t + h - times[0]) / horizon
                } else {
                    1.0
                };
                return Err(OdeError::NonFiniteState {
                    fraction: fraction.clamp(0.0, 1.0),
                });
            }
        }
        for (c, col) in out.iter_mut().enumerate() {
            col.push(y[c]);
        }
    }
    let channels = out
        .into_iter()
        .enumerate()
        .map(|(i, v)| (format!("y{i}"), v))
        .collect();
    Ok(TimeSeriesData {
        times: times.to_vec(),
        channels,
    })
}

/// `Σ_o w_o Σ_t (ŷ_o(t) − y_o(t))²` with `w_o = 1 / mean(y_o)²`, or `w_o = 1`
/// for channels whose data mean is zero.
pub fn weighted_sse(sim: &TimeSeriesData, data: &TimeSeriesData) -> Result<f64, OdeError> {
    if sim.times.len() != data.times.len()
        || sim
            .times
            .iter()
            .zip(&data.times)
            .any(|(a, b)| (a - b).abs() > 1e-9 * b.abs().max(1.0))
    {
        return Err(OdeError::ChannelMismatch("time grids differ".into()));
    }
    if sim.channels.len() != data.channels.len() {
        return Err(OdeError::ChannelMismatch(format!(
            "{} simulated channels vs {} data channels",
            sim.channels.len(),
            data.channels.len()
        )));
    }
    let mut total = 0.0;
    for ((sname, s), (dname, d)) in sim.channels.iter().zip(&data.channels) {
        if sname != dname {
            return Err(OdeError::ChannelMismatch(format!("{sname} vs {dname}")));
        }
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let w = if mean == 0.0 {
            1.0
        } else {
            1.0 / (mean * mean)
        };
        total += w * s.iter().zip(d).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay() -> OdeProblem {
        OdeProblem {
            state_dim: 1,
            rhs: Arc::new(|_, y, p, dy| dy[0] = -p[0] * y[0]),
            y0: vec![1.0],
            param_dim: 1,
            param_bounds: Bounds::uniform(1, 0.1, 2.0).unwrap(),
        }
    }

    fn series(v: Vec<f64>) -> TimeSeriesData {
        let times = (0..v.len()).map(|i| i as f64).collect();
        TimeSeriesData::new(times, vec![("a".into(), v)]).unwrap()
    }

    #[test]
    fn zero_rhs_is_constant() {
        let p = OdeProblem {
            state_dim: 2,
            rhs: Arc::new(|_, _, _, dy| dy.fill(0.0)),
            y0: vec![3.0, -1.0],
            param_dim: 0,
            param_bounds: Bounds::uniform(1, 0.0, 1.0).unwrap(),
        };
        let ts = rk4_integrate(&p, &[], &[0.0, 0.5, 2.0]).unwrap();
        assert_eq!(ts.channel("y0").unwrap(), &[3.0, 3.0, 3.0]);
        assert_eq!(ts.channel("y1").unwrap(), &[-1.0, -1.0, -1.0]);
    }

    #[test]
    fn exponential_decay_matches_analytic() {
        let ts = rk4_integrate(&decay(), &[1.0], &[0.0, 1.0]).unwrap();
        assert!((ts.channel("y0").unwrap()[1] - (-1.0f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn non_finite_state_reports_fraction() {
        let p = OdeProblem {
            state_dim: 1,
            rhs: Arc::new(|_, y, _, dy| dy[0] = y[0] * y[0]),
            y0: vec![1.0],
            param_dim: 0,
            param_bounds: Bounds::uniform(1, 0.0, 1.0).unwrap(),
        };
        // Blows up at t = 1.
        match rk4_integrate(&p, &[], &[0.0, 1.0, 2.0, 3.0, 4.0]) {
            Err(OdeError::NonFiniteState { fraction }) => assert!(fraction > 0.2 && fraction < 0.6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sse_perfect_fit_is_zero() {
        let d = series(vec![1.0, 2.0, 3.0]);
        assert_eq!(weighted_sse(&d, &d).unwrap(), 0.0);
    }

    #[test]
    fn sse_constant_offset_counts_points() {
        let c = 2.5;
        let data = series(vec![c; 7]);
        let sim = series(vec![2.0 * c; 7]);
        assert!((weighted_sse(&sim, &data).unwrap() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn sse_scale_invariant_per_channel() {
        let data = series(vec![1.0, 3.0, 2.0]);
        let sim = series(vec![1.5, 2.0, 2.5]);
        let base = weighted_sse(&sim, &data).unwrap();
        let scale =
            |ts: &TimeSeriesData, a: f64| series(ts.channels[0].1.iter().map(|v| v * a).collect());
        let scaled = weighted_sse(&scale(&sim, 40.0), &scale(&data, 40.0)).unwrap();
        assert!((base - scaled).abs() < 1e-12 * base);
    }

    #[test]
    fn sse_zero_mean_channel_unweighted() {
        let data = series(vec![-1.0, 1.0]);
        let sim = series(vec![0.0, 0.0]);
        assert_eq!(weighted_sse(&sim, &data).unwrap(), 2.0);
    }

    #[test]
    fn sse_channel_mismatch() {
        let a = series(vec![1.0, 2.0]);
        let b = TimeSeriesData::new(vec![0.0, 1.0], vec![("b".into(), vec![1.0, 2.0])]).unwrap();
        assert!(matches!(
            weighted_sse(&a, &b),
            Err(OdeError::ChannelMismatch(_))
        ));
        let c = series(vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            weighted_sse(&a, &c),
            Err(OdeError::ChannelMismatch(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let ts = TimeSeriesData::new(
            vec![0.0, 0.1, 1.0 / 3.0],
            vec![
                ("prey".into(), vec![1.0, 0.123456789012345678, 1e-300]),
                ("predator".into(), vec![-2.5, std::f64::consts::PI, 7.0]),
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        ts.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("time,prey,predator\n"));
        assert_eq!(TimeSeriesData::read_csv(buf.as_slice()).unwrap(), ts);
    }

    #[test]
    fn csv_rejects_bad_header_and_rows() {
        assert!(TimeSeriesData::read_csv("t,a\n0,1\n".as_bytes()).is_err());
        assert!(TimeSeriesData::read_csv("time,a\n0,x\n".as_bytes()).is_err());
        assert!(TimeSeriesData::read_csv("time,a\n1,1\n0,2\n".as_bytes()).is_err());
    }
}
