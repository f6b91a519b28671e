//! Post-run analysis of a run directory: length plateau, the length-decay
//! identity, the surface attraction rate and node dispersion.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::output::{io_err, read_series, SeriesTable};
use super::run::{read_metadata, SERIES_FILE};
use super::ScenarioError;

/// Relative length change over the final tenth of the horizon below which a
/// run counts as having reached its plateau.
pub const PLATEAU_REL_CHANGE: f64 = 1e-3;
/// Finite-difference `|dL/dt|` below which the identity check is skipped.
pub const IDENTITY_MIN_RATE: f64 = 1e-3;
/// The attraction fit uses rows with `‖φ‖₂` inside this fraction window of
/// its initial value.
pub const ATTRACTION_WINDOW: (f64, f64) = (1e-2, 1e-1);

pub const LENGTH_DAT: &str = "length.dat";
pub const MAX_F_DAT: &str = "max_f.dat";
pub const DISPERSION_DAT: &str = "dispersion.dat";
pub const SUMMARY_TXT: &str = "summary.txt";

/// One comparison of the measured and predicted `dL/dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySample {
    pub t: f64,
    pub measured: f64,
    pub predicted: f64,
}

impl IdentitySample {
    pub fn rel_error(&self) -> f64 {
        (self.measured - self.predicted).abs() / self.measured.abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagSummary {
    pub t_end: f64,
    pub t_final: f64,
    pub completed: bool,
    pub initial_length: f64,
    pub final_length: f64,
    /// Relative change of `L` between `0.9 t_end` and the end of the run.
    pub final_window_change: f64,
    pub plateau_reached: bool,
    /// First time from which `L` stays within the plateau tolerance of its
    /// final value.
    pub plateau_time: Option<f64>,
    pub non_increasing_violations: usize,
    pub identity_samples: Vec<IdentitySample>,
    pub identity_max_rel_error: Option<f64>,
    pub attraction_slope: Option<f64>,
    pub max_f_initial: f64,
    pub max_f_max: f64,
    pub max_f_final: f64,
    pub dispersion_initial: f64,
    pub dispersion_max: f64,
    pub dispersion_final: f64,
}

/// Derivative at the middle of three unevenly spaced samples, exact for
/// quadratics.
fn three_point_derivative(t: [f64; 3], y: [f64; 3]) -> f64 {
    let [t0, t1, t2] = t;
    y[0] * (t1 - t2) / ((t0 - t1) * (t0 - t2))
        + y[1] * (2.0 * t1 - t0 - t2) / ((t1 - t0) * (t1 - t2))
        + y[2] * (t1 - t0) / ((t2 - t0) * (t2 - t1))
}

/// Measured and predicted `dL/dt` at every interior row where the measured
/// rate exceeds [`IDENTITY_MIN_RATE`].
pub fn identity_samples(t: &[f64], length: &[f64], predicted: &[f64]) -> Vec<IdentitySample> {
    (1..t.len().saturating_sub(1))
        .filter(|&i| t[i - 1] < t[i] && t[i] < t[i + 1])
        .map(|i| IdentitySample {
            t: t[i],
            measured: three_point_derivative(
                [t[i - 1], t[i], t[i + 1]],
                [length[i - 1], length[i], length[i + 1]],
            ),
            predicted: predicted[i],
        })
        .filter(|s| s.measured.abs() > IDENTITY_MIN_RATE)
        .collect()
}

/// `n` samples at uniformly spaced times across the span of `samples`, each
/// the sample nearest its target time.
pub fn uniform_subsample(samples: &[IdentitySample], n: usize) -> Vec<IdentitySample> {
    let (Some(first), Some(last)) = (samples.first(), samples.last()) else {
        return Vec::new();
    };
    if n < 2 {
        return samples.iter().take(n).copied().collect();
    }
    (0..n)
        .map(|j| {
            let target = first.t + (last.t - first.t) * j as f64 / (n - 1) as f64;
            let i = samples.partition_point(|s| s.t < target).min(samples.len() - 1);
            if i > 0 && (samples[i - 1].t - target).abs() <= (samples[i].t - target).abs() {
                samples[i - 1]
            } else {
                samples[i]
            }
        })
        .collect()
}

/// Least-squares slope of `ln φ` against `t` over rows with `φ` inside the
/// [`ATTRACTION_WINDOW`] of `φ(0)`. `None` with fewer than three such rows.
pub fn attraction_slope(t: &[f64], phi: &[f64]) -> Option<f64> {
    let phi0 = *phi.first()?;
    let (lo, hi) = (ATTRACTION_WINDOW.0 * phi0, ATTRACTION_WINDOW.1 * phi0);
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(phi)
        .filter(|(_, &p)| p > lo && p < hi)
        .map(|(&t, &p)| (t, p.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Relative length change over `[0.9 t_end, end]` and the plateau onset.
pub fn plateau(t: &[f64], length: &[f64], t_end: f64) -> (f64, Option<f64>) {
    let Some(&l_end) = length.last() else {
        return (f64::NAN, None);
    };
    let start = t.partition_point(|&s| s < 0.9 * t_end).min(t.len() - 1);
    let change = length[start..]
        .iter()
        .map(|l| (l - l_end).abs())
        .fold(0.0, f64::max)
        / l_end;
    let tol = PLATEAU_REL_CHANGE * l_end;
    let onset = length.iter().rposition(|l| (l - l_end).abs() > tol).map_or(0, |i| i + 1);
    (change, t.get(onset).copied())
}

fn column(table: &SeriesTable, name: &str, path: &Path) -> Result<Vec<f64>, ScenarioError> {
    table
        .column(name)
        .ok_or_else(|| ScenarioError::Parse(format!("{}: no column '{name}'", path.display())))
}

fn two_column(t: &[f64], y: &[f64], label: &str) -> String {
    let mut out = format!("# t {label}\n");
    for (a, b) in t.iter().zip(y) {
        writeln!(out, "{a:.16e} {b:.16e}").expect("writing to a String");
    }
    out
}

fn stats(y: &[f64]) -> (f64, f64, f64) {
    let first = y.first().copied().unwrap_or(f64::NAN);
    let last = y.last().copied().unwrap_or(f64::NAN);
    (first, y.iter().copied().fold(f64::NEG_INFINITY, f64::max), last)
}

/// Analyze a finished run directory, writing `length.dat`, `max_f.dat`,
/// `dispersion.dat` and `summary.txt` next to the series.
pub fn diag_report(dir: &Path) -> Result<DiagSummary, ScenarioError> {
    let meta = read_metadata(dir)?;
    let series_path = dir.join(SERIES_FILE);
    if !series_path.exists() {
        return Err(ScenarioError::MissingArtifact(series_path));
    }
    let table = read_series(&series_path)?;
    let t = column(&table, "t", &series_path)?;
    let length = column(&table, "L", &series_path)?;
    let max_f = column(&table, "max_f_abs", &series_path)?;
    let phi = column(&table, "phi_l2", &series_path)?;
    let disp = column(&table, "dispersion", &series_path)?;
    let predicted = column(&table, "dl_dt_identity", &series_path)?;
    if t.is_empty() {
        return Err(ScenarioError::Parse(format!("{}: no rows", series_path.display())));
    }

    let t_end = meta.solver.t_end;
    let completed = meta.run.as_ref().is_some_and(|r| r.status == "ok");
    let t_final = *t.last().expect("non-empty");
    let (final_window_change, plateau_time) = plateau(&t, &length, t_end);
    let plateau_reached = completed && final_window_change < PLATEAU_REL_CHANGE;
    let non_increasing_violations = length.windows(2).filter(|w| w[1] > w[0] + 1e-9 * w[0]).count();
    let identity = identity_samples(&t, &length, &predicted);
    let identity_max_rel_error = identity.iter().map(IdentitySample::rel_error).reduce(f64::max);
    let (max_f_initial, max_f_max, max_f_final) = stats(&max_f);
    let (dispersion_initial, dispersion_max, dispersion_final) = stats(&disp);

    let summary = DiagSummary {
        t_end,
        t_final,
        completed,
        initial_length: length[0],
        final_length: *length.last().expect("non-empty"),
        final_window_change,
        plateau_reached,
        plateau_time: if plateau_reached { plateau_time } else { None },
        non_increasing_violations,
        identity_samples: identity,
        identity_max_rel_error,
        attraction_slope: attraction_slope(&t, &phi),
        max_f_initial,
        max_f_max,
        max_f_final,
        dispersion_initial,
        dispersion_max,
        dispersion_final,
    };

    for (name, y, label) in [
        (LENGTH_DAT, &length, "L"),
        (MAX_F_DAT, &max_f, "max_f_abs"),
        (DISPERSION_DAT, &disp, "dispersion"),
    ] {
        let path = dir.join(name);
        fs::write(&path, two_column(&t, y, label)).map_err(io_err(&path))?;
    }
    let path = dir.join(SUMMARY_TXT);
    fs::write(&path, summary.to_text(&meta.name)).map_err(io_err(&path))?;
    Ok(summary)
}

impl DiagSummary {
    pub fn to_text(&self, name: &str) -> String {
        let mut s = String::new();
        let mut line = |text: String| {
            s.push_str(&text);
            s.push('\n');
        };
        line(format!("scenario: {name}"));
        line(format!(
            "horizon: t_end = {}, reached t = {} ({})",
            self.t_end,
            self.t_final,
            if self.completed { "completed" } else { "failed" }
        ));
        line(format!("length: {:.6} -> {:.6}", self.initial_length, self.final_length));
        match self.plateau_time {
            Some(tp) if self.plateau_reached => line(format!(
                "length plateau reached before t_end at t = {tp:.4} (final-window change {:.3e})",
                self.final_window_change
            )),
            _ => line(format!(
                "no length plateau before t_end (final-window change {:.3e})",
                self.final_window_change
            )),
        }
        line(format!("length increases beyond 1e-9 L: {}", self.non_increasing_violations));
        match self.identity_max_rel_error {
            Some(e) => line(format!(
                "length-decay identity: max relative error {e:.3e} over {} samples",
                self.identity_samples.len()
            )),
            None => line("length-decay identity: no samples with |dL/dt| > 1e-3".into()),
        }
        match self.attraction_slope {
            Some(k) => line(format!("attraction slope of ln phi_l2: {k:.4}")),
            None => line("attraction slope: window not reached".into()),
        }
        line(format!(
            "max |f|: initial {:.3e}, max {:.3e}, final {:.3e}",
            self.max_f_initial, self.max_f_max, self.max_f_final
        ));
        line(format!(
            "dispersion: initial {:.3e}, max {:.3e}, final {:.3e}",
            self.dispersion_initial, self.dispersion_max, self.dispersion_final
        ));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_length_plateaus_at_zero() {
        let t: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let l = vec![2.0; 11];
        let (change, onset) = plateau(&t, &l, 1.0);
        assert_eq!(change, 0.0);
        assert_eq!(onset, Some(0.0));
        assert!(identity_samples(&t, &l, &[0.0; 11]).is_empty());
    }

    #[test]
    fn decaying_length_plateau_onset() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let l: Vec<f64> = t.iter().map(|t| 1.0 + (-t).exp()).collect();
        let (change, onset) = plateau(&t, &l, 10.0);
        assert!(change < 1e-3);
        // e^{-t} ≤ 1e-3 (1 + e^{-10}) from t ≈ 6.9
        assert!((onset.unwrap() - 7.0).abs() < 0.11, "{onset:?}");
    }

    #[test]
    fn three_point_derivative_is_exact_for_quadratics() {
        let f = |t: f64| 3.0 * t * t - 2.0 * t + 1.0;
        let ts = [0.1, 0.25, 0.7];
        let d = three_point_derivative(ts, ts.map(f));
        assert!((d - (6.0 * 0.25 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn identity_samples_of_exponential() {
        let t: Vec<f64> = (0..200).map(|i| (i as f64 * 0.01).powf(1.3)).collect();
        let l: Vec<f64> = t.iter().map(|t| 5.0 * (-t).exp()).collect();
        let pred: Vec<f64> = l.iter().map(|l| -l).collect();
        let s = identity_samples(&t, &l, &pred);
        assert_eq!(s.len(), 198);
        assert!(s.iter().all(|s| s.rel_error() < 1e-3));
        let sub = uniform_subsample(&s, 20);
        assert_eq!(sub.len(), 20);
        assert_eq!(sub[0], s[0]);
        assert_eq!(sub[19], *s.last().unwrap());
        assert!(sub.windows(2).all(|w| w[0].t < w[1].t));
    }

    #[test]
    fn attraction_slope_of_pure_exponential() {
        let t: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let phi: Vec<f64> = t.iter().map(|t| 3.0 * (-t).exp()).collect();
        let k = attraction_slope(&t, &phi).unwrap();
        assert!((k + 1.0).abs() < 1e-12);
        assert!(attraction_slope(&t[..5], &phi[..5]).is_none());
    }

    #[test]
    fn missing_directory_is_a_missing_artifact() {
        let dir = tempfile::tempdir().unwrap();
        let err = diag_report(dir.path()).unwrap_err();
        assert!(matches!(err, ScenarioError::MissingArtifact(_)));
        assert_eq!(err.exit_code(), 4);
    }
}
