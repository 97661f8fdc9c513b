//! Decay of the `Lambda` jump along the path of a transported discontinuity.

use serde::Serialize;

use super::jumps::{jump_at, JumpRecord};
use crate::error::{Error, Result};
use crate::flow::{integrate_path, RadialHistory};
use crate::format::CsvTable;
use crate::material::MaterialLaw;
use crate::radial::RunOutput;

#[derive(Debug, Clone, Serialize)]
pub struct DecayComparison {
    pub times: Vec<f64>,
    pub r: Vec<f64>,
    pub measured: Vec<f64>,
    /// `[Lambda](0) exp(-int_0^t a)`.
    pub predicted: Vec<f64>,
    pub a: Vec<f64>,
    /// `|measured / predicted - 1|`.
    pub deviation: Vec<f64>,
    pub max_deviation: f64,
    /// Time after which the jump fell below the detection threshold.
    pub truncated_at: Option<f64>,
}

impl DecayComparison {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t", "r", "measured", "predicted", "a", "deviation"]);
        for k in 0..self.times.len() {
            t.push(vec![
                self.times[k],
                self.r[k],
                self.measured[k],
                self.predicted[k],
                self.a[k],
                self.deviation[k],
            ]);
        }
        t
    }
}

/// Compares measured `[Lambda](t)` with `[Lambda](0) exp(-int a)`, where
/// `a = [P] / [Lambda]` is integrated by the trapezoid rule.
pub fn compare_decay(records: &[JumpRecord], truncated_at: Option<f64>) -> Result<DecayComparison> {
    let Some(first) = records.first() else {
        return Err(Error::config("jump", "no jump records"));
    };
    let l0 = first.jump_lambda;
    let mut cmp = DecayComparison {
        times: Vec::new(),
        r: Vec::new(),
        measured: Vec::new(),
        predicted: Vec::new(),
        a: Vec::new(),
        deviation: Vec::new(),
        max_deviation: 0.0,
        truncated_at,
    };
    let mut integral = 0.0;
    for (k, j) in records.iter().enumerate() {
        let a = j
            .a
            .ok_or_else(|| Error::Domain(format!("[Lambda] vanished at t = {}", j.t)))?;
        if k > 0 {
            let prev = &records[k - 1];
            integral += 0.5 * (j.t - prev.t) * (a + prev.a.unwrap_or(a));
        }
        let predicted = l0 * (-integral).exp();
        let dev = (j.jump_lambda / predicted - 1.0).abs();
        cmp.times.push(j.t);
        cmp.r.push(j.r);
        cmp.measured.push(j.jump_lambda);
        cmp.predicted.push(predicted);
        cmp.a.push(a);
        cmp.deviation.push(dev);
        cmp.max_deviation = cmp.max_deviation.max(dev);
    }
    Ok(cmp)
}

/// Follows the discontinuity seeded at `r_seed` through the snapshots,
/// measuring its brackets until the extrapolated density contrast drops
/// below `kappa rho_bar`. Returns the records and the truncation time.
pub fn track_jump(
    run: &RunOutput,
    law: &MaterialLaw,
    r_seed: f64,
    kappa: f64,
) -> Result<(Vec<JumpRecord>, Option<f64>)> {
    let hist = RadialHistory::new(run.snapshots.clone())?;
    let (t0, t1) = (run.initial().t, run.last().t);
    let path = integrate_path(&hist, [r_seed, 0.0], t0, t1)?;

    let mut records = Vec::new();
    let mut truncated_at = None;
    for st in &run.snapshots {
        let Some(x) = path.at(st.t) else {
            truncated_at = Some(st.t);
            break;
        };
        let j = jump_at(st, law, x[0])?;
        if records.is_empty() && j.rho_minus.min(j.rho_plus) <= 0.0 {
            return Err(Error::Hypothesis {
                hypothesis: "one-sided densities bounded away from vacuum",
                message: format!("initial one-sided densities {} and {}", j.rho_minus, j.rho_plus),
            });
        }
        if (j.rho_plus - j.rho_minus).abs() < kappa * law.rho_bar {
            truncated_at = Some(st.t);
            break;
        }
        records.push(j);
    }
    Ok((records, truncated_at))
}

/// Compares the `Lambda` jump of the discontinuity seeded at `r_seed` with
/// the exponential law (see [`track_jump`]).
pub fn lambda_jump_decay(run: &RunOutput, law: &MaterialLaw, r_seed: f64, kappa: f64) -> Result<DecayComparison> {
    let (records, truncated_at) = track_jump(run, law, r_seed, kappa)?;
    compare_decay(&records, truncated_at)
}
