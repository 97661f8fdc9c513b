use serde::Serialize;

use super::functional::{h_functional, inequality_margin, support_area, MarginSeries};
use super::lifespan::{contradiction_time, monotonicity_scan, Lifespan, LifespanInput, MonotonicityScan, ScanParam};
use crate::error::{Error, Result};
use crate::material::MaterialLaw;
use crate::radial::RunOutput;

#[derive(Debug, Clone, Serialize)]
pub struct BlowupReport {
    pub law: MaterialLaw,
    pub lifespan: Lifespan,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<MarginSeries>,
    pub scans: Vec<MonotonicityScan>,
}

/// Ten scale factors for one lifespan input. Data that satisfy the bound at
/// `t = 0` keep satisfying it when `H0` or the area grows or the mass
/// shrinks, so the scans only move in those directions.
pub fn scan_factors(param: ScanParam) -> Vec<f64> {
    (0..10)
        .map(|j| {
            let f = 1.0 + 0.2 * j as f64;
            if param == ScanParam::Mass0 {
                1.0 / f
            } else {
                f
            }
        })
        .collect()
}

/// Lifespan, monotonicity scans and (with a run) the margin series.
///
/// With a run, `H0`, `M0` and `|Omega(0)|` come from its initial snapshot
/// and `input` must be `None`.
pub fn blowup_report(
    law: &MaterialLaw,
    run: Option<&RunOutput>,
    input: Option<LifespanInput>,
) -> Result<BlowupReport> {
    let (input, margin) = match (run, input) {
        (Some(run), None) => {
            let st = run.initial();
            let inp = LifespanInput {
                h0: h_functional(st, law, st.t)?,
                mass0: st.mass(),
                area0: support_area(st, 0.0),
            };
            (inp, Some(inequality_margin(run, law)?))
        }
        (None, Some(inp)) => (inp, None),
        _ => {
            return Err(Error::config(
                "blowup",
                "give either a compact-support run or explicit lifespan inputs",
            ))
        }
    };
    let lifespan = contradiction_time(law, &input)?;
    let mut scans = Vec::new();
    for (p, base) in [
        (ScanParam::H0, input.h0),
        (ScanParam::Area0, input.area0),
        (ScanParam::Mass0, input.mass0),
    ] {
        let values: Vec<f64> = scan_factors(p).iter().map(|f| f * base).collect();
        scans.push(monotonicity_scan(law, &input, p, &values)?);
    }
    Ok(BlowupReport {
        law: *law,
        lifespan,
        margin,
        scans,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parameter_only_report() {
        let law = MaterialLaw {
            a: 1.0,
            gamma: 2.0,
            c_lam: 1.0,
            beta: 2.0,
            mu: 1.0,
            ..Default::default()
        };
        let inp = LifespanInput {
            h0: 2.5 * PI,
            mass0: PI,
            area0: PI,
        };
        let rep = blowup_report(&law, None, Some(inp)).unwrap();
        assert!(rep.margin.is_none());
        assert_eq!(rep.scans.len(), 3);
        assert!(rep.scans.iter().all(|s| s.monotone));
        assert!(blowup_report(&law, None, None).is_err());
    }
}
