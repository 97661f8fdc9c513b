//! Built-in acceptance suite: twelve criteria on fixed small setups.

use std::f64::consts::PI;
use std::time::Instant;

use super::execute::{mass_drift, static_deviation};
use super::synthetic::{frozen_coefficient_run, uniform_expansion_run};
use crate::blowup::{blowup_report, contradiction_time, h_functional_profile, inequality_margin, LifespanInput};
use crate::diagnostics::{
    annulus_velocity_check, energy_report, fit_annulus_law, jump_at, lambda_jump_decay, manufactured_jump,
    particle_ode_residual, track_jump, two_fluid_energy_balance, two_fluid_rhs, vacuum_report, CheckEntry,
    CheckSummary,
};
use crate::error::Result;
use crate::flow::{
    holder_exponent_probe, integrate_path, ordering_check, track_interfaces, uniform_knots, AnalyticField,
    RadialHistory,
};
use crate::material::{quadrature_consistency, MaterialLaw};
use crate::planar::{verify_decomposition, Forcing, ScalarField, VectorField};
use crate::radial::{run, DensityProfile, RadialGrid, RunOptions, RunOutput, Scenario, VelocityProfile};

/// Runs shared by several criteria.
#[derive(Default)]
pub struct CheckContext {
    jump_runs: Vec<(usize, RunOutput)>,
    smooth_runs: Vec<(String, RunOutput)>,
}

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    run: fn(&mut CheckContext) -> Result<CheckSummary>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub summary: CheckSummary,
    pub error: Option<String>,
    pub seconds: f64,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.summary.all_pass()
    }

    /// One table line: verdict, id, title, time, then every check.
    pub fn line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let detail = match &self.error {
            Some(e) => format!("error: {e}"),
            None => self
                .summary
                .checks
                .iter()
                .map(|(k, c)| {
                    let mark = if c.pass { "" } else { " !" };
                    format!("{k}={:.3e} (tol {:.3e}){mark}", c.value, c.tolerance)
                })
                .collect::<Vec<_>>()
                .join("; "),
        };
        format!(
            "{verdict} {:>2} {:<32} {:>7.1}s  {detail}",
            self.id, self.title, self.seconds
        )
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, title: "conservation and equilibrium", run: conservation },
        Criterion { id: 2, title: "energy inequality", run: energy },
        Criterion { id: 3, title: "material closed forms", run: material },
        Criterion { id: 4, title: "decomposition identities", run: decomposition },
        Criterion { id: 5, title: "Rankine-Hugoniot", run: rankine_hugoniot },
        Criterion { id: 6, title: "Lambda-jump decay", run: decay },
        Criterion { id: 7, title: "vacuum transport", run: vacuum },
        Criterion { id: 8, title: "annulus law", run: annulus_law },
        Criterion { id: 9, title: "two-fluid energy identity", run: two_fluid },
        Criterion { id: 10, title: "particle-path ODE", run: particle_ode },
        Criterion { id: 11, title: "blow-up machinery", run: blowup },
        Criterion { id: 12, title: "flow map", run: flow_map },
    ]
}

/// Runs the selected criteria (all when `only` is empty) in order.
pub fn run_check(only: &[u8]) -> Vec<Outcome> {
    let mut ctx = CheckContext::default();
    let mut out = Vec::new();
    for c in criteria() {
        if !only.is_empty() && !only.contains(&c.id) {
            continue;
        }
        let started = Instant::now();
        let res = (c.run)(&mut ctx);
        let seconds = started.elapsed().as_secs_f64();
        let (summary, error) = match res {
            Ok(s) => (s, None),
            Err(e) => (CheckSummary::default(), Some(e.to_string())),
        };
        out.push(Outcome {
            id: c.id,
            title: c.title,
            summary,
            error,
            seconds,
        });
    }
    out
}

pub fn render_table(outcomes: &[Outcome]) -> String {
    let mut s = String::new();
    for o in outcomes {
        s.push_str(&o.line());
        s.push('\n');
    }
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    let total: f64 = outcomes.iter().map(|o| o.seconds).sum();
    s.push_str(&format!("{passed}/{} criteria passed in {total:.1}s\n", outcomes.len()));
    s
}

fn law() -> MaterialLaw {
    MaterialLaw::default()
}

fn snap_opts(h: f64) -> RunOptions {
    RunOptions {
        snapshot_every: 0,
        snapshot_dt: Some(h),
        ..Default::default()
    }
}

fn jump_scenario(n: usize, t_end: f64) -> Scenario {
    Scenario {
        density: DensityProfile::step(1.0, 1.0, 2.0),
        t_end,
        ..Scenario::new(law(), RadialGrid::new(4.0, n).expect("grid"))
    }
}

/// Smooth zero-force scenarios.
fn smooth_scenarios(n: usize) -> Vec<(&'static str, Scenario)> {
    let g = RadialGrid::new(4.0, n).expect("grid");
    let base = Scenario {
        t_end: 0.5,
        ..Scenario::new(law(), g)
    };
    vec![
        (
            "pulse",
            Scenario {
                velocity: VelocityProfile::Gaussian {
                    amplitude: 0.2,
                    center: 1.0,
                    width: 0.25,
                },
                ..base.clone()
            },
        ),
        (
            "bump",
            Scenario {
                density: DensityProfile::Gaussian {
                    base: 1.0,
                    amplitude: 0.5,
                    center: 1.5,
                    width: 0.4,
                },
                ..base.clone()
            },
        ),
        (
            "pulse_and_bump",
            particle_scenario(n),
        ),
    ]
}

/// Density bump plus a velocity pulse, used for particle paths.
fn particle_scenario(n: usize) -> Scenario {
    Scenario {
        density: DensityProfile::Gaussian {
            base: 1.0,
            amplitude: 0.5,
            center: 1.5,
            width: 0.4,
        },
        velocity: VelocityProfile::Gaussian {
            amplitude: 0.2,
            center: 1.0,
            width: 0.25,
        },
        t_end: 0.5,
        ..Scenario::new(law(), RadialGrid::new(4.0, n).expect("grid"))
    }
}

fn annulus_scenario(n: usize, delta: f64, t_end: f64, scheme: &str) -> Scenario {
    Scenario {
        density: DensityProfile::annulus(1.0, 2.0, 2.0, 1.0),
        t_end,
        delta_floor: delta,
        scheme: scheme.into(),
        ..Scenario::new(law(), RadialGrid::new(8.0, n).expect("grid"))
    }
}

impl CheckContext {
    /// Jump run at `n` cells to `t = 0.5`, snapshots every 0.01.
    fn jump_run(&mut self, n: usize) -> Result<&RunOutput> {
        if !self.jump_runs.iter().any(|(m, _)| *m == n) {
            let out = run(&jump_scenario(n, 0.5), &snap_opts(0.01))?;
            self.jump_runs.push((n, out));
        }
        Ok(&self.jump_runs.iter().find(|(m, _)| *m == n).expect("stored").1)
    }
}

fn conservation(_: &mut CheckContext) -> Result<CheckSummary> {
    let started = Instant::now();
    let mut s = CheckSummary::default();
    let out = run(&jump_scenario(512, 1.0), &snap_opts(0.1))?;
    s.insert("mass_drift", CheckEntry::at_most(mass_drift(&out), 1e-10));
    let rest = Scenario {
        t_end: 1.0,
        ..Scenario::new(law(), RadialGrid::new(4.0, 512).expect("grid"))
    };
    let out = run(&rest, &snap_opts(0.1))?;
    s.insert("static_invariance", CheckEntry::at_most(static_deviation(&out), 1e-12));
    s.insert("runtime_s", CheckEntry::at_most(started.elapsed().as_secs_f64(), 30.0));
    Ok(s)
}

fn energy(ctx: &mut CheckContext) -> Result<CheckSummary> {
    let mut s = CheckSummary::default();
    let opts = RunOptions {
        record_energy: true,
        ..snap_opts(0.05)
    };
    let coarse = smooth_scenarios(256);
    for (name, fine) in smooth_scenarios(512) {
        let (_, c) = coarse.iter().find(|(n, _)| *n == name).expect("same names");
        let out_c = run(c, &opts)?;
        let out_f = run(&fine, &opts)?;
        let rep_c = energy_report(&out_c, &law())?;
        let rep_f = energy_report(&out_f, &law())?;
        s.insert(format!("{name}_excess"), CheckEntry::at_most(rep_f.max_relative_excess, 0.02));
        s.insert(
            format!("{name}_residual_ratio"),
            CheckEntry::at_least(rep_c.max_residual_rate / rep_f.max_residual_rate, 1.7),
        );
        ctx.smooth_runs.push((name.to_string(), out_f));
    }
    let jump = run(&jump_scenario(512, 0.5), &opts)?;
    s.insert("jump_excess", CheckEntry::at_most(energy_report(&jump, &law())?.max_relative_excess, 0.02));
    Ok(s)
}

/// Laws covering the integer and fractional exponent branches.
fn sample_laws() -> Vec<MaterialLaw> {
    vec![
        law(),
        MaterialLaw {
            gamma: 1.4,
            beta: 1.2,
            c_lam: 0.5,
            mu: 0.7,
            ..law()
        },
        MaterialLaw {
            a: 2.0,
            gamma: 3.0,
            beta: 3.0,
            ..law()
        },
        MaterialLaw {
            gamma: 1.0,
            beta: 0.5,
            ..law()
        },
    ]
}

fn material(_: &mut CheckContext) -> Result<CheckSummary> {
    let mut s = CheckSummary::default();
    let mut worst = 0.0f64;
    for l in sample_laws() {
        l.validate()?;
        worst = worst.max(quadrature_consistency(&l, l.rho_bar, 100)?.worst());
    }
    s.insert("quadrature_rel", CheckEntry::at_most(worst, 1e-9));
    let l = law();
    let mut g_err = 0.0f64;
    for k in 1..=100 {
        let rho = l.rho_bar * k as f64 / 100.0;
        g_err = g_err.max((l.potential_g(rho)? - (rho - l.rho_tilde).powi(2)).abs());
    }
    s.insert("g_closed_form", CheckEntry::at_most(g_err, 1e-12));
    Ok(s)
}

fn decomposition(_: &mut CheckContext) -> Result<CheckSummary> {
    let started = Instant::now();
    let n = 64;
    let rho = ScalarField::from_fn(n, |x, y| 1.0 + 0.3 * x.sin() * y.cos())?;
    let u = VectorField::from_fn(n, |x, y| (-y.sin() + 0.2 * x.cos(), x.sin() + 0.1 * (x + y).sin()))?;
    let u_t = VectorField::from_fn(n, |x, y| (0.3 * (x - y).cos(), -0.2 * (2.0 * y).sin()))?;
    let rep = verify_decomposition(&law(), &rho, &u, &u_t, &Forcing::Manufactured)?;
    let mut s = CheckSummary::default();
    s.insert("residual_momentum", CheckEntry::at_most(rep.residual_momentum, 1e-10));
    s.insert("residual_poisson", CheckEntry::at_most(rep.residual_poisson, 1e-8));
    s.insert("residual_elliptic_u", CheckEntry::at_most(rep.residual_elliptic_u, 1e-10));
    s.insert("runtime_s", CheckEntry::at_most(started.elapsed().as_secs_f64(), 5.0));
    Ok(s)
}

/// Mean `|RH residual|` along the tracked jump over `t` in `[0.05, 0.5]`.
fn mean_rh(out: &RunOutput) -> Result<f64> {
    let (records, _) = track_jump(out, &law(), 1.0, 0.01)?;
    let vals: Vec<f64> = records
        .iter()
        .filter(|j| j.t >= 0.05 - 1e-12)
        .map(|j| j.rh_residual.abs())
        .collect();
    if vals.is_empty() {
        return Err(crate::Error::Domain("jump lost before t = 0.05".into()));
    }
    Ok(vals.iter().sum::<f64>() / vals.len() as f64)
}

fn rankine_hugoniot(ctx: &mut CheckContext) -> Result<CheckSummary> {
    let mut s = CheckSummary::default();
    let e256 = mean_rh(ctx.jump_run(256)?)?;
    let e1024 = mean_rh(ctx.jump_run(1024)?)?;
    s.insert("rh_order", CheckEntry::at_least((e256 / e1024).log2() / 2.0, 0.5));

    let l = law();
    let g = RadialGrid::new(4.0, 128).expect("grid");
    let (rm, rp, dm) = (1.0, 2.0, 0.3);
    let dp = (l.long_visc(rm) * dm - l.p(rm) + l.p(rp)) / l.long_visc(rp);
    let st = manufactured_jump(g, 40, (rm, dm), (rp, dp));
    let j = jump_at(&st, &l, g.face(40))?;
    s.insert("manufactured_rh", CheckEntry::at_most(j.rh_residual.abs(), 1e-12));
    Ok(s)
}

fn decay(ctx: &mut CheckContext) -> Result<CheckSummary> {
    let mut s = CheckSummary::default();
    let cmp = lambda_jump_decay(ctx.jump_run(1024)?, &law(), 1.0, 0.02)?;
    s.insert("max_deviation", CheckEntry::at_most(cmp.max_deviation, 0.05));
    s.insert(
        "window_end",
        CheckEntry::at_least(cmp.times.last().copied().unwrap_or(0.0), 0.5 - 1e-9),
    );
    let syn = lambda_jump_decay(&frozen_coefficient_run(&law(), 0.5, 500), &law(), 1.0, 0.01)?;
    s.insert("frozen_coefficient", CheckEntry::at_most(syn.max_deviation, 1e-6));
    Ok(s)
}

fn annulus_run(delta: f64) -> Result<RunOutput> {
    run(&annulus_scenario(1024, delta, 0.25, "imex"), &snap_opts(0.005))
}

fn vacuum(_: &mut CheckContext) -> Result<CheckSummary> {
    let mut s = CheckSummary::default();
    let mut peaks = Vec::new();
    for delta in [1e-4, 5e-5] {
        let out = annulus_run(delta)?;
        let hist = RadialHistory::new(out.snapshots.clone())?;
        let track = track_interfaces(&hist, 1.0, 2.0, out.last().t)?;
        let rep = vacuum_report(&out, &law(), &track, None)?;
        s.insert(
            format!("containment_cells_delta_{delta:e}"),
            CheckEntry::at_most(rep.max_excursion(), 2.0),
        );
        s.insert(
            format!("measured_until_delta_{delta:e}"),
            CheckEntry::at_least(rep.measured_until, 0.25 - 1e-9),
        );
        peaks.push(rep.peak_in_annulus());
    }
    let q = peaks[0] / peaks[1] / 2.0;
    s.insert("peak_ratio_over_delta_ratio", CheckEntry::at_most(q.max(1.0 / q), 1.5));
    Ok(s)
}

fn annulus_law(_: &mut CheckContext) -> Result<CheckSummary> {
    let mut s = CheckSummary::default();
    let delta = 1e-4;
    let out = annulus_run(delta)?;
    let hist = RadialHistory::new(out.snapshots.clone())?;
    let track = track_interfaces(&hist, 1.0, 2.0, out.last().t)?;
    let eps = crate::diagnostics::default_eps_vac(delta);
    let (mut rms, mut rel, mut fits) = (0.0f64, 0.0f64, 0usize);
    for st in &out.snapshots {
        let Some((a, b)) = track.at(st.t) else { break };
        if let Some(fit) = annulus_velocity_check(st, a, b, eps)? {
            rms = rms.max(fit.rms_rel());
            rel = rel.max(fit.rel_diff);
            fits += 1;
        }
    }
    s.insert("fit_rms_rel", CheckEntry::at_most(rms, 0.05));
    s.insert("stress_rate_rel", CheckEntry::at_most(rel, 0.05));
    s.insert("fitted_snapshots", CheckEntry::at_least(fits as f64, out.snapshots.len() as f64));
    let (alpha, beta, _) = fit_annulus_law(&[(1.0, 1.0), (2.0, -1.0)])?;
    let err = (alpha + 1.0).abs().max((beta - 2.0).abs()).max((2.0 * alpha + 2.0).abs());
    s.insert("synthetic_exact", CheckEntry::at_most(err, 0.0));
    Ok(s)
}

fn two_fluid(_: &mut CheckContext) -> Result<CheckSummary> {
    let mut s = CheckSummary::default();
    let out = run(&annulus_scenario(1024, 1e-4, 0.2, "imex-superbee"), &snap_opts(0.0025))?;
    let hist = RadialHistory::new(out.snapshots.clone())?;
    let track = track_interfaces(&hist, 1.0, 2.0, out.last().t)?;
    let rec = two_fluid_energy_balance(&out, &law(), &track, 0.2, 0.01)?;
    s.insert("relative_residual", CheckEntry::at_most(rec.max_rel_residual, 0.05));
    s.insert("untruncated", CheckEntry::at_most(f64::from(u8::from(rec.truncated_at.is_some())), 0.0));
    let l = MaterialLaw {
        c_lam: 0.0,
        mu: 1.0,
        ..law()
    };
    s.insert("hand_value", CheckEntry::at_most((two_fluid_rhs(&l, 1.0, 2.0, 1.0, -1.0) + 4.0).abs(), 1e-12));
    Ok(s)
}

const PARTICLE_SEEDS: [f64; 3] = [0.5, 1.0, 1.5];

fn particle_l2(n: usize) -> Result<(RunOutput, Vec<f64>)> {
    let out = run(&particle_scenario(n), &snap_opts(0.02 * 128.0 / n as f64))?;
    let hist = RadialHistory::new(out.snapshots.clone())?;
    let mut l2 = Vec::new();
    for r in PARTICLE_SEEDS {
        let p = integrate_path(&hist, [r, 0.0], 0.0, out.last().t)?;
        l2.push(particle_ode_residual(&out, &p, &law(), 0.0)?.l2);
    }
    Ok((out, l2))
}

fn particle_ode(_: &mut CheckContext) -> Result<CheckSummary> {
    let mut s = CheckSummary::default();
    let (_, coarse) = particle_l2(512)?;
    let (_, fine) = particle_l2(1024)?;
    for (k, r) in PARTICLE_SEEDS.iter().enumerate() {
        s.insert(format!("l2_ratio_seed_{r}"), CheckEntry::at_least(coarse[k] / fine[k], 1.7));
    }

    let dt = 0.01;
    let exact = uniform_expansion_run(&law(), dt, 0.5);
    let hist = RadialHistory::new(exact.snapshots.clone())?;
    let p = integrate_path(&hist, [1.0, 0.0], 0.0, 0.5)?;
    let rec = particle_ode_residual(&exact, &p, &law(), 1e-8)?;
    s.insert("synthetic_max_abs", CheckEntry::at_most(rec.max_abs, 10.0 * dt));
    Ok(s)
}

fn blowup_law() -> MaterialLaw {
    MaterialLaw {
        a: 1.0,
        gamma: 3.0,
        c_lam: 1.0,
        beta: 2.0,
        mu: 0.1,
        ..law()
    }
}

fn blowup_run(n: usize, h: f64) -> Result<RunOutput> {
    let scn = Scenario {
        density: DensityProfile::Bump {
            amplitude: 1.0,
            radius: 1.0,
            power: 2.0,
        },
        t_end: 0.2,
        scheme: "imex".into(),
        ..Scenario::new(blowup_law(), RadialGrid::new(3.0, n).expect("grid"))
    };
    run(&scn, &snap_opts(h))
}

fn blowup(_: &mut CheckContext) -> Result<CheckSummary> {
    let mut s = CheckSummary::default();
    let l = blowup_law();
    let coarse = inequality_margin(&blowup_run(512, 0.005)?, &l)?;
    let fine_run = blowup_run(1024, 0.0025)?;
    let fine = inequality_margin(&fine_run, &l)?;
    s.insert("margin_coarse", CheckEntry::at_least(coarse.min_margin, -coarse.defect));
    s.insert("margin_fine", CheckEntry::at_least(fine.min_margin, -fine.defect));
    s.insert("defect_ratio", CheckEntry::at_least(coarse.defect / fine.defect, 1.7));

    let disk_law = MaterialLaw {
        a: 1.0,
        gamma: 2.0,
        c_lam: 1.0,
        beta: 2.0,
        mu: 1.0,
        ..law()
    };
    let disk = DensityProfile::Piecewise {
        breaks: vec![1.0],
        values: vec![1.0, 0.0],
    };
    let h0 = h_functional_profile(&disk_law, &disk, &VelocityProfile::Zero, 0.0, 1e-12)?;
    s.insert("disk_h0", CheckEntry::at_most((h0 / (2.5 * PI) - 1.0).abs(), 1e-10));
    let life = contradiction_time(
        &disk_law,
        &LifespanInput {
            h0,
            mass0: PI,
            area0: PI,
        },
    )?;
    let t_star = life.t_star.unwrap_or(f64::NAN);
    let err = (t_star - (5f64.sqrt() / 2.0 - 1.0)).abs();
    s.insert("disk_t_star", CheckEntry::at_most(if err.is_nan() { f64::INFINITY } else { err }, 1e-12));

    let rep = blowup_report(&l, Some(&fine_run), None)?;
    let monotone = rep.scans.iter().filter(|sc| sc.monotone && sc.values.len() == 10).count();
    s.insert("monotone_scans", CheckEntry::at_least(monotone as f64, 3.0));
    Ok(s)
}

fn flow_map(ctx: &mut CheckContext) -> Result<CheckSummary> {
    let mut s = CheckSummary::default();
    let k = 0.5;
    let f = AnalyticField::radial(uniform_knots(0.0, 1.0, 100), move |r, _| k * r)?;
    let x0 = [1.3, 0.0];
    let id = integrate_path(&f, x0, 0.4, 0.4)?;
    s.insert("seed_identity", CheckEntry::at_most((id.end().1[0] - x0[0]).abs(), 0.0));
    let direct = integrate_path(&f, x0, 0.0, 1.0)?.end().1[0];
    let mid = integrate_path(&f, x0, 0.0, 0.4)?.end().1;
    let composed = integrate_path(&f, mid, 0.4, 1.0)?.end().1[0];
    let exact = x0[0] * (k * 1.0f64).exp();
    s.insert(
        "group_property",
        CheckEntry::at_most((composed - direct).abs().max((direct - exact).abs()), 1e-8),
    );

    if ctx.smooth_runs.is_empty() {
        for (name, scn) in smooth_scenarios(256) {
            ctx.smooth_runs.push((name.into(), run(&scn, &snap_opts(0.05))?));
        }
    }
    let seeds: Vec<f64> = (1..=12).map(|j| 0.25 * j as f64).collect();
    for (name, out) in &ctx.smooth_runs {
        let hist = RadialHistory::new(out.snapshots.clone())?;
        let rep = ordering_check(&hist, &seeds, out.last().t)?;
        s.insert(
            format!("ordering_{name}"),
            CheckEntry {
                value: rep.min_gap,
                tolerance: 0.0,
                pass: rep.ordered(),
            },
        );
    }

    let grid = uniform_knots(0.0, 1.0, 5);
    let fields: Vec<(&str, AnalyticField)> = vec![
        ("linear", AnalyticField::radial(uniform_knots(0.0, 1.0, 50), move |r, _| k * r)?),
        (
            "sine",
            AnalyticField::radial(uniform_knots(0.0, 1.0, 50), |r, t| 0.3 * (2.0 * r).sin() * (1.0 + t))?,
        ),
        (
            "planar_shear",
            AnalyticField::planar(uniform_knots(0.0, 1.0, 50), |x, _| [0.5 * x[1].sin(), -0.3 * x[0]])?,
        ),
    ];
    for (name, fld) in &fields {
        let y2 = if *name == "planar_shear" { [1.5, 0.4] } else { [1.5, 0.0] };
        let fit = holder_exponent_probe(fld, [1.0, 0.0], y2, &grid)?;
        s.insert(format!("holder_alpha_{name}"), CheckEntry::at_most((fit.alpha - 1.0).abs(), 0.05));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_one_to_twelve() {
        let ids: Vec<u8> = criteria().iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=12).collect::<Vec<u8>>());
    }

    #[test]
    fn fast_criteria_pass() {
        let out = run_check(&[3, 4]);
        assert_eq!(out.len(), 2);
        for o in &out {
            assert!(o.passed(), "{}", o.line());
        }
        assert!(render_table(&out).contains("2/2 criteria passed"));
    }
}
