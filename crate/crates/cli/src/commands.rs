use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use satfront::limits::{self, ConvergenceReport, FrontFamily};
use satfront::profiles::{self, GlueStart, ProfileOptions, WaveProfile};
use satfront::reduced::{shoot, Direction, ReducedField};
use satfront::shooting::{self, MonostableMode};
use satfront::{numeric, BistableReaction, Bump, SaturatingFlux, ShootOptions};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::svg::{self, Panel, Series};
use crate::{Cli, Command, Dir, Family, MonostableMethod, Start, SweepMetric};

const MONOSTABLE_GRID: [f64; 5] = [0.5, 0.25, 0.125, 0.05, 0.01];
const BISTABLE_GRID: [f64; 6] = [0.1, 0.01, 0.008, 0.005, 0.001, 0.0005];
const FIXED_SPEED_GRID: [f64; 4] = [0.04, 0.02, 0.01, 0.005];
const DEFAULT_SPEED_TOL: f64 = 1e-7;
const GRID_POINTS: usize = 10;

struct Ctx {
    reaction: BistableReaction,
    flux: SaturatingFlux,
    shoot: ShootOptions,
    profile: ProfileOptions,
    speed_tol: Option<f64>,
    plot: bool,
    out: PathBuf,
    files: Vec<String>,
}

impl Ctx {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.out.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &Value) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, &s)
    }

    fn speed_tol(&self, arg: Option<f64>) -> f64 {
        arg.or(self.speed_tol).unwrap_or(DEFAULT_SPEED_TOL)
    }
}

pub fn run(cli: &Cli) -> Result<String> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    validate(&cli.command)?;
    let out = cfg.out_dir(cli.out_dir.as_deref());
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let mut ctx = Ctx {
        reaction: cfg.reaction.build()?,
        flux: cfg.flux.build()?,
        shoot: cfg.shoot_options()?,
        profile: cfg.profile_options()?,
        speed_tol: cfg.tolerances.speed,
        plot: cli.plot || cfg.plot,
        out,
        files: Vec::new(),
    };
    let (name, result) = match &cli.command {
        Command::Speed(a) => ("speed", cmd_speed(&mut ctx, a)?),
        Command::Front(a) => ("front", cmd_front(&mut ctx, a)?),
        Command::Steady(a) => ("steady", cmd_steady(&mut ctx, a)?),
        Command::Nonmonotone(a) => ("nonmonotone", cmd_nonmonotone(&mut ctx, a)?),
        Command::Inviscid(a) => ("inviscid", cmd_inviscid(&mut ctx, a)?),
        Command::Sweep(a) => ("sweep", cmd_sweep(&mut ctx, a)?),
        Command::Trajectory(a) => ("trajectory", cmd_trajectory(&mut ctx, a)?),
    };
    let summary = json!({
        "command": name,
        "out_dir": ctx.out.display().to_string(),
        "files": ctx.files,
        "result": result,
    });
    Ok(serde_json::to_string_pretty(&summary)?)
}

fn positive(name: &str, values: &[f64]) -> Result<()> {
    for &v in values {
        ensure!(v.is_finite() && v > 0.0, "{name} must be positive and finite, got {v}");
    }
    Ok(())
}

/// Checks flag values before any output directory is touched.
fn validate(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Speed(a) => positive("--eps", &a.eps)?,
        Command::Front(a) => {
            positive("--eps", &a.eps)?;
            if let Some(c) = a.c {
                positive("--c", &[c])?;
            }
        }
        Command::Steady(a) => positive("--eps", &a.eps)?,
        Command::Nonmonotone(a) => {
            positive("--eps", &[a.eps])?;
            ensure!(a.c.is_finite(), "--c must be finite");
            ensure!(a.turns >= 1, "--turns must be at least 1");
        }
        Command::Inviscid(a) => positive("--c", &a.c)?,
        Command::Sweep(a) => {
            positive("--i0", &[a.i0])?;
            positive("--bump-width", &[a.bump_width])?;
            if let Some(g) = &a.eps_grid {
                parse_grid(g)?;
            }
        }
        Command::Trajectory(a) => {
            positive("--eps", &[a.eps])?;
            ensure!(a.c.is_finite() && (0.0..=1.0).contains(&a.anchor), "--anchor must lie in [0, 1]");
        }
    }
    Ok(())
}

/// `a,b,c`, `hi:lo:log`, `hi:lo:n:log` or `hi:lo:n:lin`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let grid = match parts.as_slice() {
        [list] => list.split(',').map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>()?,
        [hi, lo, kind] | [hi, lo, _, kind] => {
            let (hi, lo): (f64, f64) = (hi.parse()?, lo.parse()?);
            let n = if parts.len() == 4 { parts[2].parse::<usize>()? } else { GRID_POINTS };
            ensure!(n >= 2, "a grid needs at least 2 points");
            match *kind {
                "log" => {
                    ensure!(hi > 0.0 && lo > 0.0, "log grids need positive ends");
                    numeric::logspace(hi, lo, n)
                }
                "lin" => numeric::linspace(hi, lo, n),
                other => bail!("unknown grid spacing '{other}' (use log or lin)"),
            }
        }
        _ => bail!("cannot parse eps grid '{spec}'"),
    };
    positive("eps grid values", &grid)?;
    ensure!(grid.windows(2).all(|w| w[1] < w[0]), "eps grid must be strictly decreasing");
    Ok(grid)
}

fn family(f: Family) -> FrontFamily {
    match f {
        Family::Bistable => FrontFamily::Bistable,
        Family::Monostable => FrontFamily::Monostable,
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Bistable => "bistable",
        Family::Monostable => "monostable",
    }
}

fn cmd_speed(ctx: &mut Ctx, a: &crate::SpeedArgs) -> Result<Value> {
    let tol = ctx.speed_tol(a.tol);
    let mut results = Vec::new();
    for &eps in &a.eps {
        let r = match a.kind {
            Family::Bistable => shooting::critical_speed_bistable(&ctx.reaction, &ctx.flux, eps, tol, &ctx.shoot)?,
            Family::Monostable => {
                let mode = match a.method {
                    MonostableMethod::Linearized => MonostableMode::Linearized,
                    MonostableMethod::RequireIpof => MonostableMode::RequireIpof,
                    MonostableMethod::Shooting => MonostableMode::Shooting { rel_tol: tol },
                };
                shooting::critical_speed_monostable(&ctx.reaction, &ctx.flux, eps, mode, &ctx.shoot)?
            }
        };
        let value = serde_json::to_value(&r)?;
        ctx.write_json(&format!("speed_{}_eps{eps}.json", family_name(a.kind)), &value)?;
        results.push(value);
    }
    Ok(Value::Array(results))
}

/// `y = ε Q(v')` along the samples, `ε M0` where the profile is vertical.
fn reduced_points(p: &WaveProfile, flux: &SaturatingFlux) -> Vec<(f64, f64)> {
    let Some(eps) = p.eps else { return Vec::new() };
    let mut pts = Vec::new();
    for piece in &p.pieces {
        for i in 0..piece.len() {
            let (zt, vt) = (piece.z_tau[i], piece.v_tau[i]);
            let y = if zt > 0.0 { eps * flux.q(vt / zt) } else { eps * flux.m0() * vt.signum() };
            pts.push((piece.v[i], y));
        }
        pts.push((f64::NAN, f64::NAN));
    }
    pts
}

fn profile_points(p: &WaveProfile) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for piece in &p.pieces {
        pts.extend(piece.z.iter().copied().zip(piece.v.iter().copied()));
        pts.push((f64::NAN, f64::NAN));
    }
    pts
}

/// Overlay of profiles (left) and, when they carry ε, their `y(v)` (right).
fn profile_figure(title: &str, runs: &[(String, &WaveProfile)], flux: &SaturatingFlux, zmax: f64) -> String {
    let left = Panel {
        title: title.to_string(),
        x_label: "z".into(),
        y_label: "v".into(),
        series: runs.iter().map(|(l, p)| Series { label: l.clone(), points: profile_points(p) }).collect(),
        x_range: Some((-zmax, zmax)),
    };
    let mut panels = vec![left];
    if runs.iter().all(|(_, p)| p.eps.is_some()) {
        panels.push(Panel {
            title: "reduced solution".into(),
            x_label: "v".into(),
            y_label: "y".into(),
            series: runs.iter().map(|(l, p)| Series { label: l.clone(), points: reduced_points(p, flux) }).collect(),
            x_range: None,
        });
    }
    svg::figure(&panels)
}

/// Writes `<stem>.csv` and `<stem>.json` (metadata, residual, energy).
fn write_profile(ctx: &mut Ctx, stem: &str, p: &WaveProfile) -> Result<Value> {
    let residual = p.eps.map(|_| p.residual(&ctx.reaction, &ctx.flux));
    let mut meta = serde_json::to_value(p.meta(residual))?;
    meta["energy"] = json!(p.energy());
    ctx.write(&format!("{stem}.csv"), &p.to_csv())?;
    ctx.write_json(&format!("{stem}.json"), &meta)?;
    Ok(meta)
}

fn cmd_front(ctx: &mut Ctx, a: &crate::FrontArgs) -> Result<Value> {
    let tag = match (a.critical, a.c) {
        (Some(f), _) => format!("critical_{}", family_name(f)),
        (None, Some(c)) => format!("monostable_c{c}"),
        (None, None) => bail!("give --critical or --c"),
    };
    let mut fronts = Vec::new();
    for &eps in &a.eps {
        let p = match (a.critical, a.c) {
            (Some(f), _) => limits::critical_front(&ctx.reaction, &ctx.flux, family(f), eps, &ctx.profile)?,
            (None, Some(c)) => profiles::monostable_front(&ctx.reaction, &ctx.flux, eps, c, &ctx.profile)?,
            _ => unreachable!(),
        };
        fronts.push((eps, p));
    }
    let mut metas = Vec::new();
    for (eps, p) in &fronts {
        metas.push(write_profile(ctx, &format!("front_{tag}_eps{eps}"), p)?);
    }
    if ctx.plot {
        let runs: Vec<(String, &WaveProfile)> = fronts.iter().map(|(e, p)| (format!("ε = {e}"), p)).collect();
        let svg = profile_figure(&tag.replace('_', " "), &runs, &ctx.flux, a.zmax);
        ctx.write(&format!("front_{tag}.svg"), &svg)?;
    }
    Ok(Value::Array(metas))
}

fn cmd_steady(ctx: &mut Ctx, a: &crate::SteadyArgs) -> Result<Value> {
    let mut states = Vec::new();
    for &eps in &a.eps {
        states.push((eps, profiles::build_discontinuous_steady(&ctx.reaction, eps, &ctx.flux, &ctx.profile)?));
    }
    let mut metas = Vec::new();
    for (eps, p) in &states {
        metas.push(write_profile(ctx, &format!("steady_eps{eps}"), p)?);
    }
    if ctx.plot {
        let runs: Vec<(String, &WaveProfile)> = states.iter().map(|(e, p)| (format!("ε = {e}"), p)).collect();
        let svg = profile_figure("steady states with a jump", &runs, &ctx.flux, a.zmax);
        ctx.write("steady.svg", &svg)?;
    }
    Ok(Value::Array(metas))
}

fn cmd_nonmonotone(ctx: &mut Ctx, a: &crate::NonmonotoneArgs) -> Result<Value> {
    let start = match a.start {
        Some(Start::One) => GlueStart::FromOne,
        Some(Start::Zero) => GlueStart::FromZero,
        None if a.c == 0.0 => GlueStart::FromZero,
        None => GlueStart::FromOne,
    };
    let p = profiles::glue_nonmonotone(&ctx.reaction, &ctx.flux, a.eps, a.c, start, a.turns, &ctx.profile)?;
    let stem = format!("nonmonotone_eps{}_c{}", a.eps, a.c);
    let meta = write_profile(ctx, &stem, &p)?;
    if ctx.plot {
        let (lo, hi) = p.z_range();
        let zmax = lo.abs().max(hi.abs()).min(ctx.profile.window);
        let svg = profile_figure("glued nonmonotone wave", &[(format!("ε = {}, c = {}", a.eps, a.c), &p)], &ctx.flux, zmax);
        ctx.write(&format!("{stem}.svg"), &svg)?;
    }
    Ok(meta)
}

fn cmd_inviscid(ctx: &mut Ctx, a: &crate::InviscidArgs) -> Result<Value> {
    let mut fronts = Vec::new();
    for &c in &a.c {
        fronts.push((c, profiles::inviscid_front(&ctx.reaction, c, &ctx.profile)?));
    }
    let mut metas = Vec::new();
    for (c, p) in &fronts {
        metas.push(write_profile(ctx, &format!("inviscid_c{c}"), p)?);
    }
    if ctx.plot {
        let runs: Vec<(String, &WaveProfile)> = fronts.iter().map(|(c, p)| (format!("c = {c}"), p)).collect();
        ctx.write("inviscid.svg", &profile_figure("inviscid fronts", &runs, &ctx.flux, a.zmax))?;
    }
    Ok(Value::Array(metas))
}

fn write_report(ctx: &mut Ctx, stem: &str, r: &ConvergenceReport) -> Result<Value> {
    ctx.write(&format!("{stem}.csv"), &r.to_csv())?;
    let mut header = r.header_json()?;
    header.push('\n');
    ctx.write(&format!("{stem}.json"), &header)?;
    Ok(json!({
        "metric": r.metric,
        "eps_grid": r.eps_grid,
        "values": r.values,
        "limit_value": r.limit_value,
        "monotone_within_slack": r.is_monotone(limits::MONOTONE_SLACK),
    }))
}

fn report_figure(title: &str, y_label: &str, series: Vec<(String, &ConvergenceReport)>) -> String {
    svg::figure(&[Panel {
        title: title.into(),
        x_label: "log10 ε".into(),
        y_label: y_label.into(),
        series: series
            .into_iter()
            .map(|(label, r)| Series {
                label,
                points: r.eps_grid.iter().zip(&r.values).map(|(e, v)| (e.log10(), *v)).collect(),
            })
            .collect(),
        x_range: None,
    }])
}

fn cmd_sweep(ctx: &mut Ctx, a: &crate::SweepArgs) -> Result<Value> {
    let which = family(a.which);
    let name = family_name(a.which);
    let grid = match (&a.eps_grid, a.metric) {
        (Some(g), _) => parse_grid(g)?,
        (None, SweepMetric::Speed) => parse_grid("0.5:0.009:log")?,
        (None, SweepMetric::Step | SweepMetric::Pairing) if which == FrontFamily::Monostable => MONOSTABLE_GRID.to_vec(),
        (None, SweepMetric::Step | SweepMetric::Pairing) => BISTABLE_GRID.to_vec(),
        (None, SweepMetric::Fixed | SweepMetric::Energy) => FIXED_SPEED_GRID.to_vec(),
    };
    let (r, o) = (&ctx.reaction, &ctx.profile);
    match a.metric {
        SweepMetric::Speed => {
            let tol = a.tol.or(ctx.speed_tol).unwrap_or(1e-10);
            let sw = limits::speed_sweep(r, &ctx.flux, &grid, tol, o)?;
            let star = write_report(ctx, "sweep_speed_critical", &sw.critical)?;
            let plus = write_report(ctx, "sweep_speed_monostable", &sw.monostable)?;
            if ctx.plot {
                let svg = report_figure("critical speeds", "c", vec![("c*".into(), &sw.critical), ("c⁺".into(), &sw.monostable)]);
                ctx.write("sweep_speed.svg", &svg)?;
            }
            Ok(json!({ "critical": star, "monostable": plus, "sqrt_scaling_spread": sw.sqrt_scaling_spread() }))
        }
        SweepMetric::Step => {
            let report = limits::critical_front_convergence(r, &ctx.flux, which, &grid, a.i0, o)?;
            let stem = format!("sweep_step_{name}");
            let summary = write_report(ctx, &stem, &report)?;
            let mut fronts = Vec::new();
            for &eps in &grid {
                fronts.push((eps, limits::critical_front(&ctx.reaction, &ctx.flux, which, eps, &ctx.profile)?));
            }
            for (eps, p) in &fronts {
                write_profile(ctx, &format!("{stem}_front_eps{eps}"), p)?;
            }
            if ctx.plot {
                let runs: Vec<(String, &WaveProfile)> = fronts.iter().map(|(e, p)| (format!("ε = {e}"), p)).collect();
                let svg = profile_figure(&format!("critical {name} fronts"), &runs, &ctx.flux, 3.0);
                ctx.write(&format!("{stem}.svg"), &svg)?;
            }
            Ok(summary)
        }
        SweepMetric::Pairing => {
            let bump = Bump::new(0.0, a.bump_width);
            let report = limits::pairing_convergence(r, &ctx.flux, which, &grid, &bump, o)?;
            let stem = format!("sweep_pairing_{name}");
            let summary = write_report(ctx, &stem, &report)?;
            if ctx.plot {
                ctx.write(&format!("{stem}.svg"), &report_figure("pairings with a bump", "pairing", vec![(name.into(), &report)]))?;
            }
            Ok(summary)
        }
        SweepMetric::Fixed => {
            let z = numeric::linspace(-5.0, 5.0, limits::SUP_POINTS);
            let report = limits::fixed_speed_convergence(r, &ctx.flux, a.c, &grid, &z, o)?;
            let stem = format!("sweep_fixed_c{}", a.c);
            let mut summary = write_report(ctx, &stem, &report)?;
            summary["energies"] = json!(report.energies);
            if ctx.plot {
                ctx.write(&format!("{stem}.svg"), &report_figure("distance to the inviscid front", "sup |v - V|", vec![(format!("c = {}", a.c), &report)]))?;
            }
            Ok(summary)
        }
        SweepMetric::Energy => {
            let report = limits::energy_report(r, &ctx.flux, a.c, &grid, o)?;
            let stem = format!("sweep_energy_c{}", a.c);
            let summary = write_report(ctx, &stem, &report)?;
            if ctx.plot {
                ctx.write(&format!("{stem}.svg"), &report_figure("energy identity", "c ∫ v'²", vec![(format!("c = {}", a.c), &report)]))?;
            }
            Ok(summary)
        }
    }
}

fn cmd_trajectory(ctx: &mut Ctx, a: &crate::TrajectoryArgs) -> Result<Value> {
    let (direction, default_stop) = match a.direction {
        Dir::Forward => (Direction::Forward, 1.0),
        Dir::Backward => (Direction::Backward, 0.0),
    };
    let field = ReducedField::new(&ctx.reaction, &ctx.flux, a.eps, a.c)?;
    let traj = shoot(&field, a.anchor, direction, a.stop.unwrap_or(default_stop), &ctx.shoot)?;
    let stem = format!("trajectory_eps{}_c{}_from{}", a.eps, a.c, a.anchor);
    ctx.write(&format!("{stem}.csv"), &traj.to_csv())?;
    let meta = serde_json::to_value(traj.meta())?;
    ctx.write_json(&format!("{stem}.json"), &meta)?;
    if ctx.plot {
        let svg = svg::figure(&[Panel {
            title: format!("reduced solution, ε = {}, c = {}", a.eps, a.c),
            x_label: "v".into(),
            y_label: "y".into(),
            series: vec![Series { label: "y(v)".into(), points: traj.samples() }],
            x_range: None,
        }]);
        ctx.write(&format!("{stem}.svg"), &svg)?;
    }
    Ok(meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        assert_eq!(parse_grid("0.1, 0.01,0.005").unwrap(), vec![0.1, 0.01, 0.005]);
        let g = parse_grid("0.5:0.009:log").unwrap();
        assert_eq!(g.len(), GRID_POINTS);
        assert_eq!((g[0], g[9]), (0.5, 0.009));
        assert_eq!(parse_grid("1:0.5:3:lin").unwrap(), vec![1.0, 0.75, 0.5]);
        assert!(parse_grid("0.01,0.1").is_err());
        assert!(parse_grid("1:0:4:log").is_err());
        assert!(parse_grid("1:0.5:4:cubic").is_err());
        assert!(parse_grid("a,b").is_err());
    }
}
