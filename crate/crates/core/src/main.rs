use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use microtorsion::checks::{run_checks, ChecksSettings};
use microtorsion::config::{Overrides, RunConfig, Scenario};
use microtorsion::dispersion::{analyze, cutoffs, gap_report_text, write_branches_csv, CutoffSet};
use microtorsion::equilibrium::{equilibrium_state, BaselineMode};
use microtorsion::error::{Error, Result};
use microtorsion::model::Model;
use microtorsion::output::{fmt_num, header_line};
use microtorsion::sim1d::{
    energy_audit, gaussian_pulse, gap_forcing, plane_wave_probe, write_series_csv, write_snapshot_csv, Grid1D,
    ProbeBranch, Simulation,
};
use microtorsion::svg::dispersion_plots;
use microtorsion::{MaterialParams, Relaxation};

/// Dispersion analysis, identity checks and 1D simulations for a
/// torsion-based model of microstructured elastic solids.
///
/// Defaults reproduce the reference parameter set (ρ0 = 2000 kg/m³,
/// C0 = Cs = 600 m/s, c0 = cs = 100 m/s, Γ = γ = 3, ε = 2e-5, μ = 0.5,
/// α = β = 100 1/m). Every key of the TOML config is optional and unknown
/// keys are rejected; see README.md for the full schema.
///
/// Exit codes: 0 ok, 1 check failure, 2 configuration error, 3 numerical
/// failure.
#[derive(Parser, Debug)]
#[command(name = "microtorsion", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Relaxation parameter α (1/m), or `inf`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_relaxation)]
    alpha: Option<Relaxation>,
    /// Relaxation parameter β (1/m), or `inf`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_relaxation)]
    beta: Option<Relaxation>,
    /// Energy normalization: raw or stress_free [default: raw].
    #[arg(long, global = true, value_parser = parse_baseline)]
    baseline: Option<BaselineMode>,
    /// Output directory [default: out].
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for the random samples of `checks` [default: 20240601].
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Branches CSV, band-gap report and SVG plots over the k grid
    /// (default 400 log-spaced points on [0.1, 1e4] 1/m).
    Dispersion,
    /// Band gap against β, from beta_start down to beta_end
    /// (default 100 → 33.18 1/m, 20 points).
    SweepBeta,
    /// Force gradients, source cancellation, momentum-flux symmetry and
    /// convexity on seeded random samples (default 1000 states, 50
    /// parameter sets). Exits with 1 if any check fails.
    Checks,
    /// Periodic 1D run: equilibrium, plane_wave, gap_forcing or pulse.
    Simulate {
        /// Overrides `simulate.scenario`.
        #[arg(long, value_parser = parse_scenario)]
        scenario: Option<Scenario>,
        /// Overrides `simulate.plane_wave.branch`.
        #[arg(long, value_parser = parse_branch)]
        branch: Option<ProbeBranch>,
    },
    /// Closed-form cutoff frequencies and speeds.
    Cutoffs,
}

fn parse_relaxation(s: &str) -> std::result::Result<Relaxation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_baseline(s: &str) -> std::result::Result<BaselineMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    toml::Value::String(s.replace('-', "_"))
        .try_into()
        .map_err(|_| format!("unknown scenario `{s}` (equilibrium, plane_wave, gap_forcing, pulse)"))
}

fn parse_branch(s: &str) -> std::result::Result<ProbeBranch, String> {
    toml::Value::String(s.replace('-', "_"))
        .try_into()
        .map_err(|_| format!("unknown branch `{s}` (shear_acoustic, longitudinal_acoustic)"))
}

/// Resolved configuration plus what every command needs to write files.
struct Ctx {
    cfg: RunConfig,
    header: String,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.cfg.output_dir.join(name)
    }

    fn write(&self, name: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<PathBuf> {
        let path = self.path(name);
        let mut w = BufWriter::new(fs::File::create(&path).map_err(|e| io_error(&path, e))?);
        body(&mut w)?;
        w.flush().map_err(|e| io_error(&path, e))?;
        Ok(path)
    }

    fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        self.write(name, |w| Ok(w.write_all(text.as_bytes())?))
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

enum Outcome {
    Ok,
    ChecksFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        alpha: cli.alpha,
        beta: cli.beta,
        baseline: cli.baseline,
        output_dir: cli.out.clone(),
        seed: cli.seed,
    });
    if let Command::Simulate { scenario, branch } = &cli.command {
        if let Some(s) = scenario {
            cfg.simulate.scenario = *s;
        }
        if let Some(b) = branch {
            cfg.simulate.plane_wave.branch = *b;
        }
    }
    cfg.validate()?;
    let resolved = cfg.resolved_toml()?;
    let header = header_line(&cfg.hash()?, cfg.baseline);
    fs::create_dir_all(&cfg.output_dir).map_err(|e| io_error(&cfg.output_dir, e))?;
    let ctx = Ctx { cfg, header };
    ctx.write_text("config_resolved.toml", &format!("{}\n{resolved}", ctx.header))?;

    match cli.command {
        Command::Dispersion => cmd_dispersion(&ctx),
        Command::SweepBeta => cmd_sweep_beta(&ctx),
        Command::Checks => cmd_checks(&ctx),
        Command::Simulate { .. } => cmd_simulate(&ctx),
        Command::Cutoffs => cmd_cutoffs(&ctx),
    }
}

fn cmd_dispersion(ctx: &Ctx) -> Result<Outcome> {
    let c = &ctx.cfg;
    let k = c.dispersion.k_grid.values()?;
    let a = analyze(&c.params, c.baseline, &k)?;
    let p = ctx.write("branches.csv", |w| write_branches_csv(&a.sweep, &ctx.header, w))?;
    println!("wrote {}", p.display());
    let report = gap_report_text(&a.sweep, &a.gaps, &ctx.header);
    let p = ctx.write_text("gap_report.txt", &report)?;
    println!("wrote {}", p.display());
    if c.dispersion.svg {
        let names = ["dispersion_omega.svg", "dispersion_phase.svg", "dispersion_group.svg"];
        for (name, svg) in names.iter().zip(dispersion_plots(&a.sweep.branches, &a.gaps)) {
            let p = ctx.write_text(name, &format!("<!-- {} -->\n{svg}", ctx.header.trim_start_matches("# ")))?;
            println!("wrote {}", p.display());
        }
    }
    match a.gaps.resolved().next() {
        Some(_) => {
            for g in a.gaps.resolved() {
                println!("band gap [{:.6e}, {:.6e}] rad/s, width {:.6e}", g.low, g.high, g.width());
            }
        }
        None => println!("no band gap"),
    }
    Ok(Outcome::Ok)
}

fn cmd_sweep_beta(ctx: &Ctx) -> Result<Outcome> {
    let c = &ctx.cfg;
    let sb = &c.sweep_beta;
    let k = sb.k_grid.values()?;
    let n = sb.points;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let beta = sb.beta_start + (sb.beta_end - sb.beta_start) * i as f64 / (n - 1) as f64;
        let p = c.params.with_beta(Relaxation::Finite(beta));
        let a = analyze(&p, c.baseline, &k)?;
        let gap = a.gaps.widest().copied();
        rows.push((beta, cutoffs(&p), gap));
        eprintln!("beta {beta:.6} done");
    }
    let decreasing_beta = sb.beta_end < sb.beta_start;
    let mut monotone = true;
    let path = ctx.write("sweep_beta.csv", |w| {
        writeln!(w, "{}", ctx.header)?;
        writeln!(
            w,
            "beta,omega_inf,omega_0,gap_width_closed_form,gap_low,gap_high,gap_width,gap_resolved,acoustic_ceiling_vanishing,monotone"
        )?;
        let mut prev: Option<f64> = None;
        for (beta, cut, gap) in &rows {
            let width = gap.map_or(0.0, |g| g.width());
            let step_ok = prev.is_none_or(|p| if decreasing_beta { width <= p } else { width >= p });
            monotone &= step_ok;
            prev = Some(width);
            let vanishing = match (cut.omega_inf, cut.omega0) {
                (Some(wi), Some(w0)) => wi < 0.05 * w0,
                _ => false,
            };
            let opt = |x: Option<f64>| x.map_or_else(|| "absent".to_string(), fmt_num);
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                fmt_num(*beta),
                opt(cut.omega_inf),
                opt(cut.omega0),
                opt(cut.gap_width()),
                opt(gap.map(|g| g.low)),
                opt(gap.map(|g| g.high)),
                fmt_num(width),
                gap.is_some_and(|g| g.resolved),
                vanishing,
                step_ok
            )?;
        }
        writeln!(w, "# monotone={monotone}")?;
        Ok(())
    })?;
    println!("wrote {}", path.display());
    println!(
        "gap width {} monotonically as beta goes from {} to {}: {monotone}",
        if decreasing_beta { "decreases" } else { "increases" },
        sb.beta_start,
        sb.beta_end
    );
    Ok(Outcome::Ok)
}

fn cmd_checks(ctx: &Ctx) -> Result<Outcome> {
    let c = &ctx.cfg;
    let report = run_checks(
        &c.params,
        c.baseline,
        &ChecksSettings {
            random_states: c.checks.random_states,
            param_samples: c.checks.param_samples,
            convexity_margin: c.checks.convexity_margin,
            seed: c.seed,
        },
    )?;
    let mut text = format!("{}\n", ctx.header);
    for o in &report.outcomes {
        let line = format!(
            "{} {} measured {} tolerance {} ({})",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            fmt_num(o.measured),
            fmt_num(o.tolerance),
            o.detail
        );
        println!("{line}");
        text.push_str(&line);
        text.push('\n');
    }
    let p = ctx.write_text("checks_report.txt", &text)?;
    println!("wrote {}", p.display());
    Ok(if report.passed() { Outcome::Ok } else { Outcome::ChecksFailed })
}

fn cutoff_text(c: &CutoffSet, p: &MaterialParams) -> String {
    let opt = |x: Option<f64>| x.map_or_else(|| "absent".to_string(), fmt_num);
    let mut s = String::new();
    for (k, v) in [
        ("alpha", p.alpha.to_string()),
        ("beta", p.beta.to_string()),
        ("omega_inf", opt(c.omega_inf)),
        ("omega_0", opt(c.omega0)),
        ("omega_s", opt(c.omega_s)),
        ("omega_l", opt(c.omega_l)),
        ("gap_width", opt(c.gap_width())),
        ("beta_crit", opt(c.beta_crit)),
        ("V_l", opt(c.v_l)),
        ("V_s", opt(c.v_s)),
        ("C_l", fmt_num(c.c_l)),
        ("C_s", fmt_num(c.c_s)),
        ("c_inf", fmt_num(c.c_inf)),
    ] {
        s.push_str(&format!("{k} = {v}\n"));
    }
    s
}

fn cmd_cutoffs(ctx: &Ctx) -> Result<Outcome> {
    let p = &ctx.cfg.params;
    let text = cutoff_text(&cutoffs(p), p);
    print!("{text}");
    ctx.write_text("cutoffs.txt", &format!("{}\n{text}", ctx.header))?;
    Ok(Outcome::Ok)
}

fn cmd_simulate(ctx: &Ctx) -> Result<Outcome> {
    let c = &ctx.cfg;
    let s = &c.simulate;
    let mut report = format!("{}\nscenario = {}\n", ctx.header, scenario_name(s.scenario));
    match s.scenario {
        Scenario::PlaneWave => {
            let r = plane_wave_probe(&c.params, c.baseline, &s.plane_wave)?;
            report.push_str(&format!(
                "branch = {}\nk = {}\npredicted_speed = {}\nmeasured_speed = {}\nrelative_error = {}\ntracked_field = {}\namplitude_ratio = {}\neigen_residual = {}\nsteps = {}\n",
                branch_name(s.plane_wave.branch),
                fmt_num(r.k),
                fmt_num(r.predicted_speed),
                fmt_num(r.measured_speed),
                fmt_num(r.relative_error),
                r.tracked_field,
                fmt_num(r.amplitude_ratio),
                fmt_num(r.eigen_residual),
                r.steps
            ));
            ctx.write("plane_wave_phase.csv", |w| {
                writeln!(w, "{}", ctx.header)?;
                writeln!(w, "time,phase,amplitude")?;
                for ((t, ph), a) in r.times.iter().zip(&r.phases).zip(&r.amplitudes) {
                    writeln!(w, "{},{},{}", fmt_num(*t), fmt_num(*ph), fmt_num(*a))?;
                }
                Ok(())
            })?;
        }
        Scenario::GapForcing => {
            let r = gap_forcing(&c.params, c.baseline, &s.gap_forcing)?;
            report.push_str(&format!(
                "omega = {}\nsource_amplitude = {}\nratio = {}\nthreshold = {}\nevanescent = {}\n",
                fmt_num(r.omega),
                fmt_num(r.source_amplitude),
                fmt_num(r.ratio),
                fmt_num(s.gap_forcing.threshold),
                r.evanescent
            ));
            ctx.write("gap_forcing_profile.csv", |w| {
                writeln!(w, "{}", ctx.header)?;
                writeln!(w, "x,amplitude")?;
                for (x, a) in r.x.iter().zip(&r.profile) {
                    writeln!(w, "{},{}", fmt_num(*x), fmt_num(*a))?;
                }
                Ok(())
            })?;
        }
        Scenario::Equilibrium | Scenario::Pulse => {
            let model = Model::new(c.params, c.baseline)?;
            let grid = Grid1D::new(s.n, s.length)?;
            let rest = equilibrium_state(&c.params);
            let cells = if s.scenario == Scenario::Pulse {
                gaussian_pulse(&model, &grid, &s.pulse.field, s.pulse.amplitude, s.pulse.width)?
            } else {
                vec![rest.to_fields(); grid.n]
            };
            let mut sim = Simulation::new(model, grid, s.sim, cells)?;
            let times: Vec<f64> = (1..=s.outputs)
                .map(|i| s.sim.t_end * i as f64 / s.outputs as f64)
                .collect();
            let audit = energy_audit(&mut sim, &times)?;
            report.push_str(&format!(
                "t_end = {}\nsteps = {}\nenergy_drift = {}\nmax_energy_drift = {}\nperturbation_energy_drift = {}\nmomentum_drift = {}\n",
                fmt_num(sim.time()),
                sim.steps(),
                fmt_num(audit.drift),
                fmt_num(audit.max_drift),
                audit.perturbation_drift.map_or_else(|| "none".into(), fmt_num),
                fmt_num(audit.momentum_drift)
            ));
            ctx.write("simulate_series.csv", |w| write_series_csv(&audit, &ctx.header, w))?;
            if s.snapshot {
                ctx.write("simulate_snapshot.csv", |w| write_snapshot_csv(&sim, &ctx.header, w))?;
            }
        }
    }
    print!("{}", report.lines().skip(1).map(|l| format!("{l}\n")).collect::<String>());
    let p = ctx.write_text("simulate_report.txt", &report)?;
    println!("wrote {}", p.display());
    Ok(Outcome::Ok)
}

fn scenario_name(s: Scenario) -> &'static str {
    match s {
        Scenario::Equilibrium => "equilibrium",
        Scenario::PlaneWave => "plane_wave",
        Scenario::GapForcing => "gap_forcing",
        Scenario::Pulse => "pulse",
    }
}

fn branch_name(b: ProbeBranch) -> &'static str {
    match b {
        ProbeBranch::ShearAcoustic => "shear_acoustic",
        ProbeBranch::LongitudinalAcoustic => "longitudinal_acoustic",
    }
}
