use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use walk_decay::report::{
    analyze, default_directions, mtbound, parse_directions, plot_input, simulation, verify_with_runs, DecayReport,
    DirectionSpec, ErrorPayload, Input, NetworkReport, OracleRow, SimulationReport, Status, VerifyOptions,
};
use walk_decay::verify::{tail_rows, write_tail_csv, FitOptions, SimResult, TruncatedChain, BURN_IN_FRACTION};
use walk_decay::{Error, Result};

/// Tail decay rates of two-dimensional reflecting random walks.
#[derive(Parser)]
#[command(name = "walk-decay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conditions, stability, geometry, τ and decay rates for a model or network file.
    Analyze(AnalyzeArgs),
    /// `analyze` plus truncated-chain and Monte Carlo oracles.
    Verify(VerifyArgs),
    /// Geometric product-form bound and its tightness for a network file.
    Mtbound(Common),
    /// Monte Carlo tail estimates.
    Simulate(SimulateArgs),
    /// SVG of the level curves, the τ box, the convergence domain and direction rays.
    Plot(PlotArgs),
}

#[derive(Args)]
struct Common {
    /// Model or network JSON file.
    file: PathBuf,
    /// Rescale network rates so that λ + μ1 + μ2 = 1.
    #[arg(long)]
    normalize: bool,
    /// Write the JSON report here ("-" for stdout).
    #[arg(long, value_name = "out.json")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: Common,
    /// Directions such as "1,0;0,1;1/2,1"; decimals are rounded to multiples of 1e-6.
    #[arg(long)]
    directions: Option<String>,
    /// Also write an SVG plot.
    #[arg(long, value_name = "out.svg")]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, value_name = "R", default_value_t = 200)]
    replications: usize,
    #[arg(long, value_name = "H", default_value_t = 1_000_000)]
    horizon: u64,
    #[arg(long, value_name = "S", default_value_t = 1)]
    seed: u64,
    /// Burn-in as a fraction of the horizon.
    #[arg(long, default_value_t = BURN_IN_FRACTION)]
    burn_in: f64,
    /// Write tail curves of `L_k` as CSV (level, tail_probability, source).
    #[arg(long, value_name = "out.csv")]
    csv: Option<PathBuf>,
    /// Coordinate `k` (1 or 2) exported by `--csv`.
    #[arg(long, value_name = "K", default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    csv_coordinate: u8,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    analyze: AnalyzeArgs,
    #[arg(long, value_name = "N", default_value_t = 80)]
    truncation: usize,
    #[command(flatten)]
    sim: SimArgs,
    /// Fit window as fractions of N.
    #[arg(long, default_value_t = 0.2)]
    window_lo: f64,
    #[arg(long, default_value_t = 0.7)]
    window_hi: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args)]
struct PlotArgs {
    file: PathBuf,
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    directions: Option<String>,
    /// Output file ("-" or absent for stdout).
    #[arg(long, value_name = "out.svg")]
    plot: Option<PathBuf>,
}

fn write_out(path: &PathBuf, text: &str) -> Result<()> {
    if path.as_os_str() == "-" {
        print!("{text}");
        return Ok(());
    }
    File::create(path)?.write_all(text.as_bytes())?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<()> {
    if let Some(p) = path {
        write_out(p, &(serde_json::to_string_pretty(value)? + "\n"))?;
    }
    Ok(())
}

fn directions(arg: &Option<String>) -> Result<Vec<DirectionSpec>> {
    match arg {
        Some(s) => parse_directions(s),
        None => Ok(default_directions()),
    }
}

fn print_report(r: &DecayReport) {
    println!("status: {:?}", r.status);
    if let Some(s) = &r.stability {
        println!(
            "stability: case {:?}, <m,m1⊥> = {:.6}, <m,m2⊥> = {:.6}",
            s.case, s.inner_products[0], s.inner_products[1]
        );
    }
    if let Some(t) = &r.tau {
        println!("classification: {:?}", t.classification);
        println!(
            "tau: ({:.6}, {:.6})  [iteration: ({:.6}, {:.6})]",
            t.direct[0], t.direct[1], t.iteration[0], t.iteration[1]
        );
    }
    if let Some(a) = r.alpha {
        println!("alpha: ({:.6}, {:.6})", a[0], a[1]);
    }
    for d in &r.directions {
        let p = &d.rate;
        println!(
            "  c=({}): alpha_c = {:.6}  active {:?}  delta {}  {:?}",
            d.direction.text,
            p.alpha,
            p.active_constraint,
            p.unit_delta.map_or("-".into(), |x| format!("{x:.6}")),
            p.exactness
        );
    }
    if let Some(n) = &r.network {
        print_network(n);
    }
    if let Some(o) = &r.oracle {
        println!(
            "oracles: N = {}, residual {:.3e}, {} x {} steps, seed {}",
            o.truncation, o.solver_residual, o.replications, o.horizon, o.seed
        );
        print_rows(&o.rows);
    }
}

fn print_rows(rows: &[OracleRow]) {
    for row in rows {
        let slope = row.fit.as_ref().map_or("-".into(), |f| format!("{:.6}", f.slope));
        let reference = row.reference.map_or("-".into(), |x| format!("{x:.6}"));
        let err = row.relative_error.map_or("-".into(), |x| format!("{:.2}%", 100.0 * x));
        println!(
            "  {:<48} slope {slope:>10}  rate {reference:>9}  err {err:>7}  {:?}",
            row.label, row.status
        );
    }
}

fn print_network(n: &NetworkReport) {
    println!("utilizations: ({:.6}, {:.6})", n.utilizations[0], n.utilizations[1]);
    if n.boundary_routing {
        println!("note: a routing probability is zero");
    }
    if let Some(b) = &n.mt_bound {
        println!(
            "h: ({:.6}, {:.6})  eta: ({:.6}, {:.6})",
            b.h[0], b.h[1], b.eta[0], b.eta[1]
        );
        for k in 0..2 {
            println!(
                "  node {}: tight = {}  ({})",
                k + 1,
                b.tightness.tight[k],
                b.tightness.reasons[k]
            );
        }
    }
    if let Some(note) = &n.mt_note {
        println!("bound: {note}");
    }
}

fn fail_payload(p: &ErrorPayload) -> ExitCode {
    eprintln!("{}", serde_json::to_string(p).unwrap_or_default());
    ExitCode::from(p.exit_code as u8)
}

/// Report to stdout and file, then the status-dependent exit code.
fn finish(r: &DecayReport, json: &Option<PathBuf>) -> Result<ExitCode> {
    if !to_stdout(json) {
        print_report(r);
    }
    write_json(json, r)?;
    Ok(match ErrorPayload::from_report(r) {
        Some(p) => fail_payload(&p),
        None => ExitCode::SUCCESS,
    })
}

fn gate(input: &Input) -> Result<Option<ExitCode>> {
    let r = analyze(input, &[])?;
    Ok((r.status != Status::Stable).then(|| fail_payload(&ErrorPayload::from_report(&r).expect("non-stable status"))))
}

fn write_csv(args: &SimArgs, chain: Option<&TruncatedChain>, sim: Option<&SimResult>) -> Result<()> {
    let Some(p) = &args.csv else { return Ok(()) };
    write_tail_csv(File::create(p)?, &tail_rows(chain, sim, args.csv_coordinate as usize))
}

fn to_stdout(json: &Option<PathBuf>) -> bool {
    json.as_ref().is_some_and(|p| p.as_os_str() == "-")
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze(a) => {
            let input = Input::load(&a.common.file, a.common.normalize)?;
            let dirs = directions(&a.directions)?;
            let r = analyze(&input, &dirs)?;
            if let (Some(p), Status::Stable) = (&a.plot, r.status) {
                write_out(p, &plot_input(&input, &dirs)?)?;
            }
            finish(&r, &a.common.json)
        }
        Command::Verify(v) => {
            let a = &v.analyze;
            let input = Input::load(&a.common.file, a.common.normalize)?;
            let dirs = directions(&a.directions)?;
            let opts = VerifyOptions {
                truncation: v.truncation,
                replications: v.sim.replications,
                horizon: v.sim.horizon,
                seed: v.sim.seed,
                burn_in_fraction: v.sim.burn_in,
                fit: FitOptions {
                    window: [v.window_lo, v.window_hi],
                    ..FitOptions::default()
                },
            };
            let (r, runs) = verify_with_runs(&input, &dirs, &opts)?;
            if let Some(runs) = &runs {
                write_csv(&v.sim, Some(&runs.chain), runs.sim.as_ref())?;
            }
            if let (Some(p), Status::Stable) = (&a.plot, r.status) {
                write_out(p, &plot_input(&input, &dirs)?)?;
            }
            finish(&r, &a.common.json)
        }
        Command::Mtbound(c) => {
            let Input::Network(ns) = Input::load(&c.file, c.normalize)? else {
                return Err(Error::InvalidNetwork("mtbound needs a network file".into()));
            };
            let r = mtbound(&ns)?;
            if !to_stdout(&c.json) {
                print_network(&r);
            }
            write_json(&c.json, &r)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate(s) => {
            let input = Input::load(&s.common.file, s.common.normalize)?;
            if let Some(code) = gate(&input)? {
                return Ok(code);
            }
            let r: SimulationReport = simulation(&input, s.sim.replications, s.sim.horizon, s.sim.seed, s.sim.burn_in)?;
            if !to_stdout(&s.common.json) {
                println!(
                    "{} replications x {} steps (burn-in {}), seed {}",
                    r.result.replications, r.result.horizon, r.result.burn_in, r.result.seed
                );
                print_rows(&r.rows);
            }
            write_csv(&s.sim, None, Some(&r.result))?;
            write_json(&s.common.json, &r)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot(p) => {
            let input = Input::load(&p.file, p.normalize)?;
            if let Some(code) = gate(&input)? {
                return Ok(code);
            }
            let svg = plot_input(&input, &directions(&p.directions)?)?;
            write_out(p.plot.as_ref().unwrap_or(&PathBuf::from("-")), &svg)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => fail_payload(&ErrorPayload::from_error(&e)),
    }
}
