//! `a2g` — occurrence probabilities of the LoS, ground-specular and
//! building-scattering paths of air-to-ground links in stochastic urban
//! scenarios, with sweep, solver and Monte Carlo verification commands.

mod config;

use a2g_core::{
    bs_breakdown, bs_optimal_distance, bs_probability, evaluate_paths, generate_scene,
    gs_breakdown, gs_probability, los_breakdown, los_probability, mc_geometric, mc_model_faithful,
    mcd, sweep, BsOptFlag, McdFlag, PathKind, ScenarioPreset, SweepAxis, SweepTable,
};
use clap::{Parser, Subcommand, ValueEnum};
use config::{CommonArgs, FileConfig, RunConfig};
use std::io::Write;
use std::process::ExitCode;

/// Exit codes: 0 success/agreement, 1 verification failure, 2 usage error,
/// 3 I/O error.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Verification(m) | CliError::Io(m) => m,
        }
    }
}

impl From<a2g_core::ModelError> for CliError {
    fn from(e: a2g_core::ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "a2g",
    version,
    about = "Path-occurrence probabilities for air-to-ground links in stochastic urban scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Los,
    Gs,
    Bs,
}

impl From<PathArg> for PathKind {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Los => PathKind::Los,
            PathArg::Gs => PathKind::Gs,
            PathArg::Bs => PathKind::Bs,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Distance,
    Altitude,
    Elevation,
    Frequency,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Distance => SweepAxis::Distance,
            AxisArg::Altitude => SweepAxis::Altitude,
            AxisArg::Elevation => SweepAxis::Elevation,
            AxisArg::Frequency => SweepAxis::Frequency,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Model,
    Geometric,
}

#[derive(Subcommand)]
enum Command {
    /// Print the three path probabilities for one link.
    Prob {
        /// Also print the per-building factor breakdown.
        #[arg(long)]
        explain: bool,
        /// Machine-readable JSON output.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the models along an axis and emit a table.
    Sweep {
        /// Swept quantity.
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// First axis value (m, m, degrees or Hz depending on the axis).
        #[arg(long)]
        start: f64,
        /// Last axis value, inclusive.
        #[arg(long)]
        stop: f64,
        /// Axis step.
        #[arg(long)]
        step: f64,
        /// Output format.
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Maximum communication distance at a probability threshold.
    Mcd {
        #[arg(long, value_enum)]
        path: PathArg,
        #[arg(long)]
        threshold: f64,
        #[arg(long)]
        json: bool,
    },
    /// Distance maximizing the building-scattering probability.
    BsOpt {
        #[arg(long)]
        json: bool,
    },
    /// Compare a closed-form probability against a Monte Carlo oracle.
    Verify {
        #[arg(long, value_enum)]
        path: PathArg,
        /// model: replay the model's own clearance events;
        /// geometric: explicit grid-city simulation.
        #[arg(long, value_enum, default_value = "model")]
        oracle: OracleArg,
    },
    /// List the built-in scenario presets with their derived widths.
    Presets,
    /// Generate a city realization and dump it as text.
    SceneDump {
        /// Scene side length, m.
        #[arg(long, default_value_t = 1000.0)]
        extent: f64,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::from_env()?;
    let cfg = RunConfig::resolve(&cli.common, &file)?;
    match cli.command {
        Command::Prob { explain, json } => cmd_prob(&cfg, explain, json),
        Command::Sweep {
            axis,
            start,
            stop,
            step,
            format,
            out,
        } => cmd_sweep(&cfg, axis.into(), start, stop, step, format, out.as_deref()),
        Command::Mcd {
            path,
            threshold,
            json,
        } => cmd_mcd(&cfg, path.into(), threshold, json),
        Command::BsOpt { json } => cmd_bs_opt(&cfg, json),
        Command::Verify { path, oracle } => cmd_verify(&cfg, path.into(), oracle),
        Command::Presets => cmd_presets(),
        Command::SceneDump { extent, out } => cmd_scene_dump(&cfg, extent, out.as_deref()),
    }
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn cmd_prob(cfg: &RunConfig, explain: bool, json: bool) -> Result<(), CliError> {
    let link = cfg.link()?;
    let probs = evaluate_paths(&link, &cfg.params, cfg.bs_mode)?;
    if json {
        let value = serde_json::json!({
            "p_los": round6(probs.p_los),
            "p_gs": round6(probs.p_gs),
            "p_bs": round6(probs.p_bs),
        });
        println!("{value}");
        return Ok(());
    }
    println!("p_los {:.6}", probs.p_los);
    println!("p_gs {:.6}", probs.p_gs);
    println!("p_bs {:.6}", probs.p_bs);
    if explain {
        let los = los_breakdown(&link, &cfg.params);
        println!("# los factors ({} buildings)", los.len());
        println!("# idx position_m clearance_m factor");
        for r in &los {
            println!(
                "{} {:.1} {:.1} {:.6}",
                r.index, r.position, r.clearance_height, r.factor
            );
        }
        let gs = gs_breakdown(&link, &cfg.params)?;
        println!("# gs factors ({} buildings)", gs.len());
        println!("# idx segment position_m clearance_m factor");
        for r in &gs {
            println!(
                "{} {} {:.1} {:.1} {:.6}",
                r.index,
                if r.incident { "incident" } else { "reflection" },
                r.position,
                r.clearance_height,
                r.factor
            );
        }
        let bs = bs_breakdown(&link, &cfg.params, cfg.bs_mode)?;
        println!("# bs candidates ({})", bs.len());
        println!("# idx position_m entry_m p_scatter n_front p_front n_behind p_behind");
        for r in &bs {
            println!(
                "{} {:.1} {:.1} {:.6} {} {:.6} {} {:.6}",
                r.index,
                r.position,
                r.entry_height,
                r.p_scatter,
                r.n_front,
                r.p_front_product,
                r.n_behind,
                r.p_behind_product
            );
        }
    }
    Ok(())
}

fn cmd_sweep(
    cfg: &RunConfig,
    axis: SweepAxis,
    start: f64,
    stop: f64,
    step: f64,
    format: FormatArg,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    if !(step > 0.0) || !(stop >= start) {
        return Err(CliError::Usage(
            "sweep needs step > 0 and stop >= start".into(),
        ));
    }
    let mut values = Vec::new();
    let mut k = 0u64;
    loop {
        let v = start + k as f64 * step;
        if v > stop + 1e-9 * step {
            break;
        }
        values.push(v);
        k += 1;
    }
    let table = sweep(
        axis,
        &values,
        &cfg.template(),
        cfg.distance,
        &cfg.params,
        cfg.bs_mode,
    )?;
    let rendered = match format {
        FormatArg::Csv => render_csv(&table),
        FormatArg::Json => render_json(cfg, &table),
    };
    write_output(out, &rendered)
}

fn render_csv(table: &SweepTable) -> String {
    let mut out = String::from("axis_name,axis_value,p_los,p_gs,p_bs\n");
    for (v, row) in table.values.iter().zip(&table.rows) {
        out.push_str(&format!(
            "{},{:.1},{:.6},{:.6},{:.6}\n",
            table.axis.name(),
            v,
            row.p_los,
            row.p_gs,
            row.p_bs
        ));
    }
    out
}

fn render_json(cfg: &RunConfig, table: &SweepTable) -> String {
    let rows: Vec<serde_json::Value> = table
        .values
        .iter()
        .zip(&table.rows)
        .map(|(v, row)| {
            serde_json::json!({
                "axis_name": table.axis.name(),
                "axis_value": v,
                "p_los": round6(row.p_los),
                "p_gs": round6(row.p_gs),
                "p_bs": round6(row.p_bs),
            })
        })
        .collect();
    let value = serde_json::json!({
        "metadata": {
            "axis": table.axis.name(),
            "scenario": cfg.preset_name,
            "alpha": cfg.params.alpha(),
            "beta": cfg.params.beta(),
            "gamma": cfg.params.gamma(),
            "h_tx": cfg.h_tx,
            "h_rx": cfg.h_rx,
            "frequency": cfg.frequency,
            "bs_mode": cfg.bs_mode.to_string(),
        },
        "rows": rows,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("serializable");
    text.push('\n');
    text
}

fn write_output(path: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
    }
}

fn cmd_mcd(cfg: &RunConfig, path: PathKind, threshold: f64, json: bool) -> Result<(), CliError> {
    let result = mcd(
        path,
        threshold,
        &cfg.template(),
        &cfg.params,
        cfg.bs_mode,
        cfg.d_max,
        cfg.grid_step,
    )?;
    let flag = match result.flag {
        McdFlag::Converged => "converged",
        McdFlag::Saturated => "saturated",
        McdFlag::BelowThreshold => "below-threshold",
    };
    if json {
        println!(
            "{}",
            serde_json::json!({"mcd_m": (result.distance * 10.0).round() / 10.0, "flag": flag})
        );
    } else {
        println!("mcd_m {:.1}", result.distance);
        println!("flag {flag}");
    }
    Ok(())
}

fn cmd_bs_opt(cfg: &RunConfig, json: bool) -> Result<(), CliError> {
    let result = bs_optimal_distance(
        &cfg.template(),
        &cfg.params,
        cfg.bs_mode,
        cfg.d_max,
        cfg.grid_step,
    )?;
    let flag = match result.flag {
        BsOptFlag::Located => "located",
        BsOptFlag::Flat => "flat",
    };
    if json {
        println!(
            "{}",
            serde_json::json!({
                "optimal_distance_m": (result.distance * 10.0).round() / 10.0,
                "p_bs": round6(result.probability),
                "flag": flag,
            })
        );
    } else {
        println!("optimal_distance_m {:.1}", result.distance);
        println!("p_bs {:.6}", result.probability);
        println!("flag {flag}");
    }
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, path: PathKind, oracle: OracleArg) -> Result<(), CliError> {
    let link = cfg.link()?;
    let analytic = match path {
        PathKind::Los => los_probability(&link, &cfg.params),
        PathKind::Gs => gs_probability(&link, &cfg.params)?,
        PathKind::Bs => bs_probability(&link, &cfg.params, cfg.bs_mode)?,
    };
    let (oracle_name, default_trials) = match oracle {
        OracleArg::Model => ("model", 100_000),
        OracleArg::Geometric => ("geometric", 1_000),
    };
    let trials = cfg.trials.unwrap_or(default_trials);
    if trials < 100 {
        return Err(CliError::Usage(format!(
            "verification needs at least 100 trials, got {trials}"
        )));
    }
    let est = match oracle {
        OracleArg::Model => {
            mc_model_faithful(path, &link, &cfg.params, trials, cfg.seed, cfg.bs_mode)?
        }
        OracleArg::Geometric => mc_geometric(path, &link, &cfg.params, trials, cfg.seed)?,
    };
    let z = z_score(analytic, est.p_hat, trials);
    println!("path {path}");
    println!("oracle {oracle_name}");
    println!("analytic {analytic:.6}");
    println!("estimate {:.6}", est.p_hat);
    println!("stderr {:.6}", est.stderr);
    println!("z {z:.2}");
    let agree = match oracle {
        OracleArg::Model => z.abs() <= 4.0,
        OracleArg::Geometric => {
            // The grid scene is only statistically equivalent to the model's
            // assumptions; compare on an absolute band instead.
            let band = 0.1;
            println!("band {band:.6}");
            println!("abs_diff {:.6}", (est.p_hat - analytic).abs());
            (est.p_hat - analytic).abs() <= band
        }
    };
    if agree {
        println!("verdict agree");
        Ok(())
    } else {
        println!("verdict disagree");
        Err(CliError::Verification(format!(
            "{oracle_name} oracle disagrees with the closed form (analytic {analytic:.6}, estimate {:.6})",
            est.p_hat
        )))
    }
}

/// z-score of a binomial estimate against a known expectation. Uses the
/// analytic standard error when the expectation is non-degenerate.
fn z_score(analytic: f64, estimate: f64, trials: u64) -> f64 {
    let var = analytic * (1.0 - analytic);
    if var > 0.0 {
        (estimate - analytic) / (var / trials as f64).sqrt()
    } else if estimate == analytic {
        0.0
    } else {
        f64::INFINITY
    }
}

fn cmd_presets() -> Result<(), CliError> {
    println!("name alpha beta gamma width_m street_m");
    for preset in ScenarioPreset::ALL {
        let p = preset.params();
        println!(
            "{} {} {} {} {:.1} {:.1}",
            preset.name(),
            p.alpha(),
            p.beta(),
            p.gamma(),
            p.avg_building_width(),
            p.avg_street_width()
        );
    }
    Ok(())
}

fn cmd_scene_dump(
    cfg: &RunConfig,
    extent: f64,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let scene = generate_scene(&cfg.params, extent, cfg.seed)?;
    let text = scene.to_text();
    match out {
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
            Ok(())
        }
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
    }
}
