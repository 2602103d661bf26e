use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use monolab::distributions::FlipCountDistribution;
use monolab::harness::{self, ExperimentConfig, ScalingConfig};
use monolab::predictor::{self, ClassifyOptions};
use monolab::{Error, Result};

#[derive(Parser)]
#[command(
    name = "monolab",
    version,
    about = "Evolutionary algorithms on monotone functions: simulator and Phi predictor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a flip-count distribution, e.g. "poisson:c=4" or "zipf:kappa=1.5".
    Predict {
        dist: String,
        /// Dimension used for distribution defaults (binomial n, Zipf cap).
        #[arg(long)]
        n: Option<usize>,
        /// Uniform alpha grid step; the default grid is used otherwise.
        #[arg(long)]
        grid_step: Option<f64>,
        #[arg(long, default_value_t = predictor::DEFAULT_MARGIN)]
        margin: f64,
        #[arg(long, default_value_t = predictor::DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Directory for phi.csv and report.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the critical constants alpha0 and c0.
    Constants {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run an experiment batch described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory for trajectories.csv and summary.json; overrides the config's paths.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides the config's base seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the n = 10 000 HotTopic preset with the (1+1)-EA at rate c/n.
    Footnote {
        #[arg(long, short)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Mean runtime over a list of dimensions.
    Scaling {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated dimensions; overrides the config's n_list.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.into(),
            source: e,
        })?;
    }
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })
}

fn stdout_err(e: io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

fn read_config(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })
}

fn predict(
    dist: &str,
    n: Option<usize>,
    grid_step: Option<f64>,
    opts: ClassifyOptions,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    let d = FlipCountDistribution::parse(dist, n)?;
    let grid = match grid_step {
        Some(step) => predictor::uniform_grid(step)?,
        None => predictor::default_grid(),
    };
    let report = predictor::classify(&d, &grid, opts)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv).map_err(stdout_err)?;
    if let Some(dir) = out {
        write_file(&dir.join("phi.csv"), &csv)?;
        write_file(&dir.join("report.json"), report.to_json().as_bytes())?;
    }
    let mut stdout = io::stdout().lock();
    match format {
        Format::Json => writeln!(stdout, "{}", report.to_json()),
        Format::Csv => stdout.write_all(&csv),
        Format::Text => {
            let c = &report.criteria;
            let mut text = format!(
                "distribution: {}\nclassification: {}\nsup_phi: {:.6} at alpha = {:.6}\n",
                report.distribution, report.classification, report.sup_phi, report.argmax_alpha
            );
            if let Some(w) = report.witness {
                text += &format!("witness_alpha: {w:.6}\n");
            }
            text += &format!(
                "m1: {}\nm2: {}\nm2/m1: {}\ns0: {}\n",
                c.m1,
                c.m2,
                c.ratio,
                c.s0.map_or("undefined".into(), |s| s.to_string())
            );
            if c.m2_cap_dominated {
                text += "note: m2 is dominated by the support cap\n";
            }
            let flags = [
                (c.efficient_ratio, "efficient: m2/m1 <= 1 - delta"),
                (
                    c.hard_ratio,
                    "hard: m2/m1 >= 1 + delta with small Pr[s=1] relative to s0",
                ),
                (c.hard_power_law, "hard: power-law exponent in (1,2)"),
                (c.hard_p1_vs_tail, "hard: Pr[s=1] <= 4/9 Pr[s>=3] - delta"),
                (c.hard_p1_vs_p3, "hard: Pr[s=1] < 4/9 Pr[s=3]"),
            ];
            for (_, name) in flags.iter().filter(|(on, _)| *on) {
                text += &format!("flag: {name}\n");
            }
            stdout.write_all(text.as_bytes())
        }
    }
    .map_err(stdout_err)
}

fn constants(format: Format) -> Result<()> {
    let k = predictor::critical_constants(1e-12)?;
    let text = match format {
        Format::Json => format!(
            "{}\n",
            serde_json::json!({ "alpha0": k.alpha0, "c0": k.c0 })
        ),
        Format::Csv => format!("alpha0,c0\n{:.6},{:.6}\n", k.alpha0, k.c0),
        Format::Text => format!("alpha0 = {:.6}\nc0 = {:.6}\n", k.alpha0, k.c0),
    };
    io::stdout().write_all(text.as_bytes()).map_err(stdout_err)
}

fn run_config(
    mut cfg: ExperimentConfig,
    out: Option<&Path>,
    threads: Option<usize>,
    format: Format,
) -> Result<()> {
    if let Some(dir) = out {
        cfg.outputs.trajectory_csv = Some(dir.join("trajectories.csv"));
        cfg.outputs.summary_json = Some(dir.join("summary.json"));
    }
    let summary = harness::run_experiment(&cfg, threads)?;
    let text = match format {
        Format::Json => summary.to_json() + "\n",
        _ => {
            let mut t = format!(
                "runs: {}\nfound optimum: {}\nmean runtime: {}\nruns reaching max level: {}\n",
                summary.final_records.len(),
                summary.runs_found_optimum,
                summary
                    .mean_runtime
                    .map_or("n/a".into(), |m| format!("{m:.1}")),
                summary.runs_reaching_max_level,
            );
            for c in &summary.checkpoints {
                t += &format!(
                    "checkpoint {}: ones {:.2}% +- {:.2}, level {:.2} +- {:.2}\n",
                    c.evaluations,
                    100.0 * c.ones_mean,
                    100.0 * c.ones_std,
                    c.level_mean,
                    c.level_std
                );
            }
            t += &format!("max level per run: {:?}\n", summary.max_level_per_run);
            t
        }
    };
    io::stdout().write_all(text.as_bytes()).map_err(stdout_err)
}

fn scaling(cfg: &ScalingConfig, out: Option<&Path>, threads: Option<usize>) -> Result<()> {
    let rows = harness::run_scaling(cfg, threads)?;
    for r in rows.iter().filter(|r| r.partial()) {
        eprintln!(
            "warning: n = {}: only {}/{} runs found the optimum; results are partial",
            r.n, r.terminated, r.runs
        );
    }
    let mut csv = Vec::new();
    harness::write_scaling_csv(&mut csv, &rows).map_err(stdout_err)?;
    match out {
        Some(dir) => write_file(&dir.join("scaling.csv"), &csv),
        None => io::stdout().write_all(&csv).map_err(stdout_err),
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Predict {
            dist,
            n,
            grid_step,
            margin,
            delta,
            format,
            out,
        } => {
            let opts = ClassifyOptions {
                margin,
                delta,
                ..ClassifyOptions::default()
            };
            predict(&dist, n, grid_step, opts, format, out.as_deref())
        }
        Command::Constants { format } => constants(format),
        Command::Run {
            config,
            out,
            threads,
            seed,
            format,
        } => {
            let mut cfg = ExperimentConfig::from_json(&read_config(&config)?)?;
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            run_config(cfg, out.as_deref(), threads, format)
        }
        Command::Footnote {
            c,
            seed,
            runs,
            out,
            threads,
            format,
        } => {
            let mut cfg = harness::footnote_config(c, seed);
            if let Some(r) = runs {
                cfg.runs = r;
            }
            run_config(cfg, out.as_deref(), threads, format)
        }
        Command::Scaling {
            config,
            n,
            seed,
            out,
            threads,
        } => {
            let mut cfg = ScalingConfig::from_json(&read_config(&config)?)?;
            if let Some(n) = n {
                cfg.n_list = n;
            }
            if let Some(s) = seed {
                cfg.template.base_seed = s;
            }
            scaling(&cfg, out.as_deref(), threads)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
