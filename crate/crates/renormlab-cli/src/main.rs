//! Command-line surface: fractal rendering, center/phase/essential-period
//! tables, return-type chains, truncation, renormalization orbits, Fatou
//! residual checks and the convergence experiment.
//!
//! Exit codes: 0 success, 2 usage, 3 numeric failure, 4 inconclusive
//! experiment.

mod render;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use renormlab::dynamics::QuadParam;
use renormlab::experiment::{per3_experiment, ExperimentConfig, Verdict};
use renormlab::fatou;
use renormlab::nest;
use renormlab::renorm;
use renormlab::shuffle::{self, Shuffle};
use renormlab::solver;

use render::{render as render_frame, to_pgm, RenderConfig, RenderMode};

#[derive(Parser)]
#[command(name = "renormlab", version, about = "quadratic-family renormalization toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Render a Julia or Mandelbrot frame to binary PGM.
    Render(RenderArgs),
    /// Emit superattracting centers as CSV (label,n,c,residual,period).
    Centers {
        /// Solve the essentially-period-tripling family c_n.
        #[arg(long)]
        sigma3: bool,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shuffle utilities: derive, validate and print cycle notation.
    Shuffle {
        /// Period-(3n+2) essentially-period-tripling shuffle.
        #[arg(long)]
        sigma3: Option<usize>,
        /// Read the shuffle of a superattracting center.
        #[arg(long)]
        center: Option<f64>,
        #[arg(long)]
        period: Option<usize>,
        /// Validate a permutation given in cycle notation, e.g. "(1 3 2)".
        #[arg(long)]
        validate: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Essential period of a shuffle.
    EssentialPeriod {
        /// File containing one-line cycle notation.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        sigma3: Option<usize>,
        #[arg(long)]
        cycle: Option<String>,
    },
    /// Return-type chain of a tripling center, as text or JSON.
    ReturnTypes {
        #[arg(long)]
        sigma3: usize,
        #[arg(long)]
        json: bool,
    },
    /// Truncate the chain of a tripling shuffle at a neglectable level.
    Truncate {
        #[arg(long)]
        sigma3: usize,
        #[arg(long)]
        level: usize,
    },
    /// Renormalization orbit diagnostics as a JSON stream.
    RenormOrbit {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long)]
        stages: usize,
        #[arg(long, default_value_t = 64)]
        max_period: usize,
    },
    /// Perturbed Fatou data: multipliers, phase and gate transit time.
    Phase {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        q: usize,
    },
    /// Fatou coordinate functional-equation residuals on a petal grid (CSV).
    FatouCheck {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Renormalization convergence experiment over a tripling tuning.
    Per3Experiment(ExperimentArgs),
}

#[derive(Args)]
struct RenderArgs {
    /// TOML or JSON file with the full render configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "julia")]
    mode: String,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    c_re: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    c_im: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    center_re: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    center_im: f64,
    #[arg(long, default_value_t = 4.0)]
    width: f64,
    #[arg(long, default_value_t = 256)]
    pixels: usize,
    #[arg(long)]
    pixels_h: Option<usize>,
    #[arg(long, default_value_t = 256)]
    max_iter: u32,
    #[arg(long, default_value_t = 4.0)]
    escape_radius: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML or JSON file with the experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated tuning indices, e.g. 8,10,12.
    #[arg(long, value_delimiter = ',')]
    tuning: Vec<usize>,
    #[arg(long)]
    stages: Option<usize>,
    #[arg(long, default_value_t = 0.02)]
    delta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() {
    if let Ok(v) = std::env::var("RENORMLAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| e.to_string()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_render_config(args: &RenderArgs) -> Result<RenderConfig, String> {
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
        return if path.extension().and_then(|e| e.to_str()) == Some("json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
    }
    let mode = match args.mode.as_str() {
        "julia" => RenderMode::Julia {
            c_re: args.c_re,
            c_im: args.c_im,
        },
        "mandelbrot" => RenderMode::Mandelbrot,
        other => return Err(format!("unknown mode {other}")),
    };
    Ok(RenderConfig {
        center_re: args.center_re,
        center_im: args.center_im,
        width: args.width,
        pixels_w: args.pixels,
        pixels_h: args.pixels_h.unwrap_or(args.pixels),
        max_iter: args.max_iter,
        escape_radius: args.escape_radius,
        mode,
    })
}

fn sigma3_or_err(n: usize) -> Result<Shuffle, String> {
    shuffle::sigma3_n(n).map_err(|e| e.to_string())
}

fn csv_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.cmd {
        Cmd::Render(args) => {
            let cfg = load_render_config(&args)?;
            cfg.validate()?;
            let pixels = render_frame(&cfg);
            let pgm = to_pgm(&cfg, &pixels);
            fs::write(&args.out, pgm).map_err(|e| e.to_string())?;
            eprintln!("wrote {}", args.out.display());
            Ok(0)
        }
        Cmd::Centers { sigma3, n_max, out } => {
            if !sigma3 {
                return Err("only --sigma3 center tables are supported".into());
            }
            let mut text = String::from("label,n,c,residual,period\n");
            for (n, solve) in solver::centers_sigma3(n_max) {
                match solve {
                    Ok(s) => text.push_str(&format!(
                        "sigma3_{n},{n},{},{},{}\n",
                        csv_f(s.c),
                        csv_f(s.residual),
                        3 * n + 2
                    )),
                    Err(e) => text.push_str(&format!("sigma3_{n},{n},nan,nan,{}\n# {e}\n", 3 * n + 2)),
                }
            }
            write_or_print(&out, &text)?;
            Ok(0)
        }
        Cmd::Shuffle {
            sigma3,
            center,
            period,
            validate,
            out,
        } => {
            let shuffle = if let Some(n) = sigma3 {
                sigma3_or_err(n)?
            } else if let Some(c) = center {
                let p = period.ok_or("--period required with --center")?;
                shuffle::shuffle_of_center(QuadParam::real(c).map_err(|e| e.to_string())?, p)
                    .map_err(|e| e.to_string())?
            } else if let Some(text) = validate {
                Shuffle::from_cycle_notation(&text).map_err(|e| e.to_string())?
            } else {
                return Err("one of --sigma3 / --center / --validate is required".into());
            };
            write_or_print(&out, &format!("{}\n", shuffle.cycle_notation()))?;
            Ok(0)
        }
        Cmd::EssentialPeriod { file, sigma3, cycle } => {
            let shuffle = if let Some(path) = file {
                let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
                Shuffle::from_cycle_notation(text.trim()).map_err(|e| e.to_string())?
            } else if let Some(n) = sigma3 {
                sigma3_or_err(n)?
            } else if let Some(text) = cycle {
                Shuffle::from_cycle_notation(&text).map_err(|e| e.to_string())?
            } else {
                return Err("one of --file / --sigma3 / --cycle is required".into());
            };
            let pe = nest::essential_period(&shuffle).map_err(|e| e.to_string())?;
            println!("{pe}");
            Ok(0)
        }
        Cmd::ReturnTypes { sigma3, json } => {
            let seq = nest::fixtures::sigma3_sequence(sigma3);
            // cross-check against the realized chain
            let s = sigma3_or_err(sigma3)?;
            let realized = nest::sequence_of_shuffle(&s).map_err(|e| e.to_string())?;
            if realized != seq {
                return Err("realized chain differs from the reference chain".into());
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&seq.to_json()).unwrap());
            } else {
                println!("{}", seq.to_text());
            }
            Ok(0)
        }
        Cmd::Truncate { sigma3, level } => {
            let seq = nest::fixtures::sigma3_sequence(sigma3);
            let t = nest::truncate(&seq, level).map_err(|e| e.to_string())?;
            let root = solver::root_of_copy(&t).map_err(|e| e.to_string())?;
            println!("{}", t.cycle_notation());
            println!("root,{}", csv_f(root.c));
            Ok(0)
        }
        Cmd::RenormOrbit { c, stages, max_period } => {
            let diags = renorm::renorm_orbit(c, stages, max_period).map_err(|e| e.to_string())?;
            for d in diags {
                println!("{}", serde_json::to_string(&d).unwrap());
            }
            Ok(0)
        }
        Cmd::Phase { c, q } => {
            let chart0 = reference_parabolic(q)?;
            let (z_plus, z_minus) = gate_anchors(&chart0);
            let chart = fatou::douady_chart(
                QuadParam::real(c).map_err(|e| e.to_string())?,
                q,
                z_plus,
                z_minus,
            )
            .map_err(|e| e.to_string())?;
            println!(
                "{}",
                serde_json::json!({
                    "c": c, "q": q,
                    "lambda": [chart.lambda.re, chart.lambda.im],
                    "lambda_prime": [chart.lambda_prime.re, chart.lambda_prime.im],
                    "phase": chart.phase,
                    "a_f": [chart.a_f.re, chart.a_f.im],
                    "transit_steps": chart.transit_steps,
                })
            );
            Ok(0)
        }
        Cmd::FatouCheck { c, q, grid, out } => {
            let chart = fatou::detect_parabolic(QuadParam::real(c).map_err(|e| e.to_string())?, q)
                .map_err(|e| e.to_string())?;
            let phi = fatou::fatou_coordinate(&chart, None).map_err(|e| e.to_string())?;
            let mut text = String::from("i,j,z_re,z_im,residual\n");
            let mut worst = 0.0f64;
            for i in 0..grid {
                for j in 0..grid {
                    let w = Complex64::new(
                        chart.w_threshold * (1.2 + 2.0 * i as f64 / grid as f64),
                        chart.w_threshold * (j as f64 / grid as f64 - 0.5),
                    );
                    let z = chart.xi - 1.0 / (chart.a * w);
                    let r = phi.residual(z).map_err(|e| e.to_string())?;
                    worst = worst.max(r);
                    text.push_str(&format!("{i},{j},{},{},{}\n", csv_f(z.re), csv_f(z.im), csv_f(r)));
                }
            }
            write_or_print(&out, &text)?;
            eprintln!("max residual {worst:e}");
            if worst > 1e-8 {
                return Ok(3);
            }
            Ok(0)
        }
        Cmd::Per3Experiment(args) => {
            let cfg: ExperimentConfig = if let Some(path) = &args.config {
                let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
                if path.extension().and_then(|e| e.to_str()) == Some("json") {
                    serde_json::from_str(&text).map_err(|e| e.to_string())?
                } else {
                    toml::from_str(&text).map_err(|e| e.to_string())?
                }
            } else {
                let stages = args.stages.unwrap_or(args.tuning.len());
                ExperimentConfig {
                    tuning: args.tuning.clone(),
                    stages,
                    delta: args.delta,
                    kneading_depth: 48,
                }
            };
            let report = per3_experiment(&cfg).map_err(|e| e.to_string())?;
            let text = serde_json::to_string_pretty(&report).unwrap();
            write_or_print(&args.out.clone().map(Some).unwrap_or(None), &format!("{text}\n"))?;
            match report.verdict {
                Verdict::Pass | Verdict::NotAsserted => Ok(0),
                Verdict::Inconclusive => Ok(4),
                Verdict::Fail => Ok(3),
            }
        }
    }
}

/// The parabolic reference for gate anchors: period 1 uses c = 1/4, period 3
/// the root of the tripling copy.
fn reference_parabolic(q: usize) -> Result<fatou::ParabolicChart, String> {
    let c0 = match q {
        1 => 0.25,
        3 => -1.75,
        other => return Err(format!("no parabolic reference for period {other}")),
    };
    fatou::detect_parabolic(QuadParam::real(c0).unwrap(), q).map_err(|e| e.to_string())
}

fn gate_anchors(chart: &fatou::ParabolicChart) -> (Complex64, Complex64) {
    let w = 2.0 * chart.w_threshold;
    (
        chart.xi - 1.0 / (chart.a * Complex64::new(w, 0.0)),
        chart.xi - 1.0 / (chart.a * Complex64::new(-w, 0.0)),
    )
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
