use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bimax_core::bilinear_ops::{
    angular_interval, eval_br, full_maximal, hl_maximal, lacunary_maximal, mn_maximal, ni_maximal,
    QuadratureSpec, ScaleRange, XGrid,
};
use bimax_core::curve::{check_hypotheses, make_curve, Curve, CurveSpec, Verdict};
use bimax_core::czd::cz_decompose;
use bimax_core::exec;
use bimax_core::gridfn::{lp_norm, FunctionSpec, DEFAULT_RESOLUTION};
use bimax_core::harness::{
    default_configs, run_exponent_scan, run_sharpness, run_sum_lemma, run_weak_half_experiment,
    write_report, ExperimentReport, ScanConfig, SharpnessConfig, SumLemmaConfig, WeakHalfConfig,
};
use bimax_core::lp_filters::{
    apply_projection, make_filter_bank, reconstruction_error, FilterBank, Which,
};
use bimax_core::smoothing::{decay_experiment, sublevel_fit};

#[derive(Parser)]
#[command(
    name = "bimax",
    version,
    about = "Bilinear maximal averages along curves"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Curve hypothesis checks
    Hyp {
        #[command(subcommand)]
        cmd: HypCmd,
    },
    /// Function norms
    Fn {
        #[command(subcommand)]
        cmd: FnCmd,
    },
    /// Littlewood-Paley projections
    Lp {
        #[command(subcommand)]
        cmd: LpCmd,
    },
    /// Bilinear averages and maximal operators
    Op(OpArgs),
    /// Calderon-Zygmund decomposition
    Czd {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        level: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: f64,
    },
    /// Smoothing experiments
    Smooth {
        #[command(subcommand)]
        cmd: SmoothCmd,
    },
    /// Paper-level experiments
    Run(RunArgs),
    /// Configuration defaults
    Config {
        #[command(subcommand)]
        cmd: ConfigCmd,
    },
}

#[derive(Subcommand)]
enum HypCmd {
    Check {
        /// Builtin name (circle, degenerate-cubic) or JSON file
        #[arg(long)]
        curve: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = 4096.0)]
        grid: f64,
    },
}

#[derive(Subcommand)]
enum FnCmd {
    Norm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        weak: bool,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: f64,
    },
}

#[derive(Subcommand)]
enum LpCmd {
    Apply {
        #[arg(long)]
        which: Which,
        #[arg(long, allow_hyphen_values = true)]
        k: i32,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Sample spacing; defaults to the coarsest admissible one
        #[arg(long)]
        resolution: Option<f64>,
        #[arg(long, default_value_t = bimax_core::lp_filters::DEFAULT_SHARPNESS)]
        sharpness: f64,
    },
    Recon {
        #[arg(long, allow_hyphen_values = true)]
        k: i32,
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        resolution: Option<f64>,
        #[arg(long, default_value_t = bimax_core::lp_filters::DEFAULT_SHARPNESS)]
        sharpness: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OpKind {
    Br,
    Lacunary,
    Full,
    Mn,
    Ni,
    Hl,
}

#[derive(Args)]
struct OpArgs {
    #[arg(value_enum)]
    kind: OpKind,
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    f1: PathBuf,
    #[arg(long)]
    f2: Option<PathBuf>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    kmin: i32,
    #[arg(long, allow_hyphen_values = true, default_value_t = 4)]
    kmax: i32,
    #[arg(long, default_value_t = 8)]
    per_octave: u32,
    #[arg(long, default_value_t = 0)]
    n1: u32,
    #[arg(long, default_value_t = 0)]
    n2: u32,
    /// Angular piece `n` of the full operator around `kπ/2`
    #[arg(long)]
    angular: Option<u32>,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    axis: i32,
    /// Interval `I` of the `ni` operator
    #[arg(long, num_args = 2, allow_hyphen_values = true, default_values_t = [0.5, 1.5])]
    interval: Vec<f64>,
    /// Exponent of the `hl` operator
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -3.0)]
    xmin: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 3.0)]
    xmax: f64,
    #[arg(long, default_value_t = 1.0 / 64.0)]
    xstep: f64,
    #[arg(long, default_value_t = 256)]
    t_points: usize,
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum SmoothCmd {
    Decay {
        #[arg(long, default_value = "circle")]
        curve: String,
        #[arg(long, default_value_t = 3)]
        nmin: u32,
        #[arg(long, default_value_t = 9)]
        nmax: u32,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    Sublevel {
        #[arg(long, default_value = "poly")]
        family: String,
        #[arg(long = "N")]
        n: u32,
        /// Range `hi..lo`, one point per decade unless `--per-decade` is given
        #[arg(long, default_value = "1e-1..1e-5")]
        eps: String,
        #[arg(long, default_value_t = 1)]
        per_decade: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Sharpness,
    Scan,
    Sumlemma,
    Weakhalf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(value_enum)]
    experiment: Experiment,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum ConfigCmd {
    Show {
        /// Single experiment; all when omitted
        name: Option<String>,
    },
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn save_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn load_curve(arg: &str) -> Result<Curve> {
    let spec = match CurveSpec::builtin(arg) {
        Some(s) => s,
        None => load_json(Path::new(arg))?,
    };
    Ok(make_curve(&spec)?)
}

fn hyp_check(curve: &str, seed: u64, budget: usize, grid: f64) -> Result<ExitCode> {
    let c = load_curve(curve)?;
    let mut failed = false;
    for v in check_hypotheses(&c, grid, budget, seed) {
        let verdict = serde_json::to_value(v.verdict)?;
        let witness = match &v.witness {
            Some(w) => format!(" witness={}", serde_json::to_string(w)?),
            None => String::new(),
        };
        println!(
            "{:?} {} margin={:.3e}{}",
            v.hypothesis,
            verdict.as_str().unwrap_or("?"),
            v.margin,
            witness
        );
        failed |= v.verdict == Verdict::Fail;
    }
    Ok(if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn op(a: &OpArgs) -> Result<()> {
    let f1: FunctionSpec = load_json(&a.f1)?;
    let xs = XGrid::covering(a.xmin, a.xmax, a.xstep);
    let scales = ScaleRange::new(a.kmin, a.kmax, a.per_octave);
    let quad = QuadratureSpec::new(a.t_points);
    let resolution = a.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let need_f2 = || -> Result<FunctionSpec> {
        let p = a.f2.as_ref().ok_or_else(|| anyhow!("--f2 is required"))?;
        load_json(p)
    };
    let need_curve = || -> Result<Curve> {
        load_curve(
            a.curve
                .as_deref()
                .ok_or_else(|| anyhow!("--curve is required"))?,
        )
    };
    let g = match a.kind {
        OpKind::Br => {
            let r = a.r.ok_or_else(|| anyhow!("--r is required for br"))?;
            eval_br(&need_curve()?, &f1, &need_f2()?, r, &xs, &quad)?
        }
        OpKind::Lacunary => {
            lacunary_maximal(&need_curve()?, &f1, &need_f2()?, &scales, &xs, &quad)?
        }
        OpKind::Full => {
            let pieces = a.angular.map(|n| angular_interval(n, a.axis));
            full_maximal(
                &need_curve()?,
                &f1,
                &need_f2()?,
                &scales,
                &xs,
                &quad,
                pieces.as_deref(),
            )?
        }
        OpKind::Mn => {
            let nmax = a.n1.max(a.n2) as i32;
            let res = a
                .resolution
                .unwrap_or_else(|| FilterBank::required_spacing(a.kmax + nmax + 2));
            let bank = FilterBank::default();
            mn_maximal(
                &need_curve()?,
                &f1,
                &need_f2()?,
                (a.n1, a.n2),
                &scales,
                &bank,
                &quad,
                &xs,
                res,
            )?
        }
        OpKind::Ni => {
            if a.interval.len() != 2 {
                bail!("--interval takes two numbers");
            }
            ni_maximal(
                &f1,
                (a.interval[0], a.interval[1]),
                &scales,
                &xs,
                resolution,
            )?
        }
        OpKind::Hl => hl_maximal(&f1, a.tau, &scales, &xs, resolution)?,
    };
    save_json(&a.out, &g)
}

/// Parses `a..b` into a log-spaced list from `a` to `b`.
fn parse_eps(s: &str, per_decade: usize) -> Result<Vec<f64>> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| anyhow!("expected a range like 1e-1..1e-5"))?;
    let (a, b): (f64, f64) = (a.trim().parse()?, b.trim().parse()?);
    if !(a > 0.0 && b > 0.0) {
        bail!("epsilon bounds must be positive");
    }
    let decades = (a.log10() - b.log10()).abs();
    let n = ((decades * per_decade.max(1) as f64).round() as usize).max(2);
    Ok((0..=n)
        .map(|i| 10f64.powf(a.log10() + (b.log10() - a.log10()) * i as f64 / n as f64))
        .collect())
}

fn smooth(cmd: &SmoothCmd) -> Result<()> {
    match cmd {
        SmoothCmd::Decay {
            curve,
            nmin,
            nmax,
            trials,
            seed,
            csv,
        } => {
            let c = load_curve(curve)?;
            let ns: Vec<(u32, u32)> = (*nmin..=*nmax).map(|m| (m, m)).collect();
            let bank = FilterBank::default();
            let res = FilterBank::required_spacing(*nmax as i32);
            let out = decay_experiment(&c, &ns, *trials, *seed, &bank, res)?;
            let mut text = String::from("n,median_l1,log2_median\n");
            for r in &out.rows {
                text.push_str(&format!(
                    "{},{},{}\n",
                    r.n1.max(r.n2),
                    r.median_l1,
                    r.log2_median
                ));
            }
            print!("{text}");
            println!(
                "# slope={:.4} r_squared={:.4}",
                out.fit.slope, out.fit.r_squared
            );
            if let Some(p) = csv {
                std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        SmoothCmd::Sublevel {
            family,
            n,
            eps,
            per_decade,
        } => {
            if family != "poly" {
                bail!("unknown family {family}; only poly is available");
            }
            let grid = parse_eps(eps, *per_decade)?;
            let out = sublevel_fit(*n, &grid)?;
            println!("epsilon,measure,analytic");
            for (e, m, a) in &out.rows {
                println!("{e},{m},{a}");
            }
            println!(
                "# slope={:.4} expected={:.4} spacing={:.3e}",
                out.fit.slope,
                1.0 / *n as f64,
                out.spacing
            );
        }
    }
    Ok(())
}

fn run(a: &RunArgs) -> Result<ExitCode> {
    let report: ExperimentReport =
        exec::with_threads(a.threads, || -> Result<ExperimentReport> {
            Ok(match a.experiment {
                Experiment::Sharpness => {
                    let cfg: SharpnessConfig = match &a.config {
                        Some(p) => load_json(p)?,
                        None => SharpnessConfig::qlt1(1.0, 1.0),
                    };
                    run_sharpness(&cfg)?
                }
                Experiment::Scan => {
                    let mut cfg: ScanConfig = match &a.config {
                        Some(p) => load_json(p)?,
                        None => ScanConfig::default(),
                    };
                    if let Some(s) = a.seed {
                        cfg.seed = s;
                    }
                    run_exponent_scan(&cfg)?
                }
                Experiment::Sumlemma => {
                    let cfg: SumLemmaConfig = match &a.config {
                        Some(p) => load_json(p)?,
                        None => SumLemmaConfig::default(),
                    };
                    run_sum_lemma(&cfg)?
                }
                Experiment::Weakhalf => {
                    let mut cfg: WeakHalfConfig = match &a.config {
                        Some(p) => load_json(p)?,
                        None => WeakHalfConfig::default(),
                    };
                    if let Some(s) = a.seed {
                        cfg.seed = s;
                    }
                    run_weak_half_experiment(&cfg)?
                }
            })
        })?;
    write_report(&report, &a.out)?;
    if let Some(p) = &a.csv {
        std::fs::write(p, report.measurements_csv())
            .with_context(|| format!("writing {}", p.display()))?;
    }
    let verdict = serde_json::to_value(report.verdict)?;
    println!(
        "{} {} ({:.2}s, {})",
        report.experiment,
        verdict.as_str().unwrap_or("?"),
        report.runtime,
        exec::backend()
    );
    Ok(if report.verdict.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn real_main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Hyp {
            cmd:
                HypCmd::Check {
                    curve,
                    seed,
                    budget,
                    grid,
                },
        } => return hyp_check(&curve, seed, budget, grid),
        Cmd::Fn {
            cmd:
                FnCmd::Norm {
                    input,
                    p,
                    weak,
                    resolution,
                },
        } => {
            let f: FunctionSpec = load_json(&input)?;
            println!("{}", lp_norm(&f, p, weak, resolution)?);
        }
        Cmd::Lp { cmd } => match cmd {
            LpCmd::Apply {
                which,
                k,
                input,
                out,
                resolution,
                sharpness,
            } => {
                let f: FunctionSpec = load_json(&input)?;
                let bank = make_filter_bank(sharpness);
                let h = resolution.unwrap_or_else(|| FilterBank::required_spacing(k));
                save_json(&out, &apply_projection(&bank, which, k, &f, h)?)?;
            }
            LpCmd::Recon {
                k,
                n,
                input,
                resolution,
                sharpness,
            } => {
                let f: FunctionSpec = load_json(&input)?;
                let bank = make_filter_bank(sharpness);
                let h =
                    resolution.unwrap_or_else(|| FilterBank::required_spacing(k + n as i32 + 1));
                println!("{:e}", reconstruction_error(&bank, &f, k, n, h)?);
            }
        },
        Cmd::Op(a) => op(&a)?,
        Cmd::Czd {
            input,
            level,
            out,
            resolution,
        } => {
            let f: FunctionSpec = load_json(&input)?;
            let cz = cz_decompose(&f, level, resolution)?;
            println!(
                "atoms={} audit={}",
                cz.atoms.len(),
                if cz.audit.holds() { "ok" } else { "violated" }
            );
            save_json(&out, &cz)?;
        }
        Cmd::Smooth { cmd } => smooth(&cmd)?,
        Cmd::Run(a) => return run(&a),
        Cmd::Config {
            cmd: ConfigCmd::Show { name },
        } => {
            let all = default_configs();
            let v = match name {
                Some(n) => all
                    .get(&n)
                    .cloned()
                    .ok_or_else(|| anyhow!("no experiment named {n}"))?,
                None => all,
            };
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::parse_eps;

    #[test]
    fn eps_ranges() {
        let g = parse_eps("1e-1..1e-3", 1).unwrap();
        assert_eq!(g.len(), 3);
        assert!((g[0] - 0.1).abs() < 1e-15 && (g[2] - 1e-3).abs() < 1e-15);
        assert_eq!(parse_eps("1e-1..1e-3", 2).unwrap().len(), 5);
        assert!(parse_eps("0..1", 1).is_err());
        assert!(parse_eps("0.1", 1).is_err());
    }
}
