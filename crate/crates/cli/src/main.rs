//! `hbnet` command-line front end: build networks, evaluate them on point
//! files, run the verification suites, convert skip networks to plain ones
//! and write the report tables.
//!
//! Exit codes: 0 on success, 1 when a verification row fails, 2 on bad
//! arguments or unreadable input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hbnet::constructions::{
    build_fem2d_with, build_g, build_g_ell, build_hat2d, build_monomial, build_polynomial_with,
    build_psi_ell, build_relu1, build_x2_hat, build_xy_hat, fem_to_placements, skip_to_mlp,
    Monomial, Polynomial,
};
use hbnet::fem2d::{FemFunction2D, UniformMesh2D};
use hbnet::net::{eval_batch, from_document, to_document, Network, ReluNet};
use hbnet::parallel::Execution;
use hbnet::report::{build_report, ReportParams};
use hbnet::verify::{fmt_f64, run_suite, to_csv, Suite, VerifyParams};

#[derive(Parser)]
#[command(name = "hbnet", version, about = "Explicit ReLU network constructions and their verification")]
struct Cli {
    /// Evaluate point batches on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    G,
    GEll,
    Relu1,
    X2,
    Xy,
    Psi,
    Hat2d,
    Monomial,
    Polynomial,
    Fem,
}

#[derive(Args)]
struct BuildArgs {
    target: Target,
    /// Level L (or ℓ for g-ell and psi).
    #[arg(long)]
    levels: Option<usize>,
    /// Input bound M for xy.
    #[arg(long, default_value_t = 1.0)]
    bound: f64,
    /// Comma-separated exponent vector for monomial.
    #[arg(long, value_delimiter = ',')]
    exponents: Vec<u32>,
    /// Polynomial document for polynomial.
    #[arg(long)]
    coeffs: Option<PathBuf>,
    /// FEM document for fem.
    #[arg(long)]
    values: Option<PathBuf>,
    /// Level of a random FEM function on [0, 1]^2 when no --values is given.
    #[arg(long)]
    mesh_level: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the network document of a construction.
    Build(BuildArgs),
    /// Evaluate a network on a CSV file of points (one point per line).
    Eval {
        net: PathBuf,
        points: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and print the report as CSV.
    Verify {
        suite: String,
        #[arg(long)]
        max_level: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Random points per sampled sup-norm.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Write 0 in the runtime_ms column so output is byte-identical across runs.
        #[arg(long)]
        no_runtime: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a skip network document to a plain network document.
    Convert {
        net: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the report tables into a directory.
    Report {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn need_levels(levels: Option<usize>) -> anyhow::Result<usize> {
    levels.ok_or_else(|| anyhow!("--levels is required for this target"))
}

fn build(args: &BuildArgs, exec: Execution) -> anyhow::Result<Network> {
    let levels = args.levels;
    Ok(match args.target {
        Target::G => build_g().into(),
        Target::GEll => build_g_ell(need_levels(levels)?)?.into(),
        Target::Relu1 => build_relu1().into(),
        Target::X2 => build_x2_hat(need_levels(levels)?)?.into(),
        Target::Xy => build_xy_hat(need_levels(levels)?, args.bound)?.into(),
        Target::Psi => build_psi_ell(need_levels(levels)?)?.into(),
        Target::Hat2d => build_hat2d().into(),
        Target::Monomial => {
            if args.exponents.is_empty() {
                bail!("--exponents is required for monomial");
            }
            build_monomial(&Monomial::new(args.exponents.clone())?, need_levels(levels)?)?.into()
        }
        Target::Polynomial => {
            let path = args.coeffs.as_deref().ok_or_else(|| anyhow!("--coeffs is required for polynomial"))?;
            let poly = Polynomial::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?;
            build_polynomial_with(&poly, need_levels(levels)?, exec)?.into()
        }
        Target::Fem => {
            let f = match (args.values.as_deref(), args.mesh_level) {
                (Some(path), _) => FemFunction2D::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?,
                (None, Some(l)) => FemFunction2D::random(UniformMesh2D::unit_square(l)?, args.seed),
                (None, None) => bail!("fem needs --values or --mesh-level"),
            };
            build_fem2d_with(&fem_to_placements(&f), exec)?.into()
        }
    })
}

fn load_net(path: &Path) -> anyhow::Result<Network> {
    from_document(&read(path)?).with_context(|| format!("in {}", path.display()))
}

/// Parse a point file: comma-separated floats per line, blank lines and
/// lines starting with '#' skipped.
fn parse_points(text: &str, dim: usize) -> anyhow::Result<Vec<Vec<f64>>> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| anyhow!("line {}: {e}", i + 1))?;
        if p.len() != dim {
            bail!("line {}: expected {dim} coordinates, found {}", i + 1, p.len());
        }
        points.push(p);
    }
    Ok(points)
}

fn eval(net: &Network, text: &str, exec: Execution) -> anyhow::Result<String> {
    let d = net.input_dim();
    let points = parse_points(text, d)?;
    let values = eval_batch(net, &points, exec)?;
    let mut out: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
    out.push("value".into());
    let mut csv = out.join(",") + "\n";
    for (p, v) in points.iter().zip(values) {
        for c in p {
            csv += &fmt_f64(*c);
            csv.push(',');
        }
        csv += &fmt_f64(v);
        csv.push('\n');
    }
    Ok(csv)
}

enum Failure {
    Usage(anyhow::Error),
    Verify,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<hbnet::Error> for Failure {
    fn from(e: hbnet::Error) -> Self {
        Failure::Usage(e.into())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match cli.command {
        Command::Build(args) => {
            let net = build(&args, exec)?;
            emit(args.out.as_deref(), &(to_document(&net) + "\n"))?;
        }
        Command::Eval { net, points, out } => {
            let net = load_net(&net)?;
            let text = read(&points)?;
            let csv = eval(&net, &text, exec).with_context(|| format!("in {}", points.display()))?;
            emit(out.as_deref(), &csv)?;
        }
        Command::Verify { suite, max_level, seed, trials, samples, no_runtime, out } => {
            let suite: Suite = suite.parse()?;
            let params = VerifyParams { max_level, seed, trials, samples, exec };
            let mut rows = run_suite(suite, &params)?;
            if no_runtime {
                rows.iter_mut().for_each(|r| r.runtime_ms = 0.0);
            }
            emit(out.as_deref(), &to_csv(&rows))?;
            let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.claim_id.as_str()).collect();
            if !failed.is_empty() {
                eprintln!("{} of {} rows failed: {}", failed.len(), rows.len(), failed.join(", "));
                return Err(Failure::Verify);
            }
        }
        Command::Convert { net, out } => {
            let doc = load_net(&net)?;
            let skip = match doc {
                Network::Skip(s) => s,
                Network::Mlp(_) => return Err(anyhow!("{} is already a plain network", net.display()).into()),
            };
            let plain = skip_to_mlp(&skip)?;
            eprintln!(
                "width {} -> {} (+{})",
                skip.width(),
                plain.width(),
                plain.width() - skip.width()
            );
            emit(out.as_deref(), &(to_document(&plain.into()) + "\n"))?;
        }
        Command::Report { out, seed, samples } => {
            fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
            for t in build_report(&ReportParams { seed, samples, exec })? {
                let path = out.join(&t.file);
                fs::write(&path, &t.contents).with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
