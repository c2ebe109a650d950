use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use syswork_core::cohomology::CohomologyRing;
use syswork_core::dga::load_model;
use syswork_core::geometry::{systole_report, GeometryOptions, InvariantMetric};
use syswork_core::lattice::{load_lattice, successive_minima, transference_profile};
use syswork_core::massey::{all_triples, massey_spanning_check};
use syswork_core::pipeline::{run_scenario, GridSpec, ScenarioSpec, Selector, Status};

#[derive(Parser)]
#[command(name = "syswork", version, about = "Massey products, lattice minima and systolic inequality checks on finite models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Relative tolerance for certified brackets.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Seed for multistart optimizers.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers, cup products and torsion of a model.
    Cohomology {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every triple Massey product over a basis of H^m.
    Massey {
        model: PathBuf,
        #[arg(long, alias = "m")]
        degree: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Successive minima and transference profile of a normed lattice.
    Minima {
        lattice: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stable systoles, least-comass minima and isoperimetric quotients.
    Systoles {
        model: PathBuf,
        /// Comma-separated degrees; all degrees when omitted.
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the hypotheses and every step of an inequality chain.
    Verify {
        /// thm22, thm222, prop81 or banaszczyk-only
        selector: String,
        model: PathBuf,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// <param>:<start>:<stop>:<count>, log10 spacing; param is scale, t or g<i>
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn options(c: &Common) -> Result<GeometryOptions> {
    if !(c.tol > 0.0 && c.tol < 1.0) {
        bail!("--tol must lie in (0, 1)");
    }
    Ok(GeometryOptions { tol: c.tol, seed: c.seed, ..GeometryOptions::default() })
}

fn emit(command: &str, body: impl Serialize, out: Option<&Path>) -> Result<()> {
    let mut v = serde_json::to_value(body)?;
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(1));
        map.insert("command".into(), json!(command));
    }
    let text = serde_json::to_string_pretty(&v)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn ring_of(path: &Path) -> Result<(syswork_core::ModelFile, CohomologyRing)> {
    let file = load_model(path)?;
    let ring = CohomologyRing::with_pairings(&file.model, &file.pairings)?;
    Ok((file, ring))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Cohomology { model, out } => {
            let (_, ring) = ring_of(&model)?;
            emit("cohomology", ring.summary(), out.as_deref())?;
        }
        Command::Massey { model, degree, out } => {
            let (_, ring) = ring_of(&model)?;
            if degree == 0 || degree > ring.top_degree() {
                bail!("--degree must lie in 1..={}", ring.top_degree());
            }
            let triples = all_triples(&ring, degree)?;
            let spanning = if ring.betti(degree) > 0 && ring.cup_is_zero_on_degree(degree) && 3 * degree - 1 <= ring.top_degree() {
                Some(massey_spanning_check(&ring, degree)?)
            } else {
                None
            };
            let body = json!({
                "model": ring.model().name(),
                "degree": degree,
                "betti": ring.betti(degree),
                "triples": triples,
                "spanning": spanning,
            });
            emit("massey", body, out.as_deref())?;
        }
        Command::Minima { lattice, out } => {
            let l = load_lattice(&lattice)?;
            let minima = successive_minima(&l)?;
            let transference = transference_profile(&l)?;
            let body = json!({
                "rank": l.rank(),
                "minima": minima.report(),
                "transference": transference.report(),
                "products_at_least_one": transference.all_at_least_one(),
            });
            emit("minima", body, out.as_deref())?;
        }
        Command::Systoles { model, degrees, common } => {
            let opts = options(&common)?;
            let (file, ring) = ring_of(&model)?;
            let lie = file.model.lie_structure().ok_or_else(|| anyhow!("systoles need a Lie model (invariant metrics)"))?;
            let metric = match &file.metric {
                Some(g) => InvariantMetric::new(g.clone())?,
                None => InvariantMetric::identity(lie.dim()),
            };
            let degrees = if degrees.is_empty() { (1..=ring.top_degree()).collect() } else { degrees };
            if let Some(k) = degrees.iter().find(|&&k| k == 0 || k > ring.top_degree()) {
                bail!("degree {k} outside 1..={}", ring.top_degree());
            }
            let report = systole_report(&ring, &metric, &file.covolume, &degrees, &opts)?;
            emit("systoles", report, common.out.as_deref())?;
        }
        Command::Verify { selector, model, m, grid, common } => {
            let selector: Selector = selector.parse()?;
            let opts = options(&common)?;
            let grid = grid.as_deref().map(GridSpec::parse).transpose()?;
            let file = load_model(&model)?;
            let report = run_scenario(&ScenarioSpec { file, selector, m, grid, opts })?;
            let code = report.status.exit_code() as u8;
            if report.status == Status::Refused {
                eprintln!("hypotheses not satisfied: {}", report.hypotheses.failures());
            }
            emit("verify", report, common.out.as_deref())?;
            return Ok(code);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
