use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use nugap::campaign::run_report;
use nugap::circle::{sigma_max, winding_number};
use nugap::factor::{controller_symbols, graph_symbols};
use nugap::io::{parse_plant, to_json, write_csv, FactorizationDocument, InputRef, ResultDocument};
use nugap::numetric::{gap_profile, nu_metric_symbols};
use nugap::robust::{closed_loop_sampler, stability_margin_symbols};
use nugap::tfm::TransferMatrix;
use nugap::{Error, NumericConfig, Result};

#[derive(Parser)]
#[command(name = "nugap", version, about = "nu-gap metric and stability margins of discrete-time plants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Circle grid size (a power of two, at least 64).
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    /// Modulus floor for invertibility on the circle.
    #[arg(long)]
    tol_invertible: Option<f64>,
    /// Write plot data as CSV to this path.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Print only the result document.
    #[arg(long)]
    json_only: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two plants.
    Numetric {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Stability margin of a plant and controller.
    Margin {
        plant: PathBuf,
        controller: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Normalized right and left coprime factors of a plant.
    Factorize {
        plant: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Winding number of a scalar rational symbol around the circle.
    Winding {
        symbol: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded property campaign with a pass/fail table.
    Report {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        triples: usize,
        #[command(flatten)]
        common: Common,
    },
}

struct Loaded {
    plant: TransferMatrix,
    input: InputRef,
}

fn load(path: &Path, cfg: &NumericConfig) -> Result<Loaded> {
    let bytes = std::fs::read(path).map_err(|e| Error::Parse { pointer: String::new(), message: format!("{}: {e}", path.display()) })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| Error::Parse { pointer: String::new(), message: format!("{}: {e}", path.display()) })?;
    let (doc, plant) = parse_plant(&text, cfg)?;
    Ok(Loaded { plant, input: InputRef::new(doc.label, &bytes) })
}

fn config(common: &Common) -> Result<NumericConfig> {
    let mut cfg = NumericConfig { grid_size: common.grid, ..NumericConfig::default() };
    if let Some(t) = common.tol_invertible {
        cfg.tol_invertible = t;
    }
    cfg.validate().map_err(|e| Error::Parse { pointer: String::new(), message: e.to_string() })?;
    Ok(cfg)
}

fn thetas(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| std::f64::consts::TAU * j as f64 / n as f64)
}

struct Output {
    document: ResultDocument,
    summary: String,
    exit: i32,
}

#[derive(Serialize)]
struct FactorizeResult {
    right: FactorizationDocument,
    left: FactorizationDocument,
    annihilation: f64,
}

fn run(command: &Command) -> Result<Output> {
    match command {
        Command::Numetric { first, second, common } => {
            let cfg = config(common)?;
            let (a, b) = (load(first, &cfg)?, load(second, &cfg)?);
            if (a.plant.rows(), a.plant.cols()) != (b.plant.rows(), b.plant.cols()) {
                return Err(Error::DimensionMismatch("plants differ in shape".into()));
            }
            let (g1, g2) = (graph_symbols(&a.plant, &cfg)?, graph_symbols(&b.plant, &cfg)?);
            let out = nu_metric_symbols(&g1, &g2, &cfg)?;
            if let Some(path) = &common.plot {
                write_csv(path, ["theta", "sigma_max", "abs_det", "arg_det"], &gap_profile(&g1, &g2, cfg.grid_size))?;
            }
            Ok(Output {
                summary: format!("distance {} (winding condition met: {})", out.value, out.condition_met),
                document: ResultDocument::new("numetric", vec![a.input, b.input], &cfg, &out),
                exit: 0,
            })
        }
        Command::Margin { plant, controller, common } => {
            let cfg = config(common)?;
            let (p, c) = (load(plant, &cfg)?, load(controller, &cfg)?);
            if (p.plant.rows(), p.plant.cols()) != (c.plant.cols(), c.plant.rows()) {
                return Err(Error::DimensionMismatch("controller must be the transpose shape of the plant".into()));
            }
            let pf = graph_symbols(&p.plant, &cfg)?;
            let cf = controller_symbols(&c.plant, &cfg)?;
            let rep = stability_margin_symbols(&pf, &cf, &cfg)?;
            if let Some(path) = &common.plot {
                let cl = closed_loop_sampler(&pf, &cf)?;
                let rows: Vec<[f64; 2]> =
                    thetas(cfg.grid_size).filter_map(|t| cl.eval_theta(t, &cfg).ok().map(|h| [t, sigma_max(&h)])).collect();
                write_csv(path, ["theta", "sigma_max"], &rows)?;
            }
            Ok(Output {
                summary: format!("stabilizes: {}, margin {}", rep.stabilizes, rep.margin),
                document: ResultDocument::new("margin", vec![p.input, c.input], &cfg, &rep),
                exit: 0,
            })
        }
        Command::Factorize { plant, common } => {
            let cfg = config(common)?;
            let p = load(plant, &cfg)?;
            let gs = graph_symbols(&p.plant, &cfg)?;
            let right = gs.right.clone().with_certificate(&cfg);
            let res = FactorizeResult { right: (&right).into(), left: (&gs.left).into(), annihilation: gs.annihilation };
            Ok(Output {
                summary: format!("normalization residual {}", res.right.residual_norm.max(res.left.residual_norm)),
                document: ResultDocument::new("factorize", vec![p.input], &cfg, &res),
                exit: 0,
            })
        }
        Command::Winding { symbol, common } => {
            let cfg = config(common)?;
            let f = load(symbol, &cfg)?;
            if !f.plant.is_siso() {
                return Err(Error::Parse { pointer: "/kind".into(), message: "winding expects a scalar symbol".into() });
            }
            let entry = f.plant.entry(0, 0).clone();
            let rep = winding_number(|t| entry.eval(Complex64::from_polar(1.0, t)), &cfg)?;
            if let Some(path) = &common.plot {
                let rows: Vec<[f64; 3]> = thetas(cfg.grid_size)
                    .map(|t| {
                        let v = entry.eval(Complex64::from_polar(1.0, t));
                        [t, v.norm(), v.arg()]
                    })
                    .collect();
                write_csv(path, ["theta", "abs", "arg"], &rows)?;
            }
            Ok(Output {
                summary: format!("winding {}", rep.winding),
                document: ResultDocument::new("winding", vec![f.input], &cfg, &rep),
                exit: 0,
            })
        }
        Command::Report { seed, triples, common } => {
            let cfg = config(common)?;
            let rep = run_report(*seed, *triples, &cfg);
            let summary = rep
                .suites
                .iter()
                .map(|s| format!("{:<22} {:>5} cases  worst {:>12.3e}  {}", s.name, s.cases, s.worst, if s.pass { "PASS" } else { "FAIL" }))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output { summary, exit: if rep.pass { 0 } else { 4 }, document: ResultDocument::new("report", Vec::new(), &cfg, &rep) })
        }
    }
}

fn json_only(command: &Command) -> bool {
    match command {
        Command::Numetric { common, .. }
        | Command::Margin { common, .. }
        | Command::Factorize { common, .. }
        | Command::Winding { common, .. }
        | Command::Report { common, .. } => common.json_only,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            let _ = writeln!(std::io::stdout(), "{}", to_json(&out.document));
            if !json_only(&cli.command) {
                eprintln!("{}", out.summary);
            }
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            let mut diag = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            if let Error::Parse { pointer, .. } = &e {
                diag["pointer"] = serde_json::Value::String(pointer.clone());
            }
            eprintln!("{}", to_json(&diag));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
