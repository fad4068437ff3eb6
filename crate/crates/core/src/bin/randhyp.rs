use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use randhyp::constants::pair_constants;
use randhyp::lab::{self, ExperimentConfig, ExperimentReport};
use randhyp::pairs::{product_pair, sphere_pair, verify_many, PairKind, RegularPair};
use randhyp::zeroset::grid_components;
use randhyp::MultiPoly;

const EXIT_BOUND_FAILED: u8 = 2;
const EXIT_AMBIGUOUS: u8 = 3;

#[derive(Parser)]
#[command(name = "randhyp", version, about = "Constants, certificates and Monte Carlo checks for random real hypersurfaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: u64,
    /// Worker threads (0: one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the per-sample table here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairArg {
    Sphere,
    Product,
}

#[derive(Args)]
struct PairSel {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, value_enum, default_value_t = PairArg::Sphere)]
    pair: PairArg,
    /// Sphere index of the product pair.
    #[arg(long, default_value_t = 0)]
    i: usize,
}

impl PairSel {
    fn kind(&self) -> PairKind {
        match self.pair {
            PairArg::Sphere => PairKind::Sphere,
            PairArg::Product => PairKind::Product { i: self.i },
        }
    }

    fn build(&self) -> randhyp::Result<RegularPair> {
        match self.pair {
            PairArg::Sphere => sphere_pair(self.n),
            PairArg::Product => product_pair(self.n, self.i),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Constant chain of a built-in pair.
    ConstantsReport {
        #[command(flatten)]
        pair: PairSel,
    },
    /// Certify transversality along the pair's family.
    VerifyPair {
        #[command(flatten)]
        pair: PairSel,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        /// Family members checked (curve families only).
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Relative shrink of epsilon.
        #[arg(long, default_value_t = 1e-3)]
        margin: f64,
    },
    /// Components of a zero set in a pair's domain.
    CountComponents {
        #[command(flatten)]
        pair: PairSel,
        /// Polynomial JSON to count instead of the pair's own.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
    },
    KostlanRoots {
        #[arg(long = "degree", short = 'd')]
        d: u32,
    },
    KostlanCurves {
        #[arg(long, value_delimiter = ',', default_values_t = [8u32, 12, 16])]
        degrees: Vec<u32>,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    SupNorm {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Fock truncation; the tail rule picks it when absent.
        #[arg(long)]
        truncation: Option<u32>,
    },
    LocalPresence {
        #[command(flatten)]
        pair: PairSel,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long)]
        truncation: Option<u32>,
    },
    BettiBound {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        i: usize,
    },
}

fn write_json<T: Serialize>(value: &T, out: &Option<PathBuf>) -> randhyp::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| randhyp::Error::Io(e.to_string()))?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn finish(report: &ExperimentReport, global: &Global) -> randhyp::Result<u8> {
    for s in &report.summaries {
        eprintln!("{:<16} mean {:.6} +- {:.6} ({} samples)", s.series, s.mean, s.std_err, s.samples);
    }
    for c in &report.comparisons {
        let tag = match (c.satisfied, c.exploratory) {
            (true, _) => "ok  ",
            (false, true) => "info",
            (false, false) => "FAIL",
        };
        eprintln!("[{tag}] {}: {} {:?} {}", c.name, c.lhs, c.relation, c.rhs);
    }
    if report.excluded > 0 {
        eprintln!("excluded ambiguous samples: {}", report.excluded);
    }
    write_json(report, &global.out)?;
    if let Some(path) = &global.csv {
        report.write_csv(path)?;
    }
    Ok(if report.excessive_exclusions {
        EXIT_AMBIGUOUS
    } else if !report.all_satisfied() {
        EXIT_BOUND_FAILED
    } else {
        0
    })
}

fn run(cli: Cli) -> randhyp::Result<u8> {
    let g = &cli.global;
    match cli.command {
        Command::ConstantsReport { pair } => {
            let c = pair_constants(&pair.build()?)?;
            write_json(&c, &g.out)?;
            Ok(if c.envelope_bound_ok && c.exp_minus_two_tau_ok { 0 } else { EXIT_BOUND_FAILED })
        }
        Command::VerifyPair {
            pair,
            resolution,
            points,
            margin,
        } => {
            let p = pair.build()?;
            let family: Vec<(f64, f64)> = p
                .family()
                .sample(points)
                .into_iter()
                .map(|(d, e)| (d, e * (1.0 - margin)))
                .collect();
            let witnesses = lab::with_pool(g.threads, || verify_many(&p, &family, resolution))??;
            write_json(&witnesses, &g.out)?;
            let failed = witnesses.iter().filter(|w| !w.verified).count();
            eprintln!("{} of {} family members certified", witnesses.len() - failed, witnesses.len());
            Ok(if failed == 0 { 0 } else { EXIT_BOUND_FAILED })
        }
        Command::CountComponents {
            pair,
            input,
            resolution,
            max_depth,
        } => {
            let p = pair.build()?;
            let poly: MultiPoly = match input {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)
                    .map_err(|e| randhyp::Error::Io(e.to_string()))?,
                None => p.polynomial().clone(),
            };
            let compiled = randhyp::poly::CompiledPoly::new(&poly);
            let r = lab::with_pool(g.threads, || grid_components(&compiled, p.domain(), resolution, max_depth))??;
            write_json(&r, &g.out)?;
            Ok(if r.confident { 0 } else { EXIT_AMBIGUOUS })
        }
        Command::KostlanRoots { d } => {
            let cfg = ExperimentConfig::kostlan_roots(d, g.samples, g.seed);
            finish(&lab::run(&cfg.with_workers(g.threads))?, g)
        }
        Command::KostlanCurves { degrees, resolution } => {
            let cfg = ExperimentConfig::kostlan_curves(&degrees, g.samples, g.seed, resolution);
            finish(&lab::run(&cfg.with_workers(g.threads))?, g)
        }
        Command::SupNorm { radius, n, truncation } => {
            let mut cfg = ExperimentConfig::sup_norm(radius, n, g.samples, g.seed);
            cfg.truncation = truncation;
            finish(&lab::run(&cfg.with_workers(g.threads))?, g)
        }
        Command::LocalPresence {
            pair,
            resolution,
            truncation,
        } => {
            let mut cfg = ExperimentConfig::local_presence(pair.kind(), g.samples, g.seed, resolution);
            cfg.n = pair.n;
            cfg.truncation = truncation;
            finish(&lab::run(&cfg.with_workers(g.threads))?, g)
        }
        Command::BettiBound { n, i } => finish(&lab::betti_lower_bound_report(n, i)?, g),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
