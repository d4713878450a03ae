mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use revcomp::asymptotic::{
    conjecture_sweep, conjecture_table, delta_estimate, gamma_k, generalized_erasure_gamma_bound,
    AsymptoticConfig, GammaPoint,
};
use revcomp::classical::{erasure_threshold, hamming_distance, ClassicalChannel, ProductChannel};
use revcomp::io::{
    parse_channel_file, parse_classical_file, parse_density_str, BlockPowerReport, BoundPoint, FidelityReport,
    ParsedChannel, ProductReport, QuantumCompressReport,
};
use revcomp::quantum::{
    make_coarse_graining, quantum_fidelity, verify_erasure_theorem, CoarseGraining, ProbeSpec, Verdict,
};
use revcomp::{compress, Error, Execution, Result, SolverConfig, SolverKind};

use table::{pairs, Table};

#[derive(Parser)]
#[command(name = "revcomp", version, about = "Reverse compression of classical and quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Run batch loops on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Smallest ε-indistinguishability partition of a classical channel.
    Compress {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// exact, greedy, or auto.
        #[arg(long, default_value = "auto")]
        solver: SolverKind,
    },
    /// Reverse fidelity of two channel inputs, or fidelity of two density matrices.
    Fidelity {
        #[arg(long, requires_all = ["x", "x_hat"], conflicts_with_all = ["rho", "sigma"])]
        channel: Option<PathBuf>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long = "x-hat")]
        x_hat: Option<String>,
        #[arg(long, requires = "sigma")]
        rho: Option<PathBuf>,
        #[arg(long)]
        sigma: Option<PathBuf>,
    },
    /// Reverse fidelity of two input sequences over k uses.
    Product {
        #[arg(long)]
        channel: PathBuf,
        /// Comma-separated labels (or a plain string of one-character labels).
        #[arg(long)]
        x: String,
        #[arg(long = "x-hat")]
        x_hat: String,
        #[arg(short = 'k', long = "k")]
        k: Option<usize>,
    },
    /// Merging threshold for erasure sequences differing in s positions.
    Erasure {
        #[arg(long)]
        eta: f64,
        #[arg(short = 's', long = "s", default_value_t = 1)]
        s: u32,
    },
    /// Block-power bound for a generalized erasure channel.
    GenErasure {
        /// Block sizes, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        blocks: Vec<usize>,
        #[arg(short = 'k', long = "k", conflicts_with = "k_max")]
        k: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        /// Erasure rates per block; with --epsilon, Γ^(k) of the channel is reported too.
        #[arg(long, value_delimiter = ',', requires = "epsilon")]
        etas: Vec<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Exhaustive s-bounded partition minima against |X|^(k-s).
    Conjecture {
        #[arg(long, required_unless_present = "sweep")]
        alphabet: Option<usize>,
        #[arg(short = 'k', long = "k", required_unless_present = "sweep")]
        k: Option<usize>,
        #[arg(long)]
        max_s: Option<usize>,
        /// Check every (|X|, k) with |X|^k ≤ cap.
        #[arg(long, conflicts_with_all = ["alphabet", "k", "max_s"])]
        sweep: bool,
        #[arg(long, default_value_t = 10)]
        cap: usize,
    },
    /// Γ^(k) for k = 1..k_max.
    Asymptotic {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        k_max: usize,
        /// Largest |X|^k for which the greedy cover of the full graph is computed.
        #[arg(long, default_value_t = 4096)]
        greedy_cap: usize,
    },
    /// Vector kernel and quantum compressibility of a compressor.
    ///
    /// A Kraus channel file is taken as the compressor itself; a classical
    /// channel is first compressed at --epsilon and its partition turned into
    /// a coarse graining.
    QuantumCompress {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value = "auto")]
        solver: SolverKind,
    },
    /// Reverse compressibility of the quantum erasure channel.
    QuantumVerify {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random pure-state probes.
        #[arg(long, default_value_t = 1000)]
        probes: usize,
    },
}

struct Output {
    json: String,
    table: String,
}

impl Output {
    fn new<T: Serialize>(value: &T, table: String) -> Result<Self> {
        let json = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Self { json, table })
    }
}

fn solver_config() -> Result<SolverConfig> {
    SolverConfig::from_env()
}

fn split_sequence(text: &str, ch: &ClassicalChannel) -> Vec<String> {
    if text.contains(',') || ch.input().index_of(text).is_ok() {
        text.split(',').map(|s| s.trim().to_string()).collect()
    } else {
        text.chars().map(String::from).collect()
    }
}

fn run(cli: &Cli) -> Result<Output> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match &cli.command {
        Command::Compress {
            channel,
            epsilon,
            solver,
        } => {
            let ch = parse_classical_file(channel)?;
            let report = compress(&ch, *epsilon, *solver, solver_config()?)?;
            let json = report.to_json();
            let mut t = Table::new(["block", "representative", "min fidelity", "members"]);
            for (i, b) in json.blocks.iter().enumerate() {
                t.row([
                    format!("z{}", i + 1),
                    json.representatives[i].clone(),
                    json.certificates[i].to_string(),
                    b.join(" "),
                ]);
            }
            let head = pairs(&[
                ("epsilon", json.epsilon.to_string()),
                ("solver", format!("{:?}", json.solver).to_lowercase()),
                ("optimal", json.optimal.to_string()),
                ("blocks", json.blocks.len().to_string()),
                ("compressibility", json.compressibility.to_string()),
            ]);
            Output::new(&json, format!("{head}\n{t}"))
        }

        Command::Fidelity {
            channel,
            x,
            x_hat,
            rho,
            sigma,
        } => {
            let report = match (channel, rho, sigma) {
                (Some(path), _, _) => {
                    let ch = parse_classical_file(path)?;
                    let (x, x_hat) = (x.clone().unwrap_or_default(), x_hat.clone().unwrap_or_default());
                    let fidelity = ch.reverse_fidelity(&x, &x_hat)?;
                    FidelityReport { x, x_hat, fidelity }
                }
                (None, Some(a), Some(b)) => {
                    let fidelity = quantum_fidelity(&read_density(a)?, &read_density(b)?)?;
                    FidelityReport {
                        x: a.display().to_string(),
                        x_hat: b.display().to_string(),
                        fidelity,
                    }
                }
                _ => {
                    return Err(Error::param(
                        "channel",
                        "give --channel with --x and --x-hat, or --rho and --sigma",
                    ))
                }
            };
            let table = pairs(&[
                ("x", report.x.clone()),
                ("x_hat", report.x_hat.clone()),
                ("fidelity", report.fidelity.to_string()),
            ]);
            Output::new(&report, table)
        }

        Command::Product {
            channel,
            x,
            x_hat,
            k,
        } => {
            let ch = parse_classical_file(channel)?;
            let xs = split_sequence(x, &ch);
            let ys = split_sequence(x_hat, &ch);
            let uses = k.unwrap_or(xs.len());
            if xs.len() != uses || ys.len() != uses {
                return Err(Error::param(
                    "k",
                    format!("sequences of length {} and {} for k = {uses}", xs.len(), ys.len()),
                ));
            }
            let pc = ProductChannel::new(ch, uses)?;
            let fidelity = pc.product_reverse_fidelity(&xs, &ys)?;
            let report = ProductReport {
                k: uses,
                hamming: hamming_distance(&xs, &ys),
                x: xs,
                x_hat: ys,
                fidelity,
            };
            let table = pairs(&[
                ("k", report.k.to_string()),
                ("x", report.x.join(",")),
                ("x_hat", report.x_hat.join(",")),
                ("hamming", report.hamming.to_string()),
                ("fidelity", report.fidelity.to_string()),
            ]);
            Output::new(&report, table)
        }

        Command::Erasure { eta, s } => {
            let t = erasure_threshold(*eta, *s)?;
            let mut items = vec![
                ("eta", t.eta.to_string()),
                ("s", t.s.to_string()),
                ("fidelity", t.fidelity.to_string()),
                ("min epsilon", t.min_epsilon.to_string()),
            ];
            if let Some(d) = &t.discrepancy {
                items.push(("discrepancy", d.note.clone()));
            }
            Output::new(&t, pairs(&items))
        }

        Command::GenErasure {
            blocks,
            k,
            k_max,
            etas,
            epsilon,
        } => {
            let ks: Vec<usize> = match (k, k_max) {
                (Some(k), _) => vec![*k],
                (None, Some(m)) => (1..=*m).collect(),
                (None, None) => vec![1],
            };
            let points = ks
                .iter()
                .map(|&k| {
                    let b = generalized_erasure_gamma_bound(blocks, k)?;
                    Ok(BoundPoint {
                        k,
                        value: b.value(),
                        numerator: b.numerator.to_string(),
                        denominator: b.denominator.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let computed = match epsilon {
                Some(eps) if !etas.is_empty() => {
                    let labels: Vec<Vec<String>> = {
                        let mut next = 1;
                        blocks
                            .iter()
                            .map(|&n| {
                                let b = (next..next + n).map(|i| i.to_string()).collect();
                                next += n;
                                b
                            })
                            .collect()
                    };
                    let ch = ClassicalChannel::generalized_erasure(&labels, etas)?;
                    let cfg = AsymptoticConfig {
                        solver: solver_config()?,
                        exec,
                        ..Default::default()
                    };
                    Some(
                        ks.iter()
                            .map(|&k| gamma_k(&ch, *eps, k, SolverKind::Auto, cfg))
                            .collect::<Result<Vec<GammaPoint>>>()?,
                    )
                }
                _ => None,
            };
            let mut t = if computed.is_some() {
                Table::new(["k", "bound", "numerator", "denominator", "channel gamma", "method"])
            } else {
                Table::new(["k", "bound", "numerator", "denominator"])
            };
            for (i, p) in points.iter().enumerate() {
                let mut cells = vec![p.k.to_string(), p.value.to_string(), p.numerator.clone(), p.denominator.clone()];
                if let Some(c) = &computed {
                    cells.push(c[i].gamma.to_string());
                    cells.push(method_name(&c[i]));
                }
                t.row(cells);
            }
            let report = GenErasureOutput {
                report: BlockPowerReport {
                    block_sizes: blocks.clone(),
                    points,
                },
                channel_gamma: computed,
            };
            Output::new(&report, t.to_string())
        }

        Command::Conjecture {
            alphabet,
            k,
            max_s,
            sweep,
            cap,
        } => {
            let rows = if *sweep {
                conjecture_sweep(*cap)?
            } else {
                let (a, k) = (alphabet.unwrap_or(2), k.unwrap_or(1));
                conjecture_table(a, k, max_s.unwrap_or(k))?
            };
            let mut t = Table::new(["|X|", "k", "s", "minimum", "|X|^(k-s)", "equal"]);
            for r in &rows {
                t.row([
                    r.alphabet_size.to_string(),
                    r.k.to_string(),
                    r.s.to_string(),
                    r.minimum.to_string(),
                    r.bound.to_string(),
                    r.equal.to_string(),
                ]);
            }
            let failures = rows.iter().filter(|r| !r.equal).count();
            let footer = if failures == 0 {
                "all minima equal |X|^(k-s)\n".to_string()
            } else {
                format!("{failures} counterexample(s) to min = |X|^(k-s)\n")
            };
            Output::new(&rows, format!("{t}\n{footer}"))
        }

        Command::Asymptotic {
            channel,
            epsilon,
            k_max,
            greedy_cap,
        } => {
            let ch = parse_classical_file(channel)?;
            let cfg = AsymptoticConfig {
                solver: solver_config()?,
                greedy_cap: *greedy_cap,
                exec,
            };
            let sweep = delta_estimate(&ch, *epsilon, *k_max, cfg)?;
            let mut t = Table::new(["k", "gamma", "method", "blocks"]);
            for p in &sweep.points {
                t.row([
                    p.k.to_string(),
                    p.gamma.to_string(),
                    method_name(p),
                    p.blocks.map_or("overflow".into(), |b| b.to_string()),
                ]);
            }
            let footer = format!(
                "trend: {}\n",
                serde_json::to_value(sweep.trend).map_err(|e| Error::Parse(e.to_string()))?.as_str().unwrap_or("")
            );
            Output::new(&sweep.points, format!("{t}\n{footer}"))
        }

        Command::QuantumCompress {
            channel,
            epsilon,
            solver,
        } => {
            let (cg, epsilon, blocks) = match parse_channel_file(channel)? {
                ParsedChannel::Quantum(k) => {
                    if k.out_dim() > k.in_dim() {
                        return Err(Error::Dimension(format!(
                            "compressor output dimension {} exceeds input dimension {}",
                            k.out_dim(),
                            k.in_dim()
                        )));
                    }
                    (CoarseGraining::general(k), None, None)
                }
                ParsedChannel::Classical(ch) => {
                    let eps = epsilon.ok_or_else(|| {
                        Error::param("epsilon", "required when --channel is a classical channel")
                    })?;
                    let report = compress(&ch, eps, *solver, solver_config()?)?;
                    let cg = make_coarse_graining(&report.partition, ch.n_inputs())?;
                    (cg, Some(eps), Some(report.to_json().blocks))
                }
            };
            let embedded = cg.embedded()?;
            let report = QuantumCompressReport {
                in_dim: cg.channel().in_dim(),
                out_dim: cg.channel().out_dim(),
                kernel_dim: embedded.kernel_dim(),
                compressibility: cg.compressibility()?,
                epsilon,
                blocks,
            };
            let mut items = vec![
                ("input dimension", report.in_dim.to_string()),
                ("output dimension", report.out_dim.to_string()),
                ("kernel dimension", report.kernel_dim.to_string()),
                ("compressibility", report.compressibility.to_string()),
            ];
            if let Some(b) = &report.blocks {
                items.push((
                    "blocks",
                    b.iter().map(|b| format!("{{{}}}", b.join(","))).collect::<Vec<_>>().join(" "),
                ));
            }
            Output::new(&report, pairs(&items))
        }

        Command::QuantumVerify {
            dim,
            eta,
            epsilon,
            seed,
            probes,
        } => {
            let spec = ProbeSpec {
                random: *probes,
                seed: *seed,
                exec,
            };
            let v = verify_erasure_theorem(*dim, *eta, *epsilon, &spec)?;
            let verdict = match v.verdict {
                Verdict::Compressible => format!("compressible, Γ={}", v.gamma),
                Verdict::Incompressible => format!("incompressible, Γ={}", v.gamma),
            };
            let mut items = vec![
                ("verdict", verdict),
                ("dim", v.dim.to_string()),
                ("eta", v.eta.to_string()),
                ("epsilon", v.epsilon.to_string()),
                ("eta^2", v.exact_min_fidelity.to_string()),
                ("1 - epsilon", (1.0 - v.epsilon).to_string()),
                ("seed", v.seed.to_string()),
            ];
            if let (Some(m), Some(p)) = (v.probe_min_fidelity, v.probe_witness) {
                items.push(("probes", v.probe_count.to_string()));
                items.push(("probe minimum", format!("{m} at {p} (upper bound)")));
            }
            let mut t = Table::new(["compressor", "kernel dim", "F(ρ,Λρ)", "F(Mρ,MΛρ)", "predicted", "rejected"]);
            for c in &v.compressors {
                t.row([
                    c.name.clone(),
                    c.kernel_dim.to_string(),
                    format!("{:.3e}", c.input_fidelity),
                    c.output_fidelity.to_string(),
                    c.predicted_fidelity.to_string(),
                    c.rejected.to_string(),
                ]);
            }
            Output::new(&v, format!("{}\n{t}", pairs(&items)))
        }
    }
}

#[derive(Serialize)]
struct GenErasureOutput {
    #[serde(flatten)]
    report: BlockPowerReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    channel_gamma: Option<Vec<GammaPoint>>,
}

fn method_name(p: &GammaPoint) -> String {
    serde_json::to_value(p.method)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

fn read_density(path: &Path) -> Result<revcomp::quantum::DensityMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    parse_density_str(&text).map_err(|e| match e {
        Error::Parse(s) => Error::Parse(format!("{}: {s}", path.display())),
        other => other,
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Size(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = std::panic::catch_unwind(|| run(&cli));
    let output = match result {
        Ok(Ok(o)) => o,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
        Err(_) => {
            eprintln!("error: internal failure");
            return ExitCode::from(1);
        }
    };
    let text = match cli.format {
        Format::Json => format!("{}\n", output.json),
        Format::Table => output.table,
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: cannot write report: {e}");
            ExitCode::from(1)
        }
    }
}
