use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rnsnet::energy::{network_energy_report, EnergyTable};
use rnsnet::inference::{infer_int, infer_rns, mac_breakdown, IntTensor, NetworkSpec, Output};
use rnsnet::selftest::{self, Mode, SuiteResult};
use rnsnet::ModuliSet;

const DEFAULT_N: u32 = 7;

#[derive(Parser)]
#[command(name = "rnsnet", version, about = "RNS arithmetic and integer network inference")]
struct Cli {
    /// Moduli parameter n for {2^n-1, 2^n+1, 2^(n+1)-1, 2^(n+1)+1}.
    /// Network commands default to the n stored in the network file.
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized self-tests.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode an integer as a residue tuple (negative values wrap around M).
    Encode {
        #[arg(allow_negative_numbers = true)]
        value: i64,
    },
    /// Decode a residue tuple (r1, r1s, r2, r2s).
    Decode {
        r1: u32,
        r1s: u32,
        r2: u32,
        r2s: u32,
        /// Print the wrap-around signed value.
        #[arg(long)]
        signed: bool,
    },
    /// Run the arithmetic and hardware-model property suites.
    Selftest(SelftestArgs),
    /// Evaluate a network on an input tensor.
    Infer {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = InferMode::Rns)]
        mode: InferMode,
    },
    /// Count multiply-accumulates per layer.
    Macs {
        #[arg(long)]
        network: PathBuf,
    },
    /// Energy report for a network (RNS vs 32-bit binary).
    Energy {
        #[arg(long)]
        network: PathBuf,
        /// Power/frequency overrides; unspecified blocks keep their defaults.
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SelftestArgs {
    /// Sweep every input (n <= 4 only).
    #[arg(long, conflicts_with = "random")]
    exhaustive: bool,
    /// Number of random cases per suite.
    #[arg(long, value_name = "COUNT")]
    random: Option<u64>,
    /// Run a single suite.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(selftest::SUITES))]
    suite: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InferMode {
    Rns,
    Int,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns whether the command's success condition held.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Encode { value } => encode(cli, *value),
        Command::Decode {
            r1,
            r1s,
            r2,
            r2s,
            signed,
        } => decode(cli, [*r1, *r1s, *r2, *r2s], *signed),
        Command::Selftest(args) => run_selftest(cli, args),
        Command::Infer { network, input, mode } => infer(cli, network, input, *mode),
        Command::Macs { network } => macs(cli, network),
        Command::Energy { network, table } => energy(cli, network, table.as_deref()),
    }
}

fn moduli(cli: &Cli) -> Result<ModuliSet> {
    Ok(ModuliSet::new(cli.n.unwrap_or(DEFAULT_N))?)
}

fn encode(cli: &Cli, value: i64) -> Result<bool> {
    let ms = moduli(cli)?;
    let r = if value < 0 {
        ms.encode_signed(value)?
    } else {
        ms.encode(value as u64)?
    };
    if cli.json {
        println!("{}", json!({ "n": ms.n(), "value": value, "residues": r.to_array() }));
    } else {
        println!("{r}");
    }
    Ok(true)
}

fn decode(cli: &Cli, [r1, r1s, r2, r2s]: [u32; 4], signed: bool) -> Result<bool> {
    let ms = moduli(cli)?;
    let r = ms.residues(r1, r1s, r2, r2s)?;
    let value = if signed {
        ms.decode_signed(&r)?
    } else {
        ms.decode(&r)? as i64
    };
    if cli.json {
        println!("{}", json!({ "n": ms.n(), "residues": r.to_array(), "value": value }));
    } else {
        println!("{value}");
    }
    Ok(true)
}

fn run_selftest(cli: &Cli, args: &SelftestArgs) -> Result<bool> {
    let ms = moduli(cli)?;
    let mode = if args.exhaustive {
        Mode::Exhaustive
    } else {
        Mode::Random {
            count: args.random.unwrap_or(100_000),
            seed: cli.seed,
        }
    };
    let results: Vec<SuiteResult> = match &args.suite {
        Some(name) => vec![selftest::run_suite(name, &ms, mode)?],
        None => selftest::run_all(&ms, mode)?,
    };
    let passed = results.iter().all(SuiteResult::passed);
    if cli.json {
        let suites: Vec<_> = results
            .iter()
            .map(|r| {
                json!({
                    "name": r.name,
                    "passed": r.passed(),
                    "exhaustive": r.exhaustive,
                    "cases": r.cases,
                    "counterexample": r.counterexample,
                })
            })
            .collect();
        println!("{}", json!({ "n": ms.n(), "passed": passed, "suites": suites }));
    } else {
        for r in &results {
            println!("{}", r.line());
        }
        let failed = results.iter().filter(|r| !r.passed()).count();
        println!("n={}: {} suites, {failed} failed", ms.n(), results.len());
    }
    Ok(passed)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_network(cli: &Cli, path: &Path) -> Result<NetworkSpec> {
    let net = NetworkSpec::from_json(&read(path)?).with_context(|| format!("invalid network {}", path.display()))?;
    match cli.n {
        Some(n) if n != net.n => Ok(NetworkSpec::new(
            n,
            net.weight_bits,
            net.activation_bits,
            net.input_shape,
            net.layers,
        )?),
        _ => Ok(net),
    }
}

fn output_json(out: &Output) -> serde_json::Value {
    match out {
        Output::Class(c) => json!({ "class": c }),
        Output::Tensor(t) => json!({ "shape": t.shape(), "data": t.data() }),
    }
}

fn output_text(out: &Output) -> String {
    match out {
        Output::Class(c) => format!("class {c}"),
        Output::Tensor(t) => {
            let data: Vec<String> = t.data().iter().map(i64::to_string).collect();
            format!("tensor {:?} [{}]", t.shape(), data.join(", "))
        }
    }
}

fn infer(cli: &Cli, network: &Path, input: &Path, mode: InferMode) -> Result<bool> {
    let net = load_network(cli, network)?;
    let x = IntTensor::from_json(&read(input)?).with_context(|| format!("invalid tensor {}", input.display()))?;
    let ms = net.moduli()?;
    let int = match mode {
        InferMode::Int | InferMode::Both => Some(infer_int(&net, &x)?),
        InferMode::Rns => None,
    };
    let rns = match mode {
        InferMode::Rns | InferMode::Both => Some(infer_rns(&net, &x, &ms)?),
        InferMode::Int => None,
    };
    let matched = match (&int, &rns) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    if cli.json {
        let mut v = json!({ "n": ms.n() });
        if let Some(o) = &int {
            v["int"] = output_json(o);
        }
        if let Some(o) = &rns {
            v["rns"] = output_json(o);
        }
        if let Some(m) = matched {
            v["match"] = json!(m);
        }
        println!("{v}");
    } else {
        match (&int, &rns) {
            (Some(a), Some(b)) => {
                println!("int: {}", output_text(a));
                println!("rns: {}", output_text(b));
            }
            (Some(o), None) | (None, Some(o)) => println!("{}", output_text(o)),
            (None, None) => unreachable!(),
        }
        if let Some(m) = matched {
            println!("{}", if m { "MATCH" } else { "MISMATCH" });
        }
    }
    Ok(matched.unwrap_or(true))
}

fn macs(cli: &Cli, network: &Path) -> Result<bool> {
    let net = load_network(cli, network)?;
    let per_layer = mac_breakdown(&net)?;
    let total: u64 = per_layer.iter().sum();
    if cli.json {
        let layers: Vec<_> = net
            .layers
            .iter()
            .zip(&per_layer)
            .enumerate()
            .map(|(i, (l, m))| json!({ "layer": i, "kind": l.kind(), "macs": m }))
            .collect();
        println!("{}", json!({ "layers": layers, "total": total }));
    } else {
        for (i, (l, m)) in net.layers.iter().zip(&per_layer).enumerate() {
            println!("layer {i} {} {m}", l.kind());
        }
        println!("total {total}");
    }
    Ok(true)
}

fn energy(cli: &Cli, network: &Path, table: Option<&Path>) -> Result<bool> {
    let net = load_network(cli, network)?;
    let table = match table {
        Some(p) => {
            EnergyTable::from_json(&read(p)?).with_context(|| format!("invalid energy table {}", p.display()))?
        }
        None => EnergyTable::default(),
    };
    let report = network_energy_report(&net, &table)?;
    if cli.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    Ok(true)
}
