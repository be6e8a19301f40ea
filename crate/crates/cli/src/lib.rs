//! Command-line front end for `macrs-core`.
//!
//! [`run`] executes a parsed command line against any writer and reports an
//! [`Outcome`]; the binary maps outcomes and errors to exit codes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use macrs_core::{
    apply_sequence, bench_network, is_orchard, level, macrs, oracle_macrs, parse, random_network,
    random_pair, serialize, solver::check_input, summarize, trimmed_subnetworks, validate,
    CherrySequence, Error, Network, OracleLimits, SolverOptions,
};
use serde::Serialize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "macrs",
    version,
    about = "Maximum agreement cherry-reduced subnetworks of level-1 networks"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, clap::Args)]
pub struct SolverFlags {
    /// Worker threads for the pair loop.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,

    /// Also pair trimmed subnetworks with different reticulation counts.
    #[arg(long)]
    pub no_r_filter: bool,
}

impl SolverFlags {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            use_r_filter: !self.no_r_filter,
            threads: self.threads,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a maximum agreement cherry-reduced subnetwork of two networks.
    Compute {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Check that a file holds a level-1 orchard network.
    Validate { file: PathBuf },
    /// Apply a cherry sequence file (one `x,y` pair per line).
    Reduce { file: PathBuf, sequence: PathBuf },
    /// Stream every reticulation-trimmed subnetwork as JSON lines.
    Enumerate { file: PathBuf },
    /// Write a seeded random level-1 orchard network.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        leaves: usize,
        #[arg(long, default_value_t = 2)]
        retics: usize,
        /// Destination file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the solver with the brute-force oracle, on two files or on
    /// seeded random pairs.
    Oracle {
        a: Option<PathBuf>,
        b: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random pairs when no files are given.
        #[arg(long, default_value_t = 50)]
        pairs: u64,
        /// Largest leaf count of a random network.
        #[arg(long, default_value_t = 7)]
        leaves: usize,
        /// Largest reticulation count of a random network.
        #[arg(long, default_value_t = 2)]
        retics: usize,
        #[arg(long, default_value_t = OracleLimits::default().max_leaves)]
        max_oracle_leaves: usize,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Time the solver on generated families and print CSV `r,n,mean_ms`.
    Bench {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Leaves per input network.
        #[arg(long, value_delimiter = ',', default_values_t = [48])]
        leaves: Vec<usize>,
        /// Total reticulations over both inputs.
        #[arg(long, value_delimiter = ',', default_values_t = [0, 1, 2, 3, 4])]
        retics: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[command(flatten)]
        solver: SolverFlags,
    },
}

/// How a successful run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    NoSolution,
    Disagreement,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Done => 0,
            Outcome::Disagreement => 1,
            Outcome::NoSolution => 2,
        }
    }
}

fn read_network(path: &Path) -> Result<Network> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse(text.trim()).with_context(|| format!("cannot parse {}", path.display()))
}

fn read_input(path: &Path) -> Result<Network> {
    let n = read_network(path)?;
    check_input(&n).with_context(|| format!("{} is not a valid solver input", path.display()))?;
    Ok(n)
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Outcome> {
    let format = cli.format;
    match &cli.command {
        Command::Compute { a, b, solver } => compute(format, a, b, solver, out),
        Command::Validate { file } => validate_file(format, file, out),
        Command::Reduce { file, sequence } => reduce_file(format, file, sequence, out),
        Command::Enumerate { file } => enumerate(format, file, out),
        Command::Generate {
            seed,
            leaves,
            retics,
            output,
        } => {
            let n = random_network(*seed, *leaves, *retics)?;
            let text = format!("{}\n", serialize(&n));
            match output {
                Some(path) => fs::write(path, text)
                    .with_context(|| format!("cannot write {}", path.display()))?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(Outcome::Done)
        }
        Command::Oracle {
            a,
            b,
            seed,
            pairs,
            leaves,
            retics,
            max_oracle_leaves,
            solver,
        } => {
            let limits = OracleLimits {
                max_leaves: *max_oracle_leaves,
                ..OracleLimits::default()
            };
            let inputs: Vec<(Network, Network)> = match (a, b) {
                (Some(a), Some(b)) => vec![(read_input(a)?, read_input(b)?)],
                (None, None) => (0..*pairs)
                    .map(|i| random_pair(seed.wrapping_add(i), *leaves, *retics))
                    .collect::<Result<_, Error>>()?,
                _ => bail!("give both network files or neither"),
            };
            oracle(format, &inputs, limits, solver, out)
        }
        Command::Bench {
            seed,
            leaves,
            retics,
            reps,
            solver,
        } => bench(*seed, leaves, retics, *reps, solver, out),
    }
}

#[derive(Serialize)]
struct NoSolution {
    status: &'static str,
}

fn compute(
    format: Format,
    a: &Path,
    b: &Path,
    flags: &SolverFlags,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let (n1, n2) = (read_input(a)?, read_input(b)?);
    let Some(r) = macrs(&n1, &n2, flags.options())? else {
        match format {
            Format::Json => json_line(
                out,
                &NoSolution {
                    status: "no_solution",
                },
            )?,
            Format::Text => writeln!(out, "no solution: the networks share no taxon")?,
        }
        return Ok(Outcome::NoSolution);
    };
    let s = summarize(&r);
    match format {
        Format::Json => json_line(out, &s)?,
        Format::Text => {
            let edges = |f: &[[String; 2]]| {
                f.iter()
                    .map(|[u, v]| format!("({u})->({v})"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            writeln!(out, "v1 {}", s.v1)?;
            writeln!(out, "v2 {}", s.v2)?;
            writeln!(out, "v_star {}", s.v_star)?;
            writeln!(out, "leaf_count {}", s.leaf_count)?;
            writeln!(out, "reticulation_count {}", s.reticulation_count)?;
            writeln!(out, "deltas {} {}", s.deltas[0], s.deltas[1])?;
            writeln!(out, "network {}", s.network)?;
            writeln!(out, "f1 {}", edges(&s.f1))?;
            writeln!(out, "f2 {}", edges(&s.f2))?;
        }
    }
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    problems: Vec<String>,
    leaves: usize,
    reticulations: usize,
    level: usize,
    orchard: bool,
}

fn validate_file(format: Format, file: &Path, out: &mut dyn Write) -> Result<Outcome> {
    let n = read_network(file)?;
    let mut problems: Vec<String> = validate(n.graph())
        .violations
        .iter()
        .map(ToString::to_string)
        .collect();
    let lvl = level(&n);
    let orchard = is_orchard(&n).is_some();
    if lvl > 1 {
        problems.push(Error::NotLevel1(lvl).to_string());
    } else if !orchard {
        problems.push(Error::NotOrchard.to_string());
    }
    let report = ValidateReport {
        valid: problems.is_empty(),
        problems,
        leaves: n.leaf_count(),
        reticulations: n.reticulation_count(),
        level: lvl,
        orchard,
    };
    match format {
        Format::Json => json_line(out, &report)?,
        Format::Text if report.valid => writeln!(
            out,
            "OK: {} leaves, {} reticulations, level {}",
            report.leaves, report.reticulations, report.level
        )?,
        Format::Text => {
            for p in &report.problems {
                writeln!(out, "{p}")?;
            }
        }
    }
    if report.valid {
        Ok(Outcome::Done)
    } else {
        bail!("{} is not a level-1 orchard network", file.display())
    }
}

#[derive(Serialize)]
struct NetworkLine<'a> {
    network: &'a str,
}

fn reduce_file(
    format: Format,
    file: &Path,
    sequence: &Path,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let n = read_network(file)?;
    let text = fs::read_to_string(sequence)
        .with_context(|| format!("cannot read {}", sequence.display()))?;
    let seq: CherrySequence = text
        .parse()
        .with_context(|| format!("cannot parse {}", sequence.display()))?;
    let m = apply_sequence(&n, &seq)?;
    let network = serialize(&m);
    match format {
        Format::Json => json_line(out, &NetworkLine { network: &network })?,
        Format::Text => writeln!(out, "{network}")?,
    }
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct Trimmed {
    f: Vec<[String; 2]>,
    network: String,
}

fn enumerate(format: Format, file: &Path, out: &mut dyn Write) -> Result<Outcome> {
    let n = read_input(file)?;
    for (f, t) in trimmed_subnetworks(&n) {
        let f: Vec<[String; 2]> = f
            .fingerprints(&n)
            .into_iter()
            .map(|(u, v)| [u, v])
            .collect();
        let network = serialize(&t);
        match format {
            Format::Json => json_line(out, &Trimmed { f, network })?,
            Format::Text => {
                let edges: Vec<String> = f.iter().map(|[u, v]| format!("({u})->({v})")).collect();
                writeln!(out, "{{{}}}\t{network}", edges.join(" "))?;
            }
        }
        out.flush()?;
    }
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct Comparison {
    pair: usize,
    a: String,
    b: String,
    solver: Option<usize>,
    oracle: Option<usize>,
    verdict: &'static str,
}

fn oracle(
    format: Format,
    inputs: &[(Network, Network)],
    limits: OracleLimits,
    flags: &SolverFlags,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let mut outcome = Outcome::Done;
    for (i, (a, b)) in inputs.iter().enumerate() {
        let solver = macrs(a, b, flags.options())?.map(|r| r.v_star);
        let oracle = oracle_macrs(a, b, limits)?.map(|(v, _)| v);
        let verdict = if solver == oracle {
            "AGREE"
        } else {
            "DISAGREE"
        };
        if solver != oracle {
            outcome = Outcome::Disagreement;
        }
        let c = Comparison {
            pair: i,
            a: serialize(a),
            b: serialize(b),
            solver,
            oracle,
            verdict,
        };
        match format {
            Format::Json => json_line(out, &c)?,
            Format::Text => {
                let show = |v: Option<usize>| v.map_or("none".to_string(), |v| v.to_string());
                writeln!(
                    out,
                    "{}\tsolver={}\toracle={}\t{}",
                    c.pair,
                    show(c.solver),
                    show(c.oracle),
                    c.verdict
                )?;
            }
        }
    }
    Ok(outcome)
}

/// The two inputs of a benchmark cell: `r` reticulations split over two
/// gadget networks with `n` leaves each.
pub fn bench_inputs(seed: u64, n: usize, r: usize) -> Result<(Network, Network)> {
    let a = bench_network(seed, n, r.div_ceil(2))?;
    let b = bench_network(seed ^ 0x5bd1_e995, n, r / 2)?;
    Ok((a, b))
}

fn bench(
    seed: u64,
    leaves: &[usize],
    retics: &[usize],
    reps: usize,
    flags: &SolverFlags,
    out: &mut dyn Write,
) -> Result<Outcome> {
    if reps == 0 {
        bail!("--reps must be at least 1");
    }
    writeln!(out, "r,n,mean_ms")?;
    for &n in leaves {
        for &r in retics {
            let mut total = 0.0;
            for rep in 0..reps {
                let (a, b) = bench_inputs(seed.wrapping_add(rep as u64), n, r)?;
                let start = Instant::now();
                macrs(&a, &b, flags.options())?;
                total += start.elapsed().as_secs_f64() * 1e3;
            }
            writeln!(out, "{r},{n},{:.3}", total / reps as f64)?;
            out.flush()?;
        }
    }
    Ok(Outcome::Done)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<Outcome>, String) {
        let cli =
            Cli::try_parse_from(std::iter::once("macrs").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let r = run(&cli, &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn generate_to_stdout_is_deterministic() {
        let (r, a) = run_args(&["generate", "--seed", "4", "--leaves", "6", "--retics", "2"]);
        assert_eq!(r.unwrap(), Outcome::Done);
        let (_, b) = run_args(&["generate", "--seed", "4", "--leaves", "6", "--retics", "2"]);
        assert_eq!(a, b);
        assert_eq!(parse(a.trim()).unwrap().reticulation_count(), 2);
    }

    #[test]
    fn bench_csv_shape() {
        let (r, text) = run_args(&["bench", "--leaves", "8", "--retics", "0,2", "--reps", "1"]);
        assert_eq!(r.unwrap(), Outcome::Done);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "r,n,mean_ms");
        assert!(lines[1].starts_with("0,8,"));
        assert!(lines[2].starts_with("2,8,"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn bench_inputs_split_reticulations() {
        let (a, b) = bench_inputs(1, 12, 3).unwrap();
        assert_eq!((a.reticulation_count(), b.reticulation_count()), (2, 1));
        assert!(bench_inputs(1, 4, 3).is_err());
    }

    #[test]
    fn seeded_oracle_agrees() {
        let (r, text) = run_args(&[
            "--format", "text", "oracle", "--pairs", "5", "--leaves", "5",
        ]);
        assert_eq!(r.unwrap(), Outcome::Done);
        assert_eq!(text.lines().filter(|l| l.ends_with("\tAGREE")).count(), 5);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Outcome::Done.exit_code(), 0);
        assert_eq!(Outcome::Disagreement.exit_code(), 1);
        assert_eq!(Outcome::NoSolution.exit_code(), 2);
    }
}
