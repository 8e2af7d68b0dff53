#![allow(clippy::manual_is_multiple_of)]

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use circstab::sweep::{DEFAULT_SWEEP_ORDER_CAP, DEFAULT_THEOREM_ORDER_CAP};
use circstab::{
    analyze_one, automorphism_group, circulant, run_sweep_with, summary_path, verify_main_theorem,
    ClassificationRecord, ConnectionSet, Error, Graph, Parity, PermGroup, SweepOptions,
    TheoremReport,
};

/// Exit codes: 0 success, 1 validation error, 2 audit or theorem failure,
/// 3 capacity breach.
const EXIT_OK: u8 = 0;
const EXIT_VALIDATION: u8 = 1;
const EXIT_AUDIT: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "circstab",
    version,
    about = "Circulant graphs, canonical double covers, and stability classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ParityArg {
    Odd,
    Even,
    All,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Parity {
        match p {
            ParityArg::Odd => Parity::Odd,
            ParityArg::Even => Parity::Even,
            ParityArg::All => Parity::All,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify one circulant and run its lemma audits
    Analyze {
        /// Order of the cyclic group
        #[arg(long)]
        order: usize,
        /// Connection set residues, comma separated (e.g. 1,4)
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<usize>,
        /// Emit the record as JSON instead of a human summary
        #[arg(long)]
        json: bool,
    },
    /// Classify every connection set over a range of orders and write
    /// JSONL records plus a CSV summary
    Sweep {
        /// Inclusive order range, e.g. 3..9 (a single order N also works)
        #[arg(long)]
        orders: String,
        #[arg(long, value_enum, default_value_t = ParityArg::All)]
        parity: ParityArg,
        /// Keep all connection sets instead of one representative per
        /// multiplier class
        #[arg(long)]
        no_dedup: bool,
        /// Worker threads; reports are byte-identical for any count
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Path for the JSONL records; the CSV summary lands next to it
        #[arg(long)]
        out: PathBuf,
        /// Largest order the sweep will accept
        #[arg(long, default_value_t = DEFAULT_SWEEP_ORDER_CAP)]
        cap: usize,
    },
    /// Check that every connected irreducible circulant of odd order up to
    /// the bound is stable, with the exact group-order equality
    VerifyTheorem {
        #[arg(long, default_value_t = DEFAULT_THEOREM_ORDER_CAP)]
        max_order: usize,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
        /// Largest order the verification will accept
        #[arg(long, default_value_t = DEFAULT_THEOREM_ORDER_CAP)]
        cap: usize,
    },
    /// Print generators and order of the automorphism group of a circulant
    Aut {
        #[arg(long)]
        order: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<usize>,
    },
    /// Print generators and order of the automorphism group of a graph
    /// given as JSON {"n": int, "edges": [[u,v],...]}
    AutGraph {
        #[arg(long)]
        edges: PathBuf,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Capacity(_) => EXIT_CAPACITY,
        Error::Internal(_) => EXIT_AUDIT,
        _ => EXIT_VALIDATION,
    }
}

fn parse_order_range(spec: &str) -> Result<(usize, usize), Error> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Validation(format!("bad order '{}' in range '{}'", s, spec)))
    };
    match spec.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let n = parse(spec)?;
            Ok((n, n))
        }
    }
}

fn print_group(group: &PermGroup) {
    println!("degree: {}", group.degree());
    println!("order: {}", group.order());
    println!("generators ({}):", group.gens().len());
    for g in group.gens() {
        println!("  {}", g);
    }
}

fn print_record(record: &ClassificationRecord) {
    println!(
        "Cay(Z_{}, {{{}}})",
        record.n,
        record
            .set
            .elems()
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    println!(
        "  connected: {}   bipartite: {}   irreducible: {}",
        record.connected, record.bipartite, record.irreducible
    );
    println!(
        "  verdict: {} (reason: {});  |Aut(X)| = {},  |Aut(B(X))| = {}",
        record.verdict.status.as_str(),
        record.verdict.reason.as_str(),
        record.verdict.aut_x_order,
        record.verdict.aut_bx_order
    );
    match record.arc_transitive {
        Some(b) => println!("  arc-transitive: {}   normal: {}", b, record.normal),
        None => println!(
            "  arc-transitive: n/a (disconnected)   normal: {}",
            record.normal
        ),
    }
    let audits: Vec<String> = record
        .lemma_audits
        .iter()
        .map(|(name, outcome)| format!("{}={}", name, outcome))
        .collect();
    println!("  audits: {}", audits.join("  "));
}

fn print_theorem_report(report: &TheoremReport) {
    println!(
        "orders 3..{} (odd): {} connected irreducible instances",
        report.max_order, report.instances
    );
    for oc in &report.per_order {
        println!("  order {:>2}: {} instances", oc.order, oc.instances);
    }
    if report.holds() {
        println!("counterexamples: none - every instance stable with |Aut(B(X))| = 2|Aut(X)|");
    } else {
        println!("counterexamples: {}", report.counterexamples.len());
        for cx in &report.counterexamples {
            println!(
                "  {:?}: status {}, |Aut(X)| = {}, |Aut(B(X))| = {}",
                cx.set, cx.status, cx.aut_x, cx.aut_bx
            );
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Analyze { order, set, json } => {
            let cs = ConnectionSet::new(order, set)?;
            let record = analyze_one(&cs)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&record).expect("record serializes")
                );
            } else {
                print_record(&record);
            }
            Ok(if record.audit_failures() > 0 {
                EXIT_AUDIT
            } else {
                EXIT_OK
            })
        }
        Command::Sweep {
            orders,
            parity,
            no_dedup,
            jobs,
            out,
            cap,
        } => {
            let (min_order, max_order) = parse_order_range(&orders)?;
            let opts = SweepOptions {
                min_order,
                max_order,
                parity: parity.into(),
                dedup: !no_dedup,
                jobs,
                order_cap: cap,
            };
            opts.validate()?;
            // records stream to disk as each order finishes, so an
            // interrupted run keeps everything completed so far
            let mut file = io::BufWriter::new(fs::File::create(&out)?);
            let report = run_sweep_with(&opts, |record| {
                writeln!(
                    file,
                    "{}",
                    serde_json::to_string(record).expect("record serializes")
                )?;
                file.flush()?;
                Ok(())
            })?;
            drop(file);
            let csv_path = summary_path(&out);
            fs::write(&csv_path, report.summary_csv())?;
            let failures = report.audit_failures();
            println!(
                "{} records -> {} (summary {}); audit failures: {}",
                report.records.len(),
                out.display(),
                csv_path.display(),
                failures
            );
            Ok(if failures > 0 { EXIT_AUDIT } else { EXIT_OK })
        }
        Command::VerifyTheorem {
            max_order,
            json,
            cap,
        } => {
            let report = verify_main_theorem(max_order, cap)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&report).expect("report serializes")
                );
            } else {
                print_theorem_report(&report);
            }
            Ok(if report.holds() { EXIT_OK } else { EXIT_AUDIT })
        }
        Command::Aut { order, set } => {
            let cs = ConnectionSet::new(order, set)?;
            let group = automorphism_group(&circulant(&cs)?)?;
            print_group(&group);
            Ok(EXIT_OK)
        }
        Command::AutGraph { edges } => {
            let text = fs::read_to_string(&edges)?;
            let graph: Graph = serde_json::from_str(&text)
                .map_err(|e| Error::Validation(format!("bad graph file: {}", e)))?;
            let group = automorphism_group(&graph)?;
            print_group(&group);
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors
            if e.use_stderr() {
                eprint!("{}", e);
                return ExitCode::from(EXIT_VALIDATION);
            }
            print!("{}", e);
            return ExitCode::from(EXIT_OK);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code_for(&e))
        }
    }
}
