use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pathspace::document::{self, fixture_document, Directive, Document};
use pathspace::graph::{fixture, from_digraph, random_instance};
use pathspace::report::{run, verify_report, Report};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "pathspace", version, about = "Disjoint paths and separators in path spaces")]
struct Cli {
    /// Document to read; standard input when absent.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Report)]
    format: Format,
    /// Seed for generated instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// JSON report on stdout, summary on stderr.
    Report,
    /// Summary only, on stdout.
    Summary,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the document's directives.
    Run,
    /// Re-check the certificates in a report against the document.
    Verify {
        #[arg(long)]
        report: PathBuf,
    },
    /// Print a named fixture as a document.
    Fixture { name: String },
    /// Print a random digraph instance as a document.
    RandomGraph {
        #[arg(long, default_value_t = 12)]
        max_nodes: usize,
        #[arg(long, default_value_t = 0.1)]
        min_density: f64,
        #[arg(long, default_value_t = 0.5)]
        max_density: f64,
    },
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    match path {
        Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
            Ok(s)
        }
    }
}

fn load(path: &Option<PathBuf>) -> Result<Document, u8> {
    let text = read_input(path).map_err(|e| {
        eprintln!("error: {e:#}");
        EXIT_INPUT
    })?;
    document::parse(&text).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT
    })
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Report => {
            println!("{}", serde_json::to_string_pretty(report).expect("reports serialize"));
            eprintln!("{}", report.summary());
        }
        Format::Summary => println!("{}", report.summary()),
    }
}

fn execute(cli: Cli) -> Result<(), u8> {
    match cli.command {
        Command::Run => {
            let doc = load(&cli.input)?;
            let report = run(&doc).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_INPUT
            })?;
            emit(&report, cli.format);
            if !report.all_verified() {
                return Err(EXIT_VERIFY);
            }
        }
        Command::Verify { report } => {
            let doc = load(&cli.input)?;
            let text = std::fs::read_to_string(&report).map_err(|e| {
                eprintln!("error: reading {}: {e}", report.display());
                EXIT_INPUT
            })?;
            let report: Report = serde_json::from_str(&text).map_err(|e| {
                eprintln!("error: malformed report: {e}");
                EXIT_INPUT
            })?;
            let results = verify_report(&doc, &report).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_INPUT
            })?;
            let mut failed = false;
            for (i, r) in results.iter().enumerate() {
                match r {
                    Ok(()) => println!("certificate {i}: ok"),
                    Err(why) => {
                        failed = true;
                        println!("certificate {i}: FAILED: {why}");
                    }
                }
            }
            if failed {
                return Err(EXIT_VERIFY);
            }
        }
        Command::Fixture { name } => {
            let f = fixture(&name).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_INPUT
            })?;
            print!("# {}\n{}", f.description, fixture_document(&f));
        }
        Command::RandomGraph {
            max_nodes,
            min_density,
            max_density,
        } => {
            if !(0.0..=1.0).contains(&min_density) || !(min_density..=1.0).contains(&max_density) {
                eprintln!("error: densities must satisfy 0 <= min <= max <= 1");
                return Err(EXIT_INPUT);
            }
            let inst = random_instance(cli.seed, max_nodes, (min_density, max_density));
            let k = inst.a.len().min(inst.b.len());
            let doc = Document {
                presentation: from_digraph(&inst.graph),
                sets: BTreeMap::from([("A".to_string(), inst.a), ("B".to_string(), inst.b)]),
                directives: vec![Directive::Solve {
                    a: "A".into(),
                    b: "B".into(),
                    k,
                    mode: Default::default(),
                }],
            };
            print!("# seed {} density {:.3}\n{doc}", cli.seed, inst.density);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
