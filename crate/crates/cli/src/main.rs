//! Command-line interface: classify branch data, scan degree ranges with a
//! persistent cache, run the exhaustive search directly, generate known
//! families, and work with map and covering-data files.

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hurwitz::criteria::{certify, Certificate, CertifyOptions, Verdict, CRITERIA_VERSION};
use hurwitz::dessins;
use hurwitz::generators;
use hurwitz::halphen;
use hurwitz::oracle::{find_constellation, SearchLimits, SearchOutcome, ORACLE_VERSION};
use hurwitz::{BranchDatum, Partition};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::{Duration, Instant};

const EXIT_OK: u8 = 0;
const EXIT_PARSE: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;

#[derive(Parser)]
#[command(name = "hurwitz", about = "Branch-data realizability toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Per-datum time budget for the exhaustive search, in seconds.
    #[arg(long, global = true)]
    timeout: Option<f64>,
    /// JSONL verdict cache; scans resume from it and append to it.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads for scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one branch datum with the certificate cascade.
    Check {
        /// Datum, e.g. "(2,2 | 2,2 | 1,3)".
        datum: String,
        /// Skip the exhaustive-search fallback.
        #[arg(long)]
        no_oracle: bool,
    },
    /// Classify every datum of a given degree and genus.
    Scan {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        g: u64,
        /// Cap on the number of branching points (default: the maximum the
        /// Riemann-Hurwitz relation allows).
        #[arg(long)]
        q_max: Option<usize>,
        /// Allow the exhaustive-search fallback for data the criteria miss.
        #[arg(long)]
        oracle: bool,
    },
    /// Run only the exhaustive constellation search.
    Oracle {
        datum: String,
        /// Degree bound above which the search refuses to run.
        #[arg(long)]
        max_n: Option<u64>,
    },
    /// Print data from the known generator families.
    Generate {
        #[command(subcommand)]
        family: GenerateCommand,
    },
    /// Work with combinatorial-map files.
    Dessin {
        #[command(subcommand)]
        action: DessinCommand,
    },
    /// Work with polynomial covering-data files.
    Halphen {
        #[command(subcommand)]
        action: HalphenCommand,
    },
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// Datum from a positive-characteristic triple: prop <a> <b> <c> --k <k>.
    Prop {
        a: u64,
        b: u64,
        c: u64,
        #[arg(long)]
        k: u64,
        /// Extra partitions, e.g. --extra "2,2,2".
        #[arg(long = "extra")]
        extras: Vec<String>,
    },
    /// Named series: iz0 | such | thd | wbd | koro, with their parameters.
    Series { name: String, params: Vec<u64> },
    /// All data of a given degree and genus.
    Enumerate {
        n: u64,
        #[arg(long, default_value_t = 0)]
        g: u64,
        #[arg(long)]
        q_max: Option<usize>,
    },
}

#[derive(Subcommand)]
enum DessinCommand {
    /// Parse a .map file, print its datum, and classify it.
    Check {
        file: PathBuf,
        /// Face-degree modulus for the divisibility-pattern report.
        #[arg(long, requires = "l")]
        k: Option<u64>,
        /// Vertex-degree modulus for the divisibility-pattern report.
        #[arg(long, requires = "k")]
        l: Option<u64>,
    },
}

#[derive(Subcommand)]
enum HalphenCommand {
    /// Verify a .cov file by exact expansion.
    Verify { file: PathBuf },
    /// Print dihedral covering data for the triple (2,2,d).
    Dihedral { d: u64 },
}

/// One classification result; also the JSON/JSONL wire format.
#[derive(Serialize, Deserialize, Clone)]
struct Report {
    datum: String,
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    witness: Option<String>,
    elapsed_ms: u64,
}

/// Cache line: a report plus the version tags that produced it.
#[derive(Serialize, Deserialize)]
struct CacheEntry {
    version: String,
    #[serde(flatten)]
    report: Report,
}

fn version_tag() -> String {
    format!("{CRITERIA_VERSION}+{ORACLE_VERSION}")
}

fn classify(datum: &BranchDatum, opts: &CertifyOptions) -> Report {
    let start = Instant::now();
    let verdict = certify(datum, opts);
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let (verdict, certificate, witness) = match verdict {
        Verdict::Realizable(c) => ("realizable".to_string(), None, Some(c.witness_string())),
        Verdict::NonRealizable(cert) => ("non-realizable".to_string(), Some(cert), None),
        Verdict::Unknown(notes) => (format!("unknown ({})", notes.join("; ")), None, None),
    };
    Report {
        datum: datum.to_string(),
        verdict,
        certificate,
        witness,
        elapsed_ms,
    }
}

fn cert_kind(report: &Report) -> String {
    report
        .certificate
        .as_ref()
        .map(|c| c.kind.to_string())
        .unwrap_or_default()
}

fn csv_quote(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

fn print_report(report: &Report, format: Format) -> Result<()> {
    match format {
        Format::Text => {
            println!("datum: {}", report.datum);
            println!("verdict: {}", report.verdict);
            if let Some(cert) = &report.certificate {
                println!("certificate: {}", serde_json::to_string_pretty(cert)?);
            }
            if let Some(witness) = &report.witness {
                println!("witness: {witness}");
            }
            println!("elapsed_ms: {}", report.elapsed_ms);
        }
        Format::Json => println!("{}", serde_json::to_string(report)?),
        Format::Csv => {
            println!("datum,verdict,cert_kind,elapsed_ms");
            print_csv_row(report);
        }
    }
    Ok(())
}

fn print_csv_row(report: &Report) {
    println!(
        "{},{},{},{}",
        csv_quote(&report.datum),
        report.verdict,
        cert_kind(report),
        report.elapsed_ms
    );
}

fn search_limits(timeout: Option<f64>, max_n: Option<u64>) -> SearchLimits {
    let mut limits = SearchLimits::default();
    if let Some(seconds) = timeout {
        limits.timeout = Some(Duration::from_secs_f64(seconds));
    }
    if let Some(max_n) = max_n {
        limits.max_n = max_n;
    }
    limits
}

fn load_cache(path: &Path) -> Result<HashMap<String, Report>> {
    let mut cache = HashMap::new();
    if !path.exists() {
        return Ok(cache);
    }
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading cache {}", path.display()))?;
    let tag = version_tag();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        // Unreadable or stale lines are recomputed, not fatal.
        if let Ok(entry) = serde_json::from_str::<CacheEntry>(line) {
            if entry.version == tag {
                cache.insert(entry.report.datum.clone(), entry.report);
            }
        }
    }
    Ok(cache)
}

fn cmd_check(datum_text: &str, no_oracle: bool, cli: &Cli) -> Result<u8> {
    let datum: BranchDatum = match datum_text.parse() {
        Ok(d) => d,
        Err(err) => {
            eprintln!("error: {err}");
            return Ok(EXIT_PARSE);
        }
    };
    let opts = CertifyOptions {
        use_oracle: !no_oracle,
        oracle_limits: search_limits(cli.timeout, None),
        ..CertifyOptions::default()
    };
    let report = classify(&datum, &opts);
    let unknown = report.verdict.starts_with("unknown");
    print_report(&report, cli.format)?;
    Ok(if unknown { EXIT_UNKNOWN } else { EXIT_OK })
}

fn cmd_scan(n: u64, g: u64, q_max: Option<usize>, oracle: bool, cli: &Cli) -> Result<u8> {
    let q_max = q_max.unwrap_or(usize::MAX);
    let data = generators::enumerate_data(n, g, q_max);
    let cache = match &cli.cache {
        Some(path) => load_cache(path)?,
        None => HashMap::new(),
    };
    let opts = CertifyOptions {
        use_oracle: oracle,
        oracle_limits: search_limits(cli.timeout, None),
        ..CertifyOptions::default()
    };

    // Workers classify; a single consumer appends fresh results to the cache.
    let (sender, receiver) = mpsc::channel::<(usize, Report)>();
    let cache_path = cli.cache.clone();
    let writer = std::thread::spawn(move || -> Result<()> {
        let tag = version_tag();
        let mut file = match &cache_path {
            Some(path) => Some(
                fs::OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)
                    .with_context(|| format!("opening cache {}", path.display()))?,
            ),
            None => None,
        };
        for (_, report) in receiver {
            if let Some(file) = file.as_mut() {
                let entry = CacheEntry {
                    version: tag.clone(),
                    report,
                };
                writeln!(file, "{}", serde_json::to_string(&entry)?)?;
            }
        }
        Ok(())
    });

    use rayon::prelude::*;
    let mut reports: Vec<Option<Report>> = data
        .iter()
        .map(|d| cache.get(&d.to_string()).cloned())
        .collect();
    let pending: Vec<usize> = (0..data.len()).filter(|&i| reports[i].is_none()).collect();
    let computed: Vec<(usize, Report)> = pending
        .par_iter()
        .map(|&i| {
            let report = classify(&data[i], &opts);
            let _ = sender.send((i, report.clone()));
            (i, report)
        })
        .collect();
    drop(sender);
    writer
        .join()
        .map_err(|_| anyhow!("cache writer panicked"))??;
    for (i, report) in computed {
        reports[i] = Some(report);
    }
    let reports: Vec<Report> = reports.into_iter().map(|r| r.unwrap()).collect();

    let mut counts: HashMap<&str, usize> = HashMap::new();
    for report in &reports {
        let class = if report.verdict.starts_with("unknown") {
            "unknown"
        } else {
            &report.verdict
        };
        *counts.entry(class).or_default() += 1;
    }
    match cli.format {
        Format::Text => {
            for report in &reports {
                let kind = cert_kind(report);
                let kind = if kind.is_empty() { String::new() } else { format!(" [{kind}]") };
                println!("{}  {}{}", report.datum, report.verdict, kind);
            }
            println!(
                "total {}: {} realizable, {} non-realizable, {} unknown",
                reports.len(),
                counts.get("realizable").copied().unwrap_or(0),
                counts.get("non-realizable").copied().unwrap_or(0),
                counts.get("unknown").copied().unwrap_or(0)
            );
        }
        Format::Json => {
            for report in &reports {
                println!("{}", serde_json::to_string(report)?);
            }
        }
        Format::Csv => {
            println!("datum,verdict,cert_kind,elapsed_ms");
            for report in &reports {
                print_csv_row(report);
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_oracle(datum_text: &str, max_n: Option<u64>, cli: &Cli) -> Result<u8> {
    let datum: BranchDatum = match datum_text.parse() {
        Ok(d) => d,
        Err(err) => {
            eprintln!("error: {err}");
            return Ok(EXIT_PARSE);
        }
    };
    let limits = search_limits(cli.timeout, max_n);
    let start = Instant::now();
    let outcome = find_constellation(&datum, &limits);
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let (verdict, witness) = match &outcome {
        SearchOutcome::Found(c) => ("realizable".to_string(), Some(c.witness_string())),
        SearchOutcome::Exhausted => ("non-realizable".to_string(), None),
        SearchOutcome::Aborted(reason) => (format!("unknown ({reason})"), None),
    };
    let report = Report {
        datum: datum.to_string(),
        verdict,
        certificate: None,
        witness,
        elapsed_ms,
    };
    let unknown = report.verdict.starts_with("unknown");
    print_report(&report, cli.format)?;
    Ok(if unknown { EXIT_UNKNOWN } else { EXIT_OK })
}

fn cmd_generate(family: &GenerateCommand) -> Result<u8> {
    match family {
        GenerateCommand::Prop { a, b, c, k, extras } => {
            let extras: Result<Vec<Partition>, _> = extras
                .iter()
                .map(|text| {
                    let parts: Result<Vec<u64>, _> =
                        text.split(',').map(|tok| tok.trim().parse::<u64>()).collect();
                    parts
                        .map_err(|_| anyhow!("bad partition '{text}'"))
                        .and_then(|p| Partition::new(p).map_err(|e| anyhow!("{e}")))
                })
                .collect();
            let extras = match extras {
                Ok(e) => e,
                Err(err) => {
                    eprintln!("error: {err}");
                    return Ok(EXIT_PARSE);
                }
            };
            match generators::gen_prop_family(*a, *b, *c, *k, &extras) {
                Ok(datum) => println!("{datum}"),
                Err(err) => {
                    eprintln!("error: {err}");
                    return Ok(EXIT_PARSE);
                }
            }
        }
        GenerateCommand::Series { name, params } => {
            match generators::gen_series(name, params) {
                Ok(datum) => println!("{datum}"),
                Err(err) => {
                    eprintln!("error: {err}");
                    return Ok(EXIT_PARSE);
                }
            }
        }
        GenerateCommand::Enumerate { n, g, q_max } => {
            for datum in generators::enumerate_data(*n, *g, q_max.unwrap_or(usize::MAX)) {
                println!("{datum}");
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_dessin(action: &DessinCommand, cli: &Cli) -> Result<u8> {
    match action {
        DessinCommand::Check { file, k, l } => {
            let text = fs::read_to_string(file)
                .with_context(|| format!("reading {}", file.display()))?;
            let map = match dessins::parse_map(&text) {
                Ok(m) => m,
                Err(err) => {
                    eprintln!("error: {err}");
                    return Ok(EXIT_PARSE);
                }
            };
            let datum = match map.to_datum() {
                Ok(d) => d,
                Err(err) => {
                    eprintln!("error: {err}");
                    return Ok(EXIT_PARSE);
                }
            };
            let opts = CertifyOptions {
                oracle_limits: search_limits(cli.timeout, None),
                ..CertifyOptions::default()
            };
            let report = classify(&datum, &opts);
            let unknown = report.verdict.starts_with("unknown");
            print_report(&report, cli.format)?;
            if let (Some(k), Some(l)) = (k, l) {
                let hypo = dessins::check_graph_hypotheses(&map, *k, *l)
                    .map_err(|e| anyhow!("{e}"))?;
                match cli.format {
                    Format::Json => println!("{}", serde_json::to_string(&hypo)?),
                    _ => println!(
                        "pattern (k={k}, l={l}): {:?}, consistent: {}",
                        hypo.pattern, hypo.consistent
                    ),
                }
            }
            Ok(if unknown { EXIT_UNKNOWN } else { EXIT_OK })
        }
    }
}

fn cmd_halphen(action: &HalphenCommand) -> Result<u8> {
    match action {
        HalphenCommand::Verify { file } => {
            let text = fs::read_to_string(file)
                .with_context(|| format!("reading {}", file.display()))?;
            let data = match halphen::parse_covering(&text) {
                Ok(d) => d,
                Err(err) => {
                    eprintln!("error: {err}");
                    return Ok(EXIT_PARSE);
                }
            };
            let ok = data.verify().map_err(|e| anyhow!("{e}"))?;
            if ok {
                println!(
                    "OK: Q^{} + P^{} = R^{} over Q(\u{221a}{})",
                    data.a, data.b, data.c, data.d
                );
                Ok(EXIT_OK)
            } else {
                println!("FAIL: covering data does not verify");
                Ok(1)
            }
        }
        HalphenCommand::Dihedral { d } => {
            if *d < 2 {
                eprintln!("error: d must be at least 2");
                return Ok(EXIT_PARSE);
            }
            print!("{}", halphen::format_covering(&halphen::dihedral_covering(*d)));
            Ok(EXIT_OK)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring thread pool")?;
    }
    match &cli.command {
        Command::Check { datum, no_oracle } => cmd_check(datum, *no_oracle, cli),
        Command::Scan { n, g, q_max, oracle } => cmd_scan(*n, *g, *q_max, *oracle, cli),
        Command::Oracle { datum, max_n } => cmd_oracle(datum, *max_n, cli),
        Command::Generate { family } => cmd_generate(family),
        Command::Dessin { action } => cmd_dessin(action, cli),
        Command::Halphen { action } => cmd_halphen(action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
