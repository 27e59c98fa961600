//! Command-line front end: `classify`, `scan` and `table`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::genericfan;
use crate::report::{self, Options, ReportDocument};
use crate::rootsys::{Family, RootSystem, RootSystemSpec, Weight};

#[derive(Parser, Debug)]
#[command(
    name = "rootfan",
    version,
    about = "Fano classification, minimal pairs and lattice-regularity of the fans Σ_λ attached to root systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the fan of one support.
    Classify(ClassifyArgs),
    /// Classify every support of a root system.
    Scan(ScanArgs),
    /// Print the table of ℚ-Gorenstein-Fano supports.
    Table(TableArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Recompute facets, extreme rays, the global Fano condition and (with
    /// --regularity) the automorphism count by independent methods; rank ≤ 4.
    #[arg(long)]
    oracle: bool,
    /// Compute the automorphism order, flag count and lattice-regularity (rank ≤ 6).
    #[arg(long)]
    regularity: bool,
    /// Allow full scans of E7 and E8.
    #[arg(long)]
    allow_long: bool,
    /// Write the data stream to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SystemArgs {
    /// Family letter (A-G) with --rank, or a full type such as B3 or A1xA2.
    #[arg(long = "type", value_name = "TYPE")]
    type_name: String,
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Support of λ = -Σ_{i∈support} ω_i, as 1-based labels.
    #[arg(long, value_delimiter = ',', required_unless_present = "weight", conflicts_with = "weight")]
    support: Vec<usize>,
    /// An anti-dominant weight in ω-coordinates; only its support is used.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weight: Option<Vec<i64>>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    output: Output,
    /// Suppress progress messages.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Family letters to include.
    #[arg(long, value_delimiter = ',', default_value = "A,B,C,D,E,F,G")]
    types: Vec<String>,
    /// Largest rank to scan.
    #[arg(long)]
    max_rank: usize,
    #[command(flatten)]
    output: Output,
    #[arg(long)]
    quiet: bool,
}

fn root_system(args: &SystemArgs) -> Result<RootSystem> {
    let spec: RootSystemSpec = match args.rank {
        Some(rank) => {
            let mut chars = args.type_name.trim().chars();
            let family = match (chars.next().and_then(Family::from_letter), chars.next()) {
                (Some(f), None) => f,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "with --rank, --type must be a single family letter, got '{}'",
                        args.type_name
                    )))
                }
            };
            RootSystemSpec::irreducible(family, rank)?
        }
        None => args.type_name.parse()?,
    };
    RootSystem::new(&spec)
}

fn is_long(rs: &RootSystem) -> bool {
    rs.spec().components.iter().any(|c| c.family == Family::E && c.rank >= 7)
}

fn emit(output: &Output, data: &str, out: &mut dyn Write) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidArgument(format!("cannot write output: {e}"));
    match &output.out {
        Some(path) => std::fs::write(path, data).map_err(io),
        None => out.write_all(data.as_bytes()).map_err(io),
    }
}

fn render(docs: &[ReportDocument], format: Format, single: bool) -> Result<String> {
    match format {
        Format::Json => report::to_json(docs, single),
        Format::Csv => report::to_csv(docs),
        Format::Text => Ok(report::to_text(docs)),
    }
}

fn options(output: &Output) -> Options {
    Options { oracle: output.oracle, regularity: output.regularity }
}

fn classify(args: &ClassifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let rs = root_system(&args.system)?;
    let support = match &args.weight {
        Some(w) => {
            let weight = Weight(w.clone());
            let gf = genericfan::build_sigma_from_weight(&rs, &weight)?;
            let _ = writeln!(
                err,
                "note: weight {weight} reduced to its support {}",
                report::set_string(gf.support())
            );
            gf.support().to_vec()
        }
        None => args.support.clone(),
    };
    let doc = report::analyze(&rs, &support, options(&args.output))?;
    emit(&args.output, &render(&[doc], args.output.format, true)?, out)
}

/// Classify all supports in parallel, returning them in canonical order.
fn scan_system(rs: &RootSystem, opts: Options, quiet: bool) -> Result<Vec<ReportDocument>> {
    let supports = report::all_supports(rs);
    let done = AtomicUsize::new(0);
    let total = supports.len();
    supports
        .par_iter()
        .map(|s| {
            let doc = report::analyze(rs, s, opts);
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            if !quiet {
                eprintln!("[{k}/{total}] {} {}", rs.spec(), report::set_string(s));
            }
            doc
        })
        .collect()
}

fn scan(args: &ScanArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let rs = root_system(&args.system)?;
    if is_long(&rs) && !args.output.allow_long {
        return Err(Error::InvalidArgument(format!("a full scan of {} needs --allow-long", rs.spec())));
    }
    let docs = scan_system(&rs, options(&args.output), args.quiet)?;
    let hits: Vec<String> = docs
        .iter()
        .filter(|d| d.flags.q_gorenstein_fano)
        .map(|d| report::set_string(&d.input.support))
        .collect();
    let summary = format!(
        "{}: {} of {} supports are Q-Gorenstein-Fano: {}\n",
        rs.spec(),
        hits.len(),
        docs.len(),
        hits.join(" ")
    );
    let mut data = render(&docs, args.output.format, false)?;
    if args.output.format == Format::Text {
        data.push('\n');
        data.push_str(&summary);
    } else {
        let _ = err.write_all(summary.as_bytes());
    }
    emit(&args.output, &data, out)
}

fn table_ranks(family: Family, max_rank: usize) -> Vec<usize> {
    let lower = match family {
        Family::D => 4,
        _ => 1,
    };
    (lower..=max_rank).filter(|&r| family.admits(r)).collect()
}

fn table(args: &TableArgs, out: &mut dyn Write) -> Result<()> {
    let mut families: Vec<Family> = args
        .types
        .iter()
        .map(|t| {
            let mut c = t.trim().chars();
            match (c.next().and_then(Family::from_letter), c.next()) {
                (Some(f), None) => Ok(f),
                _ => Err(Error::InvalidArgument(format!("unknown family '{t}'"))),
            }
        })
        .collect::<Result<_>>()?;
    families.sort();
    families.dedup();
    let mut rows = Vec::new();
    for family in families {
        for rank in table_ranks(family, args.max_rank) {
            let rs = RootSystem::irreducible(family, rank)?;
            if is_long(&rs) && !args.output.allow_long {
                eprintln!("skipping {}: needs --allow-long", rs.spec());
                continue;
            }
            let opts = Options { oracle: args.output.oracle, regularity: true };
            for doc in scan_system(&rs, opts, args.quiet)? {
                if doc.flags.q_gorenstein_fano {
                    let gf = genericfan::build_sigma(&rs, &doc.input.support)?;
                    let same = crate::assoc::minimal_pair(&gf)?.is_same_pair(&gf);
                    rows.push(report::table_row(&doc, same));
                }
            }
        }
    }
    let data = match args.output.format {
        Format::Text => report::table_text(&rows),
        Format::Csv => report::table_csv(&rows)?,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).map_err(|e| Error::Invariant(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    emit(&args.output, &data, out)
}

/// Parse `args` and run, writing data to `out` and messages to `err`; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Classify(a) => classify(a, out, err),
        Command::Scan(a) => scan(a, out, err),
        Command::Table(a) => table(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::SCHEMA;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("rootfan").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn json(args: &[&str]) -> serde_json::Value {
        let (code, out, err) = run_args(args);
        assert_eq!(code, 0, "{err}");
        serde_json::from_str(&out).unwrap()
    }

    fn assert_valid(doc: &serde_json::Value) {
        let schema: serde_json::Value = serde_json::from_str(SCHEMA).unwrap();
        let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
        let msgs: Vec<String> = match compiled.validate(doc) {
            Ok(()) => Vec::new(),
            Err(errors) => errors.map(|e| e.to_string()).collect(),
        };
        assert!(msgs.is_empty(), "schema violations: {msgs:?}");
    }

    #[test]
    fn classify_examples() {
        let g2 = json(&["classify", "--type", "G", "--rank", "2", "--support", "2"]);
        assert_valid(&g2);
        assert_eq!(g2["flags"]["fano"], true);
        assert_eq!(g2["j_lambda"], serde_json::json!([1]));

        let f4 = json(&["classify", "--type", "F4", "--support", "4"]);
        assert_valid(&f4);
        assert_eq!(f4["flags"]["q_gorenstein_fano"], true);
        assert_eq!(f4["flags"]["gorenstein_fano"], false);

        let a2 = json(&["classify", "--type", "A", "--rank", "2", "--support", "1,2", "--regularity"]);
        assert_valid(&a2);
        assert_eq!(a2["regularity"]["aut_order"], 12);
        assert_eq!(a2["regularity"]["flag_count"], 12);
        assert_eq!(a2["regularity"]["lattice_regular"], true);
    }

    #[test]
    fn weight_is_reduced_to_support() {
        let (code, out, err) = run_args(&["classify", "--type", "B3", "--weight", "0,-3,0"]);
        assert_eq!(code, 0);
        assert!(err.contains("reduced to its support {2}"), "{err}");
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["input"]["support"], serde_json::json!([2]));
        let (code, _, _) = run_args(&["classify", "--type", "B3", "--weight", "0,3,0"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn scan_counts() {
        for (ty, rank, expected) in [("A", "3", "{1} {1,3} {2} {3}"), ("D", "4", "{1} {2} {3} {4}"), ("E", "6", "{2}")] {
            let (code, out, err) = run_args(&["scan", "--type", ty, "--rank", rank, "--quiet"]);
            assert_eq!(code, 0);
            assert!(err.trim_end().ends_with(expected), "{err}");
            let docs: serde_json::Value = serde_json::from_str(&out).unwrap();
            assert_valid(&docs);
        }
    }

    #[test]
    fn output_is_deterministic() {
        for format in ["json", "csv", "text"] {
            let args = ["scan", "--type", "B", "--rank", "3", "--quiet", "--format", format];
            let (_, a, _) = run_args(&args);
            let (_, b, _) = run_args(&args);
            assert_eq!(a, b, "{format}");
        }
    }

    #[test]
    fn oracle_leaves_flags_unchanged() {
        for s in ["1", "2", "3", "1,3"] {
            let plain = json(&["classify", "--type", "C3", "--support", s]);
            let checked = json(&["classify", "--type", "C3", "--support", s, "--oracle"]);
            assert_eq!(plain["flags"], checked["flags"]);
            assert_eq!(plain["normal"], checked["normal"]);
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["--help"]).0, 0);
        assert_eq!(run_args(&["--version"]).0, 0);
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["classify", "--type", "A", "--rank", "3"]).0, 1);
        assert_eq!(run_args(&["classify", "--type", "A", "--rank", "3", "--support", "4"]).0, 1);
        assert_eq!(run_args(&["classify", "--type", "D", "--rank", "2", "--support", "1"]).0, 1);
        assert_eq!(run_args(&["scan", "--type", "E", "--rank", "7"]).0, 1);
        assert_eq!(Error::Invariant(String::new()).exit_code(), 2);
        assert_eq!(Error::OracleMismatch(String::new()).exit_code(), 2);
    }

    #[test]
    fn out_file_receives_data() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g2.csv");
        let p = path.to_str().unwrap();
        let (code, out, _) = run_args(&["classify", "--type", "G2", "--support", "1", "--format", "csv", "--out", p]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        let written = std::fs::read_to_string(&path).unwrap();
        assert!(written.starts_with("\"type\",\"rank\""), "{written}");
        assert_eq!(written.lines().count(), 2);
    }

    #[test]
    fn table_rows_and_empty_table() {
        let (code, out, _) = run_args(&["table", "--types", "G", "--max-rank", "2", "--format", "text", "--quiet"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4, "{out}");
        assert!(lines[2].starts_with("(G2, -ω1)") && lines[2].trim_end().ends_with("yes"));
        assert!(lines[3].starts_with("(G2, -ω2)") && lines[3].contains("Smooth, Fano"));

        let (code, out, _) = run_args(&["table", "--types", "A,B,C", "--max-rank", "3", "--format", "text", "--quiet"]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l.starts_with("(B3, -ω2)") && l.contains("{-ω1, -ω3}")), "{out}");

        let (code, out, _) = run_args(&["table", "--types", "D", "--max-rank", "3", "--format", "text"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 2, "{out}");
    }
}
