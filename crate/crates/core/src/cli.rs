//! Command-line front end. Structured output is JSON (CSV for `census`) on
//! stdout or `--out`; a short summary goes to stderr.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::arith::{parse_rat, Rat};
use crate::beckmann::{bad_residue_bound, bad_s_residue_witnesses, is_globally_exceptional, Specialization};
use crate::family::Family;
use crate::grunwald::{self, LocalCondition, SearchOptions, VerifyOptions};
use crate::par::{with_jobs, Exec};
use crate::survey::{census, identify, Verdict};
use crate::Error;

#[derive(Parser, Debug)]
#[command(name = "galspec", version, about = "Ramification and Frobenius data of specialized Galois families")]
pub struct Cli {
    /// Worker threads for census and identify (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Run without the thread pool.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Common {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Branch locus of f(s0, t, X) and τ-adic probes of the declared branch points.
    Branch {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = rat_arg)]
        s0: Option<Rat>,
    },
    /// Bad primes at s0 with witnesses; with --p also the bad residues of s0 mod p.
    Badprimes {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = rat_arg)]
        s0: Option<Rat>,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Predicted inertia of the specialization (s0, t0) at p.
    Predict {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = rat_arg)]
        s0: Option<Rat>,
        #[arg(long, value_parser = rat_arg)]
        t0: Rat,
        #[arg(long)]
        p: u64,
    },
    /// Search for (s0, t0) satisfying local conditions, then verify it.
    Search {
        #[command(flatten)]
        common: Common,
        /// e.g. "p=7,branch=inf,d=1,frob=2" or "p=13,unram,type=3,3,1"
        #[arg(long = "condition")]
        conditions: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Further random progression members to verify.
        #[arg(long, default_value_t = 5)]
        members: usize,
        #[arg(long, default_value_t = 300)]
        id_samples: usize,
    },
    /// Verify local conditions at a given (s0, t0).
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = rat_arg)]
        s0: Option<Rat>,
        #[arg(long, value_parser = rat_arg)]
        t0: Rat,
        #[arg(long = "condition")]
        conditions: Vec<String>,
        #[arg(long, default_value_t = 300)]
        id_samples: usize,
    },
    /// Compare sampled Frobenius cycle types with the declared group.
    Identify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = rat_arg)]
        s0: Option<Rat>,
        #[arg(long, default_value_t = 300)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Predicted against observed inertia over a grid of t0 and primes (CSV).
    Census {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = rat_arg)]
        s0: Option<Rat>,
        /// Inclusive integer range, e.g. -500..500.
        #[arg(long, value_parser = range_arg, allow_hyphen_values = true)]
        t_range: (i64, i64),
        #[arg(long)]
        p_max: u64,
        /// Also write the summary and bad primes as JSON here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

fn rat_arg(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

fn range_arg(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: i64 = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), Error> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

/// The given s0, or the least non-degenerate non-negative integer.
fn resolve_s0(family: &Family, s0: Option<Rat>) -> Result<Rat, Error> {
    match s0 {
        Some(s) => Ok(s),
        None => Ok(grunwald::search_s0(family, &[])?.witness),
    }
}

#[derive(Serialize)]
struct BranchOutput {
    nondegeneracy: crate::family::Nondegeneracy,
    locus: crate::family::BranchLocus,
    probes: Vec<ProbeOutput>,
}

#[derive(Serialize)]
struct ProbeOutput {
    branch: usize,
    location: String,
    declared: String,
    observed: Option<String>,
    error: Option<String>,
}

#[derive(Serialize)]
struct BadPrimesOutput {
    bad_primes: crate::beckmann::BadPrimes,
    #[serde(skip_serializing_if = "Option::is_none")]
    residues: Option<ResidueOutput>,
}

#[derive(Serialize)]
struct ResidueOutput {
    p: u64,
    globally_exceptional: bool,
    bound: usize,
    residues: std::collections::BTreeMap<u64, Vec<String>>,
}

#[derive(Serialize)]
struct PredictOutput {
    #[serde(with = "crate::arith::rat_string")]
    s0: Rat,
    #[serde(with = "crate::arith::rat_string")]
    t0: Rat,
    p: u64,
    prediction: crate::beckmann::Prediction,
    class: String,
    order: usize,
}

#[derive(Serialize)]
struct CensusSummary {
    name: String,
    #[serde(with = "crate::arith::rat_string")]
    s0: Rat,
    rows: usize,
    matched: usize,
    match_rate: f64,
    bad_primes: Vec<u64>,
    skipped_branch_points: Vec<i64>,
}

/// Runs a parsed command line; the result is the process exit code.
pub fn execute(cli: Cli) -> Result<i32, Error> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Auto };
    let jobs = cli.jobs;
    match cli.command {
        Command::Branch { common, s0 } => {
            let fam = Family::load(&common.manifest)?;
            let s0 = resolve_s0(&fam, s0)?;
            let nondegeneracy = fam.nondegenerate_check(&s0);
            let locus = fam.branch_locus(&s0)?;
            let mut consistent = true;
            let probes = (0..fam.branches().len())
                .map(|i| {
                    let b = &fam.branches()[i];
                    let (observed, error) = match fam.inertia_order_probe(i, &s0) {
                        Ok(p) => (Some(p.cycle_type.to_string()), None),
                        Err(e) => {
                            if matches!(e, crate::family::FamilyError::ManifestInconsistent { .. }) {
                                consistent = false;
                            }
                            (None, Some(e.to_string()))
                        }
                    };
                    ProbeOutput {
                        branch: i,
                        location: b.location.to_string(),
                        declared: b.inertia_generator.cycle_type().to_string(),
                        observed,
                        error,
                    }
                })
                .collect();
            eprintln!(
                "{}: s0 = {s0}, {} rational branch points, infinity {}, {}",
                fam.name(),
                locus.finite.len(),
                if locus.infinity { "ramified" } else { "unramified" },
                if nondegeneracy.ok { "non-degenerate" } else { "degenerate" }
            );
            emit(&common.out, &BranchOutput { nondegeneracy, locus, probes })?;
            Ok(if consistent { 0 } else { 1 })
        }
        Command::Badprimes { common, s0, p } => {
            let fam = Family::load(&common.manifest)?;
            let s0 = resolve_s0(&fam, s0)?;
            let sp = Specialization::new(&fam, &s0)?;
            let residues = match p {
                Some(p) => {
                    crate::arith::check_prime(p)?;
                    Some(ResidueOutput {
                        p,
                        globally_exceptional: is_globally_exceptional(&fam, p),
                        bound: bad_residue_bound(&fam),
                        residues: bad_s_residue_witnesses(&fam, p),
                    })
                }
                None => None,
            };
            eprintln!("{}: bad primes at s0 = {s0}: {:?}", fam.name(), sp.bad_primes().list());
            emit(&common.out, &BadPrimesOutput { bad_primes: sp.bad_primes().clone(), residues })?;
            Ok(0)
        }
        Command::Predict { common, s0, t0, p } => {
            let fam = Family::load(&common.manifest)?;
            let s0 = resolve_s0(&fam, s0)?;
            let sp = Specialization::new(&fam, &s0)?;
            let prediction = sp.predict(&t0, p)?;
            eprintln!("{}: inertia at {p} of order {} (class {})", fam.name(), prediction.order(), prediction.class());
            let out = PredictOutput {
                s0,
                t0,
                p,
                class: prediction.class().to_string(),
                order: prediction.order(),
                prediction,
            };
            emit(&common.out, &out)?;
            Ok(0)
        }
        Command::Search { common, conditions, seed, members, id_samples } => {
            let fam = Family::load(&common.manifest)?;
            let conds = LocalCondition::parse_all(&conditions, &fam)?;
            let opts = SearchOptions { seed, further_members: members, id_samples, exec };
            let report = with_jobs(jobs, || grunwald::search(&fam, &conds, opts))?;
            eprintln!("{}: s0 = {}, t0 = {}: {}", fam.name(), report.s0, report.t0, if report.pass { "PASS" } else { "FAIL" });
            for f in report.failures() {
                eprintln!("  {f}");
            }
            emit(&common.out, &report)?;
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Verify { common, s0, t0, conditions, id_samples } => {
            let fam = Family::load(&common.manifest)?;
            let s0 = resolve_s0(&fam, s0)?;
            let conds = LocalCondition::parse_all(&conditions, &fam)?;
            let report = grunwald::verify(&fam, &s0, &t0, &conds, VerifyOptions { id_samples })?;
            eprintln!("{}: s0 = {s0}, t0 = {t0}: {}", fam.name(), if report.pass { "PASS" } else { "FAIL" });
            for f in report.failures() {
                eprintln!("  {f}");
            }
            emit(&common.out, &report)?;
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Identify { common, s0, samples, seed } => {
            let fam = Family::load(&common.manifest)?;
            let s0 = resolve_s0(&fam, s0)?;
            let report = with_jobs(jobs, || identify(&fam, &s0, samples, seed, exec))?;
            eprintln!("{}: {:?} after {} samples", fam.name(), report.verdict, report.samples);
            emit(&common.out, &report)?;
            Ok(if report.verdict == Verdict::Reject { 1 } else { 0 })
        }
        Command::Census { common, s0, t_range, p_max, summary } => {
            let fam = Family::load(&common.manifest)?;
            let s0 = resolve_s0(&fam, s0)?;
            let c = with_jobs(jobs, || census(&fam, &s0, t_range.0..=t_range.1, p_max, exec))?;
            c.write_csv(sink(&common.out)?)?;
            let s = CensusSummary {
                name: c.name.clone(),
                s0: c.s0.clone(),
                rows: c.rows.len(),
                matched: c.matched(),
                match_rate: c.match_rate(),
                bad_primes: c.bad_primes.clone(),
                skipped_branch_points: c.skipped_branch_points.clone(),
            };
            eprintln!("{}: {}/{} rows match; bad primes {:?}", s.name, s.matched, s.rows, s.bad_primes);
            if let Some(path) = &summary {
                emit(&Some(path.clone()), &s)?;
            }
            Ok(if s.matched == s.rows { 0 } else { 1 })
        }
    }
}

/// Parses `args` and runs; errors are reported on stderr and mapped to exit codes.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
