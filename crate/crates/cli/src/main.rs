//! `coversys` — verify residue-system coverage and run no-covering
//! certificates from the command line.
//!
//! Exit codes are a stable contract: 0 for "covers"/"certified"/pass,
//! 1 for "does not cover"/"failed", 2 for usage or input errors, 3 for
//! resource refusals (sieve capacity, branching node budget).

use clap::{Parser, Subcommand, ValueEnum};
use coversys_core::certificate::{
    self, CertificateParams, CertificateReport, DeltaPolicy, ThresholdLadder,
};
use coversys_core::primes::{ExpArg, SieveConfig, Threshold};
use coversys_core::residue::format as sysformat;
use coversys_core::residue::{CoverError, CoverLimits, ResidueSystem, UncoveredSet};
use std::io::Read;
use std::path::PathBuf;
use std::str::FromStr;

const EXIT_FALSE: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_RESOURCE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "coversys",
    version,
    about = "Covering systems: exact verification and no-covering certificates",
    max_term_width = 100
)]
struct Cli {
    /// Output format for results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Sieve capacity (largest admissible prime bound); also settable via
    /// COVERSYS_SIEVE_CAPACITY.
    #[arg(long, global = true)]
    sieve_capacity: Option<u64>,

    /// Odd numbers per sieve segment; also settable via
    /// COVERSYS_SIEVE_SEGMENT.
    #[arg(long, global = true)]
    segment_size: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(clap::Args)]
struct SystemInput {
    /// Input file (`-` for stdin); text or JSON, sniffed by content.
    file: Option<PathBuf>,

    /// Inline system, classes separated by `,` or `;` (e.g. "0 mod 2, 1 mod 4").
    #[arg(long, conflicts_with = "file")]
    inline: Option<String>,

    /// Reject systems with a repeated modulus.
    #[arg(long)]
    strict: bool,

    /// Node budget for the branching verifier.
    #[arg(long, default_value_t = CoverLimits::default().max_nodes)]
    max_nodes: u64,

    /// Residues enumerated into the reported sample.
    #[arg(long, default_value_t = 8)]
    show: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a residue system covers the integers.
    CheckCover(SystemInput),
    /// Print the exact uncovered density of a residue system.
    Density(SystemInput),
    /// Run the step-by-step no-covering certificate.
    Certify {
        /// Base: all primes greater than this bound.
        #[arg(long, default_value_t = 19)]
        q0: u64,
        /// Moment index.
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// The parameter e^lambda.
        #[arg(long, default_value_t = 2.0)]
        elambda: f64,
        /// Lower bound on the good-fiber proportion.
        #[arg(long, default_value_t = 0.5)]
        pigood: f64,
        /// Last verified step.
        #[arg(long, default_value_t = 8)]
        imax: usize,
        /// Uniform exponent cap on base elements (unbounded if omitted).
        #[arg(long)]
        vcap: Option<u32>,
        /// Quick-check mode: certify by comparing the base harmonic-sum
        /// bound against this fixed constant (no inductive steps).
        #[arg(long)]
        delta: Option<f64>,
        /// First step cutoff exponent: P_i = e^(p0exp + i).
        #[arg(long, default_value = "6")]
        p0exp: String,
        /// Numerically probe this many steps past imax (evidence only).
        #[arg(long, default_value_t = 0)]
        probe: usize,
    },
    /// Re-emit the default certification as the classic two-column table.
    Table,
    /// Quick single-product check over (q1, e^p0exp].
    #[command(name = "quick-353")]
    Quick353 {
        #[arg(long, default_value_t = 353)]
        q1: u64,
        #[arg(long, default_value = "11")]
        p0exp: String,
        #[arg(long, default_value_t = 0.86)]
        delta: f64,
    },
}

struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }
    fn resource(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_RESOURCE,
            msg: msg.into(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let mut cfg = SieveConfig::from_env();
    if let Some(cap) = cli.sieve_capacity {
        cfg.capacity = cap;
    }
    if let Some(seg) = cli.segment_size {
        cfg.segment_odds = seg.max(64);
    }
    let code = match run(&cli, &cfg) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    };
    std::process::exit(code);
}

fn run(cli: &Cli, cfg: &SieveConfig) -> Result<i32, Failure> {
    match &cli.command {
        Command::CheckCover(input) => check_cover(input, cli.format, false),
        Command::Density(input) => check_cover(input, cli.format, true),
        Command::Certify {
            q0,
            k,
            elambda,
            pigood,
            imax,
            vcap,
            delta,
            p0exp,
            probe,
        } => {
            let first_exp = parse_exp(p0exp)?;
            let base = coversys_core::BaseDescriptor::primes_above(*q0, None, *vcap)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let params = CertificateParams {
                base,
                k: *k,
                e_lambda: *elambda,
                pi_good: *pigood,
                thresholds: ThresholdLadder::ExpLadder { first_exp },
                i_max: *imax,
                delta_policy: match delta {
                    Some(d) => DeltaPolicy::Fixed(*d),
                    None => DeltaPolicy::Compute,
                },
                tail_probe: *probe,
            };
            let report = certify_with(&params, cfg)?;
            emit_report(&report, cli.format);
            Ok(if report.verdict.is_certified() {
                0
            } else {
                EXIT_FALSE
            })
        }
        Command::Table => {
            let params = CertificateParams::defaults_for(19);
            let report = certify_with(&params, cfg)?;
            match cli.format {
                Format::Text => print!("{}", certificate::render_table(&report)),
                _ => emit_report(&report, cli.format),
            }
            Ok(if report.verdict.is_certified() {
                0
            } else {
                EXIT_FALSE
            })
        }
        Command::Quick353 { q1, p0exp, delta } => {
            let exp = parse_exp(p0exp)?;
            let qc = certificate::hough_quick_check(*q1, Threshold::Exp(exp), *delta, cfg)
                .map_err(map_certify_err)?;
            match cli.format {
                Format::Text => {
                    println!(
                        "product over {} of (1 + 1/(p-1)), minus 1: <= {}; target delta = {}; {}",
                        qc.interval,
                        certificate::format_sig(qc.product_minus_one.value(), 6),
                        certificate::format_sig(qc.delta, 6),
                        if qc.passes { "PASS" } else { "FAIL" },
                    );
                }
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&qc).unwrap());
                }
                Format::Csv => {
                    println!("q1,p0,value_upper,delta,passes");
                    println!(
                        "{},{},{},{},{}",
                        qc.interval.lo,
                        qc.interval.hi,
                        qc.product_minus_one.value(),
                        qc.delta,
                        qc.passes
                    );
                }
            }
            Ok(if qc.passes { 0 } else { EXIT_FALSE })
        }
    }
}

fn parse_exp(s: &str) -> Result<ExpArg, Failure> {
    ExpArg::from_str(s).map_err(|e| Failure::usage(e.to_string()))
}

fn certify_with(
    params: &CertificateParams,
    cfg: &SieveConfig,
) -> Result<CertificateReport, Failure> {
    certificate::certify(params, cfg).map_err(map_certify_err)
}

fn map_certify_err(e: certificate::CertifyError) -> Failure {
    use certificate::CertifyError::*;
    match e {
        Sieve(ref inner) => match inner {
            coversys_core::primes::SieveError::CapacityExceeded { .. } => {
                Failure::resource(e.to_string())
            }
            coversys_core::primes::SieveError::Threshold(_) => Failure::usage(e.to_string()),
        },
        InvalidParams(_) | MissingThreshold { .. } => Failure::usage(e.to_string()),
        // base_case_invalid inside certify becomes a verdict, not an error;
        // reaching here means a direct operation call failed.
        BaseCaseInvalid { .. } => Failure::usage(e.to_string()),
    }
}

fn emit_report(report: &CertificateReport, format: Format) {
    match format {
        Format::Text => print!("{}", certificate::render_table(report)),
        Format::Json => println!("{}", serde_json::to_string_pretty(report).unwrap()),
        Format::Csv => {
            println!(
                "i,interval_lo,interval_hi,beta_upper,c1_threshold_lower,passed,growth_factor"
            );
            for s in &report.steps {
                println!(
                    "{},{},{},{},{},{},{}",
                    s.i,
                    s.interval.lo,
                    s.interval.hi,
                    s.beta_upper.value(),
                    s.c1_threshold_lower.value(),
                    s.passed,
                    s.growth_factor.value()
                );
            }
        }
    }
}

fn read_system(input: &SystemInput) -> Result<ResidueSystem, Failure> {
    let raw = if let Some(inline) = &input.inline {
        inline
            .split([',', ';'])
            .map(str::trim)
            .collect::<Vec<_>>()
            .join("\n")
    } else {
        match &input.file {
            Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?,
            Some(_) => read_stdin()?,
            None => return Err(Failure::usage("provide an input file or --inline")),
        }
    };
    let system = if raw.trim_start().starts_with('{') {
        sysformat::parse_json(&raw).map_err(|e| Failure::usage(e.to_string()))?
    } else {
        sysformat::parse_text(&raw).map_err(|e| Failure::usage(e.to_string()))?
    };
    if input.strict {
        ResidueSystem::distinct_moduli(system.classes().to_vec())
            .map_err(|e| Failure::usage(e.to_string()))
    } else {
        Ok(system)
    }
}

fn read_stdin() -> Result<String, Failure> {
    let mut buf = String::new();
    std::io::stdin()
        .read_to_string(&mut buf)
        .map_err(|e| Failure::usage(format!("stdin: {e}")))?;
    Ok(buf)
}

fn check_cover(input: &SystemInput, format: Format, density_only: bool) -> Result<i32, Failure> {
    let system = read_system(input)?;
    let limits = CoverLimits {
        max_nodes: input.max_nodes,
        ..CoverLimits::default()
    };
    let uncovered = system
        .uncovered_classes_with(Some(input.show), &limits)
        .map_err(|e| match e {
            CoverError::ResourceLimit { .. } => Failure::resource(e.to_string()),
            CoverError::ModulusTooLarge(_) => Failure::resource(e.to_string()),
        })?;
    emit_cover(&uncovered, format, density_only);
    Ok(if uncovered.covers() { 0 } else { EXIT_FALSE })
}

fn emit_cover(u: &UncoveredSet, format: Format, density_only: bool) {
    match format {
        Format::Text => {
            if density_only {
                println!(
                    "density = {}; Q = {}; count = {}",
                    u.density(),
                    u.modulus(),
                    u.count()
                );
            } else if u.covers() {
                println!("covers; Q = {}", u.modulus());
            } else {
                println!(
                    "does not cover; Q = {}; uncovered density = {} (count {})",
                    u.modulus(),
                    u.density(),
                    u.count()
                );
                if !u.sample().is_empty() {
                    let shown: Vec<String> = u.sample().iter().map(|r| r.to_string()).collect();
                    let suffix = if u.sample_complete() { "" } else { ", ..." };
                    println!("uncovered residues: {}{}", shown.join(", "), suffix);
                }
            }
        }
        Format::Json => {
            let num = |s: String| serde_json::Number::from_str(&s).unwrap();
            let doc = serde_json::json!({
                "covers": u.covers(),
                "q": num(u.modulus().to_string()),
                "count": num(u.count().to_string()),
                "density": u.density().to_string(),
                "sample": u.sample().iter().map(|r| num(r.to_string())).collect::<Vec<_>>(),
                "sample_complete": u.sample_complete(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Format::Csv => {
            println!("covers,q,count,density");
            println!(
                "{},{},{},{}",
                u.covers(),
                u.modulus(),
                u.count(),
                u.density()
            );
        }
    }
}
