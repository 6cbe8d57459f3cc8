//! Verification harness for the Poisson bracket hierarchies on rational
//! functions.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage error,
//! 3 numerical failure (non-convergent quadrature, evaluation at a pole).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use poisson_rat::{Error, RationalMap};
use poisson_rat_cli::config::{
    load_file_config, parse_complex_pair, parse_seed_list, Hierarchy, RunConfig,
};
use poisson_rat_cli::report::Report;
use poisson_rat_cli::suites;

#[derive(Parser)]
#[command(name = "poisson-rat", version, about = "Numerical verification of Poisson bracket hierarchies on rational functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite of a bracket hierarchy over seeded instances
    Verify(VerifyArgs),
    /// Evaluate a single bracket on a rational map loaded from JSON
    Bracket(BracketArgs),
    /// Darboux chart constancy, rank, Casimirs and the averaged pair
    Darboux(DarbouxArgs),
    /// Verify the exact polynomial identities behind the direct Jacobi proof
    Identities(IdentitiesArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Bracket family: contour, ansatz or deriv
    #[arg(long, value_enum)]
    hierarchy: Option<Hierarchy>,
    /// Monomial weight degree (contour/ansatz)
    #[arg(long)]
    f_degree: Option<usize>,
    /// Hierarchy index n (deriv)
    #[arg(long)]
    n: Option<u32>,
    /// Configuration-space degree N
    #[arg(long = "N")]
    degree: Option<usize>,
    /// Comma-separated seed list, e.g. 1,2,3
    #[arg(long)]
    seeds: Option<String>,
    /// Tolerance override for the suite's checks
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report to this path (atomically)
    #[arg(long)]
    json: Option<PathBuf>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BracketArgs {
    /// ah | z | contour | ansatz | deriv
    #[arg(long, value_parser = ["ah", "z", "contour", "ansatz", "deriv"])]
    method: String,
    /// Monomial weight degree (contour/ansatz)
    #[arg(long)]
    f_degree: Option<usize>,
    /// Hierarchy index n (deriv)
    #[arg(long)]
    n: Option<u32>,
    /// Rational map JSON file: {"poles": [[re,im],..], "residues": [[re,im],..]}
    #[arg(long)]
    map: PathBuf,
    /// First evaluation point as re,im
    #[arg(long)]
    p: String,
    /// Second evaluation point as re,im
    #[arg(long)]
    q: String,
}

#[derive(Args)]
struct DarbouxArgs {
    /// Hierarchy index n
    #[arg(long)]
    n: u32,
    /// Configuration-space degree N
    #[arg(long = "N")]
    degree: usize,
    /// Random domain points for the constancy measurement
    #[arg(long, default_value_t = 12)]
    samples: usize,
    /// Seed of the domain sampling
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the JSON report to this path (atomically)
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct IdentitiesArgs {
    /// Negative-control mode: inject a deliberate defect and expect failure
    #[arg(long)]
    perturb: bool,
    /// Write the JSON report to this path (atomically)
    #[arg(long)]
    json: Option<PathBuf>,
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn numerical_error(err: &Error) -> ExitCode {
    eprintln!("numerical failure: {err}");
    ExitCode::from(3)
}

fn write_json(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    if let Some(path) = path {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        std::fs::write(&tmp, text)?;
        std::fs::rename(&tmp, path)?;
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let start = Instant::now();
    let file = match &args.config {
        Some(path) => match load_file_config(path) {
            Ok(cfg) => cfg,
            Err(e) => return usage_error(&e),
        },
        None => Default::default(),
    };
    let seeds = match args.seeds.as_deref().map(parse_seed_list) {
        Some(Ok(seeds)) => Some(seeds),
        Some(Err(e)) => return usage_error(&e),
        None => None,
    };
    let hierarchy = match args.hierarchy.or(file.hierarchy) {
        Some(h) => h,
        None => return usage_error("--hierarchy is required"),
    };
    let cfg = RunConfig {
        hierarchy,
        f_degree: args.f_degree.or(file.f_degree),
        f_coeffs: file.f_coeffs.clone(),
        n: args.n.or(file.n),
        degree: match args.degree.or(file.degree) {
            Some(n) => n,
            None => return usage_error("--N is required"),
        },
        seeds: match seeds.or(file.seeds) {
            Some(s) => s,
            None => return usage_error("--seeds is required"),
        },
        tol: args.tol.or(file.tol),
    };
    if let Err(e) = cfg.validate() {
        return usage_error(&e);
    }

    let checks = match suites::run_verify(&cfg) {
        Ok(checks) => checks,
        Err(e) => return usage_error(&e),
    };
    let config_echo = serde_json::to_value(&cfg).expect("config serializes");
    let report = Report::new("verify", config_echo, checks, start.elapsed().as_secs_f64());
    let text = report.to_json();
    println!("{text}");
    let json_path = args.json.or(file.json.map(PathBuf::from));
    if let Err(e) = write_json(json_path.as_ref(), &text) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code())
}

fn cmd_bracket(args: BracketArgs) -> ExitCode {
    match args.method.as_str() {
        "contour" | "ansatz" => {
            if args.n.is_some() {
                return usage_error("--n applies only to the deriv method");
            }
        }
        "deriv" => {
            if args.f_degree.is_some() {
                return usage_error("--f-degree applies only to contour/ansatz methods");
            }
        }
        _ => {
            if args.n.is_some() || args.f_degree.is_some() {
                return usage_error("ah/z methods take neither --f-degree nor --n");
            }
        }
    }
    let p = match parse_complex_pair(&args.p) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let q = match parse_complex_pair(&args.q) {
        Ok(q) => q,
        Err(e) => return usage_error(&e),
    };
    let text = match std::fs::read_to_string(&args.map) {
        Ok(text) => text,
        Err(e) => return usage_error(&format!("cannot read map {}: {e}", args.map.display())),
    };
    let map: RationalMap = match serde_json::from_str(&text) {
        Ok(map) => map,
        Err(e) => return usage_error(&format!("bad map {}: {e}", args.map.display())),
    };
    match suites::run_bracket(&args.method, args.f_degree, args.n, &map, p, q) {
        Ok(value) => {
            println!(
                "{}",
                serde_json::to_string(&value).expect("bracket value serializes")
            );
            ExitCode::SUCCESS
        }
        Err(err) => numerical_error(&err),
    }
}

fn cmd_darboux(args: DarbouxArgs) -> ExitCode {
    if args.degree == 0 {
        return usage_error("--N must be at least 1");
    }
    if args.samples < 2 {
        return usage_error("--samples must be at least 2");
    }
    match suites::run_darboux(args.n, args.degree, args.samples, args.seed) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{text}");
            if let Err(e) = write_json(args.json.as_ref(), &text) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(2);
            }
            match report.status {
                poisson_rat_cli::report::CheckStatus::Pass => ExitCode::SUCCESS,
                poisson_rat_cli::report::CheckStatus::Fail => ExitCode::from(1),
                poisson_rat_cli::report::CheckStatus::Error => ExitCode::from(3),
            }
        }
        Err(err) => numerical_error(&err),
    }
}

fn cmd_identities(args: IdentitiesArgs) -> ExitCode {
    let report = suites::run_identities(args.perturb);
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{text}");
    if let Err(e) = write_json(args.json.as_ref(), &text) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if report.all_hold {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(args) => cmd_verify(args),
        Command::Bracket(args) => cmd_bracket(args),
        Command::Darboux(args) => cmd_darboux(args),
        Command::Identities(args) => cmd_identities(args),
    }
}
