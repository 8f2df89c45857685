//! `ncbinom`: expansions, verification suites and tables from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

mod suites;

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ncbinom::binomial::{expand, gamma, ExpIdentity, Expander, Method, HSQ_PARAM};
use ncbinom::diffop::{hermite_he, HermiteVia};
use ncbinom::scalars::int;
use ncbinom::{Family, RelationSystem};

use suites::Suite;

const FAILURE: u8 = 1;
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "ncbinom", version, about = "Non-commutative binomial expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Expand (A+B)^n with one engine and compare against brute force.
    Expand {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = parse_method)]
        method: Method,
        /// `free`, a family name (commutative, hsq, weyl) or a path to a JSON relation system.
        /// Defaults to the family a closed form needs, otherwise `free`.
        #[arg(long)]
        relation: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run property suites and print one PASS/FAIL line per property.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 8)]
        max_n: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print He_0 .. He_n, checking three independent constructions.
    Hermite {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print gamma_0 .. gamma_n with their values at h = 0 and h = 1.
    Gamma {
        #[arg(long)]
        n: u32,
    },
    /// Check both exponential identities through a total degree.
    ExpCheck {
        #[arg(long)]
        order: u32,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Expand { n, method, relation, format } => cmd_expand(n, method, relation, format),
        Command::Verify { suite, max_n, seed } => cmd_verify(suite, max_n, seed),
        Command::Hermite { n, format } => cmd_hermite(n, format),
        Command::Gamma { n } => cmd_gamma(n),
        Command::ExpCheck { order } => cmd_exp_check(order),
    };
    ExitCode::from(code)
}

fn load_relation(spec: &str) -> Result<Option<RelationSystem>, String> {
    if spec == "free" {
        return Ok(None);
    }
    if let Ok(family) = spec.parse::<Family>() {
        return Ok(Some(RelationSystem::family(family)));
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| format!("`{spec}` is neither a family name nor a readable file: {e}"))?;
    RelationSystem::from_json(&text).map(Some).map_err(|e| format!("{spec}: {e}"))
}

fn cmd_expand(n: u32, method: Method, relation: Option<String>, format: Format) -> u8 {
    let relation = match relation {
        Some(spec) => load_relation(&spec),
        None => Ok(method.required_family().map(RelationSystem::family)),
    };
    let relation = match relation {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return USAGE;
        }
    };
    if let Some(sys) = &relation {
        let report = sys.validate();
        if !report.is_ok() {
            for v in &report.violations {
                eprintln!("error: {v}");
            }
            return USAGE;
        }
    }
    let report = match expand(method, n, relation.as_ref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return USAGE;
        }
    };
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text if method == Method::ClosedWeyl => {
            let sys = RelationSystem::family(Family::Weyl);
            let text = Expander::for_system(&sys).and_then(|ex| ex.weyl_m_basis_text(n));
            match text {
                Ok(t) => println!("M-basis: {t} | oracle_match: {}", report.oracle_match),
                Err(e) => {
                    eprintln!("error: {e}");
                    return FAILURE;
                }
            }
        }
        Format::Text => println!("{} | oracle_match: {}", report.result, report.oracle_match),
    }
    if report.oracle_match {
        0
    } else {
        eprintln!("expansion differs from the brute-force power");
        FAILURE
    }
}

fn cmd_verify(suite: Suite, max_n: u32, seed: u64) -> u8 {
    let checks = suites::run(suite, max_n, seed);
    let mut first_failure = None;
    for check in &checks {
        let status = if check.counterexample.is_none() { "PASS" } else { "FAIL" };
        println!("{status}  {}", check.name);
        if first_failure.is_none() {
            first_failure = check.counterexample.as_ref();
        }
    }
    let failed = checks.iter().filter(|c| c.counterexample.is_some()).count();
    println!("{} passed, {failed} failed", checks.len() - failed);
    match first_failure {
        None => 0,
        Some(json) => {
            println!("counterexample: {json}");
            FAILURE
        }
    }
}

fn cmd_hermite(n: u32, format: Format) -> u8 {
    for k in 0..=n {
        let he = hermite_he(k, HermiteVia::Operator);
        for via in [HermiteVia::ExplicitSum, HermiteVia::RecurrenceOracle] {
            if hermite_he(k, via) != he {
                eprintln!("He_{k}: {via:?} disagrees with the operator construction");
                return FAILURE;
            }
        }
        match format {
            Format::Text => println!("He_{k}: {he}"),
            Format::Json => println!("{}", he.to_json()),
        }
    }
    0
}

fn cmd_gamma(n: u32) -> u8 {
    for k in 0..=n {
        let g = gamma(k).value;
        let at = |v: i64| g.substitute(HSQ_PARAM, &int(v));
        let (zero, one) = (at(0), at(1));
        println!("gamma_{k}: {g} | h=0: {zero} | h=1: {one}");
    }
    0
}

fn cmd_exp_check(order: u32) -> u8 {
    let ex = Expander::default();
    let mut code = 0;
    for (label, which) in [("corollary2", ExpIdentity::Corollary2), ("corollary3", ExpIdentity::Corollary3)] {
        let defect = ex.exp_identity_defect(which, order);
        if defect.is_zero() {
            println!("PASS  {label}: defect vanishes through degree {order}");
        } else {
            println!("FAIL  {label}: defect through degree {order}: {}", defect.to_json());
            code = FAILURE;
        }
    }
    code
}
