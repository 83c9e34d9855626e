//! `amalgam`: norms, rearrangements, pairings, property suites and witness
//! families as JSON on stdout.
//!
//! Exit status: 0 on success or a passing check, 1 when a property suite
//! fails or a witness does not verify, 2 on usage and input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amalgam_core::amalgam::space_norm;
use amalgam_core::duality::{holder_check, raw_pairing, rearranged_pairing, wl_duality_check};
use amalgam_core::laws::{self, PropertyReport, RandomCaseConfig, Verdict, HLP_THRESHOLD};
use amalgam_core::norms::norm_eval;
use amalgam_core::stepfn::{rearrange, rearrange_step};
use amalgam_core::witnesses::{self, FamilyOptions};
use amalgam_core::{parse_rational, Exponent, NormSpec, Ppf, Rational, SpaceSpec, StepFunction};
use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "amalgam", version, about = "Exact rearrangement-invariant and amalgam norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a norm of the function in a file.
    Norm {
        #[arg(long)]
        spec: String,
        #[arg(long = "fn")]
        file: PathBuf,
    },
    /// Print the non-increasing rearrangement in the function file format.
    Rearrange {
        #[arg(long = "fn")]
        file: PathBuf,
    },
    /// Pairing `∫fg`, with a Hölder or amalgam duality check when a spec is given.
    Pair {
        #[arg(long = "fn-a")]
        file_a: PathBuf,
        #[arg(long = "fn-b")]
        file_b: PathBuf,
        #[arg(long)]
        spec: Option<String>,
    },
    /// Run a seeded property suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        /// Suite-specific spec; several specs are separated by commas.
        #[arg(long)]
        spec: Option<String>,
        /// Dilation factor for the dilation suite.
        #[arg(long, default_value = "2")]
        t: String,
        /// Ratio above which the hlp suite reports a violation.
        #[arg(long, default_value_t = HLP_THRESHOLD)]
        threshold: f64,
    },
    /// Build and verify a witness family.
    Witness {
        #[arg(long)]
        name: String,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        pa: Option<String>,
        #[arg(long)]
        pb: Option<String>,
        #[arg(long)]
        qb: Option<String>,
        #[arg(long)]
        qc: Option<String>,
        #[arg(long = "N", default_value_t = 10_000)]
        n: u64,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        /// Materialize only the first terms of the truncation.
        #[arg(long)]
        materialize: Option<u64>,
    },
}

/// JSON document plus whether the command's check succeeded.
struct Outcome {
    doc: Value,
    ok: bool,
}

impl Outcome {
    fn success(doc: Value) -> Self {
        Outcome { doc, ok: true }
    }
}

type CliResult<T> = Result<T, String>;

fn msg<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn read_function(path: &Path) -> CliResult<Ppf> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ppf::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse<T: std::str::FromStr>(s: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(msg)
}

fn required<'a>(value: &'a Option<String>, flag: &str) -> CliResult<&'a str> {
    value.as_deref().ok_or_else(|| format!("missing --{flag}"))
}

fn exponent_flag(value: &Option<String>, flag: &str) -> CliResult<Exponent> {
    parse(required(value, flag)?)
}

fn rational_flag(value: &Option<String>) -> CliResult<Option<Rational>> {
    value.as_deref().map(parse_rational).transpose().map_err(msg)
}

fn to_json<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("output serializes")
}

/// Rebuilds every object with its keys in sorted order, whatever map
/// backend serde_json was compiled with.
fn sorted(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sorted(v))).collect::<Map<_, _>>())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sorted).collect()),
        other => other,
    }
}

fn norm(spec: &str, file: &Path) -> CliResult<Outcome> {
    let spec: SpaceSpec = parse(spec)?;
    let f = read_function(file)?;
    let value = match (&spec, StepFunction::try_from(f.clone())) {
        (_, Ok(step)) => space_norm(&spec, &step),
        (SpaceSpec::Simple(n), Err(_)) => norm_eval(n, &f),
        (_, Err(_)) => {
            let profile = rearrange(&f).map_err(msg)?;
            amalgam_core::amalgam::space_norm_profile(&spec, &profile)
        }
    }
    .map_err(msg)?;
    Ok(Outcome::success(json!({ "spec": spec, "value": value })))
}

fn rearrange_file(file: &Path) -> CliResult<Outcome> {
    let f = read_function(file)?;
    let star = match StepFunction::try_from(f.clone()) {
        Ok(step) => rearrange_step(&step),
        Err(_) => rearrange(&f).map_err(msg)?,
    };
    Ok(Outcome::success(star.to_json_value()))
}

fn pair(file_a: &Path, file_b: &Path, spec: Option<&str>) -> CliResult<Outcome> {
    let (f, g) = (read_function(file_a)?, read_function(file_b)?);
    let mut doc = json!({ "pairing": raw_pairing(&f, &g) });
    let steps = StepFunction::try_from(f).ok().zip(StepFunction::try_from(g).ok());
    if let Some((f, g)) = &steps {
        doc["rearranged_pairing"] = to_json(&rearranged_pairing(f, g));
    }
    let Some(spec) = spec else {
        return Ok(Outcome::success(doc));
    };
    let (f, g) = steps.ok_or("checks against a spec need step functions")?;
    let pass = match parse::<SpaceSpec>(spec)? {
        SpaceSpec::Simple(n) => {
            let report = holder_check(&n, &f, &g).map_err(msg)?;
            doc["holder"] = to_json(&report);
            report.pass
        }
        SpaceSpec::WL {
            local: NormSpec::Lebesgue(p),
            global: NormSpec::Lebesgue(q),
        } => {
            let report = wl_duality_check(&p, &q, &f, &g).map_err(msg)?;
            doc["duality"] = to_json(&report);
            report.pass
        }
        other => return Err(format!("no pairing check for {other}")),
    };
    Ok(Outcome { doc, ok: pass })
}

fn norm_specs<const N: usize>(spec: Option<&str>, default: &str) -> CliResult<[NormSpec; N]> {
    let parts = spec
        .unwrap_or(default)
        .split(',')
        .map(|s| parse::<NormSpec>(s.trim()))
        .collect::<CliResult<Vec<_>>>()?;
    let count = parts.len();
    parts
        .try_into()
        .map_err(|_| format!("expected {N} comma-separated specs, got {count}"))
}

fn lebesgue_pair(spec: &SpaceSpec) -> CliResult<(Exponent, Exponent)> {
    match spec {
        SpaceSpec::Wiener { p, q } => Ok((p.clone(), q.clone())),
        SpaceSpec::WL {
            local: NormSpec::Lebesgue(p),
            global: NormSpec::Lebesgue(q),
        } => Ok((p.clone(), q.clone())),
        other => Err(format!("expected indices (p, q), got {other}")),
    }
}

fn verify(
    suite: &str,
    cfg: &RandomCaseConfig,
    spec: Option<&str>,
    t: &str,
    threshold: f64,
) -> CliResult<PropertyReport> {
    let space = |default: &str| parse::<SpaceSpec>(spec.unwrap_or(default));
    let report = match suite {
        "rearrangement" => laws::rearrangement_suite(cfg),
        "hardy-littlewood" => laws::hardy_littlewood_suite(cfg),
        "associate" => laws::associate_suite(cfg),
        "remark-sandwich" => {
            let [a] = norm_specs(spec, "L:1")?;
            laws::remark_sandwich_suite(&a, cfg)
        }
        "wiener-equivalence" => {
            let (p, q) = lebesgue_pair(&space("W:2:2")?)?;
            laws::wiener_equivalence_suite(&p, &q, cfg)
        }
        "duality" => {
            let (p, q) = lebesgue_pair(&space("WL:L:2:L:2")?)?;
            laws::duality_suite(&p, &q, cfg)
        }
        "embedding" => {
            let [a, b, c, d] = norm_specs(spec, "L:3,L:2,L:2,L:3")?;
            laws::embedding_suite([&a, &b, &c, &d], cfg).map_err(msg)?
        }
        "sandwich" => {
            let [a, b] = norm_specs(spec, "L:2,L:1")?;
            laws::sandwich_suite(&a, &b, cfg).map_err(msg)?
        }
        "extremal" => {
            let [a] = norm_specs(spec, "L:2")?;
            laws::extremal_suite(&a, cfg).map_err(msg)?
        }
        "dilation" => {
            let t = parse_rational(t).map_err(msg)?;
            laws::dilation_suite(&space("L:2")?, &t, cfg).map_err(msg)?
        }
        "axiom" => laws::axiom_suite(&space("L:2")?, cfg).map_err(msg)?,
        "hlp" => {
            let (local, global) = match space("WL:L:1:L:1/2")? {
                SpaceSpec::WL { local, global } => (local, global),
                other => return Err(format!("hlp suite needs a WL spec, got {other}")),
            };
            let family = laws::averaging_family(&[1, 2, 10, 100, 1000]).map_err(msg)?;
            laws::hlp_suite(&local, &global, &family, threshold).map_err(msg)?
        }
        other => return Err(format!("unknown suite {other:?}")),
    };
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn witness(
    name: &str,
    p: &Option<String>,
    q: &Option<String>,
    pa: &Option<String>,
    pb: &Option<String>,
    qb: &Option<String>,
    qc: &Option<String>,
    n: u64,
    opts: FamilyOptions,
) -> CliResult<Outcome> {
    let (doc, verified) = match name {
        "tem-local" => {
            let w = witnesses::tem_local_witness(&exponent_flag(pa, "pa")?, &exponent_flag(pb, "pb")?).map_err(msg)?;
            (to_json(&w), w.verified)
        }
        "tem-global" => {
            let w = witnesses::tem_global_witness(&exponent_flag(qb, "qb")?, &exponent_flag(qc, "qc")?).map_err(msg)?;
            (to_json(&w), w.verified)
        }
        "rwnbfs-p4" => {
            let w =
                witnesses::rwnbfs_p4_family(&exponent_flag(p, "p")?, &exponent_flag(q, "q")?, n, &opts).map_err(msg)?;
            (to_json(&w), w.verified)
        }
        "rwnbfs-p5" => {
            let w =
                witnesses::rwnbfs_p5_family(&exponent_flag(p, "p")?, &exponent_flag(q, "q")?, n, &opts).map_err(msg)?;
            (to_json(&w), w.verified)
        }
        "chlp" => {
            let p = parse_rational(required(p, "p")?).map_err(msg)?;
            let c = witnesses::chlp_family(&p, n).map_err(msg)?;
            (to_json(&c), c.verified)
        }
        other => return Err(format!("unknown witness {other:?}")),
    };
    Ok(Outcome { doc, ok: verified })
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("AMALGAM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("AMALGAM_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(msg)
}

fn run(command: Command) -> CliResult<Outcome> {
    configure_threads()?;
    match command {
        Command::Norm { spec, file } => norm(&spec, &file),
        Command::Rearrange { file } => rearrange_file(&file),
        Command::Pair { file_a, file_b, spec } => pair(&file_a, &file_b, spec.as_deref()),
        Command::Verify {
            suite,
            seed,
            cases,
            spec,
            t,
            threshold,
        } => {
            let cfg = RandomCaseConfig::new(seed, cases);
            let report = verify(&suite, &cfg, spec.as_deref(), &t, threshold)?;
            Ok(Outcome {
                ok: report.verdict != Verdict::Fail,
                doc: to_json(&report),
            })
        }
        Command::Witness {
            name,
            p,
            q,
            pa,
            pb,
            qb,
            qc,
            n,
            a,
            b,
            materialize,
        } => {
            let opts = FamilyOptions {
                a: rational_flag(&a)?,
                b: rational_flag(&b)?,
                materialize,
            };
            witness(&name, &p, &q, &pa, &pb, &qb, &qc, n, opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("usage error"));
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(outcome) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&sorted(outcome.doc)).expect("JSON output")
            );
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(diagnostic) => {
            eprintln!("error: {}", diagnostic.replace('\n', " "));
            ExitCode::from(2)
        }
    }
}
