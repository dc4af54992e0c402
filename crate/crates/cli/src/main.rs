use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use twodim_core::oracle::{Oracle, CENSUS_BOUND, ENUMERATION_BOUND};
use twodim_core::serial::{self, ElementJson};
use twodim_core::verify::{self, Engine, SuiteReport, VerifyConfig, DEFAULT_SEED, SUITES};
use twodim_core::{canonicalize, is_isomorphic, materialize, Error, FamilyLabel, Field, Msc};

#[derive(Parser)]
#[command(
    name = "twodim",
    version,
    about = "Classify two-dimensional algebras over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Canonical family, parameters and change-of-basis witness of one matrix
    Classify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Decide whether two matrices define isomorphic algebras
    Isom {
        #[command(flatten)]
        input: Input,
        /// Second matrix, same encoding as --msc
        #[arg(long)]
        msc2: String,
        #[command(flatten)]
        out: Output,
    },
    /// Brute-force orbit of a matrix under GL(2, q)
    Orbit {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        policy: Policy,
        #[command(flatten)]
        out: Output,
    },
    /// Orbit partition of all q^8 matrices, checked against the canonicalizer
    Census {
        #[arg(long)]
        field: String,
        #[command(flatten)]
        policy: Policy,
        /// Check the orbits of N random matrices instead of sweeping everything
        #[arg(long, value_name = "N")]
        sample: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Run the self-check suites; exit status 1 if any check fails
    Verify {
        /// One of traces, action, idempotence, invariance, census (default: all)
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random cases per field in the randomized suites
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        policy: Policy,
        #[command(flatten)]
        out: Output,
    },
    /// The matrix of a named family member
    Materialize {
        #[arg(long)]
        field: String,
        /// A1 .. A12 (class follows from the characteristic) or "trivial"
        #[arg(long)]
        family: String,
        /// Comma-separated integers, or a JSON array for extension fields
        #[arg(long, default_value = "")]
        params: String,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Input {
    /// Field as p^k; optional when --msc carries its own
    #[arg(long)]
    field: Option<String>,
    /// [[a1,a2,a3,a4],[b1,b2,b3,b4]] or {"field":"p^k","entries":[...]}
    #[arg(long)]
    msc: String,
}

#[derive(Args)]
struct Policy {
    /// Raise or lower the enumeration bound (also the full-census bound)
    #[arg(long, value_name = "N")]
    max_q: Option<u64>,
}

impl Policy {
    fn oracle(&self) -> Oracle {
        match self.max_q {
            Some(n) => Oracle {
                max_q: n,
                max_census_q: n,
            },
            None => Oracle {
                max_q: ENUMERATION_BOUND,
                max_census_q: CENSUS_BOUND,
            },
        }
    }
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    /// census only
    Csv,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(m) => Failure::Check(m),
            e @ Error::EnumerationBound { .. } => {
                Failure::Usage(format!("{e} (raise it with --max-q, or census --sample N)"))
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn parse_field(s: &str) -> Result<Field, Failure> {
    Ok(Field::parse(s)?)
}

fn read_input(input: &Input) -> Result<Msc, Failure> {
    let field = input.field.as_deref().map(parse_field).transpose()?;
    Ok(serial::parse_msc(&input.msc, field.as_ref())?)
}

fn no_csv(out: &Output) -> Result<(), Failure> {
    if out.format == Format::Csv {
        return Err(Failure::Usage(
            "--format csv is only available for census".into(),
        ));
    }
    Ok(())
}

fn print_json(w: &mut impl Write, v: &impl serde::Serialize) -> io::Result<()> {
    writeln!(w, "{}", serde_json::to_string(v).expect("serializable"))
}

fn gl2_table(g: &twodim_core::Gl2) -> String {
    let f = g.field();
    let m = g.matrix();
    let e = |x| f.format_element(x);
    format!(
        "[{} {}; {} {}]",
        e(m[0][0]),
        e(m[0][1]),
        e(m[1][0]),
        e(m[1][1])
    )
}

fn parse_params(f: &Field, text: &str) -> Result<Vec<twodim_core::FieldElement>, Failure> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let items: Vec<ElementJson> = if text.starts_with('[') {
        serde_json::from_str(text)
            .map_err(|e| Failure::Usage(format!("cannot parse --params: {e}")))?
    } else {
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<i64>()
                    .map(ElementJson::Int)
                    .map_err(|_| Failure::Usage(format!("--params entry {s:?} is not an integer")))
            })
            .collect::<Result<_, _>>()?
    };
    items
        .iter()
        .map(|x| serial::element_from_json(f, x).map_err(Failure::from))
        .collect()
}

fn parse_family(
    f: &Field,
    name: &str,
    params: Vec<twodim_core::FieldElement>,
) -> Result<FamilyLabel, Failure> {
    if name.eq_ignore_ascii_case("trivial") {
        if !params.is_empty() {
            return Err(Failure::Usage(
                "the trivial algebra takes no parameters".into(),
            ));
        }
        return Ok(FamilyLabel::trivial(f));
    }
    let n: u8 = name
        .strip_prefix(['A', 'a'])
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| Failure::Usage(format!("unknown family {name:?}; expected A1..A12")))?;
    Ok(FamilyLabel::new(f, n, params)?)
}

fn classify(w: &mut impl Write, input: &Input, out: &Output) -> Outcome {
    no_csv(out)?;
    let a = read_input(input)?;
    let r = canonicalize(&a)?;
    match out.format {
        Format::Table => {
            writeln!(w, "label      {}", r.label).ok();
            writeln!(w, "field      {}", r.field).ok();
            writeln!(w, "witness    {}", gl2_table(&r.witness)).ok();
            writeln!(w, "canonical  {}", serial::msc_inline(&r.canonical)).ok();
        }
        _ => {
            print_json(w, &serial::class_result_to_json(&r)).ok();
        }
    }
    Ok(true)
}

fn isom(w: &mut impl Write, input: &Input, second: &str, out: &Output) -> Outcome {
    no_csv(out)?;
    let a = read_input(input)?;
    let b = serial::parse_msc(second, Some(a.field()))?;
    let found = is_isomorphic(&a, &b)?;
    let la = canonicalize(&a)?.label;
    let lb = canonicalize(&b)?.label;
    match out.format {
        Format::Table => {
            let verdict = if found.is_some() {
                "isomorphic"
            } else {
                "not isomorphic"
            };
            writeln!(w, "verdict    {verdict}").ok();
            writeln!(w, "labels     {la} / {lb}").ok();
            if let Some(g) = &found {
                writeln!(w, "field      {}", g.field()).ok();
                writeln!(w, "witness    {}", gl2_table(g)).ok();
            }
        }
        _ => {
            let v = json!({
                "verdict": if found.is_some() { "isomorphic" } else { "not isomorphic" },
                "isomorphic": found.is_some(),
                "field": found.as_ref().map(|g| g.field().to_string()),
                "witness": found.as_ref().map(serial::gl2_to_json),
                "labels": [serial::label_to_json(&la), serial::label_to_json(&lb)],
            });
            print_json(w, &v).ok();
        }
    }
    Ok(true)
}

fn orbit(w: &mut impl Write, input: &Input, policy: &Policy, out: &Output) -> Outcome {
    no_csv(out)?;
    let a = read_input(input)?;
    let r = policy.oracle().orbit(&a)?;
    match out.format {
        Format::Table => {
            writeln!(
                w,
                "representative  {}",
                serial::msc_inline(&r.representative)
            )
            .ok();
            writeln!(w, "size            {}", r.size).ok();
            writeln!(w, "subset          {}", r.subset.index).ok();
            writeln!(w, "label           {}", r.label).ok();
        }
        _ => {
            print_json(w, &serial::orbit_to_json(&r)).ok();
        }
    }
    Ok(true)
}

fn census(
    w: &mut impl Write,
    field: &str,
    policy: &Policy,
    sample: Option<usize>,
    seed: u64,
    out: &Output,
) -> Outcome {
    let f = parse_field(field)?;
    let oracle = policy.oracle();
    let t = match sample {
        Some(n) => oracle.sampled_census(&f, n, seed)?,
        None => oracle.census(&f)?,
    };
    match out.format {
        Format::Csv => {
            write!(w, "{}", serial::census_to_csv(&t)?).ok();
        }
        Format::Table => {
            writeln!(
                w,
                "{:<28} {:>6} {:>6}  label",
                "representative", "size", "subset"
            )
            .ok();
            for r in &t.rows {
                let rep = serial::msc_inline(&r.representative);
                writeln!(
                    w,
                    "{rep:<28} {:>6} {:>6}  {}",
                    r.size, r.subset.index, r.label
                )
                .ok();
            }
            writeln!(
                w,
                "total {} in {} orbits; {} label-sharing pairs; {} failures",
                t.total,
                t.rows.len(),
                t.shared_labels.len(),
                t.failures.len()
            )
            .ok();
        }
        Format::Json => {
            print_json(w, &serial::census_to_json(&t)).ok();
        }
    }
    if !t.is_clean() {
        for x in &t.failures {
            eprintln!(
                "census failure at {}: {}",
                serial::msc_inline(&x.matrix),
                x.reason
            );
        }
    }
    Ok(t.is_clean())
}

fn run_verify(
    w: &mut impl Write,
    suite: Option<&str>,
    cfg: &VerifyConfig,
    out: &Output,
) -> Outcome {
    no_csv(out)?;
    let engine = Engine::default();
    let reports: Vec<SuiteReport> = match suite {
        Some(name) => vec![verify::run_suite(name, &engine, cfg).ok_or_else(|| {
            Failure::Usage(format!(
                "unknown suite {name:?}; expected one of {}",
                SUITES.join(", ")
            ))
        })?],
        None => verify::run_all(&engine, cfg),
    };
    let ok = reports.iter().all(SuiteReport::ok);
    match out.format {
        Format::Table => {
            for r in &reports {
                let mark = if r.ok() { "pass" } else { "FAIL" };
                writeln!(
                    w,
                    "{:<12} {mark}  {} passed, {} failed",
                    r.name, r.passed, r.failed
                )
                .ok();
                for e in &r.examples {
                    writeln!(w, "    {e}").ok();
                }
            }
        }
        _ => {
            let v: Vec<_> = reports
                .iter()
                .map(|r| json!({"suite": r.name, "passed": r.passed, "failed": r.failed, "examples": r.examples}))
                .collect();
            print_json(w, &json!({"ok": ok, "seed": cfg.seed, "suites": v})).ok();
        }
    }
    Ok(ok)
}

fn run_materialize(
    w: &mut impl Write,
    field: &str,
    family: &str,
    params: &str,
    out: &Output,
) -> Outcome {
    no_csv(out)?;
    let f = parse_field(field)?;
    let label = parse_family(&f, family, parse_params(&f, params)?)?;
    let a = materialize(&label)?;
    match out.format {
        Format::Table => {
            writeln!(w, "{label}").ok();
            writeln!(w, "{}", a.display()).ok();
        }
        _ => {
            print_json(w, &serial::msc_to_json(&a)).ok();
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut w = stdout.lock();
    let outcome = match &cli.verb {
        Verb::Classify { input, out } => classify(&mut w, input, out),
        Verb::Isom { input, msc2, out } => isom(&mut w, input, msc2, out),
        Verb::Orbit { input, policy, out } => orbit(&mut w, input, policy, out),
        Verb::Census {
            field,
            policy,
            sample,
            seed,
            out,
        } => census(&mut w, field, policy, *sample, *seed, out),
        Verb::Verify {
            suite,
            seed,
            samples,
            policy,
            out,
        } => {
            let cfg = VerifyConfig {
                seed: *seed,
                samples: *samples,
                oracle: policy.oracle(),
            };
            run_verify(&mut w, suite.as_deref(), &cfg, out)
        }
        Verb::Materialize {
            field,
            family,
            params,
            out,
        } => run_materialize(&mut w, field, family, params, out),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(m)) => {
            eprintln!("twodim: check failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("twodim: {m}");
            ExitCode::from(2)
        }
    }
}
