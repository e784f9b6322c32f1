//! `ordcone` command dispatch.
//!
//! Exit codes: 0 success or pass, 1 verification failure or false
//! membership, 2 malformed input or usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ordcone::integer::{integerize_chain, verify_integer_chain, IntegerizeError, DEFAULT_PRIMES};
use ordcone::io::{
    chain_report_json, emit_chain, emit_structure, emit_vector, integer_report_json, parse_chain, parse_structure,
    parse_vector_literal, to_canonical_string, validation_report_json, ChainFile,
};
use ordcone::realization::{build_chain, interpolate, verify_chain, RealizeError};
use ordcone::structure::{validate_structure, ConeStructure, StructureError};
use ordcone::testkit::{random_structure, run_lemma_suite, GenerationError, GeneratorConfig};
use ordcone::{Rational, RationalChain, RationalVector, Scalar};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ordcone", version, about = "Exact simplicial realizations of ordered vector spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a structure file against the lattice, partition, RV1 and RV2 clauses.
    Validate(StructureArgs),
    /// Print Z_i, P_i, the α blocks and the β order.
    Derive(StructureArgs),
    /// Decide membership of a vector in the positive cone.
    Member(MemberArgs),
    /// Build a chain of simplicial stages.
    Realize(RealizeArgs),
    /// Extend a chain until it contains the given vectors.
    Absorb(ChainVectorArgs),
    /// Verify a chain file (and its integer section, if any).
    Verify(VerifyArgs),
    /// Find b with a1, a2 <= b <= c1, c2 (vectors given in that order).
    Interpolate(ChainVectorArgs),
    /// Scale connecting maps to nonnegative integer matrices.
    Integerize(IntegerizeArgs),
    /// Run the randomized lemma checks on a structure.
    Lemmas(LemmasArgs),
    /// Emit a random valid structure.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
struct StructureArgs {
    #[arg(long)]
    structure: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct MemberArgs {
    #[arg(long)]
    structure: PathBuf,
    #[arg(long, required = true)]
    vector: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct RealizeArgs {
    #[arg(long)]
    structure: PathBuf,
    #[arg(long, default_value_t = 5)]
    stages: usize,
    #[arg(long, default_value = "1")]
    r1: String,
    #[arg(long, default_value = "1")]
    eps1: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ChainVectorArgs {
    #[arg(long)]
    chain: PathBuf,
    #[arg(long, required = true)]
    vector: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    chain: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct IntegerizeArgs {
    #[arg(long)]
    chain: PathBuf,
    #[arg(long)]
    primes: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct LemmasArgs {
    #[arg(long)]
    structure: PathBuf,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    lattice_seeds: usize,
    #[arg(long, default_value_t = 100)]
    max_retries: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed command: exit code and diagnostic for stderr.
struct Failure {
    code: i32,
    message: String,
}

fn malformed(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_MALFORMED, message: message.into() }
}

fn failed(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_FAIL, message: message.into() }
}

type Outcome = Result<i32, Failure>;

/// Runs one command; `argv[0]` is the program name.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ =
                if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate(a) => cmd_validate(a, out),
        Command::Derive(a) => cmd_derive(a, out),
        Command::Member(a) => cmd_member(a, out),
        Command::Realize(a) => cmd_realize(a, out),
        Command::Absorb(a) => cmd_absorb(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Interpolate(a) => cmd_interpolate(a, out),
        Command::Integerize(a) => cmd_integerize(a, out),
        Command::Lemmas(a) => cmd_lemmas(a, out),
        Command::Generate(a) => cmd_generate(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path, flag: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| malformed(format!("--{flag} {}: {e}", path.display())))
}

fn emit(text: &str, dest: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match dest {
        Some(p) => fs::write(p, text).map_err(|e| malformed(format!("--out {}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| malformed(format!("stdout: {e}"))),
    }
}

fn say(out: &mut dyn Write, text: impl AsRef<str>) -> Result<(), Failure> {
    writeln!(out, "{}", text.as_ref()).map_err(|e| malformed(format!("stdout: {e}")))
}

fn say_json(out: &mut dyn Write, v: &Value) -> Result<(), Failure> {
    out.write_all(to_canonical_string(v).as_bytes()).map_err(|e| malformed(format!("stdout: {e}")))
}

fn load_structure(path: &Path) -> Result<ConeStructure, Failure> {
    let text = read(path, "structure")?;
    let candidate = parse_structure(&text).map_err(|e| malformed(format!("--structure {}: {e}", path.display())))?;
    ConeStructure::new(&candidate).map_err(|e| structure_failure(path, e))
}

fn structure_failure(path: &Path, e: StructureError) -> Failure {
    malformed(format!("{}: structure rejected: {e}", path.display()))
}

fn load_chain(path: &Path) -> Result<(ChainFile<Rational>, RationalChain), Failure> {
    let text = read(path, "chain")?;
    let file: ChainFile<Rational> =
        parse_chain(&text).map_err(|e| malformed(format!("--chain {}: {e}", path.display())))?;
    let chain = file.to_chain().map_err(|e| structure_failure(path, e))?;
    Ok((file, chain))
}

/// Loads a chain and insists that it verifies.
fn load_verified_chain(path: &Path) -> Result<RationalChain, Failure> {
    let (_, chain) = load_chain(path)?;
    let report = verify_chain(chain.structure(), &chain);
    if !report.passed() {
        return Err(failed(format!("{} does not verify:\n{report}", path.display())));
    }
    Ok(chain)
}

fn parse_vectors(raw: &[String], n: usize) -> Result<Vec<RationalVector>, Failure> {
    raw.iter()
        .map(|text| {
            let v: RationalVector =
                parse_vector_literal(text).map_err(|e| malformed(format!("--vector \"{text}\": {e}")))?;
            if v.len() != n {
                return Err(malformed(format!("--vector \"{text}\": {} entries, dimension is {n}", v.len())));
            }
            Ok(v)
        })
        .collect()
}

fn parse_positive(text: &str, flag: &str) -> Result<Rational, Failure> {
    match Rational::parse_str(text) {
        Some(q) if q > Rational::from(0) => Ok(q),
        _ => Err(malformed(format!("--{flag} \"{text}\": expected a positive rational"))),
    }
}

fn one_based(s: ordcone::IndexSet) -> Value {
    json!(s.to_one_based())
}

fn cmd_validate(a: StructureArgs, out: &mut dyn Write) -> Outcome {
    let text = read(&a.structure, "structure")?;
    let candidate =
        parse_structure(&text).map_err(|e| malformed(format!("--structure {}: {e}", a.structure.display())))?;
    let report = validate_structure(&candidate).map_err(|e| structure_failure(&a.structure, e))?;
    if a.json {
        say_json(out, &validation_report_json(&report))?;
    } else if report.is_valid() {
        say(out, "valid")?;
    } else {
        write!(out, "invalid\n{report}").map_err(|e| malformed(format!("stdout: {e}")))?;
    }
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_derive(a: StructureArgs, out: &mut dyn Write) -> Outcome {
    let s = load_structure(&a.structure)?;
    let d = s.derive();
    let n = s.n();
    if a.json {
        let v = json!({
            "Z": (0..n).map(|i| one_based(d.z(i))).collect::<Vec<_>>(),
            "P": (0..n).map(|i| one_based(d.p(i))).collect::<Vec<_>>(),
            "blocks": d.blocks().iter().map(|&(z, b)| json!({ "Z": one_based(z), "indices": one_based(b) })).collect::<Vec<_>>(),
            "beta_order": d.beta_order().iter().map(|i| i + 1).collect::<Vec<_>>(),
        });
        say_json(out, &v)?;
    } else {
        for i in 0..n {
            say(out, format!("i = {}: Z = {}, P = {}", i + 1, d.z(i), d.p(i)))?;
        }
        for &(z, b) in d.blocks() {
            say(out, format!("block Z = {z}: {b}"))?;
        }
        let order: Vec<String> = d.beta_order().iter().map(|i| (i + 1).to_string()).collect();
        say(out, format!("beta order: {}", order.join(", ")))?;
    }
    Ok(EXIT_OK)
}

fn cmd_member(a: MemberArgs, out: &mut dyn Write) -> Outcome {
    let s = load_structure(&a.structure)?;
    let vectors = parse_vectors(&a.vector, s.n())?;
    let mut all = true;
    let mut rows = Vec::new();
    for (raw, v) in a.vector.iter().zip(&vectors) {
        let witness = s.member_v(v);
        all &= witness.is_some();
        if a.json {
            rows.push(json!({
                "vector": emit_vector(v),
                "member": witness.is_some(),
                "witness": witness.map(one_based),
                "support_closure": one_based(s.support_closure(v)),
                "in_u": s.member_u(v),
            }));
        } else if vectors.len() == 1 {
            say(out, if witness.is_some() { "true" } else { "false" })?;
        } else {
            say(out, format!("{raw}: {}", witness.is_some()))?;
        }
    }
    if a.json {
        say_json(out, &Value::Array(rows))?;
    }
    Ok(if all { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_realize(a: RealizeArgs, out: &mut dyn Write) -> Outcome {
    let s = load_structure(&a.structure)?;
    if a.stages == 0 {
        return Err(malformed("--stages must be at least 1"));
    }
    let r1 = parse_positive(&a.r1, "r1")?;
    let eps1 = parse_positive(&a.eps1, "eps1")?;
    let chain = build_chain(&s, a.stages, &r1, &eps1).map_err(|e| malformed(e.to_string()))?;
    let text = emit_chain(&ChainFile::from_chain(&chain, None));
    match &a.out {
        Some(p) => {
            emit(&text, Some(p), out)?;
            if a.json {
                say_json(out, &json!({ "stages": chain.len(), "max_entry_bits": chain.max_entry_bits() }))?;
            } else {
                say(out, format!("wrote {} stages to {}", chain.len(), p.display()))?;
            }
        }
        None => emit(&text, None, out)?,
    }
    Ok(EXIT_OK)
}

fn realize_failure(e: RealizeError) -> Failure {
    match e {
        RealizeError::NotInCone(_) | RealizeError::OrderViolation(_) => failed(e.to_string()),
        _ => malformed(e.to_string()),
    }
}

fn write_chain(chain: &RationalChain, dest: &Option<PathBuf>) -> Result<(), Failure> {
    match dest {
        Some(p) => emit(&emit_chain(&ChainFile::from_chain(chain, None)), Some(p), &mut std::io::sink()),
        None => Ok(()),
    }
}

fn cmd_absorb(a: ChainVectorArgs, out: &mut dyn Write) -> Outcome {
    let mut chain = load_verified_chain(&a.chain)?;
    let vectors = parse_vectors(&a.vector, chain.structure().n())?;
    let mut placed = Vec::new();
    for v in &vectors {
        placed.push(chain.absorb_in_place(v).map_err(realize_failure)?);
    }
    write_chain(&chain, &a.out)?;
    if a.json {
        let rows: Vec<Value> =
            vectors.iter().zip(&placed).map(|(v, st)| json!({ "vector": emit_vector(v), "stage": st })).collect();
        say_json(out, &json!({ "placements": rows, "stages": chain.len() }))?;
    } else {
        for (raw, st) in a.vector.iter().zip(&placed) {
            say(out, format!("{raw}: stage {st}"))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Outcome {
    let (file, chain) = load_chain(&a.chain)?;
    let report = verify_chain(chain.structure(), &chain);
    let integer = file.integer.as_ref().map(|section| verify_integer_chain(&section.to_chain(), &chain));
    let passed = report.passed() && integer.as_ref().is_none_or(|r| r.passed());
    if a.json {
        let mut v = chain_report_json(&report);
        v["passed"] = json!(passed);
        if let Some(r) = &integer {
            v["integer"] = integer_report_json(r);
        }
        say_json(out, &v)?;
    } else {
        say(out, if passed { "pass" } else { "fail" })?;
        for f in &report.failures {
            say(out, format!("stage {}: {} ({})", f.stage, f.clause.name(), f.detail))?;
        }
        if let Some(r) = integer.as_ref().filter(|r| !r.passed()) {
            write!(out, "integer section:\n{r}").map_err(|e| malformed(format!("stdout: {e}")))?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_interpolate(a: ChainVectorArgs, out: &mut dyn Write) -> Outcome {
    if a.vector.len() != 4 {
        return Err(malformed(format!(
            "--vector must be given exactly 4 times (a1, a2, c1, c2), got {}",
            a.vector.len()
        )));
    }
    let chain = load_verified_chain(&a.chain)?;
    let v = parse_vectors(&a.vector, chain.structure().n())?;
    let (b, extended) = interpolate(&chain, [&v[0], &v[1]], [&v[2], &v[3]]).map_err(realize_failure)?;
    write_chain(&extended, &a.out)?;
    if a.json {
        say_json(out, &json!({ "b": emit_vector(&b), "stages": extended.len() }))?;
    } else {
        let entries: Vec<String> = b.iter().map(|x| x.to_string()).collect();
        say(out, entries.join(","))?;
    }
    Ok(EXIT_OK)
}

fn parse_primes(raw: &Option<String>) -> Result<Vec<u64>, Failure> {
    match raw {
        None => Ok(DEFAULT_PRIMES.to_vec()),
        Some(text) => text
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| malformed(format!("--primes \"{text}\": \"{p}\" is not an integer")))
            })
            .collect(),
    }
}

fn cmd_integerize(a: IntegerizeArgs, out: &mut dyn Write) -> Outcome {
    let primes = parse_primes(&a.primes)?;
    let (_, chain) = load_chain(&a.chain)?;
    let ic = match integerize_chain(&chain, &primes) {
        Ok(ic) => ic,
        Err(IntegerizeError::InvalidPrimes(p)) => {
            return Err(malformed(format!("--primes: {p:?} is not a list of primes")))
        }
        Err(e @ IntegerizeError::InvalidChain(_)) => return Err(failed(e.to_string())),
    };
    let report = verify_integer_chain(&ic, &chain);
    let text = emit_chain(&ChainFile::from_chain(&chain, Some(ic.clone())));
    match &a.out {
        Some(p) => emit(&text, Some(p), out)?,
        None if !a.json => emit(&text, None, out)?,
        None => {}
    }
    if a.json {
        let mut v = integer_report_json(&report);
        v["scalars"] = Value::Array(ic.scalars.iter().map(|s| json!(s.to_string())).collect());
        say_json(out, &v)?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_lemmas(a: LemmasArgs, out: &mut dyn Write) -> Outcome {
    let s = load_structure(&a.structure)?;
    let report = run_lemma_suite::<Rational>(&s, a.trials, a.seed);
    if a.json {
        let clauses: Vec<Value> = report
            .tallies
            .iter()
            .map(|t| json!({ "clause": t.clause.name(), "passed": t.passed, "failed": t.failed, "first_failure": t.first_failure }))
            .collect();
        say_json(out, &json!({ "seed": report.seed, "trials": report.trials, "clauses": clauses }))?;
    } else {
        write!(out, "{report}").map_err(|e| malformed(format!("stdout: {e}")))?;
    }
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn Write) -> Outcome {
    let cfg = GeneratorConfig { n: a.dim, lattice_seeds: a.lattice_seeds, seed: a.seed, max_retries: a.max_retries };
    let s = random_structure(&cfg).map_err(|e| match e {
        GenerationError::InvalidConfig(m) => malformed(format!("--dim/--max-retries: {m}")),
        exhausted @ GenerationError::GenerationExhausted(_) => failed(format!("seed {}: {exhausted}", a.seed)),
    })?;
    emit(&emit_structure(&s.to_candidate()), a.out.as_deref(), out)?;
    if let Some(p) = &a.out {
        say(
            out,
            format!(
                "seed {}: wrote n = {} structure with {} sets to {}",
                a.seed,
                s.n(),
                s.lattice().len(),
                p.display()
            ),
        )?;
    }
    Ok(EXIT_OK)
}
