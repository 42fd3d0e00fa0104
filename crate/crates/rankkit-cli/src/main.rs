//! Command-line surface over the ranking library: rank and shift queries,
//! contract verification against the brute-force oracle, satisfiability
//! counting through the paired-language rankers, the diagonalization and
//! priority simulators, and compression retargeting.
//!
//! Results print as plain text by default; `--json` wraps them in a
//! deterministic run record. Failures always emit a structured record on
//! stderr, with exit codes 0 (clean), 1 (contract failure), 2 (usage
//! error), 3 (resource or budget exhaustion). The `RANKKIT_MAXLEN`
//! environment variable overrides the default scan bounds; explicit
//! flags win over it.

mod expr;
mod formula_text;
mod record;

use std::io::Read as _;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rankkit::{
    brute_rank, count_sat, diag_phi_catalog, diag_run, diag_verify, encode_formula,
    extract_sat_count_a, extract_sat_count_b, path_set_check, priority_phi_catalog, priority_run,
    requirement_report, retarget_re, retarget_rec, shift, split_by_color, thm30_sets,
    validate_state, verify_compression, verify_semistrong, verify_strong, verify_weak, BStr,
    DiagMode, Enumerator, Error, Partial, PartialFn, PriorityState, RankOrOut, ShortlexIter,
};

use expr::{catalog_bound, eval_expr, parse_expr, SetExpr};
use record::{error_record, usage_record, version, Durations, RunRecord};

const DEFAULT_RANK_MAX_LEN: usize = 10;
const DEFAULT_COMPRESSION_MAX_LEN: usize = 8;
const DEFAULT_TABLE_MAX_LEN: usize = 6;
const BRUTE_RANK_MAX_LEN: usize = 20;

#[derive(Parser)]
#[command(
    name = "rankkit",
    version,
    about = "Exact ranking, compression, and simulation over binary strings"
)]
struct Cli {
    /// Emit the full run record as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank a string within a set expression.
    Rank {
        expr: String,
        string: String,
        /// Answer through the attached ranker; error if there is none.
        #[arg(long, conflicts_with = "brute")]
        strong: bool,
        /// Answer by walking the whole shortlex order up to the string.
        #[arg(long)]
        brute: bool,
    },
    /// Shift a string by a signed offset in shortlex order.
    Shift {
        string: String,
        #[arg(allow_negative_numbers = true)]
        n: i64,
    },
    /// Check an attached contract against brute enumeration; exit 0 iff clean.
    Verify {
        expr: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Scan bound; defaults to 10 (rank kinds) or 8 (compression),
        /// lowered to the catalog entry's recorded bound for bare names.
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Count satisfying assignments, directly or through a ranker.
    Satcount {
        #[arg(long, value_enum)]
        via: ViaArg,
        /// Formula text, e.g. "and(x0,not(x1))".
        formula: String,
        /// Widen the variable count past the highest index used.
        #[arg(long)]
        vars: Option<u8>,
    },
    /// Run the bounded diagonalization engine and verify its trace.
    Diag {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Comma-separated function names; defaults to the whole catalog.
        #[arg(long)]
        phis: Option<String>,
        #[arg(long, default_value_t = 256)]
        budget: u64,
        #[arg(long, default_value_t = 9)]
        horizon: usize,
    },
    /// Run the finite-injury priority simulation and emit its state.
    Priority {
        #[arg(long, default_value_t = 200)]
        stages: u64,
        /// Comma-separated function names; defaults to the whole catalog.
        #[arg(long)]
        phis: Option<String>,
    },
    /// Re-validate a saved priority state (a file path, or - for stdin).
    PriorityCheck {
        file: String,
        #[arg(long, default_value_t = 2)]
        margin: u64,
    },
    /// Redirect a compression onto a target set and print the mapping.
    Retarget {
        #[arg(long, default_value = "sigma_star")]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_enum)]
        via: ViaTarget,
        /// Table bound; defaults to 6.
        #[arg(long)]
        max_len: Option<usize>,
        /// Scan bound for locating target members (decider route).
        #[arg(long, default_value_t = 14)]
        scan: usize,
        /// Step budget for the enumerator route.
        #[arg(long, default_value_t = 16384)]
        step_cap: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Rank { .. } => "rank",
            Command::Shift { .. } => "shift",
            Command::Verify { .. } => "verify",
            Command::Satcount { .. } => "satcount",
            Command::Diag { .. } => "diag",
            Command::Priority { .. } => "priority",
            Command::PriorityCheck { .. } => "priority-check",
            Command::Retarget { .. } => "retarget",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Strong,
    Semistrong,
    Weak,
    Compression,
}

impl KindArg {
    fn name(self) -> &'static str {
        match self {
            KindArg::Strong => "strong",
            KindArg::Semistrong => "semistrong",
            KindArg::Weak => "weak",
            KindArg::Compression => "compression",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ViaArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    Direct,
}

impl ViaArg {
    fn name(self) -> &'static str {
        match self {
            ViaArg::A => "A",
            ViaArg::B => "B",
            ViaArg::Direct => "direct",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Intersection,
    Union,
    Complement,
}

impl ModeArg {
    fn mode(self) -> DiagMode {
        match self {
            ModeArg::Intersection => DiagMode::Intersection,
            ModeArg::Union => DiagMode::Union,
            ModeArg::Complement => DiagMode::Complement,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Intersection => "intersection",
            ModeArg::Union => "union",
            ModeArg::Complement => "complement",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ViaTarget {
    Decider,
    Enumerator,
}

impl ViaTarget {
    fn name(self) -> &'static str {
        match self {
            ViaTarget::Decider => "decider",
            ViaTarget::Enumerator => "enumerator",
        }
    }
}

struct Outcome {
    flags: Value,
    inputs: Value,
    result: Value,
    trace: Option<Value>,
    human: String,
    exit: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let record = usage_record(e.to_string());
            eprintln!("{}", serde_json::to_string_pretty(&record).unwrap());
            return ExitCode::from(2);
        }
    };
    let started = Instant::now();
    let command = cli.command.name().to_string();
    match run(cli.command) {
        Ok(outcome) => {
            let text = if cli.json {
                let record = RunRecord {
                    command,
                    version: version(),
                    flags: outcome.flags,
                    inputs: outcome.inputs,
                    result: outcome.result,
                    trace: outcome.trace,
                    durations: Durations {
                        total_ms: started.elapsed().as_secs_f64() * 1000.0,
                    },
                };
                serde_json::to_string_pretty(&record).unwrap()
            } else {
                outcome.human
            };
            print_stdout(&text, outcome.exit)
        }
        Err(err) => {
            let (record, code) = error_record(&command, &err);
            eprintln!("{}", serde_json::to_string_pretty(&record).unwrap());
            ExitCode::from(code)
        }
    }
}

/// Writes the result line(s), treating a closed pipe as a normal end of
/// output rather than a failure.
fn print_stdout(text: &str, exit: u8) -> ExitCode {
    use std::io::Write as _;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Ok(()) => ExitCode::from(exit),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::from(exit),
        Err(e) => {
            let (record, code) = error_record("rankkit", &Error::resource(format!(
                "cannot write to stdout: {e}"
            )));
            eprintln!("{}", serde_json::to_string_pretty(&record).unwrap());
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Rank { expr, string, strong, brute } => run_rank(&expr, &string, strong, brute),
        Command::Shift { string, n } => run_shift(&string, n),
        Command::Verify { expr, kind, max_len } => run_verify(&expr, kind, max_len),
        Command::Satcount { via, formula, vars } => run_satcount(via, &formula, vars),
        Command::Diag { mode, phis, budget, horizon } => {
            run_diag(mode, phis.as_deref(), budget, horizon)
        }
        Command::Priority { stages, phis } => run_priority(stages, phis.as_deref()),
        Command::PriorityCheck { file, margin } => run_priority_check(&file, margin),
        Command::Retarget { from, to, via, max_len, scan, step_cap } => {
            run_retarget(&from, &to, via, max_len, scan, step_cap)
        }
    }
}

fn env_max_len() -> Result<Option<usize>, Error> {
    match std::env::var("RANKKIT_MAXLEN") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| {
            Error::config(format!("RANKKIT_MAXLEN must be a nonnegative integer, got {s:?}"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::config(format!("RANKKIT_MAXLEN is unreadable: {e}"))),
    }
}

fn resolve_bound(flag: Option<usize>, expr: &SetExpr, compression: bool) -> Result<usize, Error> {
    if let Some(l) = flag {
        return Ok(l);
    }
    if let Some(l) = env_max_len()? {
        return Ok(l);
    }
    let global = if compression { DEFAULT_COMPRESSION_MAX_LEN } else { DEFAULT_RANK_MAX_LEN };
    Ok(match catalog_bound(expr, compression) {
        Some(cap) => cap.min(global),
        None => global,
    })
}

fn run_rank(expr_text: &str, string: &str, strong: bool, brute: bool) -> Result<Outcome, Error> {
    let expr = parse_expr(expr_text)?;
    let set = eval_expr(&expr)?;
    let x: BStr = string.parse()?;
    let brute_answer = |x: &BStr| -> Result<RankOrOut, Error> {
        if x.len() > BRUTE_RANK_MAX_LEN {
            return Err(Error::resource(format!(
                "brute ranking walks every string up to the input; refusing past length {BRUTE_RANK_MAX_LEN}"
            )));
        }
        Ok(RankOrOut::Rank(brute_rank(&|y| set.is_member(y), x)))
    };
    let answer = if brute {
        brute_answer(&x)?
    } else {
        match &set.ranker {
            Some(r) => r.eval(&x)?,
            None if strong => {
                return Err(Error::config(format!(
                    "{} has no ranker attached; drop --strong or use --brute",
                    set.name
                )))
            }
            None => brute_answer(&x)?,
        }
    };
    Ok(Outcome {
        flags: json!({ "strong": strong, "brute": brute }),
        inputs: json!({ "expr": expr.to_string(), "string": x.to_string() }),
        result: serde_json::to_value(&answer).expect("rank serializes"),
        trace: None,
        human: answer.to_string(),
        exit: 0,
    })
}

fn run_shift(string: &str, n: i64) -> Result<Outcome, Error> {
    let x: BStr = string.parse()?;
    let shifted = shift(&x, n);
    Ok(Outcome {
        flags: json!({}),
        inputs: json!({ "string": x.to_string(), "n": n }),
        result: Value::String(shifted.to_string()),
        trace: None,
        human: shifted.to_string(),
        exit: 0,
    })
}

fn run_verify(expr_text: &str, kind: KindArg, max_len: Option<usize>) -> Result<Outcome, Error> {
    let expr = parse_expr(expr_text)?;
    let set = eval_expr(&expr)?;
    let bound = resolve_bound(max_len, &expr, matches!(kind, KindArg::Compression))?;
    let report = match kind {
        KindArg::Strong => verify_strong(&set, bound)?,
        KindArg::Semistrong => verify_semistrong(&set, bound)?,
        KindArg::Weak => verify_weak(&set, bound)?,
        KindArg::Compression => {
            verify_compression(&set, &(Arc::new(|_: &BStr| true) as _), bound)?
        }
    };
    let exit = u8::from(!report.clean());
    Ok(Outcome {
        flags: json!({ "kind": kind.name(), "max_len": bound }),
        inputs: json!({ "expr": expr.to_string() }),
        result: serde_json::to_value(&report).expect("report serializes"),
        trace: None,
        human: report.to_table().trim_end().to_string(),
        exit,
    })
}

fn run_satcount(via: ViaArg, formula: &str, vars: Option<u8>) -> Result<Outcome, Error> {
    let f = formula_text::parse_formula(formula, vars)?;
    let alpha = encode_formula(&f)?;
    let count = match via {
        ViaArg::A => {
            let sets = thm30_sets();
            extract_sat_count_a(sets.a.ranker.as_ref().expect("catalog ranker"), &alpha)?
        }
        ViaArg::B => {
            let sets = thm30_sets();
            extract_sat_count_b(sets.b.ranker.as_ref().expect("catalog ranker"), &alpha)?
        }
        ViaArg::Direct => count_sat(&f)?,
    };
    Ok(Outcome {
        flags: json!({ "via": via.name(), "vars": vars }),
        inputs: json!({
            "formula": formula,
            "var_count": f.var_count,
            "encoding": alpha.to_string(),
        }),
        result: Value::String(count.to_string()),
        trace: None,
        human: count.to_string(),
        exit: 0,
    })
}

fn select_phis(catalog: Vec<PartialFn>, list: Option<&str>) -> Result<Vec<PartialFn>, Error> {
    let Some(list) = list else { return Ok(catalog) };
    let known = || catalog.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join(", ");
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim) {
        match catalog.iter().find(|p| p.name == name) {
            Some(p) => out.push(p.clone()),
            None => {
                return Err(Error::config(format!(
                    "unknown function {name:?}; the catalog has: {}",
                    known()
                )))
            }
        }
    }
    Ok(out)
}

fn run_diag(
    mode: ModeArg,
    phis: Option<&str>,
    budget: u64,
    horizon: usize,
) -> Result<Outcome, Error> {
    let phis = select_phis(diag_phi_catalog(), phis)?;
    let names: Vec<&str> = phis.iter().map(|p| p.name.as_str()).collect();
    let trace = diag_run(mode.mode(), &phis, budget, horizon)?;
    let report = diag_verify(&trace, &phis);
    let exit = u8::from(!report.clean());
    let human = format!(
        "{} stages, frontier {}, A holds {} strings, B holds {}\n{}",
        trace.stages.len(),
        trace.m_final,
        trace.a_prefix.len(),
        trace.b_prefix.len(),
        report.to_table().trim_end()
    );
    Ok(Outcome {
        flags: json!({ "mode": mode.name(), "budget": budget, "horizon": horizon }),
        inputs: json!({ "phis": names }),
        result: json!({
            "m_final": trace.m_final.to_string(),
            "stages": trace.stages.len(),
            "verification": serde_json::to_value(&report).expect("report serializes"),
        }),
        trace: Some(serde_json::to_value(&trace).expect("trace serializes")),
        human,
        exit,
    })
}

fn run_priority(stages: u64, phis: Option<&str>) -> Result<Outcome, Error> {
    let phis = select_phis(priority_phi_catalog(), phis)?;
    let names: Vec<&str> = phis.iter().map(|p| p.name.as_str()).collect();
    let state = priority_run(&phis, stages)?;
    let (c0, c1) = split_by_color(&state.printed);
    let rows = requirement_report(&state);
    let human = format!(
        "{} stages, b = {}, printed {} triples ({} color-0, {} color-1)\n{}",
        state.stages,
        state.b,
        state.printed.len(),
        c0.len(),
        c1.len(),
        rows.iter()
            .map(|r| format!("  F_{}: {}, injured {} time(s)", r.n, r.status, r.injury_count))
            .collect::<Vec<_>>()
            .join("\n")
    );
    Ok(Outcome {
        flags: json!({ "stages": stages }),
        inputs: json!({ "phis": names }),
        result: json!({
            "b": state.b,
            "printed": state.printed.len(),
            "c0": c0.len(),
            "c1": c1.len(),
            "requirements": serde_json::to_value(&rows).expect("rows serialize"),
        }),
        trace: Some(serde_json::to_value(&state).expect("state serializes")),
        human,
        exit: 0,
    })
}

fn run_priority_check(file: &str, margin: u64) -> Result<Outcome, Error> {
    let text = if file == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::config(format!("cannot read stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(file)
            .map_err(|e| Error::config(format!("cannot read {file}: {e}")))?
    };
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::domain(format!("not JSON: {e}")))?;
    // Accept either a bare state or a full run record carrying one.
    let state_value = value.get("trace").cloned().unwrap_or(value);
    let state: PriorityState = serde_json::from_value(state_value)
        .map_err(|e| Error::domain(format!("not a saved priority state: {e}")))?;
    let validation = validate_state(&state);
    let path = path_set_check(&state.printed, state.stages, margin);
    let exit = u8::from(!(validation.clean() && path.clean()));
    let human = format!(
        "{}\n{}",
        validation.to_table().trim_end(),
        path.to_table().trim_end()
    );
    Ok(Outcome {
        flags: json!({ "margin": margin }),
        inputs: json!({ "file": file }),
        result: json!([
            serde_json::to_value(&validation).expect("report serializes"),
            serde_json::to_value(&path).expect("report serializes"),
        ]),
        trace: None,
        human,
        exit,
    })
}

fn run_retarget(
    from: &str,
    to: &str,
    via: ViaTarget,
    max_len: Option<usize>,
    scan: usize,
    step_cap: u64,
) -> Result<Outcome, Error> {
    let from_expr = parse_expr(from)?;
    let from_set = eval_expr(&from_expr)?;
    let f = from_set.compressor.clone().ok_or_else(|| {
        Error::config(format!("{} has no compression attached to retarget", from_set.name))
    })?;
    let to_expr = parse_expr(to)?;
    let to_set = eval_expr(&to_expr)?;
    let g = match via {
        ViaTarget::Decider => retarget_rec(&f, &to_set, scan),
        ViaTarget::Enumerator => {
            retarget_re(&f, &Enumerator::from_member(to_set.member.clone()), step_cap)?
        }
    };
    let bound = match max_len {
        Some(l) => l,
        None => env_max_len()?.unwrap_or(DEFAULT_TABLE_MAX_LEN),
    };
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for x in ShortlexIter::up_to_len(bound) {
        match (g.map)(&x)? {
            Partial::Defined(y) => {
                lines.push(format!("{x} -> {y}"));
                rows.push(json!({ "x": x.to_string(), "fx": y.to_string() }));
            }
            Partial::Undefined => {
                lines.push(format!("{x} -> (undefined)"));
                rows.push(json!({ "x": x.to_string(), "fx": Value::Null }));
            }
        }
    }
    Ok(Outcome {
        flags: json!({
            "via": via.name(),
            "max_len": bound,
            "scan": scan,
            "step_cap": step_cap,
        }),
        inputs: json!({ "from": from_expr.to_string(), "to": to_expr.to_string() }),
        result: json!({ "rows": rows }),
        trace: None,
        human: lines.join("\n"),
        exit: 0,
    })
}
