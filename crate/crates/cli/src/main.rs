use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lambda_ca::additive::{a_normalize, a_trace, lesssim, sigma};
use lambda_ca::fsysp::{derive, f_check, f_lessapprox_any_layout, f_normalize, translate};
use lambda_ca::parse::{parse_context, parse_term, parse_type};
use lambda_ca::precision::precedes;
use lambda_ca::propgen::{fuzz, GenConfig};
use lambda_ca::rewrite::{format_path, normalize, trace, Outcome, Strategy, DEFAULT_FUEL};
use lambda_ca::syntax::{Context, Term};
use lambda_ca::typing::{check_subject_reduction, synthesize};

/// Algebraic lambda-calculus with scalars: reduction, typing and the
/// Additive and F abstractions.
#[derive(Parser)]
#[command(name = "lca", version)]
struct Cli {
    /// Print results as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Term source; read from --file or stdin when absent.
    term: Option<String>,
    #[arg(short, long)]
    file: Option<PathBuf>,
    /// Typing context, e.g. "x:X, f:X -> Y".
    #[arg(long, default_value = "")]
    ctx: String,
}

#[derive(Args)]
struct Run {
    /// leftmost, rightmost, random:SEED or group:F,E,A,B
    #[arg(long, default_value = "leftmost")]
    strategy: Strategy,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: usize,
    /// Print every step with the rule and position that fired.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Additive,
    Fp,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and print the canonical form.
    Parse {
        #[command(flatten)]
        input: Input,
        /// Parse a type instead of a term.
        #[arg(long)]
        ty: bool,
    },
    Normalize {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: Run,
    },
    Typecheck {
        #[command(flatten)]
        input: Input,
    },
    /// Decide `left ≼ right` and print the matching.
    Precedes { left: String, right: String },
    /// Type every one-step reduct and compare with the source type.
    SrCheck {
        #[command(flatten)]
        input: Input,
    },
    /// Drop scalars, keeping floor-many copies.
    Abstract {
        #[command(flatten)]
        input: Input,
    },
    /// Abstract, then normalize with the Additive rules.
    ANormalize {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: Run,
    },
    /// Abstract and translate into System F with pairs.
    Translate {
        #[command(flatten)]
        input: Input,
        /// Also print the typing derivation.
        #[arg(long)]
        derivation: bool,
    },
    /// Translate and normalize in System F.
    FpNormalize {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 10 * DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Check that abstracting before or after normalizing agree up to order.
    Square {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "additive")]
        level: Level,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Generate typed terms and run the property checks on each.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Print one line per sample.
        #[arg(long)]
        records: bool,
    },
}

enum Failure {
    /// A property or typing check came out negative.
    Check(String),
    Parse(String),
    Fuel(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Fuel(_) => 3,
        }
    }
}

struct Output {
    text: String,
    json: Value,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Output {
        Output { text: text.into(), json }
    }
}

impl Input {
    fn source(&self) -> Result<String, Failure> {
        if let Some(t) = &self.term {
            return Ok(t.clone());
        }
        if let Some(path) = &self.file {
            return std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())));
        }
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| Failure::Parse(e.to_string()))?;
        Ok(buf)
    }

    fn term(&self) -> Result<Term, Failure> {
        parse_term(self.source()?.trim()).map_err(|e| Failure::Parse(e.to_string()))
    }

    fn context(&self) -> Result<Context, Failure> {
        parse_context(&self.ctx).map_err(|e| Failure::Parse(format!("context: {e}")))
    }
}

fn outcome(out: &Outcome) -> Result<Output, Failure> {
    match out {
        Outcome::Normal { term, steps } => {
            Ok(Output::new(term.to_string(), json!({ "normal": term.to_string(), "steps": steps })))
        }
        Outcome::FuelExhausted { last, steps } => {
            Err(Failure::Fuel(format!("no normal form after {steps} steps; last term `{last}`")))
        }
    }
}

fn run_trace(start: &Term, run: &Run, t: lambda_ca::rewrite::Trace) -> Result<Output, Failure> {
    let mut lines = vec![format!("    {start}")];
    let mut steps = Vec::new();
    for r in &t.steps {
        let path = format_path(&r.path);
        lines.push(format!("{:<4}{}  [{} at {}]", "->", r.term, r.rule, path));
        steps.push(json!({ "rule": r.rule.to_string(), "path": path, "term": r.term.to_string() }));
    }
    let mut out = outcome(&t.outcome)?;
    if run.trace {
        out.text = lines.join("\n");
        out.json["trace"] = Value::Array(steps);
    }
    Ok(out)
}

fn execute(cmd: &Command) -> Result<Output, Failure> {
    match cmd {
        Command::Parse { input, ty } => {
            let src = input.source()?;
            let shown = if *ty {
                parse_type(src.trim()).map(|t| t.to_string())
            } else {
                parse_term(src.trim()).map(|t| t.to_string())
            }
            .map_err(|e| Failure::Parse(e.to_string()))?;
            Ok(Output::new(shown.clone(), json!({ "parsed": shown })))
        }
        Command::Normalize { input, run } => {
            let t = input.term()?;
            run_trace(&t, run, trace(&t, &run.strategy, run.fuel))
        }
        Command::Typecheck { input } => {
            let ty = synthesize(&input.context()?, &input.term()?).map_err(|e| Failure::Check(e.to_string()))?;
            Ok(Output::new(ty.to_string(), json!({ "type": ty.to_string() })))
        }
        Command::Precedes { left, right } => {
            let l = parse_type(left).map_err(|e| Failure::Parse(e.to_string()))?;
            let r = parse_type(right).map_err(|e| Failure::Parse(e.to_string()))?;
            let w = precedes(&l, &r).map_err(|e| Failure::Check(e.to_string()))?;
            let (ls, rs) = (l.summands(), r.summands());
            let pairs: Vec<Value> =
                w.matching.iter().map(|(i, j, _)| json!([ls[*i].to_string(), rs[*j].to_string()])).collect();
            Ok(Output::new(w.to_string(), json!({ "precedes": true, "matching": pairs })))
        }
        Command::SrCheck { input } => {
            let t = input.term()?;
            let report = check_subject_reduction(&input.context()?, &t).map_err(|e| Failure::Check(e.to_string()))?;
            let violations: Vec<String> = report
                .violations
                .iter()
                .map(|v| format!("{} at {}: `{}` {:?}", v.rule, format_path(&v.path), v.reduct, v.failure))
                .collect();
            if !violations.is_empty() {
                return Err(Failure::Check(violations.join("\n")));
            }
            let text = format!("{} reducts, all at least as precise as {}", report.reducts, report.ty);
            Ok(Output::new(text, json!({ "type": report.ty.to_string(), "reducts": report.reducts })))
        }
        Command::Abstract { input } => {
            let a = sigma(&input.term()?);
            Ok(Output::new(a.to_string(), json!({ "abstract": a.to_string() })))
        }
        Command::ANormalize { input, run } => {
            let a = sigma(&input.term()?);
            if run.trace {
                let t = a_trace(&a, &run.strategy, run.fuel);
                return run_trace(a.term(), run, t);
            }
            outcome(&a_normalize(&a, &run.strategy, run.fuel))
        }
        Command::Translate { input, derivation } => {
            let a = sigma(&input.term()?);
            let d = derive(&input.context()?, &a).map_err(|e| Failure::Check(e.to_string()))?;
            f_check(&d).map_err(|e| Failure::Check(e.to_string()))?;
            let f = translate(&d);
            let ty = d.root.ty.ftype();
            let mut text = format!("{f} : {ty}");
            if *derivation {
                text = format!("{d}\n{text}");
            }
            Ok(Output::new(text, json!({ "term": f.to_string(), "type": ty.to_string() })))
        }
        Command::FpNormalize { input, fuel } => {
            let a = sigma(&input.term()?);
            let d = derive(&input.context()?, &a).map_err(|e| Failure::Check(e.to_string()))?;
            let n = f_normalize(&translate(&d), *fuel).map_err(|e| Failure::Fuel(e.to_string()))?;
            Ok(Output::new(n.to_string(), json!({ "normal": n.to_string() })))
        }
        Command::Square { input, level, fuel } => square(input, *level, *fuel),
        Command::Fuzz { seed, samples, depth, records } => {
            let cfg = GenConfig { seed: *seed, samples: *samples, max_depth: *depth, ..GenConfig::default() };
            let run = fuzz(&cfg);
            let mut text = String::new();
            if *records {
                text = run.records().join("\n") + "\n";
            }
            text.push_str(&run.summary());
            let unexplained = run.unexplained().len();
            let reports: Vec<Value> = run
                .reports
                .iter()
                .map(|r| json!({ "check": r.name, "samples": r.samples, "failures": r.failures.len() }))
                .collect();
            let value = json!({
                "seed": seed,
                "samples": samples,
                "checks": reports,
                "known_gaps": run.gap_samples().len(),
                "unexplained": unexplained,
            });
            if unexplained > 0 {
                return Err(Failure::Check(text));
            }
            Ok(Output::new(text, value))
        }
    }
}

fn square(input: &Input, level: Level, fuel: usize) -> Result<Output, Failure> {
    let t = input.term()?;
    let ctx = input.context()?;
    let normal = match normalize(&t, &Strategy::Leftmost, fuel) {
        Outcome::Normal { term, .. } => term,
        out @ Outcome::FuelExhausted { .. } => return outcome(&out),
    };
    let (before, after) = (sigma(&t), sigma(&normal));
    let holds = match level {
        Level::Additive => lesssim(&before, &after, fuel).map_err(|e| Failure::Fuel(e.to_string()))?,
        Level::Fp => {
            let mut parts = Vec::new();
            for a in [&before, &after] {
                let d = derive(&ctx, a).map_err(|e| Failure::Check(format!("`{a}`: {e}")))?;
                f_check(&d).map_err(|e| Failure::Check(format!("`{a}`: {e}")))?;
                parts.push((translate(&d), d.root.ty.ftype()));
            }
            let ((l, lt), (r, rt)) = (&parts[0], &parts[1]);
            f_lessapprox_any_layout(l, lt, r, rt, 10 * fuel).map_err(|e| Failure::Fuel(e.to_string()))?
        }
    };
    let text = format!("{before}  vs  {after}");
    if !holds {
        return Err(Failure::Check(format!("square fails: {text}")));
    }
    Ok(Output::new(format!("square holds: {text}"), json!({ "holds": true, "before": before.to_string(), "after": after.to_string() })))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", out.json);
            } else {
                println!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (Failure::Check(msg) | Failure::Parse(msg) | Failure::Fuel(msg)) = &f;
            if cli.json {
                println!("{}", json!({ "error": msg, "code": f.code() }));
            } else {
                eprintln!("{msg}");
            }
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
