//! Command-line front end. [`run`] returns the exit status and the report text.

use std::fmt::Write as _;
use std::fs;

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::oracle::{closure_finite, random_box_horn, RandomShape};
use crate::reductions::generators::{generate, GenOptions, Reduction};
use crate::reductions::tm::{halting_time, simulate, Convention, TuringMachine};
use crate::reductions::tricks::verify_all;
use crate::semantics::{check_model_file, parse_model_file, render_model_file, FiniteFrame, Interval, Semantics};
use crate::solver::{decide, dump_model, modal_depth, uniformity_exceptions, Verdict};
use crate::syntax::{classify, desugar, parse_formula_with, Formula, ParseOptions};
use crate::zones::{
    discrete_p2_violations, enumerate_section_configs, frame_classes, integer_counterexample_rep, unsupported_reason,
    verify_pmorphism, OrderClass, DEFAULT_K,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

/// Failures listed before a report is truncated.
const MAX_LISTED: usize = 20;

const UNIFORMITY_FORMULAS: usize = 50;
const UNIFORMITY_SEED: u64 = 0x5eed;

#[derive(Parser, Debug)]
#[command(name = "hshorn", version, about = "Horn fragments of Halpern-Shoham interval logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassArg {
    Lin,
    Fin,
    Dis,
    Den,
}

impl From<ClassArg> for OrderClass {
    fn from(c: ClassArg) -> OrderClass {
        match c {
            ClassArg::Lin => OrderClass::Lin,
            ClassArg::Fin => OrderClass::Fin,
            ClassArg::Dis => OrderClass::Dis,
            ClassArg::Den => OrderClass::Den,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SemArg {
    Refl,
    Irrefl,
}

impl SemArg {
    fn semantics(self, strict: bool) -> Semantics {
        Semantics::new(matches!(self, SemArg::Refl), strict)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fragment of the desugared formula.
    Classify {
        #[arg(short = 'f', long = "file")]
        file: String,
    },
    /// Box-Horn satisfiability over an order class.
    Decide {
        #[arg(long)]
        class: ClassArg,
        #[arg(long)]
        semantics: SemArg,
        #[arg(long)]
        strict: bool,
        #[arg(short = 'f', long = "file")]
        file: String,
        #[arg(long = "dump-model")]
        dump_model: Option<String>,
    },
    /// Checks a formula on a model file.
    Eval {
        #[arg(short = 'f', long = "file")]
        file: String,
        #[arg(short = 'm', long = "model")]
        model: String,
        #[arg(long)]
        at: Option<String>,
    },
    /// Closure fixpoint on a finite chain.
    OracleClosure {
        #[arg(short = 'f', long = "file")]
        file: String,
        #[arg(long)]
        chain: usize,
        #[arg(long)]
        semantics: SemArg,
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        seed: String,
    },
    /// Writes a reduction formula for a Turing machine.
    Gen {
        #[arg(long)]
        reduction: String,
        #[arg(long)]
        tm: String,
        #[arg(long, default_value_t = 3)]
        cells: usize,
        #[arg(long)]
        fin: bool,
        #[arg(short = 'o', long = "out")]
        out: String,
    },
    /// Simulates a Turing machine on growing configurations.
    TmRun {
        #[arg(long)]
        tm: String,
        #[arg(long)]
        steps: usize,
    },
    /// Zone partition, (p1) and (p2) on representatives.
    VerifyZones {
        #[arg(long)]
        class: Option<ClassArg>,
        #[arg(long)]
        semantics: Option<SemArg>,
    },
    /// Exhaustive checks of the encoding gadgets.
    VerifyTricks {
        #[arg(long, default_value_t = 3)]
        chain: usize,
    },
}

/// A report with its exit status.
struct Outcome {
    code: i32,
    text: String,
}

impl Outcome {
    fn new(code: i32, text: String) -> Outcome {
        Outcome { code, text }
    }

    fn usage(msg: impl std::fmt::Display) -> Outcome {
        Outcome::new(EXIT_USAGE, format!("ERROR {msg}\n"))
    }
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return (code, e.to_string());
        }
    };
    let out = match cli.command {
        Command::Classify { file } => classify_cmd(&file),
        Command::Decide {
            class,
            semantics,
            strict,
            file,
            dump_model,
        } => decide_cmd(&file, class.into(), semantics.semantics(strict), dump_model.as_deref()),
        Command::Eval { file, model, at } => eval_cmd(&file, &model, at.as_deref()),
        Command::OracleClosure {
            file,
            chain,
            semantics,
            strict,
            seed,
        } => closure_cmd(&file, chain, semantics.semantics(strict), &seed),
        Command::Gen {
            reduction,
            tm,
            cells,
            fin,
            out,
        } => gen_cmd(&reduction, &tm, cells, fin, &out),
        Command::TmRun { tm, steps } => tm_run_cmd(&tm, steps),
        Command::VerifyZones { class, semantics } => verify_zones_cmd(class.map(Into::into), semantics),
        Command::VerifyTricks { chain } => verify_tricks_cmd(chain),
    };
    let out = out.unwrap_or_else(|o| o);
    (out.code, out.text)
}

type Res = Result<Outcome, Outcome>;

fn read(path: &str) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| Outcome::usage(format!("{path}: {e}")))
}

/// Formula files may mention reserved `_` names; desugaring avoids every name in use.
fn load_formula(path: &str) -> Result<Formula, Outcome> {
    let text = read(path)?;
    parse_formula_with(&text, ParseOptions { allow_reserved: true }).map_err(|e| Outcome::usage(format!("{path}:{e}")))
}

fn load_tm(path: &str) -> Result<TuringMachine, Outcome> {
    TuringMachine::parse(&read(path)?).map_err(|e| Outcome::usage(format!("{path}: {e}")))
}

fn parse_interval(text: &str) -> Result<Interval, Outcome> {
    Interval::parse(text).ok_or_else(|| Outcome::usage(format!("bad interval `{text}`")))
}

fn classify_cmd(file: &str) -> Res {
    let f = load_formula(file)?;
    let g = desugar(&f);
    let info = classify(&g);
    Ok(Outcome::new(
        EXIT_OK,
        format!(
            "FRAGMENT {}\nflags: {}\ninitial: {}\nclauses: {}\n",
            info.name(),
            info,
            g.initial.len(),
            g.clauses.len()
        ),
    ))
}

fn decide_cmd(file: &str, cls: OrderClass, sem: Semantics, dump: Option<&str>) -> Res {
    let f = load_formula(file)?;
    let g = desugar(&f);
    let verdict = decide(&g, cls, sem);
    let mut text = format!("{verdict}\n");
    if let Verdict::Sat { frame, model } = &verdict {
        let _ = writeln!(text, "seed zone: {}", frame.zone_name(frame.seed));
        if let Some(path) = dump {
            let mf = dump_model(model, frame, modal_depth(&g));
            let body = format!("# frame {}\n{}", frame.name(), render_model_file(&mf));
            fs::write(path, body).map_err(|e| Outcome::usage(format!("{path}: {e}")))?;
            let _ = writeln!(text, "model: {path}");
        }
    }
    Ok(Outcome::new(verdict.exit_code(), text))
}

fn eval_cmd(file: &str, model: &str, at: Option<&str>) -> Res {
    let f = desugar(&load_formula(file)?);
    let mf = parse_model_file(&read(model)?).map_err(|e| Outcome::usage(format!("{model}: {e}")))?;
    let at = at.map(parse_interval).transpose()?;
    if let Some(i) = at {
        if !mf.model.frame.contains(i) {
            return Err(Outcome::usage(format!("interval {i} outside the frame")));
        }
    }
    let report = check_model_file(&f, &mf, at);
    let mut text = format!("{report}\n");
    for &(k, w) in report.failures.iter().take(MAX_LISTED) {
        let _ = writeln!(text, "  clause #{k} at {w}: {}", f.clauses[k]);
    }
    if report.failures.len() > MAX_LISTED {
        let _ = writeln!(text, "  ... {} more", report.failures.len() - MAX_LISTED);
    }
    let code = if report.holds() { EXIT_OK } else { EXIT_FAIL };
    Ok(Outcome::new(code, text))
}

fn closure_cmd(file: &str, chain: usize, sem: Semantics, seed: &str) -> Res {
    let f = desugar(&load_formula(file)?);
    let seed = parse_interval(seed)?;
    if chain == 0 {
        return Err(Outcome::usage("chain must have at least one point"));
    }
    let frame = FiniteFrame::new(chain, sem);
    if !classify(&f).box_only {
        return Ok(Outcome::new(
            EXIT_UNSUPPORTED,
            "UNSUPPORTED closure needs a box-Horn formula\n".into(),
        ));
    }
    let labels = closure_finite(&f, &frame, seed).map_err(Outcome::usage)?;
    let bot = labels.has_bot();
    let mut text = format!(
        "CLOSURE {} facts={} applications={}\n",
        if bot { "BOT" } else { "CONSISTENT" },
        labels.fact_count(),
        labels.applications
    );
    for &w in &frame.intervals {
        let names: Vec<String> = labels
            .labels_at(w)
            .into_iter()
            .filter(|l| !matches!(l, crate::syntax::Literal::Top))
            .map(|l| l.to_string())
            .collect();
        if !names.is_empty() {
            let _ = writeln!(text, "{w}: {}", names.join(" "));
        }
    }
    Ok(Outcome::new(if bot { EXIT_FAIL } else { EXIT_OK }, text))
}

fn gen_cmd(reduction: &str, tm: &str, cells: usize, fin: bool, out: &str) -> Res {
    let r: Reduction = reduction.parse().map_err(Outcome::usage)?;
    let machine = load_tm(tm)?;
    let opts = GenOptions {
        fin,
        any_semantics: r == Reduction::DiamondHornRefl,
    };
    let f = generate(r, &machine, cells, opts).map_err(Outcome::usage)?;
    let info = classify(&desugar(&f));
    let body = f.render_lines();
    let mut text = format!(
        "GENERATED {r} fragment={} expected={} initial={} clauses={}\n",
        info.name(),
        r.fragment(),
        f.initial.len(),
        f.clauses.len()
    );
    if out == "-" {
        text.push_str(&body);
    } else {
        fs::write(out, body).map_err(|e| Outcome::usage(format!("{out}: {e}")))?;
        let _ = writeln!(text, "written: {out}");
    }
    let code = if r.fits(&info) { EXIT_OK } else { EXIT_FAIL };
    Ok(Outcome::new(code, text))
}

fn tm_run_cmd(tm: &str, steps: usize) -> Res {
    let machine = load_tm(tm)?;
    let run = simulate(&machine, steps, Convention::Growing).map_err(Outcome::usage)?;
    let halted = halting_time(&machine, steps).is_some();
    let mut text = format!("RUN steps={steps} configurations={} halted={halted}\n", run.len());
    for (n, c) in run.iter().enumerate() {
        let _ = writeln!(text, "C{n}: {}", machine.config_text(c));
    }
    Ok(Outcome::new(EXIT_OK, text))
}

fn verify_zones_cmd(class: Option<OrderClass>, semantics: Option<SemArg>) -> Res {
    let sems = match semantics {
        Some(s) => vec![s.semantics(false)],
        None => vec![Semantics::REFLEXIVE, Semantics::IRREFLEXIVE],
    };
    let classes = match class {
        Some(c) => vec![c],
        None => OrderClass::ALL.to_vec(),
    };
    let mut body = String::new();
    let mut failed = 0;
    let mut checked = 0;
    for &cls in &classes {
        for &sem in &sems {
            if let Some(reason) = unsupported_reason(cls, sem) {
                let _ = writeln!(body, "{cls}-{}: skipped ({reason})", sem.flavor_name());
                continue;
            }
            let configs = enumerate_section_configs(cls, sem).map_err(Outcome::usage)?;
            let classes_n = frame_classes(cls, sem).map_err(Outcome::usage)?.len();
            let _ = writeln!(
                body,
                "{cls}-{}: {} pointed configurations, {classes_n} frame classes",
                sem.flavor_name(),
                configs.len()
            );
            let mut rng = StdRng::seed_from_u64(UNIFORMITY_SEED);
            let mut exceptions = 0;
            for _ in 0..UNIFORMITY_FORMULAS {
                let f = desugar(&random_box_horn(&mut rng, RandomShape::default()));
                let cfg = &configs[rng.gen_range(0..configs.len())];
                exceptions += uniformity_exceptions(&f, cfg, sem, DEFAULT_K).map_err(Outcome::usage)?.len();
            }
            let counted = sem.reflexive;
            if counted {
                checked += 1;
                if exceptions > 0 {
                    failed += 1;
                }
            }
            let _ = writeln!(
                body,
                "  uniformity: {UNIFORMITY_FORMULAS} random formulas, {exceptions} exceptions{}",
                if counted { "" } else { " (measured only)" }
            );
            for cfg in &configs {
                for k in [3, 4] {
                    let r = verify_pmorphism(cfg, cls, sem, k);
                    checked += 1;
                    if !r.ok() {
                        failed += 1;
                        let _ = writeln!(
                            body,
                            "  FAILED {cfg} k={k}: stable={} partition={} violations={}",
                            r.stable,
                            r.partition_ok,
                            r.violations.len()
                        );
                        for v in r.violations.iter().take(MAX_LISTED) {
                            let _ = writeln!(body, "    {v}");
                        }
                    }
                }
            }
        }
    }
    if class.is_none_or(|c| c == OrderClass::Dis) && semantics.is_none_or(|s| matches!(s, SemArg::Irrefl)) {
        let rep = integer_counterexample_rep(2);
        let v = discrete_p2_violations(&rep);
        let _ = writeln!(body, "dis-irrefl counterexample (a=0, b=3): {} p2 violations (expected)", v.len());
        for x in v.iter().filter(|x| x.from == "Zpt[(a,b)]" && x.to == "Zoff[(a,b)]") {
            let (i, j) = (x.interval.start - rep.a, x.interval.end - rep.a);
            let _ = writeln!(body, "  {} {} {} -> {} stranded at ({i},{j})", x.condition, x.rel, x.from, x.to);
        }
    }
    let verdict = if failed == 0 { "ok" } else { "failed" };
    let text = format!("REPORT verify-zones {verdict} checked={checked} failed={failed}\n{body}");
    Ok(Outcome::new(if failed == 0 { EXIT_OK } else { EXIT_FAIL }, text))
}

fn verify_tricks_cmd(chain: usize) -> Res {
    if !(2..=3).contains(&chain) {
        return Err(Outcome::usage("chain must be 2 or 3"));
    }
    let reports = verify_all(chain);
    let failed = reports.iter().filter(|r| !r.holds()).count();
    let verdict = if failed == 0 { "ok" } else { "failed" };
    let mut text = format!("REPORT verify-tricks {verdict} checked={} failed={failed}\n", reports.len());
    for r in &reports {
        let _ = writeln!(text, "{r}");
    }
    Ok(Outcome::new(if failed == 0 { EXIT_OK } else { EXIT_FAIL }, text))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        run(std::iter::once("hshorn").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(call(&["decide", "--class", "weird"]).0, EXIT_USAGE);
        assert_eq!(call(&["classify", "-f", "/nonexistent/x.hs"]).0, EXIT_USAGE);
    }

    #[test]
    fn tricks_reject_big_chains() {
        assert_eq!(call(&["verify-tricks", "--chain", "9"]).0, EXIT_USAGE);
    }
}
