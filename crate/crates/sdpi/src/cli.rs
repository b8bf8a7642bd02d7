//! The `sdpi` command line.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::diag::{Diagnostic, Severity};
use crate::dynamics::{run, Outcome};
use crate::embed::embed_decl;
use crate::equality::{
    default_fuel, fun_eq_fuel, kind_eq_fuel, proc_eq_with, sess_eq_fuel, term_eq_fuel, Fuel,
    Verdict,
};
use crate::meta::{run_suite, Suite};
use crate::surface::{Decl, DeclBody, Pretty, TypeBody};
use crate::syntax::*;
use crate::typing::{check_file, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "sdpi",
    version,
    about = "Dependent session types with a contextual process monad"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check every declaration of a file.
    Check { file: PathBuf },
    /// Run a closed process declaration and print its trace.
    Run {
        file: PathBuf,
        #[arg(long = "main")]
        main: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "max-steps", default_value_t = 100_000)]
        max_steps: usize,
        /// One JSON record per line instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Decide definitional equality of two declarations of the same sort.
    Eq {
        file: PathBuf,
        lhs: String,
        rhs: String,
        #[arg(long)]
        fuel: Option<u64>,
    },
    /// Print the process translation of a declaration.
    Embed {
        file: PathBuf,
        #[arg(long = "def")]
        def: String,
    },
    /// Run one of the property suites.
    TestMeta {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the machine-readable summary only.
        #[arg(long)]
        json: bool,
    },
}

/// Runs the command line on `args` (including the program name), writing
/// to `out` and `err`; returns the exit code.
pub fn main_with(
    args: impl IntoIterator<Item = String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INTERNAL
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    match cmd {
        Command::Check { file } => {
            let Some(report) = load(&file, err)? else {
                return Ok(EXIT_USAGE);
            };
            for d in &report.diagnostics {
                writeln!(out, "{d}")?;
            }
            if report.ok() {
                writeln!(out, "ok: {} declarations", report.checked.len())?;
                Ok(EXIT_OK)
            } else {
                Ok(EXIT_CHECK)
            }
        }
        Command::Run {
            file,
            main,
            seed,
            max_steps,
            json,
        } => {
            let Some(report) = load_checked(&file, out, err)? else {
                return Ok(EXIT_CHECK);
            };
            let Some(d) = find(&report, &main, err)? else {
                return Ok(EXIT_USAGE);
            };
            let Some((p, root)) = closed_process(d) else {
                writeln!(err, "error: {main} is not a closed process (expected a declaration of type {{ |- c:A }})")?;
                return Ok(EXIT_USAGE);
            };
            let r = run(&p, &root, seed, max_steps);
            for e in &r.trace {
                if json {
                    writeln!(
                        out,
                        "{}",
                        serde_json::to_string(e).expect("trace entries serialize")
                    )?;
                } else {
                    writeln!(out, "{e}")?;
                }
            }
            let stuck = r.stuck();
            let summary = serde_json::json!({
                "outcome": r.outcome,
                "steps": r.trace.len(),
                "stuck": stuck.len(),
                "final": r.final_process().pretty(),
            });
            if json {
                writeln!(out, "{summary}")?;
            } else {
                let what = match r.outcome {
                    Outcome::Quiescent => "quiescent",
                    Outcome::StepLimit => "step limit reached",
                };
                writeln!(out, "{what} after {} steps", r.trace.len())?;
                writeln!(out, "final: {}", r.final_process().pretty())?;
            }
            if !stuck.is_empty() {
                writeln!(
                    err,
                    "internal error: {} live threads are blocked",
                    stuck.len()
                )?;
                return Ok(EXIT_INTERNAL);
            }
            Ok(EXIT_OK)
        }
        Command::Eq {
            file,
            lhs,
            rhs,
            fuel,
        } => {
            let Some(report) = load_checked(&file, out, err)? else {
                return Ok(EXIT_CHECK);
            };
            let Some(l) = find(&report, &lhs, err)? else {
                return Ok(EXIT_USAGE);
            };
            let Some(r) = find(&report, &rhs, err)? else {
                return Ok(EXIT_USAGE);
            };
            let budget = fuel.unwrap_or_else(default_fuel);
            match compare(l, r, &mut Fuel::new(budget)) {
                Some(v) => {
                    writeln!(out, "{v}")?;
                    writeln!(out, "fuel: {budget}")?;
                    Ok(EXIT_OK)
                }
                None => {
                    writeln!(
                        err,
                        "error: {lhs} and {rhs} are not declarations of the same sort and type"
                    )?;
                    Ok(EXIT_USAGE)
                }
            }
        }
        Command::Embed { file, def } => {
            let Some(report) = load_checked(&file, out, err)? else {
                return Ok(EXIT_CHECK);
            };
            let Some(d) = find(&report, &def, err)? else {
                return Ok(EXIT_USAGE);
            };
            match embed_decl(d) {
                Ok(e) => {
                    writeln!(out, "{}", e.pretty())?;
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    writeln!(
                        out,
                        "error {}:{}:{} embed {e}",
                        file.display(),
                        d.pos.line,
                        d.pos.col
                    )?;
                    Ok(EXIT_CHECK)
                }
            }
        }
        Command::TestMeta {
            suite,
            iters,
            seed,
            json,
        } => {
            let report = run_suite(suite, iters, seed);
            if json {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string(&report).expect("reports serialize")
                )?;
            } else {
                write!(out, "{report}")?;
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string(&report).expect("reports serialize")
                )?;
            }
            Ok(if report.failed == 0 {
                EXIT_OK
            } else {
                EXIT_CHECK
            })
        }
    }
}

fn load(file: &PathBuf, err: &mut dyn Write) -> std::io::Result<Option<Report>> {
    match std::fs::read_to_string(file) {
        Ok(src) => Ok(Some(check_file(&src, &file.display().to_string()))),
        Err(e) => {
            writeln!(err, "error: cannot read {}: {e}", file.display())?;
            Ok(None)
        }
    }
}

/// Loads a file that must check; prints its diagnostics otherwise.
fn load_checked(
    file: &PathBuf,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<Option<Report>> {
    let Some(report) = load(file, err)? else {
        return Ok(None);
    };
    if !report.ok() {
        for d in &report.diagnostics {
            writeln!(out, "{d}")?;
        }
        return Ok(None);
    }
    for d in report
        .diagnostics
        .iter()
        .filter(|d: &&Diagnostic| d.severity != Severity::Error)
    {
        writeln!(out, "{d}")?;
    }
    Ok(Some(report))
}

fn find<'r>(
    report: &'r Report,
    name: &str,
    err: &mut dyn Write,
) -> std::io::Result<Option<&'r Decl>> {
    let d = report.get(name);
    if d.is_none() {
        writeln!(err, "error: no declaration named {name}")?;
    }
    Ok(d)
}

/// The process a declaration runs as, with the channel it offers.
pub fn closed_process(d: &Decl) -> Option<(Process, Name)> {
    match &d.body {
        DeclBody::Proc { ty, body } if ty.shared.is_empty() && ty.linear.is_empty() => {
            Some((body.clone(), ty.offered.clone()))
        }
        DeclBody::Term {
            ty: FunType::Monad(mt),
            term,
        } if mt.shared.is_empty() && mt.linear.is_empty() => {
            let mut avoid = crate::syntax::FreeNames::free_names(term);
            avoid.insert(mt.offered.clone());
            let x = fresh_name("x", &avoid);
            Some((
                spawn(&x, term.clone(), fwd(&x, &mt.offered)),
                mt.offered.clone(),
            ))
        }
        _ => None,
    }
}

fn compare(l: &Decl, r: &Decl, fuel: &mut Fuel) -> Option<Verdict> {
    let psi = Psi::new();
    match (&l.body, &r.body) {
        (DeclBody::Term { ty: t1, term: m }, DeclBody::Term { ty: t2, term: n }) => {
            if fun_eq_fuel(&psi, t1, t2, &mut Fuel::default()) != Verdict::Yes {
                return None;
            }
            Some(term_eq_fuel(&psi, m, n, fuel))
        }
        (DeclBody::Proc { ty: t1, body: p }, DeclBody::Proc { ty: t2, body: q }) => {
            if fun_eq_fuel(
                &psi,
                &FunType::Monad(t1.clone()),
                &FunType::Monad(t2.clone()),
                &mut Fuel::default(),
            ) != Verdict::Yes
            {
                return None;
            }
            // line up the channel names of the right-hand side with the left
            let mut pairs: Vec<(Name, Name)> = vec![(t2.offered.clone(), t1.offered.clone())];
            for ((a, _), (b, _)) in t2
                .shared
                .iter()
                .zip(&t1.shared)
                .chain(t2.linear.iter().zip(&t1.linear))
            {
                pairs.push((a.clone(), b.clone()));
            }
            let q = crate::subst::rename_simultaneous(q, &pairs);
            Some(proc_eq_with(p, &q, &t1.offered, fuel))
        }
        (DeclBody::Type { kind: k1, body: b1 }, DeclBody::Type { kind: k2, body: b2 }) => {
            if kind_eq_fuel(&psi, k1, k2, &mut Fuel::default()) != Verdict::Yes {
                return None;
            }
            match (b1, b2) {
                (TypeBody::Fun(a), TypeBody::Fun(b)) => Some(fun_eq_fuel(&psi, a, b, fuel)),
                (TypeBody::Sess(a), TypeBody::Sess(b)) => Some(sess_eq_fuel(&psi, a, b, fuel)),
                _ => None,
            }
        }
        _ => None,
    }
}
