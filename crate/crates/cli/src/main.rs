//! Command-line front end for the `pnrp2-core` computations.

mod render;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use pnrp2_core::enumerate::{abelianization, todd_coxeter, Enumeration};
use pnrp2_core::klgroup::{self, Sign};
use pnrp2_core::obstruction::{self, Mode, Verdict, MAX_N_FULL, MAX_N_PAPER_SUBSET};
use pnrp2_core::presentation::{build_pn_rp2, export_presentation, supplementary_relations};
use pnrp2_core::rewrite::{prove_identity, rules_from_presentation, ProofOutcome, SearchLimits};
use pnrp2_core::words::{parse_word, Generator, Word};

#[derive(Parser)]
#[command(name = "pnrp2", version, about = "Pure braid groups of the projective plane")]
struct Cli {
    /// Output format of reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    PaperSubset,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Full => Mode::Full,
            ModeArg::PaperSubset => Mode::PaperSubset,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the presentation of P_n(RP^2).
    Present {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=64))]
        n: u32,
    },
    /// Invariant factors of the abelianization.
    Abelianize {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16))]
        n: u32,
    },
    /// Todd-Coxeter coset enumeration over the trivial subgroup.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16))]
        n: u32,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..=50_000_000))]
        max_cosets: u64,
    },
    /// Normal form in P_(n+1)(RP^2)/L of a word with trivial image in P_n(RP^2).
    NormalForm {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=64))]
        n: u32,
        #[arg(long)]
        word: String,
    },
    /// Conjugation action of a generator of P_n(RP^2) on an element of the quotient.
    Act {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=64))]
        n: u32,
        /// Acting generator, e.g. `rho[2]` or `B[1,3]`.
        #[arg(long)]
        gen: String,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true, value_parser = parse_sign)]
        sign: i64,
        #[arg(long)]
        word: String,
    },
    /// Check the implied quotient relations and the Klein-bottle images.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..=32))]
        n: u32,
    },
    /// Search for a rewriting proof that two words are equal in P_n(RP^2).
    Prove {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=8))]
        n: u32,
        #[arg(long, required_unless_present = "supplementary", requires = "rhs")]
        lhs: Option<String>,
        #[arg(long, requires = "lhs")]
        rhs: Option<String>,
        /// Prove every supplementary identity instead.
        #[arg(long, conflicts_with_all = ["lhs", "rhs"])]
        supplementary: bool,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..=64))]
        max_depth: u64,
        #[arg(long, default_value_t = 200_000, value_parser = clap::value_parser!(u64).range(1..=100_000_000))]
        max_frontier: u64,
    },
    /// Decide whether P_(n+1)(RP^2)/L -> P_n(RP^2) admits a section.
    /// Exit code 10 means a section exists, 20 that none does, 0 no verdict.
    Obstruct {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=MAX_N_PAPER_SUBSET as i64))]
        n: u32,
        /// Number of added strands; m >= 2 is reduced to m = 1.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        /// Write the full report (branches, certificates, witnesses) here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn parse_sign(s: &str) -> Result<i64, String> {
    match s {
        "1" | "+1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        _ => Err(format!("sign must be +1 or -1, got `{s}`")),
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn domain(e: impl std::fmt::Display) -> Self {
        CliError::Domain(e.to_string())
    }

    fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn emit(format: Format, text: String, value: serde_json::Value) -> String {
    match format {
        Format::Text => text,
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&value).expect("json values serialize")),
    }
}

fn parse_in(text: &str, n: u32) -> Result<Word, CliError> {
    parse_word(text, n).map_err(CliError::usage)
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let format = cli.format;
    match cli.command {
        Command::Present { n } => {
            let p = build_pn_rp2(n).map_err(CliError::domain)?;
            Ok(Output::ok(emit(format, export_presentation(&p), render::presentation(&p))))
        }
        Command::Abelianize { n } => {
            let p = build_pn_rp2(n).map_err(CliError::domain)?;
            let factors = abelianization(&p);
            let listed: Vec<String> = factors.iter().map(|f| f.to_string()).collect();
            let group = if factors.is_empty() {
                "0".to_string()
            } else {
                factors
                    .iter()
                    .map(|f| if f.bits() == 0 { "Z".to_string() } else { format!("Z_{f}") })
                    .collect::<Vec<_>>()
                    .join(" x ")
            };
            let text = format!("invariant factors: {}\nH_1 = {group}\n", listed.join(" "));
            Ok(Output::ok(emit(format, text, json!({ "n": n, "invariant_factors": listed, "group": group }))))
        }
        Command::Enumerate { n, max_cosets } => {
            let p = build_pn_rp2(n).map_err(CliError::domain)?;
            let result = todd_coxeter(&p, max_cosets as usize).map_err(CliError::domain)?;
            let (text, value) = match &result {
                Enumeration::Complete(g) => {
                    let census = g.order_census();
                    let listed: Vec<String> = census.iter().map(|(o, c)| format!("{o}:{c}")).collect();
                    (
                        format!("order: {}\nelement orders: {}\n", g.order(), listed.join(" ")),
                        json!({ "n": n, "order": g.order(), "element_orders": census }),
                    )
                }
                Enumeration::Overflow { max_cosets, defined } => (
                    format!("OVERFLOW (more than {max_cosets} cosets, {defined} defined)\n"),
                    json!({ "n": n, "order": null, "overflow": true, "max_cosets": max_cosets, "defined": defined }),
                ),
            };
            Ok(Output::ok(emit(format, text, value)))
        }
        Command::NormalForm { n, word } => {
            let w = parse_in(&word, n)?;
            let x = klgroup::eval_in_quotient(&w).map_err(CliError::domain)?;
            Ok(Output::ok(emit(format, render::kl_text(&x), render::kl(&x))))
        }
        Command::Act { n, gen, sign, word } => {
            let g = parse_in(&gen, n)?;
            let gen = match g.letters() {
                [l] if l.exp == 1 => l.gen,
                _ => return Err(CliError::Usage(format!("`{gen}` is not a single generator"))),
            };
            let base = match gen {
                Generator::B(i, j) => i < j && j <= n,
                Generator::Rho(k) => k <= n,
                Generator::A(_) => false,
            };
            if !base {
                return Err(CliError::Usage(format!("{gen} is not a generator of P_{n}(RP^2)")));
            }
            let x = klgroup::eval_in_quotient(&parse_in(&word, n)?).map_err(CliError::domain)?;
            let y = klgroup::act(gen, Sign::of(sign), &x).map_err(CliError::domain)?;
            Ok(Output::ok(emit(format, render::kl_text(&y), render::kl(&y))))
        }
        Command::Verify { n } => {
            let mut report = klgroup::verify_quotient_relations(n).map_err(CliError::domain)?;
            for i in 1..n {
                report.extend(klgroup::verify_prop_klein_images(i, n).map_err(CliError::domain)?);
            }
            let code = if report.all_pass() { 0 } else { 1 };
            let value = json!({
                "n": n,
                "all_pass": report.all_pass(),
                "checks": report.checks.iter().map(|c| json!({ "id": c.id, "pass": c.pass, "lhs": c.lhs, "rhs": c.rhs })).collect::<Vec<_>>(),
            });
            Ok(Output { text: emit(format, report.to_string(), value), code })
        }
        Command::Prove { n, lhs, rhs, supplementary, max_depth, max_frontier } => {
            let p = build_pn_rp2(n).map_err(CliError::domain)?;
            let rules = rules_from_presentation(&p);
            let limits = SearchLimits { max_depth: max_depth as usize, max_frontier: max_frontier as usize };
            let targets: Vec<(String, Word, Word)> = if supplementary {
                if n < 2 {
                    return Err(CliError::Usage("supplementary identities need n >= 2".to_string()));
                }
                supplementary_relations(n).into_iter().map(|r| (r.id.to_string(), r.lhs, r.rhs)).collect()
            } else {
                let (l, r) = (lhs.expect("clap requires lhs"), rhs.expect("clap requires rhs"));
                vec![("goal".to_string(), parse_in(&l, n)?, parse_in(&r, n)?)]
            };
            let mut text = String::new();
            let mut results = Vec::new();
            let mut all_found = true;
            for (label, l, r) in targets {
                let outcome = prove_identity(&l, &r, &rules, limits).map_err(CliError::domain)?;
                all_found &= matches!(outcome, ProofOutcome::Found(_));
                text.push_str(&render::proof_text(&label, &outcome));
                results.push(render::proof(&label, &l, &r, &outcome));
            }
            let value = json!({ "n": n, "rules": rules.len(), "results": results });
            Ok(Output { text: emit(format, text, value), code: if all_found { 0 } else { 1 } })
        }
        Command::Obstruct { n, m, mode, report } => {
            let mode = Mode::from(mode);
            if mode == Mode::Full && n > MAX_N_FULL {
                return Err(CliError::Usage(format!(
                    "full mode accepts n <= {MAX_N_FULL}; use --mode paper-subset for larger n"
                )));
            }
            let mut r = obstruction::obstruct(n, mode).map_err(CliError::domain)?;
            if m >= 2 {
                let reduction = format!(
                    "m = {m}: a section of P_{}(RP^2) -> P_{n}(RP^2) would induce one of P_{}(RP^2) -> P_{n}(RP^2), so only non-existence carries over",
                    n + m,
                    n + 1
                );
                if r.verdict == Verdict::Sat {
                    r.verdict = Verdict::Undecided;
                }
                r.note = Some(reduction);
            }
            let code = match r.verdict {
                Verdict::Sat => 10,
                Verdict::Unsat => 20,
                Verdict::Undecided => 0,
            };
            let value = render::obstruction(&r, m);
            if let Some(path) = report {
                let full = match format {
                    Format::Text => render::obstruction_text(&r),
                    Format::Json => {
                        format!("{}\n", serde_json::to_string_pretty(&value).expect("json values serialize"))
                    }
                };
                fs::write(&path, full)
                    .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(Output { text: emit(format, r.to_string(), render::obstruction_summary(&r, m)), code })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Domain(_) => 1,
            })
        }
    }
}
