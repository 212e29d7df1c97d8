//! `pbv` — command-line front-end for the pomset-bv library.
//!
//! Exit codes: 0 = positive answer / success, 1 = negative answer
//! (unprovable / incorrect / unsat), 2 = usage or input error, 3 = budget
//! exceeded.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use pomset_bv::bv::{
    check_derivation, derive, premises_of, prove, separation_formula,
    Derivation, System,
};
use pomset_bv::dicograph::{dicograph_violation, tograph, tograph_sequent, Digraph};
use pomset_bv::formula::{
    formula_to_sequent, parse_formula, parse_sequent, Formula, Sequent,
};
use pomset_bv::rbnet::{
    cographic_prenet, first_ae_cycle_brute, is_correct, pomset_prove, tree_prenet, unique_linking,
    Linking, Mode, RBDigraph,
};
use pomset_bv::reductions::{
    brute_qbf, brute_sat, proofification, qbf_to_sequent, sat_to_rb, sat_to_sequent, CnfInstance,
};
use pomset_bv::sequent::{
    check_retore, check_slavnov, search_cutfree, tiu_formula, translate_bvu_proof, SequentProof,
};
use pomset_bv::{Budget, BudgetExceeded};

#[derive(Parser)]
#[command(name = "pbv", version, about = "Proof tools for system BV and pomset logic")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Cographic,
    Tree,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Cographic => Mode::Cographic,
            ModeArg::Tree => Mode::Tree,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Bv,
    Bvu,
    Bvhatu,
    #[value(name = "sbvu-noninteraction")]
    SbvuNoninteraction,
    Ws,
}

impl From<SystemArg> for System {
    fn from(s: SystemArg) -> System {
        match s {
            SystemArg::Bv => System::Bv,
            SystemArg::Bvu => System::Bvu,
            SystemArg::Bvhatu => System::Bvhatu,
            SystemArg::SbvuNoninteraction => System::SbvuNonInteraction,
            SystemArg::Ws => System::Ws,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a formula or sequent and print its canonical form.
    Parse {
        /// Formula or sequent text, or `-` for stdin.
        input: String,
        #[arg(long)]
        json: bool,
    },
    /// Translate a formula to its labeled relation graph.
    Graph {
        input: String,
        #[arg(long)]
        json: bool,
        /// Write a DOT rendering to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check whether a graph (JSON, or a formula to translate) is a dicograph.
    DicographCheck {
        input: String,
        #[arg(long)]
        json: bool,
    },
    /// Build the RB-prenet of a balanced sequent.
    Prenet {
        input: String,
        #[arg(long, value_enum, default_value = "cographic")]
        mode: ModeArg,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check correctness of the prenet of a balanced sequent.
    NetCheck {
        input: String,
        #[arg(long, value_enum, default_value = "cographic")]
        mode: ModeArg,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Search for a deep-inference proof, or verify a certificate.
    Prove {
        /// Formula to prove (omit when using --check).
        input: Option<String>,
        #[arg(long, value_enum, default_value = "bv")]
        system: SystemArg,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
        /// Verify an existing certificate file instead of searching.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Decide pomset-logic provability of a sequent by linking enumeration.
    PomsetProve {
        input: String,
        #[arg(long, value_enum, default_value = "cographic")]
        mode: ModeArg,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Search for a derivation from a premise to a conclusion.
    Derive {
        premise: String,
        conclusion: String,
        #[arg(long, value_enum, default_value = "bv")]
        system: SystemArg,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Complexity reductions between CNFs, RB-digraphs, and sequents.
    Reduce {
        #[command(subcommand)]
        cmd: ReduceCmd,
    },
    /// Brute-force reference oracles.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Sequent-calculus proof checking, search, and translation.
    Sequent {
        #[command(subcommand)]
        cmd: SequentCmd,
    },
    /// Print the n-th relay formula of the R-family.
    Tiu {
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Replay the pomset/BV separation on the counterexample formula Q.
    Counterexample {
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// CNF satisfiability to æ-cycle existence in an RB-digraph.
    Sat2rb {
        /// DIMACS file, or `-` for stdin.
        cnf: String,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// RB-digraph (JSON) to a sequent via proofification.
    Rb2seq { graph: String },
    /// CNF satisfiability to pomset-logic unprovability of a sequent.
    Sat2seq { cnf: String },
    /// Closed 2QBF truth to pomset-logic unprovability of a sequent.
    Qbf2seq { cnf: String },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Brute-force CNF satisfiability.
    Sat { cnf: String },
    /// Brute-force closed ∀∃-QBF truth.
    Qbf { cnf: String },
    /// Brute-force æ-cycle existence in an RB-digraph (JSON).
    Aecycle { graph: String },
}

#[derive(Subcommand)]
enum SequentCmd {
    /// Check a sequent-calculus proof file.
    Check {
        proof: String,
        /// Reject proofs that use the cut rule.
        #[arg(long)]
        cut_free: bool,
    },
    /// Definitive cut-free proof search for a sequent.
    Search {
        input: String,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Translate a unit-free deep-inference certificate into a proof with cuts.
    Translate { cert: String },
    /// Check a first-level (Slavnov) pre-proof and print its linking.
    SlavnovCheck {
        proof: String,
        #[arg(long)]
        budget: Option<u64>,
    },
}

/// A recoverable command failure, mapped onto the documented exit codes.
enum Failure {
    /// Bad input or usage.
    Input(String),
    /// The step budget ran out before an answer was reached.
    Budget,
}

impl From<BudgetExceeded> for Failure {
    fn from(_: BudgetExceeded) -> Failure {
        Failure::Budget
    }
}

type Outcome = Result<i32, Failure>;

fn input_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

/// Resolve a positional argument: `-` reads stdin, a readable path reads the
/// file, anything else is taken literally.
fn read_arg(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(input_err)?;
        return Ok(buf);
    }
    if fs::metadata(arg).map(|m| m.is_file()).unwrap_or(false) {
        return fs::read_to_string(arg).map_err(input_err);
    }
    Ok(arg.to_string())
}

/// Resolve an argument that must name a file (or `-` for stdin).
fn read_file_arg(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(input_err)?;
        return Ok(buf);
    }
    fs::read_to_string(arg).map_err(|e| input_err(format!("{arg}: {e}")))
}

fn budget_of(steps: Option<u64>) -> Budget {
    match steps {
        Some(n) => Budget::new(n),
        None => Budget::unlimited(),
    }
}

fn parse_formula_arg(text: &str) -> Result<Formula, Failure> {
    parse_formula(text.trim()).map_err(input_err)
}

fn parse_sequent_arg(text: &str) -> Result<Sequent, Failure> {
    parse_sequent(text.trim()).map_err(input_err)
}

fn parse_cnf_arg(arg: &str) -> Result<CnfInstance, Failure> {
    CnfInstance::parse_dimacs(&read_file_arg(arg)?).map_err(Failure::Input)
}

/// Read an RB-digraph in the JSON shape emitted by `reduce sat2rb`.
fn parse_rb_json(text: &str) -> Result<RBDigraph, Failure> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(input_err)?;
    let n = v["vertices"]
        .as_array()
        .ok_or_else(|| Failure::Input("missing \"vertices\" array".into()))?
        .len();
    let edge_list = |key: &str| -> Result<Vec<(usize, usize)>, Failure> {
        v[key]
            .as_array()
            .ok_or_else(|| Failure::Input(format!("missing \"{key}\" array")))?
            .iter()
            .map(|e| {
                let pair = e.as_array().filter(|p| p.len() == 2);
                let u = pair.and_then(|p| p[0].as_u64());
                let w = pair.and_then(|p| p[1].as_u64());
                match (u, w) {
                    (Some(u), Some(w)) if (u as usize) < n && (w as usize) < n => {
                        Ok((u as usize, w as usize))
                    }
                    _ => Err(Failure::Input(format!("bad edge in \"{key}\": {e}"))),
                }
            })
            .collect()
    };
    let mut r = Digraph::new(n);
    for (u, w) in edge_list("r_edges")? {
        r.add_edge(u, w);
    }
    RBDigraph::new(r, &edge_list("b_edges")?).map_err(input_err)
}

fn linking_json(l: &Linking) -> serde_json::Value {
    json!(l.0.iter().map(|&(u, v)| json!([u, v])).collect::<Vec<_>>())
}

fn sequent_linking(s: &Sequent) -> Result<Linking, Failure> {
    unique_linking(s).ok_or_else(|| {
        Failure::Input("sequent is not balanced: no unique axiom linking".into())
    })
}

fn write_dot(path: &PathBuf, dot: &str) -> Result<(), Failure> {
    fs::write(path, dot).map_err(input_err)?;
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.cmd {
        Cmd::Parse { input, json } => cmd_parse(&read_arg(&input)?, json),
        Cmd::Graph { input, json, dot } => cmd_graph(&read_arg(&input)?, json, dot),
        Cmd::DicographCheck { input, json } => cmd_dicograph_check(&read_arg(&input)?, json),
        Cmd::Prenet { input, mode, json, dot } => {
            cmd_prenet(&read_arg(&input)?, mode.into(), json, dot)
        }
        Cmd::NetCheck { input, mode, budget, json } => {
            cmd_net_check(&read_arg(&input)?, mode.into(), budget, json)
        }
        Cmd::Prove { input, system, budget, json, check } => {
            cmd_prove(input, system.into(), budget, json, check)
        }
        Cmd::PomsetProve { input, mode, budget, json } => {
            cmd_pomset_prove(&read_arg(&input)?, mode.into(), budget, json)
        }
        Cmd::Derive { premise, conclusion, system, budget, json } => cmd_derive(
            &read_arg(&premise)?,
            &read_arg(&conclusion)?,
            system.into(),
            budget,
            json,
        ),
        Cmd::Reduce { cmd } => match cmd {
            ReduceCmd::Sat2rb { cnf, dot } => {
                let g = sat_to_rb(&parse_cnf_arg(&cnf)?).map_err(Failure::Input)?;
                if let Some(path) = dot {
                    write_dot(&path, &g.to_dot(None))?;
                }
                println!("{}", g.to_json(None));
                Ok(0)
            }
            ReduceCmd::Rb2seq { graph } => {
                let g = parse_rb_json(&read_file_arg(&graph)?)?;
                println!("{}", proofification(&g));
                Ok(0)
            }
            ReduceCmd::Sat2seq { cnf } => {
                let s = sat_to_sequent(&parse_cnf_arg(&cnf)?).map_err(Failure::Input)?;
                println!("{s}");
                Ok(0)
            }
            ReduceCmd::Qbf2seq { cnf } => {
                let s = qbf_to_sequent(&parse_cnf_arg(&cnf)?).map_err(Failure::Input)?;
                println!("{s}");
                Ok(0)
            }
        },
        Cmd::Oracle { cmd } => match cmd {
            OracleCmd::Sat { cnf } => {
                let sat = brute_sat(&parse_cnf_arg(&cnf)?);
                println!("{}", if sat { "sat" } else { "unsat" });
                Ok(if sat { 0 } else { 1 })
            }
            OracleCmd::Qbf { cnf } => {
                let t = brute_qbf(&parse_cnf_arg(&cnf)?);
                println!("{}", if t { "true" } else { "false" });
                Ok(if t { 0 } else { 1 })
            }
            OracleCmd::Aecycle { graph } => {
                let g = parse_rb_json(&read_file_arg(&graph)?)?;
                match first_ae_cycle_brute(&g) {
                    Some(c) => {
                        println!("ae-cycle: {:?}", c.0);
                        Ok(0)
                    }
                    None => {
                        println!("no ae-cycle");
                        Ok(1)
                    }
                }
            }
        },
        Cmd::Sequent { cmd } => match cmd {
            SequentCmd::Check { proof, cut_free } => {
                let p = SequentProof::parse(&read_file_arg(&proof)?).map_err(Failure::Input)?;
                match check_retore(&p, !cut_free) {
                    Ok(()) => {
                        println!("proof of {}", p.conclusion);
                        Ok(0)
                    }
                    Err(e) => {
                        println!("invalid: {e}");
                        Ok(1)
                    }
                }
            }
            SequentCmd::Search { input, budget } => {
                let s = parse_sequent_arg(&read_arg(&input)?)?;
                match search_cutfree(&s, &mut budget_of(budget))? {
                    Some(p) => {
                        print!("{p}");
                        Ok(0)
                    }
                    None => {
                        println!("no cut-free proof");
                        Ok(1)
                    }
                }
            }
            SequentCmd::Translate { cert } => {
                let d = Derivation::parse(&read_file_arg(&cert)?).map_err(Failure::Input)?;
                let p = translate_bvu_proof(&d).map_err(Failure::Input)?;
                print!("{p}");
                Ok(0)
            }
            SequentCmd::SlavnovCheck { proof, budget } => {
                let p = SequentProof::parse(&read_file_arg(&proof)?).map_err(Failure::Input)?;
                match check_slavnov(&p, &mut budget_of(budget))? {
                    Ok(l) => {
                        println!("linking: {}", linking_json(&l));
                        Ok(0)
                    }
                    Err(e) => {
                        println!("invalid: {e}");
                        Ok(1)
                    }
                }
            }
        },
        Cmd::Tiu { n, json } => {
            let f = tiu_formula(n);
            if json {
                println!("{}", json!({ "n": n, "formula": f.to_string(), "size": f.size() }));
            } else {
                println!("{f}");
            }
            Ok(0)
        }
        Cmd::Counterexample { budget, json } => cmd_counterexample(budget, json),
    }
}

fn cmd_parse(text: &str, json: bool) -> Outcome {
    // try the formula grammar first, then the sequent grammar
    let (kind, canonical, size) = match parse_formula(text.trim()) {
        Ok(f) => ("formula", f.canonicalize().to_string(), f.size()),
        Err(fe) => match parse_sequent(text.trim()) {
            Ok(s) => ("sequent", s.to_string(), s.atoms().len()),
            Err(_) => return Err(input_err(fe)),
        },
    };
    if json {
        println!("{}", json!({ "kind": kind, "canonical": canonical, "size": size }));
    } else {
        println!("{canonical}");
    }
    Ok(0)
}

fn cmd_graph(text: &str, json: bool, dot: Option<PathBuf>) -> Outcome {
    let f = parse_formula_arg(text)?;
    let g = tograph(&f);
    if let Some(path) = dot {
        write_dot(&path, &g.to_dot())?;
    }
    if json {
        println!("{}", g.to_json());
    } else {
        for (i, a) in g.labels.iter().enumerate() {
            println!("v{i}: {a}");
        }
        for (u, v) in g.graph.edges() {
            println!("v{u} -> v{v}");
        }
    }
    Ok(0)
}

fn cmd_dicograph_check(text: &str, json: bool) -> Outcome {
    // accept either a labeled graph in JSON form or a formula to translate
    let g = if text.trim_start().starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(text).map_err(input_err)?;
        let n = v["vertices"]
            .as_array()
            .ok_or_else(|| Failure::Input("missing \"vertices\" array".into()))?
            .len();
        let mut g = Digraph::new(n);
        for e in v["edges"]
            .as_array()
            .ok_or_else(|| Failure::Input("missing \"edges\" array".into()))?
        {
            let (u, w) = (e[0].as_u64(), e[1].as_u64());
            match (u, w) {
                (Some(u), Some(w)) if (u as usize) < n && (w as usize) < n => {
                    g.add_edge(u as usize, w as usize)
                }
                _ => return Err(Failure::Input(format!("bad edge: {e}"))),
            }
        }
        g
    } else {
        tograph(&parse_formula_arg(text)?).graph
    };
    match dicograph_violation(&g) {
        None => {
            if json {
                println!("{}", json!({ "dicograph": true }));
            } else {
                println!("dicograph");
            }
            Ok(0)
        }
        Some(v) => {
            if json {
                println!("{}", json!({ "dicograph": false, "violation": format!("{v:?}") }));
            } else {
                println!("not a dicograph: {v:?}");
            }
            Ok(1)
        }
    }
}

fn cmd_prenet(text: &str, mode: Mode, json: bool, dot: Option<PathBuf>) -> Outcome {
    let s = parse_sequent_arg(text)?;
    let l = sequent_linking(&s)?;
    let (net, labels) = match mode {
        Mode::Cographic => (cographic_prenet(&s, &l), Some(tograph_sequent(&s).labels)),
        Mode::Tree => (tree_prenet(&s, &l).0, None),
    };
    if let Some(path) = dot {
        write_dot(&path, &net.to_dot(labels.as_deref()))?;
    }
    println!("{}", net.to_json(labels.as_deref()));
    let _ = json; // the prenet is always emitted as JSON
    Ok(0)
}

fn cmd_net_check(text: &str, mode: Mode, budget: Option<u64>, json: bool) -> Outcome {
    let s = parse_sequent_arg(text)?;
    let l = sequent_linking(&s)?;
    let ok = is_correct(&s, &l, mode, &mut budget_of(budget))?;
    if json {
        println!("{}", json!({ "correct": ok }));
    } else {
        println!("{}", if ok { "correct" } else { "incorrect" });
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_prove(
    input: Option<String>,
    system: System,
    budget: Option<u64>,
    json: bool,
    check: Option<PathBuf>,
) -> Outcome {
    if let Some(path) = check {
        if input.is_some() {
            return Err(Failure::Input("--check takes no formula argument".into()));
        }
        let text = fs::read_to_string(&path).map_err(input_err)?;
        let d = Derivation::parse(&text).map_err(Failure::Input)?;
        return match check_derivation(&d, system) {
            Ok(()) => {
                println!("valid proof of {}", d.conclusion());
                Ok(0)
            }
            Err(e) => {
                println!("invalid: {e}");
                Ok(1)
            }
        };
    }
    let input = input.ok_or_else(|| Failure::Input("missing formula argument".into()))?;
    let f = parse_formula_arg(&read_arg(&input)?)?;
    match prove(&f, system, &mut budget_of(budget))? {
        Some(d) => {
            if json {
                println!(
                    "{}",
                    json!({ "provable": true, "steps": d.step_count(), "certificate": d.to_string() })
                );
            } else {
                print!("{d}");
            }
            Ok(0)
        }
        None => {
            if json {
                println!("{}", json!({ "provable": false }));
            } else {
                println!("unprovable");
            }
            Ok(1)
        }
    }
}

fn cmd_pomset_prove(text: &str, mode: Mode, budget: Option<u64>, json: bool) -> Outcome {
    let s = parse_sequent_arg(text)?;
    match pomset_prove(&s, mode, &mut budget_of(budget))? {
        Some(l) => {
            if json {
                println!("{}", json!({ "provable": true, "linking": linking_json(&l) }));
            } else {
                println!("provable, linking: {}", linking_json(&l));
            }
            Ok(0)
        }
        None => {
            if json {
                println!("{}", json!({ "provable": false }));
            } else {
                println!("unprovable");
            }
            Ok(1)
        }
    }
}

fn cmd_derive(
    premise: &str,
    conclusion: &str,
    system: System,
    budget: Option<u64>,
    json: bool,
) -> Outcome {
    let a = parse_formula_arg(premise)?;
    let b = parse_formula_arg(conclusion)?;
    match derive(&a, &b, system, &mut budget_of(budget))? {
        Some(d) => {
            if json {
                println!(
                    "{}",
                    json!({ "derivable": true, "steps": d.step_count(), "certificate": d.to_string() })
                );
            } else {
                print!("{d}");
            }
            Ok(0)
        }
        None => {
            if json {
                println!("{}", json!({ "derivable": false }));
            } else {
                println!("not derivable");
            }
            Ok(1)
        }
    }
}

fn cmd_counterexample(budget: Option<u64>, json: bool) -> Outcome {
    let q = separation_formula();
    let mut budget = budget_of(budget);
    let s = formula_to_sequent(&q);
    let l = sequent_linking(&s)?;
    let pomset = is_correct(&s, &l, Mode::Cographic, &mut budget)?;

    // Refute BV-provability: every one-step premise in the hatted unit-free
    // system (complete for BV) already has an æ-cycle in its prenet, so no
    // proof can end with the formula.
    let apps = premises_of(&System::Bvhatu.rules(), &q.canonicalize_prime(), &mut budget)?;
    let mut refuted = 0usize;
    for app in &apps {
        let p = match &app.other {
            Some(p) => p,
            None => continue,
        };
        let ps = formula_to_sequent(p);
        let pl = sequent_linking(&ps)?;
        let net = cographic_prenet(&ps, &pl);
        if net.find_chordless_ae_cycle(&mut budget)?.is_none() {
            if json {
                println!(
                    "{}",
                    json!({ "pomset_provable": pomset, "bv_unprovable": false,
                            "correct_premise": p.to_string() })
                );
            } else {
                println!("unexpected correct premise: {p}");
            }
            return Ok(1);
        }
        refuted += 1;
    }
    let separated = pomset && refuted == apps.len() && refuted > 0;
    if json {
        println!(
            "{}",
            json!({ "formula": q.to_string(), "pomset_provable": pomset,
                    "bv_unprovable": separated, "premises_refuted": refuted })
        );
    } else {
        println!(
            "pomset: {}; BV: {}",
            if pomset { "provable" } else { "unprovable" },
            if separated { "unprovable" } else { "undetermined" }
        );
    }
    Ok(if separated { 0 } else { 1 })
}

fn main() -> ExitCode {
    // die quietly when the read end of a pipe goes away (e.g. `pbv ... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget) => {
            eprintln!("budget exceeded");
            ExitCode::from(3)
        }
    }
}
