//! `ipapprox` command line: solve, cross-check, generate and validate instances.
//!
//! Exit codes: 0 solved within the bound, 1 usage or input error,
//! 2 near-feasibility unattainable, 3 infeasible, 4 resource limit,
//! 5 oracle cross-check failed.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use ipapprox::apps::{scheduling_to_config, solve_schedule};
use ipapprox::config::solve_nfold_config;
use ipapprox::general::solve_general;
use ipapprox::generate::{random_config, random_general, random_nfold, random_schedule, rng_from_seed};
use ipapprox::nfold::solve_nfold;
use ipapprox::oracle::{brute_force_config, brute_force_general, brute_force_nfold, OracleOptions, OracleResult};
use ipapprox::{ApproxParams, ApproxResult, Error, InstanceFile, Rat, Status};

const EXIT_USAGE: u8 = 1;
const EXIT_UNATTAINABLE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_LIMIT: u8 = 4;
const EXIT_ORACLE: u8 = 5;

#[derive(Parser)]
#[command(name = "ipapprox", version, about = "Near-feasible integer programming with exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pipeline {
    Auto,
    General,
    NfoldConfig,
    Nfold,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    General,
    NfoldConfig,
    Nfold,
    Schedule,
}

#[derive(Subcommand)]
enum Command {
    /// Run an approximation pipeline and print a JSON report.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "1/2")]
        epsilon: Rat,
        #[arg(long, value_enum, default_value = "auto")]
        pipeline: Pipeline,
        /// Compare against the brute-force optimum.
        #[arg(long)]
        oracle_check: bool,
        #[arg(long)]
        json_out: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        refine_limit: u32,
        #[arg(long, default_value_t = ipapprox::mip::DEFAULT_NODE_LIMIT)]
        node_limit: u64,
        /// Recorded in the report; the pipelines themselves are deterministic.
        #[arg(long)]
        seed: Option<u64>,
        /// Threads for the oracle enumeration.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Solve exactly by enumeration.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = ipapprox::oracle::DEFAULT_ORACLE_CAP)]
        cap: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Write a random feasible instance.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Rows (general) or machines (schedule).
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Columns (general) or jobs (schedule).
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        blocks: usize,
        /// Coupling rows.
        #[arg(long, default_value_t = 2)]
        s: usize,
        /// Local rows of nonnegative blocks; defaults to `--s`.
        #[arg(long)]
        s_a: Option<usize>,
        #[arg(long, default_value_t = 2)]
        t: usize,
        /// Largest absolute matrix entry (largest processing time for schedules).
        #[arg(long, default_value_t = 5)]
        delta_max: i64,
        /// Largest absolute variable bound.
        #[arg(long, default_value_t = 3)]
        bound_max: i64,
        /// Largest configuration entry.
        #[arg(long, default_value_t = 2)]
        kappa: i64,
        /// Most configurations per block.
        #[arg(long, default_value_t = 4)]
        configs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate an instance file.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn load(path: &PathBuf) -> Result<InstanceFile, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file = InstanceFile::from_json_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    file.validate().map_err(|issues| format!("{}: {}", path.display(), issues.join("; ")))?;
    Ok(file)
}

fn exit_for_error(e: &Error) -> u8 {
    match e {
        Error::NodeLimit(_) | Error::EnumerationCap { .. } | Error::RefinementExhausted(_) => EXIT_LIMIT,
        _ => EXIT_USAGE,
    }
}

fn exit_for_status(s: Status) -> u8 {
    match s {
        Status::Solved => 0,
        Status::NearFeasibilityUnattainable => EXIT_UNATTAINABLE,
        Status::Infeasible => EXIT_INFEASIBLE,
    }
}

fn exact(r: &Rat) -> Value {
    Value::String(r.to_string())
}

fn decimal(r: &Rat) -> Value {
    json!(r.to_f64())
}

fn report_json(res: &ApproxResult) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("status".into(), serde_json::to_value(res.status).expect("status"));
    let rep = res.report.as_ref();
    out.insert("objective".into(), rep.map_or(Value::Null, |r| exact(&r.objective)));
    out.insert(
        "residual".into(),
        rep.map_or(Value::Null, |r| Value::Array(r.residual.iter().map(exact).collect())),
    );
    out.insert("max_abs_residual".into(), rep.map_or(Value::Null, |r| exact(&r.max_abs_residual)));
    out.insert("bound".into(), rep.map_or(Value::Null, |r| exact(&r.bound)));
    out.insert("within_bound".into(), rep.map_or(Value::Null, |r| json!(r.within_bound)));
    out.insert("delta_used".into(), res.delta_used.as_ref().map_or(Value::Null, exact));
    out.insert("refinements".into(), json!(res.refinements));
    out.insert("solve_stats".into(), json!({"lp_pivots": res.stats.lp_pivots, "bb_nodes": res.stats.bb_nodes}));
    out.insert("solution".into(), json!(res.solution));
    out.insert("choices".into(), json!(res.choices));
    out.insert("original_infeasible".into(), json!(res.original_infeasible));
    if let Some(r) = rep {
        out.insert(
            "decimal".into(),
            json!({
                "objective": decimal(&r.objective),
                "residual": r.residual.iter().map(decimal).collect::<Vec<_>>(),
                "max_abs_residual": decimal(&r.max_abs_residual),
                "bound": decimal(&r.bound),
            }),
        );
    }
    out.insert("notes".into(), json!(res.notes));
    out
}

fn run_oracle(file: &InstanceFile, opts: &OracleOptions) -> ipapprox::Result<OracleResult> {
    match file {
        InstanceFile::General(g) => brute_force_general(g, opts),
        InstanceFile::NFoldConfig(c) => brute_force_config(c, opts),
        InstanceFile::NFoldNonneg(c) => brute_force_nfold(c, opts),
        InstanceFile::Schedule(s) => brute_force_config(&scheduling_to_config(s)?.0, opts),
    }
}

fn oracle_json(o: &OracleResult) -> Value {
    match o {
        OracleResult::Optimal { value, witness, choices } => json!({
            "status": "optimal",
            "value": exact(value),
            "value_decimal": decimal(value),
            "witness": witness,
            "choices": choices,
        }),
        OracleResult::Infeasible => json!({"status": "infeasible"}),
    }
}

fn emit(report: &Value, json_out: Option<&PathBuf>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    println!("{text}");
    if let Some(path) = json_out {
        fs::write(path, format!("{text}\n")).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn run(cmd: Command) -> Result<u8, String> {
    match cmd {
        Command::Solve { input, epsilon, pipeline, oracle_check, json_out, refine_limit, node_limit, seed, workers } => {
            let file = load(&input)?;
            let mut params = ApproxParams::new(epsilon.clone());
            params.refinement_limit = refine_limit;
            params.node_limit = node_limit;
            let wanted = match (&file, pipeline) {
                (_, Pipeline::Auto) => None,
                (InstanceFile::General(_), Pipeline::General)
                | (InstanceFile::NFoldConfig(_) | InstanceFile::Schedule(_), Pipeline::NfoldConfig)
                | (InstanceFile::NFoldNonneg(_), Pipeline::Nfold) => None,
                _ => Some(format!("pipeline does not accept instances of kind {}", file.kind())),
            };
            if let Some(msg) = wanted {
                return Err(msg);
            }
            let mut report = Map::new();
            report.insert("kind".into(), json!(file.kind()));
            report.insert("epsilon".into(), exact(&epsilon));
            if let Some(seed) = seed {
                report.insert("seed".into(), json!(seed));
            }
            let solved = match &file {
                InstanceFile::General(g) => solve_general(g, &params),
                InstanceFile::NFoldConfig(c) => solve_nfold_config(c, &params),
                InstanceFile::NFoldNonneg(c) => solve_nfold(c, &params),
                InstanceFile::Schedule(s) => solve_schedule(s, &params).map(|out| {
                    report.insert(
                        "schedule".into(),
                        json!({
                            "assignment": out.schedule.as_ref().map(|s| s.assignment.clone()),
                            "loads": out.schedule.as_ref().map(|s| s.loads.iter().map(exact).collect::<Vec<_>>()),
                            "makespan": out.schedule.as_ref().map(|s| exact(&s.makespan)),
                            "cost": out.schedule.as_ref().map(|s| exact(&s.cost)),
                            "makespan_bound": exact(&out.makespan_bound),
                            "within_makespan_bound": out.within_makespan_bound,
                            "within_budget": out.within_budget,
                        }),
                    );
                    out.result
                }),
            };
            let res = match solved {
                Ok(res) => res,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(exit_for_error(&e));
                }
            };
            report.extend(report_json(&res));
            let mut code = exit_for_status(res.status);
            if oracle_check {
                let opts = OracleOptions { workers, ..Default::default() };
                let oracle = match run_oracle(&file, &opts) {
                    Ok(o) => o,
                    Err(e) => {
                        eprintln!("error: oracle: {e}");
                        return Ok(exit_for_error(&e));
                    }
                };
                let mut failures = Vec::new();
                if let OracleResult::Optimal { value, .. } = &oracle {
                    match res.objective() {
                        Some(obj) if obj > value => {
                            failures.push(format!("objective {obj} exceeds the optimum {value}"));
                        }
                        Some(_) => {}
                        None => failures.push(format!("no solution returned although the optimum is {value}")),
                    }
                    if let Some(rep) = &res.report {
                        if !rep.within_bound {
                            failures.push(format!(
                                "violation {} exceeds the bound {}",
                                rep.max_abs_residual, rep.bound
                            ));
                        }
                    }
                }
                report.insert("oracle".into(), oracle_json(&oracle));
                report.insert("oracle_check".into(), json!(if failures.is_empty() { "pass" } else { "fail" }));
                if !failures.is_empty() {
                    for f in &failures {
                        eprintln!("oracle check failed: {f}");
                    }
                    code = EXIT_ORACLE;
                }
            }
            emit(&Value::Object(report), json_out.as_ref())?;
            Ok(code)
        }
        Command::Oracle { input, cap, workers } => {
            let file = load(&input)?;
            match run_oracle(&file, &OracleOptions { cap, workers }) {
                Ok(o) => {
                    emit(&oracle_json(&o), None)?;
                    Ok(if matches!(o, OracleResult::Infeasible) { EXIT_INFEASIBLE } else { 0 })
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(exit_for_error(&e))
                }
            }
        }
        Command::Gen { kind, m, n, blocks, s, s_a, t, delta_max, bound_max, kappa, configs, seed, out } => {
            let mut rng = rng_from_seed(seed);
            let file = match kind {
                Kind::General => InstanceFile::General(random_general(&mut rng, m, n, delta_max, bound_max)),
                Kind::NfoldConfig => {
                    InstanceFile::NFoldConfig(random_config(&mut rng, blocks, s, t, kappa, configs, delta_max))
                }
                Kind::Nfold => InstanceFile::NFoldNonneg(random_nfold(
                    &mut rng,
                    blocks,
                    s_a.unwrap_or(s),
                    s,
                    t,
                    bound_max.max(0),
                    delta_max,
                )),
                Kind::Schedule => InstanceFile::Schedule(random_schedule(&mut rng, n, m.max(1), delta_max.max(1))),
            };
            let text = serde_json::to_string_pretty(&file.to_json_value()).expect("instance serializes");
            match out {
                Some(path) => fs::write(&path, format!("{text}\n")).map_err(|e| format!("{}: {e}", path.display()))?,
                None => println!("{text}"),
            }
            Ok(0)
        }
        Command::Check { input } => {
            let file = load(&input)?;
            println!("ok: {} instance", file.kind());
            Ok(0)
        }
    }
}
