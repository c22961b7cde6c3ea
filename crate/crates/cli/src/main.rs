//! `tailcert` — certified tail bounds, exact oracles, game simulation,
//! and verification suites from the command line.
//!
//! Probabilities print as a base-2 log plus a decimal scientific value
//! (so exponents far beyond f64 range stay legible), with the exact
//! rational shown when one exists and fits on a line. `--json` switches
//! every subcommand to machine-readable output. `--config FILE` supplies
//! defaults for omitted flags from a flat JSON object keyed by flag name;
//! explicit flags always win.
//!
//! Exit codes: 0 success, 1 a verification suite failed, 2 usage or
//! input errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::Rational64;
use serde_json::{json, Map, Value};

use tailcert::adversary::{strategy_from_id, BudgetMode, GameConfig};
use tailcert::bounds::{
    bennett_large_bound, bennett_poor_bound, bennett_small_bound, chebyshev_max_bound,
    fair_lower_bound, fair_upper_bound, geo_sum_bound, hoeffding_bounds, large_dev_bounds,
    poor_fair_bound, query, BoundResult,
};
use tailcert::montecarlo::{estimate_tail, Subject};
use tailcert::oracle::{
    binom_tail, compositions_count, geometric_sum_tail, hitting_time_mean_exact,
    prefix_max_tail, walk_tail, Mode, PrefixMethod,
};
use tailcert::prob::{log2_biguint, parse_ratio64, sci_from_log2};
use tailcert::verify::{run_suite, Scale};
use tailcert::Prob2;

#[derive(Parser)]
#[command(
    name = "tailcert",
    version,
    about = "Certified tail bounds for walks, geometric sums, binomials, \
             and adaptive variance-budget games, with exact oracles and \
             simulation-backed verification"
)]
struct Cli {
    /// Flat JSON object supplying defaults for omitted flags.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one certified bound from the catalog.
    Bound(BoundArgs),
    /// Query an exact oracle (ground truth, no inequalities involved).
    Exact(ExactArgs),
    /// Estimate a game tail probability by simulation.
    Simulate(SimulateArgs),
    /// Run a verification suite and report every comparison.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct BoundArgs {
    /// One of: chebyshev-max, poor-fair, geo-sum, geo-sum-int,
    /// fair-upper, fair-lower, large-upper, large-lower, bennett-poor,
    /// bennett-small, bennett-large, hoeffding-small, hoeffding-large,
    /// auto (pick a regime from --mu/--n/--t).
    #[arg(long)]
    family: Option<String>,
    /// Number of steps / summands.
    #[arg(long)]
    n: Option<u64>,
    /// Success probability as a rational, e.g. 1/16.
    #[arg(long)]
    p: Option<String>,
    /// Deviation scale.
    #[arg(long)]
    k: Option<f64>,
    /// Large-deviation ratio (threshold over mean).
    #[arg(long)]
    r: Option<f64>,
    /// Variance budget.
    #[arg(long)]
    v: Option<f64>,
    /// Per-summand means, e.g. `1/2,1/4` or `64x1/2,32x1/4`.
    #[arg(long)]
    means: Option<String>,
    /// Mean, for --family auto.
    #[arg(long)]
    mu: Option<f64>,
    /// Threshold, for --family auto.
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Args)]
struct ExactArgs {
    /// One of: binom, walk, prefix-max, hitting, compositions, geo-sum.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    n: Option<u64>,
    /// Success probability as a rational, e.g. 1/16.
    #[arg(long)]
    p: Option<String>,
    /// Tail threshold (may be negative for walks).
    #[arg(long)]
    t: Option<i64>,
    /// Prefix-maximum level.
    #[arg(long)]
    m: Option<u64>,
    /// Barrier distance for hitting times.
    #[arg(long)]
    r: Option<u64>,
    /// Composition total.
    #[arg(long)]
    total: Option<u64>,
    /// Composition parts.
    #[arg(long)]
    parts: Option<u64>,
    /// Truncation cap for geometric sums (defaults to t + 64).
    #[arg(long)]
    tail_cap: Option<u64>,
    /// Prefix-maximum method: dp | reflection.
    #[arg(long)]
    method: Option<String>,
    /// Binomial arithmetic: exact | log.
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Strategy id: rademacher | grouped-lower:<k> | burst:<r> |
    /// stop:<tau>:<inner>.
    #[arg(long)]
    strategy: Option<String>,
    /// Variance budget as a rational, e.g. 64 or 13/2.
    #[arg(long)]
    v: Option<String>,
    /// Step allowance.
    #[arg(long)]
    n: Option<u64>,
    /// Tail threshold for the final sum.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    /// RNG seed (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Budget discipline: at-most | exactly.
    #[arg(long)]
    budget_mode: Option<String>,
    /// Also write one deterministic trajectory (same seed) as CSV.
    #[arg(long, value_name = "PATH")]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: fair | geo | large | bennett | appendix | all.
    #[arg(long)]
    suite: Option<String>,
    /// quick | full.
    #[arg(long)]
    scale: Option<String>,
    /// RNG seed (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here (CSV, or JSON with --json); otherwise the
    /// report goes to stdout and the summary to stderr.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Config merging
// ---------------------------------------------------------------------------

struct Merged {
    cfg: Map<String, Value>,
}

impl Merged {
    fn load(path: &Option<PathBuf>) -> Result<Self, String> {
        let cfg = match path {
            None => Map::new(),
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                let v: Value = serde_json::from_str(&text)
                    .map_err(|e| format!("config {} is not valid JSON: {e}", p.display()))?;
                match v {
                    Value::Object(m) => m,
                    _ => {
                        return Err(format!(
                            "config {} must be a flat JSON object",
                            p.display()
                        ))
                    }
                }
            }
        };
        Ok(Merged { cfg })
    }

    fn u64_opt(&self, cli: Option<u64>, key: &str) -> Result<Option<u64>, String> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(Value::Number(n)) => n
                .as_u64()
                .map(Some)
                .ok_or_else(|| format!("config key `{key}` must be a non-negative integer")),
            Some(Value::String(s)) => s
                .parse()
                .map(Some)
                .map_err(|_| format!("config key `{key}` is not an integer: {s}")),
            Some(_) => Err(format!("config key `{key}` must be a number")),
        }
    }

    fn i64_opt(&self, cli: Option<i64>, key: &str) -> Result<Option<i64>, String> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(Value::Number(n)) => n
                .as_i64()
                .map(Some)
                .ok_or_else(|| format!("config key `{key}` must be an integer")),
            Some(Value::String(s)) => s
                .parse()
                .map(Some)
                .map_err(|_| format!("config key `{key}` is not an integer: {s}")),
            Some(_) => Err(format!("config key `{key}` must be a number")),
        }
    }

    fn f64_opt(&self, cli: Option<f64>, key: &str) -> Result<Option<f64>, String> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(Value::Number(n)) => Ok(n.as_f64()),
            Some(Value::String(s)) => s
                .parse()
                .map(Some)
                .map_err(|_| format!("config key `{key}` is not a number: {s}")),
            Some(_) => Err(format!("config key `{key}` must be a number")),
        }
    }

    fn str_opt(&self, cli: Option<String>, key: &str) -> Result<Option<String>, String> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(Value::Number(n)) => Ok(Some(n.to_string())),
            Some(_) => Err(format!("config key `{key}` must be a string")),
        }
    }
}

fn require<T>(v: Option<T>, flag: &str, ctx: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("--{flag} is required for {ctx}"))
}

fn ratio_arg(s: &str, flag: &str) -> Result<Rational64, String> {
    parse_ratio64(s).map_err(|e| format!("--{flag}: {e}"))
}

fn int_scale(x: f64, flag: &str) -> Result<u64, String> {
    if x.fract() == 0.0 && x >= 0.0 && x < 9.0e15 {
        Ok(x as u64)
    } else {
        Err(format!("--{flag} must be a non-negative integer for this family, got {x}"))
    }
}

fn parse_means(s: &str) -> Result<Vec<Rational64>, String> {
    let mut means = Vec::new();
    for tok in s.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            return Err("empty entry in --means".into());
        }
        if let Some((count, val)) = tok.split_once('x') {
            let count: u64 = count
                .parse()
                .map_err(|_| format!("bad repeat count in --means entry `{tok}`"))?;
            let v = parse_ratio64(val).map_err(|e| format!("--means entry `{tok}`: {e}"))?;
            means.extend(std::iter::repeat(v).take(count as usize));
        } else {
            means.push(parse_ratio64(tok).map_err(|e| format!("--means entry `{tok}`: {e}"))?);
        }
    }
    Ok(means)
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn fmt_log2(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.6}")
    }
}

/// `log2 = ..., value = ...` plus the exact rational when it exists and
/// fits on a line (JSON always carries the full rational).
fn prob_line(p: &Prob2) -> String {
    let mut s = format!("log2 = {}, value = {}", fmt_log2(p.log2()), p.to_sci_string());
    if let Some(e) = p.exact() {
        let txt = e.to_string();
        if txt.len() <= 80 {
            s.push_str(&format!(", exact = {txt}"));
        } else {
            s.push_str(&format!(" (exact rational has {} characters; use --json)", txt.len()));
        }
    }
    s
}

fn prob_json(p: &Prob2) -> Value {
    json!({
        "log2": if p.log2() == f64::NEG_INFINITY { Value::Null } else { p.log2().into() },
        "sci": p.to_sci_string(),
        "exact": p.exact().map(|e| e.to_string()),
    })
}

fn print_bound(b: &BoundResult, json_mode: bool) {
    if json_mode {
        let doc = json!({
            "family": b.family.id(),
            "direction": b.direction.as_str(),
            "threshold": b.threshold,
            "log2_bound": b.log2_bound,
            "bound_sci": sci_from_log2(b.log2_bound),
            "exact_bound": b.exact_bound.as_ref().map(|e| e.to_string()),
            "valid": b.valid(),
            "vacuous": b.vacuous(),
            "violated": b.violated,
            "basis": b.citation(),
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("static shape"));
        return;
    }
    println!("family: {}", b.family.id());
    println!("claim: Pr[X >= {}] satisfies {}", b.threshold, b.direction.as_str());
    let mut line = format!(
        "bound: log2 = {}, value = {}",
        fmt_log2(b.log2_bound),
        sci_from_log2(b.log2_bound)
    );
    if let Some(e) = &b.exact_bound {
        line.push_str(&format!(", exact = {e}"));
    }
    println!("{line}");
    if b.valid() {
        println!("valid: true");
    } else {
        println!("valid: false (violated: {})", b.violated.join("; "));
    }
    if b.vacuous() {
        println!("note: the bound is vacuous (value >= 1)");
    }
    println!("basis: {}", b.citation());
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn reject_inapplicable(provided: &[(&str, bool)], allowed: &[&str], ctx: &str) -> Result<(), String> {
    for (name, given) in provided {
        if *given && !allowed.contains(name) {
            return Err(format!("--{name} does not apply to {ctx}"));
        }
    }
    Ok(())
}

fn cmd_bound(args: BoundArgs, merged: &Merged, json_mode: bool) -> Result<u8, String> {
    let provided = [
        ("n", args.n.is_some()),
        ("p", args.p.is_some()),
        ("k", args.k.is_some()),
        ("r", args.r.is_some()),
        ("v", args.v.is_some()),
        ("means", args.means.is_some()),
        ("mu", args.mu.is_some()),
        ("t", args.t.is_some()),
    ];
    let family = merged
        .str_opt(args.family, "family")?
        .ok_or_else(|| "--family is required (see --help for the list)".to_string())?;
    let n = merged.u64_opt(args.n, "n")?;
    let p = merged.str_opt(args.p, "p")?;
    let k = merged.f64_opt(args.k, "k")?;
    let r = merged.f64_opt(args.r, "r")?;
    let v = merged.f64_opt(args.v, "v")?;
    let means = merged.str_opt(args.means, "means")?;
    let mu = merged.f64_opt(args.mu, "mu")?;
    let t = merged.f64_opt(args.t, "t")?;

    let ctx = format!("family `{family}`");
    let bound = match family.as_str() {
        "chebyshev-max" => {
            reject_inapplicable(&provided, &["n", "k"], &ctx)?;
            chebyshev_max_bound(require(n, "n", &ctx)?, require(k, "k", &ctx)?)
        }
        "poor-fair" => {
            reject_inapplicable(&provided, &["n", "k"], &ctx)?;
            poor_fair_bound(require(n, "n", &ctx)?, int_scale(require(k, "k", &ctx)?, "k")?)
        }
        "fair-upper" => {
            reject_inapplicable(&provided, &["n", "k"], &ctx)?;
            fair_upper_bound(require(n, "n", &ctx)?, int_scale(require(k, "k", &ctx)?, "k")?)
        }
        "fair-lower" => {
            reject_inapplicable(&provided, &["n", "k"], &ctx)?;
            fair_lower_bound(require(n, "n", &ctx)?, int_scale(require(k, "k", &ctx)?, "k")?)
        }
        "geo-sum" | "geo-sum-int" => {
            reject_inapplicable(&provided, &["n", "p"], &ctx)?;
            let p = ratio_arg(&require(p, "p", &ctx)?, "p")?;
            geo_sum_bound(require(n, "n", &ctx)?, p, family == "geo-sum-int")
                .map_err(|e| e.to_string())?
        }
        "large-upper" | "large-lower" => {
            reject_inapplicable(&provided, &["n", "p", "r"], &ctx)?;
            let p = ratio_arg(&require(p, "p", &ctx)?, "p")?;
            let (upper, lower) =
                large_dev_bounds(require(n, "n", &ctx)?, p, require(r, "r", &ctx)?)
                    .map_err(|e| e.to_string())?;
            if family == "large-upper" {
                upper
            } else {
                lower
            }
        }
        "bennett-poor" => {
            reject_inapplicable(&provided, &["v", "k"], &ctx)?;
            bennett_poor_bound(require(v, "v", &ctx)?, int_scale(require(k, "k", &ctx)?, "k")?)
        }
        "bennett-small" => {
            reject_inapplicable(&provided, &["v", "k"], &ctx)?;
            bennett_small_bound(require(v, "v", &ctx)?, int_scale(require(k, "k", &ctx)?, "k")?)
        }
        "bennett-large" => {
            reject_inapplicable(&provided, &["v", "r"], &ctx)?;
            bennett_large_bound(require(v, "v", &ctx)?, require(r, "r", &ctx)?)
        }
        "hoeffding-small" => {
            reject_inapplicable(&provided, &["means", "k"], &ctx)?;
            let means = parse_means(&require(means, "means", &ctx)?)?;
            let k = int_scale(require(k, "k", &ctx)?, "k")?;
            hoeffding_bounds(&means, k, 2.0).map_err(|e| e.to_string())?.0
        }
        "hoeffding-large" => {
            reject_inapplicable(&provided, &["means", "r"], &ctx)?;
            let means = parse_means(&require(means, "means", &ctx)?)?;
            hoeffding_bounds(&means, 1, require(r, "r", &ctx)?)
                .map_err(|e| e.to_string())?
                .1
        }
        "auto" => {
            reject_inapplicable(&provided, &["mu", "n", "t"], &ctx)?;
            query(
                require(mu, "mu", &ctx)?,
                require(n, "n", &ctx)?,
                require(t, "t", &ctx)?,
            )
            .map_err(|e| e.to_string())?
        }
        other => {
            return Err(format!(
                "unknown family `{other}`; run `tailcert bound --help` for the list"
            ))
        }
    };
    print_bound(&bound, json_mode);
    Ok(0)
}

fn cmd_exact(args: ExactArgs, merged: &Merged, json_mode: bool) -> Result<u8, String> {
    let provided = [
        ("n", args.n.is_some()),
        ("p", args.p.is_some()),
        ("t", args.t.is_some()),
        ("m", args.m.is_some()),
        ("r", args.r.is_some()),
        ("total", args.total.is_some()),
        ("parts", args.parts.is_some()),
        ("tail-cap", args.tail_cap.is_some()),
        ("method", args.method.is_some()),
        ("mode", args.mode.is_some()),
    ];
    let kind = merged
        .str_opt(args.kind, "kind")?
        .ok_or_else(|| "--kind is required (see --help for the list)".to_string())?;
    let n = merged.u64_opt(args.n, "n")?;
    let p = merged.str_opt(args.p, "p")?;
    let t = merged.i64_opt(args.t, "t")?;
    let m = merged.u64_opt(args.m, "m")?;
    let r = merged.u64_opt(args.r, "r")?;
    let total = merged.u64_opt(args.total, "total")?;
    let parts = merged.u64_opt(args.parts, "parts")?;
    let tail_cap = merged.u64_opt(args.tail_cap, "tail_cap")?;
    let method = merged.str_opt(args.method, "method")?;
    let mode = merged.str_opt(args.mode, "mode")?;

    let ctx = format!("kind `{kind}`");
    match kind.as_str() {
        "binom" => {
            reject_inapplicable(&provided, &["n", "p", "t", "mode"], &ctx)?;
            let n = require(n, "n", &ctx)?;
            let p = ratio_arg(&require(p, "p", &ctx)?, "p")?;
            let t = require(t, "t", &ctx)?;
            if t < 0 {
                return Err("--t must be non-negative for binomial tails".into());
            }
            let mode = match mode.as_deref() {
                None | Some("exact") => Mode::ExactRational,
                Some("log") => Mode::FloatLog,
                Some(other) => return Err(format!("--mode must be exact or log, got `{other}`")),
            };
            let prob = binom_tail(n, p, t as u64, mode).map_err(|e| e.to_string())?;
            if json_mode {
                let doc = json!({
                    "kind": "binom", "n": n, "p": format!("{p}"), "t": t,
                    "tail": prob_json(&prob),
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("static shape"));
            } else {
                println!("Pr[Bin(n={n}, p={p}) >= {t}]: {}", prob_line(&prob));
            }
        }
        "walk" => {
            reject_inapplicable(&provided, &["n", "t"], &ctx)?;
            let n = require(n, "n", &ctx)?;
            let t = require(t, "t", &ctx)?;
            let prob = walk_tail(n, t).map_err(|e| e.to_string())?;
            if json_mode {
                let doc = json!({
                    "kind": "walk", "n": n, "t": t, "tail": prob_json(&prob),
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("static shape"));
            } else {
                println!("Pr[S_{n} >= {t}]: {}", prob_line(&prob));
            }
        }
        "prefix-max" => {
            reject_inapplicable(&provided, &["n", "m", "method"], &ctx)?;
            let n = require(n, "n", &ctx)?;
            let m = require(m, "m", &ctx)?;
            let method = match method.as_deref() {
                None | Some("dp") => PrefixMethod::Dp,
                Some("reflection") => PrefixMethod::Reflection,
                Some(other) => {
                    return Err(format!("--method must be dp or reflection, got `{other}`"))
                }
            };
            let prob = prefix_max_tail(n, m, method).map_err(|e| e.to_string())?;
            if json_mode {
                let doc = json!({
                    "kind": "prefix-max", "n": n, "m": m, "tail": prob_json(&prob),
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("static shape"));
            } else {
                println!("Pr[max prefix of S_{n} >= {m}]: {}", prob_line(&prob));
            }
        }
        "hitting" => {
            reject_inapplicable(&provided, &["r"], &ctx)?;
            let r = require(r, "r", &ctx)?;
            let mean = hitting_time_mean_exact(r).map_err(|e| e.to_string())?;
            if json_mode {
                let doc = json!({ "kind": "hitting", "r": r, "mean": mean.to_string() });
                println!("{}", serde_json::to_string_pretty(&doc).expect("static shape"));
            } else {
                println!("E[steps until the walk first leaves (-{r}, {r})]: {mean}");
            }
        }
        "compositions" => {
            reject_inapplicable(&provided, &["total", "parts"], &ctx)?;
            let total = require(total, "total", &ctx)?;
            let parts = require(parts, "parts", &ctx)?;
            let count = compositions_count(total, parts).map_err(|e| e.to_string())?;
            if json_mode {
                let doc = json!({
                    "kind": "compositions", "total": total, "parts": parts,
                    "count": count.to_string(), "log2": log2_biguint(&count),
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("static shape"));
            } else {
                println!(
                    "weak compositions of {total} into {parts} parts: {count} (log2 = {})",
                    fmt_log2(log2_biguint(&count))
                );
            }
        }
        "geo-sum" => {
            reject_inapplicable(&provided, &["n", "p", "t", "tail-cap"], &ctx)?;
            let n = require(n, "n", &ctx)?;
            let p = ratio_arg(&require(p, "p", &ctx)?, "p")?;
            let t = require(t, "t", &ctx)?;
            if t < 0 {
                return Err("--t must be non-negative for geometric sums".into());
            }
            let cap = tail_cap.unwrap_or(t as u64 + 64);
            let interval = geometric_sum_tail(n, p, t as u64, cap).map_err(|e| e.to_string())?;
            if json_mode {
                let doc = json!({
                    "kind": "geo-sum", "n": n, "p": format!("{p}"), "t": t, "tail_cap": cap,
                    "resolved_lower": prob_json(&interval.lower),
                    "exact_tail": prob_json(&interval.upper),
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("static shape"));
            } else {
                println!("Pr[sum of {n} geometric(p={p}) variables >= {t}]:");
                println!("  resolved below cap: {}", prob_line(&interval.lower));
                println!("  exact tail:         {}", prob_line(&interval.upper));
            }
        }
        other => {
            return Err(format!(
                "unknown kind `{other}`; run `tailcert exact --help` for the list"
            ))
        }
    }
    Ok(0)
}

fn cmd_simulate(args: SimulateArgs, merged: &Merged, json_mode: bool) -> Result<u8, String> {
    let ctx = "simulate";
    let strategy = require(merged.str_opt(args.strategy, "strategy")?, "strategy", ctx)?;
    let v = ratio_arg(&require(merged.str_opt(args.v, "v")?, "v", ctx)?, "v")?;
    let n = require(merged.u64_opt(args.n, "n")?, "n", ctx)?;
    let threshold = require(merged.f64_opt(args.threshold, "threshold")?, "threshold", ctx)?;
    let trials = require(merged.u64_opt(args.trials, "trials")?, "trials", ctx)?;
    let seed = merged.u64_opt(args.seed, "seed")?.unwrap_or(0);
    let mode = match merged.str_opt(args.budget_mode, "budget_mode")?.as_deref() {
        None => BudgetMode::AtMost,
        Some(s) => BudgetMode::parse(s).map_err(|e| e.to_string())?,
    };

    let subject = Subject::Game {
        strategy: strategy.clone(),
        budget: v,
        n,
        mode,
    };
    let report = estimate_tail(&subject, threshold, trials, seed).map_err(|e| e.to_string())?;

    if let Some(path) = &args.dump {
        let strat = strategy_from_id(&strategy, v).map_err(|e| e.to_string())?;
        let config = GameConfig {
            n,
            budget: v,
            mode,
            seed,
        };
        let traj =
            tailcert::adversary::play_trajectory(&config, strat.as_ref()).map_err(|e| e.to_string())?;
        fs::write(path, traj.to_csv())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        eprintln!("trajectory written to {}", path.display());
    }

    if json_mode {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        println!("subject: {}", report.subject);
        println!("threshold: {}", report.threshold);
        println!("trials: {}, successes: {}", report.trials, report.successes);
        println!("estimate: {:.6e}", report.estimate);
        println!(
            "{}% CI: [{:.6e}, {:.6e}] ({})",
            report.ci_level * 100.0,
            report.ci_low,
            report.ci_high,
            report.ci_method
        );
        println!("seed: {}", report.seed);
    }
    Ok(0)
}

fn cmd_verify(args: VerifyArgs, merged: &Merged, json_mode: bool) -> Result<u8, String> {
    let suite = merged.str_opt(args.suite, "suite")?.unwrap_or_else(|| "all".into());
    let scale = match merged.str_opt(args.scale, "scale")?.as_deref() {
        None => Scale::Quick,
        Some(s) => Scale::parse(s).map_err(|e| e.to_string())?,
    };
    let seed = merged.u64_opt(args.seed, "seed")?.unwrap_or(0);

    let report = run_suite(&suite, scale, seed).map_err(|e| e.to_string())?;
    let body = if json_mode {
        report.to_json()
    } else {
        report.to_csv()
    };

    match &args.out {
        Some(path) => {
            fs::write(path, &body).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
        None => print!("{body}"),
    }

    let skipped = report
        .cases
        .iter()
        .filter(|c| c.truth_kind.starts_with("skipped"))
        .count();
    let failed = report.failures();
    eprintln!(
        "suite: {} (scale {}, seed {}, digest {})",
        report.suite,
        report.scale.as_str(),
        report.seed,
        report.config_digest
    );
    eprintln!(
        "cases: {} total, {} passed, {} failed, {} skipped",
        report.cases.len(),
        report.cases.len() - failed.len(),
        failed.len(),
        skipped
    );
    for c in failed.iter().take(10) {
        eprintln!("failed: {}", c.case_id);
    }
    if let Some(path) = &args.out {
        eprintln!("report written to {}", path.display());
    }
    if report.overall_pass {
        eprintln!("overall: PASS");
        Ok(0)
    } else {
        eprintln!("overall: FAIL");
        Ok(1)
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let merged = Merged::load(&cli.config)?;
    match cli.command {
        Command::Bound(args) => cmd_bound(args, &merged, cli.json),
        Command::Exact(args) => cmd_exact(args, &merged, cli.json),
        Command::Simulate(args) => cmd_simulate(args, &merged, cli.json),
        Command::Verify(args) => cmd_verify(args, &merged, cli.json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
