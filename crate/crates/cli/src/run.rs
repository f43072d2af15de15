//! One adapter per subcommand: resolve descriptors, call the library, format.

use std::fmt;

use rearrangement::adfamily::{pair_divergence_check, rational_ad_family};
use rearrangement::adversaries::{
    jumble_test, matched_horizon, mix_experiment, order_violations, pad_against, pad_by_iteration, IncFn, JumbleVerdict,
};
use rearrangement::rearrangers::{band_report, riemann_oscillate, riemann_to_infinity, riemann_to_target, two_exponent_experiment, Sign};
use rearrangement::steinitz::{confine_bruteforce, confine_greedy, levy_steinitz_rearrange, SteerConfig, VectorBatch, BRUTEFORCE_LIMIT};
use rearrangement::stochastic::{bp_experiment, rademacher_mc, McConfig};
use rearrangement::{
    classify, classify_coord, encode_permutation, partial_sums, Identity, Perm, Sampling, TermSource, Trajectory,
};
use serde_json::json;

use crate::output::{pretty_json, trajectory_csv, write_atomic, Format, Table};
use crate::resolve;
use crate::{CliError, Command, ConfineMethod, Descriptor, ExperimentConfig, SignArg};

/// `verdict=<..> final=<..> horizon=<..>` plus command-specific pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub verdict: String,
    pub final_value: String,
    pub horizon: usize,
    pub extra: Vec<(String, String)>,
}

impl Summary {
    fn new(verdict: impl Into<String>, final_value: impl fmt::Display, horizon: usize) -> Self {
        Summary { verdict: verdict.into(), final_value: final_value.to_string(), horizon, extra: Vec::new() }
    }

    fn and(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.extra.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.extra.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "verdict={} final={} horizon={}", self.verdict, self.final_value, self.horizon)?;
        for (k, v) in &self.extra {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

struct Artifact {
    csv: String,
    json: String,
}

fn rt(e: impl fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn joined(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

/// Resolves every descriptor of `command` without running anything heavy.
pub(crate) fn plan_check(command: &Command) -> Result<(), CliError> {
    let alt = TermSource::AltHarmonic;
    match command {
        Command::Rearrange { series, .. } | Command::Oscillate { series, .. } | Command::ToInfinity { series, .. } => {
            resolve::series(series).map(drop)
        }
        Command::Steer { series, target, .. } => {
            let s = resolve::stacked(series)?;
            if s.dim() != target.len() {
                return Err(CliError::Usage(format!("{} series but {} target coordinates", s.dim(), target.len())));
            }
            Ok(())
        }
        Command::Pad { series, perm, iterate, .. } => {
            let s = resolve::series(series)?;
            for p in perm {
                resolve::perm(p, &s)?;
            }
            iterate.as_ref().map(inc_fn).transpose().map(drop)
        }
        Command::Jumble { perm, set, .. } => {
            resolve::perm(perm, &alt)?;
            resolve::set(set).map(drop)
        }
        Command::Mix { perm, series, .. } => {
            let s = resolve::series(series)?;
            resolve::perm(perm, &s).map(drop)
        }
        Command::SignsMc { magnitudes, .. } => resolve::series(magnitudes).map(drop),
        Command::Bp { perm, .. } => resolve::perm(perm, &alt).map(drop),
        Command::Adfam { reals, .. } => reals.iter().map(|r| resolve::real(r)).collect::<Result<Vec<_>, _>>().map(drop),
        Command::PairDiv { x, y, .. } => {
            resolve::block_set(x)?;
            resolve::block_set(y).map(drop)
        }
        Command::EncodePerm { perm, series, .. } => {
            let s = resolve::series(series)?;
            resolve::perm(perm, &s).map(drop)
        }
        Command::ShuffleExp { .. } | Command::Confine { .. } => Ok(()),
    }
}

fn inc_fn(d: &Descriptor) -> Result<IncFn, CliError> {
    let mut r = d.reader();
    let g = match d.kind.as_str() {
        "affine" => IncFn::affine(r.or("mul", 2)?, r.or("add", 2)?).map_err(|e| CliError::Usage(e.to_string()))?,
        other => return Err(CliError::Usage(format!("unknown increasing function '{other}' (expected affine)"))),
    };
    r.finish()?;
    Ok(g)
}

/// Runs the experiment, writes its output file and returns the summary.
pub fn run(config: &ExperimentConfig) -> Result<Summary, CliError> {
    let (artifact, summary) = execute(config)?;
    let body = match config.format {
        Format::Csv => artifact.csv,
        Format::Json => artifact.json,
    };
    write_atomic(&config.output, body.as_bytes())?;
    Ok(summary)
}

fn trajectory_run(
    config: &ExperimentConfig,
    traj: Trajectory,
    extra_json: serde_json::Value,
) -> (Artifact, Summary) {
    let verdict = classify(&traj, &config.tolerances);
    let summary = Summary::new(verdict.name(), joined(traj.final_sum()), traj.horizon);
    let json = pretty_json(&json!({ "verdict": verdict, "details": extra_json, "trajectory": traj }));
    (Artifact { csv: trajectory_csv(&traj), json }, summary)
}

fn execute(config: &ExperimentConfig) -> Result<(Artifact, Summary), CliError> {
    let sampling: Sampling = resolve::sampling(&config.sampling)?;
    let tol = &config.tolerances;
    match &config.command {
        Command::Rearrange { series, target, prefix, horizon } => {
            let h = *horizon as usize;
            let src = resolve::series(series)?;
            let p = riemann_to_target(&src, *target, prefix).map_err(rt)?;
            let traj = partial_sums(&src, p.as_ref(), h, &sampling).map_err(rt)?;
            let band = band_report(&src, p.as_ref(), *target, h).map_err(rt)?;
            let violations = band.violations;
            let (a, s) = trajectory_run(config, traj, json!({ "target": target, "band": band }));
            Ok((a, s.and("band-violations", violations)))
        }
        Command::Oscillate { series, lo, hi, horizon } => {
            let src = resolve::series(series)?;
            let p = riemann_oscillate(&src, *lo, *hi).map_err(rt)?;
            let traj = partial_sums(&src, p.as_ref(), *horizon as usize, &sampling).map_err(rt)?;
            let swings = p.with_emitter(|e| e.swings());
            let (a, s) = trajectory_run(config, traj, json!({ "lo": lo, "hi": hi, "swings": swings }));
            Ok((a, s.and("swings", swings)))
        }
        Command::ToInfinity { series, sign, prefix, horizon } => {
            let src = resolve::series(series)?;
            let sign = match sign {
                SignArg::Plus => Sign::Plus,
                SignArg::Minus => Sign::Minus,
            };
            let p = riemann_to_infinity(&src, sign, prefix).map_err(rt)?;
            let traj = partial_sums(&src, p.as_ref(), *horizon as usize, &sampling).map_err(rt)?;
            let stage = p.with_emitter(|e| e.stage());
            let (a, s) = trajectory_run(config, traj, json!({ "sign": sign, "stages": stage }));
            Ok((a, s.and("stages", stage)))
        }
        Command::ShuffleExp { alpha, beta, c, negatives } => {
            let r = two_exponent_experiment(*alpha, *beta, *c, *negatives as usize, &sampling).map_err(rt)?;
            let mut tab = Table::new(&["index", "sum_alpha", "sum_beta"]);
            for i in 0..r.sum_alpha.len() {
                tab.row([r.sum_alpha.indices[i].to_string(), r.sum_alpha.sums[i][0].to_string(), r.sum_beta.sums[i][0].to_string()]);
            }
            let verdict = classify(&r.sum_beta, tol);
            let summary = Summary::new(verdict.name(), r.report.final_beta, r.report.horizon)
                .and("max-alpha", r.report.max_alpha)
                .and("beta-spread", r.report.beta_window_spread);
            Ok((Artifact { csv: tab.finish(), json: pretty_json(&r) }, summary))
        }
        Command::Confine { batch, method } => {
            let text = std::fs::read_to_string(batch).map_err(|e| rt(format!("{}: {e}", batch.display())))?;
            let b = VectorBatch::parse(&text).map_err(rt)?;
            let brute = match method {
                ConfineMethod::Auto => b.len() <= BRUTEFORCE_LIMIT,
                ConfineMethod::Bruteforce => true,
                ConfineMethod::Greedy => false,
            };
            let r = if brute { confine_bruteforce(&b) } else { confine_greedy(&b) }.map_err(rt)?;
            let mut tab = Table::new(&["position", "index"]);
            for (pos, i) in r.ordering.iter().enumerate() {
                tab.row([pos.to_string(), i.to_string()]);
            }
            let name = if brute { "bruteforce" } else { "greedy" };
            let verdict = if r.achieved <= r.reference { "within-reference" } else { "exceeds-reference" };
            let summary = Summary::new(verdict, r.achieved, b.len()).and("method", name).and("reference", r.reference);
            let json = pretty_json(&json!({
                "method": name, "ordering": r.ordering, "achieved": r.achieved, "reference": r.reference
            }));
            Ok((Artifact { csv: tab.finish(), json }, summary))
        }
        Command::Steer { series, target, prefix, horizon, window, no_precheck } => {
            let src = resolve::stacked(series)?;
            let cfg = SteerConfig { window: *window, check_preconditions: !no_precheck, sampling, ..SteerConfig::default() };
            let st = levy_steinitz_rearrange(&src, target, prefix, *horizon as usize, &cfg).map_err(rt)?;
            let names: Vec<&str> = (0..st.trajectory.dim).map(|c| classify_coord(&st.trajectory, c, tol).name()).collect();
            let verdict = if names.iter().all(|n| *n == names[0]) { names[0] } else { "undetermined" };
            let summary = Summary::new(verdict, joined(st.trajectory.final_sum()), st.report.horizon)
                .and("error", st.report.final_error)
                .and("covered", st.report.covered);
            let json = pretty_json(&json!({ "target": target, "report": st.report, "trajectory": st.trajectory }));
            Ok((Artifact { csv: trajectory_csv(&st.trajectory), json }, summary))
        }
        Command::Pad { series, perm, iterate, count, .. } => {
            let base = resolve::series(series)?;
            let count = *count as usize;
            let perms: Vec<Perm> = perm.iter().map(|d| resolve::perm(d, &base)).collect::<Result<_, _>>()?;
            let (sched, padded) = match iterate {
                Some(g) => pad_by_iteration(inc_fn(g)?, &base).map_err(rt)?,
                None => pad_against(perms.clone(), &base),
            };
            let violations = order_violations(&perms, &sched, count).map_err(rt)?;
            let last = sched.l(count - 1).map_err(rt)?;
            let at_end = Sampling::Explicit(vec![]);
            let identity = partial_sums(&padded, &Identity, last + 1, &at_end).map_err(rt)?.final_sum()[0];
            let mut matched = Vec::new();
            for (d, p) in perm.iter().zip(&perms) {
                let h = matched_horizon(p.as_ref(), &sched, count).map_err(rt)?;
                let s = partial_sums(&padded, p.as_ref(), h, &at_end).map_err(rt)?.final_sum()[0];
                matched.push(json!({ "perm": d, "horizon": h, "sum": s }));
            }
            let verdict = if violations.is_empty() { "order-preserved" } else { "order-violated" };
            let summary = Summary::new(verdict, identity, last + 1).and("violations", violations.len());
            let json = pretty_json(&json!({
                "provenance": sched.provenance(),
                "count": count,
                "positions": sched.positions(count).map_err(rt)?,
                "violations": violations,
                "identity_sum": identity,
                "matched": matched,
            }));
            Ok((Artifact { csv: sched.to_csv(count).map_err(rt)?, json }, summary))
        }
        Command::Jumble { perm, set, horizon } => {
            let p = resolve::perm(perm, &TermSource::AltHarmonic)?;
            let a = resolve::set(set)?;
            let r = jumble_test(p.as_ref(), a.as_ref(), *horizon as usize).map_err(rt)?;
            let mut tab = Table::new(&["checkpoint", "reversals"]);
            for (n, c) in &r.checkpoints {
                tab.row([n.to_string(), c.to_string()]);
            }
            let verdict = match r.verdict {
                JumbleVerdict::Jumbled => "jumbled",
                JumbleVerdict::PreservedSoFar => "preserved-so-far",
            };
            let summary = Summary::new(verdict, r.reversals, r.horizon).and("elements", r.elements);
            Ok((Artifact { csv: tab.finish(), json: pretty_json(&r) }, summary))
        }
        Command::Mix { perm, series, horizon } => {
            let src = resolve::series(series)?;
            let p = resolve::perm(perm, &src)?;
            let e = mix_experiment(&src, p, *horizon as usize, &sampling, tol).map_err(rt)?;
            let summary = Summary::new(e.verdict.name(), joined(e.trajectory.final_sum()), e.trajectory.horizon)
                .and("checkpoints", e.checkpoints.len())
                .and("verified", e.verified);
            Ok((Artifact { csv: trajectory_csv(&e.trajectory), json: pretty_json(&e) }, summary))
        }
        Command::SignsMc { magnitudes, trials, horizon, window, osc_tol, blowup } => {
            let mags = resolve::series(magnitudes)?;
            let cfg = McConfig {
                trials: *trials as usize,
                horizon: *horizon as usize,
                window: *window,
                osc_tol: *osc_tol,
                blowup: *blowup,
                seed: config.seed,
            };
            let r = rademacher_mc(&mags, &cfg).map_err(rt)?;
            let verdict = match (r.convergence_proxy > 0.5, r.divergence_proxy > 0.5) {
                (true, false) => "converges",
                (false, true) => "diverges",
                _ => "undetermined",
            };
            let summary = Summary::new(verdict, r.convergence_proxy, r.horizon)
                .and("convergence-proxy", r.convergence_proxy)
                .and("divergence-proxy", r.divergence_proxy);
            Ok((Artifact { csv: r.to_csv(), json: pretty_json(&r) }, summary))
        }
        Command::Bp { perm, horizon } => {
            let p = resolve::perm(perm, &TermSource::AltHarmonic)?;
            let traj = bp_experiment(p.as_ref(), config.seed, *horizon as usize, &sampling).map_err(rt)?;
            Ok(trajectory_run(config, traj, json!({ "perm": perm, "seed": config.seed })))
        }
        Command::Adfam { reals, depth, max_shared } => {
            let xs: Vec<f64> = reals.iter().map(|r| resolve::real(r)).collect::<Result<_, _>>()?;
            let fam = rational_ad_family(&xs, *depth as usize).map_err(rt)?;
            let mut tab = Table::new(&["set", "real", "member", "num", "den"]);
            for (i, s) in fam.iter().enumerate() {
                for (m, q) in &s.members {
                    tab.row([i.to_string(), s.real.to_string(), m.to_string(), q.num.to_string(), q.den.to_string()]);
                }
            }
            let mut pairs = Vec::new();
            for i in 0..fam.len() {
                for j in i + 1..fam.len() {
                    pairs.push(json!({ "a": i, "b": j, "shared": fam[i].intersection(&fam[j]) }));
                }
            }
            let largest = (0..fam.len())
                .flat_map(|i| (i + 1..fam.len()).map(move |j| (i, j)))
                .map(|(i, j)| fam[i].intersection(&fam[j]).len())
                .max()
                .unwrap_or(0);
            let verdict = if largest <= *max_shared { "almost-disjoint" } else { "large-intersection" };
            let summary = Summary::new(verdict, largest, *depth as usize).and("sets", fam.len());
            let json = pretty_json(&json!({ "sets": fam, "intersections": pairs, "max_intersection": largest }));
            Ok((Artifact { csv: tab.finish(), json }, summary))
        }
        Command::PairDiv { x, y, horizon, bound, max_shared } => {
            let (bx, by) = (resolve::block_set(x)?, resolve::block_set(y)?);
            let (traj, r) = pair_divergence_check(&bx, &by, *horizon as usize, *bound, *max_shared, &sampling).map_err(rt)?;
            let verdict = if r.exceeds_at.is_some() { "exceeds" } else { "bounded-so-far" };
            let mut summary = Summary::new(verdict, r.final_sum, r.horizon);
            if let Some(at) = r.exceeds_at {
                summary = summary.and("exceeds-at", at);
            }
            let json = pretty_json(&json!({ "report": r, "trajectory": traj }));
            Ok((Artifact { csv: trajectory_csv(&traj), json }, summary))
        }
        Command::EncodePerm { perm, series, k } => {
            let src = resolve::series(series)?;
            let p = resolve::perm(perm, &src)?;
            let code = encode_permutation(p.as_ref(), *k as usize).map_err(rt)?;
            let mut tab = Table::new(&["position", "code"]);
            for (i, c) in code.iter().enumerate() {
                tab.row([i.to_string(), c.to_string()]);
            }
            let nonzero = code.iter().filter(|&&c| c != 0).count();
            let verdict = if nonzero == 0 { "identity-code" } else { "encoded" };
            let summary = Summary::new(verdict, nonzero, code.len());
            let json = pretty_json(&json!({ "perm": p.describe(), "k": k, "code": code }));
            Ok((Artifact { csv: tab.finish(), json }, summary))
        }
    }
}
