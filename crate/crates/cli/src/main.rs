//! Command-line front end: point-set ingestion, seeded random experiments,
//! chain property suites, the inequality certification run, and a simple
//! near-cocircular lower-bound construction.
//!
//! Exit codes: 0 success/pass, 1 certification or property failure, 2
//! usage/input error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use chainstretch::chain::{rubber_band, stab_order, ChainError};
use chainstretch::delaunay::triangulate;
use chainstretch::fileio::{parse_chain_file, parse_points};
use chainstretch::geom::Point;
use chainstretch::potential::{joint_decompositions, potential, upsilon};
use chainstretch::randgen::{random_chain, random_points_square, sample_terminal_pair};
use chainstretch::stretch::{stretch_factor, StretchReport};
use chainstretch::verifier::{certify, VerifierConfig};
use chainstretch::{arc_path, chain_from_triangulation};

#[derive(Parser)]
#[command(
    name = "chainstretch",
    version,
    about = "Stretch factors of Delaunay triangulations and chains of circles",
    after_help = "Environment:\n  STRETCH_THREADS  worker threads for parallel commands (0 or unset = auto)"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Stretch factor of the Delaunay triangulation of a point file.
    Stretch(StretchArgs),
    /// Seeded random experiments: per-trial stretch factors as CSV.
    Random(RandomArgs),
    /// Certify the four closing inequalities (negative upper bounds).
    Certify(CertifyArgs),
    /// Random-chain property suite: target function, ratios, stab order,
    /// travel identities, and potential monotonicity.
    ChainSuite(ChainSuiteArgs),
    /// Near-cocircular construction pushing shortest paths along the hull.
    Lowerbound(LowerboundArgs),
}

#[derive(Args)]
struct StretchArgs {
    /// Point file: one "x,y" per line, '#' comments.
    #[arg(long)]
    input: PathBuf,
    /// Also extract the circumcircle chain crossed by the segment between
    /// two vertex indices and report its path lengths. If the segment passes
    /// exactly through a third vertex, the query is retried once with the
    /// second endpoint rotated by 1e-12 rad around the first, and the output
    /// records that jitter.
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    pair: Option<Vec<usize>>,
}

#[derive(Args)]
struct RandomArgs {
    /// Points per trial.
    #[arg(long)]
    n: usize,
    /// Number of trials.
    #[arg(long)]
    trials: usize,
    /// RNG seed; identical seeds give byte-identical output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit CSV, the default format.
    ///
    /// Columns: seed,n,trial,stretch,witness_i,witness_j with a trailing
    /// "# max_stretch=..." summary line. Floats carry 17 significant digits.
    #[arg(long)]
    csv: bool,
    /// Emit a JSON object instead of CSV.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
}

#[derive(Args)]
struct CertifyArgs {
    /// Override the rubber-band weight (default 1.8).
    #[arg(long)]
    lambda: Option<f64>,
    /// Override the certification margin (default -1e-6).
    #[arg(long, allow_hyphen_values = true)]
    guard: Option<f64>,
}

#[derive(Args)]
struct ChainSuiteArgs {
    /// Number of random chains (random mode).
    #[arg(long, required_unless_present = "input")]
    count: Option<usize>,
    /// Maximum circles per chain (random mode).
    #[arg(long = "max-n", required_unless_present = "input")]
    max_n: Option<usize>,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Terminal pairs sampled per chain.
    #[arg(long, default_value_t = 64)]
    pairs: usize,
    /// Evaluate one chain file ("cx,cy,r" lines, optional trailing
    /// "u:ux,uy v:vx,vy") instead of random chains.
    #[arg(long, conflicts_with_all = ["count", "max_n"])]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct LowerboundArgs {
    /// Number of points on the perturbed circle (at least 8).
    #[arg(long)]
    n: usize,
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Stretch(a) => cmd_stretch(a),
        Cmd::Random(a) => cmd_random(a),
        Cmd::Certify(a) => cmd_certify(a),
        Cmd::ChainSuite(a) => cmd_chain_suite(a),
        Cmd::Lowerbound(a) => cmd_lowerbound(a),
    }
}

fn init_threads() {
    #[cfg(feature = "parallel")]
    {
        if let Ok(v) = std::env::var("STRETCH_THREADS") {
            if let Ok(k) = v.trim().parse::<usize>() {
                if k > 0 {
                    let _ = rayon::ThreadPoolBuilder::new()
                        .num_threads(k)
                        .build_global();
                }
            }
        }
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn cmd_stretch(a: StretchArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&a.input) {
        Ok(t) => t,
        Err(e) => return usage_error(format!("{}: {e}", a.input.display())),
    };
    let points = match parse_points(&text) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let t = match triangulate(&points) {
        Ok(t) => t,
        Err(e) => return usage_error(e),
    };
    let report = match stretch_factor(&t) {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };
    #[derive(Serialize)]
    struct Output {
        #[serde(flatten)]
        report: StretchReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        pair: Option<serde_json::Value>,
    }
    let pair = match &a.pair {
        Some(p) => match pair_report(&points, p[0], p[1]) {
            Ok(v) => Some(v),
            Err(e) => return usage_error(e),
        },
        None => None,
    };
    let out = Output { report, pair };
    println!("{}", serde_json::to_string(&out).unwrap());
    ExitCode::SUCCESS
}

/// Chain extraction between two vertices, with the degeneracy-jitter retry.
fn pair_report(points: &[Point], x: usize, y: usize) -> Result<serde_json::Value, String> {
    use chainstretch::delaunay::DelaunayError;

    let mut jittered = false;
    let mut pts = points.to_vec();
    let t = triangulate(&pts).map_err(|e| e.to_string())?;
    let mut extraction = chain_from_triangulation(&t, x, y);
    if let Err(ChainError::Delaunay(DelaunayError::SegmentThroughVertex(..))) = extraction {
        // Rotate y around x by 1e-12 rad and retry once.
        jittered = true;
        let (px, py) = (pts[x], pts[y]);
        let (s, c) = (1e-12f64.sin(), 1e-12f64.cos());
        pts[y] = Point::new(
            px.x + c * (py.x - px.x) - s * (py.y - px.y),
            px.y + s * (py.x - px.x) + c * (py.y - px.y),
        );
        let t = triangulate(&pts).map_err(|e| e.to_string())?;
        extraction = chain_from_triangulation(&t, x, y);
    }
    match extraction {
        Ok(None) => Ok(serde_json::json!({
            "x": x, "y": y, "edge": true, "jittered": jittered,
        })),
        Ok(Some((chain, term))) => {
            let band = rubber_band(&chain, &term).map_err(|e| e.to_string())?;
            let path = arc_path(&chain, &term).map_err(|e| e.to_string())?;
            let ups = upsilon(&chain, &term).map_err(|e| e.to_string())?;
            Ok(serde_json::json!({
                "x": x, "y": y, "edge": false, "jittered": jittered,
                "circles": chain.len(),
                "p": path.length,
                "d": band.length,
                "upsilon": ups,
                "obstructed": band.obstructed,
            }))
        }
        Err(e) => Err(e.to_string()),
    }
}

/// 17 significant digits, enough to reproduce the f64 bit pattern.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn run_trial(seed: u64, n: usize, trial: usize) -> StretchReport {
    let mut rng =
        ChaCha8Rng::seed_from_u64(splitmix64(seed ^ (trial as u64).wrapping_mul(0xD6E8FEB8)));
    loop {
        let points = random_points_square(&mut rng, n);
        if let Ok(t) = triangulate(&points) {
            return stretch_factor(&t).expect("triangulation has >= 3 points");
        }
    }
}

fn cmd_random(a: RandomArgs) -> ExitCode {
    if a.n < 3 {
        return usage_error("--n must be at least 3");
    }
    if a.trials < 1 {
        return usage_error("--trials must be at least 1");
    }
    let started = Instant::now();
    let reports = run_trials(a.seed, a.n, a.trials);
    let max = reports
        .iter()
        .map(|r| r.stretch)
        .fold(f64::NEG_INFINITY, f64::max);
    let emit_json = a.json && !a.csv;
    if emit_json {
        let rows: Vec<serde_json::Value> = reports
            .iter()
            .enumerate()
            .map(|(k, r)| {
                serde_json::json!({
                    "seed": a.seed, "n": a.n, "trial": k,
                    "stretch": r.stretch, "witness": r.witness,
                })
            })
            .collect();
        let out = serde_json::json!({"trials": rows, "max_stretch": max});
        println!("{out}");
    } else {
        println!("seed,n,trial,stretch,witness_i,witness_j");
        for (k, r) in reports.iter().enumerate() {
            println!(
                "{},{},{},{},{},{}",
                a.seed,
                a.n,
                k,
                fmt17(r.stretch),
                r.witness[0],
                r.witness[1]
            );
        }
        println!("# max_stretch={}", fmt17(max));
    }
    eprintln!(
        "{} trials in {} ms",
        a.trials,
        started.elapsed().as_millis()
    );
    ExitCode::SUCCESS
}

#[cfg(feature = "parallel")]
fn run_trials(seed: u64, n: usize, trials: usize) -> Vec<StretchReport> {
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|k| run_trial(seed, n, k))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_trials(seed: u64, n: usize, trials: usize) -> Vec<StretchReport> {
    (0..trials).map(|k| run_trial(seed, n, k)).collect()
}

fn cmd_certify(a: CertifyArgs) -> ExitCode {
    let mut cfg = VerifierConfig::default();
    if let Some(l) = a.lambda {
        cfg.lambda = l;
    }
    if let Some(g) = a.guard {
        cfg.guard = g;
    }
    match certify(&cfg) {
        Ok(report) => {
            println!("{}", serde_json::to_string(&report).unwrap());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            println!(
                "{}",
                serde_json::json!({"pass": false, "error": e.to_string()})
            );
            ExitCode::from(1)
        }
    }
}

#[derive(Default, Clone)]
struct SuiteTally {
    chains: usize,
    pairs: usize,
    unobstructed: usize,
    violations_upsilon: usize,
    violations_ratio: usize,
    violations_stab: usize,
    violations_travel_h: usize,
    violations_travel_v: usize,
    violations_potential: usize,
    errors: usize,
    max_upsilon: f64,
    max_ratio: f64,
}

impl SuiteTally {
    fn new() -> Self {
        SuiteTally {
            max_upsilon: f64::NEG_INFINITY,
            max_ratio: f64::NEG_INFINITY,
            ..Default::default()
        }
    }

    fn merge(mut self, other: SuiteTally) -> SuiteTally {
        self.chains += other.chains;
        self.pairs += other.pairs;
        self.unobstructed += other.unobstructed;
        self.violations_upsilon += other.violations_upsilon;
        self.violations_ratio += other.violations_ratio;
        self.violations_stab += other.violations_stab;
        self.violations_travel_h += other.violations_travel_h;
        self.violations_travel_v += other.violations_travel_v;
        self.violations_potential += other.violations_potential;
        self.errors += other.errors;
        self.max_upsilon = self.max_upsilon.max(other.max_upsilon);
        self.max_ratio = self.max_ratio.max(other.max_ratio);
        self
    }

    fn violation_total(&self) -> usize {
        self.violations_upsilon
            + self.violations_ratio
            + self.violations_stab
            + self.violations_travel_h
            + self.violations_travel_v
            + self.violations_potential
            + self.errors
    }
}

fn suite_one_chain(seed: u64, max_n: usize, pairs: usize, index: usize) -> SuiteTally {
    let mut rng =
        ChaCha8Rng::seed_from_u64(splitmix64(seed ^ (index as u64).wrapping_mul(0xA076_1D64)));
    let n = rng.random_range(1..=max_n.max(1));
    let chain = random_chain(&mut rng, n);
    check_chain(&chain, &mut rng, pairs)
}

fn check_chain(chain: &chainstretch::Chain, rng: &mut ChaCha8Rng, pairs: usize) -> SuiteTally {
    let mut tally = SuiteTally::new();
    tally.chains = 1;

    // Per-joint travel identities and potential monotonicity.
    match joint_decompositions(chain) {
        Ok(decs) => {
            for (i, dec) in decs.iter().enumerate() {
                let d = chain.circles()[i]
                    .center
                    .dist(chain.circles()[i + 1].center);
                let dr = (chain.circles()[i].radius - chain.circles()[i + 1].radius).abs();
                if (dec.h - d).abs() > 1e-9 * d.max(1.0) {
                    tally.violations_travel_h += 1;
                }
                if dec.v < dr - 1e-9 {
                    tally.violations_travel_v += 1;
                }
            }
        }
        Err(_) => tally.errors += 1,
    }
    if chain.len() >= 2 {
        let full = potential(chain);
        let prefix = chain.prefix(chain.len() - 1).map(|p| potential(&p));
        match (full, prefix) {
            (Ok(full), Ok(Ok(prefix))) => {
                if full > prefix + 1e-9 {
                    tally.violations_potential += 1;
                }
            }
            _ => tally.errors += 1,
        }
    }

    for _ in 0..pairs {
        let t = sample_terminal_pair(rng, chain);
        if t.u.dist(t.v) <= 1e-9 {
            continue;
        }
        tally.pairs += 1;
        let (band, path, y) = match (
            rubber_band(chain, &t),
            arc_path(chain, &t),
            upsilon(chain, &t),
        ) {
            (Ok(b), Ok(p), Ok(y)) => (b, p, y),
            _ => {
                tally.errors += 1;
                continue;
            }
        };
        if y >= 0.0 {
            tally.violations_upsilon += 1;
        }
        tally.max_upsilon = tally.max_upsilon.max(y);
        if band.length > 1e-12 {
            let ratio = path.length / band.length;
            if ratio >= 1.998 {
                tally.violations_ratio += 1;
            }
            tally.max_ratio = tally.max_ratio.max(ratio);
        }
        if !band.obstructed {
            tally.unobstructed += 1;
            match stab_order(chain, &t) {
                Ok(true) => {}
                Ok(false) => tally.violations_stab += 1,
                Err(ChainError::Obstructed) => {}
                Err(_) => tally.errors += 1,
            }
        }
    }
    tally
}

fn cmd_chain_suite(a: ChainSuiteArgs) -> ExitCode {
    let started = Instant::now();
    let (tally, extra) = if let Some(path) = &a.input {
        match suite_from_file(path, a.seed, a.pairs) {
            Ok(r) => r,
            Err(code) => return code,
        }
    } else {
        let count = a.count.unwrap_or(0);
        let max_n = a.max_n.unwrap_or(0);
        if count < 1 {
            return usage_error("--count must be at least 1");
        }
        if max_n < 2 {
            return usage_error("--max-n must be at least 2");
        }
        (
            run_suite(a.seed, max_n, a.pairs, count),
            serde_json::Map::new(),
        )
    };
    let mut out = serde_json::json!({
        "seed": a.seed,
        "chains": tally.chains,
        "pairs": tally.pairs,
        "unobstructed_pairs": tally.unobstructed,
        "violations": {
            "upsilon": tally.violations_upsilon,
            "ratio": tally.violations_ratio,
            "stab_order": tally.violations_stab,
            "travel_h": tally.violations_travel_h,
            "travel_v": tally.violations_travel_v,
            "potential_monotone": tally.violations_potential,
            "errors": tally.errors,
        },
        "max_upsilon": tally.max_upsilon,
        "max_ratio": tally.max_ratio,
    });
    if let Some(obj) = out.as_object_mut() {
        if let Some(c) = a.count {
            obj.insert("count".into(), c.into());
        }
        if let Some(m) = a.max_n {
            obj.insert("max_n".into(), m.into());
        }
        obj.extend(extra);
    }
    println!("{out}");
    eprintln!(
        "{} chains in {} ms",
        tally.chains,
        started.elapsed().as_millis()
    );
    if tally.violation_total() == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Evaluate a single chain loaded from a file; file terminals, when present,
/// get their own target-function value in the report.
fn suite_from_file(
    path: &PathBuf,
    seed: u64,
    pairs: usize,
) -> Result<(SuiteTally, serde_json::Map<String, serde_json::Value>), ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage_error(format!("{}: {e}", path.display())))?;
    let (circles, terminals) = parse_chain_file(&text).map_err(usage_error)?;
    let chain = chainstretch::Chain::new(circles).map_err(usage_error)?;
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let mut tally = check_chain(&chain, &mut rng, pairs);
    let mut extra = serde_json::Map::new();
    extra.insert("input".into(), path.display().to_string().into());
    extra.insert("n".into(), chain.len().into());
    if let Some((u, v)) = terminals {
        let evaluated = chain
            .terminals(u, v)
            .map_err(chainstretch::potential::PotentialError::from)
            .and_then(|t| Ok((upsilon(&chain, &t)?, t)));
        match evaluated {
            Ok((y, t)) => {
                if y >= 0.0 {
                    tally.violations_upsilon += 1;
                }
                tally.max_upsilon = tally.max_upsilon.max(y);
                extra.insert("terminal_upsilon".into(), y.into());
                let band = rubber_band(&chain, &t).map_err(usage_error)?;
                let path_len = arc_path(&chain, &t).map_err(usage_error)?.length;
                extra.insert("terminal_p".into(), path_len.into());
                extra.insert("terminal_d".into(), band.length.into());
            }
            Err(e) => return Err(usage_error(e)),
        }
    }
    Ok((tally, extra))
}

#[cfg(feature = "parallel")]
fn run_suite(seed: u64, max_n: usize, pairs: usize, count: usize) -> SuiteTally {
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(|i| suite_one_chain(seed, max_n, pairs, i))
        .reduce(SuiteTally::new, SuiteTally::merge)
}

#[cfg(not(feature = "parallel"))]
fn run_suite(seed: u64, max_n: usize, pairs: usize, count: usize) -> SuiteTally {
    (0..count)
        .map(|i| suite_one_chain(seed, max_n, pairs, i))
        .fold(SuiteTally::new(), SuiteTally::merge)
}

/// Radial dip of the lower-bound construction, tuned against the exact
/// stretch oracle before freezing (measured stretch 1.52 at n = 8, 1.55 at
/// n = 64, approaching pi/2 as n grows).
const LOWERBOUND_DIP: f64 = 0.02;

fn lowerbound_points(n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64;
            let r = 1.0 - LOWERBOUND_DIP * theta.sin() * theta.sin();
            Point::new(r * theta.cos(), r * theta.sin())
        })
        .collect()
}

fn cmd_lowerbound(a: LowerboundArgs) -> ExitCode {
    if a.n < 8 {
        return usage_error("--n must be at least 8");
    }
    let points = lowerbound_points(a.n);
    let t = match triangulate(&points) {
        Ok(t) => t,
        Err(e) => return usage_error(e),
    };
    let report = match stretch_factor(&t) {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };
    println!("{}", serde_json::to_string(&report).unwrap());
    ExitCode::SUCCESS
}
