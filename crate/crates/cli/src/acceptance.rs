//! Acceptance criteria as runnable checks.
//!
//! Each criterion writes its report files under `<out>/c<id>/` through the
//! same command pipeline as the CLI, then checks the numbers it wrote.
//! Parameters are pinned; only `seed` may be configured. Wall-clock budgets
//! count toward the verdict but never appear in report files.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ewl::arith::{weight_table, WeightKind};
use ewl::report::fmt_f64;
use ewl::{Complex64, Fixed64};

use crate::commands::{cmd_avg, cmd_expsum, cmd_finitary, cmd_kbsz, cmd_maximal, ExpsumData, KbszData};
use crate::{CliError, CliResult, RunConfig, TOOL_VERSION};

pub use crate::commands::DEFAULT_SEED;

#[derive(Clone, Copy, Debug)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub budget: Option<Duration>,
}

const fn c(id: u8, name: &'static str, secs: Option<u64>) -> Criterion {
    Criterion {
        id,
        name,
        budget: match secs {
            Some(s) => Some(Duration::from_secs(s)),
            None => None,
        },
    }
}

pub const CRITERIA: [Criterion; 11] = [
    c(1, "sieve correctness", Some(5)),
    c(2, "Liouville partial sums", None),
    c(3, "finitary Fourier identity", Some(60)),
    c(4, "linear exponential sum decay", Some(120)),
    c(5, "quadratic exponential sum decay", Some(300)),
    c(6, "short-interval exponential sum", None),
    c(7, "bilinear rotation average", None),
    c(8, "lacunary maximal ratio and transference", None),
    c(9, "spectral bound", None),
    c(10, "prime-dilate correlation closed forms", None),
    c(11, "determinism", None),
];

pub fn criterion(id: u8) -> Option<Criterion> {
    CRITERIA.iter().copied().find(|c| c.id == id)
}

/// Accepts `3`, `c3` or `criterion3`.
pub fn parse_id(s: &str) -> CliResult<u8> {
    let digits = s.trim().trim_start_matches("criterion").trim_start_matches('c');
    digits
        .parse::<u8>()
        .ok()
        .filter(|id| criterion(*id).is_some())
        .ok_or_else(|| CliError::invalid("assert", format!("unknown criterion `{s}` (1..=11)")))
}

/// Seed from an assert-mode configuration, which admits no other key.
pub fn seed_from(cfg: &RunConfig) -> CliResult<u64> {
    if let Some(k) = cfg.keys().find(|k| *k != "seed") {
        return Err(CliError::invalid(
            k,
            "acceptance parameters are pinned; only `seed` may be set in --assert mode",
        ));
    }
    match cfg.get("seed") {
        Some(s) => s
            .parse()
            .map_err(|e| CliError::invalid("seed", format!("cannot parse `{s}`: {e}"))),
        None => Ok(DEFAULT_SEED),
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub criterion: Criterion,
    pub checks_passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub files: Vec<PathBuf>,
}

impl Verdict {
    pub fn within_budget(&self) -> bool {
        self.criterion.budget.is_none_or(|b| self.elapsed <= b)
    }

    pub fn passed(&self) -> bool {
        self.checks_passed && self.within_budget()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {:<42} {}  {} [{:.2} s",
            self.criterion.id,
            self.criterion.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.detail,
            self.elapsed.as_secs_f64()
        )?;
        match self.criterion.budget {
            Some(b) => write!(f, " of {} s budget]", b.as_secs()),
            None => write!(f, "]"),
        }
    }
}

fn config(entries: &[(&str, String)]) -> RunConfig {
    entries.iter().map(|(k, v)| (*k, v.as_str())).collect()
}

fn meta(id: u8, seed: u64, extra: &[(&str, String)]) -> Vec<(String, String)> {
    let mut m = vec![
        ("tool".to_string(), "ewl".to_string()),
        ("version".to_string(), TOOL_VERSION.to_string()),
        ("criterion".to_string(), id.to_string()),
        ("seed".to_string(), seed.to_string()),
    ];
    m.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
    m
}

fn write_csv(path: PathBuf, meta: &[(String, String)], columns: &str, rows: &[String]) -> CliResult<PathBuf> {
    let mut text = Vec::new();
    ewl::report::write_meta(&mut text, meta).map_err(|e| CliError::io(&path, e))?;
    text.extend_from_slice(columns.as_bytes());
    text.push(b'\n');
    for r in rows {
        text.extend_from_slice(r.as_bytes());
        text.push(b'\n');
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

type Checked = (bool, String, Vec<PathBuf>);

/// Runs one criterion, writing into `<out>/c<id>/`.
pub fn evaluate(id: u8, out: &Path, seed: u64) -> CliResult<Verdict> {
    let criterion = criterion(id).ok_or_else(|| CliError::invalid("assert", format!("unknown criterion {id}")))?;
    let dir = out.join(format!("c{id}"));
    let start = Instant::now();
    let (checks_passed, detail, files) = match id {
        1 => sieve_oracle(&dir, seed)?,
        2 => liouville_sums(&dir, seed)?,
        3 => finitary_identity(&dir, seed)?,
        4 => linear_decay(&dir, seed)?,
        5 => quadratic_decay(&dir, seed)?,
        6 => short_interval(&dir, seed)?,
        7 => rotation_average(&dir, seed)?,
        8 => maximal_ratio(&dir, seed)?,
        9 => spectral(&dir, seed)?,
        10 => correlations(&dir, seed)?,
        _ => determinism(&dir, seed)?,
    };
    Ok(Verdict {
        criterion,
        checks_passed,
        detail,
        elapsed: start.elapsed(),
        files,
    })
}

fn trial_division(mut n: u64) -> (u32, bool) {
    let (mut omega, mut squarefree) = (0, true);
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        omega += e;
        squarefree &= e <= 1;
        d += 1;
    }
    if n > 1 {
        omega += 1;
    }
    (omega, squarefree)
}

fn sieve_oracle(dir: &Path, seed: u64) -> CliResult<Checked> {
    const N: u64 = 100_000;
    let sieve = ewl::arith::build_sieve(N)?;
    let (lambda, mu) = ewl::arith::WeightSequence::liouville_and_moebius(N)?;
    let mut bad = [0u64; 3];
    for n in 1..=N {
        let (omega, squarefree) = trial_division(n);
        let l = if omega % 2 == 0 { 1 } else { -1 };
        let m = if squarefree { l } else { 0 };
        bad[0] += (sieve.big_omega(n)? != omega) as u64;
        bad[1] += (lambda.at(n as usize).re != l as f64) as u64;
        bad[2] += (mu.at(n as usize).re != m as f64) as u64;
    }
    let file = write_csv(
        dir.join("sieve_oracle.csv"),
        &meta(1, seed, &[("n_max", N.to_string())]),
        "n_max,omega_mismatches,lambda_mismatches,mu_mismatches",
        &[format!("{N},{},{},{}", bad[0], bad[1], bad[2])],
    )?;
    let ok = bad == [0, 0, 0];
    Ok((ok, format!("mismatches up to {N}: Omega {} lambda {} mu {}", bad[0], bad[1], bad[2]), vec![file]))
}

fn liouville_sums(dir: &Path, seed: u64) -> CliResult<Checked> {
    const N: usize = 1_000_000;
    let lambda = weight_table(WeightKind::Liouville, N as u64)?;
    let sums = lambda.integer_prefix_sums().expect("sign table");
    let (mut worst, mut at) = (0.0f64, 1usize);
    for (i, s) in sums.iter().enumerate() {
        let r = s.unsigned_abs() as f64 / ((i + 1) as f64).sqrt();
        if r > worst {
            (worst, at) = (r, i + 1);
        }
    }
    let last = sums[N - 1];
    let ratio = last.unsigned_abs() as f64 / N as f64;
    let checkpoints: Vec<usize> = (0..=6).map(|k| 10usize.pow(k)).collect();
    let rows: Vec<String> = checkpoints
        .iter()
        .map(|&n| {
            let s = sums[n - 1];
            format!(
                "{n},{s},{},{}",
                fmt_f64(s.unsigned_abs() as f64 / n as f64),
                fmt_f64(s.unsigned_abs() as f64 / (n as f64).sqrt())
            )
        })
        .collect();
    let file = write_csv(
        dir.join("liouville_sums.csv"),
        &meta(2, seed, &[("max_abs_over_sqrt", fmt_f64(worst)), ("argmax", at.to_string())]),
        "N,L,abs_over_N,abs_over_sqrtN",
        &rows,
    )?;
    let ok = ratio < 0.01 && worst <= 3.0;
    Ok((
        ok,
        format!(
            "|L(10^6)|/10^6 = {} (< 0.01), max |L(N)|/sqrt(N) = {} at N = {at} (<= 3)",
            fmt_f64(ratio),
            fmt_f64(worst)
        ),
        vec![file],
    ))
}

fn finitary_identity(dir: &Path, seed: u64) -> CliResult<Checked> {
    let cfg = config(&[
        ("modulus", "1024".into()),
        ("n", "256".into()),
        ("trials", "100".into()),
        ("seed", seed.to_string()),
        ("weight", "liouville".into()),
    ]);
    let o = cmd_finitary(&cfg, dir)?;
    let worst = o.data.iter().map(|t| t.max_abs_diff).fold(0.0, f64::max);
    Ok((
        o.data.len() == 100 && worst < 1e-9,
        format!("100 pairs, max_j |direct - fourier| = {} (< 1e-9)", fmt_f64(worst)),
        o.files,
    ))
}

fn decay(dir: &Path, entries: &[(&str, String)]) -> CliResult<(ewl::expsum::DecayReport, Vec<PathBuf>)> {
    let o = cmd_expsum(&config(entries), dir)?;
    match o.data {
        ExpsumData::Decay(r) => Ok((r, o.files)),
        _ => unreachable!("decay mode"),
    }
}

fn linear_decay(dir: &Path, _seed: u64) -> CliResult<Checked> {
    let (r, files) = decay(
        dir,
        &[
            ("mode", "decay".into()),
            ("k", "1".into()),
            ("sizes", "4096,65536,1048576".into()),
            ("grid_factor", "4".into()),
            ("weight", "liouville".into()),
        ],
    )?;
    let v: Vec<f64> = r.rows.iter().map(|r| r.max_norm).collect();
    let ok = r.is_strictly_decreasing() && v[2] < v[0] / 3.0;
    Ok((
        ok,
        format!(
            "max_norm {} > {} > {}, last < first/3 = {}",
            fmt_f64(v[0]),
            fmt_f64(v[1]),
            fmt_f64(v[2]),
            fmt_f64(v[0] / 3.0)
        ),
        files,
    ))
}

fn quadratic_decay(dir: &Path, _seed: u64) -> CliResult<Checked> {
    let (r, files) = decay(
        dir,
        &[
            ("mode", "decay".into()),
            ("k", "2".into()),
            ("sizes", "1024,16384".into()),
            ("grids", "4096,65536".into()),
            ("weight", "liouville".into()),
        ],
    )?;
    let v: Vec<f64> = r.rows.iter().map(|r| r.max_norm).collect();
    Ok((
        v[1] < v[0],
        format!("max_norm(2^14) = {} < max_norm(2^10) = {}", fmt_f64(v[1]), fmt_f64(v[0])),
        files,
    ))
}

fn short_interval(dir: &Path, _seed: u64) -> CliResult<Checked> {
    let n = 1_000_000usize;
    let m = (n as f64).powf(0.7).ceil() as usize;
    let o = cmd_expsum(
        &config(&[
            ("mode", "short".into()),
            ("n", n.to_string()),
            ("m", m.to_string()),
            ("grid", (1usize << 20).to_string()),
            ("weight", "liouville".into()),
        ]),
        dir,
    )?;
    let ExpsumData::Short { result, .. } = o.data else {
        unreachable!("short mode")
    };
    let ok = result.by_count < 0.05 && result.by_length < 0.05;
    Ok((
        ok,
        format!(
            "M = {m}: max/(M+1) = {}, max/M = {} (< 0.05)",
            fmt_f64(result.by_count),
            fmt_f64(result.by_length)
        ),
        o.files,
    ))
}

fn rotation_average(dir: &Path, _seed: u64) -> CliResult<Checked> {
    let o = cmd_avg(
        &config(&[
            ("system", "rotation".into()),
            ("alpha", "golden".into()),
            ("x", "0".into()),
            ("observables", "char:1,char:1".into()),
            ("powers", "1,2".into()),
            ("weight", "liouville".into()),
            ("n_max", "1000000".into()),
            ("rho", "2".into()),
        ]),
        dir,
    )?;
    let (_, a) = o.data.series.last().expect("grid");
    let (u, v) = o.data.reduction.expect("two characters on a rotation");
    let diff = (u - v).norm();
    Ok((
        a.norm() < 0.01 && diff <= 1e-9,
        format!("|A_N| at 10^6 = {} (< 0.01), reduction diff = {} (<= 1e-9)", fmt_f64(a.norm()), fmt_f64(diff)),
        o.files,
    ))
}

fn maximal_ratio(dir: &Path, seed: u64) -> CliResult<Checked> {
    let o = cmd_maximal(
        &config(&[
            ("modulus", "4096".into()),
            ("rho", "2".into()),
            ("k", "8".into()),
            ("trials", "20".into()),
            ("seed", seed.to_string()),
            ("n0", "1".into()),
            ("weight", "liouville".into()),
        ]),
        dir,
    )?;
    let mut growth = 0.0f64;
    let mut bounded = true;
    let mut worst_diff = 0.0f64;
    for t in &o.data {
        let c = &t.stats.cumulative_ratios;
        bounded &= c.iter().all(|&r| r <= 4.0 * c[1]);
        growth = growth.max(c.iter().map(|r| r / c[1]).fold(0.0, f64::max));
        let (_, _, s, d) = t.transference.expect("transference enabled");
        worst_diff = worst_diff.max((s - d).abs());
    }
    Ok((
        o.data.len() == 20 && bounded && worst_diff <= 1e-12,
        format!(
            "max ratio(K)/ratio(2) = {} (<= 4), transference max diff = {} (<= 1e-12)",
            fmt_f64(growth),
            fmt_f64(worst_diff)
        ),
        o.files,
    ))
}

fn spectral(dir: &Path, seed: u64) -> CliResult<Checked> {
    let o = cmd_expsum(
        &config(&[
            ("mode", "spectral".into()),
            ("modulus", "1024".into()),
            ("n", "256".into()),
            ("seed", seed.to_string()),
            ("weight", "liouville".into()),
        ]),
        dir,
    )?;
    let ExpsumData::Spectral(checks) = o.data else {
        unreachable!("spectral mode")
    };
    let worst = checks.iter().map(|c| c.lhs / c.rhs).fold(0.0, f64::max);
    let ok = checks.len() == 1024 && checks.iter().all(|c| c.lhs <= c.rhs * 1.02);
    Ok((ok, format!("1024 characters, max lhs/rhs = {} (<= 1.02)", fmt_f64(worst)), o.files))
}

fn correlation_report(dir: &Path, entries: &[(&str, String)]) -> CliResult<(ewl::kbsz::CorrelationReport, Vec<PathBuf>)> {
    let o = cmd_kbsz(&config(entries), dir)?;
    match o.data {
        KbszData::Correlation(r) => Ok((r, o.files)),
        KbszData::Aperiodicity(_) => unreachable!("criterion mode"),
    }
}

fn correlations(dir: &Path, seed: u64) -> CliResult<Checked> {
    const N: usize = 10_000;
    let (lam, mut files) = correlation_report(
        &dir.join("liouville"),
        &[
            ("mode", "criterion".into()),
            ("sequence", "liouville".into()),
            ("weight", "liouville".into()),
            ("n_max", N.to_string()),
            ("grid", N.to_string()),
            ("p_min", "2".into()),
            ("p_max", "100".into()),
        ],
    )?;
    let k = lam.primes.len();
    let mut worst_lambda = 0.0f64;
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            worst_lambda = worst_lambda.max((lam.entry(i, j) - 1.0).norm());
        }
    }

    let (rot, more) = correlation_report(
        &dir.join("rotation"),
        &[
            ("mode", "criterion".into()),
            ("sequence", "orbit".into()),
            ("system", "rotation".into()),
            ("alpha", "sqrt2-1".into()),
            ("x", "0".into()),
            ("observables", "char:1".into()),
            ("weight", "liouville".into()),
            ("n_max", N.to_string()),
            ("grid", N.to_string()),
            ("p_min", "2".into()),
            ("p_max", "3".into()),
        ],
    )?;
    files.extend(more);
    let c23 = rot.entry(0, 1);
    let a = Fixed64::SQRT2_MINUS_1.to_f64();
    let e = |t: f64| Complex64::from_polar(1.0, std::f64::consts::TAU * t);
    let one = Complex64::new(1.0, 0.0);
    // (1/N) Σ_{n≤N} e(−nα)
    let closed = e(-a) * (one - e(-(N as f64) * a)) / (one - e(-a)) / N as f64;
    let diff = (c23 - closed).norm();
    let bound = 1.0 / (N as f64 * (2.0 * (std::f64::consts::PI * a).sin()).abs());
    files.push(write_csv(
        dir.join("closed_form.csv"),
        &meta(10, seed, &[("alpha", "sqrt2-1".into())]),
        "p,q,N,re,im,closed_re,closed_im,abs_diff,geometric_bound",
        &[format!(
            "2,3,{N},{},{},{},{},{},{}",
            fmt_f64(c23.re),
            fmt_f64(c23.im),
            fmt_f64(closed.re),
            fmt_f64(closed.im),
            fmt_f64(diff),
            fmt_f64(bound)
        )],
    )?);
    let ok = k == 25 && worst_lambda < 1e-12 && diff <= 1e-9;
    Ok((
        ok,
        format!(
            "lambda: max |c - 1| over {} pairs = {} (< 1e-12); rotation |c(2,3) - closed form| = {} (<= 1e-9)",
            k * (k - 1),
            fmt_f64(worst_lambda),
            fmt_f64(diff)
        ),
        files,
    ))
}

fn tree(root: &Path) -> CliResult<BTreeMap<PathBuf, Vec<u8>>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).map_err(|e| CliError::io(&dir, e))? {
            let path = entry.map_err(|e| CliError::io(&dir, e))?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
                out.insert(path.strip_prefix(root).expect("under root").to_path_buf(), bytes);
            }
        }
    }
    Ok(out)
}

fn determinism(dir: &Path, seed: u64) -> CliResult<Checked> {
    let runs = [dir.join("run-a"), dir.join("run-b")];
    for run in &runs {
        if run.exists() {
            fs::remove_dir_all(run).map_err(|e| CliError::io(run, e))?;
        }
        for id in 1..=10 {
            evaluate(id, run, seed)?;
        }
    }
    let (a, b) = (tree(&runs[0])?, tree(&runs[1])?);
    let mut rows = Vec::new();
    let mut identical = a.len() == b.len();
    for (path, bytes) in &a {
        let same = b.get(path) == Some(bytes);
        identical &= same;
        rows.push(format!("{},{},{}", path.display(), bytes.len(), same));
    }
    let file = write_csv(dir.join("determinism.csv"), &meta(11, seed, &[]), "file,bytes,identical", &rows)?;
    let same = rows.iter().filter(|r| r.ends_with(",true")).count();
    Ok((
        identical && !a.is_empty(),
        format!("criteria 1-10 run twice: {same} of {} report files byte-identical", a.len().max(b.len())),
        vec![file],
    ))
}
