//! The six commands. Each resolves its parameters, runs the computation,
//! writes its report files under `out` and returns the data it wrote.
//!
//! Random fields for trial `t` come from stream `t` of the configured seed:
//! `f` is drawn first, then `g`, each as `J` signs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ewl::arith::{count_primes, load_or_build, CacheStatus, WeightKind, WeightSequence};
use ewl::averages::{
    cesaro_diagnostics, default_grid, finitary_direct, finitary_fourier, prefix_series, rotation_reduction_check,
    AverageSeries, CesaroReport, FinitaryField,
};
use ewl::dynsys::{orbit_observable, Observable, Point, System, SystemSpec};
use ewl::expsum::{decay_report, short_interval_length, short_interval_max, spectral_norm_check, DecayReport, ShortIntervalMax, SpectralCheck};
use ewl::kbsz::{aperiodicity_check, commuting_experiment, criterion_report, product_observable, AperiodicityReport, CorrelationReport};
use ewl::maximal::{lacunary_grid, sqrtK_ratio, transference_check, MaximalStats};
use ewl::report::{fmt_f64, write_meta, SCHEMA_VERSION};
use ewl::rng::Ensemble;
use ewl::Complex64;

use crate::params::{self, Params};
use crate::{CliError, CliResult, RunConfig, TOOL_VERSION};

/// What a command produced.
#[derive(Debug)]
pub struct Outcome<T> {
    pub data: T,
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    /// Configured keys the command ignored.
    pub unused: Vec<String>,
}

pub const DEFAULT_SEED: u64 = 1;

/// Tool, version, command, then every resolved parameter; the seed is
/// always echoed.
fn header(command: &str, p: &Params) -> CliResult<Vec<(String, String)>> {
    p.value("seed", DEFAULT_SEED)?;
    let mut meta = vec![
        ("tool".to_string(), "ewl".to_string()),
        ("version".to_string(), TOOL_VERSION.to_string()),
        ("command".to_string(), command.to_string()),
    ];
    meta.extend(p.echo());
    Ok(meta)
}

fn write_file(path: PathBuf, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn write_csv(
    path: PathBuf,
    meta: &[(String, String)],
    columns: &str,
    rows: impl IntoIterator<Item = String>,
) -> CliResult<PathBuf> {
    write_file(path, |w| {
        write_meta(w, meta)?;
        writeln!(w, "{columns}")?;
        for r in rows {
            writeln!(w, "{r}")?;
        }
        Ok(())
    })
}

fn signs_pair(modulus: usize, seed: u64, trial: u64) -> (FinitaryField, FinitaryField) {
    let mut rng = Ensemble::new(seed, trial);
    let f = FinitaryField::random_signs(modulus, &mut rng);
    let g = FinitaryField::random_signs(modulus, &mut rng);
    (f, g)
}

fn start_point(p: &Params, sys: &SystemSpec) -> CliResult<Point> {
    Ok(match sys.system {
        System::CyclicShift { .. } => Point::Residue(p.value("x", 0u64)?),
        _ => Point::Torus(p.fixed("x", "0")?),
    })
}

fn grid_or_default(p: &Params, n_max: usize, rho: f64) -> CliResult<Vec<usize>> {
    match p.optional_list::<usize>("grid")? {
        Some(g) => Ok(g),
        None => Ok(default_grid(n_max, rho)?),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SieveSummary {
    pub n_max: u64,
    pub primes: u64,
    pub squarefree: u64,
    pub sum_lambda: i64,
    pub sum_mu: i64,
    pub cache: CacheStatus,
    pub cache_file: PathBuf,
}

impl std::fmt::Display for SieveSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "N_max={} primes={} squarefree={} sum_lambda={} sum_mu={}",
            self.n_max, self.primes, self.squarefree, self.sum_lambda, self.sum_mu
        )
    }
}

/// Keys: `n_max` (10^6), `cache_dir` (`<out>/cache`).
pub fn cmd_sieve(cfg: &RunConfig, out: &Path) -> CliResult<Outcome<SieveSummary>> {
    let p = Params::new(cfg);
    let n_max: u64 = p.value("n_max", 1_000_000)?;
    let dir = p
        .optional_text("cache_dir")
        .map(PathBuf::from)
        .unwrap_or_else(|| out.join("cache"));
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let (lambda, mu, status) = load_or_build(&dir, n_max)?;
    let last = |w: &WeightSequence| *w.integer_prefix_sums().expect("sign table").last().unwrap_or(&0);
    let squarefree = mu.signs().expect("sign table").iter().filter(|&&s| s != 0).count() as u64;
    let summary = SieveSummary {
        n_max,
        primes: count_primes(n_max),
        squarefree,
        sum_lambda: last(&lambda),
        sum_mu: last(&mu),
        cache: status,
        cache_file: ewl::arith::cache_path(&dir, n_max),
    };
    Ok(Outcome {
        summary: vec![summary.to_string()],
        files: vec![summary.cache_file.clone()],
        data: summary,
        unused: p.unused(),
    })
}

#[derive(Debug, Clone)]
pub struct AvgData {
    pub series: AverageSeries,
    pub cesaro: Option<CesaroReport>,
    /// Orbit-side and collapsed values at `n_max`, for two characters on a rotation.
    pub reduction: Option<(Complex64, Complex64)>,
}

/// Keys: `weight`, `n_max` (10^5), `system`, `alpha`, `modulus`, `x`,
/// `observables` (`char:1,char:1`), `powers` (`1,2,…`), `rho` (2),
/// `grid`, `cesaro` (true), `seed`.
pub fn cmd_avg(cfg: &RunConfig, out: &Path) -> CliResult<Outcome<AvgData>> {
    let p = Params::new(cfg);
    let n_max: usize = p.value("n_max", 100_000)?;
    let sys = params::system(&p)?;
    let x = start_point(&p, &sys)?;
    let obs = params::observables(&p, "char:1,char:1", params::modulus_of(&sys))?;
    let default_powers: Vec<String> = (1..=obs.len()).map(|i| i.to_string()).collect();
    let powers: Vec<i64> = p.list("powers", &default_powers.join(","))?;
    if powers.len() != obs.len() {
        return Err(CliError::invalid(
            "powers",
            format!("{} powers for {} observables", powers.len(), obs.len()),
        ));
    }
    let rho: f64 = p.value("rho", 2.0)?;
    let grid = grid_or_default(&p, n_max, rho)?;
    let with_cesaro = p.bool("cesaro", true)?;
    let n_top = grid.last().copied().unwrap_or(n_max);
    let w = params::weight(&p, n_top)?;

    let orbits = obs
        .iter()
        .zip(&powers)
        .map(|(o, &a)| orbit_observable(&sys, o, x, a, n_top))
        .collect::<ewl::Result<Vec<_>>>()?;
    let mut series = prefix_series(&w, &orbits, &grid)?;
    let cesaro = if with_cesaro {
        Some(cesaro_diagnostics(&series, rho)?)
    } else {
        None
    };
    let reduction = match (&sys.system, x, obs.as_slice(), powers.as_slice()) {
        (System::Rotation { .. }, Point::Torus(x0), [Observable::Character { k: k1 }, Observable::Character { k: k2 }], [a, b]) => {
            Some(rotation_reduction_check(&w, &sys, *k1, *k2, *a, *b, x0, n_top)?)
        }
        _ => None,
    };

    let meta = header("avg", &p)?;
    let mut merged = meta.clone();
    merged.extend(series.meta.iter().filter(|(k, _)| !meta.iter().any(|(m, _)| m == k)).cloned());
    series.meta = merged;
    let mut files = vec![write_file(out.join("avg.csv"), |w| series.write_csv(w))?];
    let (n_last, a_last) = series.last().expect("non-empty grid");
    let mut summary = vec![format!("|A_N| at N={n_last}: {}", fmt_f64(a_last.norm()))];
    if let Some(c) = &cesaro {
        let mut m = meta.clone();
        m.extend([
            ("bound".to_string(), fmt_f64(c.bound)),
            ("tail_start".to_string(), c.tail_start.to_string()),
            ("tail_sup".to_string(), fmt_f64(c.tail_sup)),
            ("max_gap".to_string(), fmt_f64(c.max_gap)),
            ("full_tail_sup".to_string(), fmt_f64(c.full_tail_sup)),
            ("interpolation_violations".to_string(), c.interpolation_violations.to_string()),
        ]);
        let rows = c.rows.iter().map(|r| {
            format!("{},{},{}", r.n, fmt_f64(r.abs_value), r.gap.map(fmt_f64).unwrap_or_default())
        });
        files.push(write_csv(out.join("cesaro.csv"), &m, "N,abs,gap", rows)?);
        summary.push(format!(
            "lacunary tail sup {} from N={}, max gap {}",
            fmt_f64(c.tail_sup),
            c.tail_start,
            fmt_f64(c.max_gap)
        ));
    }
    if let Some((a, b)) = reduction {
        let row = format!(
            "{n_top},{},{},{},{},{}",
            fmt_f64(a.re),
            fmt_f64(a.im),
            fmt_f64(b.re),
            fmt_f64(b.im),
            fmt_f64((a - b).norm())
        );
        files.push(write_csv(
            out.join("reduction.csv"),
            &meta,
            "N,orbit_re,orbit_im,collapsed_re,collapsed_im,abs_diff",
            [row],
        )?);
        summary.push(format!("rotation reduction difference {}", fmt_f64((a - b).norm())));
    }
    Ok(Outcome {
        data: AvgData {
            series,
            cesaro,
            reduction,
        },
        files,
        summary,
        unused: p.unused(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinitaryTrial {
    pub trial: u64,
    pub max_abs_diff: f64,
    pub sup_direct: f64,
}

/// Keys: `weight`, `modulus` (1024), `n` (256), `trials` (100), `seed` (1).
pub fn cmd_finitary(cfg: &RunConfig, out: &Path) -> CliResult<Outcome<Vec<FinitaryTrial>>> {
    let p = Params::new(cfg);
    let modulus: usize = p.value("modulus", 1024)?;
    let n: usize = p.value("n", 256)?;
    let trials: u64 = p.value("trials", 100)?;
    let seed: u64 = p.value("seed", DEFAULT_SEED)?;
    let w = params::weight(&p, n)?;
    let mut rows = Vec::new();
    for t in 0..trials {
        let (f, g) = signs_pair(modulus, seed, t);
        let d = finitary_direct(&f, &g, &w, n)?;
        let e = finitary_fourier(&f, &g, &w, n)?;
        let diff = d.values().iter().zip(e.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        rows.push(FinitaryTrial {
            trial: t,
            max_abs_diff: diff,
            sup_direct: d.sup(),
        });
    }
    let meta = header("finitary", &p)?;
    let file = write_csv(
        out.join("finitary.csv"),
        &meta,
        "trial,max_abs_diff,sup_direct",
        rows.iter().map(|r| format!("{},{},{}", r.trial, fmt_f64(r.max_abs_diff), fmt_f64(r.sup_direct))),
    )?;
    let worst = rows.iter().map(|r| r.max_abs_diff).fold(0.0, f64::max);
    Ok(Outcome {
        summary: vec![format!("{trials} trials, max |direct - fourier| = {}", fmt_f64(worst))],
        data: rows,
        files: vec![file],
        unused: p.unused(),
    })
}

#[derive(Debug, Clone)]
pub enum ExpsumData {
    Decay(DecayReport),
    Short { n: usize, m: usize, grid: usize, result: ShortIntervalMax },
    Spectral(Vec<SpectralCheck>),
}

/// Keys: `mode` (`decay`, `short`, `spectral`), `weight`.
/// decay: `k` (1), `sizes` (`2^12,2^16,2^20`), `grids` or `grid_factor` (4).
/// short: `n` (10^6), `m` or `eps` (0.075), `grid` (2^20).
/// spectral: `modulus` (1024), `n` (256), `seed` (1).
pub fn cmd_expsum(cfg: &RunConfig, out: &Path) -> CliResult<Outcome<ExpsumData>> {
    let p = Params::new(cfg);
    match p.text("mode", "decay").as_str() {
        "decay" => {
            let k: u32 = p.value("k", 1)?;
            let sizes: Vec<usize> = p.list("sizes", "2^12,2^16,2^20")?;
            let grids: Vec<usize> = match p.optional_list::<usize>("grids")? {
                Some(g) if g.len() == sizes.len() => g,
                Some(g) => {
                    return Err(CliError::invalid(
                        "grids",
                        format!("{} grids for {} sizes", g.len(), sizes.len()),
                    ))
                }
                None => {
                    let factor: usize = p.value("grid_factor", 4)?;
                    sizes.iter().map(|n| n * factor).collect()
                }
            };
            let n_top = sizes.iter().copied().max().unwrap_or(1);
            let w = params::weight(&p, n_top)?;
            let pairs: Vec<(usize, usize)> = sizes.into_iter().zip(grids).collect();
            let report = decay_report(&w, k, &pairs)?;
            let meta = header("expsum", &p)?;
            let file = write_file(out.join("expsum.csv"), |f| report.write_csv(f, &meta))?;
            let mut summary: Vec<String> = report
                .rows
                .iter()
                .map(|r| format!("N={} G={} max_norm={}", r.n, r.grid, fmt_f64(r.max_norm)))
                .collect();
            summary.push(format!("strictly decreasing: {}", report.is_strictly_decreasing()));
            Ok(Outcome {
                data: ExpsumData::Decay(report),
                files: vec![file],
                summary,
                unused: p.unused(),
            })
        }
        "short" => {
            let n: usize = p.value("n", 1_000_000)?;
            let m = match p.optional::<usize>("m")? {
                Some(m) => m,
                None => short_interval_length(n, p.value("eps", 0.075)?),
            };
            let grid: usize = p.value("grid", 1 << 20)?;
            let w = params::weight(&p, n + m)?;
            let result = short_interval_max(&w, n, m, grid)?;
            let meta = header("expsum", &p)?;
            let row = format!(
                "{n},{m},{grid},{},{},{}",
                fmt_f64(result.by_count),
                fmt_f64(result.by_length),
                fmt_f64(result.argmax_theta)
            );
            let file = write_csv(
                out.join("short.csv"),
                &meta,
                "N,M,G,max_by_count,max_by_length,argmax_theta",
                [row],
            )?;
            Ok(Outcome {
                summary: vec![format!(
                    "N={n} M={m} G={grid}: max/(M+1) = {}, max/M = {}",
                    fmt_f64(result.by_count),
                    fmt_f64(result.by_length)
                )],
                data: ExpsumData::Short { n, m, grid, result },
                files: vec![file],
                unused: p.unused(),
            })
        }
        "spectral" => {
            let modulus: usize = p.value("modulus", 1024)?;
            let n: usize = p.value("n", 256)?;
            let seed: u64 = p.value("seed", DEFAULT_SEED)?;
            let w = params::weight(&p, n)?;
            let g = FinitaryField::random_signs(modulus, &mut Ensemble::new(seed, 0));
            let checks = (0..modulus)
                .map(|m| spectral_norm_check(&g, &w, n, m))
                .collect::<ewl::Result<Vec<_>>>()?;
            let meta = header("expsum", &p)?;
            let file = write_csv(
                out.join("spectral.csv"),
                &meta,
                "m,lhs,rhs,ratio",
                checks.iter().enumerate().map(|(m, c)| {
                    let ratio = if c.rhs == 0.0 { 0.0 } else { c.lhs / c.rhs };
                    format!("{m},{},{},{}", fmt_f64(c.lhs), fmt_f64(c.rhs), fmt_f64(ratio))
                }),
            )?;
            let worst = checks
                .iter()
                .map(|c| if c.rhs == 0.0 { 0.0 } else { c.lhs / c.rhs })
                .fold(0.0, f64::max);
            Ok(Outcome {
                summary: vec![format!("{modulus} characters, max lhs/rhs = {}", fmt_f64(worst))],
                data: ExpsumData::Spectral(checks),
                files: vec![file],
                unused: p.unused(),
            })
        }
        other => Err(CliError::invalid(
            "mode",
            format!("unknown expsum mode `{other}` (decay, short, spectral)"),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalTrial {
    pub trial: u64,
    pub stats: MaximalStats,
    /// `(N0, N1, seq_side, dyn_side)`.
    pub transference: Option<(usize, usize, f64, f64)>,
}

/// Keys: `weight`, `modulus` (4096), `rho` (2), `k` (8), `trials` (20),
/// `seed` (1), `transference` (true), `n0` (1), `n1` (`N_{K+1}`).
pub fn cmd_maximal(cfg: &RunConfig, out: &Path) -> CliResult<Outcome<Vec<MaximalTrial>>> {
    let p = Params::new(cfg);
    let modulus: usize = p.value("modulus", 4096)?;
    let rho: f64 = p.value("rho", 2.0)?;
    let k: usize = p.value("k", 8)?;
    let trials: u64 = p.value("trials", 20)?;
    let seed: u64 = p.value("seed", DEFAULT_SEED)?;
    let with_transference = p.bool("transference", true)?;
    let w = params::weight(&p, modulus)?;
    let grid = lacunary_grid(rho, modulus.saturating_sub(1).max(1))?;
    let (n0, n1) = if with_transference {
        let n0: usize = p.value("n0", 1)?;
        let default_n1 = grid.n_k(k + 1).unwrap_or(n0);
        (n0, p.value("n1", default_n1)?)
    } else {
        (0, 0)
    };
    let sys = SystemSpec::cyclic_shift(modulus as u64)?;
    let mut rows = Vec::new();
    for t in 0..trials {
        let (f, g) = signs_pair(modulus, seed, t);
        let stats = sqrtK_ratio(&f, &g, &w, rho, k)?;
        let transference = if with_transference {
            let (s, d) = transference_check(&sys, &f, &g, &w, rho, n0, n1)?;
            Some((n0, n1, s, d))
        } else {
            None
        };
        rows.push(MaximalTrial {
            trial: t,
            stats,
            transference,
        });
    }
    let meta = header("maximal", &p)?;
    let mut lines = Vec::new();
    for r in &rows {
        let mut buf = Vec::new();
        r.stats.write_rows(&mut buf).map_err(|e| CliError::io(out, e))?;
        for l in String::from_utf8(buf).expect("ascii").lines() {
            lines.push(format!("{},{l}", r.trial));
        }
    }
    let mut files = vec![write_csv(
        out.join("maximal.csv"),
        &meta,
        "trial,rho,K,block,block_l1,cumulative_ratio",
        lines,
    )?];
    let growth = rows
        .iter()
        .map(|r| {
            let c = &r.stats.cumulative_ratios;
            let base = c.get(1).copied().unwrap_or(c[0]);
            c.iter().map(|v| if base == 0.0 { 0.0 } else { v / base }).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    let mut summary = vec![format!("{trials} trials, max ratio(K)/ratio(2) = {}", fmt_f64(growth))];
    if with_transference {
        files.push(write_csv(
            out.join("transference.csv"),
            &meta,
            "trial,N0,N1,seq_side,dyn_side,abs_diff",
            rows.iter().filter_map(|r| {
                r.transference.map(|(a, b, s, d)| {
                    format!("{},{a},{b},{},{},{}", r.trial, fmt_f64(s), fmt_f64(d), fmt_f64((s - d).abs()))
                })
            }),
        )?);
        let worst = rows
            .iter()
            .filter_map(|r| r.transference.map(|(_, _, s, d)| (s - d).abs()))
            .fold(0.0, f64::max);
        summary.push(format!("transference max |seq - dyn| = {}", fmt_f64(worst)));
    }
    Ok(Outcome {
        data: rows,
        files,
        summary,
        unused: p.unused(),
    })
}

#[derive(Debug, Clone)]
pub enum KbszData {
    Correlation(CorrelationReport),
    Aperiodicity(AperiodicityReport),
}

fn sequence(p: &Params, len: usize) -> CliResult<(Vec<Complex64>, String)> {
    let name = p.text("sequence", "liouville");
    let values = match name.as_str() {
        "one" => vec![Complex64::new(1.0, 0.0); len],
        "orbit" => {
            let sys = params::system(p)?;
            let x = start_point(p, &sys)?;
            let obs = params::observables(p, "char:1", params::modulus_of(&sys))?;
            let powers: Option<Vec<i64>> = p.optional_list("powers")?;
            let f = product_observable(&sys, &obs, powers.as_deref(), x, len)?;
            let desc = obs.iter().map(Observable::describe).collect::<Vec<_>>().join(" * ");
            return Ok((f, format!("{desc} under {sys}")));
        }
        other => {
            let kind: WeightKind = other
                .parse()
                .map_err(|e: ewl::Error| CliError::invalid("sequence", e.to_string()))?;
            ewl::arith::weight_table(kind, len as u64)?.to_complex(len)?
        }
    };
    Ok((values, name))
}

/// Keys: `mode` (`criterion`, `commuting`, `aperiodicity`), `weight`,
/// `threshold` (0.1).
/// criterion: `sequence` (`liouville`, `moebius`, `one`, `orbit` with the
/// avg keys), `n_max` (10^4), `grid`, `p_min` (11), `p_max` (97).
/// commuting: `alphas` (`golden,sqrt2-1`), `observables`, `x`, `n_max`
/// (10^5), `grid`, `primes` (false) with `p_min`, `p_max`.
/// aperiodicity: `n` (10^5).
pub fn cmd_kbsz(cfg: &RunConfig, out: &Path) -> CliResult<Outcome<KbszData>> {
    let p = Params::new(cfg);
    let mode = p.text("mode", "criterion");
    let threshold: f64 = p.value("threshold", ewl::kbsz::DEFAULT_THRESHOLD)?;
    let (data, summary) = match mode.as_str() {
        "criterion" => {
            let n_max: usize = p.value("n_max", 10_000)?;
            let grid = grid_or_default(&p, n_max, 2.0)?;
            let window = (p.value("p_min", 11u64)?, p.value("p_max", 97u64)?);
            let n_top = grid.last().copied().unwrap_or(n_max);
            let len = n_top
                .checked_mul(window.1 as usize)
                .ok_or_else(|| CliError::invalid("p_max", "N * p_max overflows"))?;
            let (f, desc) = sequence(&p, len)?;
            let w = params::weight(&p, n_top)?;
            let r = criterion_report(&f, desc, window, &w, &grid, threshold)?;
            let line = format!(
                "{} primes, max off-diagonal |c| = {}, hypothesis plausible: {}",
                r.primes.len(),
                r.max_offdiagonal.map(fmt_f64).unwrap_or_default(),
                r.hypothesis_plausible.unwrap_or(false)
            );
            (KbszData::Correlation(r), line)
        }
        "commuting" => {
            let alphas: Vec<String> = p.list("alphas", "golden,sqrt2-1")?;
            let systems = alphas
                .iter()
                .map(|a| params::parse_fixed("alphas", a).map(SystemSpec::rotation))
                .collect::<CliResult<Vec<_>>>()?;
            let default_obs = vec!["char:1"; systems.len()].join(",");
            let obs = params::observables(&p, &default_obs, None)?;
            let x = Point::Torus(p.fixed("x", "0")?);
            let n_max: usize = p.value("n_max", 100_000)?;
            let grid = grid_or_default(&p, n_max, 2.0)?;
            let window = if p.bool("primes", false)? {
                Some((p.value("p_min", 11u64)?, p.value("p_max", 97u64)?))
            } else {
                None
            };
            let n_top = grid.last().copied().unwrap_or(n_max);
            let w = params::weight(&p, n_top)?;
            let r = commuting_experiment(&systems, &obs, x, &w, &grid, window, threshold)?;
            let last = r.weighted.last().map(|v| Complex64::new(v[0], v[1]).norm()).unwrap_or(0.0);
            let line = format!("{}: |w(N)| at N={n_top} = {}", ewl::kbsz::EXPERIMENT_LABEL, fmt_f64(last));
            (KbszData::Correlation(r), line)
        }
        "aperiodicity" => {
            let n: usize = p.value("n", 100_000)?;
            let r8 = ewl::kbsz::APERIODICITY_RANGE as usize;
            let w = params::weight(&p, r8 * n + r8)?;
            let r = aperiodicity_check(&w, n, threshold)?;
            let line = format!("max |mean of nu(an+b)| = {}, aperiodic plausible: {}", fmt_f64(r.max_abs), r.plausible);
            (KbszData::Aperiodicity(r), line)
        }
        other => {
            return Err(CliError::invalid(
                "mode",
                format!("unknown kbsz mode `{other}` (criterion, commuting, aperiodicity)"),
            ))
        }
    };
    let meta: serde_json::Map<String, serde_json::Value> = header("kbsz", &p)?
        .into_iter()
        .map(|(k, v)| (k, serde_json::Value::String(v)))
        .collect();
    let report = match &data {
        KbszData::Correlation(r) => serde_json::to_value(r),
        KbszData::Aperiodicity(r) => serde_json::to_value(r),
    }
    .map_err(|e| CliError::invalid("report", e.to_string()))?;
    let doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "meta": meta,
        "report": report,
    });
    let file = write_file(out.join("kbsz.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &doc)?;
        writeln!(w)
    })?;
    Ok(Outcome {
        data,
        files: vec![file],
        summary: vec![summary],
        unused: p.unused(),
    })
}

/// Dispatches a command by name.
pub fn run(command: &str, cfg: &RunConfig, out: &Path) -> CliResult<(Vec<String>, Vec<PathBuf>, Vec<String>)> {
    macro_rules! go {
        ($f:expr) => {{
            let o = $f(cfg, out)?;
            Ok((o.summary, o.files, o.unused))
        }};
    }
    match command {
        "sieve" => go!(cmd_sieve),
        "avg" => go!(cmd_avg),
        "finitary" => go!(cmd_finitary),
        "expsum" => go!(cmd_expsum),
        "maximal" => go!(cmd_maximal),
        "kbsz" => go!(cmd_kbsz),
        other => Err(CliError::invalid("command", format!("unknown command `{other}`"))),
    }
}
