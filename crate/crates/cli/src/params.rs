//! Typed access to a [`RunConfig`] with defaults, plus the value syntaxes
//! shared by several commands.
//!
//! Every key a command reads is recorded with its resolved value; the record
//! becomes the parameter echo in report headers.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use ewl::arith::{load_or_build, weight_table, WeightKind, WeightSequence};
use ewl::dynsys::{Observable, SystemSpec};
use ewl::rng::Ensemble;
use ewl::{Complex64, Fixed64};

use crate::{CliError, CliResult, RunConfig};

pub struct Params<'a> {
    cfg: &'a RunConfig,
    used: RefCell<BTreeMap<String, String>>,
}

impl<'a> Params<'a> {
    pub fn new(cfg: &'a RunConfig) -> Params<'a> {
        Params {
            cfg,
            used: RefCell::new(BTreeMap::new()),
        }
    }

    fn record(&self, key: &str, value: String) {
        self.used.borrow_mut().insert(key.to_string(), value);
    }

    pub fn raw(&self, key: &str) -> Option<&'a str> {
        self.cfg.get(key)
    }

    pub fn text(&self, key: &str, default: &str) -> String {
        let v = self.cfg.get(key).unwrap_or(default).to_string();
        self.record(key, v.clone());
        v
    }

    pub fn optional_text(&self, key: &str) -> Option<String> {
        let v = self.cfg.get(key)?.to_string();
        self.record(key, v.clone());
        Some(v)
    }

    pub fn value<T>(&self, key: &str, default: T) -> CliResult<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = match self.cfg.get(key) {
            Some(s) => parse_scalar(key, s)?,
            None => default,
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn optional<T>(&self, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.cfg.get(key) {
            Some(s) => {
                let v: T = parse_scalar(key, s)?;
                self.record(key, v.to_string());
                Ok(Some(v))
            }
            None => Ok(None),
        }
    }

    pub fn list<T>(&self, key: &str, default: &str) -> CliResult<Vec<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        let s = self.text(key, default);
        parse_list(key, &s)
    }

    pub fn optional_list<T>(&self, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.optional_text(key).map(|s| parse_list(key, &s)).transpose()
    }

    pub fn fixed(&self, key: &str, default: &str) -> CliResult<Fixed64> {
        let s = self.text(key, default);
        parse_fixed(key, &s)
    }

    pub fn bool(&self, key: &str, default: bool) -> CliResult<bool> {
        let v = match self.cfg.get(key) {
            Some("true" | "yes" | "1") => true,
            Some("false" | "no" | "0") => false,
            Some(other) => return Err(CliError::invalid(key, format!("expected true or false, got `{other}`"))),
            None => default,
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    /// The resolved parameters read so far.
    pub fn echo(&self) -> Vec<(String, String)> {
        self.used.borrow().iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    /// Configured keys the command never read.
    pub fn unused(&self) -> Vec<String> {
        let used = self.used.borrow();
        self.cfg.keys().filter(|k| !used.contains_key(*k)).map(str::to_string).collect()
    }
}

fn parse_scalar<T>(key: &str, s: &str) -> CliResult<T>
where
    T: FromStr,
    T::Err: Display,
{
    let cleaned = s.replace('_', "");
    if let Some(v) = parse_power(&cleaned) {
        if let Ok(t) = v.to_string().parse() {
            return Ok(t);
        }
    }
    cleaned
        .parse()
        .map_err(|e| CliError::invalid(key, format!("cannot parse `{s}`: {e}")))
}

// `10^6`, `2^20`
fn parse_power(s: &str) -> Option<u128> {
    let (b, e) = s.split_once('^')?;
    b.trim().parse::<u128>().ok()?.checked_pow(e.trim().parse().ok()?)
}

fn parse_list<T>(key: &str, s: &str) -> CliResult<Vec<T>>
where
    T: FromStr,
    T::Err: Display,
{
    s.split(',').map(|item| parse_scalar(key, item.trim())).collect()
}

/// `golden`, `sqrt2-1`, `p/q`, `0x<hex>` (raw 64-bit fraction) or a decimal.
pub fn parse_fixed(key: &str, s: &str) -> CliResult<Fixed64> {
    let s = s.trim();
    match s {
        "golden" => return Ok(Fixed64::GOLDEN),
        "sqrt2-1" => return Ok(Fixed64::SQRT2_MINUS_1),
        _ => {}
    }
    if let Some(hex) = s.strip_prefix("0x") {
        return u64::from_str_radix(hex, 16)
            .map(Fixed64)
            .map_err(|e| CliError::invalid(key, format!("bad hex fraction `{s}`: {e}")));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = parse_scalar(key, p.trim())?;
        let q: u64 = parse_scalar(key, q.trim())?;
        if q == 0 {
            return Err(CliError::invalid(key, "denominator must be nonzero"));
        }
        return Ok(Fixed64::from_ratio(p, q));
    }
    let t: f64 = parse_scalar(key, s)?;
    if !t.is_finite() {
        return Err(CliError::invalid(key, "must be finite"));
    }
    Ok(Fixed64::from_f64(t))
}

/// Named weight up to `n`: `liouville`, `moebius`, `one`, `zero`, or
/// `custom` read from `weight_file` (one value per line, `re` or `re,im`).
/// With `cache_dir` set, `liouville` and `moebius` go through the sieve cache.
pub fn weight(p: &Params, n: usize) -> CliResult<WeightSequence> {
    let name = p.text("weight", "liouville");
    let n = n.max(1);
    match name.as_str() {
        "zero" => Ok(WeightSequence::zero(n)),
        "custom" | "file" => {
            let path = p
                .optional_text("weight_file")
                .ok_or_else(|| CliError::invalid("weight_file", "weight = custom needs weight_file"))?;
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            let mut values = Vec::new();
            for (i, line) in text.lines().map(str::trim).enumerate() {
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let parts: Vec<f64> = parse_list("weight_file", line)
                    .map_err(|_| CliError::invalid("weight_file", format!("line {}: cannot parse `{line}`", i + 1)))?;
                match parts.as_slice() {
                    [re] => values.push(Complex64::new(*re, 0.0)),
                    [re, im] => values.push(Complex64::new(*re, *im)),
                    _ => return Err(CliError::invalid("weight_file", format!("line {}: expected re or re,im", i + 1))),
                }
            }
            let w = WeightSequence::custom(values)?;
            if w.limit() < n {
                return Err(CliError::invalid(
                    "weight_file",
                    format!("holds {} values, the run needs {n}", w.limit()),
                ));
            }
            Ok(w)
        }
        other => {
            let kind: WeightKind = other
                .parse()
                .map_err(|e| CliError::invalid("weight", format!("{e}")))?;
            match (kind, p.optional_text("cache_dir")) {
                (WeightKind::Liouville | WeightKind::Moebius, Some(dir)) => {
                    let (lambda, mu, _) = load_or_build(&PathBuf::from(dir), n as u64)?;
                    Ok(if kind == WeightKind::Liouville { lambda } else { mu })
                }
                _ => Ok(weight_table(kind, n as u64)?),
            }
        }
    }
}

/// `rotation` (with `alpha`), `doubling`, or `cyclic` (with `modulus`).
pub fn system(p: &Params) -> CliResult<SystemSpec> {
    match p.text("system", "rotation").as_str() {
        "rotation" => Ok(SystemSpec::rotation(p.fixed("alpha", "golden")?)),
        "doubling" => Ok(SystemSpec::doubling()),
        "cyclic" | "cyclic_shift" => Ok(SystemSpec::cyclic_shift(p.value("modulus", 1024u64)?)?),
        other => Err(CliError::invalid(
            "system",
            format!("unknown system `{other}` (rotation, doubling, cyclic)"),
        )),
    }
}

/// Comma-separated observables: `char:K`, `one`, `interval:A:B`, `signs`.
/// `signs` is a random ±1 table on `Z_J`, drawn from stream `i` of `seed`
/// for the observable at position `i`.
pub fn observables(p: &Params, default: &str, modulus: Option<u64>) -> CliResult<Vec<Observable>> {
    let spec = p.text("observables", default);
    let mut out = Vec::new();
    for (i, item) in spec.split(',').map(str::trim).enumerate() {
        let parts: Vec<&str> = item.split(':').collect();
        let obs = match parts.as_slice() {
            ["one"] => Observable::constant_one(),
            ["char", k] => Observable::Character {
                k: parse_scalar("observables", k)?,
            },
            ["interval", a, b] => Observable::IntervalIndicator {
                left: parse_fixed("observables", a)?,
                right: parse_fixed("observables", b)?,
            },
            ["signs"] => {
                let j = modulus.ok_or_else(|| CliError::invalid("observables", "`signs` needs system = cyclic"))?;
                let seed = p.value("seed", crate::commands::DEFAULT_SEED)?;
                Observable::table(Ensemble::new(seed, i as u64).signs(j as usize))?
            }
            _ => {
                return Err(CliError::invalid(
                    "observables",
                    format!("cannot parse `{item}` (char:K, one, interval:A:B, signs)"),
                ))
            }
        };
        out.push(obs);
    }
    Ok(out)
}

pub fn modulus_of(sys: &SystemSpec) -> Option<u64> {
    match sys.system {
        ewl::dynsys::System::CyclicShift { modulus } => Some(modulus),
        _ => None,
    }
}
