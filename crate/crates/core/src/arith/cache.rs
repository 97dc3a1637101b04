//! Sieve cache file.
//!
//! Layout (little-endian): the four bytes `EWL1`, `N_max` as `u64`, then
//! `N_max` bytes of λ(1..=N_max) as `i8`, then `N_max` bytes of μ as `i8`.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use super::weights::{WeightKind, WeightSequence};
use crate::{Error, Result};

pub const CACHE_MAGIC: [u8; 4] = *b"EWL1";
const HEADER_LEN: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Built,
}

pub fn cache_path(dir: &Path, n_max: u64) -> PathBuf {
    dir.join(format!("sieve-{n_max}.ewl"))
}

pub fn write_cache<W: Write>(mut out: W, lambda: &WeightSequence, mu: &WeightSequence) -> Result<()> {
    let (Some(l), Some(m)) = (lambda.signs(), mu.signs()) else {
        return Err(Error::validation("weight", "cache holds sign tables only"));
    };
    if lambda.kind() != WeightKind::Liouville || mu.kind() != WeightKind::Moebius {
        return Err(Error::validation("weight", "cache expects (liouville, moebius)"));
    }
    if l.len() != m.len() {
        return Err(Error::validation("weight", "lambda and mu tables differ in length"));
    }
    out.write_all(&CACHE_MAGIC)?;
    out.write_all(&(l.len() as u64).to_le_bytes())?;
    out.write_all(&sign_bytes(l))?;
    out.write_all(&sign_bytes(m))?;
    out.flush()?;
    Ok(())
}

fn sign_bytes(v: &[i8]) -> Vec<u8> {
    v.iter().map(|&s| s as u8).collect()
}

pub fn read_cache<R: Read>(mut input: R) -> Result<(WeightSequence, WeightSequence)> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let format = |reason: String| Error::Format {
        what: "sieve cache",
        reason,
    };
    if bytes.len() < HEADER_LEN {
        return Err(format(format!("file has {} bytes, header needs {HEADER_LEN}", bytes.len())));
    }
    if bytes[..4] != CACHE_MAGIC {
        return Err(format(format!("bad magic {:?}, expected \"EWL1\"", &bytes[..4])));
    }
    let n_max = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
    let expected = n_max
        .checked_mul(2)
        .and_then(|b| b.checked_add(HEADER_LEN as u64))
        .ok_or_else(|| format(format!("N_max = {n_max} overflows the length")))?;
    if n_max == 0 || bytes.len() as u64 != expected {
        return Err(format(format!(
            "N_max = {n_max} implies {expected} bytes, file has {}",
            bytes.len()
        )));
    }
    let n = n_max as usize;
    let lambda: Vec<i8> = bytes[HEADER_LEN..HEADER_LEN + n].iter().map(|&b| b as i8).collect();
    let mu: Vec<i8> = bytes[HEADER_LEN + n..].iter().map(|&b| b as i8).collect();
    if let Some(i) = lambda.iter().position(|&s| s != 1 && s != -1) {
        return Err(format(format!("lambda({}) = {} is not ±1", i + 1, lambda[i])));
    }
    if let Some(i) = mu.iter().position(|&s| !(-1..=1).contains(&s)) {
        return Err(format(format!("mu({}) = {} is not in {{-1, 0, 1}}", i + 1, mu[i])));
    }
    Ok((
        WeightSequence::from_signs(WeightKind::Liouville, lambda),
        WeightSequence::from_signs(WeightKind::Moebius, mu),
    ))
}

pub fn save_cache(path: &Path, lambda: &WeightSequence, mu: &WeightSequence) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    // Write then rename so readers never observe a torn file.
    let tmp = path.with_extension("ewl.tmp");
    write_cache(io::BufWriter::new(fs::File::create(&tmp)?), lambda, mu)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_cache(path: &Path) -> Result<(WeightSequence, WeightSequence)> {
    read_cache(io::BufReader::new(fs::File::open(path)?))
}

/// Load λ and μ for `n_max` from `dir`, building and saving them on a miss.
/// A cache file that fails validation is rebuilt.
pub fn load_or_build(dir: &Path, n_max: u64) -> Result<(WeightSequence, WeightSequence, CacheStatus)> {
    let path = cache_path(dir, n_max);
    if path.exists() {
        if let Ok((l, m)) = load_cache(&path) {
            if l.limit() as u64 == n_max {
                return Ok((l, m, CacheStatus::Hit));
            }
        }
    }
    let (l, m) = WeightSequence::liouville_and_moebius(n_max)?;
    save_cache(&path, &l, &m)?;
    Ok((l, m, CacheStatus::Built))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_bit_exact() {
        let (l, m) = WeightSequence::liouville_and_moebius(6).unwrap();
        let mut buf = Vec::new();
        write_cache(&mut buf, &l, &m).unwrap();
        let mut expected = b"EWL1".to_vec();
        expected.extend_from_slice(&6u64.to_le_bytes());
        expected.extend_from_slice(&[1, 0xff, 0xff, 1, 0xff, 1]);
        expected.extend_from_slice(&[1, 0xff, 0xff, 0, 0xff, 1]);
        assert_eq!(buf, expected);
        let (l2, m2) = read_cache(&buf[..]).unwrap();
        assert_eq!((l2, m2), (l, m));
    }

    #[test]
    fn loader_rejects_bad_files() {
        let (l, m) = WeightSequence::liouville_and_moebius(10).unwrap();
        let mut buf = Vec::new();
        write_cache(&mut buf, &l, &m).unwrap();

        let mut bad_magic = buf.clone();
        bad_magic[3] = b'2';
        assert!(matches!(read_cache(&bad_magic[..]), Err(Error::Format { .. })));

        let truncated = &buf[..buf.len() - 1];
        assert!(matches!(read_cache(truncated), Err(Error::Format { .. })));

        let mut padded = buf.clone();
        padded.push(0);
        assert!(matches!(read_cache(&padded[..]), Err(Error::Format { .. })));

        let mut bad_value = buf.clone();
        bad_value[12] = 0;
        assert!(matches!(read_cache(&bad_value[..]), Err(Error::Format { .. })));

        assert!(read_cache(&b"EW"[..]).is_err());
    }

    #[test]
    fn only_sign_tables_are_cached() {
        let l = crate::arith::weight_table(WeightKind::Liouville, 4).unwrap();
        let z = WeightSequence::zero(4);
        assert!(write_cache(Vec::new(), &l, &z).is_err());
        assert!(write_cache(Vec::new(), &l, &l).is_err());
    }

    #[test]
    fn warm_cache_is_a_hit() {
        let dir = tempfile::tempdir().unwrap();
        let (l1, m1, s1) = load_or_build(dir.path(), 1000).unwrap();
        let (l2, m2, s2) = load_or_build(dir.path(), 1000).unwrap();
        assert_eq!(s1, CacheStatus::Built);
        assert_eq!(s2, CacheStatus::Hit);
        assert_eq!((l1, m1), (l2, m2));

        fs::write(cache_path(dir.path(), 1000), b"garbage").unwrap();
        let (_, _, s3) = load_or_build(dir.path(), 1000).unwrap();
        assert_eq!(s3, CacheStatus::Built);
    }
}
