//! On-disk memo of evaluated numerators. Purely an accelerator: results never depend on it.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::engine::Engine;
use crate::qmod::QMod;

pub const HEADER: &str = "k3gw-cache v1";
pub const ENV_VAR: &str = "K3GW_CACHE";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache io: {0}")]
    Io(#[from] io::Error),
    #[error("cache header {0:?} is not {HEADER:?}")]
    Header(String),
    #[error("cache line {line}: {reason}")]
    Record { line: usize, reason: String },
}

/// Path named by `K3GW_CACHE`, if set and non-empty.
pub fn path_from_env() -> Option<PathBuf> {
    std::env::var_os(ENV_VAR).filter(|s| !s.is_empty()).map(PathBuf::from)
}

pub fn read(path: &Path) -> Result<Vec<(String, i64, QMod)>, CacheError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut lines = text.lines();
    match lines.next() {
        None => return Ok(Vec::new()),
        Some(h) if h.trim() == HEADER => {}
        Some(h) => return Err(CacheError::Header(h.to_string())),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: &str| CacheError::Record { line: i + 2, reason: reason.to_string() };
        let mut parts = line.split('\t');
        let (Some(key), Some(w), Some(n), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(bad("expected three tab-separated fields"));
        };
        let w: i64 = w.parse().map_err(|_| bad("weight is not an integer"))?;
        let n = QMod::from_compact(n).map_err(|e| bad(&e.to_string()))?;
        if !n.is_zero() && (w < 0 || !n.is_homogeneous(w as u32)) {
            return Err(bad("numerator does not have the recorded weight"));
        }
        out.push((key.to_string(), w, n));
    }
    Ok(out)
}

pub fn write(path: &Path, entries: &[(String, i64, QMod)]) -> Result<(), CacheError> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = io::BufWriter::new(fs::File::create(&tmp)?);
        writeln!(f, "{HEADER}")?;
        for (k, w, n) in entries {
            writeln!(f, "{k}\t{w}\t{}", n.to_compact())?;
        }
        f.flush()?;
    }
    fs::rename(tmp, path)?;
    Ok(())
}

/// Seeds `engine` from the file; returns the number of records.
pub fn load_into(engine: &mut Engine, path: &Path) -> Result<usize, CacheError> {
    let entries = read(path)?;
    let n = entries.len();
    engine.preload(entries.into_iter().map(|(k, _, v)| (k, v)));
    Ok(n)
}

/// Writes the engine's memo, merged with whatever the file already holds.
pub fn save_from(engine: &Engine, path: &Path) -> Result<usize, CacheError> {
    let mut all: std::collections::BTreeMap<String, (i64, QMod)> =
        read(path)?.into_iter().map(|(k, w, n)| (k, (w, n))).collect();
    for (k, w, n) in engine.memo_entries() {
        all.insert(k, (w, n));
    }
    let v: Vec<_> = all.into_iter().map(|(k, (w, n))| (k, w, n)).collect();
    write(path, &v)?;
    Ok(v.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Basis, Bracket};

    #[test]
    fn round_trip_gives_identical_results() {
        let dir = std::env::temp_dir().join(format!("k3gw-cache-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("memo.txt");
        let b = Bracket::new(vec![(4, Basis::One), (1, Basis::Pt), (2, Basis::E(1)), (1, Basis::Fd(1))]);
        let mut cold = Engine::new();
        let want = cold.numerator(&b).unwrap();
        let n = save_from(&cold, &path).unwrap();
        assert!(n > 0);
        let mut warm = Engine::new();
        assert_eq!(load_into(&mut warm, &path).unwrap(), n);
        assert_eq!(warm.numerator(&b).unwrap(), want);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn rejects_foreign_header() {
        let path = std::env::temp_dir().join(format!("k3gw-bad-{}", std::process::id()));
        fs::write(&path, "something else\n").unwrap();
        assert!(matches!(read(&path), Err(CacheError::Header(_))));
        fs::remove_file(path).unwrap();
    }

    #[test]
    fn missing_file_is_empty() {
        assert!(read(Path::new("/nonexistent/k3gw")).unwrap().is_empty());
    }
}
