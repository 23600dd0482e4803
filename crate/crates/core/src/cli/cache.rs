//! Persisted tables.
//!
//! File layout, little-endian:
//!
//! | bytes | field |
//! |-------|-------|
//! | 4 | magic `HCTB` |
//! | 2 | format version |
//! | 1 | element type (0 = i128, 1 = f64) |
//! | 1 | length `L` of the kind tag |
//! | L | kind tag, UTF-8 |
//! | 8 | element count `N` |
//! | 32 | SHA-256 of the payload |
//! | N·size | payload |

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"HCTB";
pub const VERSION: u16 = 1;
/// Environment variable naming the cache directory when `--cache-dir` is absent.
pub const CACHE_DIR_ENV: &str = "HECKE_CIRCLE_CACHE_DIR";

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    I128(Vec<i128>),
    F64(Vec<f64>),
}

impl Column {
    fn type_tag(&self) -> u8 {
        match self {
            Column::I128(_) => 0,
            Column::F64(_) => 1,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Column::I128(v) => v.len(),
            Column::F64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn payload(&self) -> Vec<u8> {
        match self {
            Column::I128(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
            Column::F64(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Built,
}

pub fn encode(kind: &str, column: &Column) -> Result<Vec<u8>> {
    if kind.len() > 255 {
        return Err(Error::Config(format!("table kind tag '{kind}' longer than 255 bytes")));
    }
    let payload = column.payload();
    let mut out = Vec::with_capacity(48 + kind.len() + payload.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(column.type_tag());
    out.push(kind.len() as u8);
    out.extend_from_slice(kind.as_bytes());
    out.extend_from_slice(&(column.len() as u64).to_le_bytes());
    out.extend_from_slice(&Sha256::digest(&payload));
    out.extend_from_slice(&payload);
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(corrupt(self.path, format!("truncated at byte {}", self.bytes.len())));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
}

fn corrupt(path: &Path, reason: impl Into<String>) -> Error {
    Error::Corruption { path: path.to_path_buf(), reason: reason.into() }
}

/// Decodes a file written by [`encode`], checking every header field and the
/// payload checksum against the expected kind.
pub fn decode(bytes: &[u8], kind: &str, path: &Path) -> Result<Column> {
    let mut r = Reader { bytes, pos: 0, path };
    if r.take(4)? != MAGIC {
        return Err(corrupt(path, "bad magic"));
    }
    let version = u16::from_le_bytes(r.take(2)?.try_into().unwrap());
    if version != VERSION {
        return Err(corrupt(path, format!("format version {version}, expected {VERSION}")));
    }
    let tag = r.take(1)?[0];
    let len = r.take(1)?[0] as usize;
    let found = std::str::from_utf8(r.take(len)?).map_err(|_| corrupt(path, "kind tag is not UTF-8"))?;
    if found != kind {
        return Err(corrupt(path, format!("holds '{found}', expected '{kind}'")));
    }
    let n = u64::from_le_bytes(r.take(8)?.try_into().unwrap()) as usize;
    let checksum: [u8; 32] = r.take(32)?.try_into().unwrap();
    let size = match tag {
        0 => 16,
        1 => 8,
        t => return Err(corrupt(path, format!("unknown element type {t}"))),
    };
    let payload = r.take(n.checked_mul(size).ok_or_else(|| corrupt(path, "element count overflows"))?)?;
    if r.pos != bytes.len() {
        return Err(corrupt(path, format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    if Sha256::digest(payload).as_slice() != checksum {
        return Err(corrupt(path, "checksum mismatch"));
    }
    Ok(match tag {
        0 => Column::I128(payload.chunks_exact(16).map(|c| i128::from_le_bytes(c.try_into().unwrap())).collect()),
        _ => Column::F64(payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect()),
    })
}

/// A directory of persisted tables, one file per `(kind, N)`.
#[derive(Debug, Clone)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// The explicit directory if given, else the environment override.
    pub fn resolve(explicit: Option<&Path>) -> Option<Self> {
        explicit
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, kind: &str, n: usize) -> PathBuf {
        self.dir.join(format!("{kind}-{n}.hctb"))
    }

    /// Loads `(kind, n)` if present, otherwise builds, persists and returns it.
    /// A file that exists but fails validation is an error, not a rebuild.
    pub fn get_or_build(
        &self,
        kind: &str,
        n: usize,
        build: impl FnOnce() -> Result<Column>,
    ) -> Result<(Column, CacheStatus)> {
        let path = self.path(kind, n);
        if path.exists() {
            let col = decode(&fs::read(&path)?, kind, &path)?;
            if col.len() != n {
                return Err(corrupt(&path, format!("holds {} elements, expected {n}", col.len())));
            }
            return Ok((col, CacheStatus::Hit));
        }
        let col = build()?;
        fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, encode(kind, &col)?)?;
        fs::rename(&tmp, &path)?;
        Ok((col, CacheStatus::Built))
    }
}
