//! On-disk table cache.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    4 bytes  "ABSM"
//! version  u32      1
//! name     u32 length, then UTF-8 bytes
//! n_max    u64
//! kind     u8       0 = i8, 1 = u8, 2 = u32, 3 = u64 (integer); 4 = f64 (real)
//! values   n_max raw entries of the width given by `kind`
//! ```
//!
//! Loading a cached table yields the same bits a fresh sieve would produce.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sieves::{FunctionSpec, FunctionTable, SieveConfig, Values};

pub const MAGIC: &[u8; 4] = b"ABSM";
pub const VERSION: u32 = 1;

fn kind_tag(values: &Values) -> u8 {
    match values {
        Values::Signed8(_) => 0,
        Values::Flag(_) => 1,
        Values::Count(_) => 2,
        Values::Wide(_) => 3,
        Values::Real(_) => 4,
    }
}

pub fn write_table<W: Write>(mut w: W, table: &FunctionTable) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    let name = table.name().as_bytes();
    w.write_all(&(name.len() as u32).to_le_bytes())?;
    w.write_all(name)?;
    w.write_all(&(table.n_max() as u64).to_le_bytes())?;
    w.write_all(&[kind_tag(table.values())])?;
    match table.values() {
        Values::Signed8(v) => {
            let bytes: Vec<u8> = v.iter().map(|&x| x as u8).collect();
            w.write_all(&bytes)?;
        }
        Values::Flag(v) => w.write_all(v)?,
        Values::Count(v) => {
            for x in v {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Values::Wide(v) => {
            for x in v {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Values::Real(v) => {
            for x in v {
                w.write_all(&x.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_values<R: Read, T, const N: usize>(
    r: &mut R,
    n: usize,
    decode: fn([u8; N]) -> T,
) -> Result<Vec<T>> {
    let mut bytes = vec![0u8; n * N];
    r.read_exact(&mut bytes)?;
    Ok(bytes
        .chunks_exact(N)
        .map(|c| decode(c.try_into().unwrap()))
        .collect())
}

pub fn read_table<R: Read>(mut r: R) -> Result<FunctionTable> {
    if &read_array::<_, 4>(&mut r)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let name_len = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let mut name = vec![0u8; name_len];
    r.read_exact(&mut name)?;
    let name = String::from_utf8(name).map_err(|_| Error::Format("name is not UTF-8".into()))?;
    let n = usize::try_from(u64::from_le_bytes(read_array(&mut r)?))
        .map_err(|_| Error::Format("n_max does not fit in memory".into()))?;
    let [kind] = read_array::<_, 1>(&mut r)?;
    let values = match kind {
        0 => Values::Signed8(read_values(&mut r, n, |[b]: [u8; 1]| b as i8)?),
        1 => Values::Flag(read_values(&mut r, n, |[b]: [u8; 1]| b)?),
        2 => Values::Count(read_values(&mut r, n, u32::from_le_bytes)?),
        3 => Values::Wide(read_values(&mut r, n, u64::from_le_bytes)?),
        4 => Values::Real(read_values(&mut r, n, f64::from_le_bytes)?),
        k => return Err(Error::Format(format!("unknown kind {k}"))),
    };
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after values".into()));
    }
    FunctionTable::new(name, values)
}

/// A directory of cached tables, keyed by function name and n_max.
#[derive(Debug, Clone)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, spec: FunctionSpec, n_max: usize) -> PathBuf {
        self.dir.join(format!("{spec}-{n_max}.absm"))
    }

    /// Loads the table if a valid cache file exists, otherwise sieves and stores it.
    pub fn load_or_build(
        &self,
        spec: FunctionSpec,
        n_max: usize,
        cfg: &SieveConfig,
    ) -> Result<FunctionTable> {
        let path = self.path_for(spec, n_max);
        if let Ok(file) = fs::File::open(&path) {
            if let Ok(table) = read_table(BufReader::new(file)) {
                if table.n_max() == n_max && table.name() == spec.to_string() {
                    return Ok(table);
                }
            }
        }
        let table = spec.build(n_max, cfg)?;
        fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension("tmp");
        write_table(BufWriter::new(fs::File::create(&tmp)?), &table)?;
        fs::rename(&tmp, &path)?;
        Ok(table)
    }
}
