//! On-disk cache of ω counts for one contiguous segment.
//!
//! Layout (little-endian, no padding):
//!
//! ```text
//! "EPR1" | lo: u64 | hi: u64 | omega[hi - lo]: u8
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sieve::OmegaSegment;

pub const MAGIC: &[u8; 4] = b"EPR1";

pub fn write_segment<W: Write>(seg: &OmegaSegment, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&seg.lo().to_le_bytes())?;
    w.write_all(&seg.hi().to_le_bytes())?;
    w.write_all(seg.omega())?;
    w.flush()?;
    Ok(())
}

pub fn read_segment<R: Read>(mut r: R) -> Result<OmegaSegment> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::CacheFormat("truncated header".into()))?;
    if &magic != MAGIC {
        return Err(Error::CacheFormat(format!("bad magic {magic:?}")));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)
        .map_err(|_| Error::CacheFormat("truncated header".into()))?;
    let lo = u64::from_le_bytes(word);
    r.read_exact(&mut word)
        .map_err(|_| Error::CacheFormat("truncated header".into()))?;
    let hi = u64::from_le_bytes(word);
    if hi <= lo || lo < 2 {
        return Err(Error::CacheFormat(format!("invalid range [{lo}, {hi})")));
    }
    let len = usize::try_from(hi - lo).map_err(|_| Error::CacheFormat("segment too long".into()))?;
    let mut omega = Vec::new();
    r.take(len as u64 + 1).read_to_end(&mut omega)?;
    if omega.len() != len {
        return Err(Error::CacheFormat(format!(
            "expected {len} count bytes, found {}{}",
            omega.len().min(len),
            if omega.len() > len { " plus trailing data" } else { "" }
        )));
    }
    OmegaSegment::from_parts(lo, hi, omega, None)
}

pub fn save(seg: &OmegaSegment, path: &Path) -> Result<()> {
    write_segment(seg, BufWriter::new(File::create(path)?))
}

pub fn load(path: &Path) -> Result<OmegaSegment> {
    read_segment(BufReader::new(File::open(path)?))
}
