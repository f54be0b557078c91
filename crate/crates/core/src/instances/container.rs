//! Binary instance container.
//!
//! All integers are unsigned 64-bit and all reals IEEE-754 binary64, both
//! little-endian. Layout:
//!
//! | offset          | size      | field                         |
//! |-----------------|-----------|-------------------------------|
//! | 0               | 8         | magic `DCPXINST`              |
//! | 8               | 4         | format version (u32, = 1)     |
//! | 12              | 4         | reserved, zero                |
//! | 16              | 8         | m                             |
//! | 24              | 8         | n                             |
//! | 32              | 8         | s                             |
//! | 40              | 8         | seed                          |
//! | 48              | 8         | noise_scale (f64)             |
//! | 56              | 8 m n     | A, row-major                  |
//! | 56 + 8mn        | 8 m       | b                             |
//! | ...             | 8 n       | ground truth                  |
//! | ...             | 8 s       | support indices, ascending    |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::ProblemInstance;
use crate::error::{DcError, Result};
use crate::linalg::DenseMatrix;

pub const CONTAINER_MAGIC: &[u8; 8] = b"DCPXINST";
pub const CONTAINER_VERSION: u32 = 1;

pub fn write_instance(inst: &ProblemInstance, mut w: impl Write) -> Result<()> {
    w.write_all(CONTAINER_MAGIC)?;
    w.write_all(&CONTAINER_VERSION.to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    for v in [inst.m() as u64, inst.n() as u64, inst.s() as u64, inst.seed] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&inst.noise_scale.to_le_bytes())?;
    for v in inst.a.as_slice().iter().chain(&inst.b).chain(&inst.ground_truth) {
        w.write_all(&v.to_le_bytes())?;
    }
    for &i in &inst.support {
        w.write_all(&(i as u64).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn bad(msg: impl Into<String>) -> DcError {
    DcError::Container(msg.into())
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64s(r: &mut impl Read, count: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; count * 8];
    r.read_exact(&mut bytes)?;
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

pub fn read_instance(mut r: impl Read) -> Result<ProblemInstance> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CONTAINER_MAGIC {
        return Err(bad("bad magic"));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != CONTAINER_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    r.read_exact(&mut word)?;

    let m = read_u64(&mut r)? as usize;
    let n = read_u64(&mut r)? as usize;
    let s = read_u64(&mut r)? as usize;
    let seed = read_u64(&mut r)?;
    let noise_scale = f64::from_bits(read_u64(&mut r)?);
    if m == 0 || n == 0 || s > n || m.checked_mul(n).is_none() {
        return Err(bad(format!("inconsistent header m={m} n={n} s={s}")));
    }

    let a = DenseMatrix::new(m, n, read_f64s(&mut r, m * n)?).map_err(|e| bad(e.to_string()))?;
    let b = read_f64s(&mut r, m)?;
    let ground_truth = read_f64s(&mut r, n)?;
    let mut support = Vec::with_capacity(s);
    for _ in 0..s {
        support.push(read_u64(&mut r)? as usize);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(bad("trailing bytes after support"));
    }
    ProblemInstance::from_parts(a, b, ground_truth, support, seed, noise_scale).map_err(|e| bad(e.to_string()))
}

pub fn save_instance(inst: &ProblemInstance, path: impl AsRef<Path>) -> Result<()> {
    write_instance(inst, BufWriter::new(File::create(path)?))
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<ProblemInstance> {
    read_instance(BufReader::new(File::open(path)?))
}
