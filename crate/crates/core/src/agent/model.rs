//! Binary model files.
//!
//! Layout, little-endian: magic `KRIVQNET`, format version (u32), variable
//! count (u32), input width (u32), number of widths (u32), the widths (u32
//! each), seed (u64), parameter count (u64), then the parameters as f64 in
//! [`QNetwork::parameters`] order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::network::QNetwork;
use super::STATE_WIDTH;

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"KRIVQNET";

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model file I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a model file")]
    BadMagic,
    #[error("unsupported model format version {0} (expected {MODEL_FORMAT_VERSION})")]
    Version(u32),
    #[error("corrupt model file: {0}")]
    Corrupt(String),
    #[error("model expects input width {found}, problem needs {expected}")]
    InputWidth { expected: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelMeta {
    pub nvars: usize,
    pub seed: u64,
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, ModelError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, ModelError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn write_model<W: Write>(net: &QNetwork, meta: ModelMeta, mut w: W) -> Result<(), ModelError> {
    let widths = net.widths();
    w.write_all(MAGIC)?;
    w.write_all(&MODEL_FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(meta.nvars as u32).to_le_bytes())?;
    w.write_all(&(net.input_width() as u32).to_le_bytes())?;
    w.write_all(&(widths.len() as u32).to_le_bytes())?;
    for x in &widths {
        w.write_all(&(*x as u32).to_le_bytes())?;
    }
    w.write_all(&meta.seed.to_le_bytes())?;
    let params = net.parameters();
    w.write_all(&(params.len() as u64).to_le_bytes())?;
    for p in params {
        w.write_all(&p.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_model<R: Read>(mut r: R) -> Result<(QNetwork, ModelMeta), ModelError> {
    let truncated = |e: ModelError| match e {
        ModelError::Io(io) if io.kind() == std::io::ErrorKind::UnexpectedEof => {
            ModelError::Corrupt("unexpected end of file".into())
        }
        other => other,
    };
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|e| truncated(e.into()))?;
    if &magic != MAGIC {
        return Err(ModelError::BadMagic);
    }
    let version = read_u32(&mut r).map_err(truncated)?;
    if version != MODEL_FORMAT_VERSION {
        return Err(ModelError::Version(version));
    }
    let nvars = read_u32(&mut r).map_err(truncated)? as usize;
    let input = read_u32(&mut r).map_err(truncated)? as usize;
    let depth = read_u32(&mut r).map_err(truncated)? as usize;
    if !(2..=1024).contains(&depth) {
        return Err(ModelError::Corrupt(format!("{depth} layer widths")));
    }
    let mut widths = Vec::with_capacity(depth);
    for _ in 0..depth {
        widths.push(read_u32(&mut r).map_err(truncated)? as usize);
    }
    if widths[0] != input || widths.last() != Some(&1) || widths.contains(&0) {
        return Err(ModelError::Corrupt(format!("inconsistent widths {widths:?}")));
    }
    if input != STATE_WIDTH + 2 * nvars {
        return Err(ModelError::Corrupt(format!("input width {input} does not fit {nvars} variables")));
    }
    let seed = read_u64(&mut r).map_err(truncated)?;
    let count = read_u64(&mut r).map_err(truncated)? as usize;
    let mut net = QNetwork::zeros(&widths);
    if count != net.param_count() {
        return Err(ModelError::Corrupt(format!("{count} parameters, architecture needs {}", net.param_count())));
    }
    let mut params = Vec::with_capacity(count);
    let mut b = [0u8; 8];
    for _ in 0..count {
        r.read_exact(&mut b).map_err(|e| truncated(e.into()))?;
        params.push(f64::from_le_bytes(b));
    }
    if r.read(&mut b)? != 0 {
        return Err(ModelError::Corrupt("trailing bytes".into()));
    }
    net.set_parameters(&params);
    Ok((net, ModelMeta { nvars, seed }))
}

pub fn save_model(net: &QNetwork, meta: ModelMeta, path: &Path) -> Result<(), ModelError> {
    write_model(net, meta, BufWriter::new(File::create(path)?))
}

/// Loads a model and checks it fits a problem in `nvars` variables.
pub fn load_model(path: &Path, nvars: usize) -> Result<(QNetwork, ModelMeta), ModelError> {
    let (net, meta) = read_model(BufReader::new(File::open(path)?))?;
    let expected = STATE_WIDTH + 2 * nvars;
    if net.input_width() != expected {
        return Err(ModelError::InputWidth { expected, found: net.input_width() });
    }
    Ok((net, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_bitwise() {
        let net = QNetwork::new(6, 5, 2, &mut ChaCha8Rng::seed_from_u64(9));
        let meta = ModelMeta { nvars: 2, seed: 9 };
        let mut buf = Vec::new();
        write_model(&net, meta, &mut buf).unwrap();
        let (back, m) = read_model(buf.as_slice()).unwrap();
        assert_eq!(m, meta);
        let bits = |n: &QNetwork| n.parameters().iter().map(|p| p.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&net));
    }

    #[test]
    fn damage_is_detected() {
        let net = QNetwork::new(4, 3, 1, &mut ChaCha8Rng::seed_from_u64(1));
        let mut buf = Vec::new();
        write_model(&net, ModelMeta { nvars: 1, seed: 1 }, &mut buf).unwrap();
        assert!(matches!(read_model(&buf[..buf.len() - 3]), Err(ModelError::Corrupt(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_model(bad.as_slice()), Err(ModelError::BadMagic)));
        let mut bad = buf.clone();
        bad[8] = 7;
        assert!(matches!(read_model(bad.as_slice()), Err(ModelError::Version(7))));
        let mut extra = buf;
        extra.push(0);
        assert!(matches!(read_model(extra.as_slice()), Err(ModelError::Corrupt(_))));
    }
}
