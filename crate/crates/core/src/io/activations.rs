//! Activation dump container.
//!
//! ```text
//! "MINTACT1"
//! repeated until end of file, one record per layer:
//!   u32  name length in bytes
//!   ...  name, UTF-8
//!   u32  m, rows
//!   u32  N, filters
//!   u16  x m    class labels (< 65535)
//!   f32  x m*N  activations, row-major
//! ```
//!
//! Every record carries the same label vector. A layer name may end in
//! `@fnv1a64=<16 hex digits>`: the FNV-1a 64-bit hash of that record's
//! activation bytes as stored. Readers verify it.

use std::collections::BTreeSet;
use std::hash::Hasher;
use std::path::Path;

use fnv::FnvHasher;

use super::{put_f32s, IoError, Reader, Result};
use crate::nn::{ActivationDump, ActivationLayer};

pub const ACTIVATIONS_MAGIC: &[u8; 8] = b"MINTACT1";
const CHECKSUM_TAG: &str = "@fnv1a64=";

fn fnv1a64(values: &[f32]) -> u64 {
    let mut h = FnvHasher::default();
    for v in values {
        h.write(&v.to_le_bytes());
    }
    h.finish()
}

/// `base` with the checksum suffix for `values` appended.
pub fn checksum_name(base: &str, values: &[f32]) -> String {
    format!("{base}{CHECKSUM_TAG}{:016x}", fnv1a64(values))
}

/// Split a layer name into its base and optional embedded checksum. A
/// malformed suffix is treated as part of the base name.
pub fn split_checksum(name: &str) -> (&str, Option<u64>) {
    if let Some(pos) = name.rfind(CHECKSUM_TAG) {
        let hex = &name[pos + CHECKSUM_TAG.len()..];
        if hex.len() == 16 {
            if let Ok(sum) = u64::from_str_radix(hex, 16) {
                return (&name[..pos], Some(sum));
            }
        }
    }
    (name, None)
}

pub fn write_activations(dump: &ActivationDump) -> Result<Vec<u8>> {
    if !dump.layers.is_empty() && dump.rows() == 0 {
        return Err(IoError::Format("layers with zero samples cannot be written".into()));
    }
    dump.validate().map_err(|e| IoError::Format(e.to_string()))?;
    if dump.labels.iter().any(|&l| l == u16::MAX) {
        return Err(IoError::Format("label 65535 is reserved".into()));
    }
    let m = u32::try_from(dump.rows()).map_err(|_| IoError::Format("too many rows".into()))?;
    let mut out = ACTIVATIONS_MAGIC.to_vec();
    for layer in &dump.layers {
        let n = u32::try_from(layer.filters).map_err(|_| IoError::Format("too many filters".into()))?;
        let name = layer.name.as_bytes();
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name);
        out.extend_from_slice(&m.to_le_bytes());
        out.extend_from_slice(&n.to_le_bytes());
        for l in &dump.labels {
            out.extend_from_slice(&l.to_le_bytes());
        }
        put_f32s(&mut out, layer.values.iter().copied());
    }
    Ok(out)
}

pub fn write_activations_file(dump: &ActivationDump, path: &Path) -> Result<()> {
    let bytes = write_activations(dump)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn read_activations(bytes: &[u8]) -> Result<ActivationDump> {
    if bytes.len() < ACTIVATIONS_MAGIC.len() || &bytes[..8] != ACTIVATIONS_MAGIC {
        return Err(IoError::Format("not an activation file (bad magic)".into()));
    }
    let mut r = Reader::new(&bytes[8..]);
    let mut dump = ActivationDump::default();
    let mut names = BTreeSet::new();
    while r.remaining() > 0 {
        let len = r.u32_le("layer name length")? as usize;
        let name = std::str::from_utf8(r.take(len, "layer name")?)
            .map_err(|_| IoError::Format("layer name is not UTF-8".into()))?
            .to_string();
        if name.is_empty() || !names.insert(name.clone()) {
            return Err(IoError::Format(format!("empty or duplicate layer name {name:?}")));
        }
        let m = r.u32_le("sample count")? as usize;
        let n = r.u32_le("filter count")? as usize;
        if m == 0 || n == 0 {
            return Err(IoError::Format(format!("layer {name} declares {m} rows and {n} filters")));
        }
        let label_bytes = r.take(m.checked_mul(2).ok_or_else(|| IoError::Corruption("size overflow".into()))?, "labels")?;
        let labels: Vec<u16> = label_bytes.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect();
        if labels.contains(&u16::MAX) {
            return Err(IoError::Format(format!("layer {name} uses reserved label 65535")));
        }
        let count = m.checked_mul(n).ok_or_else(|| IoError::Corruption("size overflow".into()))?;
        let values = r.f32s(count, "activation matrix")?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(IoError::Format(format!("layer {name} holds non-finite activations")));
        }
        if let (_, Some(sum)) = split_checksum(&name) {
            if sum != fnv1a64(&values) {
                return Err(IoError::Corruption(format!("checksum mismatch in layer {name}")));
            }
        }
        if dump.layers.is_empty() {
            dump.labels = labels;
        } else if labels != dump.labels {
            return Err(IoError::Format(format!("layer {name} disagrees with earlier layers on rows or labels")));
        }
        dump.layers.push(ActivationLayer { name, filters: n, values });
    }
    Ok(dump)
}

pub fn read_activations_file(path: &Path) -> Result<ActivationDump> {
    read_activations(&std::fs::read(path)?)
}
