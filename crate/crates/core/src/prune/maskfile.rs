//! Text container for pruning masks.
//!
//! ```text
//! MINTMASK 1
//! layers <count>
//! layer <name>
//! shape <rows> <cols>
//! groups <consumer groups> <producer groups>
//! delta <value | none>
//! <rows lines of exactly cols characters '0' / '1'>
//! end
//! ... next layer ...
//! ```
//!
//! Rows are consumer (output) filters. `delta` is the threshold used for the
//! layer after the gamma cap, written in shortest round-trip decimal form;
//! `none` marks a layer that was not pruned. Lines starting with `#` and blank
//! lines are ignored.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{LayerMask, PruneError, PruneMask, Result};

const MAGIC: &str = "MINTMASK 1";

pub fn write_mask<W: Write>(mask: &PruneMask, mut w: W) -> Result<()> {
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "layers {}", mask.layers.len())?;
    for l in &mask.layers {
        if l.name.is_empty() || l.name.contains(['\n', '\r']) || l.name.trim() != l.name {
            return Err(PruneError::Shape(format!("layer name {:?} cannot be stored", l.name)));
        }
        writeln!(w, "layer {}", l.name)?;
        writeln!(w, "shape {} {}", l.rows, l.cols)?;
        writeln!(w, "groups {} {}", l.consumer_groups, l.producer_groups)?;
        match l.delta {
            Some(d) if d.is_finite() => writeln!(w, "delta {d}")?,
            Some(d) => return Err(PruneError::Shape(format!("non-finite delta {d}"))),
            None => writeln!(w, "delta none")?,
        }
        let mut line = String::with_capacity(l.cols + 1);
        for r in 0..l.rows {
            line.clear();
            line.extend(l.bits()[r * l.cols..(r + 1) * l.cols].iter().map(|&b| if b == 1 { '1' } else { '0' }));
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        writeln!(w, "end")?;
    }
    Ok(())
}

pub fn write_mask_file(mask: &PruneMask, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_mask(mask, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<&'a str> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let t = line.trim_end_matches('\r');
            if t.trim().is_empty() || t.starts_with('#') {
                continue;
            }
            return Ok(t);
        }
        Err(self.err("unexpected end of file"))
    }

    fn err(&self, msg: impl Into<String>) -> PruneError {
        PruneError::MaskFormat { line: self.last, msg: msg.into() }
    }

    fn keyword(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next_line()?;
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest.trim()),
            _ => Err(self.err(format!("expected `{key} ...`, found {line:?}"))),
        }
    }

    fn two_counts(&mut self, key: &str) -> Result<(usize, usize)> {
        let rest = self.keyword(key)?;
        let mut it = rest.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
            _ => Err(self.err(format!("`{key}` needs two counts"))),
        }
    }
}

pub fn read_mask(text: &str) -> Result<PruneMask> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    if lines.next_line()? != MAGIC {
        return Err(lines.err("missing MINTMASK 1 header"));
    }
    let count: usize = lines.keyword("layers")?.parse().map_err(|_| lines.err("bad layer count"))?;
    let mut layers = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        let name = lines.keyword("layer")?.to_string();
        if name.is_empty() {
            return Err(lines.err("empty layer name"));
        }
        let (rows, cols) = lines.two_counts("shape")?;
        let groups = lines.two_counts("groups")?;
        if groups.0 == 0 || groups.0 > rows || groups.1 == 0 || groups.1 > cols {
            return Err(lines.err("group counts out of range"));
        }
        let delta = match lines.keyword("delta")? {
            "none" => None,
            v => {
                let d: f64 = v.parse().map_err(|_| lines.err(format!("bad delta {v:?}")))?;
                if !d.is_finite() {
                    return Err(lines.err("non-finite delta"));
                }
                Some(d)
            }
        };
        let mut bits = Vec::with_capacity(rows.saturating_mul(cols).min(1 << 26));
        for _ in 0..rows {
            let row = lines.next_line()?;
            if row.len() != cols {
                return Err(lines.err(format!("mask row has {} entries, expected {cols}", row.len())));
            }
            for c in row.bytes() {
                bits.push(match c {
                    b'0' => 0,
                    b'1' => 1,
                    _ => return Err(lines.err(format!("invalid mask character {:?}", c as char))),
                });
            }
        }
        if lines.next_line()? != "end" {
            return Err(lines.err("expected `end`"));
        }
        layers.push(LayerMask::from_bits(&name, rows, cols, groups, delta, bits)?);
    }
    if let Ok(extra) = lines.next_line() {
        return Err(lines.err(format!("trailing content {extra:?}")));
    }
    Ok(PruneMask { layers })
}

pub fn read_mask_file(path: &Path) -> Result<PruneMask> {
    read_mask(&fs::read_to_string(path)?)
}
