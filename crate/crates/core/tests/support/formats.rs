use std::path::PathBuf;

use mint::io::{read_activations, read_idx_images, read_idx_labels, read_model, IoError, RunConfig};
use mint::prune::{read_mask, PruneError};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read(name: &str) -> Vec<u8> {
    std::fs::read(fixture(name)).unwrap()
}

#[derive(Debug, PartialEq)]
pub enum Class {
    Format,
    Corruption,
    Config,
    Mask,
}

fn io_class(e: IoError) -> Class {
    match e {
        IoError::Format(_) => Class::Format,
        IoError::Corruption(_) => Class::Corruption,
        IoError::Config { .. } => Class::Config,
        IoError::Io(e) => panic!("unexpected i/o error {e}"),
    }
}

fn patched(name: &str, f: impl FnOnce(&mut Vec<u8>)) -> Vec<u8> {
    let mut b = read(name);
    f(&mut b);
    b
}

/// Malformed inputs paired with the error class each must produce.
pub fn corruption_cases() -> Vec<(&'static str, Class, Class)> {
    let model = |b: Vec<u8>| io_class(read_model(&b).unwrap_err());
    let acts = |b: Vec<u8>| io_class(read_activations(&b).unwrap_err());
    let mask = |t: &str| match read_mask(t).unwrap_err() {
        PruneError::MaskFormat { .. } => Class::Mask,
        e => panic!("unexpected {e}"),
    };
    let config = |t: &str| io_class(RunConfig::parse(t).unwrap_err());
    let golden_mask = String::from_utf8(read("golden_mask.txt")).unwrap();

    // Offsets into golden.mintact: record 1 name at 12..17, its labels at 25..31, values at 31..55.
    let cases: Vec<(&str, Class, Class)> = vec![
        ("model: bad magic", model(patched("golden.mintmdl", |b| b[0] = b'X')), Class::Format),
        ("model: truncated weights", model(patched("golden.mintmdl", |b| b.truncate(30))), Class::Corruption),
        ("model: trailing bytes", model(patched("golden.mintmdl", |b| b.push(0))), Class::Corruption),
        ("model: unknown activation tag", model(patched("golden.mintmdl", |b| b[20] = 9)), Class::Format),
        ("model: zero layers", model(patched("golden.mintmdl", |b| b[8] = 0)), Class::Format),
        ("model: empty file", model(Vec::new()), Class::Format),
        ("acts: bad magic", acts(patched("golden.mintact", |b| b[7] = b'2')), Class::Format),
        ("acts: truncated", acts(patched("golden.mintact", |b| b.truncate(b.len() - 3))), Class::Corruption),
        ("acts: checksum mismatch", acts(patched("golden.mintact", |b| *b.last_mut().unwrap() ^= 1)), Class::Corruption),
        ("acts: reserved label", acts(patched("golden.mintact", |b| b[25..27].copy_from_slice(&[0xFF, 0xFF]))), Class::Format),
        ("acts: NaN value", acts(patched("golden.mintact", |b| b[31..35].copy_from_slice(&f32::NAN.to_le_bytes()))), Class::Format),
        ("acts: label disagreement", acts(patched("golden.mintact", |b| {
            let second = 55 + 4 + 28 + 8;
            b[second] = 2;
        })), Class::Format),
        ("acts: duplicate layer", acts(patched("golden.mintact", |b| {
            let first = b[8..55].to_vec();
            b.extend_from_slice(&first);
        })), Class::Format),
        ("acts: zero filters", acts(patched("golden.mintact", |b| b[21..25].copy_from_slice(&0u32.to_le_bytes()))), Class::Format),
        ("mask: missing header", mask(&golden_mask.replacen("MINTMASK 1", "MASK", 1)), Class::Mask),
        ("mask: bad character", mask(&golden_mask.replacen("1100", "1x00", 1)), Class::Mask),
        ("mask: short row", mask(&golden_mask.replacen("1100", "110", 1)), Class::Mask),
        ("mask: trailing content", mask(&format!("{golden_mask}extra\n")), Class::Mask),
        ("mask: missing end", mask(&golden_mask.replacen("end\n", "", 1)), Class::Mask),
        ("config: unknown key", config("seed = 1\ncolour = red\n"), Class::Config),
        ("config: duplicate key", config("seed = 1\nseed = 2\n"), Class::Config),
        ("config: missing equals", config("seed 1\n"), Class::Config),
        ("config: bad value", config("gamma = 1.5\n"), Class::Config),
        ("idx: bad magic", io_class(read_idx_images(&patched("golden-images.idx", |b| b[3] = 1)).unwrap_err()), Class::Format),
        ("idx: truncated pixels", io_class(read_idx_images(&patched("golden-images.idx", |b| b.truncate(20))).unwrap_err()), Class::Corruption),
        ("idx: trailing labels", io_class(read_idx_labels(&patched("golden-labels.idx", |b| b.push(1))).unwrap_err()), Class::Corruption),
    ];
    cases
}

