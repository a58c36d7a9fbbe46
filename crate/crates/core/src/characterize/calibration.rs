use super::{CharacterizeError, Result};

pub const DEFAULT_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct BinStats {
    pub count: usize,
    /// Zero for empty bins.
    pub mean_confidence: f64,
    /// Zero for empty bins.
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityProfile {
    /// `bins + 1` equally spaced edges from 0 to 1.
    pub edges: Vec<f64>,
    pub bins: Vec<BinStats>,
    pub ece: f64,
}

/// Expected calibration error over equal-width bins: bin `b` of `B` holds
/// confidences in `(b / B, (b + 1) / B]`, with zero confidence in the first bin.
/// `ECE = sum_b (n_b / n) |acc_b - conf_b|`.
pub fn ece(confidences: &[f64], correct: &[bool], bin_count: usize) -> Result<ReliabilityProfile> {
    if confidences.is_empty() {
        return Err(CharacterizeError::Domain("no samples".into()));
    }
    if confidences.len() != correct.len() {
        return Err(CharacterizeError::Domain(format!(
            "{} confidences for {} outcomes",
            confidences.len(),
            correct.len()
        )));
    }
    if bin_count == 0 {
        return Err(CharacterizeError::Domain("at least one bin is required".into()));
    }
    if let Some(c) = confidences.iter().find(|c| !(0.0..=1.0).contains(*c)) {
        return Err(CharacterizeError::Domain(format!("confidence {c} outside [0, 1]")));
    }

    let mut sums = vec![(0usize, 0.0f64, 0usize); bin_count];
    for (&c, &ok) in confidences.iter().zip(correct) {
        let b = ((c * bin_count as f64).ceil() as usize).clamp(1, bin_count) - 1;
        sums[b].0 += 1;
        sums[b].1 += c;
        sums[b].2 += ok as usize;
    }
    let n = confidences.len() as f64;
    let mut total = 0.0;
    let bins = sums
        .into_iter()
        .map(|(count, conf, hits)| {
            if count == 0 {
                return BinStats { count, mean_confidence: 0.0, accuracy: 0.0 };
            }
            let (mean_confidence, accuracy) = (conf / count as f64, hits as f64 / count as f64);
            total += count as f64 / n * (accuracy - mean_confidence).abs();
            BinStats { count, mean_confidence, accuracy }
        })
        .collect();
    let edges = (0..=bin_count).map(|b| b as f64 / bin_count as f64).collect();
    Ok(ReliabilityProfile { edges, bins, ece: total })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overconfident_half_right() {
        let p = ece(&[1.0; 4], &[true, false, true, false], 10).unwrap();
        assert_eq!(p.ece, 0.5);
        assert_eq!(p.bins[9].count, 4);
    }

    #[test]
    fn calibrated_bins() {
        let conf = [0.25, 0.25, 0.25, 0.25, 0.75, 0.75, 0.75, 0.75];
        let ok = [true, false, false, false, true, true, true, false];
        let p = ece(&conf, &ok, 2).unwrap();
        assert!(p.ece.abs() < 1e-15);
        assert_eq!(p.bins.iter().map(|b| b.count).sum::<usize>(), 8);
    }

    #[test]
    fn edges_and_errors() {
        let p = ece(&[0.0, 0.5, 0.5000001], &[true, true, true], 2).unwrap();
        assert_eq!(p.edges, vec![0.0, 0.5, 1.0]);
        assert_eq!(p.bins.iter().map(|b| b.count).collect::<Vec<_>>(), vec![2, 1]);
        assert!(ece(&[], &[], 10).is_err());
        assert!(ece(&[0.5], &[true], 0).is_err());
        assert!(ece(&[1.5], &[true], 3).is_err());
    }
}
