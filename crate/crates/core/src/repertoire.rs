//! The repertoire: `V` types, each with a probability and a magnitude.

use crate::cost::CostModel;
use crate::error::{Error, Result};

/// Which of the two aligned value vectors a swap exchanges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwapKind {
    Probability,
    Magnitude,
}

/// One type of the repertoire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Item<'a> {
    pub id: &'a str,
    pub probability: f64,
    pub magnitude: f64,
}

/// `V >= 1` types with probabilities summing to one and positive magnitudes.
///
/// Built from raw frequencies, which are always renormalised. Entries with
/// frequency zero carry no probability mass and are dropped, so every stored
/// probability is strictly positive. Entry order is preserved.
#[derive(Debug, Clone, PartialEq)]
pub struct Repertoire {
    ids: Vec<String>,
    probabilities: Vec<f64>,
    magnitudes: Vec<f64>,
}

impl Repertoire {
    pub fn from_frequencies<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64, f64)>,
        S: Into<String>,
    {
        let mut ids = Vec::new();
        let mut freqs = Vec::new();
        let mut magnitudes = Vec::new();
        let mut seen_any = false;
        for (id, frequency, magnitude) in entries {
            seen_any = true;
            let id = id.into();
            if !frequency.is_finite() || frequency < 0.0 {
                return Err(Error::InvalidFrequency { id, frequency });
            }
            if magnitude.is_nan() || magnitude <= 0.0 {
                return Err(Error::NonpositiveMagnitude { id, magnitude });
            }
            if !magnitude.is_finite() {
                return Err(Error::NonFiniteMagnitude { id });
            }
            if frequency == 0.0 {
                continue;
            }
            ids.push(id);
            freqs.push(frequency);
            magnitudes.push(magnitude);
        }
        if !seen_any {
            return Err(Error::Empty);
        }
        let total: f64 = freqs.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroTotalFrequency);
        }
        let probabilities = freqs.into_iter().map(|f| f / total).collect();
        Ok(Self { ids, probabilities, magnitudes })
    }

    /// Builds a repertoire from aligned frequency and magnitude slices; ids are
    /// the 1-based positions.
    pub fn from_values(frequencies: &[f64], magnitudes: &[f64]) -> Result<Self> {
        if frequencies.len() != magnitudes.len() {
            return Err(Error::InvalidParameter(format!(
                "{} frequencies but {} magnitudes",
                frequencies.len(),
                magnitudes.len()
            )));
        }
        Self::from_frequencies(
            frequencies.iter().zip(magnitudes).enumerate().map(|(k, (&f, &l))| ((k + 1).to_string(), f, l)),
        )
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    /// Always false for a constructed repertoire; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn item(&self, index: usize) -> Option<Item<'_>> {
        (index < self.len()).then(|| Item {
            id: &self.ids[index],
            probability: self.probabilities[index],
            magnitude: self.magnitudes[index],
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Item<'_>> + '_ {
        (0..self.len()).map(move |k| self.item(k).unwrap())
    }

    /// Costs `g(l_i)` in item order.
    pub fn costs(&self, g: &CostModel) -> Vec<f64> {
        self.magnitudes.iter().map(|&l| g.cost(l)).collect()
    }

    /// Same types and probabilities with new magnitudes.
    pub fn with_magnitudes(&self, magnitudes: Vec<f64>) -> Result<Self> {
        if magnitudes.len() != self.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} magnitudes, got {}",
                self.len(),
                magnitudes.len()
            )));
        }
        for (id, &m) in self.ids.iter().zip(&magnitudes) {
            if m.is_nan() || m <= 0.0 {
                return Err(Error::NonpositiveMagnitude { id: id.clone(), magnitude: m });
            }
            if !m.is_finite() {
                return Err(Error::NonFiniteMagnitude { id: id.clone() });
            }
        }
        Ok(Self { ids: self.ids.clone(), probabilities: self.probabilities.clone(), magnitudes })
    }

    /// Item indices ordered by decreasing probability, ties kept in input order.
    pub fn rank_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.probabilities[b].total_cmp(&self.probabilities[a]));
        order
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.len() {
            Err(Error::IndexOutOfRange { index, len: self.len() })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::SameIndex(i));
        }
        Ok(())
    }

    pub(crate) fn swap_in_place(&mut self, i: usize, j: usize, kind: SwapKind) {
        match kind {
            SwapKind::Probability => self.probabilities.swap(i, j),
            SwapKind::Magnitude => self.magnitudes.swap(i, j),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalises_frequencies() {
        let r = Repertoire::from_frequencies([("a", 3.0, 1.0), ("b", 1.0, 2.0)]).unwrap();
        assert_eq!(r.probabilities(), &[0.75, 0.25]);
        assert_eq!(r.magnitudes(), &[1.0, 2.0]);
        assert_eq!(r.ids(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn single_type() {
        let r = Repertoire::from_frequencies([("a", 1.0, 1.0)]).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.probabilities(), &[1.0]);
    }

    #[test]
    fn rejects_nonpositive_magnitude() {
        let err = Repertoire::from_frequencies([("a", 1.0, 1.0), ("b", 1.0, -2.0)]).unwrap_err();
        assert!(matches!(err, Error::NonpositiveMagnitude { ref id, .. } if id == "b"));
        assert!(err.to_string().contains("nonpositive magnitude"));
    }

    #[test]
    fn rejects_empty_and_zero_total() {
        let none: Vec<(String, f64, f64)> = vec![];
        assert!(matches!(Repertoire::from_frequencies(none), Err(Error::Empty)));
        assert!(matches!(
            Repertoire::from_frequencies([("a", 0.0, 1.0), ("b", 0.0, 2.0)]),
            Err(Error::ZeroTotalFrequency)
        ));
        assert!(matches!(Repertoire::from_frequencies([("a", -1.0, 1.0)]), Err(Error::InvalidFrequency { .. })));
    }

    #[test]
    fn drops_zero_frequency_entries() {
        let r = Repertoire::from_frequencies([("a", 2.0, 1.0), ("b", 0.0, 5.0), ("c", 2.0, 3.0)]).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.ids(), &["a".to_string(), "c".to_string()]);
    }

    #[test]
    fn rank_order_is_stable() {
        let r = Repertoire::from_values(&[1.0, 3.0, 1.0, 3.0], &[1.0; 4]).unwrap();
        assert_eq!(r.rank_order(), vec![1, 3, 0, 2]);
    }
}
