/// Per-arm sufficient statistics: pull count, reward sum and, on request,
/// the full sample list (needed by robust and windowed estimators).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ArmStats {
    count: usize,
    reward_sum: f64,
    samples: Option<Vec<f64>>,
}

impl ArmStats {
    pub fn new() -> Self {
        Self::default()
    }

    /// Statistics that also keep every observed reward.
    pub fn retaining() -> Self {
        Self {
            samples: Some(Vec::new()),
            ..Self::default()
        }
    }

    pub fn from_samples(samples: &[f64]) -> Self {
        let mut s = Self::retaining();
        for &r in samples {
            s.record(r);
        }
        s
    }

    /// Statistics with a given count and mean, no samples retained.
    pub fn with_mean(count: usize, mean: f64) -> Self {
        Self {
            count,
            reward_sum: mean * count as f64,
            samples: None,
        }
    }

    pub fn record(&mut self, reward: f64) {
        self.count += 1;
        self.reward_sum += reward;
        if let Some(samples) = &mut self.samples {
            samples.push(reward);
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn reward_sum(&self) -> f64 {
        self.reward_sum
    }

    /// Empirical mean, undefined for an unplayed arm.
    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.reward_sum / self.count as f64)
    }

    pub fn samples(&self) -> Option<&[f64]> {
        self.samples.as_deref()
    }

    pub fn clear(&mut self) {
        self.count = 0;
        self.reward_sum = 0.0;
        if let Some(s) = &mut self.samples {
            s.clear();
        }
    }
}

/// Half-width `sqrt(2 ln(1/delta) / count)` of the subgaussian confidence interval.
pub fn confidence_width(count: usize, delta: f64) -> f64 {
    (2.0 * (1.0 / delta).ln() / count.max(1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retained_samples_track_count() {
        let mut s = ArmStats::retaining();
        assert_eq!(s.mean(), None);
        s.record(1.0);
        s.record(0.0);
        assert_eq!(s.count(), 2);
        assert_eq!(s.samples().unwrap().len(), 2);
        assert_eq!(s.mean(), Some(0.5));
        s.clear();
        assert_eq!(s.count(), 0);
        assert!(s.samples().unwrap().is_empty());
    }
}
