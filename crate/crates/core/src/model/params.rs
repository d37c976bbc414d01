use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Monolithic,
    Incremental,
    Nested,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Monolithic => "monolithic",
            Mode::Incremental => "incremental",
            Mode::Nested => "nested",
        }
    }
}

/// Pattern thresholds.
///
/// `epsilon` is the minimum number of objects, `min_t` the minimum number of
/// timestamps, `theta` the moving-cluster integrity, `min_c` the minimum
/// number of convoys in a group pattern and `min_wei` its minimum coverage
/// weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningParams {
    pub epsilon: usize,
    pub min_t: usize,
    pub theta: f64,
    pub min_c: usize,
    pub min_wei: f64,
    pub block_size: usize,
    pub mode: Mode,
}

impl Default for MiningParams {
    fn default() -> Self {
        MiningParams {
            epsilon: 2,
            min_t: 1,
            theta: 0.5,
            min_c: 1,
            min_wei: 0.0,
            block_size: 25,
            mode: Mode::Monolithic,
        }
    }
}

impl MiningParams {
    pub fn with_epsilon(mut self, epsilon: usize) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_min_t(mut self, min_t: usize) -> Self {
        self.min_t = min_t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon < 1 {
            return Err(Error::Param(format!("epsilon must be >= 1, got {}", self.epsilon)));
        }
        if self.min_t < 1 {
            return Err(Error::Param(format!("min_t must be >= 1, got {}", self.min_t)));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::Param(format!("theta must lie in [0, 1], got {}", self.theta)));
        }
        if self.min_c < 1 {
            return Err(Error::Param(format!("min_c must be >= 1, got {}", self.min_c)));
        }
        if !(0.0..=1.0).contains(&self.min_wei) {
            return Err(Error::Param(format!("min_wei must lie in [0, 1], got {}", self.min_wei)));
        }
        if self.block_size < 1 {
            return Err(Error::Param(format!("block_size must be >= 1, got {}", self.block_size)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_reported_settings() {
        let p = MiningParams::default();
        assert_eq!((p.epsilon, p.min_t, p.min_c), (2, 1, 1));
        assert_eq!(p.min_wei, 0.0);
        assert_eq!(p.block_size, 25);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn out_of_range_thresholds_are_rejected() {
        assert!(MiningParams::default().with_epsilon(0).validate().is_err());
        assert!(MiningParams { theta: 1.5, ..Default::default() }.validate().is_err());
        assert!(MiningParams { min_wei: -0.1, ..Default::default() }.validate().is_err());
        assert!(MiningParams { block_size: 0, ..Default::default() }.validate().is_err());
    }
}
