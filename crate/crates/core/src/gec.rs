//! Graph Efficiency Coefficient: structural error times normalized token cost.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::graph::EditDistance;

/// Tokens consumed by one or more chat interactions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenUsage {
    pub input_tokens: u64,
    pub output_tokens: u64,
}

impl TokenUsage {
    pub fn new(input_tokens: u64, output_tokens: u64) -> Self {
        TokenUsage {
            input_tokens,
            output_tokens,
        }
    }

    pub fn total(&self) -> u64 {
        self.input_tokens + self.output_tokens
    }
}

impl Add for TokenUsage {
    type Output = TokenUsage;

    fn add(self, rhs: TokenUsage) -> TokenUsage {
        TokenUsage::new(
            self.input_tokens + rhs.input_tokens,
            self.output_tokens + rhs.output_tokens,
        )
    }
}

impl AddAssign for TokenUsage {
    fn add_assign(&mut self, rhs: TokenUsage) {
        *self = *self + rhs;
    }
}

impl Sum for TokenUsage {
    fn sum<I: Iterator<Item = TokenUsage>>(iter: I) -> TokenUsage {
        iter.fold(TokenUsage::default(), Add::add)
    }
}

impl<'a> Sum<&'a TokenUsage> for TokenUsage {
    fn sum<I: Iterator<Item = &'a TokenUsage>>(iter: I) -> TokenUsage {
        iter.copied().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GecConfig {
    /// Maximum tokens allowed in a single interaction.
    pub t_max: u64,
}

impl GecConfig {
    /// Returns `None` for `t_max == 0`.
    pub fn new(t_max: u64) -> Option<Self> {
        (t_max > 0).then_some(GecConfig { t_max })
    }
}

impl Default for GecConfig {
    fn default() -> Self {
        GecConfig { t_max: 4096 }
    }
}

/// `edit.total * sum(input + output) / t_max`. Lower is better.
pub fn gec(edit: &EditDistance, usages: &[TokenUsage], cfg: &GecConfig) -> f64 {
    let tokens: u64 = usages.iter().map(TokenUsage::total).sum();
    edit.total as f64 * tokens as f64 / cfg.t_max as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edit(total: usize) -> EditDistance {
        EditDistance {
            added: total,
            removed: 0,
            total,
        }
    }

    #[test]
    fn zero_edit_gives_zero() {
        let u = [TokenUsage::new(500, 500)];
        assert_eq!(gec(&edit(0), &u, &GecConfig::default()), 0.0);
    }

    #[test]
    fn direct_substitution() {
        let u = [TokenUsage::new(800, 200)];
        let v = gec(&edit(10), &u, &GecConfig::new(4096).unwrap());
        assert!((v - 2.4414).abs() < 1e-4, "{v}");
    }

    #[test]
    fn linear_in_edit() {
        let u = [TokenUsage::new(120, 30), TokenUsage::new(90, 10)];
        let cfg = GecConfig::default();
        assert_eq!(gec(&edit(14), &u, &cfg), 2.0 * gec(&edit(7), &u, &cfg));
    }

    #[test]
    fn empty_usage_and_zero_t_max() {
        assert_eq!(gec(&edit(5), &[], &GecConfig::default()), 0.0);
        assert!(GecConfig::new(0).is_none());
    }
}
