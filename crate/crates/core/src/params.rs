//! The admissible parameter triple (k, r, t).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Degree and congruencing parameters, admissible in the sense of the
/// constraints: k >= 2, max{2, (k-1)/2} <= t <= k (the half is compared as a
/// rational inequality, i.e. 2t >= k-1), 1 <= r <= k, and r + t >= k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VinogradovParams {
    pub k: u32,
    pub r: u32,
    pub t: u32,
}

impl VinogradovParams {
    pub fn new(k: u32, r: u32, t: u32) -> Result<Self> {
        let p = VinogradovParams { k, r, t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let (k, r, t) = (self.k as i64, self.r as i64, self.t as i64);
        if k < 2 {
            return Err(Error::invalid(format!("k = {k} must be >= 2")));
        }
        if t < 2 || 2 * t < k - 1 || t > k {
            return Err(Error::invalid(format!(
                "t = {t} must satisfy max{{2, (k-1)/2}} <= t <= k for k = {k}"
            )));
        }
        if r < 1 || r > k {
            return Err(Error::invalid(format!("r = {r} must satisfy 1 <= r <= k = {k}")));
        }
        if r + t < k {
            return Err(Error::invalid(format!("r + t = {} must be >= k = {k}", r + t)));
        }
        Ok(())
    }

    /// s = rt, the number of conditioned variables.
    pub fn s(&self) -> u64 {
        self.r as u64 * self.t as u64
    }

    /// All admissible (r, t) pairs for a fixed degree.
    pub fn all_for_k(k: u32) -> Vec<VinogradovParams> {
        let mut out = Vec::new();
        for t in 2..=k {
            for r in 1..=k {
                if let Ok(p) = VinogradovParams::new(k, r, t) {
                    out.push(p);
                }
            }
        }
        out
    }
}
