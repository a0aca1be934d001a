//! Closed parameter intervals sampled at evenly spaced points.

use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// `count` evenly spaced points from `min` to `max`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(invalid("grid", "bounds must be finite"));
        }
        if max < min {
            return Err(invalid("grid", format!("max {max} is below min {min}")));
        }
        if count == 0 {
            return Err(invalid("grid", "grid must contain at least one point"));
        }
        Ok(Self { min, max, count })
    }

    /// A one-point grid.
    pub fn single(value: f64) -> Self {
        Self {
            min: value,
            max: value,
            count: 1,
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        if self.count == 1 {
            return self.min;
        }
        if i + 1 == self.count {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    /// Parses `min:max[:steps]`, falling back to `default_steps` when the
    /// step count is omitted. A bare number gives a one-point grid.
    pub fn parse_with_default(s: &str, default_steps: usize) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |p: &str| p.parse::<f64>().map_err(|_| Error::GridSyntax(s.to_string()));
        match parts.as_slice() {
            [v] => Ok(Self::single(num(v)?)),
            [lo, hi] => Self::new(num(lo)?, num(hi)?, default_steps),
            [lo, hi, n] => {
                let n = n
                    .parse::<usize>()
                    .map_err(|_| Error::GridSyntax(s.to_string()))?;
                Self::new(num(lo)?, num(hi)?, n)
            }
            _ => Err(Error::GridSyntax(s.to_string())),
        }
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_default(s, 100)
    }
}
