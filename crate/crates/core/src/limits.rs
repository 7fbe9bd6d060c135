//! Size caps shared by the enumerations in this crate.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_lines: usize,
    pub max_tuples: u64,
    pub max_degree: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_lines: 5000,
            max_tuples: 10_000_000,
            max_degree: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{what} cap exceeded: {value} > {cap}")]
pub struct CapExceeded {
    pub what: &'static str,
    pub value: u64,
    pub cap: u64,
}

impl Limits {
    pub fn check_lines(&self, count: usize) -> Result<(), CapExceeded> {
        if count > self.max_lines {
            return Err(CapExceeded {
                what: "line",
                value: count as u64,
                cap: self.max_lines as u64,
            });
        }
        Ok(())
    }

    pub fn check_degree(&self, degree: u32) -> Result<(), CapExceeded> {
        if degree > self.max_degree {
            return Err(CapExceeded {
                what: "degree",
                value: degree as u64,
                cap: self.max_degree as u64,
            });
        }
        Ok(())
    }

    pub fn check_tuples(&self, visited: u64) -> Result<(), CapExceeded> {
        if visited > self.max_tuples {
            return Err(CapExceeded {
                what: "tuple enumeration",
                value: visited,
                cap: self.max_tuples,
            });
        }
        Ok(())
    }
}
