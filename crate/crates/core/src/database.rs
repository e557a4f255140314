//! The function table `f` that the `U_f` operator encodes.
//!
//! # Text format
//!
//! ```text
//! 2 2      <- header: control bits, target bits
//! 0 3      <- one `I F` line per control value
//! 1 2
//! 2 1
//! 3 0
//! ```
//!
//! Numbers are decimal and separated by whitespace. After the header every
//! `I` in `0..2^lc` appears exactly once, in any order, with `F < 2^lt`.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::state::check_widths;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionTable {
    lc: u32,
    lt: u32,
    values: Vec<u64>,
}

/// Preimages of one target value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityInfo {
    pub f0: u64,
    pub g: usize,
    pub preimages: Vec<u64>,
}

impl FunctionTable {
    pub fn from_values(lc: u32, lt: u32, values: Vec<u64>) -> Result<Self> {
        check_widths(lc, lt)?;
        let domain = 1usize << lc;
        if values.len() != domain {
            let index = values.len().min(domain);
            return Err(Error::Validation {
                index,
                reason: format!("table has {} entries, expected {domain}", values.len()),
            });
        }
        let range = 1u64 << lt;
        if let Some(index) = values.iter().position(|&v| v >= range) {
            return Err(Error::Validation {
                index,
                reason: format!("value {} does not fit in {lt} target bits", values[index]),
            });
        }
        Ok(Self { lc, lt, values })
    }

    /// `f(I) = 3 - I` on two-qubit registers.
    pub fn paper_example() -> Self {
        Self::from_values(2, 2, vec![3, 2, 1, 0]).expect("static table is valid")
    }

    pub fn identity(lc: u32) -> Result<Self> {
        Self::from_values(lc, lc, (0..1u64 << lc).collect())
    }

    /// Uniform random bijection on `0..2^lc`, with `lt = lc`.
    pub fn random_permutation(lc: u32, seed: u64) -> Result<Self> {
        check_widths(lc, lc)?;
        let mut values: Vec<u64> = (0..1u64 << lc).collect();
        values.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Ok(Self { lc, lt: lc, values })
    }

    /// Independent uniform value for every argument.
    pub fn random_function(lc: u32, lt: u32, seed: u64) -> Result<Self> {
        check_widths(lc, lt)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..1u64 << lc).map(|_| rng.gen_range(0..1u64 << lt)).collect();
        Ok(Self { lc, lt, values })
    }

    /// A table where exactly `g` randomly chosen arguments map to `f0` and
    /// every other argument maps to a random value different from `f0`.
    pub fn with_multiplicity(lc: u32, lt: u32, f0: u64, g: usize, seed: u64) -> Result<Self> {
        check_widths(lc, lt)?;
        let domain = 1usize << lc;
        if f0 >= 1u64 << lt {
            return Err(Error::Domain(format!("target value {f0} outside {lt} bits")));
        }
        if g > domain {
            return Err(Error::Domain(format!("multiplicity {g} exceeds domain {domain}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut args: Vec<usize> = (0..domain).collect();
        args.shuffle(&mut rng);
        let mut values = vec![0u64; domain];
        for (n, &i) in args.iter().enumerate() {
            values[i] = if n < g {
                f0
            } else {
                // Draw from the range with f0 removed.
                let v = rng.gen_range(0..(1u64 << lt) - 1);
                if v >= f0 {
                    v + 1
                } else {
                    v
                }
            };
        }
        Ok(Self { lc, lt, values })
    }

    pub fn control_bits(&self) -> u32 {
        self.lc
    }

    pub fn target_bits(&self) -> u32 {
        self.lt
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn eval(&self, i: u64) -> Option<u64> {
        self.values.get(i as usize).copied()
    }

    /// Exact preimage set of `f0`. A value outside the target range simply
    /// has no preimages.
    pub fn multiplicity(&self, f0: u64) -> MultiplicityInfo {
        let preimages: Vec<u64> = self
            .values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v == f0)
            .map(|(i, _)| i as u64)
            .collect();
        MultiplicityInfo {
            f0,
            g: preimages.len(),
            preimages,
        }
    }

    pub fn image(&self) -> BTreeSet<u64> {
        self.values.iter().copied().collect()
    }

    pub fn is_bijective(&self) -> bool {
        self.lc == self.lt && self.image().len() == self.values.len()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.lc, self.lt);
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{i} {v}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "empty table file, expected header `lc lt`".into(),
        })?;
        let [lc, lt] = parse_pair(header_line, header, "header `lc lt`")?;
        let (lc, lt) = (lc as u32, lt as u32);
        check_widths(lc, lt).map_err(|e| Error::Parse {
            line: header_line,
            reason: e.to_string(),
        })?;

        let domain = 1u64 << lc;
        let range = 1u64 << lt;
        let mut values: Vec<Option<u64>> = vec![None; domain as usize];
        let mut last_line = header_line;
        for (line, body) in lines {
            last_line = line;
            let [i, f] = parse_pair(line, body, "entry `I F`")?;
            if i >= domain {
                return Err(Error::Parse {
                    line,
                    reason: format!("argument {i} outside 0..{domain}"),
                });
            }
            if f >= range {
                return Err(Error::Parse {
                    line,
                    reason: format!("value {f} outside 0..{range}"),
                });
            }
            if values[i as usize].replace(f).is_some() {
                return Err(Error::Parse {
                    line,
                    reason: format!("duplicate entry for I={i}"),
                });
            }
        }
        if let Some(missing) = values.iter().position(Option::is_none) {
            return Err(Error::Parse {
                line: last_line + 1,
                reason: format!(
                    "incomplete table: missing entry for I={missing} (every I in 0..{domain} is required)"
                ),
            });
        }
        Ok(Self {
            lc,
            lt,
            values: values.into_iter().map(Option::unwrap).collect(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_pair(line: usize, body: &str, what: &str) -> Result<[u64; 2]> {
    let bad = || Error::Parse {
        line,
        reason: format!("expected {what}, got {body:?}"),
    };
    let mut it = body.split_whitespace().map(|t| t.parse::<u64>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok([a, b]),
        _ => Err(bad()),
    }
}
