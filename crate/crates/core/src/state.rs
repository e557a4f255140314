//! The two-register state vector and its elementary operators.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::database::FunctionTable;
use crate::error::{Error, Result};
use crate::kernels;

pub const MAX_REGISTER_BITS: u32 = 14;
pub const MAX_TOTAL_BITS: u32 = 27;

/// Largest deviation of the squared norm from one that [`TwoRegisterState::measure`] accepts.
pub const MEASURE_NORM_TOLERANCE: f64 = 1e-6;

pub(crate) fn check_widths(lc: u32, lt: u32) -> Result<()> {
    if !(1..=MAX_REGISTER_BITS).contains(&lc) {
        return Err(Error::Config(format!(
            "control width {lc} outside 1..={MAX_REGISTER_BITS}"
        )));
    }
    if !(1..=MAX_REGISTER_BITS).contains(&lt) {
        return Err(Error::Config(format!(
            "target width {lt} outside 1..={MAX_REGISTER_BITS}"
        )));
    }
    if lc + lt > MAX_TOTAL_BITS {
        return Err(Error::Config(format!(
            "total width {} exceeds {MAX_TOTAL_BITS}",
            lc + lt
        )));
    }
    Ok(())
}

/// State of a control register of `lc` qubits and a target register of `lt`
/// qubits.
///
/// The amplitude of `|I>|K>` lives at index `(I << lt) | K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoRegisterState {
    lc: u32,
    lt: u32,
    amps: Vec<Complex64>,
}

impl TwoRegisterState {
    /// `|0>|0>`.
    pub fn init_zero(lc: u32, lt: u32) -> Result<Self> {
        check_widths(lc, lt)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << (lc + lt)];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { lc, lt, amps })
    }

    /// Wraps an explicit amplitude vector. The vector is not normalized, and
    /// need not be.
    pub fn from_amplitudes(lc: u32, lt: u32, amps: Vec<Complex64>) -> Result<Self> {
        check_widths(lc, lt)?;
        let expected = 1usize << (lc + lt);
        if amps.len() != expected {
            return Err(Error::Config(format!(
                "expected {expected} amplitudes for lc={lc} lt={lt}, got {}",
                amps.len()
            )));
        }
        Ok(Self { lc, lt, amps })
    }

    /// A normalized state with independent complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(lc: u32, lt: u32, rng: &mut R) -> Result<Self> {
        check_widths(lc, lt)?;
        let mut amps: Vec<Complex64> = (0..1usize << (lc + lt))
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let scale = 1.0 / kernels::sequential::norm_sqr(&amps).sqrt();
        amps.iter_mut().for_each(|a| *a *= scale);
        Ok(Self { lc, lt, amps })
    }

    pub fn control_bits(&self) -> u32 {
        self.lc
    }

    pub fn target_bits(&self) -> u32 {
        self.lt
    }

    pub fn control_dim(&self) -> u64 {
        1u64 << self.lc
    }

    pub fn target_dim(&self) -> u64 {
        1u64 << self.lt
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Raw access, for building test fixtures and fault injection.
    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    fn index(&self, i: u64, k: u64) -> usize {
        ((i << self.lt) | k) as usize
    }

    pub fn amplitude(&self, i: u64, k: u64) -> Result<Complex64> {
        if i >= self.control_dim() || k >= self.target_dim() {
            return Err(Error::Domain(format!(
                "basis pair ({i}, {k}) outside {}x{}",
                self.control_dim(),
                self.target_dim()
            )));
        }
        Ok(self.amps[self.index(i, k)])
    }

    /// Sum of squared amplitude magnitudes.
    pub fn norm(&self) -> f64 {
        kernels::norm_sqr(&self.amps)
    }

    /// `H` on every control qubit; the target register is untouched.
    pub fn apply_hadamard_control(&mut self) {
        kernels::hadamard_control(&mut self.amps, self.lc, self.lt);
    }

    /// `|I>|K> -> |I>|K xor f(I)>`.
    pub fn apply_uf(&mut self, table: &FunctionTable) -> Result<()> {
        if table.control_bits() != self.lc || table.target_bits() != self.lt {
            return Err(Error::Config(format!(
                "table is {}x{} bits, state is {}x{} bits",
                table.control_bits(),
                table.target_bits(),
                self.lc,
                self.lt
            )));
        }
        kernels::xor_permute(&mut self.amps, self.lt, table.values());
        Ok(())
    }

    /// Phase flip by pi on every amplitude whose control register equals `i0`.
    pub fn apply_phase_control(&mut self, i0: u64) -> Result<()> {
        if i0 >= self.control_dim() {
            return Err(Error::Domain(format!(
                "control value {i0} outside 0..{}",
                self.control_dim()
            )));
        }
        kernels::negate_control(&mut self.amps, self.lt, i0 as usize);
        Ok(())
    }

    /// Phase flip by pi on every amplitude whose target register equals `f0`.
    pub fn apply_phase_target(&mut self, f0: u64) -> Result<()> {
        if f0 >= self.target_dim() {
            return Err(Error::Domain(format!(
                "target value {f0} outside 0..{}",
                self.target_dim()
            )));
        }
        kernels::negate_target(&mut self.amps, self.lt, f0 as usize);
        Ok(())
    }

    /// Probability of each control value, summed over the target register.
    pub fn control_marginal(&self) -> Vec<f64> {
        self.amps
            .chunks_exact(1usize << self.lt)
            .map(kernels::sequential::norm_sqr)
            .collect()
    }

    fn check_normalized(&self) -> Result<f64> {
        let norm = self.norm();
        if (norm - 1.0).abs() > MEASURE_NORM_TOLERANCE {
            return Err(Error::StateCorruption { norm });
        }
        Ok(norm)
    }

    fn split(&self, index: usize) -> (u64, u64) {
        let index = index as u64;
        (index >> self.lt, index & (self.target_dim() - 1))
    }

    /// Born-rule sample of both registers. The state is left untouched.
    pub fn measure(&self, seed: u64) -> Result<(u64, u64)> {
        self.measure_with(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn measure_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(u64, u64)> {
        let norm = self.check_normalized()?;
        let threshold = rng.gen::<f64>() * norm;
        let mut acc = 0.0;
        let mut last_supported = 0;
        for (j, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                acc += p;
                last_supported = j;
                if threshold < acc {
                    return Ok(self.split(j));
                }
            }
        }
        // Rounding left the threshold above the accumulated sum.
        Ok(self.split(last_supported))
    }

    /// Samples and then collapses onto the observed basis state.
    ///
    /// The surviving amplitude keeps its phase and is rescaled to unit
    /// magnitude.
    pub fn measure_collapse(&mut self, seed: u64) -> Result<(u64, u64)> {
        let (i, k) = self.measure(seed)?;
        let keep = self.index(i, k);
        let a = self.amps[keep];
        self.amps.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        self.amps[keep] = a / a.norm();
        Ok((i, k))
    }

    /// `shots` independent samples drawn from one seeded stream.
    pub fn sample(&self, shots: usize, seed: u64) -> Result<Vec<(u64, u64)>> {
        self.check_normalized()?;
        let mut cumulative = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cumulative.push(acc);
        }
        let last_supported = self
            .amps
            .iter()
            .rposition(|a| a.norm_sqr() > 0.0)
            .unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..shots)
            .map(|_| {
                let threshold = rng.gen::<f64>() * acc;
                // The first entry whose running sum passes the threshold has
                // nonzero weight.
                let j = cumulative.partition_point(|&c| c <= threshold);
                self.split(j.min(last_supported))
            })
            .collect())
    }

    /// Writes one `index re im` line per basis state, in index order.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (j, a) in self.amps.iter().enumerate() {
            writeln!(out, "{j} {:?} {:?}", a.re, a.im)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`write_dump`](Self::write_dump).
    pub fn read_dump<R: BufRead>(lc: u32, lt: u32, input: R) -> Result<Self> {
        check_widths(lc, lt)?;
        let n = 1usize << (lc + lt);
        let mut amps = Vec::with_capacity(n);
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line_no = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let bad = |reason: String| Error::Parse { line: line_no, reason };
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(bad(format!("expected `index re im`, got {trimmed:?}")));
            }
            let index: usize = fields[0]
                .parse()
                .map_err(|_| bad(format!("bad index {:?}", fields[0])))?;
            if index != amps.len() {
                return Err(bad(format!("expected index {}, got {index}", amps.len())));
            }
            if index >= n {
                return Err(bad(format!("index {index} beyond {n} amplitudes")));
            }
            let re: f64 = fields[1]
                .parse()
                .map_err(|_| bad(format!("bad real part {:?}", fields[1])))?;
            let im: f64 = fields[2]
                .parse()
                .map_err(|_| bad(format!("bad imaginary part {:?}", fields[2])))?;
            amps.push(Complex64::new(re, im));
        }
        if amps.len() != n {
            return Err(Error::Parse {
                line: amps.len() + 1,
                reason: format!("dump ended after {} of {n} amplitudes", amps.len()),
            });
        }
        Ok(Self { lc, lt, amps })
    }
}
