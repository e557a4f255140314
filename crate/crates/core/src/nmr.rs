//! Auxiliary-spin model of the target phase flip.
//!
//! An auxiliary spin sits near the target register. Its spin-flip resonance
//! depends on the target value `F` through couplings `lambda_l` to the
//! target bits `f_l` (bit `l - 1` of `F`):
//!
//! ```text
//! omega_res(F) = mu_b - sum_l lambda_l (-1)^f_l
//! ```
//!
//! A perfectly selective pi pulse at `omega_res(f0)` flips the auxiliary spin
//! only when the target holds `f0`. With the auxiliary prepared in
//! `(|0> - |1>)/sqrt 2` the flip shows up as a sign on exactly those
//! components, which is the target phase oracle.
//!
//! Energies and frequencies share one arbitrary unit (hbar = 1). The
//! coupling energy of level `i` is `(lambda_l / 2) (-1)^(i + f_l)`, so the
//! level splitting reproduces `omega_res` exactly.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{TwoRegisterState, MAX_REGISTER_BITS};

/// Frequencies closer than this (relative to their magnitude, floored at 1)
/// count as one line.
pub const RESOLUTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NmrParams {
    pub mu_b: f64,
    /// One coupling per target qubit, least significant bit first.
    pub lambdas: Vec<f64>,
}

impl NmrParams {
    pub fn new(mu_b: f64, lambdas: Vec<f64>) -> Result<Self> {
        let lt = lambdas.len() as u32;
        if !(1..=MAX_REGISTER_BITS).contains(&lt) {
            return Err(Error::Config(format!(
                "need 1..={MAX_REGISTER_BITS} couplings, got {lt}"
            )));
        }
        if !mu_b.is_finite() || lambdas.iter().any(|l| !l.is_finite()) {
            return Err(Error::Domain("NMR parameters must be finite".into()));
        }
        Ok(Self { mu_b, lambdas })
    }

    /// `lambda_l = 2^(l-1)`, for which `omega_res(F) = mu_b - (2^lt - 1) + 2F`
    /// is injective.
    pub fn with_default_couplings(lt: u32, mu_b: f64) -> Result<Self> {
        Self::new(mu_b, (0..lt).map(|l| (1u64 << l) as f64).collect())
    }

    pub fn target_bits(&self) -> u32 {
        self.lambdas.len() as u32
    }

    fn check_f(&self, f: u64) -> Result<()> {
        let dim = 1u64 << self.target_bits();
        if f >= dim {
            return Err(Error::Domain(format!("target value {f} outside 0..{dim}")));
        }
        Ok(())
    }

    /// `sum_l lambda_l (-1)^f_l`.
    fn coupling_sum(&self, f: u64) -> f64 {
        self.lambdas
            .iter()
            .enumerate()
            .map(|(l, &lambda)| if (f >> l) & 1 == 1 { -lambda } else { lambda })
            .sum()
    }

    /// Energy of the auxiliary spin in level `aux` while the target holds `f`:
    /// `mu_b (aux - 1/2) + sum_l (lambda_l / 2) (-1)^(aux + f_l)`.
    pub fn hamiltonian_energy(&self, aux: u8, f: u64) -> Result<f64> {
        if aux > 1 {
            return Err(Error::Domain(format!("auxiliary level {aux} is not 0 or 1")));
        }
        self.check_f(f)?;
        let zeeman = self.mu_b * (aux as f64 - 0.5);
        let coupling = 0.5 * self.coupling_sum(f);
        Ok(if aux == 0 { zeeman + coupling } else { zeeman - coupling })
    }

    pub fn resonance_frequency(&self, f: u64) -> Result<f64> {
        self.check_f(f)?;
        Ok(self.mu_b - self.coupling_sum(f))
    }

    /// Every resonance line with its distance to the nearest other line.
    pub fn frequency_table(&self) -> FrequencyTable {
        let dim = 1u64 << self.target_bits();
        let omegas: Vec<f64> = (0..dim).map(|f| self.mu_b - self.coupling_sum(f)).collect();
        let mut order: Vec<usize> = (0..omegas.len()).collect();
        order.sort_by(|&a, &b| omegas[a].total_cmp(&omegas[b]).then(a.cmp(&b)));
        let mut nearest = vec![f64::INFINITY; omegas.len()];
        for w in order.windows(2) {
            let gap = omegas[w[1]] - omegas[w[0]];
            nearest[w[0]] = nearest[w[0]].min(gap);
            nearest[w[1]] = nearest[w[1]].min(gap);
        }
        let entries: Vec<FrequencyEntry> = omegas
            .iter()
            .zip(&nearest)
            .enumerate()
            .map(|(f, (&omega, &gap))| FrequencyEntry {
                f: f as u64,
                omega,
                nearest_gap: gap,
            })
            .collect();
        let min_gap = nearest.iter().copied().fold(f64::INFINITY, f64::min);
        FrequencyTable { entries, min_gap }
    }

    /// The closest other line to `omega_res(f0)`, if it cannot be told apart.
    fn colliding_line(&self, f0: u64) -> Result<Option<(u64, f64)>> {
        let target = self.resonance_frequency(f0)?;
        let tol = RESOLUTION_TOLERANCE * target.abs().max(1.0);
        Ok((0..1u64 << self.target_bits())
            .filter(|&f| f != f0)
            .map(|f| (f, self.mu_b - self.coupling_sum(f)))
            .find(|&(_, omega)| (omega - target).abs() <= tol))
    }

    fn resonates(&self, omega: f64, pulse: f64) -> bool {
        (omega - pulse).abs() <= RESOLUTION_TOLERANCE * pulse.abs().max(1.0)
    }

    /// Ideal selective pi pulse at `omega_res(f0)` on an auxiliary spin
    /// prepared in `(|0> - |1>)/sqrt 2`, after which the auxiliary is
    /// projected back out.
    pub fn selective_pi_pulse(&self, state: &mut TwoRegisterState, f0: u64) -> Result<PulseReport> {
        let lt = state.target_bits();
        if lt != self.target_bits() {
            return Err(Error::Config(format!(
                "{} couplings for a {lt}-qubit target register",
                self.target_bits()
            )));
        }
        if let Some((other, omega)) = self.colliding_line(f0)? {
            return Err(Error::UnresolvablePulse { f0, other, omega });
        }
        let pulse = self.resonance_frequency(f0)?;
        let flips: Vec<bool> = (0..1u64 << lt)
            .map(|f| self.resonates(self.mu_b - self.coupling_sum(f), pulse))
            .collect();

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut extended: Vec<[Complex64; 2]> = state
            .amplitudes()
            .iter()
            .map(|&a| [a * r, -a * r])
            .collect();
        let mask = (1usize << lt) - 1;
        for (j, pair) in extended.iter_mut().enumerate() {
            if flips[j & mask] {
                pair.swap(0, 1);
            }
        }
        let mut leaked = 0.0;
        for (dst, [up, down]) in state.amplitudes_mut().iter_mut().zip(extended) {
            *dst = (up - down) * r;
            leaked += ((up + down) * r).norm_sqr();
        }
        Ok(PulseReport {
            flipped: flips.iter().filter(|&&b| b).count(),
            auxiliary_leakage: leaked.sqrt(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseReport {
    /// Number of target values the pulse addressed.
    pub flipped: usize,
    /// Norm left on `(|0> + |1>)/sqrt 2` of the auxiliary; zero when the
    /// auxiliary ends unentangled in its initial state.
    pub auxiliary_leakage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyEntry {
    pub f: u64,
    pub omega: f64,
    pub nearest_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    pub entries: Vec<FrequencyEntry>,
    /// Smallest distance between two lines; `0` signals a collision.
    pub min_gap: f64,
}

impl FrequencyTable {
    pub fn is_injective(&self) -> bool {
        self.min_gap > 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::prepare_initial;
    use crate::FunctionTable;

    fn sample() -> NmrParams {
        NmrParams::new(10.0, vec![1.0, 2.0]).unwrap()
    }

    #[test]
    fn resonance_examples() {
        let p = sample();
        let omegas: Vec<f64> = (0..4).map(|f| p.resonance_frequency(f).unwrap()).collect();
        assert_eq!(omegas, vec![7.0, 9.0, 11.0, 13.0]);
        let flat = NmrParams::new(10.0, vec![0.0; 3]).unwrap();
        assert!((0..8).all(|f| flat.resonance_frequency(f).unwrap() == 10.0));
        assert!(matches!(p.resonance_frequency(4), Err(Error::Domain(_))));
    }

    #[test]
    fn energy_levels() {
        let p = sample();
        // -mu_b/2 + (1 + 2)/2
        assert_eq!(p.hamiltonian_energy(0, 0).unwrap(), -3.5);
        assert_eq!(p.hamiltonian_energy(1, 0).unwrap(), 3.5);
        for f in 0..4 {
            let split = p.hamiltonian_energy(1, f).unwrap() - p.hamiltonian_energy(0, f).unwrap();
            assert_eq!(split, p.resonance_frequency(f).unwrap());
        }
        let flat = NmrParams::new(6.0, vec![0.0, 0.0]).unwrap();
        for f in 0..4 {
            assert_eq!(flat.hamiltonian_energy(0, f).unwrap(), -3.0);
            assert_eq!(flat.hamiltonian_energy(1, f).unwrap(), 3.0);
        }
        assert!(matches!(p.hamiltonian_energy(2, 0), Err(Error::Domain(_))));
        assert!(matches!(p.hamiltonian_energy(0, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn frequency_table_examples() {
        let t = sample().frequency_table();
        assert_eq!(t.min_gap, 2.0);
        assert!(t.is_injective());

        let t = NmrParams::new(10.0, vec![1.0, 1.0]).unwrap().frequency_table();
        assert_eq!(t.min_gap, 0.0);
        assert_eq!(t.entries[1].omega, 10.0);
        assert_eq!(t.entries[2].omega, 10.0);
        assert_eq!(t.entries[1].nearest_gap, 0.0);

        let t = NmrParams::new(0.0, vec![3.0]).unwrap().frequency_table();
        let pairs: Vec<(u64, f64)> = t.entries.iter().map(|e| (e.f, e.omega)).collect();
        assert_eq!(pairs, vec![(0, -3.0), (1, 3.0)]);
    }

    #[test]
    fn default_couplings_are_injective() {
        for lt in 1..=MAX_REGISTER_BITS {
            let p = NmrParams::with_default_couplings(lt, 100.0).unwrap();
            let t = p.frequency_table();
            assert_eq!(t.min_gap, 2.0, "lt={lt}");
        }
    }

    #[test]
    fn params_validation() {
        assert!(matches!(NmrParams::new(1.0, vec![]), Err(Error::Config(_))));
        assert!(matches!(NmrParams::new(f64::NAN, vec![1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn pulse_equals_target_phase_flip() {
        let table = FunctionTable::paper_example();
        let psi1 = prepare_initial(&table).unwrap();
        let p = NmrParams::with_default_couplings(2, 10.0).unwrap();
        let mut pulsed = psi1.clone();
        let report = p.selective_pi_pulse(&mut pulsed, 2).unwrap();
        assert_eq!(report.flipped, 1);
        assert!(report.auxiliary_leakage < 1e-15);
        let mut flipped = psi1.clone();
        flipped.apply_phase_target(2).unwrap();
        for (a, b) in pulsed.amplitudes().iter().zip(flipped.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        p.selective_pi_pulse(&mut pulsed, 2).unwrap();
        for (a, b) in pulsed.amplitudes().iter().zip(psi1.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn colliding_pulse_is_rejected() {
        let p = NmrParams::new(10.0, vec![1.0, 1.0]).unwrap();
        let mut s = TwoRegisterState::init_zero(2, 2).unwrap();
        let before = s.clone();
        let err = p.selective_pi_pulse(&mut s, 1).unwrap_err();
        assert_eq!(err, Error::UnresolvablePulse { f0: 1, other: 2, omega: 10.0 });
        assert_eq!(s, before);
        // F = 0 sits at 8, clear of the collision.
        assert!(p.selective_pi_pulse(&mut s, 0).is_ok());
        let wrong = NmrParams::with_default_couplings(3, 10.0).unwrap();
        assert!(matches!(wrong.selective_pi_pulse(&mut s, 0), Err(Error::Config(_))));
    }
}
