//! Step-by-step replay of the two-qubit search for `f(I) = 3 - I`, `f0 = 2`,
//! checked against the known intermediate states.

use num_complex::Complex64;

use crate::database::FunctionTable;
use crate::error::Result;
use crate::state::TwoRegisterState;

pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const TRACE_F0: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOp {
    HadamardControl,
    Uf,
    PhaseTarget(u64),
    PhaseControl(u64),
}

impl TraceOp {
    pub fn symbol(&self) -> String {
        match self {
            TraceOp::HadamardControl => "H(c)".into(),
            TraceOp::Uf => "U_f".into(),
            TraceOp::PhaseTarget(f) => format!("S(t)_{f}"),
            TraceOp::PhaseControl(i) => format!("S(c)_{i}"),
        }
    }

    /// Applies the operator with the library kernels.
    pub fn apply(&self, state: &mut TwoRegisterState, table: &FunctionTable) -> Result<()> {
        match *self {
            TraceOp::HadamardControl => {
                state.apply_hadamard_control();
                Ok(())
            }
            TraceOp::Uf => state.apply_uf(table),
            TraceOp::PhaseTarget(f) => state.apply_phase_target(f),
            TraceOp::PhaseControl(i) => state.apply_phase_control(i),
        }
    }
}

/// The operator producing each of `Psi0..Psi7` from its predecessor,
/// starting at `|0>|0>`.
pub const TRACE_OPS: [TraceOp; 8] = [
    TraceOp::HadamardControl,
    TraceOp::Uf,
    TraceOp::PhaseTarget(TRACE_F0),
    TraceOp::Uf,
    TraceOp::HadamardControl,
    TraceOp::PhaseControl(0),
    TraceOp::HadamardControl,
    TraceOp::Uf,
];

/// Nonzero entries `(I, K, amplitude)` of each expected state.
const EXPECTED: [&[(u64, u64, f64)]; 8] = [
    &[(0, 0, 0.5), (1, 0, 0.5), (2, 0, 0.5), (3, 0, 0.5)],
    &[(0, 3, 0.5), (1, 2, 0.5), (2, 1, 0.5), (3, 0, 0.5)],
    &[(0, 3, 0.5), (1, 2, -0.5), (2, 1, 0.5), (3, 0, 0.5)],
    &[(0, 0, 0.5), (1, 0, -0.5), (2, 0, 0.5), (3, 0, 0.5)],
    &[(0, 0, 0.5), (1, 0, 0.5), (2, 0, -0.5), (3, 0, 0.5)],
    &[(0, 0, -0.5), (1, 0, 0.5), (2, 0, -0.5), (3, 0, 0.5)],
    &[(1, 0, -1.0)],
    &[(1, 2, -1.0)],
];

/// Expected amplitude vectors of `Psi0..Psi7` (16 entries each).
pub fn expected_states() -> Vec<Vec<Complex64>> {
    EXPECTED
        .iter()
        .map(|entries| {
            let mut v = vec![Complex64::new(0.0, 0.0); 16];
            for &(i, k, a) in entries.iter() {
                v[((i << 2) | k) as usize] = Complex64::new(a, 0.0);
            }
            v
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub op: TraceOp,
    pub amplitudes: Vec<Complex64>,
    pub max_deviation: f64,
}

impl TraceRecord {
    pub fn label(&self) -> String {
        format!("Psi{}", self.step)
    }

    pub fn matches(&self) -> bool {
        self.max_deviation <= TRACE_TOLERANCE
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    pub records: Vec<TraceRecord>,
}

impl TraceReport {
    pub fn first_divergence(&self) -> Option<&TraceRecord> {
        self.records.iter().find(|r| !r.matches())
    }

    pub fn passed(&self) -> bool {
        self.first_divergence().is_none()
    }
}

/// Runs the trace with the library kernels.
pub fn run_trace() -> Result<TraceReport> {
    let table = FunctionTable::paper_example();
    run_trace_with(|op, state| op.apply(state, &table))
}

/// Runs the trace with a caller-supplied operator implementation.
///
/// Every step is compared against its expected state; the run continues
/// past mismatches so the report holds all eight records.
pub fn run_trace_with<F>(mut apply: F) -> Result<TraceReport>
where
    F: FnMut(TraceOp, &mut TwoRegisterState) -> Result<()>,
{
    let mut state = TwoRegisterState::init_zero(2, 2)?;
    let expected = expected_states();
    let mut records = Vec::with_capacity(TRACE_OPS.len());
    for (step, (&op, want)) in TRACE_OPS.iter().zip(&expected).enumerate() {
        apply(op, &mut state)?;
        let max_deviation = state
            .amplitudes()
            .iter()
            .zip(want)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        records.push(TraceRecord {
            step,
            op,
            amplitudes: state.amplitudes().to_vec(),
            max_deviation,
        });
    }
    Ok(TraceReport { records })
}
