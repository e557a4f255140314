//! The search step, iteration counts, the search loop, and projection onto
//! the two-dimensional analysis plane.
//!
//! With `g` arguments mapping to `f0`, the plane is spanned by
//! `Phi1 = g^(-1/2) sum_r |I_r>|f0>` and by `Phi2`, the normalized equal
//! superposition of the remaining pairs `|I>|f(I)>`.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::{beta_of, predicted_success};
use crate::database::FunctionTable;
use crate::error::{Error, Result};
use crate::state::TwoRegisterState;

/// `U_f H_c |0>|0> = 2^(-lc/2) sum_I |I>|f(I)>`.
pub fn prepare_initial(table: &FunctionTable) -> Result<TwoRegisterState> {
    let mut state = TwoRegisterState::init_zero(table.control_bits(), table.target_bits())?;
    state.apply_hadamard_control();
    state.apply_uf(table)?;
    Ok(state)
}

/// One search step: `S_t(f0)`, `U_f`, `H_c`, `S_c(0)`, `H_c`, `U_f`, in that
/// order.
pub fn grover_operator(state: &mut TwoRegisterState, table: &FunctionTable, f0: u64) -> Result<()> {
    state.apply_phase_target(f0)?;
    state.apply_uf(table)?;
    state.apply_hadamard_control();
    state.apply_phase_control(0)?;
    state.apply_hadamard_control();
    state.apply_uf(table)
}

/// Real-valued optimum `nu(g) = pi / (4 asin(sqrt(g / 2^lc))) - 1/2` and its
/// nearest integer (ties away from zero).
pub fn iteration_count(lc: u32, g: usize) -> Result<(usize, f64)> {
    if g == 0 {
        return Err(Error::NoSolution { f0: None });
    }
    let beta = beta_of(lc, g)?;
    let nu = std::f64::consts::PI / (4.0 * beta) - 0.5;
    Ok((nu.round().max(0.0) as usize, nu))
}

/// `sum over solutions I of |<I, f0|state>|^2`.
pub fn success_weight(state: &TwoRegisterState, table: &FunctionTable, f0: u64) -> Result<f64> {
    let mut weight = 0.0;
    for i in table.multiplicity(f0).preimages {
        weight += state.amplitude(i, f0)?.norm_sqr();
    }
    Ok(weight)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Run exactly this many steps instead of the optimal count.
    pub iterations: Option<usize>,
    /// Run even when `f0` has no preimage, sizing the loop as if `g = 1`.
    /// The outcome is then never verified.
    pub oblivious: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub measured_i: u64,
    pub measured_f: u64,
    pub verified: bool,
    pub iterations: usize,
    /// Weight on the solution pairs just before measurement.
    pub success_probability: f64,
    /// Closed-form prediction of `success_probability`; zero when `g = 0`.
    pub predicted_success: f64,
    /// `(-1)^iterations`.
    pub global_sign: i8,
    pub multiplicity: usize,
    pub nu: f64,
}

pub fn search(
    table: &FunctionTable,
    f0: u64,
    seed: u64,
    options: &SearchOptions,
) -> Result<SearchOutcome> {
    let (outcome, _) = search_with_state(table, f0, seed, options)?;
    Ok(outcome)
}

/// Like [`search`], also returning the pre-measurement state.
pub fn search_with_state(
    table: &FunctionTable,
    f0: u64,
    seed: u64,
    options: &SearchOptions,
) -> Result<(SearchOutcome, TwoRegisterState)> {
    let lc = table.control_bits();
    if f0 >= 1u64 << table.target_bits() {
        return Err(Error::Domain(format!(
            "target value {f0} outside 0..{}",
            1u64 << table.target_bits()
        )));
    }
    let g = table.multiplicity(f0).g;
    if g == 0 && !options.oblivious {
        return Err(Error::NoSolution { f0: Some(f0) });
    }
    let (optimal, nu) = iteration_count(lc, g.max(1))?;
    let iterations = options.iterations.unwrap_or(optimal);

    let mut state = prepare_initial(table)?;
    for _ in 0..iterations {
        grover_operator(&mut state, table, f0)?;
    }
    let success_probability = success_weight(&state, table, f0)?.min(1.0);
    let predicted = if g == 0 {
        0.0
    } else {
        predicted_success(lc, g, iterations)?
    };
    let (measured_i, measured_f) = state.measure(seed)?;
    let outcome = SearchOutcome {
        measured_i,
        measured_f,
        verified: table.eval(measured_i) == Some(f0),
        iterations,
        success_probability,
        predicted_success: predicted,
        global_sign: if iterations.is_multiple_of(2) { 1 } else { -1 },
        multiplicity: g,
        nu,
    };
    Ok((outcome, state))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceCoords {
    pub a1: Complex64,
    pub a2: Complex64,
    /// Norm of the component outside the plane, summed directly rather than
    /// recovered from `1 - |a1|^2 - |a2|^2`.
    pub residual: f64,
    pub beta: f64,
}

pub fn project_subspace(
    state: &TwoRegisterState,
    table: &FunctionTable,
    f0: u64,
) -> Result<SubspaceCoords> {
    let (lc, lt) = (table.control_bits(), table.target_bits());
    if state.control_bits() != lc || state.target_bits() != lt {
        return Err(Error::Config("state and table widths differ".into()));
    }
    let g = table.multiplicity(f0).g;
    if g == 0 {
        return Err(Error::NoSolution { f0: Some(f0) });
    }
    let beta = beta_of(lc, g)?;
    let rest = (1usize << lc) - g;
    let amps = state.amplitudes();
    let fiber = 1usize << lt;
    let at = |i: usize| amps[i * fiber + table.values()[i] as usize];

    let mut sum1 = Complex64::new(0.0, 0.0);
    let mut sum2 = Complex64::new(0.0, 0.0);
    for i in 0..1usize << lc {
        if table.values()[i] == f0 {
            sum1 += at(i);
        } else {
            sum2 += at(i);
        }
    }
    let a1 = sum1 / (g as f64).sqrt();
    let a2 = if rest == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        sum2 / (rest as f64).sqrt()
    };

    // In-plane replica of each database amplitude.
    let c1 = a1 / (g as f64).sqrt();
    let c2 = if rest == 0 { a2 } else { a2 / (rest as f64).sqrt() };
    let mut off_plane = 0.0;
    for (i, chunk) in amps.chunks_exact(fiber).enumerate() {
        let f = table.values()[i] as usize;
        let fitted = if f as u64 == f0 { c1 } else { c2 };
        for (k, a) in chunk.iter().enumerate() {
            off_plane += if k == f { (a - fitted).norm_sqr() } else { a.norm_sqr() };
        }
    }
    Ok(SubspaceCoords {
        a1,
        a2,
        residual: off_plane.sqrt(),
        beta,
    })
}
