//! Slice-level amplitude kernels.
//!
//! Every kernel works on a flat amplitude slice laid out as
//! `index = (I << lt) | K`, with the control value `I` in the high bits and
//! the target value `K` in the low bits. A control fiber is the contiguous run
//! of `2^lt` amplitudes sharing one `I`.
//!
//! Two implementations exist: [`sequential`] is always compiled, [`parallel`]
//! is compiled with the `parallel` feature. The functions re-exported at this
//! level are the ones [`crate::TwoRegisterState`] uses. The permutation and
//! reflection kernels produce bitwise-identical results in both; the Hadamard
//! kernel computes every butterfly with the same expression in both, so it is
//! bitwise identical as well.

use num_complex::Complex64;

/// Overall factor `(1/sqrt 2)^lc` of the control-register Hadamard transform.
///
/// Even widths give an exact power of two, which keeps `+-1/2` style
/// amplitudes exact.
pub fn hadamard_scale(lc: u32) -> f64 {
    let base = 0.5f64.powi((lc / 2) as i32);
    if lc % 2 == 1 {
        base * std::f64::consts::FRAC_1_SQRT_2
    } else {
        base
    }
}

#[inline(always)]
fn butterfly(a: &mut Complex64, b: &mut Complex64) {
    let x = *a;
    let y = *b;
    *a = x + y;
    *b = x - y;
}

#[inline(always)]
fn butterfly_scaled(a: &mut Complex64, b: &mut Complex64, scale: f64) {
    let x = *a;
    let y = *b;
    *a = (x + y) * scale;
    *b = (x - y) * scale;
}

/// Two radix-2 stages on `(x0, x1, x2, x3)` at strides `s` and `2s`, in the
/// same operation order as two separate passes.
#[inline(always)]
fn butterfly4(
    x0: &mut Complex64,
    x1: &mut Complex64,
    x2: &mut Complex64,
    x3: &mut Complex64,
    scale: Option<f64>,
) {
    let (b0, b1) = (*x0 + *x1, *x0 - *x1);
    let (b2, b3) = (*x2 + *x3, *x2 - *x3);
    let (c0, c2) = (b0 + b2, b0 - b2);
    let (c1, c3) = (b1 + b3, b1 - b3);
    match scale {
        Some(s) => {
            *x0 = c0 * s;
            *x1 = c1 * s;
            *x2 = c2 * s;
            *x3 = c3 * s;
        }
        None => {
            *x0 = c0;
            *x1 = c1;
            *x2 = c2;
            *x3 = c3;
        }
    }
}

#[inline(always)]
fn radix4_block(block: &mut [Complex64], stride: usize, scale: Option<f64>) {
    let (lo, hi) = block.split_at_mut(2 * stride);
    let (q0, q1) = lo.split_at_mut(stride);
    let (q2, q3) = hi.split_at_mut(stride);
    for (((x0, x1), x2), x3) in q0.iter_mut().zip(q1).zip(q2).zip(q3) {
        butterfly4(x0, x1, x2, x3, scale);
    }
}

pub mod sequential {
    use super::*;

    fn pass(amps: &mut [Complex64], stride: usize, scale: Option<f64>) {
        for block in amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            match scale {
                Some(s) => lo
                    .iter_mut()
                    .zip(hi.iter_mut())
                    .for_each(|(a, b)| butterfly_scaled(a, b, s)),
                None => lo
                    .iter_mut()
                    .zip(hi.iter_mut())
                    .for_each(|(a, b)| butterfly(a, b)),
            }
        }
    }

    fn pass4(amps: &mut [Complex64], stride: usize, scale: Option<f64>) {
        for block in amps.chunks_exact_mut(4 * stride) {
            radix4_block(block, stride, scale);
        }
    }

    /// Applies `H` to each of the `lc` control qubits.
    ///
    /// Control qubits are taken two at a time (one radix-4 sweep per pair,
    /// strides `2^lt, 2^(lt+2), ...`) with a radix-2 sweep for an odd
    /// leftover. Butterflies are unnormalized; the overall scale is folded
    /// into the last sweep.
    pub fn hadamard_control(amps: &mut [Complex64], lc: u32, lt: u32) {
        let scale = hadamard_scale(lc);
        let mut q = 0;
        while q < lc {
            let stride = 1usize << (lt + q);
            if q + 1 < lc {
                q += 2;
                pass4(amps, stride, (q == lc).then_some(scale));
            } else {
                q += 1;
                pass(amps, stride, Some(scale));
            }
        }
    }

    /// One radix-2 sweep per control qubit. Reference for the fused version.
    pub fn hadamard_control_radix2(amps: &mut [Complex64], lc: u32, lt: u32) {
        let scale = hadamard_scale(lc);
        for q in 0..lc {
            let last = q + 1 == lc;
            pass(amps, 1usize << (lt + q), last.then_some(scale));
        }
    }

    /// `|I>|K> -> |I>|K xor f(I)>`, one involutive shuffle per control fiber.
    pub fn xor_permute(amps: &mut [Complex64], lt: u32, values: &[u64]) {
        let fiber = 1usize << lt;
        for (chunk, &mask) in amps.chunks_exact_mut(fiber).zip(values) {
            xor_shuffle(chunk, mask as usize);
        }
    }

    /// Negates the whole control fiber `i0`.
    pub fn negate_control(amps: &mut [Complex64], lt: u32, i0: usize) {
        let fiber = 1usize << lt;
        amps[i0 * fiber..(i0 + 1) * fiber]
            .iter_mut()
            .for_each(|a| *a = -*a);
    }

    /// Negates slot `f0` of every control fiber.
    pub fn negate_target(amps: &mut [Complex64], lt: u32, f0: usize) {
        for chunk in amps.chunks_exact_mut(1usize << lt) {
            chunk[f0] = -chunk[f0];
        }
    }

    pub fn norm_sqr(amps: &[Complex64]) -> f64 {
        amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn xor_shuffle(chunk: &mut [Complex64], mask: usize) {
        if mask == 0 {
            return;
        }
        // Swap each pair once, from the member whose top mask bit is clear.
        let top = 1usize << (usize::BITS - 1 - mask.leading_zeros());
        for k in 0..chunk.len() {
            if k & top == 0 {
                chunk.swap(k, k ^ mask);
            }
        }
    }
}

#[cfg(feature = "parallel")]
pub mod parallel {
    use super::*;
    use rayon::prelude::*;

    const MIN_LEN: usize = 1 << 12;

    fn pass(amps: &mut [Complex64], stride: usize, scale: Option<f64>) {
        let blocks = amps.len() / (2 * stride);
        if stride >= MIN_LEN || blocks == 1 {
            // Few wide blocks: split each block's butterfly range.
            for block in amps.chunks_exact_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                let it = lo
                    .par_iter_mut()
                    .zip(hi.par_iter_mut())
                    .with_min_len(MIN_LEN);
                match scale {
                    Some(s) => it.for_each(|(a, b)| butterfly_scaled(a, b, s)),
                    None => it.for_each(|(a, b)| butterfly(a, b)),
                }
            }
        } else {
            let per_task = (MIN_LEN / (2 * stride)).max(1);
            amps.par_chunks_mut(2 * stride * per_task).for_each(|group| {
                for block in group.chunks_exact_mut(2 * stride) {
                    let (lo, hi) = block.split_at_mut(stride);
                    match scale {
                        Some(s) => lo
                            .iter_mut()
                            .zip(hi.iter_mut())
                            .for_each(|(a, b)| butterfly_scaled(a, b, s)),
                        None => lo
                            .iter_mut()
                            .zip(hi.iter_mut())
                            .for_each(|(a, b)| butterfly(a, b)),
                    }
                }
            });
        }
    }

    fn pass4(amps: &mut [Complex64], stride: usize, scale: Option<f64>) {
        let blocks = amps.len() / (4 * stride);
        if stride >= MIN_LEN || blocks == 1 {
            for block in amps.chunks_exact_mut(4 * stride) {
                let (lo, hi) = block.split_at_mut(2 * stride);
                let (q0, q1) = lo.split_at_mut(stride);
                let (q2, q3) = hi.split_at_mut(stride);
                q0.par_iter_mut()
                    .zip(q1.par_iter_mut())
                    .zip(q2.par_iter_mut())
                    .zip(q3.par_iter_mut())
                    .with_min_len(MIN_LEN)
                    .for_each(|(((x0, x1), x2), x3)| butterfly4(x0, x1, x2, x3, scale));
            }
        } else {
            let per_task = (MIN_LEN / (4 * stride)).max(1);
            amps.par_chunks_mut(4 * stride * per_task).for_each(|group| {
                for block in group.chunks_exact_mut(4 * stride) {
                    radix4_block(block, stride, scale);
                }
            });
        }
    }

    pub fn hadamard_control(amps: &mut [Complex64], lc: u32, lt: u32) {
        let scale = hadamard_scale(lc);
        let mut q = 0;
        while q < lc {
            let stride = 1usize << (lt + q);
            if q + 1 < lc {
                q += 2;
                pass4(amps, stride, (q == lc).then_some(scale));
            } else {
                q += 1;
                pass(amps, stride, Some(scale));
            }
        }
    }

    pub fn xor_permute(amps: &mut [Complex64], lt: u32, values: &[u64]) {
        let fiber = 1usize << lt;
        if fiber >= MIN_LEN {
            // Wide fibers: parallelize across fibers, each shuffled serially.
            amps.par_chunks_exact_mut(fiber)
                .zip(values.par_iter())
                .for_each(|(chunk, &mask)| sequential::xor_shuffle(chunk, mask as usize));
        } else {
            let per_task = MIN_LEN / fiber;
            amps.par_chunks_mut(fiber * per_task)
                .zip(values.par_chunks(per_task))
                .for_each(|(group, masks)| sequential::xor_permute(group, lt, masks));
        }
    }

    pub fn negate_control(amps: &mut [Complex64], lt: u32, i0: usize) {
        let fiber = 1usize << lt;
        amps[i0 * fiber..(i0 + 1) * fiber]
            .par_iter_mut()
            .with_min_len(MIN_LEN)
            .for_each(|a| *a = -*a);
    }

    pub fn negate_target(amps: &mut [Complex64], lt: u32, f0: usize) {
        amps.par_chunks_exact_mut(1usize << lt)
            .with_min_len(MIN_LEN >> lt.min(12))
            .for_each(|chunk| chunk[f0] = -chunk[f0]);
    }

    /// Sums per fixed-size chunk and then adds the partial sums in order, so
    /// the result does not depend on the thread count.
    pub fn norm_sqr(amps: &[Complex64]) -> f64 {
        let partial: Vec<f64> = amps
            .par_chunks(MIN_LEN)
            .map(sequential::norm_sqr)
            .collect();
        partial.iter().sum()
    }
}

#[cfg(feature = "parallel")]
pub use parallel::{hadamard_control, negate_control, negate_target, norm_sqr, xor_permute};
#[cfg(not(feature = "parallel"))]
pub use sequential::{hadamard_control, negate_control, negate_target, norm_sqr, xor_permute};
