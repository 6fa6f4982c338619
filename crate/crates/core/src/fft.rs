//! FFT plumbing: cached plans and in-place 2D transforms on flat row-major
//! complex buffers. Plans are cached per thread so parallel sweeps never share
//! mutable planner state.

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

type C64 = Complex<f64>;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

fn transpose_square(buf: &mut [C64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Unnormalized 2D FFT of an n×n row-major buffer, in place.
pub fn fft2(buf: &mut [C64], n: usize, inverse: bool) {
    debug_assert_eq!(buf.len(), n * n);
    let p = plan(n, inverse);
    let mut scratch = vec![C64::new(0.0, 0.0); p.get_inplace_scratch_len()];
    p.process_with_scratch(buf, &mut scratch);
    transpose_square(buf, n);
    p.process_with_scratch(buf, &mut scratch);
    transpose_square(buf, n);
}

/// Unnormalized 1D FFT in place.
pub fn fft1(buf: &mut [C64], inverse: bool) {
    let p = plan(buf.len(), inverse);
    let mut scratch = vec![C64::new(0.0, 0.0); p.get_inplace_scratch_len()];
    p.process_with_scratch(buf, &mut scratch);
}
