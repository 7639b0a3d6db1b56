//! Unnormalized 3D complex FFT over the grid layout, built from 1D
//! `rustfft` plans applied axis by axis.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::Grid;

type Plan = Arc<dyn Fft<f64>>;

thread_local! {
    static PENCILS: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

static PLANS: LazyLock<Mutex<HashMap<(usize, bool), Plan>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn plan(n: usize, direction: FftDirection) -> Plan {
    let forward = direction == FftDirection::Forward;
    let mut cache = PLANS.lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry((n, forward))
        .or_insert_with(|| FftPlanner::new().plan_fft(n, direction))
        .clone()
}

/// In-place unnormalized transform: `X_k = Σ_j x_j exp(∓2πi jk/N)` per axis.
pub(crate) fn fft3(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    let [n1, n2, n3] = grid.modes();
    debug_assert_eq!(data.len(), n1 * n2 * n3);

    // axis 3: contiguous lines
    let p3 = plan(n3, direction);
    data.par_chunks_mut(n3 * n2).for_each(|plane| {
        let mut scratch = vec![Complex64::default(); p3.get_inplace_scratch_len()];
        p3.process_with_scratch(plane, &mut scratch);
    });

    // axis 2: strided within each i1-plane
    let p2 = plan(n2, direction);
    data.par_chunks_mut(n2 * n3).for_each(|plane| {
        let mut line = vec![Complex64::default(); n2];
        let mut scratch = vec![Complex64::default(); p2.get_inplace_scratch_len()];
        for i3 in 0..n3 {
            for i2 in 0..n2 {
                line[i2] = plane[i2 * n3 + i3];
            }
            p2.process_with_scratch(&mut line, &mut scratch);
            for i2 in 0..n2 {
                plane[i2 * n3 + i3] = line[i2];
            }
        }
    });

    // axis 1: transpose so that i1 is fastest, transform, transpose back
    let p1 = plan(n1, direction);
    let stride = n2 * n3;
    // rayon may run another transform on this thread while we wait, so a
    // busy buffer falls back to a fresh allocation
    PENCILS.with(|cell| match cell.try_borrow_mut() {
        Ok(mut pencils) => {
            pencils.resize(data.len(), Complex64::default());
            transform_axis1(&p1, data, &mut pencils, n1, stride);
        }
        Err(_) => {
            let mut pencils = vec![Complex64::default(); data.len()];
            transform_axis1(&p1, data, &mut pencils, n1, stride);
        }
    });
}

fn transform_axis1(
    p1: &Plan,
    data: &mut [Complex64],
    pencils: &mut [Complex64],
    n1: usize,
    stride: usize,
) {
    {
        let src: &[Complex64] = data;
        pencils
            .par_chunks_mut(n1)
            .enumerate()
            .for_each(|(col, pencil)| {
                for (i1, v) in pencil.iter_mut().enumerate() {
                    *v = src[i1 * stride + col];
                }
            });
    }
    pencils
        .par_chunks_mut(n1 * 64.min(stride))
        .for_each(|chunk| {
            let mut scratch = vec![Complex64::default(); p1.get_inplace_scratch_len()];
            p1.process_with_scratch(chunk, &mut scratch);
        });
    data.par_chunks_mut(stride)
        .enumerate()
        .for_each(|(i1, plane)| {
            for (col, v) in plane.iter_mut().enumerate() {
                *v = pencils[col * n1 + i1];
            }
        });
}

pub(crate) fn forward(grid: &Grid, data: &mut [Complex64]) {
    fft3(grid, data, FftDirection::Forward);
}

pub(crate) fn inverse(grid: &Grid, data: &mut [Complex64]) {
    fft3(grid, data, FftDirection::Inverse);
}
