//! Three-dimensional FFTs on cubic lattices, built from 1-D rustfft/realfft plans.
//!
//! Real fields use the half spectrum: index `(ix * n + iy) * nh + iz` with
//! `nh = n / 2 + 1`. Full complex fields use `(ix * n + iy) * n + iz`.
//! Forward transforms are unnormalized, inverse transforms divide by n³.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::par::*;

const BLOCK: usize = 16;

pub struct Fft3 {
    n: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

#[derive(Clone, Copy)]
struct SendPtr(*mut Complex64);
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}

impl SendPtr {
    fn get(self) -> *mut Complex64 {
        self.0
    }
}

/// Shared plan cache keyed by the per-axis size.
pub fn plans(n: usize) -> Arc<Fft3> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard.entry(n).or_insert_with(|| Arc::new(Fft3::new(n))).clone()
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut rp = RealFftPlanner::<f64>::new();
        let mut cp = FftPlanner::<f64>::new();
        Fft3 {
            n,
            r2c: rp.plan_fft_forward(n),
            c2r: rp.plan_fft_inverse(n),
            fwd: cp.plan_fft_forward(n),
            inv: cp.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nh(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn half_len(&self) -> usize {
        self.n * self.n * self.nh()
    }

    /// Real samples to half spectrum.
    pub fn forward_real(&self, input: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        let nh = self.nh();
        assert_eq!(input.len(), n * n * n);
        let mut out = vec![Complex64::new(0.0, 0.0); n * n * nh];
        out.par_chunks_mut(n * nh)
            .zip(input.par_chunks(n * n))
            .for_each(|(o, i)| {
                let mut line = self.r2c.make_input_vec();
                let mut scratch = self.r2c.make_scratch_vec();
                for iy in 0..n {
                    line.copy_from_slice(&i[iy * n..(iy + 1) * n]);
                    self.r2c
                        .process_with_scratch(&mut line, &mut o[iy * nh..(iy + 1) * nh], &mut scratch)
                        .expect("r2c length");
                }
            });
        self.pass_axis1(&mut out, nh, &self.fwd);
        self.pass_axis0(&mut out, nh, &self.fwd);
        out
    }

    /// Half spectrum to real samples, normalized.
    pub fn inverse_real(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        let n = self.n;
        let nh = self.nh();
        assert_eq!(spec.len(), n * n * nh);
        self.pass_axis0(&mut spec, nh, &self.inv);
        self.pass_axis1(&mut spec, nh, &self.inv);
        let norm = 1.0 / (n * n * n) as f64;
        let mut out = vec![0.0; n * n * n];
        out.par_chunks_mut(n * n)
            .zip(spec.par_chunks_mut(n * nh))
            .for_each(|(o, s)| {
                let mut scratch = self.c2r.make_scratch_vec();
                for iy in 0..n {
                    let line = &mut s[iy * nh..(iy + 1) * nh];
                    // DC and Nyquist bins of a real line carry no imaginary part
                    line[0].im = 0.0;
                    line[nh - 1].im = 0.0;
                    let dst = &mut o[iy * n..(iy + 1) * n];
                    self.c2r
                        .process_with_scratch(line, dst, &mut scratch)
                        .expect("c2r length");
                    for v in dst.iter_mut() {
                        *v *= norm;
                    }
                }
            });
        out
    }

    /// In-place forward transform of a full complex field.
    pub fn forward_full(&self, data: &mut [Complex64]) {
        self.full(data, &self.fwd);
    }

    /// In-place inverse transform of a full complex field, normalized.
    pub fn inverse_full(&self, data: &mut [Complex64]) {
        self.full(data, &self.inv);
        let norm = 1.0 / (self.n * self.n * self.n) as f64;
        data.par_iter_mut().for_each(|v| *v *= norm);
    }

    fn full(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        data.par_chunks_mut(n * n).for_each(|slab| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            plan.process_with_scratch(slab, &mut scratch);
        });
        self.pass_axis1(data, n, plan);
        self.pass_axis0(data, n, plan);
    }

    // middle axis: transpose each x-slab so y lines are contiguous
    fn pass_axis1(&self, data: &mut [Complex64], m: usize, plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        data.par_chunks_mut(n * m).for_each(|slab| {
            let mut buf = vec![Complex64::new(0.0, 0.0); n * m];
            let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            for iy in 0..n {
                for iz in 0..m {
                    buf[iz * n + iy] = slab[iy * m + iz];
                }
            }
            plan.process_with_scratch(&mut buf, &mut scratch);
            for iz in 0..m {
                for iy in 0..n {
                    slab[iy * m + iz] = buf[iz * n + iy];
                }
            }
        });
    }

    // slowest axis: gather blocks of columns, transform, scatter back
    fn pass_axis0(&self, data: &mut [Complex64], m: usize, plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let cols = n * m;
        let stride = cols;
        let ptr = SendPtr(data.as_mut_ptr());
        let blocks: Vec<usize> = (0..cols).step_by(BLOCK).collect();
        blocks.par_iter().for_each(|&j0| {
            let width = BLOCK.min(cols - j0);
            let mut buf = vec![Complex64::new(0.0, 0.0); width * n];
            let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            let p = ptr.get();
            // SAFETY: blocks cover disjoint column ranges [j0, j0 + width) and
            // every index stays below n * stride = data.len().
            unsafe {
                for ix in 0..n {
                    for b in 0..width {
                        buf[b * n + ix] = *p.add(ix * stride + j0 + b);
                    }
                }
            }
            plan.process_with_scratch(&mut buf, &mut scratch);
            unsafe {
                for ix in 0..n {
                    for b in 0..width {
                        *p.add(ix * stride + j0 + b) = buf[b * n + ix];
                    }
                }
            }
        });
    }
}
