//! Chirp-z evaluation of uniformly sampled Fourier sums on an arbitrary
//! uniform output grid:
//!
//! `X[m] = sum_k a[k] exp(i (nu0 + k h)(tau0 + m dtau))`, `m = 0..len_out`.
//!
//! Uses `km = (k^2 + m^2 - (m - k)^2) / 2` to turn the sum into a linear
//! convolution, evaluated with power-of-two FFTs.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

pub(crate) struct ChirpZ {
    len_in: usize,
    len_out: usize,
    conv_len: usize,
    /// exp(i k h tau0) exp(i theta k^2 / 2), premultiplied into the input
    pre: Vec<C64>,
    /// exp(i nu0 (tau0 + m dtau)) exp(i theta m^2 / 2)
    post: Vec<C64>,
    kernel_spectrum: Vec<C64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl ChirpZ {
    pub(crate) fn new(
        len_in: usize,
        nu0: f64,
        h: f64,
        len_out: usize,
        tau0: f64,
        dtau: f64,
    ) -> Self {
        assert!(len_in > 0 && len_out > 0);
        let theta = h * dtau;
        let conv_len = (len_in + len_out - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(conv_len);
        let inverse = planner.plan_fft_inverse(conv_len);

        let half_chirp = |j: f64| 0.5 * theta * j * j;
        let pre = (0..len_in)
            .map(|k| {
                let k = k as f64;
                C64::from_polar(1.0, k * h * tau0 + half_chirp(k))
            })
            .collect();
        let post = (0..len_out)
            .map(|m| {
                let mf = m as f64;
                C64::from_polar(1.0, nu0 * (tau0 + mf * dtau) + half_chirp(mf))
            })
            .collect();

        let mut kernel = vec![C64::new(0.0, 0.0); conv_len];
        for (j, slot) in kernel.iter_mut().enumerate().take(len_out) {
            *slot = C64::from_polar(1.0, -half_chirp(j as f64));
        }
        for j in 1..len_in {
            kernel[conv_len - j] = C64::from_polar(1.0, -half_chirp(j as f64));
        }
        forward.process(&mut kernel);

        Self {
            len_in,
            len_out,
            conv_len,
            pre,
            post,
            kernel_spectrum: kernel,
            forward,
            inverse,
        }
    }

    pub(crate) fn apply(&self, input: &[C64]) -> Vec<C64> {
        assert_eq!(input.len(), self.len_in);
        let mut buf = vec![C64::new(0.0, 0.0); self.conv_len];
        for ((slot, a), p) in buf.iter_mut().zip(input).zip(&self.pre) {
            *slot = a * p;
        }
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_spectrum) {
            *b *= k;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.conv_len as f64;
        buf.iter()
            .take(self.len_out)
            .zip(&self.post)
            .map(|(y, p)| y * p * scale)
            .collect()
    }
}
