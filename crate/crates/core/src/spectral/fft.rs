use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized forward DFT, `F_m = sum_j x_j e^{-2 pi i m j / P}`.
pub(crate) fn dft_forward(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

/// In-place unnormalized inverse DFT, `x_j = sum_m F_m e^{2 pi i m j / P}`.
pub(crate) fn dft_inverse(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_then_inverse_scales_by_length() {
        let mut x: Vec<Complex64> = (0..12)
            .map(|j| Complex64::new(j as f64, -(j as f64) * 0.5))
            .collect();
        let orig = x.clone();
        dft_forward(&mut x);
        dft_inverse(&mut x);
        for (a, b) in x.iter().zip(&orig) {
            assert!((a / 12.0 - b).norm() < 1e-12);
        }
    }
}
