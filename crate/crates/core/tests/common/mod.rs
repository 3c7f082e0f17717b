#![allow(dead_code)]

use rand_core::RngCore;
use rotosense_core::estimation::trial_rng;
use rotosense_core::{QubitState, RotationParams, Spin, SpinState, C64};

pub struct TestRng(rand_chacha::ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(trial_rng(seed, 0))
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn unit_vector(&mut self) -> [f64; 3] {
        loop {
            let v = [self.range(-1.0, 1.0), self.range(-1.0, 1.0), self.range(-1.0, 1.0)];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 0.1 && n <= 1.0 {
                return v.map(|x| x / n);
            }
        }
    }

    pub fn params(&mut self) -> RotationParams {
        RotationParams::new(
            self.range(-3.0, 3.0),
            self.range(0.0, std::f64::consts::PI),
            self.range(-std::f64::consts::PI, std::f64::consts::PI),
        )
    }

    pub fn complex_vec(&mut self, len: usize) -> Vec<C64> {
        (0..len)
            .map(|_| C64::new(self.range(-1.0, 1.0), self.range(-1.0, 1.0)))
            .collect()
    }

    pub fn spin_state(&mut self, spin: Spin) -> SpinState {
        SpinState::new(spin, self.complex_vec(spin.dim())).unwrap()
    }

    pub fn qubit_state(&mut self, n: usize) -> QubitState {
        QubitState::new(n, self.complex_vec(1 << n)).unwrap()
    }
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
