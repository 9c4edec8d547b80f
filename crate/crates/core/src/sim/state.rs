// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use crate::par;

pub type Matrix2 = [[Complex64; 2]; 2];

const PARALLEL_MIN_QUBITS: usize = 14;

/// Dense state over `n_qubits`; bit `i` of a basis index is qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
    parallel: bool,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> StateVector {
        StateVector::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> StateVector {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        StateVector {
            n_qubits,
            amplitudes,
            parallel: false,
        }
    }

    /// Enables rayon kernels for large registers (no-op without the
    /// `parallel` feature).
    pub fn with_parallel(mut self, parallel: bool) -> StateVector {
        self.parallel = parallel && par::available() && self.n_qubits >= PARALLEL_MIN_QUBITS;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }

    pub fn apply_1q(&mut self, qubit: usize, m: &Matrix2) {
        let m = *m;
        par::for_each_pair(&mut self.amplitudes, qubit, self.parallel, move |_, a, b| {
            let (x, y) = (*a, *b);
            *a = m[0][0] * x + m[0][1] * y;
            *b = m[1][0] * x + m[1][1] * y;
        });
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let cmask = 1usize << control;
        par::for_each_pair(&mut self.amplitudes, target, self.parallel, move |i, a, b| {
            if i & cmask != 0 {
                std::mem::swap(a, b);
            }
        });
    }
}

pub mod gates {
    use super::Matrix2;
    use num_complex::Complex64 as C;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    const O: C = C::new(0.0, 0.0);
    const I1: C = C::new(1.0, 0.0);
    const J: C = C::new(0.0, 1.0);

    pub fn h() -> Matrix2 {
        let r = C::new(FRAC_1_SQRT_2, 0.0);
        [[r, r], [r, -r]]
    }
    pub fn x() -> Matrix2 {
        [[O, I1], [I1, O]]
    }
    pub fn y() -> Matrix2 {
        [[O, -J], [J, O]]
    }
    pub fn z() -> Matrix2 {
        [[I1, O], [O, -I1]]
    }
    pub fn phase(lambda: f64) -> Matrix2 {
        [[I1, O], [O, C::from_polar(1.0, lambda)]]
    }
    pub fn s() -> Matrix2 {
        [[I1, O], [O, J]]
    }
    pub fn sdg() -> Matrix2 {
        [[I1, O], [O, -J]]
    }
    pub fn t() -> Matrix2 {
        phase(FRAC_PI_4)
    }
    pub fn tdg() -> Matrix2 {
        phase(-FRAC_PI_4)
    }
    pub fn rx(theta: f64) -> Matrix2 {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        [[C::new(c, 0.0), C::new(0.0, -s)], [C::new(0.0, -s), C::new(c, 0.0)]]
    }
    pub fn ry(theta: f64) -> Matrix2 {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        [[C::new(c, 0.0), C::new(-s, 0.0)], [C::new(s, 0.0), C::new(c, 0.0)]]
    }
    pub fn rz(theta: f64) -> Matrix2 {
        [
            [C::from_polar(1.0, -theta / 2.0), O],
            [O, C::from_polar(1.0, theta / 2.0)],
        ]
    }
    /// qelib1 `u3(θ, φ, λ)`.
    pub fn u3(theta: f64, phi: f64, lambda: f64) -> Matrix2 {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        [
            [C::new(c, 0.0), -C::from_polar(s, lambda)],
            [C::from_polar(s, phi), C::from_polar(c, phi + lambda)],
        ]
    }
    pub fn u2(phi: f64, lambda: f64) -> Matrix2 {
        u3(FRAC_PI_2, phi, lambda)
    }
}
