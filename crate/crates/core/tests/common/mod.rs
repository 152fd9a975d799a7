#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use vibsim::linalg::{expm, CMatrix};
use vibsim::{PauliSum, PauliTerm, StateVector};

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn sum(terms: &[(f64, &str)]) -> PauliSum {
    let n = terms[0].1.len();
    PauliSum::from_terms(n, terms.iter().map(|(w, s)| PauliTerm::parse(*w, s).unwrap()).collect()).unwrap()
}

/// Truncated ladder matrices built from scratch: `a|s> = sqrt(s)|s-1>`.
pub fn annihilator(d: usize) -> CMatrix {
    DMatrix::from_fn(d, d, |r, col| if col == r + 1 { c((col as f64).sqrt()) } else { c(0.0) })
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Normalised harmonic eigenfunctions `psi_0..psi_{n_max}` at coordinate `q`
/// for frequency `omega`, by the three-term Hermite recurrence.
pub fn hermite_functions(q: f64, omega: f64, n_max: usize) -> Vec<f64> {
    let x = omega.sqrt() * q;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push((omega / std::f64::consts::PI).powf(0.25) * (-0.5 * x * x).exp());
    if n_max >= 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for n in 1..n_max {
        let next = (2.0 / (n + 1) as f64).sqrt() * x * out[n] - (n as f64 / (n + 1) as f64).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// One-mode overlaps `<m_f | n_i>` with `q_f = q_i + shift`, optionally with a
/// weight `q_f` inserted, by trapezoidal quadrature on a wide uniform grid.
pub fn quadrature_overlaps(omega_i: f64, omega_f: f64, shift: f64, n_max: usize, weight_q: bool) -> DMatrix<f64> {
    let width = 14.0 / omega_i.min(omega_f).sqrt() + shift.abs();
    let points = 20_001;
    let h = 2.0 * width / (points - 1) as f64;
    let mut out = DMatrix::zeros(n_max + 1, n_max + 1);
    for k in 0..points {
        let q = -width + k as f64 * h;
        let qf = q + shift;
        let init = hermite_functions(q, omega_i, n_max);
        let fin = hermite_functions(qf, omega_f, n_max);
        let w = if weight_q { qf } else { 1.0 } * h;
        for m in 0..=n_max {
            for n in 0..=n_max {
                out[(m, n)] += w * fin[m] * init[n];
            }
        }
    }
    out
}

pub fn dense_exp(h: &PauliSum, t: f64) -> CMatrix {
    expm(&(h.to_matrix().unwrap() * Complex64::new(0.0, -t)))
}

pub fn apply_dense(m: &CMatrix, s: &StateVector) -> StateVector {
    let v = m * nalgebra::DVector::from_column_slice(s.amplitudes());
    StateVector::from_amplitudes(v.iter().copied().collect()).unwrap()
}

/// Equal-weight superposition over the given computational basis indices.
pub fn superposition(n: usize, indices: &[usize]) -> StateVector {
    let mut amps = vec![c(0.0); 1 << n];
    for (k, &i) in indices.iter().enumerate() {
        amps[i] = Complex64::from_polar(1.0, 0.3 * k as f64);
    }
    StateVector::from_amplitudes(amps).unwrap()
}
