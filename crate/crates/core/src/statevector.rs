//! Dense state vectors over `n` qubits and the gates that act on them.
//!
//! Amplitude `k` belongs to the computational basis state whose bit `q` is
//! qubit `q` (qubit 0 least significant).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::Bitstring;
use crate::error::{Result, VibError};
use crate::pauli::{PauliString, PauliSum, PauliTerm};

/// Widest register a dense state vector may span.
pub const MAX_STATE_QUBITS: usize = 30;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Imaginary residue tolerated in expectation values of Hermitian sums.
pub const EXPECTATION_IM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > MAX_STATE_QUBITS {
            return Err(VibError::DenseGuard { qubits: n, guard: MAX_STATE_QUBITS });
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(VibError::DimensionMismatch { expected: dim, got: index });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn prepare_basis(bits: &Bitstring) -> Result<Self> {
        Self::basis(bits.len(), bits.index())
    }

    /// Normalised copy of `amps`; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(VibError::DimensionMismatch { expected: dim.next_power_of_two(), got: dim });
        }
        let mut s = StateVector { n: dim.trailing_zeros() as usize, amps };
        s.normalize()?;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(VibError::ZeroNorm);
        }
        let inv = 1.0 / norm;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    fn check_width(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(VibError::QubitMismatch { left: self.n, right: n });
        }
        Ok(())
    }

    /// `exp(-i theta P)` for a Pauli string `P`.
    pub fn apply_rotation(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        let (s, c) = theta.sin_cos();
        self.apply_exponential(p, Complex64::new(c, 0.0), Complex64::new(0.0, -s))
    }

    /// `exp(z P) = cosh(z) I + sinh(z) P` for any complex `z`; not unitary
    /// unless `z` is imaginary.
    pub fn apply_pauli_exp(&mut self, p: &PauliString, z: Complex64) -> Result<()> {
        self.apply_exponential(p, z.cosh(), z.sinh())
    }

    /// `alpha I + beta P`.
    fn apply_exponential(&mut self, p: &PauliString, alpha: Complex64, beta: Complex64) -> Result<()> {
        self.check_width(p.n_qubits())?;
        let flip = p.x_mask() as usize;
        if flip == 0 {
            for (b, a) in self.amps.iter_mut().enumerate() {
                *a *= alpha + beta * p.phase_on(b);
            }
            return Ok(());
        }
        let top = 1usize << (usize::BITS - 1 - flip.leading_zeros());
        for b in 0..self.amps.len() {
            if b & top != 0 {
                continue;
            }
            let b2 = b ^ flip;
            let (v, w) = (self.amps[b], self.amps[b2]);
            // P|b> = phase(b)|b2>, P|b2> = phase(b2)|b>
            self.amps[b] = alpha * v + beta * p.phase_on(b2) * w;
            self.amps[b2] = alpha * w + beta * p.phase_on(b) * v;
        }
        Ok(())
    }

    /// Multiplies every amplitude by `phase`.
    pub fn apply_global_phase(&mut self, phase: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= phase);
    }

    /// `H|psi>` as raw amplitudes (not normalised).
    pub fn apply_sum(&self, h: &PauliSum) -> Result<Vec<Complex64>> {
        self.check_width(h.n_qubits())?;
        h.apply(&self.amps)
    }

    /// Replaces the state by `H|psi>`, renormalised.
    pub fn apply_operator(&mut self, h: &PauliSum) -> Result<()> {
        self.amps = self.apply_sum(h)?;
        self.normalize()
    }

    fn term_expectation(&self, t: &PauliTerm) -> Complex64 {
        let flip = t.string.x_mask() as usize;
        let mut acc = ZERO;
        for (b, a) in self.amps.iter().enumerate() {
            if a.re != 0.0 || a.im != 0.0 {
                acc += self.amps[b ^ flip].conj() * t.string.phase_on(b) * a;
            }
        }
        t.coefficient * acc
    }

    /// `<psi|H|psi>` as a complex number, term contributions summed in order.
    pub fn expectation_complex(&self, h: &PauliSum) -> Result<Complex64> {
        self.check_width(h.n_qubits())?;
        let parts: Vec<Complex64> = h.terms().par_iter().map(|t| self.term_expectation(t)).collect();
        Ok(parts.into_iter().sum())
    }

    /// `<psi|H|psi>` for Hermitian `H`.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        let v = self.expectation_complex(h)?;
        let scale = 1.0f64.max(v.re.abs());
        if v.im.abs() > EXPECTATION_IM_TOL * scale {
            return Err(VibError::NotHermitian(v.im.abs()));
        }
        Ok(v.re)
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(VibError::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(VibError::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }
}

/// `<a|b>`.
pub fn overlap_exact(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.overlap(b)
}

/// Result of a sampled SWAP test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapTestOutcome {
    pub shots: u64,
    pub zeros: u64,
    /// Probability of reading the ancilla as 0.
    pub p_zero: f64,
    /// `2 f0 - 1`, unbiased but may fall outside `[0, 1]`.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`.
    pub estimate: f64,
}

/// Ancilla-controlled SWAP test: `P(0) = (1 + |<a|b>|^2) / 2`, sampled
/// `shots` times from a ChaCha8 stream seeded with `seed`.
pub fn swap_test(a: &StateVector, b: &StateVector, shots: u64, seed: u64) -> Result<SwapTestOutcome> {
    if shots == 0 {
        return Err(VibError::Config("SWAP test needs at least one shot".into()));
    }
    let p_zero = ((1.0 + a.fidelity(b)?) / 2.0).clamp(0.5, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zeros = (0..shots).filter(|_| rng.random_bool(p_zero)).count() as u64;
    let raw = 2.0 * zeros as f64 / shots as f64 - 1.0;
    Ok(SwapTestOutcome { shots, zeros, p_zero, raw, estimate: raw.clamp(0.0, 1.0) })
}

/// Clamped SWAP-test estimate of `|<a|b>|^2`.
pub fn swap_test_estimate(a: &StateVector, b: &StateVector, shots: u64, seed: u64) -> Result<f64> {
    Ok(swap_test(a, b, shots, seed)?.estimate)
}

/// Angle of a rotation gate: fixed, or a linear form over a parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateAngle {
    Fixed(f64),
    Linear(Vec<(usize, f64)>),
}

impl GateAngle {
    pub fn value(&self, params: &[f64]) -> f64 {
        match self {
            GateAngle::Fixed(v) => *v,
            GateAngle::Linear(form) => form.iter().map(|&(k, w)| w * params[k]).sum(),
        }
    }

    pub fn slots(&self) -> Vec<usize> {
        match self {
            GateAngle::Fixed(_) => vec![],
            GateAngle::Linear(form) => form.iter().map(|&(k, _)| k).collect(),
        }
    }
}

/// `exp(-i angle P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationGate {
    pub generator: PauliString,
    pub angle: GateAngle,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GateSequence {
    pub gates: Vec<RotationGate>,
}

impl GateSequence {
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn apply(&self, state: &mut StateVector, params: &[f64]) -> Result<()> {
        for g in &self.gates {
            state.apply_rotation(&g.generator, g.angle.value(params))?;
        }
        Ok(())
    }
}
