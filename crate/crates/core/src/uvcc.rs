//! Unitary vibrational coupled cluster ansatz and gradient-descent VQE.
//!
//! Singles move one mode from level `s` to `t > s`; doubles move two modes
//! `m < n` upward at once. With amplitudes `theta_k` and excitation operators
//! `E_k`,
//!
//! ```text
//! T - T^dagger = sum_k theta_k (E_k - E_k^dagger) = i sum_j alpha_j(theta) sigma_j
//! ```
//!
//! and the circuit is the first-order product `prod_j exp(i alpha_j sigma_j)`,
//! one rotation per Pauli string, singles before doubles, each block in
//! canonical string order.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{encode_mode_product, transition_matrix, EncodingScheme};
use crate::error::{Result, VibError};
use crate::hamiltonian::VibHamiltonian;
use crate::pauli::{PauliString, PauliSum, DEFAULT_THRESHOLD};
use crate::statevector::{GateAngle, GateSequence, RotationGate, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Excitation {
    /// `|to><from|` on one mode.
    Single { mode: usize, from: usize, to: usize },
    /// `|to_m><from_m| (x) |to_n><from_n|` on modes `m < n`.
    Double { modes: (usize, usize), from: (usize, usize), to: (usize, usize) },
}

impl Excitation {
    pub fn rank(&self) -> usize {
        match self {
            Excitation::Single { .. } => 1,
            Excitation::Double { .. } => 2,
        }
    }

    /// `E - E^dagger` encoded on `scheme`.
    pub fn antihermitian_generator(&self, scheme: &EncodingScheme) -> Result<PauliSum> {
        let d = scheme.levels;
        let factors = match *self {
            Excitation::Single { mode, from, to } => vec![(mode, transition_matrix(to, from, d)?)],
            Excitation::Double { modes, from, to } => {
                vec![(modes.0, transition_matrix(to.0, from.0, d)?), (modes.1, transition_matrix(to.1, from.1, d)?)]
            }
        };
        let e = encode_mode_product(Complex64::new(1.0, 0.0), &factors, scheme)?;
        let mut g = e.clone();
        g.extend(&e.adjoint().scaled(Complex64::new(-1.0, 0.0)))?;
        Ok(g.simplified())
    }
}

/// Singles (rank >= 1) then doubles (rank >= 2), each in lexicographic order.
pub fn enumerate_excitations(modes: usize, levels: usize, rank: usize) -> Result<Vec<Excitation>> {
    if !(1..=2).contains(&rank) {
        return Err(VibError::Config(format!("excitation rank must be 1 or 2, got {rank}")));
    }
    let pairs: Vec<(usize, usize)> = (0..levels).flat_map(|s| (s + 1..levels).map(move |t| (s, t))).collect();
    let mut out = Vec::new();
    for mode in 0..modes {
        for &(from, to) in &pairs {
            out.push(Excitation::Single { mode, from, to });
        }
    }
    if rank >= 2 {
        for m in 0..modes {
            for n in m + 1..modes {
                for &(fm, tm) in &pairs {
                    for &(fn_, tn) in &pairs {
                        out.push(Excitation::Double { modes: (m, n), from: (fm, fn_), to: (tm, tn) });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Amplitudes paired with their excitations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UvccParams {
    pub excitations: Vec<Excitation>,
    pub theta: Vec<f64>,
}

impl UvccParams {
    pub fn zeros(modes: usize, levels: usize, rank: usize) -> Result<Self> {
        let excitations = enumerate_excitations(modes, levels, rank)?;
        let theta = vec![0.0; excitations.len()];
        Ok(UvccParams { excitations, theta })
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn get(&self, e: &Excitation) -> Option<f64> {
        self.excitations.iter().position(|x| x == e).map(|k| self.theta[k])
    }

    pub fn set(&mut self, e: &Excitation, value: f64) -> Result<()> {
        let k = self
            .excitations
            .iter()
            .position(|x| x == e)
            .ok_or_else(|| VibError::Config(format!("excitation {e:?} is not part of this ansatz")))?;
        self.theta[k] = value;
        Ok(())
    }
}

/// `T - T^dagger` for the given amplitudes, simplified.
pub fn build_generator(p: &UvccParams, scheme: &EncodingScheme) -> Result<PauliSum> {
    if p.excitations.len() != p.theta.len() {
        return Err(VibError::DimensionMismatch { expected: p.excitations.len(), got: p.theta.len() });
    }
    let mut g = PauliSum::new(scheme.n_qubits());
    for (e, &th) in p.excitations.iter().zip(&p.theta) {
        if th != 0.0 {
            g.extend(&e.antihermitian_generator(scheme)?.scaled(Complex64::new(th, 0.0)))?;
        }
    }
    Ok(g.simplified())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    /// Every mode in its lowest level.
    HarmonicGround,
    /// A VSCF product state, one orbital per mode.
    Vscf(Vec<Vec<Complex64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateOrdering {
    #[default]
    Canonical,
    Reversed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzCircuit {
    pub gates: GateSequence,
    pub excitations: Vec<Excitation>,
    pub reference: Reference,
    pub scheme: EncodingScheme,
}

impl AnsatzCircuit {
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn parameter_count(&self) -> usize {
        self.excitations.len()
    }

    pub fn reference_state(&self) -> Result<StateVector> {
        match &self.reference {
            Reference::HarmonicGround => {
                StateVector::basis(self.scheme.n_qubits(), self.scheme.basis_index(&vec![0; self.scheme.modes])?)
            }
            Reference::Vscf(orbitals) => crate::vscf::product_state(orbitals, &self.scheme),
        }
    }

    /// `|Psi(theta)>`.
    pub fn state(&self, theta: &[f64]) -> Result<StateVector> {
        if theta.len() != self.parameter_count() {
            return Err(VibError::DimensionMismatch { expected: self.parameter_count(), got: theta.len() });
        }
        let mut s = self.reference_state()?;
        self.gates.apply(&mut s, theta)?;
        Ok(s)
    }

    pub fn energy(&self, h: &PauliSum, theta: &[f64]) -> Result<f64> {
        self.state(theta)?.expectation(h)
    }
}

/// Rotation gates of one block: each string's angle `-alpha_j(theta)` as a
/// linear form over the parameter slots in `block`.
fn block_gates(excitations: &[(usize, Excitation)], scheme: &EncodingScheme) -> Result<Vec<RotationGate>> {
    let mut forms: BTreeMap<PauliString, Vec<(usize, f64)>> = BTreeMap::new();
    for &(slot, e) in excitations {
        for t in e.antihermitian_generator(scheme)?.terms() {
            // coefficient = i alpha; the gate exp(-i angle P) needs angle = -alpha
            let alpha = t.coefficient.im;
            if t.coefficient.re.abs() > DEFAULT_THRESHOLD {
                return Err(VibError::Numerical(format!("excitation {e:?} generator is not anti-Hermitian")));
            }
            forms.entry(t.string).or_default().push((slot, -alpha));
        }
    }
    Ok(forms
        .into_iter()
        .filter(|(s, _)| !s.is_identity())
        .map(|(generator, form)| RotationGate { generator, angle: GateAngle::Linear(form) })
        .collect())
}

/// Trotterized ansatz circuit for `excitations` on `scheme`.
pub fn build_circuit(
    excitations: &[Excitation],
    scheme: &EncodingScheme,
    ordering: GateOrdering,
    reference: Reference,
) -> Result<AnsatzCircuit> {
    let indexed: Vec<(usize, Excitation)> = excitations.iter().copied().enumerate().collect();
    let singles: Vec<_> = indexed.iter().copied().filter(|(_, e)| e.rank() == 1).collect();
    let doubles: Vec<_> = indexed.iter().copied().filter(|(_, e)| e.rank() == 2).collect();
    let mut gates = block_gates(&singles, scheme)?;
    gates.extend(block_gates(&doubles, scheme)?);
    if ordering == GateOrdering::Reversed {
        gates.reverse();
    }
    Ok(AnsatzCircuit { gates: GateSequence { gates }, excitations: excitations.to_vec(), reference, scheme: *scheme })
}

/// Singles-and-doubles (or singles-only) ansatz from the harmonic ground state.
pub fn default_circuit(scheme: &EncodingScheme, rank: usize) -> Result<AnsatzCircuit> {
    let ex = enumerate_excitations(scheme.modes, scheme.levels, rank)?;
    build_circuit(&ex, scheme, GateOrdering::Canonical, Reference::HarmonicGround)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VqeOptions {
    /// Dimensionless step; the update is `theta -= step * grad / Lambda` with
    /// `Lambda` the summed magnitude of non-identity Hamiltonian terms.
    pub step: f64,
    pub max_iter: usize,
    /// Central-difference half width.
    pub grad_eps: f64,
    /// Half width of the uniform initial perturbation around zero.
    pub init_perturbation: f64,
    pub seed: u64,
    /// Accept every step as is (no halving on an energy increase).
    pub pure_gd: bool,
    /// Converged once an accepted step lowers the energy by less than this.
    pub energy_tol: f64,
    /// Converged once the gradient norm falls below this.
    pub grad_tol: f64,
}

impl Default for VqeOptions {
    fn default() -> Self {
        VqeOptions {
            step: 0.1,
            max_iter: 2000,
            grad_eps: 1e-4,
            init_perturbation: 0.01,
            seed: 0,
            pure_gd: false,
            energy_tol: 1e-13,
            grad_tol: 1e-12,
        }
    }
}

/// Energy increases tolerated before a plain gradient descent is declared divergent.
pub const DIVERGENCE_STREAK: usize = 10;

/// Energy slack under which a step does not count as an increase.
pub const INCREASE_TOL: f64 = 1e-14;

/// One iteration of the descent loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeStep {
    pub iter: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct VqeResult {
    pub theta: Vec<f64>,
    pub energy: f64,
    pub trace: Vec<VqeStep>,
    pub state: StateVector,
    pub converged: bool,
    pub evaluations: usize,
}

/// Central-difference gradient of `E(theta)`.
pub fn gradient(circuit: &AnsatzCircuit, h: &PauliSum, theta: &[f64], eps: f64) -> Result<Vec<f64>> {
    (0..theta.len())
        .into_par_iter()
        .map(|k| {
            let mut plus = theta.to_vec();
            let mut minus = theta.to_vec();
            plus[k] += eps;
            minus[k] -= eps;
            Ok((circuit.energy(h, &plus)? - circuit.energy(h, &minus)?) / (2.0 * eps))
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn vqe_minimize(h: &VibHamiltonian, circuit: &AnsatzCircuit, opts: &VqeOptions) -> Result<VqeResult> {
    if circuit.scheme != h.scheme {
        return Err(VibError::Config("ansatz and Hamiltonian use different encodings".into()));
    }
    if !(opts.step > 0.0) || !(opts.grad_eps > 0.0) || opts.init_perturbation < 0.0 {
        return Err(VibError::Config("step and grad_eps must be positive, init_perturbation non-negative".into()));
    }
    let ham = &h.qubit_form;
    let lambda = ham.non_identity_weight();
    let scale = if lambda > 0.0 { 1.0 / lambda } else { 1.0 };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut theta: Vec<f64> = (0..circuit.parameter_count())
        .map(|_| {
            if opts.init_perturbation > 0.0 {
                rng.random_range(-opts.init_perturbation..=opts.init_perturbation)
            } else {
                0.0
            }
        })
        .collect();

    let mut energy = circuit.energy(ham, &theta)?;
    let mut evaluations = 1;
    let mut step = opts.step;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut increases = 0;
    let mut grad = gradient(circuit, ham, &theta, opts.grad_eps)?;
    evaluations += 2 * theta.len();
    trace.push(VqeStep { iter: 0, energy, grad_norm: norm(&grad), step, accepted: true });

    for iter in 1..=opts.max_iter {
        let grad_norm = norm(&grad);
        if grad_norm < opts.grad_tol {
            converged = true;
            break;
        }
        let candidate: Vec<f64> = theta.iter().zip(&grad).map(|(t, g)| t - step * scale * g).collect();
        let e_new = circuit.energy(ham, &candidate)?;
        evaluations += 1;
        let increased = e_new > energy + INCREASE_TOL;
        if increased && !opts.pure_gd {
            trace.push(VqeStep { iter, energy: e_new, grad_norm, step, accepted: false });
            step *= 0.5;
            if step < opts.step * 1e-9 {
                converged = true;
                break;
            }
            continue;
        }
        if increased {
            increases += 1;
            if increases >= DIVERGENCE_STREAK {
                trace.push(VqeStep { iter, energy: e_new, grad_norm, step, accepted: true });
                return Err(VibError::Diverged { iterations: iter, trace });
            }
        } else {
            increases = 0;
        }
        let drop = energy - e_new;
        theta = candidate;
        energy = e_new;
        grad = gradient(circuit, ham, &theta, opts.grad_eps)?;
        evaluations += 2 * theta.len();
        trace.push(VqeStep { iter, energy, grad_norm: norm(&grad), step, accepted: true });
        if !increased && drop < opts.energy_tol {
            converged = true;
            break;
        }
    }
    let state = circuit.state(&theta)?;
    Ok(VqeResult { theta, energy, trace, state, converged, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_mode_generator_is_minus_i_theta_y() {
        let scheme = EncodingScheme::compact(2, 1).unwrap();
        let mut p = UvccParams::zeros(1, 2, 1).unwrap();
        p.theta[0] = 0.3;
        let g = build_generator(&p, &scheme).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.terms()[0].string.to_string(), "Y");
        assert_abs_diff_eq!(g.terms()[0].coefficient.im, -0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(g.terms()[0].coefficient.re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn double_generator_on_xy_yx() {
        let scheme = EncodingScheme::compact(2, 2).unwrap();
        let th = 0.2;
        let p = UvccParams {
            excitations: vec![Excitation::Double { modes: (0, 1), from: (0, 0), to: (1, 1) }],
            theta: vec![th],
        };
        let g = build_generator(&p, &scheme).unwrap();
        let strings: Vec<String> = g.terms().iter().map(|t| t.string.to_string()).collect();
        assert_eq!(strings, vec!["XY", "YX"]);
        for t in g.terms() {
            assert_abs_diff_eq!(t.coefficient.im.abs(), th / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_parameters_give_empty_generator() {
        let scheme = EncodingScheme::compact(4, 2).unwrap();
        let p = UvccParams::zeros(2, 4, 2).unwrap();
        assert!(build_generator(&p, &scheme).unwrap().is_empty());
    }

    #[test]
    fn gate_counts() {
        let c = default_circuit(&EncodingScheme::compact(2, 3).unwrap(), 2).unwrap();
        assert_eq!((c.gate_count(), c.parameter_count()), (9, 6));
        let c = default_circuit(&EncodingScheme::compact(2, 1).unwrap(), 1).unwrap();
        assert_eq!((c.gate_count(), c.parameter_count()), (1, 1));
        assert_eq!(c.gates.gates[0].generator.to_string(), "Y");
        let c = default_circuit(&EncodingScheme::compact(2, 2).unwrap(), 2).unwrap();
        assert_eq!((c.gate_count(), c.parameter_count()), (4, 3));
        let weights: Vec<usize> = c.gates.gates.iter().map(|g| g.generator.weight()).collect();
        assert_eq!(weights, vec![1, 1, 2, 2]);
    }

    #[test]
    fn single_gate_matches_generator_exponential() {
        let scheme = EncodingScheme::compact(2, 1).unwrap();
        let c = default_circuit(&scheme, 1).unwrap();
        let s = c.state(&[0.4]).unwrap();
        // exp(-i 0.4 Y)|0> = cos|0> + sin|1>
        assert_abs_diff_eq!(s.amplitudes()[0].re, 0.4f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, 0.4f64.sin(), epsilon = 1e-15);
    }

    #[test]
    fn rank_validated() {
        assert!(enumerate_excitations(2, 2, 3).is_err());
        assert!(enumerate_excitations(2, 2, 0).is_err());
    }
}
