//! Vibrational self-consistent field over the truncated harmonic basis.
//!
//! The trial state is a product `|phi_1 ... phi_M>` of one-mode states. Each
//! sweep visits modes `0..M` in order, contracts every other mode with its
//! current orbital to obtain a `d x d` mean-field Hamiltonian, and replaces the
//! orbital with that Hamiltonian's ground eigenvector.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::{mode_matrix, EncodingScheme, LadderKind};
use crate::error::{Result, VibError};
use crate::hamiltonian::VibHamiltonian;
use crate::linalg::hermitian_eigen;
use crate::statevector::StateVector;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VscfOptions {
    /// Stop once a sweep changes the energy by less than this (Hartree).
    pub tol: f64,
    pub max_iter: usize,
    /// Weight of the previous orbital when mixing in the new one, in `[0, 1)`.
    pub damping: f64,
}

impl Default for VscfOptions {
    fn default() -> Self {
        VscfOptions { tol: 1e-10, max_iter: 200, damping: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VscfResult {
    /// One normalised `d`-vector per mode.
    pub orbitals: Vec<Vec<Complex64>>,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Energy of the starting product state followed by the energy after each sweep.
    pub energy_trace: Vec<f64>,
}

impl VscfResult {
    /// Product state embedded in the qubit register of `scheme`.
    pub fn product_state(&self, scheme: &EncodingScheme) -> Result<StateVector> {
        product_state(&self.orbitals, scheme)
    }
}

/// `(x)_m phi_m` as a qubit state vector.
pub fn product_state(orbitals: &[Vec<Complex64>], scheme: &EncodingScheme) -> Result<StateVector> {
    if orbitals.len() != scheme.modes {
        return Err(VibError::DimensionMismatch { expected: scheme.modes, got: orbitals.len() });
    }
    if let Some(o) = orbitals.iter().find(|o| o.len() != scheme.levels) {
        return Err(VibError::DimensionMismatch { expected: scheme.levels, got: o.len() });
    }
    let mut amps = vec![ZERO; 1usize << scheme.n_qubits()];
    for f in 0..scheme.fock_dim() {
        let occ = scheme.occupations(f);
        let amp: Complex64 = occ.iter().enumerate().map(|(m, &s)| orbitals[m][s]).product();
        amps[scheme.basis_index(&occ)?] = amp;
    }
    StateVector::from_amplitudes(amps)
}

/// One Hamiltonian term as a weight times per-mode `d x d` factors
/// (`None` means identity).
struct FactoredTerm {
    coefficient: Complex64,
    factors: Vec<Option<usize>>,
}

struct FactoredHamiltonian {
    modes: usize,
    levels: usize,
    matrices: Vec<DMatrix<Complex64>>,
    terms: Vec<FactoredTerm>,
}

impl FactoredHamiltonian {
    fn new(h: &VibHamiltonian) -> Result<Self> {
        let modes = h.scheme.modes;
        let levels = h.scheme.levels;
        let mut index: HashMap<Vec<LadderKind>, usize> = HashMap::new();
        let mut matrices = Vec::new();
        let mut terms = Vec::new();
        for t in h.second_quantized.terms() {
            let mut per_mode: Vec<Vec<LadderKind>> = vec![Vec::new(); modes];
            for op in &t.ops {
                if op.mode >= modes {
                    return Err(VibError::ModeOutOfRange { mode: op.mode, modes });
                }
                if op.kind != LadderKind::Identity {
                    per_mode[op.mode].push(op.kind);
                }
            }
            let mut factors = Vec::with_capacity(modes);
            for kinds in per_mode {
                if kinds.is_empty() {
                    factors.push(None);
                    continue;
                }
                let slot = match index.get(&kinds) {
                    Some(&k) => k,
                    None => {
                        matrices.push(mode_matrix(&kinds, levels)?);
                        index.insert(kinds, matrices.len() - 1);
                        matrices.len() - 1
                    }
                };
                factors.push(Some(slot));
            }
            terms.push(FactoredTerm { coefficient: t.coefficient, factors });
        }
        Ok(FactoredHamiltonian { modes, levels, matrices, terms })
    }

    /// `<phi|A|phi>` for every distinct factor matrix and mode.
    fn factor_expectations(&self, orbitals: &[DVector<Complex64>]) -> Vec<Vec<Complex64>> {
        orbitals.iter().map(|phi| self.matrices.iter().map(|a| phi.dotc(&(a * phi))).collect()).collect()
    }

    fn energy(&self, orbitals: &[DVector<Complex64>]) -> f64 {
        let ex = self.factor_expectations(orbitals);
        self.terms
            .iter()
            .map(|t| {
                t.coefficient
                    * t.factors
                        .iter()
                        .enumerate()
                        .map(|(m, f)| f.map_or(Complex64::new(1.0, 0.0), |k| ex[m][k]))
                        .product::<Complex64>()
            })
            .sum::<Complex64>()
            .re
    }

    fn mean_field(&self, mode: usize, orbitals: &[DVector<Complex64>]) -> DMatrix<Complex64> {
        let ex = self.factor_expectations(orbitals);
        let d = self.levels;
        let mut h = DMatrix::<Complex64>::zeros(d, d);
        for t in &self.terms {
            let mut w = t.coefficient;
            for (m, f) in t.factors.iter().enumerate() {
                if m != mode {
                    if let Some(k) = f {
                        w *= ex[m][*k];
                    }
                }
            }
            match t.factors[mode] {
                Some(k) => h += &self.matrices[k] * w,
                None => {
                    for s in 0..d {
                        h[(s, s)] += w;
                    }
                }
            }
        }
        (&h + h.adjoint()) * Complex64::new(0.5, 0.0)
    }
}

/// Fixes the phase so the largest component is real and positive.
fn gauge(v: &mut DVector<Complex64>) {
    let k = v.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map(|(k, _)| k).unwrap_or(0);
    let p = v[k];
    if p.norm() > 0.0 {
        let phase = p.conj() / p.norm();
        v.iter_mut().for_each(|c| *c *= phase);
    }
}

/// VSCF from the harmonic ground state `s = 0` of every mode.
pub fn vscf(h: &VibHamiltonian, opts: &VscfOptions) -> Result<VscfResult> {
    let d = h.scheme.levels;
    let mut start = vec![vec![ZERO; d]; h.scheme.modes];
    for o in &mut start {
        o[0] = Complex64::new(1.0, 0.0);
    }
    vscf_from(h, &start, opts)
}

/// VSCF starting from the given orbitals.
pub fn vscf_from(h: &VibHamiltonian, initial: &[Vec<Complex64>], opts: &VscfOptions) -> Result<VscfResult> {
    if !(0.0..1.0).contains(&opts.damping) {
        return Err(VibError::Config(format!("damping must lie in [0, 1), got {}", opts.damping)));
    }
    let fh = FactoredHamiltonian::new(h)?;
    if initial.len() != fh.modes {
        return Err(VibError::DimensionMismatch { expected: fh.modes, got: initial.len() });
    }
    let mut orbitals = Vec::with_capacity(fh.modes);
    for o in initial {
        if o.len() != fh.levels {
            return Err(VibError::DimensionMismatch { expected: fh.levels, got: o.len() });
        }
        let mut v = DVector::from_vec(o.clone());
        let n = v.norm();
        if !(n > 0.0) {
            return Err(VibError::ZeroNorm);
        }
        v /= Complex64::new(n, 0.0);
        orbitals.push(v);
    }

    let mut energy = fh.energy(&orbitals);
    let mut trace = vec![energy];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        for mode in 0..fh.modes {
            let mf = fh.mean_field(mode, &orbitals);
            let (_, vecs) = hermitian_eigen(&mf, 1e-10)?;
            let mut next: DVector<Complex64> = vecs.column(0).into_owned();
            if opts.damping > 0.0 {
                let old = &orbitals[mode];
                let overlap = old.dotc(&next);
                if overlap.norm() > 0.0 {
                    next *= overlap.conj() / overlap.norm();
                }
                next = next * Complex64::new(1.0 - opts.damping, 0.0) + old * Complex64::new(opts.damping, 0.0);
                let n = next.norm();
                next /= Complex64::new(n, 0.0);
            }
            gauge(&mut next);
            orbitals[mode] = next;
        }
        let next_energy = fh.energy(&orbitals);
        trace.push(next_energy);
        let delta = (next_energy - energy).abs();
        energy = next_energy;
        if delta < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(VscfResult {
        orbitals: orbitals.iter().map(|v| v.iter().copied().collect()).collect(),
        energy,
        iterations,
        converged,
        energy_trace: trace,
    })
}

/// Energy of an arbitrary product state.
pub fn product_energy(h: &VibHamiltonian, orbitals: &[Vec<Complex64>]) -> Result<f64> {
    let fh = FactoredHamiltonian::new(h)?;
    let v: Vec<DVector<Complex64>> = orbitals.iter().map(|o| DVector::from_vec(o.clone())).collect();
    Ok(fh.energy(&v))
}
