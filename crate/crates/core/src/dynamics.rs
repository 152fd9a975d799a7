//! First-order product-formula time evolution.
//!
//! One step for time `t / N` applies `exp(-i lambda_j h_j t / N)` for every
//! term in the plan's order; `N` steps approximate `exp(-i H t)` with an error
//! of order `t^2 / N`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VibError};
use crate::linalg::{expm, CMatrix};
use crate::pauli::{PauliSum, PauliTerm};
use crate::statevector::StateVector;

/// Largest imaginary weight accepted in an evolution Hamiltonian.
pub const IMAGINARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermOrder {
    #[default]
    Canonical,
    Reversed,
    /// Explicit order: entry `k` names the canonical term applied `k`-th.
    Permutation(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionPlan {
    terms: Vec<PauliTerm>,
    n: usize,
    pub total_time: f64,
    pub steps: usize,
}

impl EvolutionPlan {
    pub fn new(h: &PauliSum, total_time: f64, steps: usize, order: &TermOrder) -> Result<Self> {
        if steps == 0 {
            return Err(VibError::Config("evolution needs at least one step".into()));
        }
        if !total_time.is_finite() {
            return Err(VibError::Config("evolution time must be finite".into()));
        }
        let worst = h.max_imaginary();
        if worst > IMAGINARY_TOL {
            return Err(VibError::NotHermitian(worst));
        }
        let canonical = h.simplify(0.0);
        let base = canonical.terms();
        let terms = match order {
            TermOrder::Canonical => base.to_vec(),
            TermOrder::Reversed => base.iter().rev().copied().collect(),
            TermOrder::Permutation(p) => {
                let mut seen = vec![false; base.len()];
                if p.len() != base.len() {
                    return Err(VibError::DimensionMismatch { expected: base.len(), got: p.len() });
                }
                for &k in p {
                    if k >= base.len() || std::mem::replace(&mut seen[k], true) {
                        return Err(VibError::Config(format!("term order {p:?} is not a permutation")));
                    }
                }
                p.iter().map(|&k| base[k]).collect()
            }
        };
        Ok(EvolutionPlan { terms, n: h.n_qubits(), total_time, steps })
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }
}

fn step_for(s: &mut StateVector, terms: &[PauliTerm], dt: f64) -> Result<()> {
    for t in terms {
        let angle = t.coefficient.re * dt;
        if t.string.is_identity() {
            s.apply_global_phase(Complex64::from_polar(1.0, -angle));
        } else {
            s.apply_rotation(&t.string, angle)?;
        }
    }
    Ok(())
}

/// Applies one product-formula step of length `t / N`.
pub fn trotter_step(s: &mut StateVector, plan: &EvolutionPlan) -> Result<()> {
    if s.n_qubits() != plan.n {
        return Err(VibError::QubitMismatch { left: plan.n, right: s.n_qubits() });
    }
    step_for(s, &plan.terms, plan.dt())
}

/// `N` product-formula steps from `s0`.
pub fn evolve(s0: &StateVector, plan: &EvolutionPlan) -> Result<StateVector> {
    let mut s = s0.clone();
    for _ in 0..plan.steps {
        trotter_step(&mut s, plan)?;
    }
    Ok(s)
}

/// Dense `exp(-i H t)` for oracles and small registers.
pub fn exact_propagator(h: &PauliSum, t: f64) -> Result<CMatrix> {
    let m = h.to_matrix()?;
    Ok(expm(&(m * Complex64::new(0.0, -t))))
}

/// `exp(-i H t)|s0>` by dense exponentiation.
pub fn evolve_exact(s0: &StateVector, h: &PauliSum, t: f64) -> Result<StateVector> {
    let u = exact_propagator(h, t)?;
    let v = u * nalgebra::DVector::from_column_slice(s0.amplitudes());
    StateVector::from_amplitudes(v.iter().copied().collect())
}

/// Expectation values on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `values[k][j]` is observable `j` at `times[k]`.
    pub values: Vec<Vec<f64>>,
}

/// Evolves cumulatively through `times` (non-decreasing, starting at or after
/// 0) with `ceil(dt * steps_per_unit_time)` steps per interval.
pub fn observable_trajectory(
    s0: &StateVector,
    h: &PauliSum,
    observables: &[PauliSum],
    times: &[f64],
    steps_per_unit_time: f64,
    order: &TermOrder,
) -> Result<Trajectory> {
    if !(steps_per_unit_time > 0.0) {
        return Err(VibError::Config("steps per unit time must be positive".into()));
    }
    if let Some(o) = observables.iter().find(|o| o.n_qubits() != h.n_qubits()) {
        return Err(VibError::QubitMismatch { left: h.n_qubits(), right: o.n_qubits() });
    }
    if s0.n_qubits() != h.n_qubits() {
        return Err(VibError::QubitMismatch { left: h.n_qubits(), right: s0.n_qubits() });
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(VibError::Config("time grid must be finite, non-negative and non-decreasing".into()));
    }
    let template = EvolutionPlan::new(h, 1.0, 1, order)?;
    let mut state = s0.clone();
    let mut now = 0.0;
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let span = t - now;
        if span > 0.0 {
            let steps = ((span * steps_per_unit_time).ceil() as usize).max(1);
            let dt = span / steps as f64;
            for _ in 0..steps {
                step_for(&mut state, template.terms(), dt)?;
            }
            now = t;
        }
        values.push(observables.iter().map(|o| state.expectation(o)).collect::<Result<Vec<f64>>>()?);
    }
    Ok(Trajectory { times: times.to_vec(), values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(terms: &[(f64, &str)]) -> PauliSum {
        let n = terms[0].1.len();
        PauliSum::from_terms(n, terms.iter().map(|(c, s)| PauliTerm::parse(*c, s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn single_term_step_is_exact() {
        let h = sum(&[(0.7, "XY")]);
        let plan = EvolutionPlan::new(&h, 1.3, 4, &TermOrder::Canonical).unwrap();
        let mut s = StateVector::basis(2, 1).unwrap();
        let s0 = s.clone();
        trotter_step(&mut s, &plan).unwrap();
        let exact = evolve_exact(&s0, &h, 1.3 / 4.0).unwrap();
        assert!(s.distance(&exact).unwrap() < 1e-14);
    }

    #[test]
    fn zero_time_is_noop() {
        let h = sum(&[(0.7, "XY"), (0.2, "ZZ"), (1.0, "II")]);
        let plan = EvolutionPlan::new(&h, 0.0, 5, &TermOrder::Canonical).unwrap();
        let s0 = StateVector::basis(2, 2).unwrap();
        assert!(evolve(&s0, &plan).unwrap().distance(&s0).unwrap() < 1e-15);
    }

    #[test]
    fn permutation_validated() {
        let h = sum(&[(0.7, "XI"), (0.2, "ZZ")]);
        assert!(EvolutionPlan::new(&h, 1.0, 1, &TermOrder::Permutation(vec![0, 0])).is_err());
        assert!(EvolutionPlan::new(&h, 1.0, 1, &TermOrder::Permutation(vec![1, 0])).is_ok());
        assert!(EvolutionPlan::new(&h, 1.0, 0, &TermOrder::Canonical).is_err());
    }

    #[test]
    fn empty_grid_and_zero_time() {
        let h = sum(&[(0.5, "Z")]);
        let obs = vec![sum(&[(1.0, "Z")])];
        let s0 = StateVector::zero(1).unwrap();
        let tr = observable_trajectory(&s0, &h, &obs, &[0.0], 10.0, &TermOrder::Canonical).unwrap();
        assert_eq!(tr.values, vec![vec![1.0]]);
        let tr = observable_trajectory(&s0, &h, &obs, &[], 10.0, &TermOrder::Canonical).unwrap();
        assert!(tr.values.is_empty());
        assert!(observable_trajectory(&s0, &h, &obs, &[1.0, 0.5], 10.0, &TermOrder::Canonical).is_err());
    }
}
