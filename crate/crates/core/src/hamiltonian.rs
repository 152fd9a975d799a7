//! Truncated vibrational Hamiltonians in second-quantized and qubit form.
//!
//! With `q_i = (a_i + a_i^dagger) / sqrt(2 omega_i)` the harmonic part of a
//! normal-mode force field is `sum_i omega_i (n_i + 1/2)`. It is written down
//! in that form directly; cubic and quartic terms are expanded into ordered
//! ladder products and realised as truncated matrix products.
//!
//! In a localized basis the normal ladder operators are `a = U a^L`, so the
//! harmonic part becomes `sum_jk G_jk a_j^dagger a_k` with
//! `G = U^T diag(omega) U`, and every normal coordinate is the linear form
//! `q_i = sum_j U_ij (a_j + a_j^dagger) / sqrt(2 omega_i)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::{encode_operator, BosonPolynomial, EncodingScheme, LadderOp};
use crate::error::{Result, VibError};
use crate::forcefield::{localization_map, ForceField, Polynomial};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::pauli::{PauliSum, PauliTerm, DEFAULT_THRESHOLD, DENSE_GUARD};
use crate::statevector::StateVector;

/// Tolerance on the Hermiticity residue of assembled Hamiltonians.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ModeBasis {
    Normal,
    /// Localized modes related to the normal modes by an orthogonal matrix.
    Localized(DMatrix<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianOptions {
    /// Highest polynomial degree kept from the force field (2, 3 or 4).
    pub order: usize,
    pub zero_point: bool,
    /// Simplification threshold for the qubit form.
    pub threshold: f64,
}

impl Default for HamiltonianOptions {
    fn default() -> Self {
        HamiltonianOptions { order: 4, zero_point: true, threshold: DEFAULT_THRESHOLD }
    }
}

/// Ladder realisation of the coordinates: `q_i = sum_j c_ij (a_j + a_j^dagger)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureMap {
    pub c: DMatrix<f64>,
}

impl QuadratureMap {
    /// Normal modes with frequencies `omega`.
    pub fn normal(omega: &[f64]) -> Self {
        let m = omega.len();
        QuadratureMap { c: DMatrix::from_fn(m, m, |i, j| if i == j { (2.0 * omega[i]).powf(-0.5) } else { 0.0 }) }
    }

    /// Normal coordinates written in localized ladder operators.
    pub fn localized(u: &DMatrix<f64>, omega: &[f64]) -> Result<Self> {
        let w = localization_map(u, omega)?;
        let m = omega.len();
        Ok(QuadratureMap { c: DMatrix::from_fn(m, m, |i, j| w.wq[(i, j)] * (2.0 * omega[j]).powf(-0.5)) })
    }

    pub fn coordinate(&self, i: usize) -> BosonPolynomial {
        let mut p = BosonPolynomial::new();
        for j in 0..self.c.ncols() {
            let w = self.c[(i, j)];
            if w != 0.0 {
                p.push(Complex64::new(w, 0.0), vec![LadderOp::annihilate(j)]);
                p.push(Complex64::new(w, 0.0), vec![LadderOp::create(j)]);
            }
        }
        p
    }
}

/// Expands a coordinate polynomial into ordered ladder products.
pub fn polynomial_to_boson(poly: &Polynomial, map: &QuadratureMap) -> Result<BosonPolynomial> {
    if map.c.nrows() != poly.modes() {
        return Err(VibError::DimensionMismatch { expected: poly.modes(), got: map.c.nrows() });
    }
    let coords: Vec<BosonPolynomial> = (0..poly.modes()).map(|i| map.coordinate(i)).collect();
    let mut out = BosonPolynomial::new();
    for (indices, c) in poly.terms() {
        if c == 0.0 {
            continue;
        }
        let mut term = BosonPolynomial::constant(Complex64::new(c, 0.0));
        for &i in indices {
            term = term.mul(&coords[i]);
        }
        out.add(&term);
    }
    Ok(out.simplified(0.0))
}

/// Anharmonic part of the force field (cubic and quartic terms up to `order`).
fn anharmonic_polynomial(ff: &ForceField, order: usize) -> Result<Polynomial> {
    let ff = ff.truncated(order)?;
    let mut p = Polynomial::new(ff.modes());
    for (k, v) in ff.cubic_terms() {
        p.add_term(k, v)?;
    }
    for (k, v) in ff.quartic_terms() {
        p.add_term(k, v)?;
    }
    Ok(p)
}

/// `p^2/2 + V(q)` as a ladder-operator polynomial.
pub fn build_second_quantized(
    ff: &ForceField,
    basis: &ModeBasis,
    opts: &HamiltonianOptions,
) -> Result<BosonPolynomial> {
    let omega = ff.frequencies();
    let m = ff.modes();
    let mut h = BosonPolynomial::new();
    let (g, qmap) = match basis {
        ModeBasis::Normal => {
            (DMatrix::from_diagonal(&nalgebra::DVector::from_vec(omega.clone())), QuadratureMap::normal(&omega))
        }
        ModeBasis::Localized(u) => {
            let qmap = QuadratureMap::localized(u, &omega)?;
            let g = u.transpose() * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(omega.clone())) * u;
            (g, qmap)
        }
    };
    for j in 0..m {
        for k in 0..m {
            let w = g[(j, k)];
            if w == 0.0 {
                continue;
            }
            let ops =
                if j == k { vec![LadderOp::number(j)] } else { vec![LadderOp::create(j), LadderOp::annihilate(k)] };
            h.push(Complex64::new(w, 0.0), ops);
        }
    }
    if opts.zero_point {
        h.push(Complex64::new(ff.zero_point_energy(), 0.0), vec![]);
    }
    h.add(&polynomial_to_boson(&anharmonic_polynomial(ff, opts.order)?, &qmap)?);
    Ok(h.simplified(0.0))
}

/// Truncated, encoded vibrational Hamiltonian.
#[derive(Debug, Clone)]
pub struct VibHamiltonian {
    pub second_quantized: BosonPolynomial,
    pub qubit_form: PauliSum,
    pub scheme: EncodingScheme,
    pub source: ForceField,
    pub basis: ModeBasis,
    pub options: HamiltonianOptions,
}

impl VibHamiltonian {
    pub fn includes_zero_point(&self) -> bool {
        self.options.zero_point
    }

    pub fn n_qubits(&self) -> usize {
        self.scheme.n_qubits()
    }

    pub fn term_count(&self) -> usize {
        self.qubit_form.len()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.source.frequencies()
    }

    /// Computational-basis index of a product of levels.
    pub fn basis_state(&self, occupations: &[usize]) -> Result<StateVector> {
        StateVector::basis(self.n_qubits(), self.scheme.basis_index(occupations)?)
    }

    /// `|0...0>` in the mode basis (lowest harmonic level of every mode).
    pub fn reference_state(&self) -> Result<StateVector> {
        self.basis_state(&vec![0; self.scheme.modes])
    }

    /// Dense matrix on the encoded subspace, Fock order.
    pub fn encoded_matrix(&self) -> Result<CMatrix> {
        let dim = self.scheme.fock_dim();
        if dim > 1 << DENSE_GUARD {
            return Err(VibError::DenseGuard { qubits: dim.ilog2() as usize + 1, guard: DENSE_GUARD });
        }
        Ok(self.qubit_form.restricted_matrix(&self.scheme.encoded_basis()))
    }
}

/// Drops imaginary parts of a Hermitian-by-construction sum, failing if any
/// exceeds `tol`.
pub fn realify(sum: &PauliSum, tol: f64) -> Result<PauliSum> {
    let worst = sum.max_imaginary();
    if worst > tol {
        return Err(VibError::NotHermitian(worst));
    }
    let terms = sum.terms().iter().map(|t| PauliTerm::new(Complex64::new(t.coefficient.re, 0.0), t.string)).collect();
    PauliSum::from_terms(sum.n_qubits(), terms)
}

pub fn build_qubit_hamiltonian(
    ff: &ForceField,
    scheme: &EncodingScheme,
    basis: &ModeBasis,
    opts: &HamiltonianOptions,
) -> Result<VibHamiltonian> {
    if scheme.modes != ff.modes() {
        return Err(VibError::DimensionMismatch { expected: ff.modes(), got: scheme.modes });
    }
    let second_quantized = build_second_quantized(ff, basis, opts)?;
    let encoded = encode_operator(&second_quantized, scheme)?.simplify(opts.threshold);
    let qubit_form = realify(&encoded, HERMITIAN_TOL)?.simplify(opts.threshold);
    Ok(VibHamiltonian {
        second_quantized,
        qubit_form,
        scheme: *scheme,
        source: ff.clone(),
        basis: basis.clone(),
        options: *opts,
    })
}

/// Normal-mode Hamiltonian with default options.
pub fn build_default(ff: &ForceField, scheme: &EncodingScheme) -> Result<VibHamiltonian> {
    build_qubit_hamiltonian(ff, scheme, &ModeBasis::Normal, &HamiltonianOptions::default())
}

/// Lowest `n_lowest` eigenvalues on the encoded subspace, ascending.
pub fn exact_spectrum(h: &VibHamiltonian, n_lowest: usize) -> Result<Vec<f64>> {
    let (mut values, _) = hermitian_eigen(&h.encoded_matrix()?, HERMITIAN_TOL)?;
    values.truncate(n_lowest);
    Ok(values)
}

/// Eigenvalues of the full `2^n` qubit matrix, including states outside the
/// encoded subspace.
pub fn full_register_spectrum(h: &VibHamiltonian) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(&h.qubit_form.to_matrix()?, HERMITIAN_TOL)?.0)
}

/// Lowest `n_lowest` eigenpairs with eigenvectors embedded in the qubit register.
pub fn eigenstates(h: &VibHamiltonian, n_lowest: usize) -> Result<Vec<(f64, StateVector)>> {
    let (values, vectors) = hermitian_eigen(&h.encoded_matrix()?, HERMITIAN_TOL)?;
    let basis = h.scheme.encoded_basis();
    let dim = 1usize << h.n_qubits();
    values
        .into_iter()
        .take(n_lowest)
        .enumerate()
        .map(|(k, e)| {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            for (row, &b) in basis.iter().enumerate() {
                amps[b] = vectors[(row, k)];
            }
            Ok((e, StateVector::from_amplitudes(amps)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::SchemeKind;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_mode_harmonic_compact_d2() {
        let w = 0.37;
        let ff = ForceField::from_frequencies("x", &[w]).unwrap();
        let h = build_default(&ff, &EncodingScheme::compact(2, 1).unwrap()).unwrap();
        assert_eq!(h.qubit_form.len(), 2);
        assert_abs_diff_eq!(h.qubit_form.terms()[0].coefficient.re, w, epsilon = 1e-15);
        assert_eq!(h.qubit_form.terms()[1].string.to_string(), "Z");
        assert_abs_diff_eq!(h.qubit_form.terms()[1].coefficient.re, -w / 2.0, epsilon = 1e-15);
        let levels = exact_spectrum(&h, 2).unwrap();
        assert_abs_diff_eq!(levels[0], w / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(levels[1], 1.5 * w, epsilon = 1e-15);
    }

    #[test]
    fn cubic_single_mode_has_eight_products() {
        let mut k3 = std::collections::BTreeMap::new();
        k3.insert([0, 0, 0], 0.1);
        let ff = ForceField::new("c", vec![0.5], k3, Default::default()).unwrap();
        let opts = HamiltonianOptions { zero_point: false, ..Default::default() };
        let qmap = QuadratureMap::normal(&ff.frequencies());
        let mut raw = BosonPolynomial::constant(Complex64::new(0.1, 0.0));
        for _ in 0..3 {
            raw = raw.mul(&qmap.coordinate(0));
        }
        assert_eq!(raw.len(), 8);
        for t in raw.terms() {
            assert_abs_diff_eq!(t.coefficient.re, 0.1 * 2f64.powf(-1.5), epsilon = 1e-15);
        }
        let full = build_second_quantized(&ff, &ModeBasis::Normal, &opts).unwrap();
        assert_eq!(full.len(), 9);
    }

    #[test]
    fn separable_harmonic_levels() {
        let ff = ForceField::h2o().truncated(2).unwrap();
        let h = build_default(&ff, &EncodingScheme::compact(4, 3).unwrap()).unwrap();
        let w = ff.frequencies();
        let mut expected: Vec<f64> = (0..64)
            .map(|f| {
                let n = [f % 4, (f / 4) % 4, f / 16];
                (0..3).map(|i| w[i] * (n[i] as f64 + 0.5)).sum()
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        let levels = exact_spectrum(&h, 64).unwrap();
        for (a, b) in levels.iter().zip(&expected) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_point_shift() {
        let ff = ForceField::h2o();
        let scheme = EncodingScheme::compact(2, 3).unwrap();
        let with = build_default(&ff, &scheme).unwrap();
        let opts = HamiltonianOptions { zero_point: false, ..Default::default() };
        let without = build_qubit_hamiltonian(&ff, &scheme, &ModeBasis::Normal, &opts).unwrap();
        let zpe = ff.zero_point_energy();
        for (a, b) in exact_spectrum(&with, 8).unwrap().iter().zip(exact_spectrum(&without, 8).unwrap()) {
            assert_abs_diff_eq!(a - b, zpe, epsilon = 1e-15);
        }
    }

    #[test]
    fn h2o_term_counts() {
        let ff = ForceField::h2o();
        let h4 = build_default(&ff, &EncodingScheme::compact(4, 3).unwrap()).unwrap();
        assert_eq!(h4.term_count(), 216);
        let h2 = build_default(&ff, &EncodingScheme::compact(2, 3).unwrap()).unwrap();
        assert_eq!(h2.term_count(), 7);
        assert_eq!(h2.n_qubits(), 3);
        assert_eq!(h4.n_qubits(), 6);
    }

    #[test]
    fn localized_identity_matches_normal() {
        let ff = ForceField::h2o();
        let scheme = EncodingScheme::new(SchemeKind::Compact, 2, 3).unwrap();
        let opts = HamiltonianOptions::default();
        let normal = build_qubit_hamiltonian(&ff, &scheme, &ModeBasis::Normal, &opts).unwrap();
        let local =
            build_qubit_hamiltonian(&ff, &scheme, &ModeBasis::Localized(DMatrix::identity(3, 3)), &opts).unwrap();
        assert_eq!(normal.qubit_form.len(), local.qubit_form.len());
        for (a, b) in normal.qubit_form.terms().iter().zip(local.qubit_form.terms()) {
            assert_eq!(a.string, b.string);
            assert_abs_diff_eq!((a.coefficient - b.coefficient).norm(), 0.0, epsilon = 1e-18);
        }
    }
}
