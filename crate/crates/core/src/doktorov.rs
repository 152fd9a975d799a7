//! Franck-Condon factors through the Doktorov unitary.
//!
//! Initial and final normal coordinates are related by `q^f = U q^i + d`.
//! The Franck-Condon amplitude between an initial level `n` and a final level
//! `m` is `<m| U_Dok |n>`, with both sides expanded in their own harmonic
//! bases and
//!
//! ```text
//! U_Dok = U_t  U_s'^dagger  U_r  U_s
//! U_t   = exp( sum_k d_k sqrt(omega_f,k / 2) (a_k^dagger - a_k) )
//! U_s   = exp( -1/2 sum_k l_k (a_k^dagger + a_k)(a_k^dagger - a_k) + 1/2 sum_k l_k )
//! U_r   = exp( 1/2 sum_jk L_jk (a_j^dagger a_k - a_j a_k^dagger) ),   L = log U
//! ```
//!
//! where `l_k = ln Omega_k`, `Omega_k = sqrt(omega_k / omega_ref)` with the
//! initial frequencies in `U_s` and the final ones in `U_s'`. Changing
//! `omega_ref` multiplies both squeezes by the same isotropic squeeze, which
//! commutes with the rotation and cancels exactly in the untruncated space; a
//! reference near the actual frequencies keeps truncated factors accurate.
//! Improper `U` (determinant -1) is handled by a mode parity applied first.
//!
//! `U_s'^dagger` is realised as `exp(-G_s')`, the inverse of `U_s'`. The two
//! agree in the untruncated space; for truncated generators the inverse keeps
//! equal-frequency squeezes cancelling exactly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::{encode_mode_product, encode_operator, BosonPolynomial, EncodingScheme, LadderOp, SchemeKind};
use crate::error::{Result, VibError};
use crate::forcefield::{transform_polynomial, ForceField, LinearCoordinateMap, Polynomial};
use crate::hamiltonian::{polynomial_to_boson, realify, QuadratureMap, HERMITIAN_TOL};
use crate::linalg::{check_orthogonal, expm, hermitian_eigen, orthogonal_log, unitarity_defect, CMatrix};
use crate::pauli::{PauliSum, DEFAULT_THRESHOLD};
use crate::statevector::{swap_test, StateVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct DuschinskyData {
    pub u: DMatrix<f64>,
    pub displacement: DVector<f64>,
    pub omega_i: Vec<f64>,
    pub omega_f: Vec<f64>,
    /// Frequency scale inside the squeeze logarithms.
    pub omega_ref: f64,
}

impl DuschinskyData {
    pub fn new(u: DMatrix<f64>, displacement: DVector<f64>, omega_i: Vec<f64>, omega_f: Vec<f64>) -> Result<Self> {
        let m = u.nrows();
        check_orthogonal(&u, 1e-10)?;
        for len in [displacement.len(), omega_i.len(), omega_f.len()] {
            if len != m {
                return Err(VibError::DimensionMismatch { expected: m, got: len });
            }
        }
        if let Some(w) = omega_i.iter().chain(&omega_f).find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(VibError::Config(format!("frequencies must be positive, got {w}")));
        }
        if displacement.iter().any(|v| !v.is_finite()) {
            return Err(VibError::Config("displacement must be finite".into()));
        }
        Ok(DuschinskyData { u, displacement, omega_i, omega_f, omega_ref: 1.0 })
    }

    /// Identity rotation and zero displacement between equal frequencies.
    pub fn identity(omega: &[f64]) -> Result<Self> {
        let m = omega.len();
        Self::new(DMatrix::identity(m, m), DVector::zeros(m), omega.to_vec(), omega.to_vec())
    }

    pub fn with_reference(mut self, omega_ref: f64) -> Result<Self> {
        if !(omega_ref > 0.0) || !omega_ref.is_finite() {
            return Err(VibError::Config(format!("reference frequency must be positive, got {omega_ref}")));
        }
        self.omega_ref = omega_ref;
        Ok(self)
    }

    /// Geometric mean of all initial and final frequencies.
    pub fn geometric_mean_frequency(&self) -> f64 {
        let all: Vec<f64> = self.omega_i.iter().chain(&self.omega_f).copied().collect();
        (all.iter().map(|w| w.ln()).sum::<f64>() / all.len() as f64).exp()
    }

    pub fn modes(&self) -> usize {
        self.omega_i.len()
    }

    fn omega_diag(omega: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(omega.len(), omega.iter().map(|w| w.sqrt())))
    }

    /// `Omega = diag(sqrt(omega))` of the initial state.
    pub fn omega_initial(&self) -> DMatrix<f64> {
        Self::omega_diag(&self.omega_i)
    }

    pub fn omega_final(&self) -> DMatrix<f64> {
        Self::omega_diag(&self.omega_f)
    }

    /// `J = sqrt(Omega_f) U sqrt(Omega_i)^{-1}`.
    pub fn j_matrix(&self) -> DMatrix<f64> {
        let sf = self.omega_final().map(f64::sqrt);
        let si = self.omega_initial().map(|v| if v > 0.0 { 1.0 / v.sqrt() } else { 0.0 });
        sf * &self.u * si
    }

    /// `J' = sqrt(Omega_f)^{-1} U^T sqrt(Omega_i)`.
    pub fn j_prime_matrix(&self) -> DMatrix<f64> {
        let sf = self.omega_final().map(|v| if v > 0.0 { 1.0 / v.sqrt() } else { 0.0 });
        let si = self.omega_initial().map(f64::sqrt);
        sf * self.u.transpose() * si
    }

    /// The affine map `q^f = U q^i + d`.
    pub fn coordinate_map(&self) -> LinearCoordinateMap {
        LinearCoordinateMap { a: self.u.clone(), b: self.displacement.clone() }
    }

    fn is_proper(&self) -> bool {
        self.u.determinant() > 0.0
    }

    /// Rotation part with the last mode reflected when `U` is improper.
    fn proper_rotation(&self) -> DMatrix<f64> {
        let mut r = self.u.clone();
        if !self.is_proper() {
            let last = r.ncols() - 1;
            r.column_mut(last).neg_mut();
        }
        r
    }
}

/// Exponents of the four Doktorov factors plus the optional parity.
#[derive(Debug, Clone, PartialEq)]
pub struct DoktorovFactors {
    pub displacement: BosonPolynomial,
    pub squeeze_initial: BosonPolynomial,
    pub squeeze_final: BosonPolynomial,
    pub rotation: BosonPolynomial,
    /// Mode whose parity is applied before everything else (improper `U`).
    pub parity_mode: Option<usize>,
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn squeeze_generator(omega: &[f64], omega_ref: f64) -> BosonPolynomial {
    let mut g = BosonPolynomial::new();
    let mut trace = 0.0;
    for (k, &w) in omega.iter().enumerate() {
        let l = 0.5 * (w / omega_ref).ln();
        trace += l;
        let mut plus = BosonPolynomial::new();
        plus.push(real(1.0), vec![LadderOp::create(k)]);
        plus.push(real(1.0), vec![LadderOp::annihilate(k)]);
        let mut minus = BosonPolynomial::new();
        minus.push(real(1.0), vec![LadderOp::create(k)]);
        minus.push(real(-1.0), vec![LadderOp::annihilate(k)]);
        g.add(&plus.mul(&minus).scaled(real(-0.5 * l)));
    }
    g.push(real(0.5 * trace), vec![]);
    g
}

pub fn doktorov_factors(dusch: &DuschinskyData) -> Result<DoktorovFactors> {
    let m = dusch.modes();
    let mut displacement = BosonPolynomial::new();
    for k in 0..m {
        let c = dusch.displacement[k] * (0.5 * dusch.omega_f[k]).sqrt();
        if c != 0.0 {
            displacement.push(real(c), vec![LadderOp::create(k)]);
            displacement.push(real(-c), vec![LadderOp::annihilate(k)]);
        }
    }
    let log_u = orthogonal_log(&dusch.proper_rotation())?;
    let mut rotation = BosonPolynomial::new();
    for j in 0..m {
        for k in 0..m {
            let l = log_u[(j, k)];
            if l.abs() > 1e-15 {
                rotation.push(real(0.5 * l), vec![LadderOp::create(j), LadderOp::annihilate(k)]);
                rotation.push(real(-0.5 * l), vec![LadderOp::annihilate(j), LadderOp::create(k)]);
            }
        }
    }
    Ok(DoktorovFactors {
        displacement,
        squeeze_initial: squeeze_generator(&dusch.omega_i, dusch.omega_ref),
        squeeze_final: squeeze_generator(&dusch.omega_f, dusch.omega_ref),
        rotation,
        parity_mode: if dusch.is_proper() { None } else { Some(m - 1) },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DoktorovMethod {
    /// Matrix exponential of each truncated generator.
    DenseExp,
    /// Each generator Pauli-encoded and applied as `N` first-order steps.
    Trotter(usize),
}

/// Doktorov unitary restricted to the encoded product states, in Fock order
/// (`sum_m s_m d^m`); entry `(m, n)` is `<m|U_Dok|n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoktorovOperator {
    pub matrix: CMatrix,
    pub scheme: EncodingScheme,
}

fn parity_matrix(mode: usize, scheme: &EncodingScheme) -> CMatrix {
    let dim = scheme.fock_dim();
    CMatrix::from_diagonal(&DVector::from_iterator(
        dim,
        (0..dim).map(|f| if scheme.occupations(f)[mode] % 2 == 1 { real(-1.0) } else { real(1.0) }),
    ))
}

fn dense_doktorov(f: &DoktorovFactors, scheme: &EncodingScheme) -> Result<CMatrix> {
    let (m, d) = (scheme.modes, scheme.levels);
    let ut = expm(&f.displacement.to_fock_matrix(m, d)?);
    let us = expm(&f.squeeze_initial.to_fock_matrix(m, d)?);
    let ur = expm(&f.rotation.to_fock_matrix(m, d)?);
    let usf_inv = expm(&(f.squeeze_final.to_fock_matrix(m, d)? * real(-1.0)));
    let mut u = ut * usf_inv * ur * us;
    if let Some(k) = f.parity_mode {
        u *= parity_matrix(k, scheme);
    }
    Ok(u)
}

/// One first-order step sequence `prod_j exp(c_j P_j / N)` applied `N` times.
fn apply_trotterized(state: &mut StateVector, g: &PauliSum, steps: usize) -> Result<()> {
    let inv = 1.0 / steps as f64;
    for _ in 0..steps {
        for t in g.terms() {
            state.apply_pauli_exp(&t.string, t.coefficient * inv)?;
        }
    }
    Ok(())
}

/// Inverse of [`apply_trotterized`]: reversed order, negated weights.
fn apply_trotterized_inverse(state: &mut StateVector, g: &PauliSum, steps: usize) -> Result<()> {
    let inv = 1.0 / steps as f64;
    for _ in 0..steps {
        for t in g.terms().iter().rev() {
            state.apply_pauli_exp(&t.string, -t.coefficient * inv)?;
        }
    }
    Ok(())
}

fn trotter_doktorov(f: &DoktorovFactors, scheme: &EncodingScheme, steps: usize) -> Result<CMatrix> {
    if steps == 0 {
        return Err(VibError::Config("Trotter step count must be at least 1".into()));
    }
    let gt = encode_operator(&f.displacement, scheme)?;
    let gs = encode_operator(&f.squeeze_initial, scheme)?;
    let gsf = encode_operator(&f.squeeze_final, scheme)?;
    let gr = encode_operator(&f.rotation, scheme)?;
    let parity = match f.parity_mode {
        Some(k) => {
            let diag = DMatrix::from_diagonal(&DVector::from_iterator(
                scheme.levels,
                (0..scheme.levels).map(|s| if s % 2 == 1 { real(-1.0) } else { real(1.0) }),
            ));
            Some(encode_mode_product(real(1.0), &[(k, diag)], scheme)?)
        }
        None => None,
    };
    let basis = scheme.encoded_basis();
    let dim = basis.len();
    let mut out = CMatrix::zeros(dim, dim);
    for (col, &b) in basis.iter().enumerate() {
        let mut s = StateVector::basis(scheme.n_qubits(), b)?;
        if let Some(p) = &parity {
            let amps = s.apply_sum(p)?;
            s = StateVector::from_amplitudes(amps)?;
        }
        apply_trotterized(&mut s, &gs, steps)?;
        apply_trotterized(&mut s, &gr, steps)?;
        apply_trotterized_inverse(&mut s, &gsf, steps)?;
        apply_trotterized(&mut s, &gt, steps)?;
        for (row, &r) in basis.iter().enumerate() {
            out[(row, col)] = s.amplitudes()[r];
        }
    }
    Ok(out)
}

/// Doktorov unitary on the compact encoding with `d` levels per mode.
pub fn build_doktorov(dusch: &DuschinskyData, d: usize, method: DoktorovMethod) -> Result<DoktorovOperator> {
    build_doktorov_encoded(dusch, &EncodingScheme::new(SchemeKind::Compact, d, dusch.modes())?, method)
}

pub fn build_doktorov_encoded(
    dusch: &DuschinskyData,
    scheme: &EncodingScheme,
    method: DoktorovMethod,
) -> Result<DoktorovOperator> {
    if scheme.modes != dusch.modes() {
        return Err(VibError::DimensionMismatch { expected: dusch.modes(), got: scheme.modes });
    }
    let factors = doktorov_factors(dusch)?;
    let matrix = match method {
        DoktorovMethod::DenseExp => dense_doktorov(&factors, scheme)?,
        DoktorovMethod::Trotter(n) => trotter_doktorov(&factors, scheme, n)?,
    };
    Ok(DoktorovOperator { matrix, scheme: *scheme })
}

impl DoktorovOperator {
    /// `max |U^dagger U - I|`, the truncation diagnostic.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }

    /// `<m|U_Dok|n>` for Fock occupations.
    pub fn element(&self, final_occ: &[usize], initial_occ: &[usize]) -> Complex64 {
        self.matrix[(self.scheme.fock_index(final_occ), self.scheme.fock_index(initial_occ))]
    }

    fn encoded_amplitudes(&self, s: &StateVector) -> Result<DVector<Complex64>> {
        if s.n_qubits() != self.scheme.n_qubits() {
            return Err(VibError::QubitMismatch { left: self.scheme.n_qubits(), right: s.n_qubits() });
        }
        let basis = self.scheme.encoded_basis();
        Ok(DVector::from_iterator(basis.len(), basis.iter().map(|&b| s.amplitudes()[b])))
    }

    /// `U_Dok |psi>` as raw qubit-register amplitudes (not renormalised).
    pub fn apply_raw(&self, s: &StateVector) -> Result<Vec<Complex64>> {
        let v = &self.matrix * self.encoded_amplitudes(s)?;
        let mut amps = vec![ZERO; 1usize << self.scheme.n_qubits()];
        for (k, &b) in self.scheme.encoded_basis().iter().enumerate() {
            amps[b] = v[k];
        }
        Ok(amps)
    }

    /// `<f| U_Dok |i>`.
    pub fn amplitude(&self, psi_f: &StateVector, psi_i: &StateVector) -> Result<Complex64> {
        let fi = self.encoded_amplitudes(psi_f)?;
        let ii = self.encoded_amplitudes(psi_i)?;
        Ok(fi.dotc(&(&self.matrix * ii)))
    }
}

/// How the overlap is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OverlapReadout {
    Exact,
    /// Sampled SWAP test on the normalised `U_Dok|psi_i>`, rescaled by its norm.
    SwapTest {
        shots: u64,
        seed: u64,
    },
}

/// `|<psi_f| U_Dok |psi_i>|^2`.
pub fn franck_condon_factor(
    psi_i: &StateVector,
    psi_f: &StateVector,
    op: &DoktorovOperator,
    readout: OverlapReadout,
) -> Result<f64> {
    match readout {
        OverlapReadout::Exact => Ok(op.amplitude(psi_f, psi_i)?.norm_sqr()),
        OverlapReadout::SwapTest { shots, seed } => {
            let raw = op.apply_raw(psi_i)?;
            let norm2: f64 = raw.iter().map(|a| a.norm_sqr()).sum();
            let moved = StateVector::from_amplitudes(raw)?;
            Ok(swap_test(psi_f, &moved, shots, seed)?.estimate * norm2)
        }
    }
}

/// Transition dipole as a polynomial of degree at most 2 in final coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleSurface {
    pub polynomial: Polynomial,
}

impl DipoleSurface {
    pub fn new(polynomial: Polynomial) -> Result<Self> {
        if polynomial.degree() > 2 {
            return Err(VibError::Config(format!("dipole surface degree {} exceeds 2", polynomial.degree())));
        }
        if polynomial.terms().any(|(_, c)| !c.is_finite()) {
            return Err(VibError::Config("dipole coefficients must be finite".into()));
        }
        Ok(DipoleSurface { polynomial })
    }

    pub fn constant(modes: usize, value: f64) -> Self {
        DipoleSurface { polynomial: Polynomial::constant(modes, value) }
    }

    /// Qubit operator with final-state frequencies `omega_f`.
    pub fn encode(&self, omega_f: &[f64], scheme: &EncodingScheme) -> Result<PauliSum> {
        let boson = polynomial_to_boson(&self.polynomial, &QuadratureMap::normal(omega_f))?;
        Ok(encode_operator(&boson, scheme)?.simplify(DEFAULT_THRESHOLD))
    }
}

/// `|<psi_f| mu U_Dok |psi_i>|^2`.
pub fn non_condon_factor(
    psi_i: &StateVector,
    psi_f: &StateVector,
    mu: &DipoleSurface,
    dusch: &DuschinskyData,
    op: &DoktorovOperator,
) -> Result<f64> {
    let mu_q = mu.encode(&dusch.omega_f, &op.scheme)?;
    let moved = op.apply_raw(psi_i)?;
    let with_mu = mu_q.apply(&moved)?;
    let amp: Complex64 = psi_f.amplitudes().iter().zip(&with_mu).map(|(f, v)| f.conj() * v).sum();
    Ok(amp.norm_sqr())
}

/// Final-state eigenpairs expressed in the initial harmonic basis, and the
/// Franck-Condon matrix against initial harmonic levels.
#[derive(Debug, Clone)]
pub struct TransformedRoute {
    /// Final-state energies, ascending.
    pub energies: Vec<f64>,
    /// Final-state eigenvectors in the initial basis, Fock order, one per column.
    pub vectors: CMatrix,
    pub scheme: EncodingScheme,
}

impl TransformedRoute {
    /// `|<final k | initial n>|^2` with `n` a product of initial harmonic levels.
    pub fn fc(&self, final_index: usize, initial_occ: &[usize]) -> f64 {
        self.vectors[(self.scheme.fock_index(initial_occ), final_index)].norm_sqr()
    }

    /// Final eigenvector `k` embedded in the qubit register.
    pub fn state(&self, k: usize) -> Result<StateVector> {
        let mut amps = vec![ZERO; 1usize << self.scheme.n_qubits()];
        for (row, &b) in self.scheme.encoded_basis().iter().enumerate() {
            amps[b] = self.vectors[(row, k)];
        }
        StateVector::from_amplitudes(amps)
    }
}

/// Diagonalises the final-surface Hamiltonian written in initial coordinates,
/// `H = sum_i omega_i,i (n_i + 1/2) + V_f(U q + d) - sum_i omega_i,i^2 q_i^2 / 2`.
pub fn fc_via_transformed_hamiltonian(
    ff_f: &ForceField,
    dusch: &DuschinskyData,
    scheme: &EncodingScheme,
) -> Result<TransformedRoute> {
    let m = dusch.modes();
    if ff_f.modes() != m || scheme.modes != m {
        return Err(VibError::DimensionMismatch { expected: m, got: ff_f.modes() });
    }
    let wf = ff_f.frequencies();
    for (a, b) in wf.iter().zip(&dusch.omega_f) {
        if (a - b).abs() > 1e-10 * b.abs() {
            return Err(VibError::Config(format!(
                "final force field frequency {a} disagrees with the Duschinsky data ({b})"
            )));
        }
    }
    let wi = &dusch.omega_i;
    let mut correction = transform_polynomial(&ff_f.potential(), &dusch.coordinate_map())?;
    for (i, w) in wi.iter().enumerate() {
        correction.add_term(&[i, i], -0.5 * w * w)?;
    }
    let mut h = polynomial_to_boson(&correction.pruned(0.0), &QuadratureMap::normal(wi))?;
    for (i, &w) in wi.iter().enumerate() {
        h.push(real(w), vec![LadderOp::number(i)]);
        h.push(real(0.5 * w), vec![]);
    }
    let qubit = realify(&encode_operator(&h.simplified(0.0), scheme)?, HERMITIAN_TOL)?;
    let matrix = qubit.restricted_matrix(&scheme.encoded_basis());
    let (energies, vectors) = hermitian_eigen(&matrix, 1e-10)?;
    Ok(TransformedRoute { energies, vectors, scheme: *scheme })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_transform_is_identity() {
        let dusch = DuschinskyData::identity(&[0.7, 1.3]).unwrap();
        let op = build_doktorov(&dusch, 4, DoktorovMethod::DenseExp).unwrap();
        let id = CMatrix::identity(16, 16);
        assert!((&op.matrix - id).iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn j_matrices_for_identity() {
        let dusch = DuschinskyData::identity(&[0.7, 1.3]).unwrap();
        assert!((dusch.j_matrix() - DMatrix::identity(2, 2)).amax() < 1e-15);
        assert!((dusch.j_prime_matrix() - DMatrix::identity(2, 2)).amax() < 1e-15);
    }

    #[test]
    fn reflection_is_parity() {
        let dusch =
            DuschinskyData::new(DMatrix::from_element(1, 1, -1.0), DVector::zeros(1), vec![1.0], vec![1.0]).unwrap();
        let op = build_doktorov(&dusch, 4, DoktorovMethod::DenseExp).unwrap();
        for n in 0..4 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(op.matrix[(n, n)].re, sign, epsilon = 1e-14);
        }
    }

    #[test]
    fn dipole_q_matrix_element() {
        let w = 0.8;
        let dusch = DuschinskyData::identity(&[w]).unwrap();
        let scheme = EncodingScheme::compact(4, 1).unwrap();
        let op = build_doktorov_encoded(&dusch, &scheme, DoktorovMethod::DenseExp).unwrap();
        let mu = DipoleSurface::new(Polynomial::variable(1, 0).unwrap()).unwrap();
        let i = StateVector::basis(2, 0).unwrap();
        let f = StateVector::basis(2, 1).unwrap();
        assert_abs_diff_eq!(non_condon_factor(&i, &f, &mu, &dusch, &op).unwrap(), 1.0 / (2.0 * w), epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_orthogonal() {
        let u = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.0, 1.0]);
        let r = DuschinskyData::new(u, DVector::zeros(2), vec![1.0; 2], vec![1.0; 2]);
        assert!(matches!(r, Err(VibError::NotOrthogonal(_))));
    }
}
