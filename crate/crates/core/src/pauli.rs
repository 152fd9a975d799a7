//! Weighted Pauli strings and sums of them.
//!
//! A [`PauliString`] is stored in packed symplectic form: bit `q` of `x` is set
//! when qubit `q` carries an X or Y, bit `q` of `z` when it carries a Z or Y.
//! The operator represented is `i^{|x & z|} X^x Z^z`, so `Y = iXZ` on every
//! qubit and the string itself is always Hermitian.
//!
//! Text forms put qubit 0 in the rightmost character (`"XZI"` is X on qubit 2,
//! Z on qubit 1, identity on qubit 0). Dense matrices use the same
//! little-endian convention: qubit 0 is the least-significant tensor factor.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, VibError};

/// Default magnitude below which simplification drops a term.
pub const DEFAULT_THRESHOLD: f64 = 1e-12;

/// Largest register realised as a dense `2^n x 2^n` matrix unless overridden.
pub const DENSE_GUARD: usize = 16;

const MAX_QUBITS: usize = 64;

const I_POWERS: [Complex64; 4] =
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)];

#[inline]
fn i_pow(k: u32) -> Complex64 {
    I_POWERS[(k & 3) as usize]
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-qubit Paulis on a fixed number of qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits are supported");
        PauliString { n, x: 0, z: 0 }
    }

    /// Builds a string from per-qubit axes, `axes[q]` acting on qubit `q`.
    pub fn from_axes(axes: &[Pauli]) -> Result<Self> {
        if axes.len() > MAX_QUBITS {
            return Err(VibError::TooManyQubits(axes.len()));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, p) in axes.iter().enumerate() {
            let (bx, bz) = p.bits();
            x |= (bx as u64) << q;
            z |= (bz as u64) << q;
        }
        Ok(PauliString { n: axes.len(), x, z })
    }

    /// Builds a string directly from its packed masks.
    pub fn from_masks(n: usize, x: u64, z: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(VibError::TooManyQubits(n));
        }
        let valid = if n == MAX_QUBITS { u64::MAX } else { (1u64 << n) - 1 };
        if (x | z) & !valid != 0 {
            return Err(VibError::Parse(format!("masks {x:#x}/{z:#x} reach beyond {n} qubits")));
        }
        Ok(PauliString { n, x, z })
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Result<Self> {
        let mut axes = vec![Pauli::I; n];
        if qubit >= n {
            return Err(VibError::Parse(format!("qubit {qubit} outside {n}-qubit register")));
        }
        axes[qubit] = p;
        Self::from_axes(&axes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn axes(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Key whose numeric order is lexicographic order of the text form
    /// (highest qubit first, I < X < Y < Z).
    pub fn sort_key(&self) -> u128 {
        let mut key = 0u128;
        for q in 0..self.n {
            let code = match self.get(q) {
                Pauli::I => 0u128,
                Pauli::X => 1,
                Pauli::Y => 2,
                Pauli::Z => 3,
            };
            key |= code << (2 * q);
        }
        key
    }

    /// Phase picked up by basis state `b`: `P|b> = phase(b) |b ^ x>`.
    #[inline]
    pub fn phase_on(&self, b: usize) -> Complex64 {
        let sign = ((self.z & b as u64).count_ones() & 1) * 2;
        i_pow(self.y_count() + sign)
    }

    /// Same string placed at `offset` inside a register of `n` qubits.
    pub fn embedded(&self, n: usize, offset: usize) -> Result<Self> {
        if offset + self.n > n {
            return Err(VibError::QubitMismatch { left: offset + self.n, right: n });
        }
        Self::from_masks(n, self.x << offset, self.z << offset)
    }

    /// Product of two strings as `(phase, string)`.
    pub fn product(&self, rhs: &PauliString) -> Result<(Complex64, PauliString)> {
        if self.n != rhs.n {
            return Err(VibError::QubitMismatch { left: self.n, right: rhs.n });
        }
        let out = PauliString { n: self.n, x: self.x ^ rhs.x, z: self.z ^ rhs.z };
        // X^x1 Z^z1 X^x2 Z^z2 = (-1)^{|z1 & x2|} X^(x1^x2) Z^(z1^z2)
        let swaps = (self.z & rhs.x).count_ones();
        let k = self.y_count() + rhs.y_count() + 2 * swaps + 3 * out.y_count();
        Ok((i_pow(k), out))
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n.cmp(&other.n).then(self.sort_key().cmp(&other.sort_key()))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.n).rev() {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = VibError;

    fn from_str(s: &str) -> Result<Self> {
        let mut axes = Vec::with_capacity(s.len());
        for c in s.chars().rev() {
            axes.push(
                Pauli::from_char(c).ok_or_else(|| VibError::Parse(format!("bad Pauli character {c:?} in {s:?}")))?,
            );
        }
        Self::from_axes(&axes)
    }
}

/// A Pauli string with a complex weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: Complex64, string: PauliString) -> Self {
        PauliTerm { coefficient, string }
    }

    /// Parses an axes string such as `"XZI"` with a real weight.
    pub fn parse(coefficient: f64, axes: &str) -> Result<Self> {
        Ok(PauliTerm::new(Complex64::new(coefficient, 0.0), axes.parse()?))
    }

    pub fn n_qubits(&self) -> usize {
        self.string.n
    }

    pub fn axes(&self) -> Vec<Pauli> {
        self.string.axes()
    }
}

/// Operator product of two weighted strings, phase folded into the weight.
pub fn multiply(lhs: &PauliTerm, rhs: &PauliTerm) -> Result<PauliTerm> {
    let (phase, string) = lhs.string.product(&rhs.string)?;
    Ok(PauliTerm::new(lhs.coefficient * rhs.coefficient * phase, string))
}

/// Linear combination of Pauli strings on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        PauliSum { n, terms: Vec::new() }
    }

    pub fn from_terms(n: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.n_qubits() != n) {
            return Err(VibError::QubitMismatch { left: n, right: t.n_qubits() });
        }
        Ok(PauliSum { n, terms })
    }

    pub fn identity(n: usize, coefficient: Complex64) -> Self {
        PauliSum { n, terms: vec![PauliTerm::new(coefficient, PauliString::identity(n))] }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, term: PauliTerm) -> Result<()> {
        if term.n_qubits() != self.n {
            return Err(VibError::QubitMismatch { left: self.n, right: term.n_qubits() });
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn extend(&mut self, other: &PauliSum) -> Result<()> {
        if other.n != self.n {
            return Err(VibError::QubitMismatch { left: self.n, right: other.n });
        }
        self.terms.extend_from_slice(&other.terms);
        Ok(())
    }

    pub fn scaled(&self, factor: Complex64) -> PauliSum {
        PauliSum {
            n: self.n,
            terms: self.terms.iter().map(|t| PauliTerm::new(t.coefficient * factor, t.string)).collect(),
        }
    }

    /// Hermitian conjugate (each string is Hermitian, so weights conjugate).
    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            n: self.n,
            terms: self.terms.iter().map(|t| PauliTerm::new(t.coefficient.conj(), t.string)).collect(),
        }
    }

    /// Operator product, unsimplified.
    pub fn mul(&self, rhs: &PauliSum) -> Result<PauliSum> {
        if self.n != rhs.n {
            return Err(VibError::QubitMismatch { left: self.n, right: rhs.n });
        }
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                terms.push(multiply(a, b)?);
            }
        }
        Ok(PauliSum { n: self.n, terms })
    }

    /// Merges duplicate strings, drops weights with magnitude at or below
    /// `threshold`, and sorts the survivors lexicographically by text form.
    pub fn simplify(&self, threshold: f64) -> PauliSum {
        let mut merged: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for t in &self.terms {
            *merged.entry(t.string).or_insert(Complex64::new(0.0, 0.0)) += t.coefficient;
        }
        let terms =
            merged.into_iter().filter(|(_, c)| c.norm() > threshold).map(|(s, c)| PauliTerm::new(c, s)).collect();
        PauliSum { n: self.n, terms }
    }

    pub fn simplified(&self) -> PauliSum {
        self.simplify(DEFAULT_THRESHOLD)
    }

    /// Largest imaginary part among the weights.
    pub fn max_imaginary(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.im.abs()).fold(0.0, f64::max)
    }

    /// Sum of |weight| over the non-identity strings.
    pub fn non_identity_weight(&self) -> f64 {
        self.terms.iter().filter(|t| !t.string.is_identity()).map(|t| t.coefficient.norm()).sum()
    }

    /// Dense realisation with the default guard.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.to_matrix_guarded(DENSE_GUARD)
    }

    pub fn to_matrix_guarded(&self, guard: usize) -> Result<DMatrix<Complex64>> {
        if self.n > guard {
            return Err(VibError::DenseGuard { qubits: self.n, guard });
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            let flip = t.string.x as usize;
            for b in 0..dim {
                m[(b ^ flip, b)] += t.coefficient * t.string.phase_on(b);
            }
        }
        Ok(m)
    }

    /// Applies the operator to a vector of `2^n` amplitudes.
    pub fn apply(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = 1usize << self.n;
        if amps.len() != dim {
            return Err(VibError::DimensionMismatch { expected: dim, got: amps.len() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for t in &self.terms {
            let flip = t.string.x as usize;
            for (b, a) in amps.iter().enumerate() {
                if a.re != 0.0 || a.im != 0.0 {
                    out[b ^ flip] += t.coefficient * t.string.phase_on(b) * a;
                }
            }
        }
        Ok(out)
    }

    /// Matrix restricted to the listed computational basis states, in the
    /// order given. Rows leaving the subspace are discarded.
    pub fn restricted_matrix(&self, basis: &[usize]) -> DMatrix<Complex64> {
        let position: std::collections::HashMap<usize, usize> =
            basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let dim = basis.len();
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (col, &b) in basis.iter().enumerate() {
            for t in &self.terms {
                if let Some(&row) = position.get(&(b ^ t.string.x as usize)) {
                    m[(row, col)] += t.coefficient * t.string.phase_on(b);
                }
            }
        }
        m
    }

    /// Line-oriented text form, one `<re> <im> <axes>` triple per term.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!("{:e} {:e} {}\n", t.coefficient.re, t.coefficient.im, t.string));
        }
        out
    }

    /// Inverse of [`PauliSum::to_text`]. Blank lines and `#` comments are
    /// skipped. An empty input needs `n` to fix the register width.
    pub fn from_text(text: &str, n: Option<usize>) -> Result<PauliSum> {
        let mut terms = Vec::new();
        let mut width = n;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(VibError::Parse(format!("line {}: expected `<re> <im> <axes>`, got {line:?}", lineno + 1)));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|e| VibError::Parse(format!("line {}: {e}", lineno + 1)));
            let coefficient = Complex64::new(parse(fields[0])?, parse(fields[1])?);
            let string: PauliString = fields[2].parse()?;
            match width {
                None => width = Some(string.n_qubits()),
                Some(w) if w != string.n_qubits() => {
                    return Err(VibError::QubitMismatch { left: w, right: string.n_qubits() })
                }
                _ => {}
            }
            terms.push(PauliTerm::new(coefficient, string));
        }
        let n = width.ok_or_else(|| VibError::Parse("empty sum without a qubit count".into()))?;
        PauliSum::from_terms(n, terms)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn term(coef: f64, axes: &str) -> PauliTerm {
        PauliTerm::parse(coef, axes).unwrap()
    }

    #[test]
    fn xy_is_iz() {
        let p = multiply(&term(1.0, "X"), &term(1.0, "Y")).unwrap();
        assert_eq!(p.string.to_string(), "Z");
        assert_eq!(p.coefficient, c(0.0, 1.0));
    }

    #[test]
    fn zz_is_identity() {
        let p = multiply(&term(1.0, "Z"), &term(1.0, "Z")).unwrap();
        assert!(p.string.is_identity());
        assert_eq!(p.coefficient, c(1.0, 0.0));
    }

    #[test]
    fn disjoint_supports() {
        let p = multiply(&term(1.0, "XI"), &term(1.0, "IX")).unwrap();
        assert_eq!(p.string.to_string(), "XX");
        assert_eq!(p.coefficient, c(1.0, 0.0));
    }

    #[test]
    fn full_single_qubit_table() {
        // Reference table from the 2x2 matrices.
        let names = ["I", "X", "Y", "Z"];
        for a in names {
            for b in names {
                let ta = term(1.0, a);
                let tb = term(1.0, b);
                let prod = multiply(&ta, &tb).unwrap();
                let lhs = PauliSum::from_terms(1, vec![ta]).unwrap().to_matrix().unwrap()
                    * PauliSum::from_terms(1, vec![tb]).unwrap().to_matrix().unwrap();
                let rhs = PauliSum::from_terms(1, vec![prod]).unwrap().to_matrix().unwrap();
                assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn mismatched_widths() {
        assert!(matches!(multiply(&term(1.0, "X"), &term(1.0, "XX")), Err(VibError::QubitMismatch { .. })));
    }

    #[test]
    fn simplify_merges_and_cancels() {
        let s = PauliSum::from_terms(1, vec![term(0.5, "X"), term(0.5, "X")]).unwrap();
        let s = s.simplify(DEFAULT_THRESHOLD);
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].coefficient, c(1.0, 0.0));

        let s = PauliSum::from_terms(1, vec![term(1.0, "X"), term(-1.0, "X")]).unwrap();
        assert!(s.simplified().is_empty());

        let s = PauliSum::from_terms(1, vec![term(1e-15, "Z")]).unwrap();
        assert!(s.simplify(1e-12).is_empty());
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let s = PauliSum::from_terms(
            2,
            vec![term(1.0, "ZI"), term(1.0, "IX"), term(1.0, "XZ"), term(1.0, "II"), term(1.0, "XY")],
        )
        .unwrap()
        .simplified();
        let order: Vec<String> = s.terms().iter().map(|t| t.string.to_string()).collect();
        assert_eq!(order, ["II", "IX", "XY", "XZ", "ZI"]);
    }

    #[test]
    fn matrix_examples() {
        let z = PauliSum::from_terms(1, vec![term(1.0, "Z")]).unwrap().to_matrix().unwrap();
        assert_eq!(z[(0, 0)], c(1.0, 0.0));
        assert_eq!(z[(1, 1)], c(-1.0, 0.0));

        let proj = PauliSum::from_terms(1, vec![term(0.5, "I"), term(0.5, "Z")]).unwrap().to_matrix().unwrap();
        assert_eq!(proj, DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]));

        // (X - iY)/2 = |1><0|
        let raise = PauliSum::from_terms(
            1,
            vec![PauliTerm::new(c(0.5, 0.0), "X".parse().unwrap()), PauliTerm::new(c(0.0, -0.5), "Y".parse().unwrap())],
        )
        .unwrap()
        .to_matrix()
        .unwrap();
        assert_abs_diff_eq!(raise[(1, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!((raise[(0, 0)].norm() + raise[(0, 1)].norm() + raise[(1, 1)].norm()), 0.0);
    }

    #[test]
    fn qubit_zero_is_least_significant() {
        // X on qubit 0 flips the lowest bit.
        let m = PauliSum::from_terms(2, vec![term(1.0, "IX")]).unwrap().to_matrix().unwrap();
        assert_eq!(m[(1, 0)], c(1.0, 0.0));
        assert_eq!(m[(3, 2)], c(1.0, 0.0));
    }

    #[test]
    fn dense_guard() {
        let s = PauliSum::identity(17, c(1.0, 0.0));
        assert!(matches!(s.to_matrix(), Err(VibError::DenseGuard { .. })));
    }

    #[test]
    fn text_round_trip() {
        let s = PauliSum::from_terms(
            3,
            vec![
                PauliTerm::new(c(0.5, 0.0), "XZI".parse().unwrap()),
                PauliTerm::new(c(-0.25, 1.5), "YYZ".parse().unwrap()),
            ],
        )
        .unwrap();
        let text = s.to_text();
        assert!(text.starts_with("5e-1 0e0 XZI"));
        let back = PauliSum::from_text(&text, None).unwrap();
        assert_eq!(back, s);
        assert!(PauliSum::from_text("1 0 XQ", None).is_err());
    }

    #[test]
    fn commutation() {
        let x: PauliString = "XX".parse().unwrap();
        let z: PauliString = "ZZ".parse().unwrap();
        let zi: PauliString = "ZI".parse().unwrap();
        assert!(x.commutes_with(&z));
        assert!(!x.commutes_with(&zi));
    }
}
