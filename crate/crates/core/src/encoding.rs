//! Truncated ladder operators and their qubit encodings.
//!
//! Each mode keeps its lowest `d` harmonic-oscillator levels. The direct
//! (one-hot) encoding spends `d` qubits per mode and marks level `s` by
//! exciting qubit `s` of the mode register. The compact (binary) encoding spends
//! `ceil(log2 d)` qubits and stores the binary digits of `s`, bit `k` on qubit
//! `k` of the register. Mode `m` always occupies the contiguous block starting
//! at qubit `m * qubits_per_mode`.
//!
//! Operators are encoded mode by mode: the ordered product of ladder operators
//! acting on one mode is first multiplied out as a truncated `d x d` matrix and
//! only then expanded into projectors `|s><t|`, each of which becomes Pauli
//! strings through
//!
//! ```text
//! |0><0| = (I + Z)/2    |1><1| = (I - Z)/2
//! |1><0| = (X - iY)/2   |0><1| = (X + iY)/2
//! ```

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VibError};
use crate::pauli::{PauliString, PauliSum, PauliTerm};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LadderKind {
    Create,
    Annihilate,
    Number,
    Identity,
}

/// One ladder operator acting on one mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LadderOp {
    pub kind: LadderKind,
    pub mode: usize,
}

impl LadderOp {
    pub fn create(mode: usize) -> Self {
        LadderOp { kind: LadderKind::Create, mode }
    }

    pub fn annihilate(mode: usize) -> Self {
        LadderOp { kind: LadderKind::Annihilate, mode }
    }

    pub fn number(mode: usize) -> Self {
        LadderOp { kind: LadderKind::Number, mode }
    }

    pub fn adjoint(self) -> Self {
        let kind = match self.kind {
            LadderKind::Create => LadderKind::Annihilate,
            LadderKind::Annihilate => LadderKind::Create,
            k => k,
        };
        LadderOp { kind, mode: self.mode }
    }
}

/// Truncated `d x d` matrix of a ladder operator.
pub fn ladder_matrix(kind: LadderKind, d: usize) -> Result<DMatrix<Complex64>> {
    if d < 2 {
        return Err(VibError::TooFewLevels(d));
    }
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    match kind {
        LadderKind::Create => {
            for s in 0..d - 1 {
                m[(s + 1, s)] = Complex64::new(((s + 1) as f64).sqrt(), 0.0);
            }
        }
        LadderKind::Annihilate => {
            for s in 0..d - 1 {
                m[(s, s + 1)] = Complex64::new(((s + 1) as f64).sqrt(), 0.0);
            }
        }
        LadderKind::Number => {
            for s in 0..d {
                m[(s, s)] = Complex64::new(s as f64, 0.0);
            }
        }
        LadderKind::Identity => m.fill_with_identity(),
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Direct,
    Compact,
}

impl std::str::FromStr for SchemeKind {
    type Err = VibError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(SchemeKind::Direct),
            "compact" => Ok(SchemeKind::Compact),
            other => Err(VibError::Config(format!("unknown encoding scheme {other:?}"))),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Direct => "direct",
            SchemeKind::Compact => "compact",
        })
    }
}

pub(crate) fn ceil_log2(d: usize) -> usize {
    (usize::BITS - (d - 1).leading_zeros()) as usize
}

/// How `modes` truncated oscillators of `levels` levels sit on qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodingScheme {
    pub kind: SchemeKind,
    pub levels: usize,
    pub modes: usize,
}

impl EncodingScheme {
    pub fn new(kind: SchemeKind, levels: usize, modes: usize) -> Result<Self> {
        if levels < 2 {
            return Err(VibError::TooFewLevels(levels));
        }
        if modes == 0 {
            return Err(VibError::NoModes(0));
        }
        let scheme = EncodingScheme { kind, levels, modes };
        if scheme.n_qubits() > 64 {
            return Err(VibError::TooManyQubits(scheme.n_qubits()));
        }
        Ok(scheme)
    }

    pub fn direct(levels: usize, modes: usize) -> Result<Self> {
        Self::new(SchemeKind::Direct, levels, modes)
    }

    pub fn compact(levels: usize, modes: usize) -> Result<Self> {
        Self::new(SchemeKind::Compact, levels, modes)
    }

    pub fn qubits_per_mode(&self) -> usize {
        match self.kind {
            SchemeKind::Direct => self.levels,
            SchemeKind::Compact => ceil_log2(self.levels),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.modes * self.qubits_per_mode()
    }

    pub fn register_offset(&self, mode: usize) -> usize {
        mode * self.qubits_per_mode()
    }

    /// Number of product basis states `d^M`.
    pub fn fock_dim(&self) -> usize {
        self.levels.pow(self.modes as u32)
    }

    /// Occupations of Fock index `f = sum_m s_m d^m` (mode 0 fastest).
    pub fn occupations(&self, mut f: usize) -> Vec<usize> {
        let mut occ = Vec::with_capacity(self.modes);
        for _ in 0..self.modes {
            occ.push(f % self.levels);
            f /= self.levels;
        }
        occ
    }

    pub fn fock_index(&self, occupations: &[usize]) -> usize {
        occupations.iter().rev().fold(0, |acc, &s| acc * self.levels + s)
    }

    fn level_pattern(&self, s: usize) -> u64 {
        match self.kind {
            SchemeKind::Direct => 1u64 << s,
            SchemeKind::Compact => s as u64,
        }
    }

    /// Computational-basis index of a product of level states.
    pub fn basis_index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.modes {
            return Err(VibError::DimensionMismatch { expected: self.modes, got: occupations.len() });
        }
        let mut index = 0u64;
        for (mode, &s) in occupations.iter().enumerate() {
            if s >= self.levels {
                return Err(VibError::OccupationOutOfRange { mode, level: s, levels: self.levels });
            }
            index |= self.level_pattern(s) << self.register_offset(mode);
        }
        Ok(index as usize)
    }

    /// Qubit-space indices of every encoded product state, in Fock order.
    pub fn encoded_basis(&self) -> Vec<usize> {
        (0..self.fock_dim()).map(|f| self.basis_index(&self.occupations(f)).expect("occupations in range")).collect()
    }
}

/// Computational basis state; `bits[q]` is qubit `q`. Displays highest qubit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitstring {
    pub bits: Vec<bool>,
}

impl Bitstring {
    pub fn from_index(index: usize, n: usize) -> Self {
        Bitstring { bits: (0..n).map(|q| (index >> q) & 1 == 1).collect() }
    }

    pub fn index(&self) -> usize {
        self.bits.iter().enumerate().fold(0, |acc, (q, &b)| acc | ((b as usize) << q))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits.iter().rev() {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn encode_basis_state(occupations: &[usize], scheme: &EncodingScheme) -> Result<Bitstring> {
    let index = scheme.basis_index(occupations)?;
    Ok(Bitstring::from_index(index, scheme.n_qubits()))
}

/// Qubits needed for a molecule of `n_atoms` atoms with `d` levels per mode.
pub fn qubit_count(n_atoms: usize, linear: bool, d: usize, kind: SchemeKind) -> Result<usize> {
    if d < 2 {
        return Err(VibError::TooFewLevels(d));
    }
    let modes = 3 * n_atoms as i64 - if linear { 5 } else { 6 };
    if modes <= 0 {
        return Err(VibError::NoModes(modes));
    }
    let per_mode = match kind {
        SchemeKind::Direct => d,
        SchemeKind::Compact => ceil_log2(d),
    };
    Ok(modes as usize * per_mode)
}

/// One monomial of a [`BosonPolynomial`].
#[derive(Debug, Clone, PartialEq)]
pub struct BosonTerm {
    pub coefficient: Complex64,
    pub ops: Vec<LadderOp>,
}

/// Sum of ordered ladder-operator products with complex weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BosonPolynomial {
    terms: Vec<BosonTerm>,
}

impl BosonPolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = Self::new();
        p.push(c, vec![]);
        p
    }

    pub fn terms(&self) -> &[BosonTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, coefficient: Complex64, ops: Vec<LadderOp>) {
        self.terms.push(BosonTerm { coefficient, ops });
    }

    pub fn add(&mut self, other: &BosonPolynomial) {
        self.terms.extend_from_slice(&other.terms);
    }

    pub fn scaled(&self, factor: Complex64) -> BosonPolynomial {
        BosonPolynomial {
            terms: self
                .terms
                .iter()
                .map(|t| BosonTerm { coefficient: t.coefficient * factor, ops: t.ops.clone() })
                .collect(),
        }
    }

    /// Ordered product `self * rhs`.
    pub fn mul(&self, rhs: &BosonPolynomial) -> BosonPolynomial {
        let mut out = BosonPolynomial::new();
        for a in &self.terms {
            for b in &rhs.terms {
                let mut ops = a.ops.clone();
                ops.extend_from_slice(&b.ops);
                out.push(a.coefficient * b.coefficient, ops);
            }
        }
        out
    }

    pub fn adjoint(&self) -> BosonPolynomial {
        BosonPolynomial {
            terms: self
                .terms
                .iter()
                .map(|t| BosonTerm {
                    coefficient: t.coefficient.conj(),
                    ops: t.ops.iter().rev().map(|o| o.adjoint()).collect(),
                })
                .collect(),
        }
    }

    /// Largest mode index referenced, if any.
    pub fn max_mode(&self) -> Option<usize> {
        self.terms.iter().flat_map(|t| t.ops.iter().map(|o| o.mode)).max()
    }

    /// Reorders each product by mode (operators on different modes commute;
    /// order within a mode is kept), drops identities, and merges equal
    /// products. Weights at or below `threshold` are removed.
    pub fn simplified(&self, threshold: f64) -> BosonPolynomial {
        let mut merged: std::collections::BTreeMap<Vec<LadderOp>, Complex64> = std::collections::BTreeMap::new();
        for t in &self.terms {
            let mut ops: Vec<LadderOp> = t.ops.iter().copied().filter(|o| o.kind != LadderKind::Identity).collect();
            ops.sort_by_key(|o| o.mode);
            *merged.entry(ops).or_insert(ZERO) += t.coefficient;
        }
        BosonPolynomial {
            terms: merged
                .into_iter()
                .filter(|(_, c)| c.norm() > threshold)
                .map(|(ops, coefficient)| BosonTerm { coefficient, ops })
                .collect(),
        }
    }

    /// Truncated-matrix realisation on `d^modes` product states, Fock index
    /// `sum_m s_m d^m`.
    pub fn to_fock_matrix(&self, modes: usize, d: usize) -> Result<DMatrix<Complex64>> {
        let dim = d.pow(modes as u32);
        let mut out = DMatrix::<Complex64>::zeros(dim, dim);
        let mut cache: HashMap<Vec<LadderKind>, Vec<(usize, usize, Complex64)>> = HashMap::new();
        for t in &self.terms {
            let per_mode = split_by_mode(&t.ops, modes)?;
            for kinds in &per_mode {
                if !cache.contains_key(kinds) {
                    let m = mode_matrix(kinds, d)?;
                    let mut nz = Vec::new();
                    for r in 0..d {
                        for c in 0..d {
                            if m[(r, c)].norm() > 0.0 {
                                nz.push((r, c, m[(r, c)]));
                            }
                        }
                    }
                    cache.insert(kinds.clone(), nz);
                }
            }
            let factors: Vec<_> = per_mode.iter().map(|k| &cache[k]).collect();
            // Cartesian product of per-mode nonzeros; mode 0 is the fastest index.
            let mut entries: Vec<(usize, usize, Complex64)> = vec![(0, 0, t.coefficient)];
            let mut stride = 1usize;
            for nz in factors {
                let mut next = Vec::with_capacity(entries.len() * nz.len());
                for &(r, c, v) in &entries {
                    for &(mr, mc, mv) in nz {
                        next.push((r + mr * stride, c + mc * stride, v * mv));
                    }
                }
                entries = next;
                stride *= d;
            }
            for (r, c, v) in entries {
                out[(r, c)] += v;
            }
        }
        Ok(out)
    }
}

fn split_by_mode(ops: &[LadderOp], modes: usize) -> Result<Vec<Vec<LadderKind>>> {
    let mut per_mode = vec![Vec::new(); modes];
    for op in ops {
        if op.mode >= modes {
            return Err(VibError::ModeOutOfRange { mode: op.mode, modes });
        }
        if op.kind != LadderKind::Identity {
            per_mode[op.mode].push(op.kind);
        }
    }
    Ok(per_mode)
}

/// Ordered product of truncated ladder matrices for one mode.
pub fn mode_matrix(kinds: &[LadderKind], d: usize) -> Result<DMatrix<Complex64>> {
    let mut m = ladder_matrix(LadderKind::Identity, d)?;
    for &k in kinds {
        m *= ladder_matrix(k, d)?;
    }
    Ok(m)
}

/// Weighted single-qubit factors of `|a><b|` for bits `a`, `b`.
fn projector_factors(a: bool, b: bool) -> [(Complex64, bool, bool); 2] {
    // (weight, x bit, z bit)
    match (a, b) {
        (false, false) => [(Complex64::new(0.5, 0.0), false, false), (Complex64::new(0.5, 0.0), false, true)],
        (true, true) => [(Complex64::new(0.5, 0.0), false, false), (Complex64::new(-0.5, 0.0), false, true)],
        (true, false) => [(Complex64::new(0.5, 0.0), true, false), (Complex64::new(0.0, -0.5), true, true)],
        (false, true) => [(Complex64::new(0.5, 0.0), true, false), (Complex64::new(0.0, 0.5), true, true)],
    }
}

/// Pauli expansion of `prod_q |a_q><b_q|` over `width` qubits, weighted by `coef`.
fn expand_projector(a: u64, b: u64, width: usize, coef: Complex64, out: &mut Vec<(Complex64, u64, u64)>) {
    let mut partial: Vec<(Complex64, u64, u64)> = vec![(coef, 0, 0)];
    for q in 0..width {
        let factors = projector_factors((a >> q) & 1 == 1, (b >> q) & 1 == 1);
        let mut next = Vec::with_capacity(partial.len() * 2);
        for &(c, x, z) in &partial {
            for &(w, bx, bz) in &factors {
                next.push((c * w, x | ((bx as u64) << q), z | ((bz as u64) << q)));
            }
        }
        partial = next;
    }
    out.extend(partial);
}

/// Pauli decomposition of a `d x d` single-mode operator on its own register
/// (qubits `0..qubits_per_mode`), simplified.
pub fn mode_operator_to_pauli(a: &DMatrix<Complex64>, scheme: &EncodingScheme) -> Result<PauliSum> {
    let d = scheme.levels;
    if a.nrows() != d || a.ncols() != d {
        return Err(VibError::DimensionMismatch { expected: d, got: a.nrows() });
    }
    let width = scheme.qubits_per_mode();
    let mut raw = Vec::new();
    for s in 0..d {
        for t in 0..d {
            let v = a[(s, t)];
            if v == ZERO {
                continue;
            }
            match scheme.kind {
                SchemeKind::Compact => expand_projector(s as u64, t as u64, width, v, &mut raw),
                SchemeKind::Direct => {
                    if s == t {
                        // |1><1| on qubit s only
                        raw.push((v * 0.5, 0, 0));
                        raw.push((-v * 0.5, 0, 1 << s));
                    } else {
                        // |1><0| on qubit s, |0><1| on qubit t
                        let mut pair = Vec::new();
                        expand_projector(1, 0, 1, v, &mut pair);
                        for (c, x, z) in pair {
                            let (cx, xx, zz) = (c, x << s, z << s);
                            for (w, bx, bz) in projector_factors(false, true) {
                                raw.push((cx * w, xx | ((bx as u64) << t), zz | ((bz as u64) << t)));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut sum = PauliSum::new(width);
    for (c, x, z) in raw {
        sum.push(PauliTerm::new(c, PauliString::from_masks(width, x, z)?))?;
    }
    Ok(sum.simplify(0.0))
}

/// Qubit operator for `p` under `scheme`, simplified with the default threshold.
///
/// On the encoded subspace the result agrees with the truncated-matrix
/// realisation of `p`. For compact registers with unused bit patterns
/// (d not a power of two) the operator vanishes on those patterns.
pub fn encode_operator(p: &BosonPolynomial, scheme: &EncodingScheme) -> Result<PauliSum> {
    let n = scheme.n_qubits();
    let pad_identity = scheme.kind == SchemeKind::Compact && !scheme.levels.is_power_of_two();
    let mut cache: HashMap<Vec<LadderKind>, PauliSum> = HashMap::new();
    let mut acc: HashMap<PauliString, Complex64> = HashMap::new();

    for t in &p.terms {
        let per_mode = split_by_mode(&t.ops, scheme.modes)?;
        let mut partial: Vec<(Complex64, u64, u64)> = vec![(t.coefficient, 0, 0)];
        for (mode, kinds) in per_mode.iter().enumerate() {
            if kinds.is_empty() && !pad_identity {
                continue;
            }
            if !cache.contains_key(kinds) {
                let local = mode_operator_to_pauli(&mode_matrix(kinds, scheme.levels)?, scheme)?;
                cache.insert(kinds.clone(), local);
            }
            let local = &cache[kinds];
            let shift = scheme.register_offset(mode);
            let mut next = Vec::with_capacity(partial.len() * local.len());
            for &(c, x, z) in &partial {
                for lt in local.terms() {
                    next.push((
                        c * lt.coefficient,
                        x | (lt.string.x_mask() << shift),
                        z | (lt.string.z_mask() << shift),
                    ));
                }
            }
            partial = next;
        }
        for (c, x, z) in partial {
            *acc.entry(PauliString::from_masks(n, x, z)?).or_insert(ZERO) += c;
        }
    }

    let mut sum = PauliSum::new(n);
    for (s, c) in acc {
        sum.push(PauliTerm::new(c, s))?;
    }
    Ok(sum.simplified())
}

/// Qubit operator for `coef * (x)_m A_m`, where `factors` lists `(mode, A_m)`
/// with each `A_m` a `d x d` matrix and unlisted modes carry the identity.
pub fn encode_mode_product(
    coef: Complex64,
    factors: &[(usize, DMatrix<Complex64>)],
    scheme: &EncodingScheme,
) -> Result<PauliSum> {
    let n = scheme.n_qubits();
    let pad_identity = scheme.kind == SchemeKind::Compact && !scheme.levels.is_power_of_two();
    let mut per_mode: Vec<Option<&DMatrix<Complex64>>> = vec![None; scheme.modes];
    for (mode, m) in factors {
        if *mode >= scheme.modes {
            return Err(VibError::ModeOutOfRange { mode: *mode, modes: scheme.modes });
        }
        per_mode[*mode] = Some(m);
    }
    let identity = ladder_matrix(LadderKind::Identity, scheme.levels)?;
    let mut partial: Vec<(Complex64, u64, u64)> = vec![(coef, 0, 0)];
    for (mode, factor) in per_mode.into_iter().enumerate() {
        let matrix = match factor {
            Some(m) => m,
            None if pad_identity => &identity,
            None => continue,
        };
        let local = mode_operator_to_pauli(matrix, scheme)?;
        let shift = scheme.register_offset(mode);
        let mut next = Vec::with_capacity(partial.len() * local.len());
        for &(c, x, z) in &partial {
            for lt in local.terms() {
                next.push((c * lt.coefficient, x | (lt.string.x_mask() << shift), z | (lt.string.z_mask() << shift)));
            }
        }
        partial = next;
    }
    let mut sum = PauliSum::new(n);
    for (c, x, z) in partial {
        sum.push(PauliTerm::new(c, PauliString::from_masks(n, x, z)?))?;
    }
    Ok(sum.simplified())
}

/// `|t><s|` as a `d x d` matrix.
pub fn transition_matrix(t: usize, s: usize, d: usize) -> Result<DMatrix<Complex64>> {
    if t >= d || s >= d {
        return Err(VibError::OccupationOutOfRange { mode: 0, level: t.max(s), levels: d });
    }
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    m[(t, s)] = ONE;
    Ok(m)
}

/// Single-mode polynomial holding one ladder operator with unit weight.
pub fn single_op(kind: LadderKind, mode: usize) -> BosonPolynomial {
    let mut p = BosonPolynomial::new();
    p.push(ONE, vec![LadderOp { kind, mode }]);
    p
}
