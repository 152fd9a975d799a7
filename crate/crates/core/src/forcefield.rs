//! Quartic force fields in normal coordinates and linear changes of coordinates.
//!
//! The potential is
//!
//! ```text
//! V(q) = sum_i k_ii q_i^2 + sum_{i<=j<=k} k_ijk q_i q_j q_k
//!      + sum_{i<=j<=k<=l} k_ijkl q_i q_j q_k q_l
//! ```
//!
//! with no factorial prefactors, so `omega_i = sqrt(2 k_ii)`. Files use 1-based
//! mode numbers; everything in memory is 0-based.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, VibError};
use crate::linalg::check_orthogonal;

pub const H2O_JSON: &str = include_str!("../data/h2o.json");
pub const SO2_JSON: &str = include_str!("../data/so2.json");

/// Sparse real polynomial in `modes` variables, keyed by sorted index tuples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    modes: usize,
    coefficients: BTreeMap<Vec<usize>, f64>,
}

impl Polynomial {
    pub fn new(modes: usize) -> Self {
        Polynomial { modes, coefficients: BTreeMap::new() }
    }

    pub fn constant(modes: usize, c: f64) -> Self {
        let mut p = Self::new(modes);
        p.add_term(&[], c).expect("no indices");
        p
    }

    /// The coordinate `q_i` itself.
    pub fn variable(modes: usize, i: usize) -> Result<Self> {
        let mut p = Self::new(modes);
        p.add_term(&[i], 1.0)?;
        Ok(p)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Adds `c * prod q_idx`; the index list may be in any order.
    pub fn add_term(&mut self, indices: &[usize], c: f64) -> Result<()> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.modes) {
            return Err(VibError::ModeOutOfRange { mode: bad, modes: self.modes });
        }
        let mut key = indices.to_vec();
        key.sort_unstable();
        *self.coefficients.entry(key).or_insert(0.0) += c;
        Ok(())
    }

    pub fn coefficient(&self, indices: &[usize]) -> f64 {
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.coefficients.get(&key).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.coefficients.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coefficients.iter().filter(|(_, &c)| c != 0.0).map(|(k, _)| k.len()).max().unwrap_or(0)
    }

    pub fn evaluate(&self, q: &[f64]) -> f64 {
        self.coefficients.iter().map(|(k, &c)| c * k.iter().map(|&i| q[i]).product::<f64>()).sum()
    }

    pub fn add(&self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (k, &c) in &rhs.coefficients {
            *out.coefficients.entry(k.clone()).or_insert(0.0) += c;
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Polynomial {
        Polynomial {
            modes: self.modes,
            coefficients: self.coefficients.iter().map(|(k, &c)| (k.clone(), c * factor)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::new(self.modes.max(rhs.modes));
        for (ka, &ca) in &self.coefficients {
            for (kb, &cb) in &rhs.coefficients {
                let mut key = ka.clone();
                key.extend_from_slice(kb);
                key.sort_unstable();
                *out.coefficients.entry(key).or_insert(0.0) += ca * cb;
            }
        }
        out
    }

    /// Drops coefficients with magnitude at or below `threshold`.
    pub fn pruned(&self, threshold: f64) -> Polynomial {
        Polynomial {
            modes: self.modes,
            coefficients: self
                .coefficients
                .iter()
                .filter(|(_, &c)| c.abs() > threshold)
                .map(|(k, &c)| (k.clone(), c))
                .collect(),
        }
    }

    /// Largest coefficient difference over the union of monomials.
    pub fn max_difference(&self, other: &Polynomial) -> f64 {
        let mut worst = 0.0f64;
        for (k, &c) in &self.coefficients {
            worst = worst.max((c - other.coefficient(k)).abs());
        }
        for (k, &c) in &other.coefficients {
            worst = worst.max((c - self.coefficient(k)).abs());
        }
        worst
    }
}

/// Affine change of variables `q = A q' + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCoordinateMap {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl LinearCoordinateMap {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(VibError::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
        }
        if b.len() != a.nrows() {
            return Err(VibError::DimensionMismatch { expected: a.nrows(), got: b.len() });
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(VibError::Config("coordinate map has non-finite entries".into()));
        }
        Ok(LinearCoordinateMap { a, b })
    }

    pub fn identity(modes: usize) -> Self {
        LinearCoordinateMap { a: DMatrix::identity(modes, modes), b: DVector::zeros(modes) }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `q' = A^{-1} q - A^{-1} b`.
    pub fn inverse(&self) -> Result<Self> {
        let inv =
            self.a.clone().try_inverse().ok_or_else(|| VibError::Numerical("coordinate map is singular".into()))?;
        let b = -(&inv * &self.b);
        Ok(LinearCoordinateMap { a: inv, b })
    }
}

/// Substitutes `q = A q' + b` into `poly` and collects monomials in `q'`.
pub fn transform_polynomial(poly: &Polynomial, map: &LinearCoordinateMap) -> Result<Polynomial> {
    let m = poly.modes();
    if map.dim() != m {
        return Err(VibError::DimensionMismatch { expected: m, got: map.dim() });
    }
    let forms: Vec<Polynomial> = (0..m)
        .map(|i| {
            let mut f = Polynomial::constant(m, map.b[i]);
            for j in 0..m {
                if map.a[(i, j)] != 0.0 {
                    f.add_term(&[j], map.a[(i, j)]).expect("index in range");
                }
            }
            f
        })
        .collect();
    let mut out = Polynomial::new(m);
    for (indices, c) in poly.terms() {
        let mut term = Polynomial::constant(m, c);
        for &i in indices {
            term = term.mul(&forms[i]);
        }
        out = out.add(&term);
    }
    Ok(out.pruned(0.0))
}

/// Weight matrices for substituting localized coordinates into a normal-mode
/// Hamiltonian: `p_i = sum_j wp_ij p^L_j`, `q_i = sum_j wq_ij q^L_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationWeights {
    pub wp: DMatrix<f64>,
    pub wq: DMatrix<f64>,
}

pub fn localization_map(u: &DMatrix<f64>, omega: &[f64]) -> Result<LocalizationWeights> {
    check_orthogonal(u, 1e-10)?;
    if omega.len() != u.nrows() {
        return Err(VibError::DimensionMismatch { expected: u.nrows(), got: omega.len() });
    }
    if let Some((mode, &value)) = omega.iter().enumerate().find(|(_, &w)| !(w > 0.0)) {
        return Err(VibError::Config(format!("frequency of mode {mode} must be positive, got {value}")));
    }
    let m = omega.len();
    let wp = DMatrix::from_fn(m, m, |i, j| (omega[i] / omega[j]).sqrt() * u[(i, j)]);
    let wq = DMatrix::from_fn(m, m, |i, j| (omega[j] / omega[i]).sqrt() * u[(i, j)]);
    Ok(LocalizationWeights { wp, wq })
}

/// Quartic force field with diagonal harmonic part.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceField {
    pub label: String,
    k2: Vec<f64>,
    k3: BTreeMap<[usize; 3], f64>,
    k4: BTreeMap<[usize; 4], f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ForceFieldFile {
    label: String,
    modes: usize,
    #[serde(default)]
    k2: Vec<Vec<f64>>,
    #[serde(default)]
    k3: Vec<Vec<f64>>,
    #[serde(default)]
    k4: Vec<Vec<f64>>,
    #[serde(default = "atomic")]
    units: String,
}

fn atomic() -> String {
    "atomic".to_string()
}

fn parse_entry<const N: usize>(row: &[f64], modes: usize, table: &str) -> Result<([usize; N], f64)> {
    if row.len() != N + 1 {
        return Err(VibError::Parse(format!("{table} entry {row:?} must have {N} indices and a value")));
    }
    let mut idx = [0usize; N];
    for (slot, &raw) in idx.iter_mut().zip(row) {
        if raw.fract() != 0.0 || raw < 1.0 || raw > modes as f64 {
            return Err(VibError::Parse(format!("{table} index {raw} out of range 1..={modes} in entry {row:?}")));
        }
        *slot = raw as usize - 1;
    }
    idx.sort_unstable();
    let value = row[N];
    if !value.is_finite() {
        return Err(VibError::Parse(format!("{table} entry {row:?} has a non-finite value")));
    }
    Ok((idx, value))
}

impl ForceField {
    /// Builds and validates a force field; `k2[i]` is the coefficient of `q_i^2`.
    pub fn new(
        label: impl Into<String>,
        k2: Vec<f64>,
        k3: BTreeMap<[usize; 3], f64>,
        k4: BTreeMap<[usize; 4], f64>,
    ) -> Result<Self> {
        let modes = k2.len();
        if modes == 0 {
            return Err(VibError::NoModes(0));
        }
        for (mode, &value) in k2.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(VibError::NonPositiveHarmonic { mode: mode + 1, value });
            }
        }
        let canon3 = k3
            .into_iter()
            .map(|(mut k, v)| {
                k.sort_unstable();
                (k, v)
            })
            .collect::<Vec<_>>();
        let canon4 = k4
            .into_iter()
            .map(|(mut k, v)| {
                k.sort_unstable();
                (k, v)
            })
            .collect::<Vec<_>>();
        for (k, v) in &canon3 {
            if k.iter().any(|&i| i >= modes) {
                return Err(VibError::ModeOutOfRange { mode: k[2], modes });
            }
            if !v.is_finite() {
                return Err(VibError::Config(format!("non-finite cubic coefficient at {k:?}")));
            }
        }
        for (k, v) in &canon4 {
            if k.iter().any(|&i| i >= modes) {
                return Err(VibError::ModeOutOfRange { mode: k[3], modes });
            }
            if !v.is_finite() {
                return Err(VibError::Config(format!("non-finite quartic coefficient at {k:?}")));
            }
        }
        let mut k3 = BTreeMap::new();
        for (k, v) in canon3 {
            *k3.entry(k).or_insert(0.0) += v;
        }
        let mut k4 = BTreeMap::new();
        for (k, v) in canon4 {
            *k4.entry(k).or_insert(0.0) += v;
        }
        Ok(ForceField { label: label.into(), k2, k3, k4 })
    }

    pub fn harmonic(label: impl Into<String>, k2: Vec<f64>) -> Result<Self> {
        Self::new(label, k2, BTreeMap::new(), BTreeMap::new())
    }

    /// Harmonic force field with the given frequencies (`k_ii = omega_i^2 / 2`).
    pub fn from_frequencies(label: impl Into<String>, omega: &[f64]) -> Result<Self> {
        Self::harmonic(label, omega.iter().map(|w| 0.5 * w * w).collect())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ForceFieldFile = serde_json::from_str(text)?;
        if file.units != "atomic" {
            return Err(VibError::Parse(format!("unsupported units {:?}; only \"atomic\" is accepted", file.units)));
        }
        let modes = file.modes;
        if modes == 0 {
            return Err(VibError::NoModes(0));
        }
        let mut k2 = vec![None; modes];
        for row in &file.k2 {
            let ([i, j], v) = parse_entry::<2>(row, modes, "k2")?;
            if i != j {
                return Err(VibError::Parse(format!(
                    "k2 entry {row:?} is off-diagonal; normal-coordinate force fields have diagonal k2"
                )));
            }
            if k2[i].replace(v).is_some() {
                return Err(VibError::Parse(format!("duplicate k2 entry for mode {}", i + 1)));
            }
        }
        let k2: Vec<f64> = k2
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or(VibError::NonPositiveHarmonic { mode: i + 1, value: 0.0 }))
            .collect::<Result<_>>()?;
        let mut k3 = BTreeMap::new();
        for row in &file.k3 {
            let (k, v) = parse_entry::<3>(row, modes, "k3")?;
            if k3.insert(k, v).is_some() {
                return Err(VibError::Parse(format!("duplicate k3 entry {row:?}")));
            }
        }
        let mut k4 = BTreeMap::new();
        for row in &file.k4 {
            let (k, v) = parse_entry::<4>(row, modes, "k4")?;
            if k4.insert(k, v).is_some() {
                return Err(VibError::Parse(format!("duplicate k4 entry {row:?}")));
            }
        }
        ForceField::new(file.label, k2, k3, k4)
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let one = |i: usize| (i + 1) as f64;
        let file = ForceFieldFile {
            label: self.label.clone(),
            modes: self.modes(),
            k2: self.k2.iter().enumerate().map(|(i, &v)| vec![one(i), one(i), v]).collect(),
            k3: self.k3.iter().map(|(k, &v)| vec![one(k[0]), one(k[1]), one(k[2]), v]).collect(),
            k4: self.k4.iter().map(|(k, &v)| vec![one(k[0]), one(k[1]), one(k[2]), one(k[3]), v]).collect(),
            units: atomic(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn h2o() -> Self {
        Self::from_json_str(H2O_JSON).expect("bundled H2O force field is valid")
    }

    pub fn so2() -> Self {
        Self::from_json_str(SO2_JSON).expect("bundled SO2 force field is valid")
    }

    pub fn modes(&self) -> usize {
        self.k2.len()
    }

    /// `k_ii` with 0-based `i`.
    pub fn k2(&self, i: usize) -> f64 {
        self.k2[i]
    }

    /// `k_ijk` with 0-based indices in any order; absent entries are zero.
    pub fn k3(&self, i: usize, j: usize, k: usize) -> f64 {
        let mut key = [i, j, k];
        key.sort_unstable();
        self.k3.get(&key).copied().unwrap_or(0.0)
    }

    pub fn k4(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let mut key = [i, j, k, l];
        key.sort_unstable();
        self.k4.get(&key).copied().unwrap_or(0.0)
    }

    pub fn cubic_terms(&self) -> impl Iterator<Item = (&[usize; 3], f64)> {
        self.k3.iter().map(|(k, &v)| (k, v))
    }

    pub fn quartic_terms(&self) -> impl Iterator<Item = (&[usize; 4], f64)> {
        self.k4.iter().map(|(k, &v)| (k, v))
    }

    /// `omega_i = sqrt(2 k_ii)`.
    pub fn frequencies(&self) -> Vec<f64> {
        self.k2.iter().map(|k| (2.0 * k).sqrt()).collect()
    }

    pub fn zero_point_energy(&self) -> f64 {
        0.5 * self.frequencies().iter().sum::<f64>()
    }

    pub fn is_harmonic(&self) -> bool {
        self.k3.values().all(|&v| v == 0.0) && self.k4.values().all(|&v| v == 0.0)
    }

    /// Copy with every cubic and quartic coefficient multiplied by `lambda`.
    pub fn scaled_anharmonic(&self, lambda: f64) -> ForceField {
        ForceField {
            label: self.label.clone(),
            k2: self.k2.clone(),
            k3: self.k3.iter().map(|(k, &v)| (*k, v * lambda)).collect(),
            k4: self.k4.iter().map(|(k, &v)| (*k, v * lambda)).collect(),
        }
    }

    /// Keeps terms up to polynomial degree `order` (2, 3 or 4).
    pub fn truncated(&self, order: usize) -> Result<ForceField> {
        if !(2..=4).contains(&order) {
            return Err(VibError::Config(format!("expansion order must be 2, 3 or 4, got {order}")));
        }
        Ok(ForceField {
            label: self.label.clone(),
            k2: self.k2.clone(),
            k3: if order >= 3 { self.k3.clone() } else { BTreeMap::new() },
            k4: if order >= 4 { self.k4.clone() } else { BTreeMap::new() },
        })
    }

    /// The potential as a [`Polynomial`].
    pub fn potential(&self) -> Polynomial {
        let mut p = Polynomial::new(self.modes());
        for (i, &k) in self.k2.iter().enumerate() {
            p.add_term(&[i, i], k).expect("index in range");
        }
        for (k, &v) in &self.k3 {
            p.add_term(k, v).expect("index in range");
        }
        for (k, &v) in &self.k4 {
            p.add_term(k, v).expect("index in range");
        }
        p
    }
}
