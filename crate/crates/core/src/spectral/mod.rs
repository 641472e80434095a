//! Finite joint spectral calculus.
//!
//! A [`SpectralSystem`] is a truncated orthonormal eigenbasis together with a
//! vector of eigenvalue maps, one per commuting operator. Multipliers act
//! diagonally on [`CoefficientVector`]s; `decompose`/`reconstruct` move between
//! grid samples and coefficients through the quadrature inner product.

mod grid;
pub mod multiplier;

pub use grid::{Grid, GridFunction};
pub use multiplier::MultiplierSpec;

use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use grid::same_grid;

/// Orthonormality tolerance of shipped systems.
pub const TAU_ORTH: f64 = 1e-10;

/// Default cap on the number of basis elements of a tensor product.
pub const DEFAULT_TENSOR_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|k| = k_1 + … + k_d`.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// All multi-indices of length `d` with `|k| ≤ max_order`, graded then lexicographic.
    pub fn all_up_to(d: usize, max_order: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for total in 0..=max_order {
            let mut cur = vec![0; d];
            compositions(d, total, 0, &mut cur, &mut out);
        }
        out
    }
}

fn compositions(d: usize, left: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    if pos == d - 1 {
        cur[pos] = left;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for v in (0..=left).rev() {
        cur[pos] = v;
        compositions(d, left - v, pos + 1, cur, out);
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Expansion coefficients indexed by basis multi-index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoefficientVector {
    entries: BTreeMap<MultiIndex, Complex64>,
}

impl CoefficientVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(k: MultiIndex) -> Self {
        let mut c = Self::new();
        c.set(k, Complex64::new(1.0, 0.0));
        c
    }

    pub fn set(&mut self, k: MultiIndex, v: Complex64) {
        self.entries.insert(k, v);
    }

    pub fn get(&self, k: &MultiIndex) -> Complex64 {
        self.entries.get(k).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// ℓ² norm.
    pub fn norm(&self) -> f64 {
        self.entries.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest coefficient distance to `other` over the union of supports.
    pub fn max_abs_diff(&self, other: &CoefficientVector) -> f64 {
        self.entries
            .keys()
            .chain(other.entries.keys())
            .map(|k| (self.get(k) - other.get(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &CoefficientVector) -> CoefficientVector {
        let mut out = self.clone();
        for (k, v) in &other.entries {
            *out.entries.entry(k.clone()).or_default() += v;
        }
        out
    }
}

impl FromIterator<(MultiIndex, Complex64)> for CoefficientVector {
    fn from_iter<I: IntoIterator<Item = (MultiIndex, Complex64)>>(iter: I) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}

pub type BasisFn = Arc<dyn Fn(&MultiIndex, &[f64]) -> f64 + Send + Sync>;

/// One atom of the discrete joint spectral measure `E_{f,f}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAtom {
    pub lambda: Vec<f64>,
    pub mass: f64,
}

/// Truncated orthonormal joint eigen-system.
#[derive(Clone)]
pub struct SpectralSystem {
    name: String,
    operators: usize,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
    eigenvalues: Vec<Vec<f64>>,
    basis: BasisFn,
    grid: Arc<Grid>,
    // basis values on the grid, row-major [index][point]
    table: Vec<f64>,
}

impl fmt::Debug for SpectralSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralSystem")
            .field("name", &self.name)
            .field("operators", &self.operators)
            .field("indices", &self.indices.len())
            .field("grid_points", &self.grid.len())
            .finish()
    }
}

impl SpectralSystem {
    /// Builds a system; `eigen` returns the eigenvalue vector (length `operators`)
    /// of a basis index.
    pub fn new<E>(
        name: impl Into<String>,
        operators: usize,
        indices: Vec<MultiIndex>,
        eigen: E,
        basis: BasisFn,
        grid: Arc<Grid>,
    ) -> Result<Self>
    where
        E: Fn(&MultiIndex) -> Vec<f64>,
    {
        let eigenvalues: Vec<Vec<f64>> = indices.iter().map(&eigen).collect();
        Self::from_parts(name.into(), operators, indices, eigenvalues, basis, grid)
    }

    fn from_parts(
        name: String,
        operators: usize,
        indices: Vec<MultiIndex>,
        eigenvalues: Vec<Vec<f64>>,
        basis: BasisFn,
        grid: Arc<Grid>,
    ) -> Result<Self> {
        if operators == 0 {
            return Err(crate::error::param("operators", "need at least one operator"));
        }
        for (k, ev) in indices.iter().zip(&eigenvalues) {
            if ev.len() != operators {
                return Err(Error::Shape {
                    expected: operators,
                    got: ev.len(),
                });
            }
            if ev.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::Domain(format!(
                    "eigenvalue vector {ev:?} of index {k} is not finite and non-negative"
                )));
            }
        }
        let mut position = HashMap::with_capacity(indices.len());
        for (i, k) in indices.iter().enumerate() {
            if position.insert(k.clone(), i).is_some() {
                return Err(Error::Domain(format!("duplicate basis index {k}")));
            }
        }
        let n = grid.len();
        let mut table = Vec::with_capacity(indices.len() * n);
        for k in &indices {
            table.extend(grid.points().map(|x| basis(k, x)));
        }
        Ok(Self {
            name,
            operators,
            indices,
            position,
            eigenvalues,
            basis,
            grid,
            table,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of eigenvalue maps (the arity of multipliers on this system).
    pub fn dimension(&self) -> usize {
        self.operators
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        self.position.get(k).copied()
    }

    pub fn eigenvalues(&self, k: &MultiIndex) -> Option<&[f64]> {
        self.position(k).map(|i| self.eigenvalues[i].as_slice())
    }

    pub fn eigenvalues_at(&self, i: usize) -> &[f64] {
        &self.eigenvalues[i]
    }

    /// Basis element `k` evaluated at an arbitrary point.
    pub fn basis_value(&self, k: &MultiIndex, x: &[f64]) -> f64 {
        (self.basis)(k, x)
    }

    pub fn basis_fn(&self) -> &BasisFn {
        &self.basis
    }

    /// Basis element number `i` tabulated on the grid.
    pub fn basis_on_grid(&self, i: usize) -> &[f64] {
        let n = self.grid.len();
        &self.table[i * n..(i + 1) * n]
    }

    /// True when no basis index has an all-zero eigenvalue vector.
    pub fn is_atl(&self) -> bool {
        self.eigenvalues
            .iter()
            .all(|ev| ev.iter().any(|&v| v != 0.0))
    }

    /// Restriction to the indices accepted by `keep`.
    pub fn restrict<P: Fn(&MultiIndex, &[f64]) -> bool>(&self, keep: P) -> Result<Self> {
        let (indices, eigenvalues): (Vec<_>, Vec<_>) = self
            .indices
            .iter()
            .zip(&self.eigenvalues)
            .filter(|(k, ev)| keep(k, ev))
            .map(|(k, ev)| (k.clone(), ev.clone()))
            .unzip();
        Self::from_parts(
            format!("{}|restricted", self.name),
            self.operators,
            indices,
            eigenvalues,
            self.basis.clone(),
            self.grid.clone(),
        )
    }

    /// Largest entry of `|G − I|` where `G` is the quadrature Gram matrix.
    pub fn orthonormality_defect(&self) -> f64 {
        let w = self.grid.weights();
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            let bi = self.basis_on_grid(i);
            for j in i..self.len() {
                let bj = self.basis_on_grid(j);
                let g: f64 = bi.iter().zip(bj).zip(w).map(|((a, b), w)| a * b * w).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    pub fn dense(&self, c: &CoefficientVector) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        for (k, v) in c.iter() {
            let i = self
                .position(k)
                .ok_or_else(|| Error::UnknownIndex(k.0.clone()))?;
            out[i] = *v;
        }
        Ok(out)
    }

    pub fn sparse(&self, dense: &[Complex64]) -> CoefficientVector {
        self.indices
            .iter()
            .cloned()
            .zip(dense.iter().copied())
            .collect()
    }
}

/// `c_k = Σ_i w_i f(x_i) basis_k(x_i)`.
pub fn decompose(f: &GridFunction, sys: &SpectralSystem) -> Result<CoefficientVector> {
    if !same_grid(f.grid(), sys.grid()) {
        return Err(Error::GridMismatch);
    }
    let w = sys.grid().weights();
    let coeffs = (0..sys.len())
        .map(|i| {
            let b = sys.basis_on_grid(i);
            let v: Complex64 = f
                .values()
                .iter()
                .zip(b)
                .zip(w)
                .map(|((fv, bv), wv)| fv * (bv * wv))
                .sum();
            (sys.indices()[i].clone(), v)
        })
        .collect();
    Ok(coeffs)
}

/// `Σ_k c_k basis_k` on the system grid.
pub fn reconstruct(c: &CoefficientVector, sys: &SpectralSystem) -> Result<GridFunction> {
    let mut values = vec![Complex64::new(0.0, 0.0); sys.grid().len()];
    for (k, v) in c.iter() {
        let i = sys
            .position(k)
            .ok_or_else(|| Error::UnknownIndex(k.0.clone()))?;
        if *v == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (out, b) in values.iter_mut().zip(sys.basis_on_grid(i)) {
            *out += v * b;
        }
    }
    GridFunction::new(sys.grid().clone(), values)
}

/// `m(L) c`: multiplies each coefficient by `m` at its eigenvalue vector.
pub fn apply_multiplier(
    m: &MultiplierSpec,
    sys: &SpectralSystem,
    c: &CoefficientVector,
) -> Result<CoefficientVector> {
    if m.arity() != sys.dimension() {
        return Err(Error::Arity {
            multiplier: m.arity(),
            system: sys.dimension(),
        });
    }
    if !m.is_regular_at_origin() && !sys.is_atl() {
        return Err(Error::Atl(format!(
            "multiplier `{}` is undefined at the origin and system `{}` has a zero eigenvalue vector",
            m.name(),
            sys.name()
        )));
    }
    c.iter()
        .map(|(k, v)| {
            let lambda = sys
                .eigenvalues(k)
                .ok_or_else(|| Error::UnknownIndex(k.0.clone()))?;
            let mv = m.evaluate(lambda);
            if !(mv.re.is_finite() && mv.im.is_finite()) {
                return Err(Error::NonFinite {
                    lambda: lambda.to_vec(),
                });
            }
            Ok((k.clone(), mv * v))
        })
        .collect()
}

/// Discrete spectral measure of `f`: atoms at distinct eigenvalue vectors with
/// mass `Σ |c_k|²`, ordered by eigenvalue vector.
pub fn spectral_measure(c: &CoefficientVector, sys: &SpectralSystem) -> Result<Vec<SpectralAtom>> {
    let mut acc: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    for (k, v) in c.iter() {
        let lambda = sys
            .eigenvalues(k)
            .ok_or_else(|| Error::UnknownIndex(k.0.clone()))?;
        // eigenvalues are non-negative, so bit patterns order like the values
        let key = lambda.iter().map(|x| (x + 0.0).to_bits()).collect();
        *acc.entry(key).or_default() += v.norm_sqr();
    }
    Ok(acc
        .into_iter()
        .map(|(key, mass)| SpectralAtom {
            lambda: key.into_iter().map(f64::from_bits).collect(),
            mass,
        })
        .collect())
}

/// Tensor product with the default capacity cap.
pub fn tensor(a: &SpectralSystem, b: &SpectralSystem) -> Result<SpectralSystem> {
    tensor_with_cap(a, b, DEFAULT_TENSOR_CAP)
}

/// Tensor product: Cartesian index set, concatenated eigenvalue maps, product
/// basis on the product grid.
pub fn tensor_with_cap(a: &SpectralSystem, b: &SpectralSystem, cap: usize) -> Result<SpectralSystem> {
    let size = a.len() * b.len();
    if size > cap {
        return Err(Error::Capacity { size, cap });
    }
    let split = a.indices.first().map_or(0, |k| k.len());
    let xsplit = a.grid.dim();
    let (ba, bb) = (a.basis.clone(), b.basis.clone());
    let basis: BasisFn = Arc::new(move |k: &MultiIndex, x: &[f64]| {
        let ka = MultiIndex(k.0[..split].to_vec());
        let kb = MultiIndex(k.0[split..].to_vec());
        ba(&ka, &x[..xsplit]) * bb(&kb, &x[xsplit..])
    });
    let grid = Arc::new(a.grid.product(&b.grid));
    let mut indices = Vec::with_capacity(size);
    let mut eigenvalues = Vec::with_capacity(size);
    for (ka, ea) in a.indices.iter().zip(&a.eigenvalues) {
        for (kb, eb) in b.indices.iter().zip(&b.eigenvalues) {
            let mut k = ka.0.clone();
            k.extend_from_slice(&kb.0);
            indices.push(MultiIndex(k));
            let mut e = ea.clone();
            e.extend_from_slice(eb);
            eigenvalues.push(e);
        }
    }
    // product table straight from the factors
    let (na, nb) = (a.grid.len(), b.grid.len());
    let mut table = Vec::with_capacity(size * na * nb);
    for ia in 0..a.len() {
        let ta = a.basis_on_grid(ia);
        for ib in 0..b.len() {
            let tb = b.basis_on_grid(ib);
            for &va in ta {
                table.extend(tb.iter().map(|&vb| va * vb));
            }
        }
    }
    let position = indices
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();
    Ok(SpectralSystem {
        name: format!("{}⊗{}", a.name, b.name),
        operators: a.operators + b.operators,
        indices,
        position,
        eigenvalues,
        basis,
        grid,
        table,
    })
}
