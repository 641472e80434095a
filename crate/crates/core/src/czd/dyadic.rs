use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

use crate::error::{param, Error, Result};
use crate::spectral::{Grid, GridFunction};

/// The space carrying the dyadic structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DyadicBase {
    /// `[0, 1)`.
    Interval,
    /// `ℝ/ℤ`, coordinates reduced into `[0, 1)`.
    Torus,
    /// `[−w, w)^m`, cubes anchored at the corner `(−w, …, −w)`.
    Window { dim: usize, half_width: f64 },
}

impl DyadicBase {
    fn dim(&self) -> usize {
        match self {
            Self::Interval | Self::Torus => 1,
            Self::Window { dim, .. } => *dim,
        }
    }

    fn lower(&self) -> f64 {
        match self {
            Self::Window { half_width, .. } => -half_width,
            _ => 0.0,
        }
    }

    fn side(&self) -> f64 {
        match self {
            Self::Window { half_width, .. } => 2.0 * half_width,
            _ => 1.0,
        }
    }

    fn reduce(&self, x: f64) -> f64 {
        match self {
            Self::Torus => x - x.floor(),
            _ => x,
        }
    }
}

/// A cube `Q ∈ 𝒬_l` together with its measure.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicCube {
    pub level: usize,
    /// Position along each axis, `0 ≤ index[i] < 2^level`.
    pub index: Vec<usize>,
    pub lower: Vec<f64>,
    pub side: f64,
    pub measure: f64,
}

impl DyadicCube {
    pub fn contains(&self, y: &[f64]) -> bool {
        y.iter().zip(&self.lower).all(|(v, lo)| *v >= *lo && *v < lo + self.side)
    }
}

struct Level {
    cubes: Vec<DyadicCube>,
    // cube of each Y grid point
    owner: Vec<usize>,
    members: Vec<Vec<usize>>,
}

/// Dyadic cubes of generations `0..=l_max` on a grid of `Y`, optionally
/// fibered over a grid of `X`.
///
/// Functions live on `x × y` (X varying slowest), or on `y` alone.
pub struct DyadicSystem {
    base: DyadicBase,
    y: Arc<Grid>,
    x: Option<Arc<Grid>>,
    grid: Arc<Grid>,
    levels: Vec<Level>,
    doubling: f64,
}

impl std::fmt::Debug for DyadicSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DyadicSystem")
            .field("base", &self.base)
            .field("points", &self.y.len())
            .field("fibers", &self.fibers())
            .field("l_max", &self.l_max())
            .finish()
    }
}

impl DyadicSystem {
    /// Builds every generation whose cubes each hold at least `min_points`
    /// grid points. With `min_points = 1` on a grid of `2^L` cells per axis
    /// the finest cubes are single cells, so `E_{l_max} f = f`.
    pub fn new(base: DyadicBase, y: Arc<Grid>, min_points: usize) -> Result<Self> {
        if y.dim() != base.dim() {
            return Err(param("y", format!("grid dimension {} does not match the base dimension {}", y.dim(), base.dim())));
        }
        if let DyadicBase::Window { half_width, .. } = base {
            if !(half_width > 0.0 && half_width.is_finite()) {
                return Err(param("half_width", "must be positive"));
            }
        }
        let min_points = min_points.max(1);
        let (lo, side) = (base.lower(), base.side());
        for p in y.points() {
            if p.iter().any(|&v| {
                let v = base.reduce(v);
                !(v >= lo && v < lo + side)
            }) {
                return Err(Error::Domain(format!("grid point {p:?} outside the base space")));
            }
        }
        let mut levels = Vec::new();
        for l in 0.. {
            let level = build_level(base, &y, l);
            if level.members.iter().any(|m| m.len() < min_points) {
                break;
            }
            levels.push(level);
            if l >= 30 {
                break;
            }
        }
        if levels.is_empty() {
            return Err(param("min_points", format!("the grid has fewer than {min_points} points")));
        }
        let mut doubling: f64 = 1.0;
        for w in levels.windows(2) {
            let (parent, child) = (&w[0], &w[1]);
            for (c, cube) in child.cubes.iter().enumerate() {
                let p = parent.owner[child.members[c][0]];
                doubling = doubling.max(parent.cubes[p].measure / cube.measure);
            }
        }
        Ok(Self { base, grid: y.clone(), y, x: None, levels, doubling })
    }

    /// `n` equal cells per axis with the point at each cell's center and
    /// weight equal to its volume.
    pub fn uniform(base: DyadicBase, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(param("n", "need at least one cell"));
        }
        let m = base.dim();
        let (lo, side) = (base.lower(), base.side());
        let h = side / n as f64;
        let axis: Vec<f64> = (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect();
        let axis_grid = Grid::from_rule(&axis, &vec![h; n])?;
        let mut grid = axis_grid.clone();
        for _ in 1..m {
            grid = grid.product(&axis_grid);
        }
        Self::new(base, Arc::new(grid), 1)
    }

    /// Fibers the system over `x`; functions then live on `x × y`.
    pub fn fibered(mut self, x: Arc<Grid>) -> Self {
        self.grid = Arc::new(x.product(&self.y));
        self.x = Some(x);
        self
    }

    pub fn base(&self) -> DyadicBase {
        self.base
    }

    /// The grid functions are sampled on.
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn y_grid(&self) -> &Arc<Grid> {
        &self.y
    }

    pub fn x_grid(&self) -> Option<&Arc<Grid>> {
        self.x.as_ref()
    }

    pub fn fibers(&self) -> usize {
        self.x.as_ref().map_or(1, |x| x.len())
    }

    /// Weight of fiber `i` (1 when unfibered).
    pub fn fiber_weight(&self, i: usize) -> f64 {
        self.x.as_ref().map_or(1.0, |x| x.weights()[i])
    }

    pub fn l_max(&self) -> usize {
        self.levels.len() - 1
    }

    /// `max μ(parent)/μ(child)` over all generations.
    pub fn doubling_constant(&self) -> f64 {
        self.doubling
    }

    pub fn cubes(&self, l: usize) -> Result<&[DyadicCube]> {
        Ok(&self.level(l)?.cubes)
    }

    /// Y-grid points of cube `c` of generation `l`.
    pub fn members(&self, l: usize, c: usize) -> Result<&[usize]> {
        Ok(&self.level(l)?.members[c])
    }

    /// Cube of generation `l` holding Y-grid point `i`.
    pub fn cube_of(&self, l: usize, i: usize) -> Result<usize> {
        Ok(self.level(l)?.owner[i])
    }

    fn level(&self, l: usize) -> Result<&Level> {
        self.levels.get(l).ok_or(Error::Level { level: l, min: 0, max: self.l_max() })
    }

    pub(crate) fn check(&self, f: &GridFunction) -> Result<()> {
        if f.grid().as_ref() != self.grid.as_ref() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Per-fiber averages of `v` over the cubes of generation `l`.
    pub(crate) fn cube_averages<T>(&self, v: &[T], l: usize) -> Vec<Vec<T>>
    where
        T: Copy + Send + Sync + std::iter::Sum + std::ops::Mul<f64, Output = T>,
    {
        let level = &self.levels[l];
        let n2 = self.y.len();
        let w = self.y.weights();
        (0..self.fibers())
            .into_par_iter()
            .map(|i| {
                let row = &v[i * n2..(i + 1) * n2];
                level
                    .cubes
                    .iter()
                    .zip(&level.members)
                    .map(|(cube, mem)| mem.iter().map(|&j| row[j] * w[j]).sum::<T>() * (1.0 / cube.measure))
                    .collect()
            })
            .collect()
    }
}

fn build_level(base: DyadicBase, y: &Grid, l: usize) -> Level {
    let m = base.dim();
    let per_axis = 1usize << l;
    let side = base.side() / per_axis as f64;
    let lo = base.lower();
    let count = per_axis.pow(m as u32);
    let mut members = vec![Vec::new(); count];
    let mut owner = Vec::with_capacity(y.len());
    for (i, p) in y.points().enumerate() {
        let mut id = 0;
        for &v in p {
            let k = (((base.reduce(v) - lo) / side).floor() as isize).clamp(0, per_axis as isize - 1) as usize;
            id = id * per_axis + k;
        }
        members[id].push(i);
        owner.push(id);
    }
    let cubes = (0..count)
        .map(|id| {
            let mut index = vec![0; m];
            let mut rest = id;
            for a in (0..m).rev() {
                index[a] = rest % per_axis;
                rest /= per_axis;
            }
            let lower = index.iter().map(|&k| lo + k as f64 * side).collect();
            let measure = members[id].iter().map(|&j| y.weights()[j]).sum();
            DyadicCube { level: l, index, lower, side, measure }
        })
        .collect();
    Level { cubes, owner, members }
}

/// `E_l f`: on each fiber, the μ-average of `f` over the generation-`l` cube.
pub fn dyadic_average(f: &GridFunction, l: usize, sys: &DyadicSystem) -> Result<GridFunction> {
    sys.check(f)?;
    let level = sys.level(l)?;
    let avg = sys.cube_averages(f.values(), l);
    let n2 = sys.y.len();
    let values = (0..f.values().len()).map(|k| avg[k / n2][level.owner[k % n2]]).collect();
    GridFunction::new(sys.grid.clone(), values)
}

fn maximal_of(abs: &[f64], sys: &DyadicSystem) -> Vec<f64> {
    let n2 = sys.y.len();
    let mut out = vec![0.0f64; abs.len()];
    for l in 0..=sys.l_max() {
        let avg = sys.cube_averages(abs, l);
        let owner = &sys.levels[l].owner;
        for (k, o) in out.iter_mut().enumerate() {
            *o = o.max(avg[k / n2][owner[k % n2]]);
        }
    }
    out
}

/// `𝒟f = sup_l E_l|f|` over the generations of the system.
pub fn dyadic_maximal(f: &GridFunction, sys: &DyadicSystem) -> Result<GridFunction> {
    sys.check(f)?;
    let abs: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    GridFunction::from_real(sys.grid.clone(), maximal_of(&abs, sys))
}

/// `(𝒟(|f|^q))^{1/q}`.
pub fn dq_maximal(f: &GridFunction, q: f64, sys: &DyadicSystem) -> Result<GridFunction> {
    sys.check(f)?;
    if !(q >= 1.0 && q.is_finite()) {
        return Err(param("q", format!("need q ≥ 1, got {q}")));
    }
    let pow: Vec<f64> = f.values().iter().map(|v| v.norm().powf(q)).collect();
    let m = maximal_of(&pow, sys);
    GridFunction::from_real(sys.grid.clone(), m.into_iter().map(|v| v.powf(1.0 / q)).collect())
}

pub(crate) fn real_values(f: &GridFunction) -> Vec<f64> {
    f.values().iter().map(|v: &Complex64| v.re).collect()
}
