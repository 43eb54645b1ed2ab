//! Uniform grids and the fields sampled on them.
//!
//! Periodic boxes are centred: node `i` sits at `-L/2 + i*h`. Dirichlet
//! intervals are `[0, L]` with node `i` at `i*h`; node 0 is the left wall and
//! the right wall `x = L` is the (unstored) node `n`, so both walls carry the
//! value zero.

mod snapshot;

pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_HEADER_BYTES};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    DirichletZero,
}

impl Boundary {
    pub(crate) fn tag(self) -> u32 {
        match self {
            Boundary::Periodic => 0,
            Boundary::DirichletZero => 1,
        }
    }

    pub(crate) fn from_tag(tag: u32) -> Option<Self> {
        match tag {
            0 => Some(Boundary::Periodic),
            1 => Some(Boundary::DirichletZero),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
    boundary: Boundary,
}

/// Serialized form of [`Grid`]; validated on the way in.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct GridSpec {
    dim: usize,
    n: usize,
    length: f64,
    boundary: Boundary,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;
    fn try_from(s: GridSpec) -> Result<Self> {
        Grid::new(s.dim, s.n, s.length, s.boundary)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            dim: g.dim,
            n: g.n,
            length: g.length,
            boundary: g.boundary,
        }
    }
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64, boundary: Boundary) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        if boundary == Boundary::DirichletZero && dim != 1 {
            return Err(Error::InvalidGrid("dirichlet-zero grids are 1-D only".into()));
        }
        Ok(Grid {
            dim,
            n,
            length,
            boundary,
        })
    }

    pub fn periodic(dim: usize, n: usize, length: f64) -> Result<Self> {
        Grid::new(dim, n, length, Boundary::Periodic)
    }

    pub fn dirichlet(n: usize, length: f64) -> Result<Self> {
        Grid::new(1, n, length, Boundary::DirichletZero)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }
    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// `h^d`, the quadrature weight of one node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Number of stored nodes, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of node `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        let h = self.spacing();
        match self.boundary {
            Boundary::Periodic => -0.5 * self.length + i as f64 * h,
            Boundary::DirichletZero => i as f64 * h,
        }
    }

    /// Coordinates of the node with flat (row-major) index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        if self.dim == 1 {
            [self.coord(idx), 0.0]
        } else {
            [self.coord(idx / self.n), self.coord(idx % self.n)]
        }
    }

    /// Largest Euclidean norm of an integer wave vector on this grid.
    pub fn max_wave_norm(&self) -> f64 {
        let k = (self.n / 2) as f64;
        k * (self.dim as f64).sqrt()
    }

    /// Same grid with a different boundary tag (used to host noise on the
    /// periodic image of a Dirichlet interval).
    pub fn with_boundary(&self, boundary: Boundary) -> Result<Grid> {
        Grid::new(self.dim, self.n, self.length, boundary)
    }

    pub(crate) fn ensure_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{what}: {self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Real values on the nodes of a [`Grid`], row-major in 2-D.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("field value at node {i}")));
        }
        if grid.boundary == Boundary::DirichletZero && values[0] != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "dirichlet field must vanish at the wall node, got {}",
                values[0]
            )));
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        let mut values = vec![c; grid.len()];
        if grid.boundary == Boundary::DirichletZero {
            values[0] = 0.0;
        }
        Field::new(grid, values)
    }

    /// Samples `f` at every node. Dirichlet wall nodes are forced to zero.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 2]) -> f64) -> Result<Self> {
        let mut values: Vec<f64> = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        if grid.boundary == Boundary::DirichletZero {
            values[0] = 0.0;
        }
        Field::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Field> {
        Field::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: f64) -> Result<Field> {
        self.map(|v| c * v)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.grid.ensure_same(&other.grid, "sub")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Field::new(self.grid, values)
    }

    /// `Σ u h^d`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Discrete `‖u‖_p^p = Σ |u|^p h^d`.
    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        lp_norm_pow(&self.values, p) * self.grid.cell_volume()
    }

    /// Discrete `‖u‖_p`; `p = ∞` gives the max norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        self.lp_norm_pow(p).powf(1.0 / p)
    }
}

pub(crate) fn lp_norm_pow(values: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        values.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        values.iter().map(|v| v * v).sum()
    } else {
        values.iter().map(|v| v.abs().powf(p)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::periodic(1, 6, 1.0).is_err());
        assert!(Grid::periodic(1, 4, 1.0).is_err());
        assert!(Grid::periodic(3, 16, 1.0).is_err());
        assert!(Grid::periodic(1, 16, 0.0).is_err());
        assert!(Grid::new(2, 16, 1.0, Boundary::DirichletZero).is_err());
        let g = Grid::periodic(2, 16, 2.0).unwrap();
        assert_eq!(g.len(), 256);
        assert!((g.spacing() - 0.125).abs() < 1e-15);
        assert!((g.coord(0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn spec_conversion_validates() {
        let spec = GridSpec {
            dim: 1,
            n: 12,
            length: 1.0,
            boundary: Boundary::Periodic,
        };
        assert!(Grid::try_from(spec).is_err());
    }

    #[test]
    fn field_rejects_nan_and_wall_values() {
        let g = Grid::periodic(1, 8, 1.0).unwrap();
        assert!(Field::new(g, vec![f64::NAN; 8]).is_err());
        assert!(Field::new(g, vec![0.0; 7]).is_err());
        let d = Grid::dirichlet(8, 1.0).unwrap();
        assert!(Field::new(d, vec![1.0; 8]).is_err());
        let f = Field::from_fn(d, |_| 1.0).unwrap();
        assert_eq!(f.values()[0], 0.0);
    }

    #[test]
    fn norms() {
        let g = Grid::periodic(1, 8, 2.0).unwrap();
        let f = Field::constant(g, -3.0).unwrap();
        assert!((f.integral() + 6.0).abs() < 1e-12);
        assert!((f.lp_norm(2.0) - (9.0f64 * 2.0).sqrt()).abs() < 1e-12);
        assert_eq!(f.lp_norm(f64::INFINITY), 3.0);
    }
}
