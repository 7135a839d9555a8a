//! Level hierarchy bookkeeping and vector operations on grid data.
//!
//! Grids are vertex-centred and store interior nodes only. The Dirichlet
//! boundary is eliminated, so any access past the interior reads zero.
//! Values are row-major: `values[j * nx + i]` holds node `(x = i, y = j)`.

use serde::{Deserialize, Serialize};

use crate::error::{MgError, Result};

/// How the grid is coarsened from one level to the next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coarsening {
    /// Halve both directions (coarsening factor close to 1/4).
    FullStandard,
    /// Halve only the y direction (coarsening factor close to 1/2).
    SemiY,
}

impl Coarsening {
    /// Coarse size along x for a fine size along x.
    pub fn coarse_nx(self, nx: usize) -> usize {
        match self {
            Coarsening::FullStandard => (nx - 1) / 2,
            Coarsening::SemiY => nx,
        }
    }

    pub fn coarse_ny(self, ny: usize) -> usize {
        (ny - 1) / 2
    }

    pub fn fine_nx(self, nx: usize) -> usize {
        match self {
            Coarsening::FullStandard => 2 * nx + 1,
            Coarsening::SemiY => nx,
        }
    }

    pub fn fine_ny(self, ny: usize) -> usize {
        2 * ny + 1
    }
}

/// Scalar field on the interior nodes of one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            values: vec![0.0; nx * ny],
        }
    }

    pub fn from_values(nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != nx * ny {
            return Err(MgError::InvalidParameter(format!(
                "{} values for a {nx}x{ny} grid",
                values.len()
            )));
        }
        Ok(Self { nx, ny, values })
    }

    pub fn from_fn(nx: usize, ny: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(i, j));
            }
        }
        Self { nx, ny, values }
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[j * self.nx + i] = v;
    }

    /// Value at signed coordinates, zero outside the interior.
    #[inline]
    pub fn get_or_zero(&self, i: isize, j: isize) -> f64 {
        if i < 0 || j < 0 || i as usize >= self.nx || j as usize >= self.ny {
            0.0
        } else {
            self.values[j as usize * self.nx + i as usize]
        }
    }

    pub fn check_same_dims(&self, other: &GridFunction) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(MgError::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(())
    }

    /// Sets every value to zero in place.
    pub fn fill_zero(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }

    /// `self += s * other`, in place.
    pub fn axpy(&mut self, s: f64, other: &GridFunction) -> Result<()> {
        self.check_same_dims(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn copy_from(&mut self, other: &GridFunction) -> Result<()> {
        self.check_same_dims(other)?;
        self.values.copy_from_slice(&other.values);
        Ok(())
    }
}

/// A grid of the same shape with every value zero.
pub fn zero_fill(g: &GridFunction) -> GridFunction {
    GridFunction::zeros(g.nx, g.ny)
}

/// Componentwise `a + s * b`.
pub fn add_scaled(a: &GridFunction, b: &GridFunction, s: f64) -> Result<GridFunction> {
    let mut out = a.clone();
    out.axpy(s, b)?;
    Ok(out)
}

pub fn norm2(g: &GridFunction) -> f64 {
    g.values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(a: &GridFunction, b: &GridFunction) -> Result<f64> {
    a.check_same_dims(b)?;
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum())
}

/// Level dimensions of a multigrid hierarchy, finest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchySpec {
    pub n: usize,
    pub coarsening: Coarsening,
    pub dims: Vec<(usize, usize)>,
}

impl HierarchySpec {
    pub fn finest(&self) -> (usize, usize) {
        self.dims[0]
    }

    pub fn coarsest(&self) -> (usize, usize) {
        self.dims[self.n - 1]
    }

    pub fn unknowns(&self, level: usize) -> usize {
        let (nx, ny) = self.dims[level];
        nx * ny
    }
}

/// Builds the level dimensions for `n` levels. The finest level has
/// `2^n - 1` interior nodes per side.
pub fn build_hierarchy(n: usize, coarsening: Coarsening) -> Result<HierarchySpec> {
    if n < 1 {
        return Err(MgError::InvalidLevels(n));
    }
    if n > 30 {
        return Err(MgError::InvalidParameter(format!(
            "{n} levels would need more than 2^30 nodes per side"
        )));
    }
    let side = (1usize << n) - 1;
    let mut dims = Vec::with_capacity(n);
    let (mut nx, mut ny) = (side, side);
    for level in 0..n {
        if ny < 1 || nx < 1 {
            return Err(MgError::SemiCoarseningTooDeep { levels: n });
        }
        dims.push((nx, ny));
        if level + 1 < n {
            nx = coarsening.coarse_nx(nx);
            ny = coarsening.coarse_ny(ny);
        }
    }
    Ok(HierarchySpec {
        n,
        coarsening,
        dims,
    })
}
