//! Relaxation: damped Jacobi, zebra line Gauss-Seidel along x or y, and
//! the alternating x-then-y composition.

use serde::{Deserialize, Serialize};

use crate::error::{MgError, Result};
use crate::mesh::GridFunction;
use crate::operator::{residual_into, Stencil9};

pub const DEFAULT_OMEGA: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmootherKind {
    DampedJacobi,
    ZebraX,
    ZebraY,
    /// One x sweep followed by one y sweep; counts as two relaxations.
    ZebraAlternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmootherSpec {
    pub kind: SmootherKind,
    /// Damping factor, used by `DampedJacobi` only.
    pub omega: f64,
}

impl SmootherSpec {
    pub fn jacobi(omega: f64) -> Self {
        Self {
            kind: SmootherKind::DampedJacobi,
            omega,
        }
    }

    pub fn zebra(kind: SmootherKind) -> Self {
        Self {
            kind,
            omega: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == SmootherKind::DampedJacobi && !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(MgError::InvalidParameter(format!(
                "Jacobi damping must lie in (0, 1], got {}",
                self.omega
            )));
        }
        Ok(())
    }
}

impl Default for SmootherSpec {
    fn default() -> Self {
        Self::jacobi(DEFAULT_OMEGA)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

/// Tridiagonal system; `lower[0]` and `upper[m - 1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

/// Thomas elimination without pivoting.
pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    let m = sys.diag.len();
    if sys.lower.len() != m || sys.upper.len() != m || sys.rhs.len() != m {
        return Err(MgError::InvalidParameter(
            "tridiagonal arrays differ in length".into(),
        ));
    }
    let mut c = vec![0.0; m];
    let mut x = sys.rhs.clone();
    if m == 0 {
        return Ok(x);
    }
    let mut denom = sys.diag[0];
    if denom == 0.0 {
        return Err(MgError::ZeroPivot(0));
    }
    c[0] = sys.upper[0] / denom;
    x[0] /= denom;
    for k in 1..m {
        denom = sys.diag[k] - sys.lower[k] * c[k - 1];
        if denom == 0.0 {
            return Err(MgError::ZeroPivot(k));
        }
        c[k] = sys.upper[k] / denom;
        x[k] = (x[k] - sys.lower[k] * x[k - 1]) / denom;
    }
    for k in (0..m - 1).rev() {
        x[k] -= c[k] * x[k + 1];
    }
    Ok(x)
}

/// Thomas elimination for a constant-coefficient line, in place on `x`.
fn solve_constant_line(lower: f64, diag: f64, upper: f64, x: &mut [f64], c: &mut [f64]) -> Result<()> {
    let m = x.len();
    if m == 0 {
        return Ok(());
    }
    if diag == 0.0 {
        return Err(MgError::ZeroPivot(0));
    }
    c[0] = upper / diag;
    x[0] /= diag;
    for k in 1..m {
        let denom = diag - lower * c[k - 1];
        if denom == 0.0 {
            return Err(MgError::ZeroPivot(k));
        }
        c[k] = upper / denom;
        x[k] = (x[k] - lower * x[k - 1]) / denom;
    }
    for k in (0..m - 1).rev() {
        x[k] -= c[k] * x[k + 1];
    }
    Ok(())
}

/// Preallocated buffers for one grid size.
#[derive(Debug, Clone)]
pub struct SmootherScratch {
    tmp: GridFunction,
    line: Vec<f64>,
    factors: Vec<f64>,
}

impl SmootherScratch {
    pub fn new(nx: usize, ny: usize) -> Self {
        let m = nx.max(ny);
        Self {
            tmp: GridFunction::zeros(nx, ny),
            line: vec![0.0; m],
            factors: vec![0.0; m],
        }
    }
}

/// One damped Jacobi sweep, `u += omega (f - A u) / diag`, in place.
pub fn damped_jacobi_in_place(
    op: &Stencil9,
    u: &mut GridFunction,
    f: &GridFunction,
    omega: f64,
    scratch: &mut SmootherScratch,
) -> Result<()> {
    let center = op.center();
    if center == 0.0 {
        return Err(MgError::ZeroDiagonal);
    }
    residual_into(op, u, f, &mut scratch.tmp)?;
    u.axpy(omega / center, &scratch.tmp)
}

pub fn damped_jacobi_sweep(
    op: &Stencil9,
    u: &GridFunction,
    f: &GridFunction,
    omega: f64,
) -> Result<GridFunction> {
    let mut out = u.clone();
    let mut scratch = SmootherScratch::new(u.nx(), u.ny());
    damped_jacobi_in_place(op, &mut out, f, omega, &mut scratch)?;
    Ok(out)
}

/// Solves the listed lines exactly, in the order given, using current
/// values of neighbouring lines.
pub fn solve_lines(
    op: &Stencil9,
    u: &mut GridFunction,
    f: &GridFunction,
    axis: Axis,
    lines: &[usize],
    scratch: &mut SmootherScratch,
) -> Result<()> {
    u.check_same_dims(f)?;
    let (nx, ny) = u.dims();
    match axis {
        Axis::X => {
            let (lo, di, up) = (op.at(-1, 0), op.at(0, 0), op.at(1, 0));
            for &j in lines {
                let rhs = &mut scratch.line[..nx];
                rhs.copy_from_slice(&f.values()[j * nx..(j + 1) * nx]);
                for dy in [-1isize, 1] {
                    let jj = j as isize + dy;
                    if jj < 0 || jj as usize >= ny {
                        continue;
                    }
                    let nrow = &u.values()[jj as usize * nx..(jj as usize + 1) * nx];
                    for dx in -1isize..=1 {
                        let w = op.at(dx, dy);
                        if w == 0.0 {
                            continue;
                        }
                        for (i, r) in rhs.iter_mut().enumerate() {
                            let ii = i as isize + dx;
                            if ii >= 0 && (ii as usize) < nx {
                                *r -= w * nrow[ii as usize];
                            }
                        }
                    }
                }
                solve_constant_line(lo, di, up, rhs, &mut scratch.factors[..nx])?;
                u.values_mut()[j * nx..(j + 1) * nx].copy_from_slice(rhs);
            }
        }
        Axis::Y => {
            let (lo, di, up) = (op.at(0, -1), op.at(0, 0), op.at(0, 1));
            for &i in lines {
                let rhs = &mut scratch.line[..ny];
                for (j, r) in rhs.iter_mut().enumerate() {
                    let mut acc = f.get(i, j);
                    for dx in [-1isize, 1] {
                        let ii = i as isize + dx;
                        if ii < 0 || ii as usize >= nx {
                            continue;
                        }
                        for dy in -1isize..=1 {
                            let jj = j as isize + dy;
                            if jj >= 0 && (jj as usize) < ny {
                                acc -= op.at(dx, dy) * u.get(ii as usize, jj as usize);
                            }
                        }
                    }
                    *r = acc;
                }
                solve_constant_line(lo, di, up, rhs, &mut scratch.factors[..ny])?;
                for (j, v) in rhs.iter().enumerate() {
                    u.set(i, j, *v);
                }
            }
        }
    }
    Ok(())
}

/// One zebra sweep along `axis`: even lines (0-based) first, then odd.
pub fn zebra_in_place(
    op: &Stencil9,
    u: &mut GridFunction,
    f: &GridFunction,
    axis: Axis,
    scratch: &mut SmootherScratch,
) -> Result<()> {
    let count = match axis {
        Axis::X => u.ny(),
        Axis::Y => u.nx(),
    };
    for parity in 0..2 {
        // Same-parity lines never couple, so each half-sweep is one batch.
        let mut line = parity;
        while line < count {
            solve_lines(op, u, f, axis, std::slice::from_ref(&line), scratch)?;
            line += 2;
        }
    }
    Ok(())
}

pub fn zebra_line_sweep(
    op: &Stencil9,
    u: &GridFunction,
    f: &GridFunction,
    axis: Axis,
) -> Result<GridFunction> {
    let mut out = u.clone();
    let mut scratch = SmootherScratch::new(u.nx(), u.ny());
    zebra_in_place(op, &mut out, f, axis, &mut scratch)?;
    Ok(out)
}

/// Applies `count` relaxation units in place. For the alternating zebra
/// smoother an x sweep and a y sweep are one unit each, so `count` must be
/// even.
pub fn relax_in_place(
    op: &Stencil9,
    u: &mut GridFunction,
    f: &GridFunction,
    spec: &SmootherSpec,
    count: usize,
    scratch: &mut SmootherScratch,
) -> Result<()> {
    match spec.kind {
        SmootherKind::DampedJacobi => {
            for _ in 0..count {
                damped_jacobi_in_place(op, u, f, spec.omega, scratch)?;
            }
        }
        SmootherKind::ZebraX => {
            for _ in 0..count {
                zebra_in_place(op, u, f, Axis::X, scratch)?;
            }
        }
        SmootherKind::ZebraY => {
            for _ in 0..count {
                zebra_in_place(op, u, f, Axis::Y, scratch)?;
            }
        }
        SmootherKind::ZebraAlternating => {
            if count % 2 != 0 {
                return Err(MgError::OddAlternatingCount(count));
            }
            for _ in 0..count / 2 {
                zebra_in_place(op, u, f, Axis::X, scratch)?;
                zebra_in_place(op, u, f, Axis::Y, scratch)?;
            }
        }
    }
    Ok(())
}

pub fn relax(
    op: &Stencil9,
    u: &GridFunction,
    f: &GridFunction,
    spec: &SmootherSpec,
    count: usize,
) -> Result<GridFunction> {
    let mut out = u.clone();
    let mut scratch = SmootherScratch::new(u.nx(), u.ny());
    relax_in_place(op, &mut out, f, spec, count, &mut scratch)?;
    Ok(out)
}
