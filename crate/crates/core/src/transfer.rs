//! Grid transfers between a level and the next coarser one.
//!
//! Coarse node `I` sits on fine node `2I + 1` along every coarsened axis.
//! Prolongation has unit weight at coincident nodes; restriction is the
//! scaled adjoint, `R = 1/4 P^T` for full coarsening and `R = 1/2 P^T`
//! for semi-coarsening in y.

use serde::{Deserialize, Serialize};

use crate::error::{MgError, Result};
use crate::mesh::{Coarsening, GridFunction};

/// A transfer kind together with its restriction/adjoint scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferPair {
    pub kind: Coarsening,
}

impl TransferPair {
    pub fn new(kind: Coarsening) -> Self {
        Self { kind }
    }

    /// `s` such that `R = s * P^T`.
    pub fn restriction_scale(&self) -> f64 {
        match self.kind {
            Coarsening::FullStandard => 0.25,
            Coarsening::SemiY => 0.5,
        }
    }
}

fn check_pair(fine: (usize, usize), coarse: (usize, usize), kind: Coarsening) -> Result<()> {
    let expected = (kind.fine_nx(coarse.0), kind.fine_ny(coarse.1));
    if fine != expected {
        return Err(MgError::DimensionMismatch {
            left: fine,
            right: expected,
        });
    }
    Ok(())
}

/// Linear interpolation of one coarse row onto a fine row along x.
#[inline]
fn interp_row_x(coarse: &[f64], fine: &mut [f64], scale: f64) {
    let m = coarse.len();
    for (i, slot) in fine.iter_mut().enumerate() {
        let v = if i % 2 == 1 {
            coarse[(i - 1) / 2]
        } else {
            let right = if i / 2 < m { coarse[i / 2] } else { 0.0 };
            let left = if i >= 2 { coarse[i / 2 - 1] } else { 0.0 };
            0.5 * (left + right)
        };
        *slot += scale * v;
    }
}

#[inline]
fn copy_row(coarse: &[f64], fine: &mut [f64], scale: f64) {
    for (slot, v) in fine.iter_mut().zip(coarse) {
        *slot += scale * v;
    }
}

/// Writes `P coarse` into `fine`.
pub fn prolong_into(coarse: &GridFunction, kind: Coarsening, fine: &mut GridFunction) -> Result<()> {
    check_pair(fine.dims(), coarse.dims(), kind)?;
    let (cnx, cny) = coarse.dims();
    let fnx = fine.nx();
    let cv = coarse.values();
    let row_op: fn(&[f64], &mut [f64], f64) = match kind {
        Coarsening::FullStandard => interp_row_x,
        Coarsening::SemiY => copy_row,
    };
    fine.fill_zero();
    let fv = fine.values_mut();
    for (fj, frow) in fv.chunks_exact_mut(fnx).enumerate() {
        let crow = |jc: usize| &cv[jc * cnx..(jc + 1) * cnx];
        if fj % 2 == 1 {
            row_op(crow((fj - 1) / 2), frow, 1.0);
        } else {
            if fj >= 2 {
                row_op(crow(fj / 2 - 1), frow, 0.5);
            }
            if fj / 2 < cny {
                row_op(crow(fj / 2), frow, 0.5);
            }
        }
    }
    Ok(())
}

pub fn prolong(coarse: &GridFunction, kind: Coarsening) -> Result<GridFunction> {
    let mut fine = GridFunction::zeros(kind.fine_nx(coarse.nx()), kind.fine_ny(coarse.ny()));
    prolong_into(coarse, kind, &mut fine)?;
    Ok(fine)
}

/// Writes `R fine` into `coarse`: full weighting
/// `(1/16) [1 2 1; 2 4 2; 1 2 1]`, or `(1/4) [1; 2; 1]` in y for
/// semi-coarsening.
pub fn restrict_into(fine: &GridFunction, kind: Coarsening, coarse: &mut GridFunction) -> Result<()> {
    check_pair(fine.dims(), coarse.dims(), kind)?;
    let (cnx, _) = coarse.dims();
    let fnx = fine.nx();
    let fv = fine.values();
    let cv = coarse.values_mut();
    for (jc, crow) in cv.chunks_exact_mut(cnx).enumerate() {
        let fj = 2 * jc + 1;
        let below = &fv[(fj - 1) * fnx..fj * fnx];
        let mid = &fv[fj * fnx..(fj + 1) * fnx];
        let above = &fv[(fj + 1) * fnx..(fj + 2) * fnx];
        match kind {
            Coarsening::FullStandard => {
                for (ic, slot) in crow.iter_mut().enumerate() {
                    let fi = 2 * ic + 1;
                    let col = |r: &[f64]| r[fi - 1] + 2.0 * r[fi] + r[fi + 1];
                    *slot = (col(below) + 2.0 * col(mid) + col(above)) / 16.0;
                }
            }
            Coarsening::SemiY => {
                for (i, slot) in crow.iter_mut().enumerate() {
                    *slot = 0.25 * (below[i] + 2.0 * mid[i] + above[i]);
                }
            }
        }
    }
    Ok(())
}

pub fn restrict(fine: &GridFunction, kind: Coarsening) -> Result<GridFunction> {
    let mut coarse = GridFunction::zeros(kind.coarse_nx(fine.nx()), kind.coarse_ny(fine.ny()));
    restrict_into(fine, kind, &mut coarse)?;
    Ok(coarse)
}
