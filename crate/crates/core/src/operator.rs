//! Nine-point constant-coefficient operators: the rotated anisotropic
//! diffusion stencil, operator application, residuals and Galerkin
//! coarsening.

use serde::{Deserialize, Serialize};

use crate::error::{MgError, Result};
use crate::mesh::{Coarsening, GridFunction};
use crate::transfer;

/// Constant 3x3 stencil, `w[dy + 1][dx + 1]`, acting as
/// `(A u)(i, j) = sum w[dy][dx] * u(i + dx, j + dy)` with zero reads
/// outside the interior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stencil9 {
    pub w: [[f64; 3]; 3],
}

impl Stencil9 {
    pub fn new(w: [[f64; 3]; 3]) -> Self {
        Self { w }
    }

    /// The 5-point Laplacian `[0 -1 0; -1 4 -1; 0 -1 0]`.
    pub fn poisson() -> Self {
        Self::new([[0.0, -1.0, 0.0], [-1.0, 4.0, -1.0], [0.0, -1.0, 0.0]])
    }

    #[inline]
    pub fn at(&self, dx: isize, dy: isize) -> f64 {
        self.w[(dy + 1) as usize][(dx + 1) as usize]
    }

    #[inline]
    pub fn center(&self) -> f64 {
        self.w[1][1]
    }

    pub fn sum(&self) -> f64 {
        self.w.iter().flatten().sum()
    }

    /// Largest deviation from `w[dy][dx] == w[-dy][-dx]`.
    pub fn centro_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                worst = worst.max((self.w[a][b] - self.w[2 - a][2 - b]).abs());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Stencil9) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                worst = worst.max((self.w[a][b] - other.w[a][b]).abs());
            }
        }
        worst
    }

    pub fn scale(&self, s: f64) -> Stencil9 {
        let mut w = self.w;
        w.iter_mut().flatten().for_each(|v| *v *= s);
        Stencil9 { w }
    }
}

/// Seed used for random initial guesses unless overridden.
pub const DEFAULT_SEED: u64 = 1;

/// Right-hand side of the discrete problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum Rhs {
    #[default]
    Zero,
    Constant(f64),
}

impl Rhs {
    pub fn grid(&self, nx: usize, ny: usize) -> GridFunction {
        match *self {
            Rhs::Zero => GridFunction::zeros(nx, ny),
            Rhs::Constant(c) => GridFunction::from_fn(nx, ny, |_, _| c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum InitialGuess {
    /// Seeded uniform values in `[0, 1)`.
    #[default]
    Random,
    Zero,
}

/// Rotated anisotropic diffusion with homogeneous Dirichlet boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub epsilon: f64,
    /// Rotation angle in degrees.
    pub phi: f64,
    pub rhs: Rhs,
    pub seed: u64,
    pub initial: InitialGuess,
}

impl ProblemSpec {
    pub fn new(epsilon: f64, phi: f64) -> Self {
        Self {
            epsilon,
            phi,
            rhs: Rhs::Zero,
            seed: DEFAULT_SEED,
            initial: InitialGuess::Random,
        }
    }

    pub fn stencil(&self) -> Result<Stencil9> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(MgError::InvalidParameter(format!(
                "anisotropy must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        if !self.phi.is_finite() {
            return Err(MgError::InvalidParameter("rotation angle must be finite".into()));
        }
        Ok(rotated_anisotropic_stencil(self.epsilon, self.phi))
    }

    pub fn initial_guess(&self, nx: usize, ny: usize) -> GridFunction {
        match self.initial {
            InitialGuess::Random => crate::cycle::random_grid(nx, ny, self.seed),
            InitialGuess::Zero => GridFunction::zeros(nx, ny),
        }
    }
}

/// Nine-point stencil of `-eps u_ss - u_tt` where `(s, t)` are the grid
/// axes rotated by `phi_deg` degrees. The top row of the tabulated
/// stencil is `dy = +1`; the north/south entries carry `-(eps C^2 + S^2)`
/// and east/west `-(C^2 + eps S^2)`.
pub fn rotated_anisotropic_stencil(epsilon: f64, phi_deg: f64) -> Stencil9 {
    let phi = phi_deg.to_radians();
    let (s, c) = phi.sin_cos();
    let corner = 0.5 * (1.0 - epsilon) * c * s;
    let ns = -(epsilon * c * c + s * s);
    let ew = -(c * c + epsilon * s * s);
    let center = 2.0 * (1.0 + epsilon);
    Stencil9::new([
        [-corner, ns, corner],
        [ew, center, ew],
        [corner, ns, -corner],
    ])
}

/// Writes `A u` into `out`.
pub fn apply_into(op: &Stencil9, u: &GridFunction, out: &mut GridFunction) -> Result<()> {
    u.check_same_dims(out)?;
    let (nx, ny) = u.dims();
    let uv = u.values();
    let ov = out.values_mut();
    ov.iter_mut().for_each(|v| *v = 0.0);
    for j in 0..ny {
        let orow = &mut ov[j * nx..(j + 1) * nx];
        for dy in -1isize..=1 {
            let jj = j as isize + dy;
            if jj < 0 || jj as usize >= ny {
                continue;
            }
            let urow = &uv[jj as usize * nx..(jj as usize + 1) * nx];
            for dx in -1isize..=1 {
                let w = op.at(dx, dy);
                if w == 0.0 {
                    continue;
                }
                // i ranges over nodes whose neighbour i + dx is interior.
                let lo = if dx < 0 { 1 } else { 0 };
                let hi = if dx > 0 { nx.saturating_sub(1) } else { nx };
                if lo >= hi {
                    continue;
                }
                let src = &urow[(lo as isize + dx) as usize..(hi as isize + dx) as usize];
                for (o, s) in orow[lo..hi].iter_mut().zip(src) {
                    *o += w * s;
                }
            }
        }
    }
    Ok(())
}

pub fn apply(op: &Stencil9, u: &GridFunction) -> GridFunction {
    let mut out = GridFunction::zeros(u.nx(), u.ny());
    apply_into(op, u, &mut out).expect("same dims");
    out
}

/// Writes `f - A u` into `out`.
pub fn residual_into(
    op: &Stencil9,
    u: &GridFunction,
    f: &GridFunction,
    out: &mut GridFunction,
) -> Result<()> {
    u.check_same_dims(f)?;
    apply_into(op, u, out)?;
    for (r, fv) in out.values_mut().iter_mut().zip(f.values()) {
        *r = fv - *r;
    }
    Ok(())
}

pub fn residual(op: &Stencil9, u: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    let mut out = GridFunction::zeros(u.nx(), u.ny());
    residual_into(op, u, f, &mut out)?;
    Ok(out)
}

/// Constant stencil of `R A P` for the given coarsening.
///
/// A coarse unit impulse is placed in the middle of a 5x5 (or 5-wide
/// semi-coarsened) auxiliary grid, pushed through prolongation, the fine
/// operator and restriction, and the 3x3 response around the impulse is
/// read off. The auxiliary grid is large enough that boundary truncation
/// never reaches that response.
pub fn galerkin_coarsen(op: &Stencil9, coarsening: Coarsening) -> Stencil9 {
    const M: usize = 5;
    const C: usize = 2;
    let mut impulse = GridFunction::zeros(M, M);
    impulse.set(C, C, 1.0);
    let fine = transfer::prolong(&impulse, coarsening).expect("consistent dims");
    let applied = apply(op, &fine);
    let response = transfer::restrict(&applied, coarsening).expect("consistent dims");

    // (A e_c)(c - d) = w[d]
    let mut w = [[0.0; 3]; 3];
    for dy in -1isize..=1 {
        for dx in -1isize..=1 {
            let i = (C as isize - dx) as usize;
            let j = (C as isize - dy) as usize;
            w[(dy + 1) as usize][(dx + 1) as usize] = response.get(i, j);
        }
    }
    Stencil9::new(w)
}

/// Coarse stencil obtained by discretizing the same operator on the
/// coarser mesh, expressed in the unscaled convention of the fine
/// stencil. Second differences along a doubled spacing shrink by 1/4,
/// mixed differences with one doubled spacing by 1/2.
pub fn rediscretize(op: &Stencil9, coarsening: Coarsening) -> Stencil9 {
    let (sx, sy, sxy) = match coarsening {
        Coarsening::FullStandard => (0.25, 0.25, 0.25),
        Coarsening::SemiY => (1.0, 0.25, 0.5),
    };
    let mut w = op.w;
    w[1][0] *= sx;
    w[1][2] *= sx;
    w[0][1] *= sy;
    w[2][1] *= sy;
    for (a, b) in [(0, 0), (0, 2), (2, 0), (2, 2)] {
        w[a][b] *= sxy;
    }
    w[1][1] = 0.0;
    let off: f64 = w.iter().flatten().sum();
    w[1][1] = -off;
    Stencil9::new(w)
}

/// How coarse-level operators are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum CoarseOperator {
    #[default]
    Galerkin,
    Rediscretize,
}

/// Operators for every level, finest first.
pub fn build_operators(
    finest: Stencil9,
    levels: usize,
    coarsening: Coarsening,
    kind: CoarseOperator,
) -> Vec<Stencil9> {
    let mut ops = Vec::with_capacity(levels);
    ops.push(finest);
    for l in 1..levels {
        let prev = &ops[l - 1];
        let next = match kind {
            CoarseOperator::Galerkin => galerkin_coarsen(prev, coarsening),
            CoarseOperator::Rediscretize => rediscretize(prev, coarsening),
        };
        ops.push(next);
    }
    ops
}
