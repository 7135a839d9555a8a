//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use kcycle_core::costmodel::Kappa;
use kcycle_core::mesh::Coarsening;
use kcycle_core::operator::Stencil9;

pub type Dense = Vec<Vec<f64>>;

fn idx(nx: usize, i: usize, j: usize) -> usize {
    j * nx + i
}

/// Assembled matrix of a 9-point stencil with eliminated Dirichlet nodes.
pub fn dense_operator(op: &Stencil9, nx: usize, ny: usize) -> Dense {
    let n = nx * ny;
    let mut a = vec![vec![0.0; n]; n];
    for j in 0..ny {
        for i in 0..nx {
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let (ii, jj) = (i as isize + dx, j as isize + dy);
                    if ii < 0 || jj < 0 || ii >= nx as isize || jj >= ny as isize {
                        continue;
                    }
                    a[idx(nx, i, j)][idx(nx, ii as usize, jj as usize)] =
                        op.w[(dy + 1) as usize][(dx + 1) as usize];
                }
            }
        }
    }
    a
}

/// Linear interpolation matrix, fine rows by coarse columns.
pub fn dense_prolongation(kind: Coarsening, cnx: usize, cny: usize) -> (Dense, usize, usize) {
    let (fnx, fny) = match kind {
        Coarsening::FullStandard => (2 * cnx + 1, 2 * cny + 1),
        Coarsening::SemiY => (cnx, 2 * cny + 1),
    };
    let mut p = vec![vec![0.0; cnx * cny]; fnx * fny];
    for cj in 0..cny {
        for ci in 0..cnx {
            let (x0, y0) = match kind {
                Coarsening::FullStandard => (2 * ci + 1, 2 * cj + 1),
                Coarsening::SemiY => (ci, 2 * cj + 1),
            };
            for fj in 0..fny {
                for fi in 0..fnx {
                    let ddx = (fi as f64 - x0 as f64).abs();
                    let ddy = (fj as f64 - y0 as f64).abs();
                    let wx = match kind {
                        Coarsening::FullStandard => (1.0 - ddx / 2.0).max(0.0),
                        Coarsening::SemiY => {
                            if ddx == 0.0 {
                                1.0
                            } else {
                                0.0
                            }
                        }
                    };
                    let wy = (1.0 - ddy / 2.0).max(0.0);
                    p[idx(fnx, fi, fj)][idx(cnx, ci, cj)] = wx * wy;
                }
            }
        }
    }
    (p, fnx, fny)
}

pub fn transpose(a: &Dense) -> Dense {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; c]; r];
    for i in 0..r {
        for t in 0..k {
            let v = a[i][t];
            if v == 0.0 {
                continue;
            }
            for j in 0..c {
                out[i][j] += v * b[t][j];
            }
        }
    }
    out
}

pub fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// `R A P` with `R = s P^T`, `s` being 1/4 for full and 1/2 for semi-coarsening.
pub fn dense_rap(op: &Stencil9, kind: Coarsening, cnx: usize, cny: usize) -> (Dense, usize, usize) {
    let (p, fnx, fny) = dense_prolongation(kind, cnx, cny);
    let a = dense_operator(op, fnx, fny);
    let s = match kind {
        Coarsening::FullStandard => 0.25,
        Coarsening::SemiY => 0.5,
    };
    let r: Dense = transpose(&p)
        .into_iter()
        .map(|row| row.into_iter().map(|v| v * s).collect())
        .collect();
    (matmul(&r, &matmul(&a, &p)), fnx, fny)
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Dense, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let m = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= m * a[col][k];
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Routine entries `(level, counter)` of the kappa recursion, finest
/// level 1, walked without any clamping of the counter.
pub fn kappa_trace(n: u32, kappa: u32) -> Vec<(u32, u32)> {
    fn walk(level: u32, n: u32, k: u32, out: &mut Vec<(u32, u32)>) {
        out.push((level, k));
        if level == n {
            return;
        }
        walk(level + 1, n, k, out);
        if k > 1 {
            walk(level + 1, n, k - 1, out);
        }
    }
    let mut out = Vec::new();
    walk(1, n, kappa, &mut out);
    out
}

/// Operation count of one cycle by direct recursion: `c_fine * N_l` per
/// non-coarsest call and `c_coarsest * N_1` per coarsest call with
/// `N_l = c^(n - l) N_n`, here indexed from the finest level.
pub fn brute_force_ops(kappa: u32, c: f64, n: u32, c_fine: f64, c_coarsest: f64, n1: f64) -> f64 {
    fn walk(depth: u32, n: u32, k: u32, sizes: &[f64], cf: f64, cc: f64) -> f64 {
        if depth + 1 == n {
            return cc * sizes[depth as usize];
        }
        let mut ops = cf * sizes[depth as usize] + walk(depth + 1, n, k, sizes, cf, cc);
        if k > 1 {
            ops += walk(depth + 1, n, k - 1, sizes, cf, cc);
        }
        ops
    }
    let n_fine = n1 / c.powi(n as i32 - 1);
    let sizes: Vec<f64> = (0..n).map(|d| n_fine * c.powi(d as i32)).collect();
    walk(0, n, kappa, &sizes, c_fine, c_coarsest)
}

pub const KAPPAS: [Kappa; 5] = [
    Kappa::Finite(1),
    Kappa::Finite(2),
    Kappa::Finite(3),
    Kappa::Finite(4),
    Kappa::Infinite,
];

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
