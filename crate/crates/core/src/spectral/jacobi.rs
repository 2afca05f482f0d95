//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Sweeps stop once every off-diagonal magnitude is below this.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Eigenpairs sorted by descending eigenvalue. Column `k` of `vectors` is the
/// unit eigenvector for `values[k]`.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
    pub sweeps: usize,
}

impl SymmetricEigen {
    /// `V diag(values) V^T`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.values.len();
        let v = &self.vectors;
        Matrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.values[k] * v[(j, k)]).sum()
        })
    }
}

pub fn check_symmetric(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let scale = a.as_slice().iter().fold(1.0f64, |m, x| m.max(x.abs()));
    for i in 0..a.rows() {
        for j in i + 1..a.cols() {
            let diff = (a[(i, j)] - a[(j, i)]).abs();
            if diff > 1e-12 * scale || diff.is_nan() {
                return Err(Error::NotSymmetric { row: i, col: j, diff });
            }
        }
    }
    Ok(())
}

pub fn eigendecompose_symmetric(a: &Matrix) -> Result<SymmetricEigen> {
    check_symmetric(a)?;
    let n = a.rows();
    let mut m = a.clone();
    // Rows of `vt` are the eigenvectors, so rotations touch contiguous memory.
    let mut vt = Matrix::identity(n);
    let rounds = round_robin(n);
    let mut sweeps = 0;
    let mut batch = Vec::with_capacity(n / 2);

    while sweeps < MAX_SWEEPS && max_off_diagonal(&m) >= OFF_DIAGONAL_TOL {
        sweeps += 1;
        for pairs in &rounds {
            batch.clear();
            batch.extend(pairs.iter().filter_map(|&(p, q)| Rotation::annihilating(&m, p, q)));
            if !batch.is_empty() {
                apply_round(&mut m, &mut vt, &batch);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(y, y)].total_cmp(&m[(x, x)]).then(x.cmp(&y)));
    let values = order.iter().map(|&k| m[(k, k)]).collect();
    let vectors = Matrix::from_fn(n, n, |i, col| vt[(order[col], i)]);
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Cyclic pair ordering split into rounds of disjoint pairs (circle
/// method). Every unordered pair appears exactly once per sweep.
fn round_robin(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n < 2 {
        return Vec::new();
    }
    let m = n + n % 2;
    let mut ring: Vec<usize> = (0..m).collect();
    let mut rounds = Vec::with_capacity(m - 1);
    for _ in 0..m - 1 {
        let pairs = (0..m / 2)
            .map(|i| (ring[i], ring[m - 1 - i]))
            .filter(|&(a, b)| a < n && b < n)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        rounds.push(pairs);
        ring[1..].rotate_right(1);
    }
    rounds
}

fn max_off_diagonal(m: &Matrix) -> f64 {
    let n = m.rows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for (j, &x) in m.row(i).iter().enumerate() {
            if i != j {
                worst = worst.max(x.abs());
            }
        }
    }
    worst
}

#[derive(Clone, Copy, Debug)]
struct Rotation {
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    app: f64,
    aqq: f64,
}

impl Rotation {
    /// Plane rotation zeroing `m[p][q]`, or `None` if it is already below
    /// tolerance.
    fn annihilating(m: &Matrix, p: usize, q: usize) -> Option<Rotation> {
        let apq = m[(p, q)];
        if apq.abs() < OFF_DIAGONAL_TOL {
            return None;
        }
        let app = m[(p, p)];
        let aqq = m[(q, q)];
        let theta = (aqq - app) / (2.0 * apq);
        let t = if theta.abs() > 1e150 {
            0.5 / theta
        } else {
            theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
        };
        let c = 1.0 / (t * t + 1.0).sqrt();
        Some(Rotation {
            p,
            q,
            c,
            s: t * c,
            app: app - t * apq,
            aqq: aqq + t * apq,
        })
    }
}

/// Applies disjoint rotations `M <- J^T M J` and accumulates `J` into `vt`.
/// Disjoint pivots do not interact, so the result equals applying them one
/// after another.
fn apply_round(m: &mut Matrix, vt: &mut Matrix, batch: &[Rotation]) {
    for r in batch {
        rotate_rows(m, r);
        rotate_rows(vt, r);
    }
    for k in 0..m.rows() {
        let row = m.row_mut(k);
        for r in batch {
            let (x, y) = (row[r.p], row[r.q]);
            row[r.p] = r.c * x - r.s * y;
            row[r.q] = r.s * x + r.c * y;
        }
    }
    for r in batch {
        m[(r.p, r.p)] = r.app;
        m[(r.q, r.q)] = r.aqq;
        m[(r.p, r.q)] = 0.0;
        m[(r.q, r.p)] = 0.0;
    }
}

fn rotate_rows(m: &mut Matrix, r: &Rotation) {
    let n = m.cols();
    let (head, tail) = m.as_mut_slice().split_at_mut(r.q * n);
    let row_p = &mut head[r.p * n..(r.p + 1) * n];
    let row_q = &mut tail[..n];
    for (x, y) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = r.c * a - r.s * b;
        *y = r.s * a + r.c * b;
    }
}
