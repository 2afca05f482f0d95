//! k-means with k-means++ seeding, Lloyd iterations and best-of-n restarts.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;

pub const RESTARTS: usize = 10;
pub const MAX_ITERATIONS: usize = 300;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centroids: Matrix,
    /// Within-cluster sum of squared distances.
    pub wcss: f64,
    pub restart: usize,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Clusters the rows of `points`. Restarts run in order and the lowest WCSS
/// wins, earliest restart on ties.
pub fn kmeans(points: &Matrix, k: usize, rng: &mut Rng) -> Result<KMeansResult> {
    if k == 0 {
        return Err(Error::ZeroClusters);
    }
    if k > points.rows() {
        return Err(Error::TooManyClusters {
            k,
            available: points.rows(),
        });
    }
    let mut best: Option<KMeansResult> = None;
    for restart in 0..RESTARTS {
        let seeds = plus_plus(points, k, rng);
        let mut run = lloyd(points, seeds);
        run.restart = restart;
        if best.as_ref().is_none_or(|b| run.wcss < b.wcss) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn plus_plus(points: &Matrix, k: usize, rng: &mut Rng) -> Matrix {
    let n = points.rows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = (0..n).map(|i| dist2(points.row(i), points.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &d) in nearest.iter().enumerate() {
                if d > 0.0 {
                    if target < d {
                        pick = Some(i);
                        break;
                    }
                    target -= d;
                }
            }
            // rounding can run past the end; fall back to the last candidate
            pick.unwrap_or_else(|| nearest.iter().rposition(|&d| d > 0.0).expect("total > 0"))
        } else {
            // every point coincides with a centre: take an unused index
            let unused: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            unused[rng.random_range(0..unused.len())]
        };
        chosen.push(pick);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(dist2(points.row(i), points.row(pick)));
        }
    }
    Matrix::from_fn(k, points.cols(), |c, j| points[(chosen[c], j)])
}

fn assign(points: &Matrix, centroids: &Matrix, labels: &mut [usize]) -> bool {
    let mut changed = false;
    for (i, label) in labels.iter_mut().enumerate() {
        let p = points.row(i);
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..centroids.rows() {
            let d = dist2(p, centroids.row(c));
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        if *label != best {
            *label = best;
            changed = true;
        }
    }
    changed
}

fn update(points: &Matrix, labels: &mut [usize], centroids: &mut Matrix) {
    let k = centroids.rows();
    let dim = points.cols();
    loop {
        let mut sums = Matrix::zeros(k, dim);
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for (s, &x) in sums.row_mut(l).iter_mut().zip(points.row(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                for (dst, &s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
                    *dst = s * inv;
                }
            }
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        // steal the point farthest from its own centroid, from a cluster
        // that can spare one
        let mut far = None;
        let mut far_d = -1.0;
        for (i, &l) in labels.iter().enumerate() {
            if counts[l] < 2 {
                continue;
            }
            let d = dist2(points.row(i), centroids.row(l));
            if d > far_d {
                far = Some(i);
                far_d = d;
            }
        }
        let far = far.expect("k <= n leaves a cluster with two members");
        labels[far] = empty;
    }
}

fn lloyd(points: &Matrix, mut centroids: Matrix) -> KMeansResult {
    let n = points.rows();
    let mut labels = vec![usize::MAX; n];
    assign(points, &centroids, &mut labels);
    update(points, &mut labels, &mut centroids);
    for _ in 1..MAX_ITERATIONS {
        if !assign(points, &centroids, &mut labels) {
            break;
        }
        update(points, &mut labels, &mut centroids);
    }
    let wcss = (0..n).map(|i| dist2(points.row(i), centroids.row(labels[i]))).sum();
    KMeansResult {
        labels,
        centroids,
        wcss,
        restart: 0,
    }
}
