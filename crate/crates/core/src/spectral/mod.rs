//! Finding object networks in the probability matrix: threshold extraction
//! of fully interconnected high-probability sets, and Ng-Jordan-Weiss
//! spectral clustering used to reorder `C` for display.

mod jacobi;
mod kmeans;

pub use jacobi::{check_symmetric, eigendecompose_symmetric, SymmetricEigen, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use kmeans::{kmeans, KMeansResult, MAX_ITERATIONS, RESTARTS};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;

/// States whose degree falls below this are left unclustered.
pub const ISOLATED_DEGREE: f64 = 1e-12;

/// `A = (C + C^T) / 2` with a zero diagonal.
pub fn build_similarity(c: &Matrix) -> Result<Matrix> {
    if !c.is_square() {
        return Err(Error::NotSquare {
            rows: c.rows(),
            cols: c.cols(),
        });
    }
    let n = c.rows();
    Ok(Matrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            0.5 * (c[(i, j)] + c[(j, i)])
        }
    }))
}

/// Row-normalised spectral embedding of the non-isolated states.
#[derive(Clone, Debug)]
pub struct Embedding {
    /// One unit-norm row per kept state.
    pub points: Matrix,
    /// Original indices of the embedded rows.
    pub kept: Vec<usize>,
    pub unclustered: Vec<usize>,
    /// Full spectrum of the normalised affinity, descending.
    pub eigenvalues: Vec<f64>,
}

/// `D^-1/2 A D^-1/2` restricted to states with non-negligible degree.
pub fn normalized_affinity(a: &Matrix) -> Result<(Matrix, Vec<usize>, Vec<usize>)> {
    check_symmetric(a)?;
    let n = a.rows();
    let degree: Vec<f64> = (0..n).map(|i| a.row(i).iter().sum()).collect();
    let (kept, unclustered): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| degree[i] >= ISOLATED_DEGREE);
    let inv_sqrt: Vec<f64> = kept.iter().map(|&i| degree[i].sqrt().recip()).collect();
    let l = Matrix::from_fn(kept.len(), kept.len(), |x, y| {
        a[(kept[x], kept[y])] * inv_sqrt[x] * inv_sqrt[y]
    });
    Ok((l, kept, unclustered))
}

pub fn spectral_embed(a: &Matrix, k: usize) -> Result<Embedding> {
    let (l, kept, unclustered) = normalized_affinity(a)?;
    let eig = eigendecompose_symmetric(&l)?;
    embed_from(&eig, k, kept, unclustered)
}

fn embed_from(eig: &SymmetricEigen, k: usize, kept: Vec<usize>, unclustered: Vec<usize>) -> Result<Embedding> {
    if k == 0 {
        return Err(Error::ZeroClusters);
    }
    if k > kept.len() {
        return Err(Error::TooManyClusters {
            k,
            available: kept.len(),
        });
    }
    let mut points = Matrix::from_fn(kept.len(), k, |i, c| eig.vectors[(i, c)]);
    for i in 0..points.rows() {
        let row = points.row_mut(i);
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|x| *x /= norm);
        }
    }
    Ok(Embedding {
        points,
        kept,
        unclustered,
        eigenvalues: eig.values.clone(),
    })
}

/// Position of the largest gap between consecutive descending eigenvalues
/// (1-based, first on ties). Fewer than two eigenvalues give 1.
pub fn estimate_k_eigengap(eigenvalues: &[f64]) -> usize {
    if eigenvalues.len() < 2 {
        return 1;
    }
    let mut best = 1;
    let mut best_gap = f64::NEG_INFINITY;
    for (i, w) in eigenvalues.windows(2).enumerate() {
        let gap = w[0] - w[1];
        if gap > best_gap {
            best_gap = gap;
            best = i + 1;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterAssignment {
    /// Cluster id per state, `None` for unclustered states.
    pub labels: Vec<Option<usize>>,
    pub k: usize,
    /// Clustered indices grouped by ascending cluster id.
    pub permutation: Vec<usize>,
    pub unclustered: Vec<usize>,
}

impl ClusterAssignment {
    /// Builds an assignment, renumbering clusters by their smallest member.
    pub fn from_labels(labels: Vec<Option<usize>>) -> Self {
        let mut rename = std::collections::HashMap::new();
        let labels: Vec<Option<usize>> = labels
            .into_iter()
            .map(|l| {
                l.map(|l| {
                    let next = rename.len();
                    *rename.entry(l).or_insert(next)
                })
            })
            .collect();
        let k = rename.len();
        let mut permutation = Vec::with_capacity(labels.len());
        for c in 0..k {
            permutation.extend((0..labels.len()).filter(|&i| labels[i] == Some(c)));
        }
        let unclustered = (0..labels.len()).filter(|&i| labels[i].is_none()).collect();
        ClusterAssignment {
            labels,
            k,
            permutation,
            unclustered,
        }
    }

    /// Members of cluster `c` in ascending index order.
    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i] == Some(c)).collect()
    }

    /// Full display order: clusters first, unclustered states last.
    pub fn order(&self) -> Vec<usize> {
        let mut order = self.permutation.clone();
        order.extend(&self.unclustered);
        order
    }
}

#[derive(Clone, Debug)]
pub struct SpectralClustering {
    pub assignment: ClusterAssignment,
    pub eigenvalues: Vec<f64>,
    pub eigengap_k: usize,
    pub k: usize,
    pub wcss: f64,
}

/// Full pipeline on a probability matrix. `k = None` uses the eigengap
/// estimate.
pub fn spectral_cluster(c: &Matrix, k: Option<usize>, rng: &mut Rng) -> Result<SpectralClustering> {
    let a = build_similarity(c)?;
    let (l, kept, unclustered) = normalized_affinity(&a)?;
    let eig = eigendecompose_symmetric(&l)?;
    let eigengap_k = estimate_k_eigengap(&eig.values);
    let k = k.unwrap_or(eigengap_k);
    let embedding = embed_from(&eig, k, kept, unclustered)?;
    let km = kmeans(&embedding.points, k, rng)?;
    let mut labels = vec![None; c.rows()];
    for (row, &i) in embedding.kept.iter().enumerate() {
        labels[i] = Some(km.labels[row]);
    }
    Ok(SpectralClustering {
        assignment: ClusterAssignment::from_labels(labels),
        eigenvalues: embedding.eigenvalues,
        eigengap_k,
        k,
        wcss: km.wcss,
    })
}

/// A connected set of states under the `A >= alpha` relation.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub members: Vec<usize>,
    /// Fraction of member pairs meeting the threshold; `None` for a single
    /// state. `Some(1.0)` means fully interconnected.
    pub density: Option<f64>,
}

impl Component {
    pub fn is_fully_connected(&self) -> bool {
        self.density == Some(1.0)
    }
}

/// Connected components of `{(i, j) : A(i,j) >= alpha, A(i,j) > 0}`, ordered
/// by smallest member.
pub fn extract_objects_by_threshold(c: &Matrix, alpha: f64) -> Result<Vec<Component>> {
    let a = build_similarity(c)?;
    let n = a.rows();
    let edge = |i: usize, j: usize| a[(i, j)] >= alpha && a[(i, j)] > 0.0;
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[start] = id;
        let mut stack = vec![start];
        let mut members = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if j != i && comp[j] == usize::MAX && edge(i, j) {
                    comp[j] = id;
                    stack.push(j);
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        let density = (members.len() > 1).then(|| {
            let m = members.len();
            let mut hits = 0usize;
            for (x, &i) in members.iter().enumerate() {
                for &j in &members[x + 1..] {
                    hits += usize::from(edge(i, j));
                }
            }
            hits as f64 / (m * (m - 1) / 2) as f64
        });
        out.push(Component { members, density });
    }
    Ok(out)
}

/// Rows and columns of `c` regrouped by cluster, unclustered states last.
pub fn reorder(c: &Matrix, assignment: &ClusterAssignment) -> Matrix {
    c.permuted(&assignment.order())
}

#[cfg(test)]
mod tests;
