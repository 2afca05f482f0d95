use super::*;
use crate::rng::{stream, Rng};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng as _;

fn random_symmetric(n: usize, rng: &mut Rng) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = rng.random_range(-1.0..1.0);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

/// Union-find over positive entries; the reference partition for block
/// matrices.
fn components_oracle(a: &Matrix) -> Vec<usize> {
    let n = a.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)] > 0.0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

fn same_partition(a: &[usize], b: &[Option<usize>]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

/// Block-diagonal probability matrix with `sizes` blocks of constant values,
/// rows shuffled.
fn shuffled_blocks(sizes: &[usize], values: &[f64], rng: &mut Rng) -> (Matrix, Vec<usize>) {
    let n: usize = sizes.iter().sum();
    let mut block = Vec::with_capacity(n);
    for (b, &s) in sizes.iter().enumerate() {
        block.extend(std::iter::repeat_n(b, s));
    }
    block.shuffle(rng);
    let c = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else if block[i] == block[j] {
            values[block[i]]
        } else {
            0.0
        }
    });
    (c, block)
}

#[test]
fn two_by_two_textbook() {
    let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
    let eig = eigendecompose_symmetric(&a).unwrap();
    assert!((eig.values[0] - 3.0).abs() < 1e-12);
    assert!((eig.values[1] - 1.0).abs() < 1e-12);
}

#[test]
fn identity_has_unit_spectrum() {
    let eig = eigendecompose_symmetric(&Matrix::identity(5)).unwrap();
    assert!(eig.values.iter().all(|&v| v == 1.0));
    assert_eq!(eig.sweeps, 0);
}

#[test]
fn rejects_asymmetric_input() {
    let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
    assert!(matches!(eigendecompose_symmetric(&a), Err(Error::NotSymmetric { .. })));
    assert!(matches!(eigendecompose_symmetric(&Matrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
}

#[test]
fn random_30x30_self_check() {
    let mut rng = stream(30, 9);
    let a = random_symmetric(30, &mut rng);
    let eig = eigendecompose_symmetric(&a).unwrap();
    let v = &eig.vectors;
    let vtv = v.transpose().matmul(v);
    assert!(vtv.max_abs_diff(&Matrix::identity(30)) < 1e-9);
    assert!(eig.reconstruct().max_abs_diff(&a) < 1e-9);
    assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    // trace is preserved
    let trace: f64 = (0..30).map(|i| a[(i, i)]).sum();
    assert!((eig.values.iter().sum::<f64>() - trace).abs() < 1e-9);
}

#[test]
fn similarity_examples() {
    let c = Matrix::from_rows(&[vec![0.3, 1.0], vec![0.5, 0.7]]);
    let a = build_similarity(&c).unwrap();
    assert_eq!(a[(0, 1)], 0.75);
    assert_eq!(a[(1, 0)], 0.75);
    assert_eq!(a[(0, 0)], 0.0);
    assert_eq!(a[(1, 1)], 0.0);
    let sym = Matrix::from_rows(&[vec![1.0, 0.2, 0.4], vec![0.2, 1.0, 0.9], vec![0.4, 0.9, 1.0]]);
    let a = build_similarity(&sym).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(a[(i, j)], if i == j { 0.0 } else { sym[(i, j)] });
        }
    }
}

#[test]
fn ideal_two_blocks_embed_to_two_points() {
    let (c, block) = shuffled_blocks(&[4, 6], &[1.0, 1.0], &mut stream(0, 5));
    let a = build_similarity(&c).unwrap();
    let emb = spectral_embed(&a, 2).unwrap();
    for i in 0..10 {
        let norm: f64 = emb.points.row(i).iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        for j in 0..10 {
            let d: f64 = emb.points.row(i).iter().zip(emb.points.row(j)).map(|(x, y)| (x - y).powi(2)).sum();
            if block[i] == block[j] {
                assert!(d < 1e-12, "rows {i},{j} differ by {d}");
            } else {
                assert!(d > 1.0);
            }
        }
    }
    assert!(emb.eigenvalues.iter().all(|&l| (-1.0 - 1e-9..=1.0 + 1e-9).contains(&l)));
    assert!(spectral_embed(&a, 11).is_err());
}

#[test]
fn isolated_states_are_unclustered() {
    let mut c = Matrix::identity(4);
    c[(0, 1)] = 1.0;
    c[(1, 0)] = 1.0;
    c[(2, 3)] = 0.5;
    c[(3, 2)] = 0.5;
    let mut c5 = Matrix::identity(5);
    for i in 0..4 {
        for j in 0..4 {
            c5[(i, j)] = c[(i, j)];
        }
    }
    let r = spectral_cluster(&c5, Some(2), &mut stream(1, 2)).unwrap();
    assert_eq!(r.assignment.unclustered, vec![4]);
    assert_eq!(r.assignment.labels[4], None);
    assert_eq!(r.assignment.labels[0], r.assignment.labels[1]);
    assert_ne!(r.assignment.labels[0], r.assignment.labels[2]);
    assert_eq!(r.assignment.order(), vec![0, 1, 2, 3, 4]);
}

#[test]
fn eigengap_examples() {
    assert_eq!(estimate_k_eigengap(&[1.0, 0.99, 0.3, 0.2]), 2);
    assert_eq!(estimate_k_eigengap(&[0.5, 0.5, 0.5]), 1);
    assert_eq!(estimate_k_eigengap(&[0.7]), 1);
    assert_eq!(estimate_k_eigengap(&[]), 1);
}

#[test]
fn ideal_blocks_recovered_for_every_seed() {
    for (m, sizes) in [(2usize, vec![5, 8]), (3, vec![4, 7, 5]), (5, vec![3, 6, 4, 5, 2])] {
        let values = [1.0, 0.8, 0.9, 0.6, 0.95];
        for seed in 0..10 {
            let (c, _) = shuffled_blocks(&sizes, &values, &mut stream(seed, 7));
            let oracle = components_oracle(&build_similarity(&c).unwrap());
            let r = spectral_cluster(&c, None, &mut stream(seed, 2)).unwrap();
            assert_eq!(r.eigengap_k, m);
            assert!(same_partition(&oracle, &r.assignment.labels), "m={m} seed={seed}");
        }
    }
}

#[test]
fn threshold_extraction_examples() {
    let (c, block) = shuffled_blocks(&[3, 4], &[1.0, 0.95], &mut stream(2, 7));
    let comps = extract_objects_by_threshold(&c, 0.9).unwrap();
    assert_eq!(comps.len(), 2);
    for comp in &comps {
        assert!(comp.is_fully_connected());
        assert!(comp.members.iter().all(|&i| block[i] == block[comp.members[0]]));
    }
    let comps = extract_objects_by_threshold(&c, 0.97).unwrap();
    assert_eq!(comps.len(), 5); // the 0.95 block falls apart
    let all = extract_objects_by_threshold(&Matrix::filled(4, 4, 0.1), 0.0).unwrap();
    assert_eq!(all.len(), 1);
    assert_eq!(all[0].members, vec![0, 1, 2, 3]);
    // zero entries never count as edges, so fully disconnected states stay apart
    let none = extract_objects_by_threshold(&Matrix::identity(3), 0.0).unwrap();
    assert_eq!(none.len(), 3);
    assert!(none.iter().all(|c| c.density.is_none()));
}

#[test]
fn reorder_restores_block_form() {
    let (c, block) = shuffled_blocks(&[3, 5], &[1.0, 0.7], &mut stream(3, 7));
    let labels = block.iter().map(|&b| Some(b)).collect();
    let asg = ClusterAssignment::from_labels(labels);
    let r = reorder(&c, &asg);
    let first = asg.members(0).len();
    for i in 0..8 {
        for j in 0..8 {
            let same = (i < first) == (j < first);
            if i != j {
                assert_eq!(r[(i, j)] > 0.0, same, "({i},{j})");
            }
        }
    }
    let mut before = c.as_slice().to_vec();
    let mut after = r.as_slice().to_vec();
    before.sort_by(f64::total_cmp);
    after.sort_by(f64::total_cmp);
    assert_eq!(before, after);

    let identity = ClusterAssignment::from_labels((0..8).map(|_| Some(0)).collect());
    assert_eq!(reorder(&c, &identity), c);
}

#[test]
fn clustering_is_permutation_invariant() {
    let mut rng = stream(11, 7);
    let (c, _) = shuffled_blocks(&[6, 5, 7], &[0.9, 0.8, 0.7], &mut rng);
    let n = c.rows();
    // noise floor so the blocks are not exactly disconnected
    let c = Matrix::from_fn(n, n, |i, j| if c[(i, j)] == 0.0 { 0.05 } else { c[(i, j)] });
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let cp = c.permuted(&perm);
    let a = spectral_cluster(&c, Some(3), &mut stream(0, 2)).unwrap();
    let b = spectral_cluster(&cp, Some(3), &mut stream(5, 2)).unwrap();
    for x in 0..n {
        for y in 0..n {
            let same_a = a.assignment.labels[perm[x]] == a.assignment.labels[perm[y]];
            let same_b = b.assignment.labels[x] == b.assignment.labels[y];
            assert_eq!(same_a, same_b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn jacobi_self_check(n in 1usize..25, seed in any::<u64>()) {
        let a = random_symmetric(n, &mut stream(seed, 9));
        let eig = eigendecompose_symmetric(&a).unwrap();
        let v = &eig.vectors;
        prop_assert!(v.transpose().matmul(v).max_abs_diff(&Matrix::identity(n)) < 1e-9);
        prop_assert!(eig.reconstruct().max_abs_diff(&a) < 1e-9);
    }

    #[test]
    fn raising_alpha_never_merges(seed in any::<u64>(), lo in 0.0f64..1.0, hi in 0.0f64..1.0) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let mut rng = stream(seed, 8);
        let n = 12;
        let mut c = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    c[(i, j)] = (rng.random_range(0..=10) as f64) / 10.0;
                }
            }
        }
        let coarse = extract_objects_by_threshold(&c, lo).unwrap();
        let fine = extract_objects_by_threshold(&c, hi).unwrap();
        // every fine component sits inside one coarse component
        for f in &fine {
            prop_assert!(coarse.iter().any(|g| f.members.iter().all(|m| g.members.contains(m))));
        }
    }
}
