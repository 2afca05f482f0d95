//! Ground truth from the designer's side. The agent never sees any of this;
//! it only scores what the agent learned.

use std::collections::BTreeMap;
use std::fmt;

use crate::agent::SensorSpec;
use crate::grid::Coord;
use crate::matrix::Matrix;
use crate::memory::StateCatalog;
use crate::spectral::ClusterAssignment;
use crate::world::Scene;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroundTruthLabel {
    /// Aperture entirely on object `n` in the first scene.
    Object(usize),
    /// Aperture entirely on the environment.
    Background,
    /// Anything else, e.g. straddling an object edge.
    Mixed,
}

impl fmt::Display for GroundTruthLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundTruthLabel::Object(n) => write!(f, "object{n}"),
            GroundTruthLabel::Background => f.write_str("background"),
            GroundTruthLabel::Mixed => f.write_str("mixed"),
        }
    }
}

/// Labels every catalog state by what lay under its aperture in `scene`.
pub fn label_states(scene: &Scene, sensor: &SensorSpec, catalog: &StateCatalog) -> Vec<GroundTruthLabel> {
    let ap = sensor.aperture();
    catalog
        .origins()
        .iter()
        .map(|&origin| {
            let mut owner: Option<Option<usize>> = None;
            let mut mixed = false;
            for r in 0..ap.rows as i32 {
                for c in 0..ap.cols as i32 {
                    let p = origin + Coord::new(r, c);
                    let top = scene
                        .objects()
                        .iter()
                        .enumerate()
                        .filter(|(_, o)| o.covers(p))
                        .max_by_key(|(_, o)| o.z)
                        .map(|(n, _)| n);
                    match owner {
                        None => owner = Some(top),
                        Some(prev) if prev != top => mixed = true,
                        _ => {}
                    }
                }
            }
            match (mixed, owner.flatten()) {
                (true, _) => GroundTruthLabel::Mixed,
                (false, Some(n)) => GroundTruthLabel::Object(n),
                (false, None) => GroundTruthLabel::Background,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterPurity {
    pub cluster: usize,
    pub size: usize,
    /// Members that are not MIXED.
    pub scored: usize,
    pub majority: Option<GroundTruthLabel>,
    pub majority_count: usize,
    pub purity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PurityReport {
    pub clusters: Vec<ClusterPurity>,
    /// Weighted by scored members; `None` when nothing could be scored.
    pub overall: Option<f64>,
}

pub fn evaluate_purity(assignment: &ClusterAssignment, labels: &[GroundTruthLabel]) -> PurityReport {
    assert_eq!(assignment.labels.len(), labels.len());
    let mut clusters = Vec::with_capacity(assignment.k);
    let (mut hits, mut scored_total) = (0usize, 0usize);
    for c in 0..assignment.k {
        let members = assignment.members(c);
        let mut counts: BTreeMap<GroundTruthLabel, usize> = BTreeMap::new();
        for &i in &members {
            if labels[i] != GroundTruthLabel::Mixed {
                *counts.entry(labels[i]).or_default() += 1;
            }
        }
        let scored: usize = counts.values().sum();
        // ties go to the smallest label
        let majority = counts
            .iter()
            .fold(None, |best: Option<(GroundTruthLabel, usize)>, (&l, &n)| match best {
                Some((_, m)) if m >= n => best,
                _ => Some((l, n)),
            });
        let majority_count = majority.map_or(0, |m| m.1);
        hits += majority_count;
        scored_total += scored;
        clusters.push(ClusterPurity {
            cluster: c,
            size: members.len(),
            scored,
            majority: majority.map(|m| m.0),
            majority_count,
            purity: (scored > 0).then(|| majority_count as f64 / scored as f64),
        });
    }
    PurityReport {
        clusters,
        overall: (scored_total > 0).then(|| hits as f64 / scored_total as f64),
    }
}

/// Entries `c[i][j]`, `i != j`, with `labels[i]` matching `from` and
/// `labels[j]` matching `to`.
pub fn block_entries(
    c: &Matrix,
    labels: &[GroundTruthLabel],
    from: impl Fn(GroundTruthLabel) -> bool,
    to: impl Fn(GroundTruthLabel) -> bool,
) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, &li) in labels.iter().enumerate() {
        if !from(li) {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if i != j && to(lj) {
                out.push(c[(i, j)]);
            }
        }
    }
    out
}

pub fn is_object(l: GroundTruthLabel) -> bool {
    matches!(l, GroundTruthLabel::Object(_))
}

pub fn is_background(l: GroundTruthLabel) -> bool {
    l == GroundTruthLabel::Background
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explore::explore_first_scene;
    use crate::grid::Extent;
    use crate::rng::stream;
    use crate::world::GridObject;
    use rand::seq::SliceRandom;
    use GroundTruthLabel::*;

    fn asg(labels: &[usize]) -> ClusterAssignment {
        ClusterAssignment::from_labels(labels.iter().map(|&l| Some(l)).collect())
    }

    #[test]
    fn perfect_assignment_is_pure() {
        let truth = vec![Object(0), Object(0), Background, Background, Object(1)];
        let r = evaluate_purity(&asg(&[0, 0, 1, 1, 2]), &truth);
        assert_eq!(r.overall, Some(1.0));
        assert_eq!(r.clusters[2].majority, Some(Object(1)));
    }

    #[test]
    fn one_stray_in_ten() {
        let mut truth = vec![Object(0); 9];
        truth.push(Background);
        let r = evaluate_purity(&asg(&[0; 10]), &truth);
        assert_eq!(r.clusters[0].purity, Some(0.9));
        assert_eq!(r.overall, Some(0.9));
    }

    #[test]
    fn mixed_states_are_not_scored() {
        let truth = vec![Object(0), Mixed, Mixed, Background];
        let r = evaluate_purity(&asg(&[0, 0, 1, 1]), &truth);
        assert_eq!(r.overall, Some(1.0));
        assert_eq!(r.clusters[0].scored, 1);
        assert_eq!(r.clusters[0].size, 2);
    }

    #[test]
    fn purity_ignores_label_names() {
        let truth = vec![Object(0), Object(0), Background, Object(1), Background];
        let a = evaluate_purity(&asg(&[0, 1, 1, 0, 1]), &truth);
        let b = evaluate_purity(&asg(&[1, 0, 0, 1, 0]), &truth);
        assert_eq!(a.overall, b.overall);
    }

    #[test]
    fn random_labels_on_two_balanced_classes() {
        // Monte-Carlo baseline: random cluster labels over two balanced
        // classes score close to one half.
        let mut rng = stream(17, 0);
        let n = 2000;
        let truth: Vec<_> = (0..n).map(|i| if i % 2 == 0 { Object(0) } else { Background }).collect();
        let mut total = 0.0;
        let trials = 50;
        for _ in 0..trials {
            let mut labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
            labels.shuffle(&mut rng);
            total += evaluate_purity(&asg(&labels), &truth).overall.unwrap();
        }
        let mean = total / trials as f64;
        assert!((mean - 0.5).abs() < 0.03, "mean purity {mean}");
    }

    #[test]
    fn labels_from_first_scene() {
        let obj = GridObject::new(vec![1, 9, 2, 8, 1], Extent::line(5), Coord::new(0, 6), 0);
        let env = vec![2, 8, 2, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 7, 2, 3];
        let scene = Scene::new(Extent::line(16), env, vec![obj]).unwrap();
        let sensor = SensorSpec::line3(0.4);
        let mem = explore_first_scene(&scene, &sensor).unwrap();
        let labels = label_states(&scene, &sensor, mem.catalog());
        let by_origin: Vec<_> = mem.catalog().origins().iter().map(|o| o.col).zip(labels).collect();
        // composed: 2 8 2 3 3 3 1 9 2 8 1 3 3 7 2 3
        assert_eq!(
            by_origin,
            vec![
                (0, Background),
                (2, Background),
                (4, Mixed),
                (6, Object(0)),
                (8, Object(0)),
                (10, Mixed),
                (12, Background),
            ]
        );
    }
}
