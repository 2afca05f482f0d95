//! The transition store.
//!
//! Every ordered pair of distinct catalog states `(i, j)` carries exactly one
//! motor delta, fixed by the first scene, so records are keyed by `(i, j)`
//! and the probability of a transition is `valid_scenes / explored_scenes`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::agent::{MotorConfig, SensoryState};
use crate::error::{Error, Result};
use crate::grid::Coord;
use crate::matrix::Matrix;

/// Unique salient states of the first scene, frozen after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateCatalog {
    states: Vec<SensoryState>,
    origins: Vec<MotorConfig>,
    index: HashMap<SensoryState, usize>,
}

impl StateCatalog {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &SensoryState {
        &self.states[i]
    }

    pub fn states(&self) -> &[SensoryState] {
        &self.states
    }

    /// First-scene motor position of state `i`. Evaluation only.
    pub fn origin(&self, i: usize) -> MotorConfig {
        self.origins[i]
    }

    pub fn origins(&self) -> &[MotorConfig] {
        &self.origins
    }

    pub fn lookup(&self, s: &[u8]) -> Option<usize> {
        self.index.get(s).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransitionRecord {
    pub from: u32,
    pub to: u32,
    pub dm: Coord,
    pub valid_scenes: u32,
    pub explored_scenes: u32,
}

impl TransitionRecord {
    pub fn probability(&self) -> f64 {
        f64::from(self.valid_scenes) / f64::from(self.explored_scenes)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CatalogReport {
    pub salient_readings: usize,
    pub unique_states: usize,
    /// Readings dropped because their value tuple occurred more than once.
    pub dropped_duplicates: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Memory {
    catalog: StateCatalog,
    records: Vec<TransitionRecord>,
    report: CatalogReport,
}

/// Position of record `(i, j)` in the `i`-major, `j`-ascending layout.
#[inline]
pub fn record_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < n && j < n);
    i * (n - 1) + if j < i { j } else { j - 1 }
}

/// Builds the catalog and one record per ordered pair of distinct states.
/// Value tuples seen at more than one position are dropped entirely.
pub fn build_catalog(salient: &[(MotorConfig, SensoryState)]) -> Result<Memory> {
    if salient.is_empty() {
        return Err(Error::NothingToLearn);
    }
    let mut counts: HashMap<&SensoryState, usize> = HashMap::new();
    for (_, s) in salient {
        *counts.entry(s).or_default() += 1;
    }
    let mut states = Vec::new();
    let mut origins = Vec::new();
    let mut dropped = 0;
    for (m, s) in salient {
        if counts[s] == 1 {
            states.push(s.clone());
            origins.push(*m);
        } else {
            dropped += 1;
        }
    }
    if states.is_empty() {
        return Err(Error::NothingToLearn);
    }
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let n = states.len();
    let mut records = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            records.push(TransitionRecord {
                from: i as u32,
                to: j as u32,
                dm: origins[j] - origins[i],
                valid_scenes: 1,
                explored_scenes: 1,
            });
        }
    }
    Ok(Memory {
        report: CatalogReport {
            salient_readings: salient.len(),
            unique_states: n,
            dropped_duplicates: dropped,
        },
        catalog: StateCatalog {
            states,
            origins,
            index,
        },
        records,
    })
}

/// Antisymmetric matrix of motor deltas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotorMatrix {
    n: usize,
    deltas: Vec<Coord>,
}

impl MotorMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Coord {
        self.deltas[i * self.n + j]
    }
}

impl Memory {
    pub fn catalog(&self) -> &StateCatalog {
        &self.catalog
    }

    pub fn records(&self) -> &[TransitionRecord] {
        &self.records
    }

    pub fn report(&self) -> CatalogReport {
        self.report
    }

    pub fn record(&self, i: usize, j: usize) -> &TransitionRecord {
        &self.records[record_index(self.catalog.len(), i, j)]
    }

    /// One scene's worth of evidence, one verdict per record in record order.
    pub fn reinforce(&mut self, verdicts: &[bool]) -> Result<()> {
        if verdicts.len() != self.records.len() {
            return Err(Error::VerdictCount {
                expected: self.records.len(),
                actual: verdicts.len(),
            });
        }
        for (rec, &ok) in self.records.iter_mut().zip(verdicts) {
            rec.explored_scenes += 1;
            rec.valid_scenes += u32::from(ok);
        }
        Ok(())
    }

    /// Probability matrix `C` (unit diagonal) and motor matrix `T`.
    pub fn reduce(&self) -> (Matrix, MotorMatrix) {
        (self.probabilities(), self.motor_matrix())
    }

    pub fn probabilities(&self) -> Matrix {
        let n = self.catalog.len();
        let mut c = Matrix::identity(n);
        for r in &self.records {
            c[(r.from as usize, r.to as usize)] = r.probability();
        }
        c
    }

    pub fn motor_matrix(&self) -> MotorMatrix {
        let n = self.catalog.len();
        let mut deltas = vec![Coord::ZERO; n * n];
        for r in &self.records {
            deltas[r.from as usize * n + r.to as usize] = r.dm;
        }
        MotorMatrix { n, deltas }
    }
}

/// Line-oriented record dump: a header line, then
/// `i j dm... valid explored` per record.
pub fn format_records(records: &[TransitionRecord], dims: u8) -> String {
    let mut out = String::with_capacity(records.len() * 20);
    let _ = writeln!(out, "# records dims={dims} count={}", records.len());
    for r in records {
        let _ = write!(out, "{} {} ", r.from, r.to);
        if dims == 2 {
            let _ = write!(out, "{} ", r.dm.row);
        }
        let _ = writeln!(out, "{} {} {}", r.dm.col, r.valid_scenes, r.explored_scenes);
    }
    out
}

pub fn parse_records(text: &str) -> Result<Vec<TransitionRecord>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty record file"))?;
    let mut dims = None;
    let mut count = None;
    for tok in header.trim_start_matches('#').split_whitespace() {
        if let Some(v) = tok.strip_prefix("dims=") {
            dims = v.parse::<u8>().ok();
        } else if let Some(v) = tok.strip_prefix("count=") {
            count = v.parse::<usize>().ok();
        }
    }
    let (Some(dims @ (1 | 2)), Some(count)) = (dims, count) else {
        return Err(Error::parse(1, "expected `# records dims=<1|2> count=<n>`"));
    };
    let width = 4 + dims as usize;
    let mut out = Vec::with_capacity(count);
    for (n, line) in lines {
        let line_no = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
        if fields.len() != width {
            return Err(Error::parse(
                line_no,
                format!("expected {width} fields, got {}", fields.len()),
            ));
        }
        let narrow = |v: i64| -> Result<u32> {
            u32::try_from(v).map_err(|_| Error::parse(line_no, format!("{v} is not a count")))
        };
        let dm = if dims == 2 {
            Coord::new(fields[2] as i32, fields[3] as i32)
        } else {
            Coord::new(0, fields[2] as i32)
        };
        out.push(TransitionRecord {
            from: narrow(fields[0])?,
            to: narrow(fields[1])?,
            dm,
            valid_scenes: narrow(fields[width - 2])?,
            explored_scenes: narrow(fields[width - 1])?,
        });
    }
    if out.len() != count {
        return Err(Error::parse(
            text.lines().count(),
            format!("header promises {count} records, found {}", out.len()),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn st(v: &[u8]) -> SensoryState {
        SensoryState::new(v.to_vec())
    }

    fn salient(n: usize) -> Vec<(MotorConfig, SensoryState)> {
        (0..n)
            .map(|k| (Coord::new(0, 3 * k as i32), st(&[1, 2 + (k % 200) as u8, (k / 200) as u8])))
            .collect()
    }

    #[test]
    fn all_ones_after_first_scene() {
        let mem = build_catalog(&salient(27)).unwrap();
        assert_eq!(mem.catalog().len(), 27);
        assert_eq!(mem.records().len(), 702);
        let (c, t) = mem.reduce();
        assert!(c.as_slice().iter().all(|&p| p == 1.0));
        for i in 0..27 {
            assert_eq!(t.get(i, i), Coord::ZERO);
            for j in 0..27 {
                assert_eq!(t.get(i, j), -t.get(j, i));
            }
        }
    }

    #[test]
    fn single_state_has_no_records() {
        let mem = build_catalog(&salient(1)).unwrap();
        assert!(mem.records().is_empty());
        assert_eq!(mem.probabilities(), Matrix::identity(1));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(build_catalog(&[]), Err(Error::NothingToLearn)));
    }

    #[test]
    fn duplicates_are_dropped_entirely() {
        let mut s = salient(5);
        s[3].1 = s[1].1.clone();
        let mem = build_catalog(&s).unwrap();
        assert_eq!(mem.catalog().len(), 3);
        assert_eq!(mem.report().dropped_duplicates, 2);
        assert_eq!(mem.catalog().origins(), &[Coord::new(0, 0), Coord::new(0, 6), Coord::new(0, 12)]);
        assert_eq!(mem.catalog().lookup(s[4].1.values()), Some(2));
        assert_eq!(mem.catalog().lookup(s[1].1.values()), None);
    }

    #[test]
    fn reinforcement_counts() {
        let mut mem = build_catalog(&salient(3)).unwrap();
        let n = mem.records().len();
        // record 0 valid in 3 of 4 scenes (scene 1 counts), record 1 never again
        mem.reinforce(&[vec![true], vec![false; n - 1]].concat()).unwrap();
        mem.reinforce(&[vec![true], vec![false; n - 1]].concat()).unwrap();
        mem.reinforce(&vec![false; n]).unwrap();
        assert_eq!(mem.records()[0].probability(), 0.75);
        assert_eq!(mem.records()[1].probability(), 0.25);
        assert!(mem.reinforce(&[true]).is_err());
    }

    #[test]
    fn never_revalidated_after_351_scenes() {
        let mut mem = build_catalog(&salient(2)).unwrap();
        for _ in 0..350 {
            mem.reinforce(&[true, false]).unwrap();
        }
        assert_eq!(mem.record(0, 1).probability(), 1.0);
        assert_eq!(mem.record(1, 0).probability(), 1.0 / 351.0);
        assert!((mem.record(1, 0).probability() - 0.00285).abs() < 1e-5);
    }

    #[test]
    fn motor_rows_differ_by_constant() {
        let mem = build_catalog(&salient(6)).unwrap();
        let t = mem.motor_matrix();
        for i in 0..6 {
            for j in 0..6 {
                let shift = mem.catalog().origin(j) - mem.catalog().origin(i);
                for col in 0..6 {
                    assert_eq!(t.get(i, col) - t.get(j, col), shift);
                }
            }
        }
    }

    #[test]
    fn record_text_round_trip() {
        let mut mem = build_catalog(&salient(4)).unwrap();
        mem.reinforce(&(0..12).map(|k| k % 3 == 0).collect::<Vec<_>>()).unwrap();
        let text = format_records(mem.records(), 1);
        assert_eq!(parse_records(&text).unwrap(), mem.records());
        let truncated: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(parse_records(&truncated).is_err());
        assert!(matches!(
            parse_records("# records dims=1 count=1\n0 1 x 1 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    proptest! {
        #[test]
        fn counters_match_recount(log in prop::collection::vec(prop::collection::vec(any::<bool>(), 12), 0..40)) {
            let mut mem = build_catalog(&salient(4)).unwrap();
            for scene in &log {
                mem.reinforce(scene).unwrap();
            }
            for (k, rec) in mem.records().iter().enumerate() {
                let valid = 1 + log.iter().filter(|s| s[k]).count() as u32;
                prop_assert_eq!(rec.valid_scenes, valid);
                prop_assert_eq!(rec.explored_scenes, 1 + log.len() as u32);
                prop_assert!(rec.valid_scenes <= rec.explored_scenes);
            }
        }

        #[test]
        fn motor_deltas_compose(cols in prop::collection::btree_set(0i32..500, 2..12)) {
            let s: Vec<_> = cols.iter().enumerate()
                .map(|(k, &c)| (Coord::new(c % 7, c), st(&[k as u8, 1, 2])))
                .collect();
            let mem = build_catalog(&s).unwrap();
            let t = mem.motor_matrix();
            let n = t.size();
            for i in 0..n { for j in 0..n { for k in 0..n {
                prop_assert_eq!(t.get(i, j) + t.get(j, k), t.get(i, k));
            }}}
        }
    }
}
