//! Exploration protocol: exhaustive exploration of the first scene, then,
//! after every scene change, active verification of each stored transition.

use std::fmt::Write as _;

use rand::Rng as _;

use crate::agent::{motor_range, reads_as, salient_positions, MotorConfig, SensorSpec, SensoryState};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::memory::{build_catalog, record_index, Memory};
use crate::rng::{Rng, Streams};
use crate::world::{generate_initial_scene, Scene, WorldSpec};

pub fn explore_first_scene(scene: &Scene, sensor: &SensorSpec) -> Result<Memory> {
    build_catalog(&salient_positions(scene, sensor))
}

/// Positions in `scene` where each catalog state is currently read as a
/// salient input.
fn occurrences(
    salient: &[(MotorConfig, SensoryState)],
    memory: &Memory,
) -> Vec<Vec<MotorConfig>> {
    let mut occ = vec![Vec::new(); memory.catalog().len()];
    for (m, s) in salient {
        if let Some(i) = memory.catalog().lookup(s.values()) {
            occ[i].push(*m);
        }
    }
    occ
}

/// One verdict per record, in record order. A transition `(i, j, dm)` is
/// valid when some salient occurrence `p` of `s_i` has `p + dm` inside the
/// motor range and reading `s_j` there.
pub fn verify_scene(scene: &Scene, sensor: &SensorSpec, memory: &Memory) -> Vec<bool> {
    verify_salient(scene, sensor, memory, &salient_positions(scene, sensor))
}

/// Like [`verify_scene`] but each salient position is visited only with
/// probability `coverage`; unvisited positions cannot witness a transition.
pub fn verify_scene_partial(
    scene: &Scene,
    sensor: &SensorSpec,
    memory: &Memory,
    coverage: f64,
    rng: &mut Rng,
) -> Vec<bool> {
    let mut salient = salient_positions(scene, sensor);
    if coverage < 1.0 {
        salient.retain(|_| rng.random::<f64>() < coverage);
    }
    verify_salient(scene, sensor, memory, &salient)
}

fn verify_salient(
    scene: &Scene,
    sensor: &SensorSpec,
    memory: &Memory,
    salient: &[(MotorConfig, SensoryState)],
) -> Vec<bool> {
    let Ok(range) = motor_range(scene.extent(), sensor) else {
        return vec![false; memory.records().len()];
    };
    let aperture = sensor.aperture();
    let occ = occurrences(salient, memory);
    let catalog = memory.catalog();
    memory
        .records()
        .iter()
        .map(|rec| {
            let target = catalog.state(rec.to as usize).values();
            occ[rec.from as usize].iter().any(|&p| {
                let q = p + rec.dm;
                range.contains(q) && reads_as(scene, q, aperture, target)
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOptions {
    pub n_changes: usize,
    /// Scene indices after which `C` is recorded; 0 is the first scene.
    pub snapshots: Vec<usize>,
    /// Fraction of salient positions visited per scene; 1 is complete
    /// exploration.
    pub coverage: f64,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            n_changes: 350,
            snapshots: Vec::new(),
            coverage: 1.0,
        }
    }
}

/// What happened in one explored scene after a change.
#[derive(Debug)]
pub struct SceneEvent<'a> {
    pub index: usize,
    pub env_changed: bool,
    pub scene: &'a Scene,
    pub verdicts: &'a [bool],
    /// Memory after this scene's reinforcement.
    pub memory: &'a Memory,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub initial_scene: Scene,
    pub final_scene: Scene,
    pub first_salient: Vec<(MotorConfig, SensoryState)>,
    pub memory: Memory,
    pub snapshots: Vec<(usize, Matrix)>,
    pub env_changes: usize,
}

/// Full run: first scene, then `n_changes` cycles of
/// mutate / verify / reinforce. `on_event` sees every verified scene.
pub fn run_experiment(
    world: &WorldSpec,
    sensor: &SensorSpec,
    options: &ExperimentOptions,
    streams: &mut Streams,
    mut on_event: impl FnMut(&SceneEvent<'_>),
) -> Result<ExperimentOutcome> {
    if !(0.0..=1.0).contains(&options.coverage) {
        return Err(Error::InvalidSensor(format!(
            "coverage {} is outside [0, 1]",
            options.coverage
        )));
    }
    let initial_scene = generate_initial_scene(world, streams)?;
    motor_range(initial_scene.extent(), sensor)?;
    let first_salient = salient_positions(&initial_scene, sensor);
    let mut memory = build_catalog(&first_salient)?;

    let mut snapshots = Vec::new();
    if options.snapshots.contains(&0) {
        snapshots.push((0, memory.probabilities()));
    }
    let mut scene = initial_scene.clone();
    let mut env_changes = 0;
    for index in 1..=options.n_changes {
        let env_changed = scene.mutate(world, streams);
        env_changes += usize::from(env_changed);
        let verdicts = verify_scene_partial(&scene, sensor, &memory, options.coverage, &mut streams.coverage);
        memory.reinforce(&verdicts)?;
        on_event(&SceneEvent {
            index,
            env_changed,
            scene: &scene,
            verdicts: &verdicts,
            memory: &memory,
        });
        if options.snapshots.contains(&index) {
            snapshots.push((index, memory.probabilities()));
        }
    }
    Ok(ExperimentOutcome {
        initial_scene,
        final_scene: scene,
        first_salient,
        memory,
        snapshots,
        env_changes,
    })
}

// Event log: one header line, then one line per verified scene.
//
//   # events catalog=<n> records=<m> changes=<k>
//   scene <index> env_changed=<0|1> objects=<row>:<col>:<z>,... verdicts=<hex>
//
// Verdicts are packed four per hex digit, record 4t in the high bit of
// digit t, zero-padded at the end.

pub fn event_log_header(memory: &Memory, n_changes: usize) -> String {
    format!(
        "# events catalog={} records={} changes={}\n",
        memory.catalog().len(),
        memory.records().len(),
        n_changes
    )
}

pub fn format_event(event: &SceneEvent<'_>) -> String {
    let mut line = String::with_capacity(64 + event.verdicts.len() / 4);
    let _ = write!(
        line,
        "scene {} env_changed={} objects=",
        event.index,
        u8::from(event.env_changed)
    );
    for (n, obj) in event.scene.objects().iter().enumerate() {
        if n > 0 {
            line.push(',');
        }
        let _ = write!(line, "{}:{}:{}", obj.position.row, obj.position.col, obj.z);
    }
    line.push_str(" verdicts=");
    line.push_str(&encode_verdicts(event.verdicts));
    line.push('\n');
    line
}

pub fn encode_verdicts(verdicts: &[bool]) -> String {
    const HEX: &[u8; 16] = b"0123456789abcdef";
    verdicts
        .chunks(4)
        .map(|chunk| {
            let nibble = chunk
                .iter()
                .enumerate()
                .fold(0usize, |acc, (b, &v)| acc | (usize::from(v) << (3 - b)));
            HEX[nibble] as char
        })
        .collect()
}

pub fn decode_verdicts(hex: &str, count: usize) -> std::result::Result<Vec<bool>, String> {
    if hex.len() != count.div_ceil(4) {
        return Err(format!(
            "expected {} hex digits for {count} verdicts, got {}",
            count.div_ceil(4),
            hex.len()
        ));
    }
    let mut out = Vec::with_capacity(count);
    for ch in hex.chars() {
        let nibble = ch.to_digit(16).ok_or_else(|| format!("bad hex digit {ch:?}"))?;
        for b in 0..4 {
            if out.len() < count {
                out.push(nibble & (1 << (3 - b)) != 0);
            }
        }
    }
    Ok(out)
}

/// Counters rebuilt from an event log.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    pub catalog_size: usize,
    pub scenes: usize,
    /// `(valid_scenes, explored_scenes)` per record.
    pub counters: Vec<(u32, u32)>,
}

impl Replay {
    pub fn probabilities(&self) -> Matrix {
        let n = self.catalog_size;
        let mut c = Matrix::identity(n);
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let (v, e) = self.counters[record_index(n, i, j)];
                c[(i, j)] = f64::from(v) / f64::from(e);
            }
        }
        c
    }

    /// Fails at the first record whose counters differ from `memory`.
    pub fn check(&self, memory: &Memory) -> Result<()> {
        if self.counters.len() != memory.records().len() {
            return Err(Error::ReplayMismatch {
                record: self.counters.len().min(memory.records().len()),
                message: format!(
                    "log has {} records, memory has {}",
                    self.counters.len(),
                    memory.records().len()
                ),
            });
        }
        for (k, (rec, &(v, e))) in memory.records().iter().zip(&self.counters).enumerate() {
            if (rec.valid_scenes, rec.explored_scenes) != (v, e) {
                return Err(Error::ReplayMismatch {
                    record: k,
                    message: format!(
                        "log gives {v}/{e}, memory holds {}/{}",
                        rec.valid_scenes, rec.explored_scenes
                    ),
                });
            }
        }
        Ok(())
    }
}

pub fn replay(log: &str) -> Result<Replay> {
    let mut lines = log.lines().enumerate().map(|(n, l)| (n + 1, l));
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty event log"))?;
    let field = |name: &str| -> Result<usize> {
        header
            .split_whitespace()
            .find_map(|t| t.strip_prefix(name).and_then(|v| v.strip_prefix('=')))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::parse(1, format!("header lacks `{name}=<n>`")))
    };
    if !header.starts_with("# events") {
        return Err(Error::parse(1, "expected `# events` header"));
    }
    let catalog_size = field("catalog")?;
    let records = field("records")?;
    let changes = field("changes")?;
    if records != catalog_size * catalog_size.saturating_sub(1) {
        return Err(Error::parse(1, format!("{records} records do not fit a catalog of {catalog_size}")));
    }
    let mut counters = vec![(1u32, 1u32); records];
    let mut last_line = 1;
    let mut seen = 0;
    for (line_no, line) in lines {
        last_line = line_no;
        if line.trim().is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        if toks.next() != Some("scene") {
            return Err(Error::parse(line_no, "expected `scene` record"));
        }
        let index: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(line_no, "missing scene index"))?;
        if index != seen + 1 {
            return Err(Error::parse(line_no, format!("expected scene {}, found {index}", seen + 1)));
        }
        let hex = toks
            .find_map(|t| t.strip_prefix("verdicts="))
            .ok_or_else(|| Error::parse(line_no, "missing verdicts"))?;
        let verdicts = decode_verdicts(hex, records).map_err(|m| Error::parse(line_no, m))?;
        for (c, ok) in counters.iter_mut().zip(verdicts) {
            c.1 += 1;
            c.0 += u32::from(ok);
        }
        seen = index;
    }
    if seen != changes {
        return Err(Error::parse(
            last_line + 1,
            format!("log ends after scene {seen}; scene {} is missing", seen + 1),
        ));
    }
    Ok(Replay {
        catalog_size,
        scenes: seen,
        counters,
    })
}
