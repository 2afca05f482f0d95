//! Experiment runners: one call from a resolved configuration to the full
//! set of artifacts, plus the on-disk layout of a run directory.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::eval::{evaluate_purity, label_states, GroundTruthLabel, PurityReport};
use crate::explore::{event_log_header, format_event, replay, run_experiment, ExperimentOptions, ExperimentOutcome, Replay, SceneEvent};
use crate::matrix::Matrix;
use crate::memory::{format_records, parse_records, MotorMatrix};
use crate::output;
use crate::rng::Streams;
use crate::spectral::{build_similarity, extract_objects_by_threshold, reorder, spectral_cluster, Component, SpectralClustering};

#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub config: ExperimentConfig,
    pub outcome: ExperimentOutcome,
    pub c: Matrix,
    pub t: MotorMatrix,
    pub clustering: SpectralClustering,
    pub components: Vec<Component>,
    pub labels: Vec<GroundTruthLabel>,
    pub purity: PurityReport,
}

impl RunArtifacts {
    pub fn reordered(&self) -> Matrix {
        reorder(&self.c, &self.clustering.assignment)
    }
}

/// Command-line overrides on top of a preset.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub changes: Option<usize>,
    pub env_change_prob: Option<f64>,
    pub k: Option<Option<usize>>,
    pub alpha: Option<f64>,
    pub snapshots: Option<Vec<usize>>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        if let Some(s) = self.seed {
            cfg.world.seed = s;
        }
        if let Some(n) = self.changes {
            cfg.n_changes = n;
        }
        if let Some(p) = self.env_change_prob {
            cfg.world.env_change_prob = p;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(s) = &self.snapshots {
            cfg.snapshots = s.clone();
        }
        if let Some(o) = &self.out {
            cfg.output_dir = Some(o.clone());
        }
        cfg
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunArtifacts> {
    run_with_events(config, |_| {})
}

/// Runs the experiment and the whole analysis; `on_event` sees each
/// verified scene as it happens.
pub fn run_with_events(config: &ExperimentConfig, on_event: impl FnMut(&SceneEvent<'_>)) -> Result<RunArtifacts> {
    config.validate()?;
    let mut streams = Streams::new(config.world.seed);
    let options = ExperimentOptions {
        n_changes: config.n_changes,
        snapshots: config.snapshots.clone(),
        coverage: config.coverage,
    };
    let outcome = run_experiment(&config.world, &config.sensor, &options, &mut streams, on_event)?;
    let (c, t) = outcome.memory.reduce();
    let clustering = spectral_cluster(&c, config.k, &mut streams.clustering)?;
    let components = extract_objects_by_threshold(&c, config.alpha)?;
    let labels = label_states(&outcome.initial_scene, &config.sensor, outcome.memory.catalog());
    let purity = evaluate_purity(&clustering.assignment, &labels);
    Ok(RunArtifacts {
        config: config.clone(),
        outcome,
        c,
        t,
        clustering,
        components,
        labels,
        purity,
    })
}

pub fn run_sim1(overrides: &Overrides, changing_env: bool) -> Result<RunArtifacts> {
    let seed = overrides.seed.unwrap_or(0);
    let base = if changing_env {
        ExperimentConfig::sim1_changing_env(seed)
    } else {
        ExperimentConfig::sim1(seed)
    };
    execute(&overrides.apply(base))
}

pub fn run_sim2(overrides: &Overrides) -> Result<RunArtifacts> {
    execute(&overrides.apply(ExperimentConfig::sim2(overrides.seed.unwrap_or(0))))
}

/// Runs `config`, writing every output file when it names an output
/// directory.
pub fn execute(config: &ExperimentConfig) -> Result<RunArtifacts> {
    let Some(dir) = &config.output_dir else {
        return run(config);
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let log_path = dir.join("events.log");
    let file = fs::File::create(&log_path).map_err(|e| Error::io(&log_path, e))?;
    let mut log = BufWriter::new(file);
    let mut io_error = None;
    let mut header_written = false;
    let artifacts = run_with_events(config, |event| {
        if io_error.is_some() {
            return;
        }
        let mut text = String::new();
        if !header_written {
            header_written = true;
            text = event_log_header(event.memory, config.n_changes);
        }
        text.push_str(&format_event(event));
        if let Err(e) = log.write_all(text.as_bytes()) {
            io_error = Some(e);
        }
    })?;
    if !header_written {
        let header = event_log_header(&artifacts.outcome.memory, config.n_changes);
        log.write_all(header.as_bytes()).map_err(|e| Error::io(&log_path, e))?;
    }
    if let Some(e) = io_error {
        return Err(Error::io(&log_path, e));
    }
    log.flush().map_err(|e| Error::io(&log_path, e))?;
    write_outputs(dir, &artifacts)?;
    Ok(artifacts)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

/// Everything except `events.log`, which is streamed during the run.
pub fn write_outputs(dir: &Path, a: &RunArtifacts) -> Result<()> {
    let dims = a.config.world.dims;
    let alphabet = a.config.world.alphabet;
    let reordered = a.reordered();
    write_file(dir, "config.txt", &a.config.to_text(false))?;
    write_file(dir, "c_matrix.csv", &output::matrix_csv(&a.c))?;
    write_file(dir, "t_matrix.csv", &output::motor_matrix_csv(&a.t, dims))?;
    write_file(dir, "c_reordered.csv", &output::matrix_csv(&reordered))?;
    write_file(dir, "heatmap_c.ppm", &output::heatmap_ppm(&a.c))?;
    write_file(dir, "heatmap_reordered.ppm", &output::heatmap_ppm(&reordered))?;
    write_file(dir, "clusters.txt", &cluster_report(a))?;
    write_file(dir, "purity.txt", &purity_report(a))?;
    write_file(dir, "records.txt", &format_records(a.outcome.memory.records(), dims))?;
    let scene = &a.outcome.initial_scene;
    write_file(dir, "scene_initial.csv", &output::grid_csv(scene.composed(), scene.extent()))?;
    write_file(dir, "scene_initial.ppm", &output::scene_ppm(scene, alphabet))?;
    write_file(dir, "saliency.csv", &output::saliency_csv(&a.outcome.first_salient, &a.config.sensor, dims))?;
    write_file(
        dir,
        "saliency.ppm",
        &output::saliency_ppm(scene, &a.outcome.first_salient, &a.config.sensor, alphabet),
    )?;
    for (index, c) in &a.outcome.snapshots {
        write_file(dir, &format!("snapshot_{index}.csv"), &output::matrix_csv(c))?;
    }
    Ok(())
}

fn id_list(ids: &[usize]) -> String {
    if ids.is_empty() {
        return "-".into();
    }
    ids.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.6}"))
}

pub fn cluster_report(a: &RunArtifacts) -> String {
    let sim = build_similarity(&a.c).expect("C is square");
    let alpha = a.config.alpha;
    let report = a.outcome.memory.report();
    let mut s = String::new();
    let _ = writeln!(s, "# spectral clustering of C");
    let _ = writeln!(
        s,
        "catalog salient={} unique={} dropped_duplicates={}",
        report.salient_readings, report.unique_states, report.dropped_duplicates
    );
    let _ = writeln!(s, "scenes {} env_changes {}", a.config.n_changes + 1, a.outcome.env_changes);
    let source = if a.config.k.is_some() { "configured" } else { "eigengap" };
    let _ = writeln!(s, "k {} {source}", a.clustering.k);
    let _ = writeln!(s, "eigengap_estimate {}", a.clustering.eigengap_k);
    let top: Vec<String> = a.clustering.eigenvalues.iter().take(10).map(|v| format!("{v:.6}")).collect();
    let _ = writeln!(s, "top_eigenvalues {}", top.join(","));
    let _ = writeln!(s, "unclustered {}", id_list(&a.clustering.assignment.unclustered));
    for c in 0..a.clustering.assignment.k {
        let members = a.clustering.assignment.members(c);
        let (mut hits, mut sum, mut pairs) = (0usize, 0.0, 0usize);
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                pairs += 1;
                sum += sim[(i, j)];
                hits += usize::from(sim[(i, j)] >= alpha);
            }
        }
        let density = (pairs > 0).then(|| hits as f64 / pairs as f64);
        let mean = (pairs > 0).then(|| sum / pairs as f64);
        let _ = writeln!(
            s,
            "cluster {c} size {} intra_density {} mean_intra {} members {}",
            members.len(),
            fmt_opt(density),
            fmt_opt(mean),
            id_list(&members)
        );
    }
    let _ = writeln!(s, "# threshold extraction alpha={alpha}");
    for (n, comp) in a.components.iter().enumerate().filter(|(_, c)| c.members.len() > 1) {
        let _ = writeln!(
            s,
            "component {n} size {} density {} members {}",
            comp.members.len(),
            fmt_opt(comp.density),
            id_list(&comp.members)
        );
    }
    let singles = a.components.iter().filter(|c| c.members.len() == 1).count();
    let _ = writeln!(s, "singletons {singles}");
    s
}

pub fn purity_report(a: &RunArtifacts) -> String {
    let mut counts = std::collections::BTreeMap::new();
    for l in &a.labels {
        *counts.entry(*l).or_insert(0usize) += 1;
    }
    let mut s = String::new();
    let _ = writeln!(s, "# cluster purity over non-mixed states");
    let tally: Vec<String> = counts.iter().map(|(l, n)| format!("{l}={n}")).collect();
    let _ = writeln!(s, "labels {}", tally.join(" "));
    for c in &a.purity.clusters {
        let _ = writeln!(
            s,
            "cluster {} size {} scored {} majority {} purity {}",
            c.cluster,
            c.size,
            c.scored,
            c.majority.map_or_else(|| "-".into(), |m| m.to_string()),
            fmt_opt(c.purity)
        );
    }
    let _ = writeln!(s, "overall {}", fmt_opt(a.purity.overall));
    s
}

/// Replays `events.log` in `dir` and checks it against `records.txt`.
pub fn replay_dir(dir: &Path) -> Result<Replay> {
    let read = |name: &str| {
        let path = dir.join(name);
        fs::read_to_string(&path).map_err(|e| Error::io(path, e))
    };
    let rep = replay(&read("events.log")?)?;
    let records = parse_records(&read("records.txt")?)?;
    if records.len() != rep.counters.len() {
        return Err(Error::ReplayMismatch {
            record: records.len().min(rep.counters.len()),
            message: format!("{} records on disk, {} in the log", records.len(), rep.counters.len()),
        });
    }
    for (k, (r, &(v, e))) in records.iter().zip(&rep.counters).enumerate() {
        if (r.valid_scenes, r.explored_scenes) != (v, e) {
            return Err(Error::ReplayMismatch {
                record: k,
                message: format!("log gives {v}/{e}, records.txt holds {}/{}", r.valid_scenes, r.explored_scenes),
            });
        }
    }
    Ok(rep)
}
