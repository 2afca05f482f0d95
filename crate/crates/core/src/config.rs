//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # comment
//! dims = 2
//! world = 50x50            # 1D worlds give a length: world = 150
//! alphabet = 10
//! objects = 20x20,20x20,20x20
//! env_change_prob = 0.05
//! seed = 0
//! aperture = 3x3
//! kernel = -0.0625,-0.1875,-0.0625,-0.1875,1,-0.1875,-0.0625,-0.1875,-0.0625
//! threshold = 0.4
//! changes = 350
//! k = 4                    # or `auto` for the eigengap estimate
//! alpha = 0.9
//! snapshots = 0,5,350
//! coverage = 1
//! output_dir = runs/sim2   # optional
//! ```
//!
//! Unknown keys are rejected. Missing keys fall back to the Simulation 1
//! defaults, except `kernel` which must match the aperture.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::agent::SensorSpec;
use crate::error::{Error, Result};
use crate::grid::Extent;
use crate::world::{ObjectSpec, WorldSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub world: WorldSpec,
    pub sensor: SensorSpec,
    pub n_changes: usize,
    /// `None` selects the eigengap estimate.
    pub k: Option<usize>,
    pub alpha: f64,
    pub snapshots: Vec<usize>,
    pub coverage: f64,
    pub output_dir: Option<PathBuf>,
}

pub const DEFAULT_ALPHA: f64 = 0.9;
pub const DEFAULT_CHANGES: usize = 350;
pub const DEFAULT_THRESHOLD: f64 = 0.4;

impl ExperimentConfig {
    /// 150-cell line, values 1..=10, one 40-cell object, 3-cell sensor,
    /// static environment, 350 changes, k = 2.
    pub fn sim1(seed: u64) -> Self {
        ExperimentConfig {
            world: WorldSpec::line(150, 10, &[40], 0.0, seed),
            sensor: SensorSpec::line3(DEFAULT_THRESHOLD),
            n_changes: DEFAULT_CHANGES,
            k: Some(2),
            alpha: DEFAULT_ALPHA,
            snapshots: Vec::new(),
            coverage: 1.0,
            output_dir: None,
        }
    }

    /// Simulation 1 with a 5% chance of a new environment per scene.
    pub fn sim1_changing_env(seed: u64) -> Self {
        let mut c = Self::sim1(seed);
        c.world.env_change_prob = 0.05;
        c
    }

    /// 50x50 grid, three 20x20 objects, 3x3 sensor, 5% environment change,
    /// 350 changes, k = 4.
    pub fn sim2(seed: u64) -> Self {
        ExperimentConfig {
            world: WorldSpec::grid(50, 50, 10, &[(20, 20); 3], 0.05, seed),
            sensor: SensorSpec::grid3x3(DEFAULT_THRESHOLD),
            n_changes: DEFAULT_CHANGES,
            k: Some(4),
            alpha: DEFAULT_ALPHA,
            snapshots: Vec::new(),
            coverage: 1.0,
            output_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.world.validate()?;
        if self.world.extent.placements(self.sensor.aperture()).is_none() {
            return Err(Error::InvalidSensor(format!(
                "aperture {} does not fit in world {}",
                self.sensor.aperture(),
                self.world.extent
            )));
        }
        if self.world.dims == 1 && self.sensor.aperture().rows != 1 {
            return Err(Error::InvalidSensor("a 1D world needs a single-row aperture".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidWorld(format!("alpha {} is outside (0, 1]", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.coverage) {
            return Err(Error::InvalidWorld(format!("coverage {} is outside [0, 1]", self.coverage)));
        }
        if self.k == Some(0) {
            return Err(Error::ZeroClusters);
        }
        Ok(())
    }

    /// Serialises the config. `output_dir` is written only when
    /// `with_output_dir` is set, so run directories stay location-independent.
    pub fn to_text(&self, with_output_dir: bool) -> String {
        let w = &self.world;
        let mut s = String::new();
        let _ = writeln!(s, "dims = {}", w.dims);
        let _ = writeln!(s, "world = {}", fmt_extent(w.dims, w.extent));
        let _ = writeln!(s, "alphabet = {}", w.alphabet);
        let objects: Vec<String> = w.objects.iter().map(|o| fmt_extent(w.dims, o.extent)).collect();
        let _ = writeln!(s, "objects = {}", objects.join(","));
        let _ = writeln!(s, "env_change_prob = {}", w.env_change_prob);
        let _ = writeln!(s, "seed = {}", w.seed);
        let _ = writeln!(s, "aperture = {}", fmt_extent(w.dims, self.sensor.aperture()));
        let kernel: Vec<String> = self.sensor.kernel().iter().map(f64::to_string).collect();
        let _ = writeln!(s, "kernel = {}", kernel.join(","));
        let _ = writeln!(s, "threshold = {}", self.sensor.threshold());
        let _ = writeln!(s, "changes = {}", self.n_changes);
        match self.k {
            Some(k) => {
                let _ = writeln!(s, "k = {k}");
            }
            None => s.push_str("k = auto\n"),
        }
        let _ = writeln!(s, "alpha = {}", self.alpha);
        let snaps: Vec<String> = self.snapshots.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "snapshots = {}", snaps.join(","));
        let _ = writeln!(s, "coverage = {}", self.coverage);
        if let (true, Some(dir)) = (with_output_dir, &self.output_dir) {
            let _ = writeln!(s, "output_dir = {}", dir.display());
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::sim1(0);
        let mut kernel: Option<(usize, Vec<f64>)> = None;
        let mut aperture: Option<Extent> = None;
        let mut threshold = DEFAULT_THRESHOLD;
        let mut seen = std::collections::HashSet::new();

        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, format!("expected `key = value`, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_owned()) {
                return Err(Error::parse(line_no, format!("duplicate key `{key}`")));
            }
            let bad = |what: &str| Error::parse(line_no, format!("invalid {what} {value:?}"));
            match key {
                "dims" => cfg.world.dims = value.parse().map_err(|_| bad("dims"))?,
                "world" => cfg.world.extent = parse_extent(value).ok_or_else(|| bad("extent"))?,
                "alphabet" => cfg.world.alphabet = value.parse().map_err(|_| bad("alphabet"))?,
                "objects" => {
                    cfg.world.objects = split_list(value)
                        .map(|v| parse_extent(v).map(|extent| ObjectSpec { extent }))
                        .collect::<Option<_>>()
                        .ok_or_else(|| bad("object list"))?;
                }
                "env_change_prob" => cfg.world.env_change_prob = value.parse().map_err(|_| bad("probability"))?,
                "seed" => cfg.world.seed = value.parse().map_err(|_| bad("seed"))?,
                "aperture" => aperture = Some(parse_extent(value).ok_or_else(|| bad("aperture"))?),
                "kernel" => {
                    let k = split_list(value)
                        .map(|v| v.parse::<f64>().ok())
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| bad("kernel"))?;
                    kernel = Some((line_no, k));
                }
                "threshold" => threshold = value.parse().map_err(|_| bad("threshold"))?,
                "changes" => cfg.n_changes = value.parse().map_err(|_| bad("change count"))?,
                "k" => {
                    cfg.k = if value == "auto" {
                        None
                    } else {
                        Some(value.parse().map_err(|_| bad("k"))?)
                    }
                }
                "alpha" => cfg.alpha = value.parse().map_err(|_| bad("alpha"))?,
                "snapshots" => {
                    cfg.snapshots = split_list(value)
                        .map(|v| v.parse().ok())
                        .collect::<Option<_>>()
                        .ok_or_else(|| bad("snapshot list"))?;
                }
                "coverage" => cfg.coverage = value.parse().map_err(|_| bad("coverage"))?,
                "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
                other => return Err(Error::parse(line_no, format!("unknown key `{other}`"))),
            }
        }

        // 1D extents parse as 1xN already; re-derive the sensor last so the
        // kernel can be checked against the final aperture.
        let aperture = aperture.unwrap_or(cfg.sensor.aperture());
        let kernel_line = kernel.as_ref().map_or(0, |k| k.0);
        let kernel = match kernel {
            Some((_, k)) => k,
            None if aperture == Extent::line(3) => SensorSpec::line3(threshold).kernel().to_vec(),
            None if aperture == Extent::new(3, 3) => SensorSpec::grid3x3(threshold).kernel().to_vec(),
            None => return Err(Error::parse(0, format!("aperture {aperture} needs an explicit kernel"))),
        };
        cfg.sensor = SensorSpec::new(aperture, kernel, threshold).map_err(|e| Error::parse(kernel_line, e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|v| !v.is_empty())
}

fn fmt_extent(dims: u8, e: Extent) -> String {
    if dims == 1 {
        e.cols.to_string()
    } else {
        format!("{}x{}", e.rows, e.cols)
    }
}

fn parse_extent(v: &str) -> Option<Extent> {
    match v.split_once('x') {
        Some((r, c)) => Some(Extent::new(r.trim().parse().ok()?, c.trim().parse().ok()?)),
        None => Some(Extent::line(v.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn presets_round_trip() {
        for cfg in [
            ExperimentConfig::sim1(3),
            ExperimentConfig::sim1_changing_env(4),
            ExperimentConfig::sim2(5),
        ] {
            let text = cfg.to_text(true);
            assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg, "{text}");
        }
    }

    #[test]
    fn output_dir_only_when_asked() {
        let mut cfg = ExperimentConfig::sim1(0);
        cfg.output_dir = Some("runs/a".into());
        assert!(cfg.to_text(true).contains("output_dir = runs/a"));
        assert!(!cfg.to_text(false).contains("output_dir"));
        assert_eq!(ExperimentConfig::parse(&cfg.to_text(true)).unwrap(), cfg);
    }

    #[test]
    fn defaults_fill_missing_keys() {
        let cfg = ExperimentConfig::parse("seed = 12\n# nothing else\n").unwrap();
        assert_eq!(cfg, ExperimentConfig::sim1(12));
        let cfg = ExperimentConfig::parse("dims = 2\nworld = 30x30\nobjects = 10x10\naperture = 3x3\nk = auto\n").unwrap();
        assert_eq!(cfg.sensor, SensorSpec::grid3x3(0.4));
        assert_eq!(cfg.k, None);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::parse("seed = 1\nalpha = high\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = ExperimentConfig::parse("seed = 1\nbogus = 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(ExperimentConfig::parse("seed = 1\nseed = 2\n").is_err());
        assert!(ExperimentConfig::parse("kernel = 1,2\n").is_err());
        assert!(ExperimentConfig::parse("alpha = 0\n").is_err());
        assert!(ExperimentConfig::parse("no equals sign\n").is_err());
    }

    proptest! {
        #[test]
        fn arbitrary_configs_round_trip(
            seed in any::<u64>(),
            p in 0.0f64..=1.0,
            thr in -5.0f64..5.0,
            alpha in 0.01f64..=1.0,
            k in prop::option::of(1usize..8),
            snaps in prop::collection::vec(0usize..400, 0..4),
            changes in 0usize..1000,
        ) {
            let mut cfg = ExperimentConfig::sim2(seed);
            cfg.world.env_change_prob = p;
            cfg.sensor = SensorSpec::new(cfg.sensor.aperture(), cfg.sensor.kernel().to_vec(), thr).unwrap();
            cfg.alpha = alpha;
            cfg.k = k;
            cfg.snapshots = snaps;
            cfg.n_changes = changes;
            prop_assert_eq!(ExperimentConfig::parse(&cfg.to_text(true)).unwrap(), cfg);
        }
    }
}
