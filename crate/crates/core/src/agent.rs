//! The agent's sensor: a fixed window read at an absolute motor position,
//! and a linear contrast filter deciding which readings are salient.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{Coord, Extent, Placements};
use crate::world::{Cell, Scene};

/// Motor configurations are absolute positions of the aperture origin.
pub type MotorConfig = Coord;

/// One reading through the aperture, flattened row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SensoryState(Box<[Cell]>);

impl SensoryState {
    pub fn new(values: impl Into<Box<[Cell]>>) -> Self {
        SensoryState(values.into())
    }

    pub fn values(&self) -> &[Cell] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::borrow::Borrow<[Cell]> for SensoryState {
    fn borrow(&self) -> &[Cell] {
        &self.0
    }
}

impl fmt::Display for SensoryState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (n, v) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensorSpec {
    aperture: Extent,
    kernel: Vec<f64>,
    threshold: f64,
}

impl SensorSpec {
    pub fn new(aperture: Extent, kernel: Vec<f64>, threshold: f64) -> Result<Self> {
        if aperture.cells() == 0 {
            return Err(Error::InvalidSensor("aperture is empty".into()));
        }
        if kernel.len() != aperture.cells() {
            return Err(Error::InvalidSensor(format!(
                "kernel has {} weights, aperture {} has {} cells",
                kernel.len(),
                aperture,
                aperture.cells()
            )));
        }
        if !threshold.is_finite() || kernel.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidSensor("kernel and threshold must be finite".into()));
        }
        Ok(SensorSpec {
            aperture,
            kernel,
            threshold,
        })
    }

    /// Three adjacent cells with the `[-0.5, 1, -0.5]` contrast filter.
    pub fn line3(threshold: f64) -> Self {
        let s = SensorSpec::new(Extent::line(3), vec![-0.5, 1.0, -0.5], threshold)
            .expect("valid built-in sensor");
        debug_assert_eq!(s.kernel_sum(), 0.0);
        s
    }

    /// 3x3 window, centre weight 1, edge neighbours -3/16, corners -1/16.
    pub fn grid3x3(threshold: f64) -> Self {
        let (c, e) = (-1.0 / 16.0, -3.0 / 16.0);
        let kernel = vec![c, e, c, e, 1.0, e, c, e, c];
        let s = SensorSpec::new(Extent::new(3, 3), kernel, threshold)
            .expect("valid built-in sensor");
        debug_assert_eq!(s.kernel_sum(), 0.0);
        s
    }

    pub fn aperture(&self) -> Extent {
        self.aperture
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn kernel_sum(&self) -> f64 {
        self.kernel.iter().sum()
    }

    /// Filter response of a raw value window.
    pub fn response(&self, values: &[Cell]) -> f64 {
        debug_assert_eq!(values.len(), self.kernel.len());
        values
            .iter()
            .zip(&self.kernel)
            .map(|(&v, &k)| f64::from(v) * k)
            .sum()
    }
}

/// All motor positions at which the aperture lies fully inside the world.
pub fn motor_range(world: Extent, sensor: &SensorSpec) -> Result<Placements> {
    world.placements(sensor.aperture).ok_or_else(|| {
        Error::InvalidSensor(format!(
            "aperture {} does not fit in world {}",
            sensor.aperture, world
        ))
    })
}

pub fn read_sensor(scene: &Scene, m: MotorConfig, sensor: &SensorSpec) -> Result<SensoryState> {
    let range = motor_range(scene.extent(), sensor)?;
    if !range.contains(m) {
        return Err(Error::OutOfRange {
            row: m.row,
            col: m.col,
            rows: range.rows,
            cols: range.cols,
        });
    }
    let mut buf = Vec::with_capacity(sensor.aperture.cells());
    read_into(scene, m, sensor.aperture, &mut buf);
    Ok(SensoryState::new(buf))
}

/// Unchecked read; `m` must be in the motor range.
pub(crate) fn read_into(scene: &Scene, m: MotorConfig, aperture: Extent, buf: &mut Vec<Cell>) {
    buf.clear();
    let composed = scene.composed();
    let cols = scene.extent().cols;
    for r in 0..aperture.rows {
        let start = (m.row as usize + r) * cols + m.col as usize;
        buf.extend_from_slice(&composed[start..start + aperture.cols]);
    }
}

/// Whether the reading at `m` equals `state`. `m` must be in the motor range.
#[inline]
pub(crate) fn reads_as(scene: &Scene, m: MotorConfig, aperture: Extent, state: &[Cell]) -> bool {
    let composed = scene.composed();
    let cols = scene.extent().cols;
    (0..aperture.rows).all(|r| {
        let start = (m.row as usize + r) * cols + m.col as usize;
        composed[start..start + aperture.cols] == state[r * aperture.cols..(r + 1) * aperture.cols]
    })
}

/// Strictly greater than the threshold.
pub fn is_salient(s: &SensoryState, sensor: &SensorSpec) -> bool {
    s.len() == sensor.kernel.len() && sensor.response(s.values()) > sensor.threshold
}

/// Exhaustive lexicographic scan of the motor range, keeping salient readings.
pub fn salient_positions(scene: &Scene, sensor: &SensorSpec) -> Vec<(MotorConfig, SensoryState)> {
    let Ok(range) = motor_range(scene.extent(), sensor) else {
        return Vec::new();
    };
    let mut buf = Vec::with_capacity(sensor.aperture.cells());
    let mut out = Vec::new();
    for m in range.iter() {
        read_into(scene, m, sensor.aperture, &mut buf);
        if sensor.response(&buf) > sensor.threshold {
            out.push((m, SensoryState::new(buf.as_slice())));
        }
    }
    out
}
