//! Text exports: CSV grids and plain (P3) pixmaps.

use std::fmt::Write as _;

use crate::agent::{MotorConfig, SensorSpec, SensoryState};
use crate::grid::{Coord, Extent};
use crate::matrix::Matrix;
use crate::memory::MotorMatrix;
use crate::world::{Cell, Scene};

/// Digits after the point for probabilities in CSV output.
pub const CSV_PRECISION: usize = 6;

pub type Rgb = [u8; 3];

pub fn matrix_csv(m: &Matrix) -> String {
    let mut s = String::with_capacity(m.rows() * m.cols() * (CSV_PRECISION + 3));
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            let _ = write!(s, "{v:.CSV_PRECISION$}");
        }
        s.push('\n');
    }
    s
}

/// Motor deltas, one column component in 1D, `row;col` per cell in 2D.
pub fn motor_matrix_csv(t: &MotorMatrix, dims: u8) -> String {
    let n = t.size();
    let mut s = String::new();
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", fmt_coord(t.get(i, j), dims));
        }
        s.push('\n');
    }
    s
}

pub fn fmt_coord(c: Coord, dims: u8) -> String {
    if dims == 1 {
        c.col.to_string()
    } else {
        format!("{};{}", c.row, c.col)
    }
}

pub fn grid_csv(values: &[Cell], extent: Extent) -> String {
    let mut s = String::new();
    for row in values.chunks(extent.cols) {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

/// Linear blue-to-red map over `[0, 1]` with 256 levels.
pub fn heat_color(v: f64) -> Rgb {
    let level = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    [level, 0, 255 - level]
}

/// One gray level per alphabet value, `1 -> 0` up to `alphabet -> 255`.
pub fn gray_level(v: Cell, alphabet: Cell) -> u8 {
    let span = f64::from(alphabet.max(2) - 1);
    ((f64::from(v.saturating_sub(1)) / span) * 255.0).round() as u8
}

/// Plain PPM with `pixel(row, col)` blown up by integer factors.
pub fn ppm(width: usize, height: usize, sx: usize, sy: usize, pixel: impl Fn(usize, usize) -> Rgb) -> String {
    let (w, h) = (width * sx, height * sy);
    let mut s = String::with_capacity(w * h * 12 + 32);
    let _ = write!(s, "P3\n{w} {h}\n255\n");
    for y in 0..h {
        for x in 0..w {
            let [r, g, b] = pixel(y / sy, x / sx);
            let _ = write!(s, "{r} {g} {b}");
            // keep lines under 70 characters
            s.push(if x % 5 == 4 || x + 1 == w { '\n' } else { ' ' });
        }
    }
    s
}

fn heat_scale(n: usize) -> usize {
    (256 / n.max(1)).max(1)
}

pub fn heatmap_ppm(m: &Matrix) -> String {
    let scale = heat_scale(m.rows().max(m.cols()));
    ppm(m.cols(), m.rows(), scale, scale, |r, c| heat_color(m[(r, c)]))
}

fn grid_scale(extent: Extent) -> (usize, usize) {
    if extent.rows == 1 {
        (4, 40)
    } else {
        let s = (400 / extent.cols.max(extent.rows)).max(1);
        (s, s)
    }
}

pub fn scene_ppm(scene: &Scene, alphabet: Cell) -> String {
    let e = scene.extent();
    let (sx, sy) = grid_scale(e);
    let composed = scene.composed();
    ppm(e.cols, e.rows, sx, sy, |r, c| {
        let g = gray_level(composed[r * e.cols + c], alphabet);
        [g, g, g]
    })
}

/// `position..., values..., response` per salient reading.
pub fn saliency_csv(salient: &[(MotorConfig, SensoryState)], sensor: &SensorSpec, dims: u8) -> String {
    let mut s = String::new();
    if dims == 1 {
        s.push('m');
    } else {
        s.push_str("m_row,m_col");
    }
    for k in 0..sensor.aperture().cells() {
        let _ = write!(s, ",x{}", k + 1);
    }
    s.push_str(",response\n");
    for (m, st) in salient {
        if dims == 1 {
            let _ = write!(s, "{}", m.col);
        } else {
            let _ = write!(s, "{},{}", m.row, m.col);
        }
        for v in st.values() {
            let _ = write!(s, ",{v}");
        }
        let _ = writeln!(s, ",{:.CSV_PRECISION$}", sensor.response(st.values()));
    }
    s
}

/// Scene in gray with the aperture centre of every salient reading in red.
pub fn saliency_ppm(
    scene: &Scene,
    salient: &[(MotorConfig, SensoryState)],
    sensor: &SensorSpec,
    alphabet: Cell,
) -> String {
    let e = scene.extent();
    let ap = sensor.aperture();
    let centre = Coord::new((ap.rows / 2) as i32, (ap.cols / 2) as i32);
    let mut marked = vec![false; e.cells()];
    for (m, _) in salient {
        marked[e.index(*m + centre)] = true;
    }
    let (sx, sy) = grid_scale(e);
    let composed = scene.composed();
    ppm(e.cols, e.rows, sx, sy, |r, c| {
        let k = r * e.cols + c;
        if marked[k] {
            [255, 0, 0]
        } else {
            let g = gray_level(composed[k], alphabet);
            [g, g, g]
        }
    })
}
