//! Scenes: an environment field overlaid by movable rigid object patches.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{Coord, Extent};
use crate::rng::Streams;

/// Cell values are integers in `1..=alphabet`.
pub type Cell = u8;

/// Joint rejection-sampling budget for the initial non-overlapping layout.
pub const PLACEMENT_ATTEMPTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ObjectSpec {
    pub extent: Extent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorldSpec {
    /// 1 or 2. A 1D world is a 2D world with a single row.
    pub dims: u8,
    pub extent: Extent,
    pub alphabet: Cell,
    pub objects: Vec<ObjectSpec>,
    pub env_change_prob: f64,
    pub seed: u64,
}

impl WorldSpec {
    pub fn line(len: usize, alphabet: Cell, objects: &[usize], env_change_prob: f64, seed: u64) -> Self {
        WorldSpec {
            dims: 1,
            extent: Extent::line(len),
            alphabet,
            objects: objects
                .iter()
                .map(|&w| ObjectSpec {
                    extent: Extent::line(w),
                })
                .collect(),
            env_change_prob,
            seed,
        }
    }

    pub fn grid(
        rows: usize,
        cols: usize,
        alphabet: Cell,
        objects: &[(usize, usize)],
        env_change_prob: f64,
        seed: u64,
    ) -> Self {
        WorldSpec {
            dims: 2,
            extent: Extent::new(rows, cols),
            alphabet,
            objects: objects
                .iter()
                .map(|&(r, c)| ObjectSpec {
                    extent: Extent::new(r, c),
                })
                .collect(),
            env_change_prob,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidWorld(m));
        if self.dims != 1 && self.dims != 2 {
            return bad(format!("dims must be 1 or 2, got {}", self.dims));
        }
        if self.extent.rows == 0 || self.extent.cols == 0 {
            return bad(format!("extent {} has an empty dimension", self.extent));
        }
        if self.dims == 1 && self.extent.rows != 1 {
            return bad(format!("a 1D world must have a single row, got {}", self.extent));
        }
        if self.alphabet < 2 {
            return bad(format!("alphabet must have at least 2 values, got {}", self.alphabet));
        }
        if !(0.0..=1.0).contains(&self.env_change_prob) {
            return bad(format!("env_change_prob {} is outside [0, 1]", self.env_change_prob));
        }
        for (n, obj) in self.objects.iter().enumerate() {
            if self.extent.placements(obj.extent).is_none() {
                return bad(format!(
                    "object {n} of extent {} does not fit in world {}",
                    obj.extent, self.extent
                ));
            }
        }
        Ok(())
    }
}

/// A rigid patch of fixed values at some position in the world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridObject {
    patch: Vec<Cell>,
    extent: Extent,
    pub position: Coord,
    /// Stacking rank; higher occludes lower.
    pub z: usize,
}

impl GridObject {
    pub fn new(patch: Vec<Cell>, extent: Extent, position: Coord, z: usize) -> Self {
        assert_eq!(patch.len(), extent.cells(), "patch size must match its extent");
        GridObject {
            patch,
            extent,
            position,
            z,
        }
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    pub fn patch(&self) -> &[Cell] {
        &self.patch
    }

    /// Whether world coordinate `c` lies under this object's footprint.
    pub fn covers(&self, c: Coord) -> bool {
        self.extent.contains(c - self.position)
    }

    fn overlaps(&self, other: &GridObject) -> bool {
        rects_overlap(self.position, self.extent, other.position, other.extent)
    }
}

fn rects_overlap(a: Coord, ae: Extent, b: Coord, be: Extent) -> bool {
    let a_end = Coord::new(a.row + ae.rows as i32, a.col + ae.cols as i32);
    let b_end = Coord::new(b.row + be.rows as i32, b.col + be.cols as i32);
    a.row < b_end.row && b.row < a_end.row && a.col < b_end.col && b.col < a_end.col
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scene {
    extent: Extent,
    env: Vec<Cell>,
    objects: Vec<GridObject>,
    composed: Vec<Cell>,
}

impl Scene {
    /// Builds a scene from parts. Every object must lie fully inside the
    /// world.
    pub fn new(extent: Extent, env: Vec<Cell>, objects: Vec<GridObject>) -> Result<Self> {
        if env.len() != extent.cells() {
            return Err(Error::InvalidWorld(format!(
                "environment has {} cells, extent {} needs {}",
                env.len(),
                extent,
                extent.cells()
            )));
        }
        for obj in &objects {
            let fits = extent
                .placements(obj.extent)
                .is_some_and(|p| p.contains(obj.position));
            if !fits {
                return Err(Error::InvalidWorld(format!(
                    "object of extent {} at {} leaves the world",
                    obj.extent, obj.position
                )));
            }
        }
        let mut scene = Scene {
            extent,
            composed: env.clone(),
            env,
            objects,
        };
        scene.compose();
        Ok(scene)
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    pub fn env(&self) -> &[Cell] {
        &self.env
    }

    pub fn objects(&self) -> &[GridObject] {
        &self.objects
    }

    pub fn composed(&self) -> &[Cell] {
        &self.composed
    }

    /// Composed value at `p`.
    pub fn cell(&self, p: Coord) -> Result<Cell> {
        if !self.extent.contains(p) {
            return Err(Error::OutOfRange {
                row: p.row,
                col: p.col,
                rows: self.extent.rows,
                cols: self.extent.cols,
            });
        }
        Ok(self.composed[self.extent.index(p)])
    }

    pub fn set_z_order(&mut self, z: &[usize]) {
        assert_eq!(z.len(), self.objects.len());
        for (obj, &rank) in self.objects.iter_mut().zip(z) {
            obj.z = rank;
        }
        self.compose();
    }

    pub fn set_position(&mut self, object: usize, position: Coord) -> Result<()> {
        let extent = self.objects[object].extent;
        let fits = self
            .extent
            .placements(extent)
            .is_some_and(|p| p.contains(position));
        if !fits {
            return Err(Error::InvalidWorld(format!(
                "object {object} at {position} leaves the world"
            )));
        }
        self.objects[object].position = position;
        self.compose();
        Ok(())
    }

    fn compose(&mut self) {
        self.composed.copy_from_slice(&self.env);
        let mut order: Vec<usize> = (0..self.objects.len()).collect();
        // Stable sort: equal ranks paint in list order.
        order.sort_by_key(|&n| self.objects[n].z);
        for n in order {
            let obj = &self.objects[n];
            for r in 0..obj.extent.rows {
                let src = &obj.patch[r * obj.extent.cols..(r + 1) * obj.extent.cols];
                let start = self
                    .extent
                    .index(obj.position + Coord::new(r as i32, 0));
                self.composed[start..start + obj.extent.cols].copy_from_slice(src);
            }
        }
    }

    /// Applies one scene change: every object jumps to a different legal
    /// position, a fresh z-order is drawn when several objects are present,
    /// and with probability `env_change_prob` the whole environment field is
    /// redrawn. Returns whether the environment changed.
    pub fn mutate(&mut self, spec: &WorldSpec, streams: &mut Streams) -> bool {
        for obj in &mut self.objects {
            let placements = self
                .extent
                .placements(obj.extent)
                .expect("objects fit by construction");
            let n = placements.len();
            if n > 1 {
                let current = placements.ordinal(obj.position);
                let mut pick = streams.layout.random_range(0..n - 1);
                if pick >= current {
                    pick += 1;
                }
                obj.position = placements.nth(pick);
            }
        }
        if self.objects.len() > 1 {
            let mut z: Vec<usize> = (0..self.objects.len()).collect();
            z.shuffle(&mut streams.layout);
            for (obj, rank) in self.objects.iter_mut().zip(z) {
                obj.z = rank;
            }
        }
        let coin: f64 = streams.env.random();
        let changed = coin < spec.env_change_prob;
        if changed {
            fill_uniform(&mut self.env, spec.alphabet, &mut streams.env);
        }
        self.compose();
        changed
    }
}

fn fill_uniform(buf: &mut [Cell], alphabet: Cell, rng: &mut impl Rng) {
    for v in buf {
        *v = rng.random_range(1..=alphabet);
    }
}

/// Draws the first scene: i.i.d. uniform environment and patches, and a
/// jointly uniform object layout with no pairwise overlap.
pub fn generate_initial_scene(spec: &WorldSpec, streams: &mut Streams) -> Result<Scene> {
    spec.validate()?;
    let mut env = vec![0; spec.extent.cells()];
    fill_uniform(&mut env, spec.alphabet, &mut streams.env);

    let mut objects: Vec<GridObject> = spec
        .objects
        .iter()
        .enumerate()
        .map(|(z, o)| {
            let mut patch = vec![0; o.extent.cells()];
            fill_uniform(&mut patch, spec.alphabet, &mut streams.layout);
            GridObject::new(patch, o.extent, Coord::ZERO, z)
        })
        .collect();

    let placements: Vec<_> = objects
        .iter()
        .map(|o| spec.extent.placements(o.extent).expect("validated"))
        .collect();
    let mut placed = false;
    for _ in 0..PLACEMENT_ATTEMPTS {
        for (obj, p) in objects.iter_mut().zip(&placements) {
            obj.position = p.nth(streams.layout.random_range(0..p.len()));
        }
        let clash = (0..objects.len())
            .any(|a| (a + 1..objects.len()).any(|b| objects[a].overlaps(&objects[b])));
        if !clash {
            placed = true;
            break;
        }
    }
    if !placed {
        return Err(Error::Placement {
            attempts: PLACEMENT_ATTEMPTS,
        });
    }
    Scene::new(spec.extent, env, objects)
}

/// Free-function form of [`Scene::mutate`].
pub fn mutate_scene(scene: &mut Scene, spec: &WorldSpec, streams: &mut Streams) -> bool {
    scene.mutate(spec, streams)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sim1_spec(seed: u64) -> WorldSpec {
        WorldSpec::line(150, 10, &[40], 0.0, seed)
    }

    #[test]
    fn sim1_object_inside_world() {
        for seed in 0..50 {
            let spec = sim1_spec(seed);
            let scene = generate_initial_scene(&spec, &mut Streams::new(seed)).unwrap();
            let obj = &scene.objects()[0];
            assert_eq!(obj.position.row, 0);
            assert!((0..=110).contains(&obj.position.col));
            assert!(scene.env().iter().all(|&v| (1..=10).contains(&v)));
        }
    }

    #[test]
    fn full_width_object_sits_at_origin() {
        let spec = WorldSpec::line(12, 4, &[12], 0.0, 3);
        let mut streams = Streams::new(3);
        let mut scene = generate_initial_scene(&spec, &mut streams).unwrap();
        assert_eq!(scene.objects()[0].position, Coord::ZERO);
        scene.mutate(&spec, &mut streams);
        assert_eq!(scene.objects()[0].position, Coord::ZERO);
    }

    #[test]
    fn sim2_initial_layout_has_no_overlap() {
        let spec = WorldSpec::grid(50, 50, 10, &[(20, 20); 3], 0.05, 0);
        for seed in 0..20 {
            let scene = generate_initial_scene(&spec, &mut Streams::new(seed)).unwrap();
            // brute force: no world cell is covered by two objects
            for r in 0..50 {
                for c in 0..50 {
                    let p = Coord::new(r, c);
                    let n = scene.objects().iter().filter(|o| o.covers(p)).count();
                    assert!(n <= 1, "seed {seed}: cell {p} covered {n} times");
                }
            }
        }
    }

    #[test]
    fn impossible_layout_is_reported() {
        let spec = WorldSpec::grid(10, 10, 4, &[(6, 6), (6, 6)], 0.0, 0);
        let err = generate_initial_scene(&spec, &mut Streams::new(0)).unwrap_err();
        assert!(matches!(err, Error::Placement { .. }));
    }

    #[test]
    fn zero_change_prob_keeps_env() {
        let spec = sim1_spec(9);
        let mut streams = Streams::new(9);
        let mut scene = generate_initial_scene(&spec, &mut streams).unwrap();
        let env = scene.env().to_vec();
        for _ in 0..100 {
            assert!(!scene.mutate(&spec, &mut streams));
            assert_eq!(scene.env(), &env[..]);
        }
    }

    #[test]
    fn object_always_moves() {
        let spec = sim1_spec(4);
        let mut streams = Streams::new(4);
        let mut scene = generate_initial_scene(&spec, &mut streams).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..3000 {
            let before = scene.objects()[0].position;
            scene.mutate(&spec, &mut streams);
            let after = scene.objects()[0].position;
            assert_ne!(before, after);
            assert!((0..=110).contains(&after.col));
            seen.insert(after.col);
        }
        assert_eq!(seen.len(), 111);
    }

    #[test]
    fn env_change_rate_matches_binomial() {
        // 350 draws at p = 0.05: binomial mean 17.5
        let mut total = 0usize;
        for seed in 0..100 {
            let spec = WorldSpec::line(150, 10, &[40], 0.05, seed);
            let mut streams = Streams::new(seed);
            let mut scene = generate_initial_scene(&spec, &mut streams).unwrap();
            total += (0..350).filter(|_| scene.mutate(&spec, &mut streams)).count();
        }
        let mean = total as f64 / 100.0;
        assert!((mean - 17.5).abs() < 5.0, "mean env changes {mean}");
    }

    #[test]
    fn cell_follows_z_order() {
        let env = vec![1; 10];
        let a = GridObject::new(vec![7; 4], Extent::line(4), Coord::new(0, 2), 0);
        let b = GridObject::new(vec![9; 4], Extent::line(4), Coord::new(0, 4), 1);
        let mut scene = Scene::new(Extent::line(10), env, vec![a, b]).unwrap();
        assert_eq!(scene.cell(Coord::new(0, 0)).unwrap(), 1);
        assert_eq!(scene.cell(Coord::new(0, 2)).unwrap(), 7);
        assert_eq!(scene.cell(Coord::new(0, 5)).unwrap(), 9);
        let before = scene.composed().to_vec();
        scene.set_z_order(&[1, 0]);
        assert_eq!(scene.cell(Coord::new(0, 5)).unwrap(), 7);
        // only the overlap cells 4..6 change
        for c in 0..10 {
            let changed = before[c] != scene.composed()[c];
            assert_eq!(changed, (4..6).contains(&c), "cell {c}");
        }
        assert!(scene.cell(Coord::new(0, 10)).is_err());
        assert!(scene.cell(Coord::new(1, 0)).is_err());
    }

    #[test]
    fn same_seed_same_scene_sequence() {
        let spec = WorldSpec::grid(50, 50, 10, &[(20, 20); 3], 0.05, 11);
        let run = || {
            let mut streams = Streams::new(11);
            let mut scene = generate_initial_scene(&spec, &mut streams).unwrap();
            let mut out = vec![scene.clone()];
            for _ in 0..20 {
                scene.mutate(&spec, &mut streams);
                out.push(scene.clone());
            }
            out
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(WorldSpec::line(10, 1, &[], 0.0, 0).validate().is_err());
        assert!(WorldSpec::line(10, 4, &[11], 0.0, 0).validate().is_err());
        assert!(WorldSpec::line(10, 4, &[3], 1.5, 0).validate().is_err());
        assert!(WorldSpec::grid(0, 4, 4, &[], 0.0, 0).validate().is_err());
    }
}
