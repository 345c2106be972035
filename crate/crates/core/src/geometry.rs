//! Perspective mathematics: Builder pose sampling, the world-to-perspective
//! transform and spatial-relation classification.
//!
//! Conventions:
//! * `to_perspective` translates by the Builder location, then applies the
//!   yaw matrix `Y(γ)` and the pitch matrix `P(φ)`.
//! * `+x′` is the Builder's left, `+z′` points away from the Builder along
//!   its gaze (larger `z′` = behind the reference, smaller = in front).
//! * Relation words use a gravity-anchored vertical axis and a horizontal
//!   frame given by the yaw snapped to the nearest quarter turn, so every
//!   cell offset maps to integer perspective deltas.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::world::{BuilderPose, Cell, Structure, X_MAX, X_MIN, Y_MAX, Y_MIN, Z_MAX, Z_MIN};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("gaze is undefined: builder and target coincide")]
    CoincidentPoints,
    #[error("spatial relation is undefined between a cell and itself ({0})")]
    SameCell(Cell),
    #[error("anchored direction is undefined for a zero step")]
    ZeroStep,
    #[error("no feasible builder position sees {0}")]
    NoFeasiblePosition(Cell),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldOfView {
    pub horizontal: f64,
    pub vertical: f64,
}

impl Default for FieldOfView {
    fn default() -> Self {
        FieldOfView { horizontal: 102.4, vertical: 70.0 }
    }
}

/// Bounds for the Builder position search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseBounds {
    /// Minimum eye-to-reference distance, in cell units.
    pub min_dist: f64,
    /// Maximum eye-to-reference distance, in cell units.
    pub max_dist: f64,
    /// Eye height above the Builder's feet.
    pub eye_height: f64,
    /// Highest feet level considered.
    pub max_feet_y: i32,
    /// Whether an occupied cell between eye and reference disqualifies a position.
    pub require_line_of_sight: bool,
}

impl Default for PoseBounds {
    fn default() -> Self {
        PoseBounds {
            min_dist: 2.0,
            max_dist: 8.0,
            eye_height: 1.6,
            max_feet_y: Y_MAX,
            require_line_of_sight: true,
        }
    }
}

/// Coordinates in the Builder's frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerspectiveCoord {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

fn yaw_matrix(yaw_deg: f64) -> Matrix3<f64> {
    let (s, c) = yaw_deg.to_radians().sin_cos();
    Matrix3::new(c, 0.0, -s, 0.0, 1.0, 0.0, s, 0.0, c)
}

fn pitch_matrix(pitch_deg: f64) -> Matrix3<f64> {
    let (s, c) = pitch_deg.to_radians().sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, s, 0.0, -s, c)
}

pub fn to_perspective(loc: [f64; 3], pose: &BuilderPose) -> PerspectiveCoord {
    let d = Vector3::new(loc[0] - pose.loc[0], loc[1] - pose.loc[1], loc[2] - pose.loc[2]);
    let v = pitch_matrix(pose.pitch) * yaw_matrix(pose.yaw) * d;
    PerspectiveCoord { x: v.x, y: v.y, z: v.z }
}

/// Yaw and pitch (degrees) that point the gaze from `from` at the center of
/// `target`. Uses full-quadrant arctangents.
pub fn optimal_gaze(from: [f64; 3], target: &Cell) -> Result<(f64, f64), GeometryError> {
    let dx = target.x as f64 - from[0];
    let dy = target.y as f64 - from[1];
    let dz = target.z as f64 - from[2];
    let horizontal = dx.hypot(dz);
    if horizontal == 0.0 && dy == 0.0 {
        return Err(GeometryError::CoincidentPoints);
    }
    let yaw = dx.atan2(dz).to_degrees();
    let pitch = (-dy).atan2(horizontal).to_degrees();
    Ok((yaw, pitch))
}

/// Wraps an angle into `[-180, 180]`.
pub fn wrap_degrees(a: f64) -> f64 {
    let w = (a + 180.0).rem_euclid(360.0) - 180.0;
    if w == -180.0 && a > 0.0 {
        180.0
    } else {
        w
    }
}

fn round_tenth(v: f64) -> f64 {
    let r = (v * 10.0).round() / 10.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Quarter turns (0..4) of the yaw snapped to the nearest multiple of 90°;
/// exact half-way yaws round up.
pub fn snapped_quarter_turns(yaw: f64) -> i32 {
    ((yaw / 90.0 + 0.5).floor() as i32).rem_euclid(4)
}

fn snapped_sin_cos(yaw: f64) -> (i32, i32) {
    match snapped_quarter_turns(yaw) {
        0 => (0, 1),
        1 => (1, 0),
        2 => (0, -1),
        _ => (-1, 0),
    }
}

/// Integer perspective delta `[x′, y, z′]` of a world offset, in the
/// snapped horizontal frame.
pub fn perspective_delta(d: [i32; 3], pose: &BuilderPose) -> [i32; 3] {
    let (s, c) = snapped_sin_cos(pose.yaw);
    [c * d[0] - s * d[2], d[1], s * d[0] + c * d[2]]
}

/// Inverse of [`perspective_delta`].
pub fn world_delta(p: [i32; 3], pose: &BuilderPose) -> [i32; 3] {
    let (s, c) = snapped_sin_cos(pose.yaw);
    [c * p[0] + s * p[2], p[1], -s * p[0] + c * p[2]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lateral {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Vertical {
    Above,
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Depth {
    Front,
    Behind,
}

impl Lateral {
    fn from_sign(v: i32) -> Option<Self> {
        match v.signum() {
            1 => Some(Lateral::Left),
            -1 => Some(Lateral::Right),
            _ => None,
        }
    }
    fn sign(self) -> i32 {
        match self {
            Lateral::Left => 1,
            Lateral::Right => -1,
        }
    }
    pub fn opposite(self) -> Self {
        match self {
            Lateral::Left => Lateral::Right,
            Lateral::Right => Lateral::Left,
        }
    }
}

impl Vertical {
    fn from_sign(v: i32) -> Option<Self> {
        match v.signum() {
            1 => Some(Vertical::Above),
            -1 => Some(Vertical::Below),
            _ => None,
        }
    }
    fn sign(self) -> i32 {
        match self {
            Vertical::Above => 1,
            Vertical::Below => -1,
        }
    }
}

impl Depth {
    fn from_sign(v: i32) -> Option<Self> {
        match v.signum() {
            1 => Some(Depth::Behind),
            -1 => Some(Depth::Front),
            _ => None,
        }
    }
    fn sign(self) -> i32 {
        match self {
            Depth::Behind => 1,
            Depth::Front => -1,
        }
    }
    pub fn opposite(self) -> Self {
        match self {
            Depth::Front => Depth::Behind,
            Depth::Behind => Depth::Front,
        }
    }
}

/// Position of one block relative to another, in the Builder's frame.
/// At least one component is set; opposing components cannot coexist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpatialRelation {
    pub lateral: Option<Lateral>,
    pub vertical: Option<Vertical>,
    pub depth: Option<Depth>,
}

impl SpatialRelation {
    pub fn arity(&self) -> usize {
        self.lateral.is_some() as usize + self.vertical.is_some() as usize + self.depth.is_some() as usize
    }

    fn from_delta(p: [i32; 3]) -> Option<Self> {
        let rel = SpatialRelation {
            lateral: Lateral::from_sign(p[0]),
            vertical: Vertical::from_sign(p[1]),
            depth: Depth::from_sign(p[2]),
        };
        (rel.arity() > 0).then_some(rel)
    }

    /// All 26 relation values.
    pub fn all() -> Vec<SpatialRelation> {
        let mut out = Vec::with_capacity(26);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(r) = SpatialRelation::from_delta([dx, dy, dz]) {
                        out.push(r);
                    }
                }
            }
        }
        out
    }

    /// Relation seen from a Builder facing the opposite way.
    pub fn turned_around(&self) -> Self {
        SpatialRelation {
            lateral: self.lateral.map(Lateral::opposite),
            vertical: self.vertical,
            depth: self.depth.map(Depth::opposite),
        }
    }

    /// Unit perspective offset `[x′, y, z′]` with one entry per component.
    pub fn unit_offset(&self) -> [i32; 3] {
        [
            self.lateral.map_or(0, Lateral::sign),
            self.vertical.map_or(0, Vertical::sign),
            self.depth.map_or(0, Depth::sign),
        ]
    }
}

impl fmt::Display for SpatialRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(l) = self.lateral {
            parts.push(format!("{l:?}"));
        }
        if let Some(v) = self.vertical {
            parts.push(format!("{v:?}"));
        }
        if let Some(d) = self.depth {
            parts.push(format!("{d:?}"));
        }
        f.write_str(&parts.join("+"))
    }
}

/// Relation of `p` to the reference `r` as seen by the Builder.
pub fn classify_relation(p: &Cell, r: &Cell, pose: &BuilderPose) -> Result<SpatialRelation, GeometryError> {
    if p == r {
        return Err(GeometryError::SameCell(*p));
    }
    let d = perspective_delta(r.delta(p), pose);
    Ok(SpatialRelation::from_delta(d).expect("distinct cells have a non-zero delta"))
}

/// Per-axis perspective offset `[x′, y, z′]` of `p` from `r`.
pub fn perspective_offset(p: &Cell, r: &Cell, pose: &BuilderPose) -> [i32; 3] {
    perspective_delta(r.delta(p), pose)
}

/// The more salient horizontal axis for a one-word phrasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominantAxis {
    Lateral(Lateral),
    Depth(Depth),
}

/// Compares `|Δx′|` with `|Δz′|`; left/right wins only when strictly larger.
/// `None` for purely vertical offsets.
pub fn dominant_horizontal(p: &Cell, r: &Cell, pose: &BuilderPose) -> Option<DominantAxis> {
    let d = perspective_offset(p, r, pose);
    if d[0] == 0 && d[2] == 0 {
        return None;
    }
    if d[0].abs() > d[2].abs() {
        Lateral::from_sign(d[0]).map(DominantAxis::Lateral)
    } else {
        Depth::from_sign(d[2]).map(DominantAxis::Depth)
    }
}

/// In-region cells within `max_dist` (per axis) of `r` that classify to `rel`.
pub fn relation_offset_set(rel: &SpatialRelation, r: &Cell, pose: &BuilderPose, max_dist: i32) -> BTreeSet<Cell> {
    let mut out = BTreeSet::new();
    for dx in -max_dist..=max_dist {
        for dy in -max_dist..=max_dist {
            for dz in -max_dist..=max_dist {
                let c = r.offset(dx, dy, dz);
                if c == *r || !c.in_region() {
                    continue;
                }
                if classify_relation(&c, r, pose).ok().as_ref() == Some(rel) {
                    out.insert(c);
                }
            }
        }
    }
    out
}

/// A growth direction phrased with the Builder as anchor
/// ("going up and to the left of you").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AnchoredDirection {
    pub lateral: Option<Lateral>,
    pub vertical: Option<Vertical>,
    pub depth: Option<Depth>,
}

impl AnchoredDirection {
    pub fn arity(&self) -> usize {
        self.lateral.is_some() as usize + self.vertical.is_some() as usize + self.depth.is_some() as usize
    }

    /// A world-space unit step that classifies back to this direction.
    pub fn representative_step(&self, pose: &BuilderPose) -> [i32; 3] {
        let p = [
            self.lateral.map_or(0, Lateral::sign),
            self.vertical.map_or(0, Vertical::sign),
            self.depth.map_or(0, Depth::sign),
        ];
        world_delta(p, pose)
    }
}

pub fn classify_anchored_direction(step: [i32; 3], pose: &BuilderPose) -> Result<AnchoredDirection, GeometryError> {
    if step == [0, 0, 0] {
        return Err(GeometryError::ZeroStep);
    }
    let p = perspective_delta(step, pose);
    Ok(AnchoredDirection {
        lateral: Lateral::from_sign(p[0]),
        vertical: Vertical::from_sign(p[1]),
        depth: Depth::from_sign(p[2]),
    })
}

fn cell_of(v: f64) -> i32 {
    (v + 0.5).floor() as i32
}

/// Voxel traversal from `from` to the center of `target`; true when no
/// occupied cell other than `target` lies on the segment.
pub fn line_of_sight(from: [f64; 3], target: &Cell, world: &Structure) -> bool {
    let to = target.to_f64();
    let dir = [to[0] - from[0], to[1] - from[1], to[2] - from[2]];
    let mut cell = [cell_of(from[0]), cell_of(from[1]), cell_of(from[2])];
    let goal = [target.x, target.y, target.z];
    let mut step = [0i32; 3];
    let mut t_max = [f64::INFINITY; 3];
    let mut t_delta = [f64::INFINITY; 3];
    for i in 0..3 {
        if dir[i] > 0.0 {
            step[i] = 1;
            let boundary = cell[i] as f64 + 0.5;
            t_max[i] = (boundary - from[i]) / dir[i];
            t_delta[i] = 1.0 / dir[i];
        } else if dir[i] < 0.0 {
            step[i] = -1;
            let boundary = cell[i] as f64 - 0.5;
            t_max[i] = (boundary - from[i]) / dir[i];
            t_delta[i] = -1.0 / dir[i];
        }
    }
    // bounded: each step moves one cell toward the goal along some axis
    let budget = (0..3).map(|i| (goal[i] - cell[i]).abs()).sum::<i32>() + 3;
    for _ in 0..budget {
        if cell == goal {
            return true;
        }
        let here = Cell::new(cell[0], cell[1], cell[2]);
        if world.is_occupied(&here) {
            return false;
        }
        let axis = if t_max[0] <= t_max[1] && t_max[0] <= t_max[2] {
            0
        } else if t_max[1] <= t_max[2] {
            1
        } else {
            2
        };
        if t_max[axis] > 1.0 {
            break;
        }
        cell[axis] += step[axis];
        t_max[axis] += t_delta[axis];
    }
    true
}

fn eye(loc: [f64; 3], bounds: &PoseBounds) -> [f64; 3] {
    [loc[0], loc[1] + bounds.eye_height, loc[2]]
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Integer feet positions from which the Builder can see `reference`.
pub fn feasible_positions(reference: &Cell, world: &Structure, bounds: &PoseBounds) -> Vec<[f64; 3]> {
    let reach = bounds.max_dist.ceil() as i32 + 1;
    let target = reference.to_f64();
    let mut out = Vec::new();
    let x_lo = (reference.x - reach).max(X_MIN - reach);
    let x_hi = (reference.x + reach).min(X_MAX + reach);
    let z_lo = (reference.z - reach).max(Z_MIN - reach);
    let z_hi = (reference.z + reach).min(Z_MAX + reach);
    for x in x_lo..=x_hi {
        for y in Y_MIN..=bounds.max_feet_y {
            for z in z_lo..=z_hi {
                let feet = Cell::new(x, y, z);
                let head = feet.offset(0, 1, 0);
                if world.is_occupied(&feet) || world.is_occupied(&head) {
                    continue;
                }
                let loc = feet.to_f64();
                let e = eye(loc, bounds);
                let d = dist(e, target);
                if d < bounds.min_dist || d > bounds.max_dist {
                    continue;
                }
                if bounds.require_line_of_sight && !line_of_sight(e, reference, world) {
                    continue;
                }
                out.push(loc);
            }
        }
    }
    out
}

/// Draws a Builder pose that looks roughly at `reference`.
///
/// The position is uniform over [`feasible_positions`]; yaw and pitch are
/// normal around the optimal gaze from the eye with standard deviations
/// `h/2` and `v/2`. Yaw wraps into `[-180, 180]`, pitch is clamped to
/// `[-90, 90]`, and both are rounded to one decimal.
pub fn sample_pose<R: Rng + ?Sized>(
    rng: &mut R,
    reference: &Cell,
    world: &Structure,
    fov: &FieldOfView,
    bounds: &PoseBounds,
) -> Result<BuilderPose, GeometryError> {
    let candidates = feasible_positions(reference, world, bounds);
    sample_pose_among(rng, reference, &candidates, fov, bounds)
}

/// [`sample_pose`] over precomputed feet positions.
pub fn sample_pose_among<R: Rng + ?Sized>(
    rng: &mut R,
    reference: &Cell,
    candidates: &[[f64; 3]],
    fov: &FieldOfView,
    bounds: &PoseBounds,
) -> Result<BuilderPose, GeometryError> {
    if candidates.is_empty() {
        return Err(GeometryError::NoFeasiblePosition(*reference));
    }
    let loc = candidates[rng.random_range(0..candidates.len())];
    let (yaw_star, pitch_star) = optimal_gaze(eye(loc, bounds), reference)?;
    let yaw_noise = Normal::new(0.0, fov.horizontal / 2.0).expect("positive fov");
    let pitch_noise = Normal::new(0.0, fov.vertical / 2.0).expect("positive fov");
    let yaw = round_tenth(wrap_degrees(yaw_star + yaw_noise.sample(rng)));
    let pitch = round_tenth((pitch_star + pitch_noise.sample(rng)).clamp(-90.0, 90.0));
    Ok(BuilderPose::new(loc, yaw, pitch))
}

/// Eye point of a pose under `bounds`.
pub fn eye_point(pose: &BuilderPose, bounds: &PoseBounds) -> [f64; 3] {
    eye(pose.loc, bounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: i32, y: i32, z: i32) -> Cell {
        Cell::new(x, y, z)
    }

    fn pose(yaw: f64) -> BuilderPose {
        BuilderPose::new([0.0, 0.0, 0.0], yaw, 0.0)
    }

    fn close(a: PerspectiveCoord, b: [f64; 3]) -> bool {
        (a.x - b[0]).abs() < 1e-9 && (a.y - b[1]).abs() < 1e-9 && (a.z - b[2]).abs() < 1e-9
    }

    #[test]
    fn perspective_examples() {
        assert!(close(to_perspective([1.0, 2.0, 3.0], &pose(0.0)), [1.0, 2.0, 3.0]));
        assert!(close(to_perspective([1.0, 0.0, 0.0], &pose(90.0)), [0.0, 0.0, 1.0]));
        let pitched = BuilderPose::new([0.0; 3], 0.0, 90.0);
        assert!(close(to_perspective([0.0, 1.0, 0.0], &pitched), [0.0, 0.0, -1.0]));
    }

    #[test]
    fn gaze_examples() {
        let (yaw, pitch) = optimal_gaze([0.0, 1.0, -4.0], &c(0, 1, 0)).unwrap();
        assert!(yaw.abs() < 1e-12 && pitch.abs() < 1e-12);
        let (_, pitch) = optimal_gaze([0.0, 2.0, -4.0], &c(0, 1, 0)).unwrap();
        assert!((pitch - 0.25f64.atan().to_degrees()).abs() < 1e-9);
        assert!((pitch - 14.036).abs() < 1e-3);
        let (yaw, _) = optimal_gaze([4.0, 1.0, 0.0], &c(0, 1, 0)).unwrap();
        assert!((yaw + 90.0).abs() < 1e-9);
        assert_eq!(optimal_gaze([0.0, 1.0, 0.0], &c(0, 1, 0)), Err(GeometryError::CoincidentPoints));
    }

    #[test]
    fn gaze_puts_target_on_the_view_axis() {
        for from in [[4.0, 1.0, 0.0], [-3.0, 5.0, 2.0], [2.5, 2.6, -6.0], [0.0, 3.0, 7.0]] {
            let target = c(1, 2, -1);
            let (yaw, pitch) = optimal_gaze(from, &target).unwrap();
            let p = to_perspective(target.to_f64(), &BuilderPose::new(from, yaw, pitch));
            assert!(p.x.abs() < 1e-9 && p.y.abs() < 1e-9 && p.z > 0.0, "{from:?} -> {p:?}");
        }
    }

    #[test]
    fn relation_examples() {
        let rel = classify_relation(&c(3, 1, 3), &c(2, 1, 3), &pose(0.0)).unwrap();
        assert_eq!(rel, SpatialRelation { lateral: Some(Lateral::Left), vertical: None, depth: None });
        for yaw in [0.0, 37.5, -120.0, 180.0] {
            let rel = classify_relation(&c(0, 3, 0), &c(0, 1, 0), &pose(yaw)).unwrap();
            assert_eq!(rel, SpatialRelation { lateral: None, vertical: Some(Vertical::Above), depth: None });
        }
        let rel = classify_relation(&c(1, 2, 1), &c(0, 1, 0), &pose(0.0)).unwrap();
        assert_eq!(rel.arity(), 3);
        assert!(classify_relation(&c(0, 1, 0), &c(0, 1, 0), &pose(0.0)).is_err());
    }

    #[test]
    fn relation_taxonomy_counts() {
        let all = SpatialRelation::all();
        assert_eq!(all.iter().filter(|r| r.arity() == 1).count(), 6);
        assert_eq!(all.iter().filter(|r| r.arity() == 2).count(), 12);
        assert_eq!(all.iter().filter(|r| r.arity() == 3).count(), 8);
    }

    #[test]
    fn offset_set_examples() {
        let r = c(0, 4, 0);
        let above = SpatialRelation { lateral: None, vertical: Some(Vertical::Above), depth: None };
        assert_eq!(relation_offset_set(&above, &r, &pose(12.0), 1), BTreeSet::from([c(0, 5, 0)]));
        for rel in SpatialRelation::all().into_iter().filter(|r| r.arity() == 3) {
            for yaw in [0.0, 44.9, 45.0, 100.0, -170.0] {
                let set = relation_offset_set(&rel, &r, &pose(yaw), 1);
                assert_eq!(set.len(), 1);
                for cell in set {
                    assert_eq!(classify_relation(&cell, &r, &pose(yaw)).unwrap(), rel);
                }
            }
        }
    }

    #[test]
    fn turning_around_swaps_sides() {
        let r = c(0, 3, 0);
        for yaw in [-170.0, -90.0, -45.0, 0.0, 10.0, 45.0, 89.9, 135.0] {
            let back = wrap_degrees(yaw + 180.0);
            for p in r.connected_neighborhood() {
                let a = classify_relation(&p, &r, &pose(yaw)).unwrap();
                let b = classify_relation(&p, &r, &pose(back)).unwrap();
                assert_eq!(a.turned_around(), b, "yaw {yaw}");
            }
        }
    }

    #[test]
    fn anchored_directions() {
        let up = classify_anchored_direction([0, 1, 0], &pose(0.0)).unwrap();
        assert_eq!(up, AnchoredDirection { lateral: None, vertical: Some(Vertical::Above), depth: None });
        let left = classify_anchored_direction([1, 0, 0], &pose(0.0)).unwrap();
        assert_eq!(left.lateral, Some(Lateral::Left));
        assert_eq!(classify_anchored_direction([0, 0, 0], &pose(0.0)), Err(GeometryError::ZeroStep));
        for yaw in [0.0, 60.0, 150.0, -100.0] {
            let p = pose(yaw);
            for step in c(0, 0, 0).connected_neighborhood() {
                let step = [step.x, step.y, step.z];
                let dir = classify_anchored_direction(step, &p).unwrap();
                assert_eq!(dir.representative_step(&p), step);
            }
        }
    }

    #[test]
    fn dominance_rule() {
        let r = c(0, 1, 0);
        let p0 = pose(0.0);
        assert_eq!(dominant_horizontal(&c(2, 1, 1), &r, &p0), Some(DominantAxis::Lateral(Lateral::Left)));
        assert_eq!(dominant_horizontal(&c(1, 1, 2), &r, &p0), Some(DominantAxis::Depth(Depth::Behind)));
        assert_eq!(dominant_horizontal(&c(1, 1, -1), &r, &p0), Some(DominantAxis::Depth(Depth::Front)));
        assert_eq!(dominant_horizontal(&c(0, 3, 0), &r, &p0), None);
    }

    #[test]
    fn line_of_sight_blocked_by_wall() {
        let target = c(0, 1, 0);
        let wall: Structure = (-1..=1)
            .flat_map(|x| (1..=3).map(move |y| (c(x, y, -2), crate::world::BlockColor::Red)))
            .collect();
        assert!(!line_of_sight([0.0, 1.6, -5.0], &target, &wall));
        assert!(line_of_sight([0.0, 1.6, 5.0], &target, &wall));
        assert!(line_of_sight([0.0, 1.6, -5.0], &target, &Structure::new()));
    }

    #[test]
    fn sampled_pose_is_deterministic_and_sees_reference() {
        let target = c(0, 1, 0);
        let world = Structure::new();
        let fov = FieldOfView::default();
        let bounds = PoseBounds::default();
        let a = sample_pose(&mut ChaCha8Rng::seed_from_u64(3), &target, &world, &fov, &bounds).unwrap();
        let b = sample_pose(&mut ChaCha8Rng::seed_from_u64(3), &target, &world, &fov, &bounds).unwrap();
        assert_eq!(a, b);
        assert!(a.angles_valid());
        let e = eye_point(&a, &bounds);
        let d = dist(e, target.to_f64());
        assert!((bounds.min_dist..=bounds.max_dist).contains(&d));
    }

    #[test]
    fn wrap_is_idempotent() {
        for a in [-540.0, -180.0, -179.9, 0.0, 179.9, 180.0, 181.0, 360.0, 725.5] {
            let w = wrap_degrees(a);
            assert!((-180.0..=180.0).contains(&w));
            assert_eq!(wrap_degrees(w), w);
        }
    }
}
