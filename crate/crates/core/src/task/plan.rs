//! Trial plans: 15 targets, five at each of three distances, where each
//! distance is a fixed fraction of the map diagonal measured from the
//! previous target (the first from the map center).

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TaskParams;
use crate::error::{Error, Result};
use crate::geometry::{MapConfig, MapPoint};

/// Direction draws per target before the whole plan is restarted.
const DIRECTION_ATTEMPTS: usize = 512;
const PLAN_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceClass {
    Small,
    Medium,
    Large,
}

impl DistanceClass {
    pub const ALL: [DistanceClass; 3] = [Self::Small, Self::Medium, Self::Large];

    /// Fraction of the map diagonal.
    pub fn fraction(self) -> f64 {
        match self {
            Self::Small => 0.125,
            Self::Medium => 0.25,
            Self::Large => 0.5,
        }
    }

    pub fn distance(self, map: &MapConfig) -> f64 {
        self.fraction() * map.diagonal()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Small => "small",
            Self::Medium => "medium",
            Self::Large => "large",
        }
    }
}

impl fmt::Display for DistanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown distance class `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub index: usize,
    pub position: MapPoint,
    pub distance_class: DistanceClass,
    /// Selection radius on screen, meters.
    pub screen_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub map: MapConfig,
    pub seed: u64,
    pub targets: Vec<TargetSpec>,
}

impl TrialPlan {
    pub fn class_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for t in &self.targets {
            counts[t.distance_class as usize] += 1;
        }
        counts
    }

    /// Where target `index` was measured from.
    pub fn origin_of(&self, index: usize) -> MapPoint {
        match index {
            0 => MapPoint::ORIGIN,
            i => self.targets[i - 1].position,
        }
    }
}

pub fn generate_trial_plan(map: &MapConfig, seed: u64) -> Result<TrialPlan> {
    generate_trial_plan_with(map, seed, &TaskParams::default())
}

/// Shuffles the class order, then walks from the map center placing each
/// target at its exact class distance in a uniformly drawn direction,
/// rejecting directions that leave the inset map or land on an earlier
/// target. A dead end restarts the plan with the generator's next draws, so
/// the result is a pure function of `(map, seed, task)`.
pub fn generate_trial_plan_with(map: &MapConfig, seed: u64, task: &TaskParams) -> Result<TrialPlan> {
    map.validate()?;
    task.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inset = task.target_radius;
    let half_w = map.width * 0.5 - inset;
    let half_h = map.height * 0.5 - inset;
    let min_separation = 4.0 * task.target_radius;
    let inside = |p: MapPoint| p.x.abs() <= half_w && p.y.abs() <= half_h;

    let mut classes: Vec<DistanceClass> = DistanceClass::ALL
        .into_iter()
        .flat_map(|c| std::iter::repeat_n(c, task.targets_per_class))
        .collect();
    let mut failed_at = (0, 0.0);

    'plan: for _ in 0..PLAN_ATTEMPTS {
        classes.shuffle(&mut rng);
        let mut targets: Vec<TargetSpec> = Vec::with_capacity(classes.len());
        let mut from = MapPoint::ORIGIN;
        for (index, &class) in classes.iter().enumerate() {
            let distance = class.distance(map);
            let placed = (0..DIRECTION_ATTEMPTS).find_map(|_| {
                let angle = rng.random::<f64>() * std::f64::consts::TAU;
                let p = MapPoint::new(from.x + distance * angle.cos(), from.y + distance * angle.sin());
                let clear = targets.iter().all(|t| t.position.distance(p) >= min_separation);
                (inside(p) && clear).then_some(p)
            });
            let Some(position) = placed else {
                failed_at = (index, distance);
                continue 'plan;
            };
            targets.push(TargetSpec {
                index,
                position,
                distance_class: class,
                screen_radius: task.target_radius,
            });
            from = position;
        }
        return Ok(TrialPlan {
            map: map.clone(),
            seed,
            targets,
        });
    }

    Err(Error::Placement {
        index: failed_at.0,
        distance: failed_at.1,
        map: map.name.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_distances_small_map() {
        let map = MapConfig::small();
        let d: Vec<f64> = DistanceClass::ALL.iter().map(|c| c.distance(&map)).collect();
        assert!((d[0] - 0.2007).abs() < 5e-5, "{d:?}");
        assert!((d[1] - 0.4015).abs() < 5e-5, "{d:?}");
        assert!((d[2] - 0.8029).abs() < 5e-5, "{d:?}");
    }

    #[test]
    fn class_distance_large_map() {
        let d = DistanceClass::Small.distance(&MapConfig::large());
        assert!((d - 20.05).abs() < 5e-3, "{d}");
    }

    #[test]
    fn plan_is_deterministic() {
        let map = MapConfig::large();
        assert_eq!(generate_trial_plan(&map, 7).unwrap(), generate_trial_plan(&map, 7).unwrap());
        assert_ne!(generate_trial_plan(&map, 7).unwrap(), generate_trial_plan(&map, 8).unwrap());
    }

    #[test]
    fn plan_composition() {
        for map in [MapConfig::small(), MapConfig::large()] {
            let plan = generate_trial_plan(&map, 42).unwrap();
            assert_eq!(plan.targets.len(), 15);
            assert_eq!(plan.class_counts(), [5, 5, 5]);
            for (i, t) in plan.targets.iter().enumerate() {
                assert_eq!(t.index, i);
                let d = plan.origin_of(i).distance(t.position);
                assert!((d - t.distance_class.distance(&map)).abs() < 1e-6);
                assert!(t.position.x.abs() <= map.width / 2.0 - t.screen_radius);
                assert!(t.position.y.abs() <= map.height / 2.0 - t.screen_radius);
            }
        }
    }

    #[test]
    fn impossible_map_fails() {
        let task = TaskParams {
            target_radius: 0.2,
            ..TaskParams::default()
        };
        let map = MapConfig::new("thin", 0.5, 0.41).unwrap();
        assert!(matches!(generate_trial_plan_with(&map, 1, &task), Err(Error::Placement { .. })));
    }
}
