//! gNB placement over the simulation arena.
//!
//! Deployments are Poisson point process realizations conditioned on their
//! count: exactly `den_gnb` sites, each drawn independently and uniformly
//! over the arena.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geom::Point;

/// Rectangular simulation area anchored at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Arena {
    pub width_m: f64,
    pub height_m: f64,
}

impl Default for Arena {
    fn default() -> Self {
        Arena {
            width_m: 1000.0,
            height_m: 1000.0,
        }
    }
}

impl Arena {
    pub fn validate(&self) -> Result<()> {
        if !(self.width_m > 0.0 && self.width_m.is_finite()) {
            return Err(SimError::config("arena.width_m", "must be a positive finite length"));
        }
        if !(self.height_m > 0.0 && self.height_m.is_finite()) {
            return Err(SimError::config("arena.height_m", "must be a positive finite length"));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width_m).contains(&p.x) && (0.0..=self.height_m).contains(&p.y)
    }

    /// Area in square kilometers.
    pub fn area_km2(&self) -> f64 {
        self.width_m * self.height_m / 1e6
    }
}

/// Radio characteristics shared by every deployed gNB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnbProfile {
    pub coverage_m: f64,
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
    /// Antenna height. Carried for completeness; the default pathloss model has no height term.
    pub height_m: f64,
}

impl Default for GnbProfile {
    fn default() -> Self {
        GnbProfile {
            coverage_m: 300.0,
            tx_power_dbm: 30.0,
            antenna_gain_dbi: 15.0,
            height_m: 15.0,
        }
    }
}

impl GnbProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.coverage_m > 0.0 && self.coverage_m.is_finite()) {
            return Err(SimError::config("radio.coverage_m", "must be a positive finite radius"));
        }
        if !self.tx_power_dbm.is_finite() {
            return Err(SimError::config("radio.tx_power_dbm", "must be finite"));
        }
        if !self.antenna_gain_dbi.is_finite() {
            return Err(SimError::config("radio.antenna_gain_dbi", "must be finite"));
        }
        if !(self.height_m >= 0.0 && self.height_m.is_finite()) {
            return Err(SimError::config("radio.gnb_height_m", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gnb {
    pub id: usize,
    pub position: Point,
}

/// All gNBs deployed in one replicate. Ids are contiguous from 0 and equal the index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbSet {
    gnbs: Vec<Gnb>,
    pub profile: GnbProfile,
}

impl GnbSet {
    /// Builds a set from explicit positions; ids follow the slice order.
    pub fn from_positions(positions: &[Point], profile: GnbProfile) -> Self {
        let gnbs = positions
            .iter()
            .enumerate()
            .map(|(id, &position)| Gnb { id, position })
            .collect();
        GnbSet { gnbs, profile }
    }

    pub fn gnbs(&self) -> &[Gnb] {
        &self.gnbs
    }

    pub fn get(&self, id: usize) -> Option<&Gnb> {
        self.gnbs.get(id)
    }

    pub fn len(&self) -> usize {
        self.gnbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gnbs.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Point> + '_ {
        self.gnbs.iter().map(|g| g.position)
    }
}

/// Places exactly `den_gnb` gNBs uniformly at random over `arena`.
pub fn deploy_gnbs<R: Rng + ?Sized>(
    arena: &Arena,
    den_gnb: u32,
    profile: GnbProfile,
    rng: &mut R,
) -> Result<GnbSet> {
    arena.validate()?;
    if den_gnb == 0 {
        return Err(SimError::config("den_gnb", "at least one gNB is required"));
    }
    let positions: Vec<Point> = (0..den_gnb)
        .map(|_| {
            let x = rng.random::<f64>() * arena.width_m;
            let y = rng.random::<f64>() * arena.height_m;
            Point::new(x, y)
        })
        .collect();
    Ok(GnbSet::from_positions(&positions, profile))
}
