//! Straight-line TU trajectories sampled once per tic.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geom::Point;

pub const DEFAULT_TIC_MS: f64 = 10.0;
/// 70 000 ms of running time at 10 ms per tic.
pub const DEFAULT_DURATION_TICS: u32 = 7000;

/// A TU moving from `start` toward `end` at constant speed, parking at `end` if it arrives early.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub start: Point,
    pub end: Point,
    pub velocity_kmh: f64,
    pub duration_tics: u32,
    pub tic_ms: f64,
}

impl Route {
    pub fn new(start: Point, end: Point, velocity_kmh: f64) -> Self {
        Route {
            start,
            end,
            velocity_kmh,
            duration_tics: DEFAULT_DURATION_TICS,
            tic_ms: DEFAULT_TIC_MS,
        }
    }

    /// Case A: diagonal from (1000, 0) to (0, 1000).
    pub fn case_a(velocity_kmh: f64) -> Self {
        Route::new(Point::new(1000.0, 0.0), Point::new(0.0, 1000.0), velocity_kmh)
    }

    /// Case B: horizontal from (1000, 500) to (0, 500).
    pub fn case_b(velocity_kmh: f64) -> Self {
        Route::new(Point::new(1000.0, 500.0), Point::new(0.0, 500.0), velocity_kmh)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.velocity_kmh > 0.0 && self.velocity_kmh.is_finite()) {
            return Err(SimError::config("velocity_kmh", "must be a positive speed"));
        }
        if !(self.tic_ms > 0.0 && self.tic_ms.is_finite()) {
            return Err(SimError::config("mobility.tic_ms", "must be positive"));
        }
        if self.duration_tics == 0 {
            return Err(SimError::config("mobility.duration_tics", "must be at least 1"));
        }
        if self.length_m() == 0.0 {
            return Err(SimError::config("mobility.route", "start and end coincide"));
        }
        Ok(())
    }

    pub fn length_m(&self) -> f64 {
        self.start.distance_to(self.end)
    }

    /// Heading of `end - start`, counter-clockwise from the +x axis, in [0, 360).
    pub fn theta_deg(&self) -> f64 {
        let deg = (self.end.y - self.start.y)
            .atan2(self.end.x - self.start.x)
            .to_degrees();
        if deg < 0.0 {
            deg + 360.0
        } else {
            deg
        }
    }

    /// Distance covered per tic, in meters.
    pub fn step_m(&self) -> f64 {
        self.velocity_kmh / 3.6 * self.tic_ms / 1000.0
    }

    pub fn position_at(&self, tic: u32) -> Result<Point> {
        if tic > self.duration_tics {
            return Err(SimError::Domain(format!(
                "tic {tic} outside route duration 0..={}",
                self.duration_tics
            )));
        }
        let len = self.length_m();
        let travelled = (f64::from(tic) * self.step_m()).min(len);
        if travelled >= len {
            return Ok(self.end);
        }
        let f = travelled / len;
        Ok(Point::new(
            self.start.x + f * (self.end.x - self.start.x),
            self.start.y + f * (self.end.y - self.start.y),
        ))
    }
}
