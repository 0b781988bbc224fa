//! Two-ray pathloss geometry: where a relay can sit and still be capacity-achieving.

use serde::{Deserialize, Serialize};

use crate::capacity::{relay_condition_holds, wi_feasible};
use crate::error::{domain, Result};
use crate::model::SnrSextet;

pub const DEFAULT_PATHLOSS_EXPONENT: f64 = 4.0;
const MIN_SEPARATION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, o: &Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeLayout {
    pub tx1: Point,
    pub rx1: Point,
    pub tx2: Point,
    pub rx2: Point,
}

impl Default for NodeLayout {
    fn default() -> Self {
        NodeLayout {
            tx1: Point::new(0.0, 0.0),
            rx1: Point::new(2.0, 0.0),
            tx2: Point::new(0.0, 2.0),
            rx2: Point::new(2.0, 2.0),
        }
    }
}

impl NodeLayout {
    pub fn nodes(&self) -> [Point; 4] {
        [self.tx1, self.rx1, self.tx2, self.rx2]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nodes();
        for i in 0..4 {
            if !(n[i].x.is_finite() && n[i].y.is_finite()) {
                return domain("node coordinates must be finite");
            }
            for j in i + 1..4 {
                if n[i].dist(&n[j]) <= 0.0 {
                    return domain("two nodes share a position");
                }
            }
        }
        Ok(())
    }
}

/// Bounding box sampled at cell centres, `resolution` cells per side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub resolution: usize,
}

impl Default for RegionGrid {
    fn default() -> Self {
        RegionGrid { x_min: -1.0, x_max: 3.0, y_min: -1.0, y_max: 3.0, resolution: 200 }
    }
}

impl RegionGrid {
    pub fn cell(&self, ix: usize, iy: usize) -> Point {
        let n = self.resolution as f64;
        Point::new(
            self.x_min + (ix as f64 + 0.5) * (self.x_max - self.x_min) / n,
            self.y_min + (iy as f64 + 0.5) * (self.y_max - self.y_min) / n,
        )
    }
}

fn gain(a: &Point, b: &Point, exponent: f64) -> f64 {
    a.dist(b).powf(-exponent)
}

pub fn snr_from_layout_with(layout: &NodeLayout, relay: &Point, exponent: f64) -> Result<SnrSextet> {
    layout.validate()?;
    if !(exponent.is_finite() && exponent > 0.0) {
        return domain(format!("pathloss exponent {exponent} must be positive"));
    }
    for n in layout.nodes() {
        if n.dist(relay) < MIN_SEPARATION {
            return domain(format!("relay at ({}, {}) coincides with a node", relay.x, relay.y));
        }
    }
    let g = |a: &Point, b: &Point| gain(a, b, exponent);
    SnrSextet::new(
        g(&layout.tx1, &layout.rx1),
        g(&layout.tx2, &layout.rx1),
        g(relay, &layout.rx1),
        g(&layout.tx2, &layout.rx2),
        g(relay, &layout.rx2),
        g(&layout.tx1, relay),
    )
}

/// Link SNRs with unit transmit power and pathloss d^-4.
pub fn snr_from_layout(layout: &NodeLayout, relay: &Point) -> Result<SnrSextet> {
    snr_from_layout_with(layout, relay, DEFAULT_PATHLOSS_EXPONENT)
}

/// Whether a relay at this point gives a certified sum capacity.
pub fn relay_position_ok(layout: &NodeLayout, relay: &Point, exponent: f64) -> bool {
    match snr_from_layout_with(layout, relay, exponent) {
        Ok(s) => relay_condition_holds(&s) && wi_feasible(&s).is_some(),
        Err(_) => false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    pub grid: RegionGrid,
    /// Row-major in y, then x.
    pub inside: Vec<bool>,
}

impl RegionMask {
    pub fn cells(&self) -> impl Iterator<Item = (Point, bool)> + '_ {
        let n = self.grid.resolution;
        (0..n).flat_map(move |iy| (0..n).map(move |ix| (self.grid.cell(ix, iy), self.inside[iy * n + ix])))
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn centroid(&self) -> Option<Point> {
        let (mut sx, mut sy, mut k) = (0.0, 0.0, 0usize);
        for (p, inside) in self.cells() {
            if inside {
                sx += p.x;
                sy += p.y;
                k += 1;
            }
        }
        (k > 0).then(|| Point::new(sx / k as f64, sy / k as f64))
    }
}

pub fn relay_region_with(layout: &NodeLayout, grid: &RegionGrid, exponent: f64) -> Result<RegionMask> {
    layout.validate()?;
    if grid.resolution == 0 || !(grid.x_max > grid.x_min && grid.y_max > grid.y_min) {
        return domain("region grid must have positive extent and resolution");
    }
    let n = grid.resolution;
    let mut inside = Vec::with_capacity(n * n);
    for iy in 0..n {
        for ix in 0..n {
            inside.push(relay_position_ok(layout, &grid.cell(ix, iy), exponent));
        }
    }
    Ok(RegionMask { grid: *grid, inside })
}

pub fn relay_region(layout: &NodeLayout, grid: &RegionGrid) -> Result<RegionMask> {
    relay_region_with(layout, grid, DEFAULT_PATHLOSS_EXPONENT)
}
