//! The labeling energy: a per-cross-point data term plus a convex pairwise
//! term over 4-connected gaze lines.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::CuboidSpec;
use crate::imaging::StereoPair;

/// Capacity that no minimum cut ever crosses.
pub const UNCUTTABLE: i64 = 1 << 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnergyParams {
    /// Cost per unit of depth-label difference between neighbors.
    pub penalty: i64,
    /// Surcharge per unit of difference beyond one.
    pub inhibit: i64,
    /// Forbid differences beyond one outright instead of charging `inhibit`.
    pub hard_inhibit: bool,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            penalty: 14,
            inhibit: 1023,
            hard_inhibit: false,
        }
    }
}

impl EnergyParams {
    pub fn new(penalty: i64, inhibit: i64) -> Self {
        EnergyParams {
            penalty,
            inhibit,
            hard_inhibit: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.penalty < 0 || self.inhibit < 0 {
            return Err(Error::Config(format!(
                "penalty {} and inhibit {} must be non-negative",
                self.penalty, self.inhibit
            )));
        }
        Ok(())
    }

    /// Capacity of the arcs that carry the inhibit surcharge.
    pub fn inhibit_capacity(&self) -> i64 {
        if self.hard_inhibit {
            UNCUTTABLE
        } else {
            self.inhibit
        }
    }

    /// The pairwise cost as a function of the label difference.
    pub fn profile(&self, diff: i64) -> i64 {
        let a = diff.abs();
        let beyond = if a > 1 { a - 1 } else { 0 };
        self.penalty * a + self.inhibit * beyond
    }
}

/// Sum of absolute RGB differences, in `[0, 765]`.
#[inline]
pub fn data_term(left: [u8; 3], right: [u8; 3]) -> i64 {
    left.iter()
        .zip(right.iter())
        .map(|(&a, &b)| (a as i64 - b as i64).abs())
        .sum()
}

/// `penalty * |i - j| + inhibit * (|i - j| - 1) * [|i - j| > 1]`.
///
/// In hard-inhibit mode a difference beyond one costs [`UNCUTTABLE`].
#[inline]
pub fn pairwise_term(i: u32, j: u32, params: &EnergyParams) -> i64 {
    let diff = (i as i64 - j as i64).abs();
    if params.hard_inhibit && diff > 1 {
        return UNCUTTABLE;
    }
    params.profile(diff)
}

/// True iff `h(i + 1) - 2 h(i) + h(i - 1) >= 0` for every interior `i` of
/// `[-(m - 1), m - 1]`.
pub fn verify_convexity(h: impl Fn(i64) -> i64, labels: usize) -> bool {
    let r = labels as i64 - 1;
    ((-r + 1)..r).all(|i| h(i + 1) - 2 * h(i) + h(i - 1) >= 0)
}

/// Per-site depth labels over a `g_extent x y_extent` site grid, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labeling {
    g_extent: usize,
    y_extent: usize,
    labels: Vec<u32>,
}

impl Labeling {
    pub fn new(g_extent: usize, y_extent: usize, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != g_extent * y_extent {
            return Err(Error::Energy(format!(
                "{} labels for a {g_extent}x{y_extent} site grid",
                labels.len()
            )));
        }
        Ok(Labeling {
            g_extent,
            y_extent,
            labels,
        })
    }

    pub fn uniform(g_extent: usize, y_extent: usize, label: u32) -> Self {
        Labeling {
            g_extent,
            y_extent,
            labels: vec![label; g_extent * y_extent],
        }
    }

    pub fn g_extent(&self) -> usize {
        self.g_extent
    }

    pub fn y_extent(&self) -> usize {
        self.y_extent
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, w: usize, h: usize) -> u32 {
        self.labels[h * self.g_extent + w]
    }

    pub fn max_label(&self) -> u32 {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    /// Largest label difference over all neighbor pairs.
    pub fn max_neighbor_step(&self) -> u32 {
        NeighborSystem::new(self.g_extent, self.y_extent)
            .pairs()
            .map(|(u, v)| self.labels[u].abs_diff(self.labels[v]))
            .max()
            .unwrap_or(0)
    }
}

/// The 4-connected neighborhood of a site grid. Each unordered pair is
/// listed once, horizontal pairs before vertical pairs.
#[derive(Debug, Clone, Copy)]
pub struct NeighborSystem {
    pub g_extent: usize,
    pub y_extent: usize,
}

impl NeighborSystem {
    pub fn new(g_extent: usize, y_extent: usize) -> Self {
        NeighborSystem { g_extent, y_extent }
    }

    pub fn len(&self) -> usize {
        let (g, y) = (self.g_extent, self.y_extent);
        g.saturating_sub(1) * y + g * y.saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (g, y) = (self.g_extent, self.y_extent);
        let horizontal = (0..y).flat_map(move |h| (0..g.saturating_sub(1)).map(move |w| (h * g + w, h * g + w + 1)));
        let vertical = (0..y.saturating_sub(1)).flat_map(move |h| (0..g).map(move |w| (h * g + w, (h + 1) * g + w)));
        horizontal.chain(vertical)
    }
}

/// Data cost for cross points whose pixel falls outside an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BorderPolicy {
    /// Read the nearest in-image pixel of the same row.
    #[default]
    Clamp,
    /// Charge a fixed cost.
    Constant(i64),
}

/// Data terms of every cross point of a cuboid, indexed `site * labels + s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostVolume {
    g_extent: usize,
    y_extent: usize,
    labels: usize,
    costs: Vec<i64>,
}

impl CostVolume {
    pub fn new(g_extent: usize, y_extent: usize, labels: usize, costs: Vec<i64>) -> Result<Self> {
        if g_extent == 0 || y_extent == 0 || labels == 0 {
            return Err(Error::Energy("cost volume extents must be positive".into()));
        }
        if costs.len() != g_extent * y_extent * labels {
            return Err(Error::Energy(format!(
                "{} costs for a {g_extent}x{y_extent}x{labels} volume",
                costs.len()
            )));
        }
        if let Some(c) = costs.iter().find(|&&c| c < 0) {
            return Err(Error::Energy(format!("negative data cost {c}")));
        }
        Ok(CostVolume {
            g_extent,
            y_extent,
            labels,
            costs,
        })
    }

    /// Evaluates the data term at every cross point of `cuboid`.
    pub fn from_stereo(cuboid: &CuboidSpec, pair: &StereoPair, border: BorderPolicy) -> Result<Self> {
        if pair.width() as i64 != cuboid.image_width || pair.height() as i64 != cuboid.image_height {
            return Err(Error::Geometry(format!(
                "images are {}x{} but the cuboid expects {}x{}",
                pair.width(),
                pair.height(),
                cuboid.image_width,
                cuboid.image_height
            )));
        }
        let labels = cuboid.labels();
        let g_extent = cuboid.g_extent as usize;
        let width = cuboid.image_width;
        let mut costs = vec![0i64; cuboid.sites() * labels];
        costs
            .par_chunks_mut(g_extent * labels)
            .enumerate()
            .for_each(|(h, row)| {
                for (w, site) in row.chunks_mut(labels).enumerate() {
                    for (s, cost) in site.iter_mut().enumerate() {
                        let (x_l, x_r, y) = cuboid.pixel_columns(w as i64, h as i64, s as i64);
                        let inside = (0..width).contains(&x_l) && (0..width).contains(&x_r);
                        *cost = match (inside, border) {
                            (false, BorderPolicy::Constant(c)) => c,
                            _ => {
                                let xl = x_l.clamp(0, width - 1) as usize;
                                let xr = x_r.clamp(0, width - 1) as usize;
                                let y = y as usize;
                                data_term(pair.left.get(xl, y), pair.right.get(xr, y))
                            }
                        };
                    }
                }
            });
        CostVolume::new(g_extent, cuboid.y_extent as usize, labels, costs)
    }

    pub fn g_extent(&self) -> usize {
        self.g_extent
    }

    pub fn y_extent(&self) -> usize {
        self.y_extent
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn sites(&self) -> usize {
        self.g_extent * self.y_extent
    }

    #[inline]
    pub fn cost(&self, site: usize, label: usize) -> i64 {
        self.costs[site * self.labels + label]
    }

    #[inline]
    pub fn site_costs(&self, site: usize) -> &[i64] {
        &self.costs[site * self.labels..(site + 1) * self.labels]
    }

    pub fn neighbors(&self) -> NeighborSystem {
        NeighborSystem::new(self.g_extent, self.y_extent)
    }
}

/// `E(X)` over a precomputed cost volume.
pub fn volume_energy(labeling: &Labeling, volume: &CostVolume, params: &EnergyParams) -> Result<i64> {
    if labeling.g_extent != volume.g_extent || labeling.y_extent != volume.y_extent {
        return Err(Error::Energy("labeling and cost volume cover different site grids".into()));
    }
    if let Some(&l) = labeling.labels.iter().find(|&&l| l as usize >= volume.labels) {
        return Err(Error::Energy(format!("label {l} outside [0, {})", volume.labels)));
    }
    let data: i64 = labeling
        .labels
        .iter()
        .enumerate()
        .map(|(site, &l)| volume.cost(site, l as usize))
        .sum();
    let mut pairwise = 0i64;
    for (u, v) in volume.neighbors().pairs() {
        let (a, b) = (labeling.labels[u], labeling.labels[v]);
        if params.hard_inhibit && a.abs_diff(b) > 1 {
            return Err(Error::Energy(format!(
                "sites {u} and {v} differ by {} under the hard inhibit constraint",
                a.abs_diff(b)
            )));
        }
        pairwise += pairwise_term(a, b, params);
    }
    Ok(data + pairwise)
}

/// `E(X) = sum_v g_v(X_v) + sum_(u,v) h(X_u, X_v)` for a labeling of `cuboid`.
pub fn total_energy(
    labeling: &Labeling,
    cuboid: &CuboidSpec,
    pair: &StereoPair,
    params: &EnergyParams,
    border: BorderPolicy,
) -> Result<i64> {
    let volume = CostVolume::from_stereo(cuboid, pair, border)?;
    volume_energy(labeling, &volume, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_term_examples() {
        assert_eq!(data_term([10, 20, 30], [10, 20, 30]), 0);
        assert_eq!(data_term([255, 255, 255], [0, 0, 0]), 765);
        assert_eq!(data_term([100, 150, 200], [90, 160, 195]), 25);
    }

    #[test]
    fn pairwise_examples() {
        let p = EnergyParams::new(14, 1023);
        assert_eq!(pairwise_term(4, 4, &p), 0);
        assert_eq!(pairwise_term(4, 5, &p), 14);
        assert_eq!(pairwise_term(7, 4, &p), 2088);
        assert_eq!(pairwise_term(4, 7, &p), 2088);
    }

    #[test]
    fn convexity_examples() {
        assert!(verify_convexity(|_| 0, 5));
        let p = EnergyParams::new(14, 1023);
        assert!(verify_convexity(|k| p.profile(k), 24));
        assert!(!verify_convexity(|k| k.abs().min(2), 5));
    }

    #[test]
    fn second_differences_of_profile() {
        let p = EnergyParams::new(3, 50);
        let second = |i: i64| p.profile(i + 1) - 2 * p.profile(i) + p.profile(i - 1);
        assert_eq!(second(0), 6);
        assert_eq!(second(1), 50);
        assert_eq!(second(-1), 50);
        assert!((2..10).all(|i| second(i) == 0 && second(-i) == 0));
    }

    #[test]
    fn neighbor_counts() {
        assert_eq!(NeighborSystem::new(1, 1).len(), 0);
        assert_eq!(NeighborSystem::new(3, 2).len(), 7);
        assert_eq!(NeighborSystem::new(3, 2).pairs().count(), 7);
        assert_eq!(NeighborSystem::new(372, 288).len(), 213_612);
    }

    fn volume(g: usize, y: usize, m: usize, costs: Vec<i64>) -> CostVolume {
        CostVolume::new(g, y, m, costs).unwrap()
    }

    #[test]
    fn energy_examples() {
        let p = EnergyParams::new(14, 1023);
        let v = volume(1, 1, 3, vec![5, 6, 7]);
        assert_eq!(volume_energy(&Labeling::uniform(1, 1, 2), &v, &p).unwrap(), 7);
        let v = volume(2, 1, 2, vec![0; 4]);
        assert_eq!(volume_energy(&Labeling::uniform(2, 1, 1), &v, &p).unwrap(), 0);
        let lab = Labeling::new(2, 1, vec![0, 1]).unwrap();
        assert_eq!(volume_energy(&lab, &v, &p).unwrap(), 14);
        let bad = Labeling::new(2, 1, vec![0, 2]).unwrap();
        assert!(volume_energy(&bad, &v, &p).is_err());
    }

    #[test]
    fn hard_inhibit_rejects_jumps() {
        let p = EnergyParams {
            hard_inhibit: true,
            ..EnergyParams::new(1, 0)
        };
        let v = volume(2, 1, 3, vec![0; 6]);
        let lab = Labeling::new(2, 1, vec![0, 2]).unwrap();
        assert!(volume_energy(&lab, &v, &p).is_err());
        let lab = Labeling::new(2, 1, vec![1, 2]).unwrap();
        assert_eq!(volume_energy(&lab, &v, &p).unwrap(), 1);
    }
}
