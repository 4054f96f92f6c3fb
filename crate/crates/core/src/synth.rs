//! Seeded synthetic inputs: stereo scenes with known disparity, random cost
//! volumes and random flow networks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::CostVolume;
use crate::graphcut::{FlowNetwork, NetworkBuilder};
use crate::imaging::{GrayImage, RgbImage, StereoPair};

/// A rendered stereo pair with its right-view disparity map.
#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub pair: StereoPair,
    /// `dis * scale` per right pixel; never 0.
    pub ground_truth: GrayImage,
    pub scale: u32,
    pub disparity: Vec<i64>,
}

enum Shape {
    Rect { x0: i64, y0: i64, x1: i64, y1: i64 },
    Disc { cx: i64, cy: i64, r2: i64 },
}

impl Shape {
    fn contains(&self, x: i64, y: i64) -> bool {
        match *self {
            Shape::Rect { x0, y0, x1, y1 } => (x0..x1).contains(&x) && (y0..y1).contains(&y),
            Shape::Disc { cx, cy, r2 } => (x - cx).pow(2) + (y - cy).pow(2) <= r2,
        }
    }
}

/// A fronto-parallel layered scene in the spirit of the classic lab scenes:
/// a slanted background at the far end of `[dis_min, dis_max]` and a few
/// nearer rectangles and discs, each with its own smooth texture.
///
/// The right image is textured directly; the left image is forward-warped
/// from it (`x_l = x_r + dis`, nearer surfaces win) and left pixels seen by
/// no right pixel get fresh texture.
pub fn synthetic_scene(width: usize, height: usize, dis_min: i64, dis_max: i64, seed: u64) -> SyntheticScene {
    assert!(width > 0 && height > 0 && 0 <= dis_min && dis_min <= dis_max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width as i64, height as i64);
    let span = dis_max - dis_min;

    let objects = 5;
    let mut layers: Vec<(Shape, i64)> = Vec::new();
    for k in 0..objects {
        let dis = dis_min + span * (k + 2) / (objects + 1);
        let shape = if rng.gen_bool(0.5) {
            let x0 = rng.gen_range(0..w * 3 / 4);
            let y0 = rng.gen_range(0..h * 3 / 4);
            Shape::Rect {
                x0,
                y0,
                x1: x0 + rng.gen_range(w / 8..=w / 3),
                y1: y0 + rng.gen_range(h / 8..=h / 3),
            }
        } else {
            let r = rng.gen_range((w.min(h) / 10).max(1)..=(w.min(h) / 5).max(1));
            Shape::Disc {
                cx: rng.gen_range(0..w),
                cy: rng.gen_range(0..h),
                r2: r * r,
            }
        };
        layers.push((shape, dis));
    }

    let mut disparity = vec![0i64; width * height];
    let mut surface = vec![0usize; width * height];
    for y in 0..h {
        for x in 0..w {
            // Background: a gentle slant over the far third of the range.
            let mut dis = dis_min + (span / 3) * y / h.max(1);
            let mut id = 0;
            for (k, (shape, d)) in layers.iter().enumerate() {
                if shape.contains(x, y) && *d >= dis {
                    dis = *d;
                    id = k + 1;
                }
            }
            disparity[(y * w + x) as usize] = dis;
            surface[(y * w + x) as usize] = id;
        }
    }

    let texture = smooth_noise(width, height, &mut rng);
    let tints: Vec<[i64; 3]> = (0..=objects)
        .map(|_| [rng.gen_range(40..200), rng.gen_range(40..200), rng.gen_range(40..200)])
        .collect();
    let mut right = vec![0u8; width * height * 3];
    for i in 0..width * height {
        let tint = tints[surface[i]];
        for c in 0..3 {
            right[3 * i + c] = (tint[c] + texture[3 * i + c] - 64).clamp(0, 255) as u8;
        }
    }

    let filler = smooth_noise(width, height, &mut rng);
    let mut left = vec![0u8; width * height * 3];
    let mut depth = vec![-1i64; width * height];
    for y in 0..h {
        for x in 0..w {
            let dis = disparity[(y * w + x) as usize];
            let xl = x + dis;
            if xl >= w {
                continue;
            }
            let j = (y * w + xl) as usize;
            if dis > depth[j] {
                depth[j] = dis;
                let i = (y * w + x) as usize;
                left[3 * j..3 * j + 3].copy_from_slice(&right[3 * i..3 * i + 3]);
            }
        }
    }
    for j in 0..width * height {
        if depth[j] < 0 {
            for c in 0..3 {
                left[3 * j + c] = (100 + filler[3 * j + c]).clamp(0, 255) as u8;
            }
        }
    }
    // Mild sensor noise on both views.
    for px in left.iter_mut().chain(right.iter_mut()) {
        *px = (*px as i64 + rng.gen_range(-2..=2)).clamp(0, 255) as u8;
    }

    let scale = (255 / dis_max.max(1)).clamp(1, 8) as u32;
    let gt: Vec<u8> = disparity
        .iter()
        .map(|&d| (d * scale as i64).clamp(1, 255) as u8)
        .collect();
    let pair = StereoPair::new(
        RgbImage::new(width, height, left).expect("sizes match"),
        RgbImage::new(width, height, right).expect("sizes match"),
    )
    .expect("same size");
    SyntheticScene {
        pair,
        ground_truth: GrayImage::new(width, height, gt).expect("sizes match"),
        scale,
        disparity,
    }
}

/// Per-channel noise in `[0, 128)` smoothed by a 3x3 box filter.
fn smooth_noise(width: usize, height: usize, rng: &mut ChaCha8Rng) -> Vec<i64> {
    let raw: Vec<i64> = (0..width * height * 3).map(|_| rng.gen_range(0..128)).collect();
    let mut out = vec![0i64; raw.len()];
    for y in 0..height {
        for x in 0..width {
            for c in 0..3 {
                let (mut sum, mut n) = (0, 0);
                for yy in y.saturating_sub(1)..(y + 2).min(height) {
                    for xx in x.saturating_sub(1)..(x + 2).min(width) {
                        sum += raw[3 * (yy * width + xx) + c];
                        n += 1;
                    }
                }
                out[3 * (y * width + x) + c] = sum / n;
            }
        }
    }
    out
}

/// Uniform random data costs in `[0, max_cost]`.
pub fn random_volume(rng: &mut impl Rng, g_extent: usize, y_extent: usize, labels: usize, max_cost: i64) -> CostVolume {
    let costs = (0..g_extent * y_extent * labels)
        .map(|_| rng.gen_range(0..=max_cost))
        .collect();
    CostVolume::new(g_extent, y_extent, labels, costs).expect("valid extents")
}

/// A random network on `nodes` nodes (source 0, sink 1) with about
/// `nodes * degree` edges of capacity in `[0, max_cap]`; some edges carry
/// capacity both ways.
pub fn random_network(rng: &mut impl Rng, nodes: usize, degree: usize, max_cap: i64) -> FlowNetwork {
    assert!(nodes >= 2);
    let mut b = NetworkBuilder::new(nodes);
    let n = nodes as u32;
    for _ in 0..nodes * degree {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let rev = if rng.gen_bool(0.3) { rng.gen_range(0..=max_cap) } else { 0 };
        b.add_edge(u, v, rng.gen_range(0..=max_cap), rev);
    }
    // Make sure both terminals are connected to something.
    if n > 2 {
        b.add_edge(0, rng.gen_range(2..n), rng.gen_range(1..=max_cap.max(1)), 0);
        b.add_edge(rng.gen_range(2..n), 1, rng.gen_range(1..=max_cap.max(1)), 0);
    }
    b.finish().expect("small network")
}
