//! Coordinate systems for cross points.
//!
//! Four integer frames describe the same 3D hypothesis:
//!
//! * pixel pairs `(x_l, x_r, y)`: a left and a right column on a shared row,
//! * gaze/depth `(g, d, y)`: `x_r + x_l = w - 1 + 2g` and `x_r - x_l = -(w - 1) + 2d`,
//! * cuboid axes `(W, H, S)`: `W = g + offset1`, `H = y + offset2`, `S = d + offset3`,
//! * right-image disparity `(x, y, dis)` with `x_l = x + dis`.
//!
//! Every halving in the disparity transforms rounds away from zero through
//! [`halve_away`] so that all modules agree on the same integer grid.

use crate::error::{Error, Result};

/// `n / 2` rounded away from zero.
#[inline]
pub fn halve_away(n: i64) -> i64 {
    if n >= 0 {
        (n + 1) / 2
    } else {
        (n - 1) / 2
    }
}

/// A left/right pixel pair on a shared epipolar row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CrossPoint {
    pub x_l: i64,
    pub x_r: i64,
    pub y: i64,
}

/// Gaze line `g`, depth number `d`, row `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GazeDepth {
    pub g: i64,
    pub d: i64,
    pub y: i64,
}

/// Cuboid-local integer axes. `w` runs left to right, `h` top to bottom and
/// `s` front to back; `s` doubles as the depth label index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Whs {
    pub w: i64,
    pub h: i64,
    pub s: i64,
}

/// A right-image pixel with its disparity (`x_l = x + dis`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelDisparity {
    pub x: i64,
    pub y: i64,
    pub dis: i64,
}

/// Number of depth numbers `d` with `0 <= d < w/2`.
pub fn depth_count(width: i64) -> i64 {
    (width + 1) / 2
}

/// Whether `g` satisfies `-w/2 < g < w/2`.
pub fn gaze_in_range(g: i64, width: i64) -> bool {
    2 * g > -width && 2 * g < width
}

/// Whether `d` satisfies `0 <= d < w/2`.
pub fn depth_in_range(d: i64, width: i64) -> bool {
    d >= 0 && 2 * d < width
}

/// Maps a pixel pair to its gaze/depth coordinates, or `None` when the pair
/// is not a cross point (wrong parity, out of range, or `x_r > x_l`).
pub fn cross_from_pixels(x_l: i64, x_r: i64, y: i64, width: i64) -> Option<GazeDepth> {
    if !(0..width).contains(&x_l) || !(0..width).contains(&x_r) {
        return None;
    }
    let sum = x_l + x_r - (width - 1);
    if sum.rem_euclid(2) != 0 {
        return None;
    }
    let g = sum / 2;
    let d = (x_r - x_l + width - 1) / 2;
    if !depth_in_range(d, width) || !gaze_in_range(g, width) {
        return None;
    }
    Some(GazeDepth { g, d, y })
}

/// Pixel columns of a gaze/depth coordinate, without range checks.
#[inline]
pub fn columns_of(g: i64, d: i64, width: i64) -> (i64, i64) {
    (width - 1 + g - d, g + d)
}

/// Inverse of [`cross_from_pixels`].
pub fn pixels_from_gaze_depth(coord: GazeDepth, width: i64) -> Result<CrossPoint> {
    if !gaze_in_range(coord.g, width) || !depth_in_range(coord.d, width) {
        return Err(Error::Geometry(format!(
            "(g={}, d={}) outside the gaze/depth range of width {width}",
            coord.g, coord.d
        )));
    }
    let (x_l, x_r) = columns_of(coord.g, coord.d, width);
    if !(0..width).contains(&x_l) || !(0..width).contains(&x_r) {
        return Err(Error::Geometry(format!(
            "(g={}, d={}) maps to columns ({x_l}, {x_r}) outside width {width}",
            coord.g, coord.d
        )));
    }
    Ok(CrossPoint {
        x_l,
        x_r,
        y: coord.y,
    })
}

/// The six offsets relating cuboid axes to gaze/depth and to disparity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Offsets {
    pub offset1: i64,
    pub offset2: i64,
    pub offset3: i64,
    pub lw_offset: i64,
    pub rw_offset: i64,
    pub h_offset: i64,
}

/// A box of cross points `[g_min, g_min + g_extent) x [y_min, y_min + y_extent)
/// x [d_min, d_min + d_extent)` in gaze/depth space.
///
/// Sites are the `(g, y)` gaze lines; labels are the `d_extent` depth numbers.
/// Cross points near the left and right borders may fall outside an image;
/// [`CuboidSpec::fully_in_image`] reports whether that happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CuboidSpec {
    pub image_width: i64,
    pub image_height: i64,
    pub g_min: i64,
    pub g_extent: i64,
    pub y_min: i64,
    pub y_extent: i64,
    pub d_min: i64,
    pub d_extent: i64,
}

impl CuboidSpec {
    pub fn new(
        image_width: i64,
        image_height: i64,
        (g_min, g_extent): (i64, i64),
        (y_min, y_extent): (i64, i64),
        (d_min, d_extent): (i64, i64),
    ) -> Result<Self> {
        let c = CuboidSpec {
            image_width,
            image_height,
            g_min,
            g_extent,
            y_min,
            y_extent,
            d_min,
            d_extent,
        };
        c.validate()?;
        Ok(c)
    }

    /// Builds a cuboid from its extents and the three independent disparity
    /// offsets. `lw_offset + rw_offset` must have the parity of `w - 1`.
    pub fn from_offsets(
        image_width: i64,
        image_height: i64,
        extents: (i64, i64, i64),
        lw_offset: i64,
        rw_offset: i64,
        h_offset: i64,
    ) -> Result<Self> {
        let w1 = image_width - 1;
        if (lw_offset + rw_offset - w1).rem_euclid(2) != 0 {
            return Err(Error::Geometry(format!(
                "lw_offset + rw_offset = {} must have the parity of w - 1 = {w1}",
                lw_offset + rw_offset
            )));
        }
        let g_min = (lw_offset + rw_offset - w1) / 2;
        let d_min = (w1 - (lw_offset - rw_offset)) / 2;
        Self::new(
            image_width,
            image_height,
            (g_min, extents.0),
            (h_offset, extents.1),
            (d_min, extents.2),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.image_width;
        if w < 1 || self.image_height < 1 {
            return Err(Error::Geometry(format!(
                "image size {}x{} must be positive",
                w, self.image_height
            )));
        }
        if self.g_extent < 1 || self.y_extent < 1 || self.d_extent < 1 {
            return Err(Error::Geometry(format!(
                "cuboid extents {}x{}x{} must be positive",
                self.g_extent, self.y_extent, self.d_extent
            )));
        }
        if !gaze_in_range(self.g_min, w) || !gaze_in_range(self.g_max(), w) {
            return Err(Error::Geometry(format!(
                "gaze range [{}, {}] leaves -w/2 < g < w/2 for w = {w}",
                self.g_min,
                self.g_max()
            )));
        }
        if !depth_in_range(self.d_min, w) || !depth_in_range(self.d_max(), w) {
            return Err(Error::Geometry(format!(
                "depth range [{}, {}] leaves 0 <= d < w/2 for w = {w}",
                self.d_min,
                self.d_max()
            )));
        }
        if self.y_min < 0 || self.y_min + self.y_extent > self.image_height {
            return Err(Error::Geometry(format!(
                "row range [{}, {}) leaves the image height {}",
                self.y_min,
                self.y_min + self.y_extent,
                self.image_height
            )));
        }
        Ok(())
    }

    pub fn g_max(&self) -> i64 {
        self.g_min + self.g_extent - 1
    }

    pub fn d_max(&self) -> i64 {
        self.d_min + self.d_extent - 1
    }

    /// Number of sites (gaze lines times rows).
    pub fn sites(&self) -> usize {
        (self.g_extent * self.y_extent) as usize
    }

    /// Number of depth labels `m`.
    pub fn labels(&self) -> usize {
        self.d_extent as usize
    }

    /// Row-major site index of cuboid column `w` and row `h`.
    #[inline]
    pub fn site_index(&self, w: i64, h: i64) -> usize {
        (h * self.g_extent + w) as usize
    }

    pub fn offsets(&self) -> Offsets {
        let w1 = self.image_width - 1;
        Offsets {
            offset1: -self.g_min,
            offset2: -self.y_min,
            offset3: -self.d_min,
            lw_offset: w1 + self.g_min - self.d_min,
            rw_offset: self.g_min + self.d_min,
            h_offset: self.y_min,
        }
    }

    pub fn whs_from_gaze_depth(&self, c: GazeDepth) -> Whs {
        let o = self.offsets();
        Whs {
            w: c.g + o.offset1,
            h: c.y + o.offset2,
            s: c.d + o.offset3,
        }
    }

    pub fn gaze_depth_from_whs(&self, c: Whs) -> GazeDepth {
        let o = self.offsets();
        GazeDepth {
            g: c.w - o.offset1,
            y: c.h - o.offset2,
            d: c.s - o.offset3,
        }
    }

    pub fn contains(&self, c: Whs) -> bool {
        (0..self.g_extent).contains(&c.w)
            && (0..self.y_extent).contains(&c.h)
            && (0..self.d_extent).contains(&c.s)
    }

    /// Image columns `(x_l, x_r)` and row of cross point `(w, h, s)`; the
    /// columns may lie outside `[0, image_width)`.
    #[inline]
    pub fn pixel_columns(&self, w: i64, h: i64, s: i64) -> (i64, i64, i64) {
        let (x_l, x_r) = columns_of(w + self.g_min, s + self.d_min, self.image_width);
        (x_l, x_r, h + self.y_min)
    }

    /// True when every cross point of the cuboid lies inside both images.
    pub fn fully_in_image(&self) -> bool {
        let w = self.image_width;
        // x_r = g + d is smallest at (g_min, d_min) and largest at (g_max, d_max);
        // x_l = w - 1 + g - d is smallest at (g_min, d_max) and largest at (g_max, d_min).
        self.g_min + self.d_min >= 0
            && self.g_max() + self.d_max() < w
            && w - 1 + self.g_min - self.d_max() >= 0
            && w - 1 + self.g_max() - self.d_min < w
    }
}

/// `(x, y, dis) -> (W, H, S)`, halvings rounded away from zero. No range checks.
pub fn whs_from_disparity(x: i64, y: i64, dis: i64, cuboid: &CuboidSpec) -> Whs {
    let o = cuboid.offsets();
    Whs {
        w: x - halve_away(o.lw_offset + o.rw_offset) + halve_away(dis),
        h: y - o.h_offset,
        s: halve_away(o.lw_offset - o.rw_offset) - halve_away(dis),
    }
}

/// `(W, H, S) -> (x, y, dis)`. Fails when either pixel leaves its image.
pub fn disparity_from_whs(whs: Whs, cuboid: &CuboidSpec) -> Result<PixelDisparity> {
    let o = cuboid.offsets();
    let x = o.rw_offset + whs.s + whs.w;
    let y = o.h_offset + whs.h;
    let dis = o.lw_offset - o.rw_offset - 2 * whs.s;
    let w = cuboid.image_width;
    if !(0..w).contains(&x) || !(0..w).contains(&(x + dis)) || !(0..cuboid.image_height).contains(&y)
    {
        return Err(Error::Geometry(format!(
            "(W={}, H={}, S={}) maps to right ({x}, {y}) / left column {} outside the {}x{} image",
            whs.w,
            whs.h,
            whs.s,
            x + dis,
            w,
            cuboid.image_height
        )));
    }
    Ok(PixelDisparity { x, y, dis })
}

/// Depth number reached by disparity `dis` (with the same rounding as
/// [`whs_from_disparity`]).
pub fn depth_of_disparity(dis: i64, width: i64) -> i64 {
    halve_away(width - 1) - halve_away(dis)
}

/// How the gaze range of [`cuboid_from_disparity_range`] is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GazeWindow {
    /// Only gaze lines whose cross points at every label lie inside both images.
    InImage,
    /// `w - m/2` gaze lines centered on the midline between the cameras. Cross
    /// points near the borders may leave an image and are scored by the data
    /// term's border policy.
    #[default]
    Centered,
}

/// Chooses a cuboid whose label axis covers `[dis_min, dis_max]` plus
/// `margin` labels on each side, over all image rows.
///
/// When the margin pushes the depth window past `0 <= d < w/2` the window
/// is shifted back inside, keeping its extent.
pub fn cuboid_from_disparity_range(
    width: i64,
    height: i64,
    dis_min: i64,
    dis_max: i64,
    margin: i64,
    window: GazeWindow,
) -> Result<CuboidSpec> {
    if width < 1 || height < 1 {
        return Err(Error::Geometry(format!("image size {width}x{height} must be positive")));
    }
    if dis_min < 0 || dis_min > dis_max || dis_max >= width || margin < 0 {
        return Err(Error::Geometry(format!(
            "need 0 <= dis_min <= dis_max < w and margin >= 0, got [{dis_min}, {dis_max}] margin {margin} w {width}"
        )));
    }
    let valid = depth_count(width);
    let near = depth_of_disparity(dis_max, width);
    let far = depth_of_disparity(dis_min, width);
    let extent = (far - near + 1 + 2 * margin).min(valid);
    let mut d_min = near - margin;
    d_min = d_min.clamp(0, valid - extent);

    let (g_min, g_extent) = match window {
        // |g| <= d keeps both columns in the image for every d < w/2.
        GazeWindow::InImage => (-d_min, 2 * d_min + 1),
        GazeWindow::Centered => {
            let lines = if width % 2 == 0 { width - 1 } else { width };
            let g_extent = (width - extent / 2).clamp(1, lines);
            (-(g_extent / 2), g_extent)
        }
    };
    if g_extent < 1 {
        return Err(Error::Geometry("empty gaze range".into()));
    }
    CuboidSpec::new(width, height, (g_min, g_extent), (0, height), (d_min, extent))
}
