//! Netpbm images and ground-truth conversion.
//!
//! Pixmaps (`P3`/`P6`) and graymaps (`P2`/`P5`) are read in either encoding
//! and written in the binary one. Header comments are preserved on write so
//! outputs can carry their run configuration.

use std::path::Path;

use crate::energy::Labeling;
use crate::error::{Error, Result};
use crate::geometry::{whs_from_disparity, CuboidSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Format(format!("image size {width}x{height} must be positive")));
        }
        if pixels.len() != width * height * 3 {
            return Err(Error::Format(format!(
                "{} bytes for a {width}x{height} RGB image",
                pixels.len()
            )));
        }
        Ok(RgbImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Format(format!("image size {width}x{height} must be positive")));
        }
        if pixels.len() != width * height {
            return Err(Error::Format(format!(
                "{} bytes for a {width}x{height} gray image",
                pixels.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// A rectified stereo pair of equal-sized color images.
#[derive(Debug, Clone)]
pub struct StereoPair {
    pub left: RgbImage,
    pub right: RgbImage,
}

impl StereoPair {
    pub fn new(left: RgbImage, right: RgbImage) -> Result<Self> {
        if left.width != right.width || left.height != right.height {
            return Err(Error::Format(format!(
                "left {}x{} and right {}x{} differ in size",
                left.width, left.height, right.width, right.height
            )));
        }
        Ok(StereoPair { left, right })
    }

    pub fn width(&self) -> usize {
        self.left.width
    }

    pub fn height(&self) -> usize {
        self.left.height
    }
}

struct Header {
    magic: u8,
    width: usize,
    height: usize,
    maxval: usize,
    /// Offset of the first raster byte.
    raster: usize,
}

fn skip_space_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' && bytes[pos] != b'\r' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn read_uint(bytes: &[u8], pos: usize, what: &str) -> Result<(usize, usize)> {
    let start = skip_space_and_comments(bytes, pos);
    let mut end = start;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == start {
        return Err(Error::Format(format!("expected {what} at byte {start}")));
    }
    let text = std::str::from_utf8(&bytes[start..end]).expect("ascii digits");
    let value = text
        .parse::<usize>()
        .map_err(|_| Error::Format(format!("{what} '{text}' out of range")))?;
    Ok((value, end))
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 || bytes[0] != b'P' || !(b'1'..=b'7').contains(&bytes[1]) {
        return Err(Error::Format("missing netpbm magic number".into()));
    }
    let magic = bytes[1] - b'0';
    let (width, pos) = read_uint(bytes, 2, "width")?;
    let (height, pos) = read_uint(bytes, pos, "height")?;
    let (maxval, pos) = read_uint(bytes, pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("image size {width}x{height} must be positive")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("maxval {maxval} outside 1..=65535")));
    }
    // A single whitespace byte separates the header from a binary raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Format("truncated header".into()));
    }
    Ok(Header {
        magic,
        width,
        height,
        maxval,
        raster: pos + 1,
    })
}

fn read_samples(bytes: &[u8], header: &Header, count: usize) -> Result<Vec<u8>> {
    let ascii = matches!(header.magic, 2 | 3);
    let samples = if ascii {
        let mut out = Vec::with_capacity(count);
        let mut pos = header.raster;
        while out.len() < count {
            let (v, next) = read_uint(bytes, pos, "sample").map_err(|_| {
                Error::Format(format!("truncated payload: {} of {count} samples", out.len()))
            })?;
            if v > header.maxval {
                return Err(Error::Format(format!("sample {v} exceeds maxval {}", header.maxval)));
            }
            out.push(v as u8);
            pos = next;
        }
        out
    } else {
        if header.maxval > 255 {
            return Err(Error::Format(format!("16-bit maxval {} unsupported", header.maxval)));
        }
        let payload = &bytes[header.raster.min(bytes.len())..];
        if payload.len() < count {
            return Err(Error::Format(format!(
                "truncated payload: {} of {count} bytes",
                payload.len()
            )));
        }
        if let Some(v) = payload[..count].iter().find(|&&v| v as usize > header.maxval) {
            return Err(Error::Format(format!("sample {v} exceeds maxval {}", header.maxval)));
        }
        payload[..count].to_vec()
    };
    Ok(samples)
}

pub fn parse_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let header = parse_header(bytes)?;
    if header.magic != 3 && header.magic != 6 {
        return Err(Error::Format(format!("P{} is not a pixmap", header.magic)));
    }
    if header.maxval != 255 {
        return Err(Error::Format(format!("pixmap maxval {} must be 255", header.maxval)));
    }
    let pixels = read_samples(bytes, &header, header.width * header.height * 3)?;
    RgbImage::new(header.width, header.height, pixels)
}

pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let header = parse_header(bytes)?;
    if header.magic != 2 && header.magic != 5 {
        return Err(Error::Format(format!("P{} is not a graymap", header.magic)));
    }
    if header.maxval > 255 {
        return Err(Error::Format(format!("graymap maxval {} exceeds 255", header.maxval)));
    }
    let pixels = read_samples(bytes, &header, header.width * header.height)?;
    GrayImage::new(header.width, header.height, pixels)
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn load_ppm(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    parse_ppm(&read_file(path)?).map_err(|e| with_path(e, path))
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    parse_pgm(&read_file(path)?).map_err(|e| with_path(e, path))
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn header_bytes(magic: &str, width: usize, height: usize, comments: &[String]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(magic.as_bytes());
    out.push(b'\n');
    for c in comments {
        for line in c.lines() {
            out.extend_from_slice(b"# ");
            out.extend_from_slice(line.as_bytes());
            out.push(b'\n');
        }
    }
    out.extend_from_slice(format!("{width} {height}\n255\n").as_bytes());
    out
}

/// Binary (`P6`) encoding.
pub fn encode_ppm(img: &RgbImage, comments: &[String]) -> Vec<u8> {
    let mut out = header_bytes("P6", img.width, img.height, comments);
    out.extend_from_slice(&img.pixels);
    out
}

/// Binary (`P5`) encoding.
pub fn encode_pgm(img: &GrayImage, comments: &[String]) -> Vec<u8> {
    let mut out = header_bytes("P5", img.width, img.height, comments);
    out.extend_from_slice(&img.pixels);
    out
}

/// Plain (`P2`) encoding, one row per line.
pub fn encode_pgm_ascii(img: &GrayImage) -> Vec<u8> {
    let mut out = header_bytes("P2", img.width, img.height, &[]);
    for row in img.pixels.chunks(img.width) {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        out.extend_from_slice(line.join(" ").as_bytes());
        out.push(b'\n');
    }
    out
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_ppm(img: &RgbImage, path: impl AsRef<Path>, comments: &[String]) -> Result<()> {
    write_file(path.as_ref(), &encode_ppm(img, comments))
}

pub fn write_pgm(img: &GrayImage, path: impl AsRef<Path>, comments: &[String]) -> Result<()> {
    write_file(path.as_ref(), &encode_pgm(img, comments))
}

/// Per-site ground-truth depth labels over a cuboid's `(W, H)` grid.
///
/// Labels are cuboid-local (`S = d - d_min`). Sites without ground truth
/// are `None` and are skipped by evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthDepth {
    pub g_extent: usize,
    pub y_extent: usize,
    pub labels: Vec<Option<u32>>,
    pub diagnostics: GroundTruthDiagnostics,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroundTruthDiagnostics {
    /// Pixels with value 0 (no ground truth).
    pub unknown_pixels: usize,
    /// Valid pixels whose cross point falls outside the cuboid.
    pub outside_cuboid: usize,
    /// Valid pixels mapping onto an already assigned site; the nearer
    /// (smaller) label is kept.
    pub collisions: usize,
}

impl GroundTruthDepth {
    pub fn valid_sites(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    pub fn label(&self, w: usize, h: usize) -> Option<u32> {
        self.labels[h * self.g_extent + w]
    }
}

/// Converts a right-image disparity map (`dis = value / scale`, 0 = unknown)
/// into per-site depth labels.
pub fn ground_truth_to_depth(
    gt: &GrayImage,
    scale: u32,
    cuboid: &CuboidSpec,
) -> Result<GroundTruthDepth> {
    if scale == 0 {
        return Err(Error::Config("ground-truth scale must be positive".into()));
    }
    if gt.width as i64 != cuboid.image_width || gt.height as i64 != cuboid.image_height {
        return Err(Error::Geometry(format!(
            "ground truth {}x{} does not match the {}x{} images",
            gt.width, gt.height, cuboid.image_width, cuboid.image_height
        )));
    }
    let mut labels: Vec<Option<u32>> = vec![None; cuboid.sites()];
    let mut diag = GroundTruthDiagnostics::default();
    for y in 0..gt.height {
        for x in 0..gt.width {
            let v = gt.get(x, y);
            if v == 0 {
                diag.unknown_pixels += 1;
                continue;
            }
            let dis = (v as u32 / scale) as i64;
            let whs = whs_from_disparity(x as i64, y as i64, dis, cuboid);
            if !cuboid.contains(whs) {
                diag.outside_cuboid += 1;
                continue;
            }
            let slot = &mut labels[cuboid.site_index(whs.w, whs.h)];
            let s = whs.s as u32;
            match slot {
                Some(prev) => {
                    diag.collisions += 1;
                    if s < *prev {
                        *slot = Some(s);
                    }
                }
                None => *slot = Some(s),
            }
        }
    }
    Ok(GroundTruthDepth {
        g_extent: cuboid.g_extent as usize,
        y_extent: cuboid.y_extent as usize,
        labels,
        diagnostics: diag,
    })
}

/// Renders a labeling as a right-image disparity map carrying `dis * scale`.
/// Where several sites project to one pixel the nearest wins; pixels hit by
/// no site stay 0.
pub fn render_disparity(labeling: &Labeling, cuboid: &CuboidSpec, scale: u32) -> Result<GrayImage> {
    if labeling.g_extent() != cuboid.g_extent as usize || labeling.y_extent() != cuboid.y_extent as usize {
        return Err(Error::Geometry("labeling does not cover the cuboid".into()));
    }
    let (w, h) = (cuboid.image_width as usize, cuboid.image_height as usize);
    let mut best: Vec<i64> = vec![-1; w * h];
    let o = cuboid.offsets();
    for hh in 0..cuboid.y_extent {
        for ww in 0..cuboid.g_extent {
            let s = labeling.get(ww as usize, hh as usize) as i64;
            let x = o.rw_offset + s + ww;
            let y = o.h_offset + hh;
            if !(0..cuboid.image_width).contains(&x) || !(0..cuboid.image_height).contains(&y) {
                continue;
            }
            let dis = o.lw_offset - o.rw_offset - 2 * s;
            let slot = &mut best[y as usize * w + x as usize];
            *slot = (*slot).max(dis);
        }
    }
    let mut pixels = Vec::with_capacity(w * h);
    for dis in best {
        if dis < 0 {
            pixels.push(0);
            continue;
        }
        let v = dis * scale as i64;
        if v > 255 {
            return Err(Error::Config(format!(
                "disparity {dis} x scale {scale} = {v} overflows 8 bits; choose a smaller scale"
            )));
        }
        pixels.push(v as u8);
    }
    GrayImage::new(w, h, pixels)
}

pub fn write_disparity_image(
    labeling: &Labeling,
    cuboid: &CuboidSpec,
    scale: u32,
    path: impl AsRef<Path>,
    comments: &[String],
) -> Result<()> {
    write_pgm(&render_disparity(labeling, cuboid, scale)?, path, comments)
}
