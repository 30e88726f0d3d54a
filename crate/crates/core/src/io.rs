//! Output artifacts: binary PPM rasters, CSV tables and atomic file writes.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cantor::Square;
use crate::error::{Error, Result};
use crate::metric::FiniteSet;

/// Axis-aligned window onto the plane and the raster size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Viewport {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub width: usize,
    pub height: usize,
}

impl Viewport {
    pub fn new(min: [f64; 2], max: [f64; 2], width: usize, height: usize) -> Result<Self> {
        let v = Viewport { min, max, width, height };
        v.validate()?;
        Ok(v)
    }

    pub fn unit(res: usize) -> Self {
        Viewport { min: [0.0, 0.0], max: [1.0, 1.0], width: res, height: res }
    }

    pub fn validate(&self) -> Result<()> {
        let ok_axis = |a: f64, b: f64| a.is_finite() && b.is_finite() && a < b;
        if !ok_axis(self.min[0], self.max[0]) || !ok_axis(self.min[1], self.max[1]) {
            return Err(Error::Config("viewport needs min < max on both axes".into()));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::Config("resolution must be at least 1".into()));
        }
        Ok(())
    }

    /// Pixel (column, row) holding (x, y); rows run top to bottom.
    pub fn pixel(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fx = (x - self.min[0]) / (self.max[0] - self.min[0]);
        let fy = (y - self.min[1]) / (self.max[1] - self.min[1]);
        if !(0.0..=1.0).contains(&fx) || !(0.0..=1.0).contains(&fy) {
            return None;
        }
        let col = ((fx * self.width as f64) as usize).min(self.width - 1);
        let up = ((fy * self.height as f64) as usize).min(self.height - 1);
        Some((col, self.height - 1 - up))
    }

    fn pixel_centre(&self, col: usize, row: usize) -> (f64, f64) {
        let sx = (self.max[0] - self.min[0]) / self.width as f64;
        let sy = (self.max[1] - self.min[1]) / self.height as f64;
        (self.min[0] + (col as f64 + 0.5) * sx, self.min[1] + ((self.height - 1 - row) as f64 + 0.5) * sy)
    }
}

/// A black-on-white bitmap.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    set: Vec<bool>,
}

impl Raster {
    pub fn blank(vp: &Viewport) -> Self {
        Raster { width: vp.width, height: vp.height, set: vec![false; vp.width * vp.height] }
    }

    pub fn mark(&mut self, col: usize, row: usize) {
        self.set[row * self.width + col] = true;
    }

    pub fn count(&self) -> usize {
        self.set.iter().filter(|b| **b).count()
    }

    /// Binary PPM (P6), 8-bit channels.
    pub fn to_ppm(&self) -> Vec<u8> {
        let header = format!("P6\n{} {}\n255\n", self.width, self.height);
        let mut out = Vec::with_capacity(header.len() + 3 * self.set.len());
        out.extend_from_slice(header.as_bytes());
        for &b in &self.set {
            out.extend_from_slice(if b { &[0, 0, 0] } else { &[255, 255, 255] });
        }
        out
    }
}

/// Marks the pixel of every point; 1-D sets are drawn on the line y = 0.
pub fn rasterize_points(set: &FiniteSet, vp: &Viewport) -> Result<Raster> {
    vp.validate()?;
    if set.dim() > 2 {
        return Err(Error::Unsupported(format!("cannot draw {}-dimensional points", set.dim())));
    }
    let mut r = Raster::blank(vp);
    for p in set.iter() {
        let y = p.get(1).copied().unwrap_or(0.0);
        if let Some((c, row)) = vp.pixel(p[0], y) {
            r.mark(c, row);
        }
    }
    Ok(r)
}

/// Fills every square: pixels whose centre lies inside, plus the pixel of
/// the square's centre so that small squares stay visible.
pub fn rasterize_squares(squares: &[Square], vp: &Viewport) -> Result<Raster> {
    vp.validate()?;
    let mut r = Raster::blank(vp);
    for s in squares {
        let (lo, hi) = (s.origin, (s.origin.0 + s.side, s.origin.1 + s.side));
        let clamp = |a: f64, b: f64| (a.max(vp.min[0]), b.min(vp.max[0]));
        let (x0, x1) = clamp(lo.0, hi.0);
        let (y0, y1) = (lo.1.max(vp.min[1]), hi.1.min(vp.max[1]));
        if x0 > x1 || y0 > y1 {
            continue;
        }
        let c = s.center();
        if let Some((col, row)) = vp.pixel(c.coords()[0], c.coords()[1]) {
            r.mark(col, row);
        }
        let (Some((c0, r1)), Some((c1, r0))) = (vp.pixel(x0, y0), vp.pixel(x1, y1)) else { continue };
        for row in r0..=r1 {
            for col in c0..=c1 {
                let (px, py) = vp.pixel_centre(col, row);
                if s.contains_point(px, py) {
                    r.mark(col, row);
                }
            }
        }
    }
    Ok(r)
}

/// Serializes rows to CSV with a header row and LF line endings.
pub fn csv_string<S: Serialize>(rows: &[S]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// One row per point with columns x (and y).
pub fn points_csv(set: &FiniteSet) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    let names = ["x", "y", "z"];
    if set.dim() <= names.len() {
        w.write_record(&names[..set.dim()]).map_err(io)?;
    } else {
        w.write_record((0..set.dim()).map(|i| format!("x{i}"))).map_err(io)?;
    }
    for p in set.iter() {
        w.write_record(p.iter().map(|v| v.to_string())).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}
