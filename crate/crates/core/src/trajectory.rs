//! Trajectory representation, geodetic projection and CSV ingestion.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrajError};
use crate::geometry::Point;

/// Mean Earth radius used by the local projection, in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// An ordered, immutable sequence of planar sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    id: String,
    points: Vec<Point>,
}

impl Trajectory {
    /// Builds a trajectory, rejecting NaN or infinite coordinates.
    pub fn new(id: impl Into<String>, points: Vec<Point>) -> Result<Self> {
        if let Some(idx) = points.iter().position(|p| !p.is_finite()) {
            return Err(TrajError::NonFinite(idx));
        }
        Ok(Self { id: id.into(), points })
    }

    /// Convenience constructor from `(x, y)` tuples. Panics on non-finite input.
    pub fn from_xy(id: impl Into<String>, xy: &[(f64, f64)]) -> Self {
        Self::new(id, xy.iter().map(|&(x, y)| Point::new(x, y)).collect())
            .expect("finite coordinates")
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Applies `f` to every point, keeping the id.
    pub fn map_points(&self, f: impl Fn(&Point) -> Point) -> Result<Self> {
        Self::new(self.id.clone(), self.points.iter().map(f).collect())
    }

    pub(crate) fn require_non_empty(&self) -> Result<()> {
        if self.points.is_empty() {
            Err(TrajError::EmptyTrajectory)
        } else {
            Ok(())
        }
    }
}

impl std::ops::Index<usize> for Trajectory {
    type Output = Point;

    fn index(&self, idx: usize) -> &Point {
        &self.points[idx]
    }
}

/// A WGS84 fix. The timestamp is carried through ingestion but never scored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
    pub timestamp: Option<f64>,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon, timestamp: None }
    }

    fn in_range(&self) -> bool {
        self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
    }
}

/// Local equirectangular projection about `origin` (or the first point when `None`).
pub fn project_geo(id: impl Into<String>, points: &[GeoPoint], origin: Option<GeoPoint>) -> Result<Trajectory> {
    let origin = match origin.or_else(|| points.first().copied()) {
        Some(o) if !points.is_empty() => o,
        _ => return Err(TrajError::EmptyTrajectory),
    };
    for (index, g) in points.iter().chain(std::iter::once(&origin)).enumerate() {
        if !g.in_range() {
            return Err(TrajError::GeoOutOfRange { index, lat: g.lat, lon: g.lon });
        }
    }
    let k = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
    let cos_lat0 = origin.lat.to_radians().cos();
    let projected = points
        .iter()
        .map(|g| Point::new(k * (g.lon - origin.lon) * cos_lat0, k * (g.lat - origin.lat)))
        .collect();
    Trajectory::new(id, projected)
}

/// Input layout accepted by [`load_trajectory`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvFormat {
    /// `x,y` or `t,x,y`, planar meters.
    Xy,
    /// `lat,lon` or `t,lat,lon`, projected about the first row.
    Geo,
}

/// Reads a CSV of planar points (`x,y` / `t,x,y`) or geodetic fixes.
///
/// The trajectory id is the file stem.
pub fn load_trajectory(path: &Path, format: CsvFormat) -> Result<Trajectory> {
    let id = file_id(path);
    match format {
        CsvFormat::Xy => {
            let rows = read_rows(path)?;
            let points = rows.into_iter().map(|(_, a, b)| Point::new(a, b)).collect();
            Trajectory::new(id, points)
        }
        CsvFormat::Geo => {
            let fixes = load_geo_points(path)?;
            project_geo(id, &fixes, None)
        }
    }
}

/// Reads the raw geodetic rows of a csv-geo file without projecting them.
pub fn load_geo_points(path: &Path) -> Result<Vec<GeoPoint>> {
    let rows = read_rows(path)?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, (t, lat, lon)) in rows.into_iter().enumerate() {
        let g = GeoPoint { lat, lon, timestamp: t };
        if !g.in_range() {
            return Err(TrajError::GeoOutOfRange { index: i, lat, lon });
        }
        out.push(g);
    }
    Ok(out)
}

pub(crate) fn file_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Parses numeric rows of 2 or 3 columns into `(t, a, b)`.
fn read_rows(path: &Path) -> Result<Vec<(Option<f64>, f64, f64)>> {
    let io_err = |source| TrajError::Io { path: path.to_path_buf(), source };
    let mut raw = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut raw))
        .map_err(io_err)?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(raw.as_bytes());

    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let parse_err = |line: u64, msg: String| TrajError::Parse { path: path.to_path_buf(), line, msg };
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(n as u64 + 1);
        let fields: Vec<&str> = record.iter().collect();
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let values = match parsed {
            Ok(v) => v,
            // A single leading non-numeric row is a header.
            Err(_) if n == 0 && fields.iter().any(|f| f.parse::<f64>().is_err()) => continue,
            Err(e) => return Err(parse_err(line, format!("invalid number: {e}"))),
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(line, "non-finite value".into()));
        }
        match values.as_slice() {
            [a, b] => rows.push((None, *a, *b)),
            [t, a, b] => rows.push((Some(*t), *a, *b)),
            _ => return Err(parse_err(line, format!("expected 2 or 3 columns, found {}", values.len()))),
        }
    }
    if rows.is_empty() {
        return Err(TrajError::NoRows(path.to_path_buf()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::euclidean_dist;
    use std::io::Write;

    fn haversine(a: &GeoPoint, b: &GeoPoint) -> f64 {
        let (la1, la2) = (a.lat.to_radians(), b.lat.to_radians());
        let dlat = la2 - la1;
        let dlon = (b.lon - a.lon).to_radians();
        let h = (dlat / 2.0).sin().powi(2) + la1.cos() * la2.cos() * (dlon / 2.0).sin().powi(2);
        2.0 * EARTH_RADIUS_M * h.sqrt().asin()
    }

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn origin_projects_to_zero() {
        let o = GeoPoint::new(39.9, 116.3);
        let t = project_geo("a", &[o], None).unwrap();
        assert_eq!(t[0], Point::new(0.0, 0.0));
    }

    #[test]
    fn equator_longitude_step() {
        let o = GeoPoint::new(0.0, 10.0);
        let q = GeoPoint::new(0.0, 10.001);
        let t = project_geo("a", &[o, q], None).unwrap();
        let expected = haversine(&o, &q);
        assert!((t[1].x - expected).abs() / expected < 0.005);
        assert!((t[1].x - 111.19).abs() < 0.01);
        assert_eq!(t[1].y, 0.0);
    }

    #[test]
    fn identical_fixes_identical_points() {
        let g = GeoPoint::new(37.98, 23.72);
        let t = project_geo("a", &[g, g], None).unwrap();
        assert_eq!(t[0], t[1]);
    }

    #[test]
    fn empty_geo_input_is_rejected() {
        assert!(matches!(project_geo("a", &[], None), Err(TrajError::EmptyTrajectory)));
    }

    #[test]
    fn projection_matches_haversine_locally() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let a = GeoPoint::new(rng.gen_range(-60.0..60.0), rng.gen_range(-179.0..179.0));
            // Offsets up to ~700 m in each axis keep the pair within 1 km.
            let b = GeoPoint::new(a.lat + rng.gen_range(-0.0063..0.0063), a.lon + rng.gen_range(-0.0063..0.0063));
            let h = haversine(&a, &b);
            if !(1.0..=1000.0).contains(&h) {
                continue;
            }
            let t = project_geo("a", &[a, b], None).unwrap();
            let d = euclidean_dist(&t[0], &t[1]);
            assert!((d - h).abs() / h < 0.005, "d={d} h={h}");
        }
    }

    #[test]
    fn load_xy_plain() {
        let f = write_tmp("0,0\n3,4\n");
        let t = load_trajectory(f.path(), CsvFormat::Xy).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(euclidean_dist(&t[0], &t[1]), 5.0);
    }

    #[test]
    fn load_xy_header_and_crlf() {
        let f = write_tmp("x,y\r\n1,2\r\n");
        let t = load_trajectory(f.path(), CsvFormat::Xy).unwrap();
        assert_eq!(t.points(), &[Point::new(1.0, 2.0)]);
    }

    #[test]
    fn load_xy_with_time_column() {
        let f = write_tmp("t,x,y\n0,1,2\n5,3,4\n");
        let t = load_trajectory(f.path(), CsvFormat::Xy).unwrap();
        assert_eq!(t.points(), &[Point::new(1.0, 2.0), Point::new(3.0, 4.0)]);
    }

    #[test]
    fn load_geo_identical_rows() {
        let f = write_tmp("39.9,116.3\n39.9,116.3\n39.9,116.3\n");
        let t = load_trajectory(f.path(), CsvFormat::Geo).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.points().iter().all(|p| *p == Point::new(0.0, 0.0)));
    }

    #[test]
    fn duplicates_are_kept() {
        let f = write_tmp("1,1\n1,1\n2,2\n");
        assert_eq!(load_trajectory(f.path(), CsvFormat::Xy).unwrap().len(), 3);
    }

    #[test]
    fn malformed_row_reports_line() {
        let f = write_tmp("0,0\n1,abc\n");
        match load_trajectory(f.path(), CsvFormat::Xy) {
            Err(TrajError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_column_count() {
        let f = write_tmp("0,0\n1,2,3,4\n");
        assert!(matches!(load_trajectory(f.path(), CsvFormat::Xy), Err(TrajError::Parse { line: 2, .. })));
    }

    #[test]
    fn header_only_has_no_rows() {
        let f = write_tmp("x,y\n");
        assert!(matches!(load_trajectory(f.path(), CsvFormat::Xy), Err(TrajError::NoRows(_))));
    }

    #[test]
    fn missing_file() {
        let r = load_trajectory(Path::new("/nonexistent/file.csv"), CsvFormat::Xy);
        assert!(matches!(r, Err(TrajError::Io { .. })));
    }

    #[test]
    fn nan_rejected() {
        assert!(matches!(
            Trajectory::new("a", vec![Point::new(f64::NAN, 0.0)]),
            Err(TrajError::NonFinite(0))
        ));
    }
}
