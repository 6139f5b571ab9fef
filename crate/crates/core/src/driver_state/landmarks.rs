//! Landmark frames and the `frame,point,x,y` CSV ingestion format.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Which landmark numbers (1-based, as in the CSV `point` column) form the
/// eye contour `p1..p6` and the mouth contour `p11..p18`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandmarkLayout {
    pub eye: [usize; 6],
    pub mouth: [usize; 8],
}

impl Default for LandmarkLayout {
    fn default() -> Self {
        Self {
            eye: [1, 2, 3, 4, 5, 6],
            mouth: [11, 12, 13, 14, 15, 16, 17, 18],
        }
    }
}

impl LandmarkLayout {
    pub fn validate(&self) -> Result<()> {
        let all: Vec<usize> = self.eye.iter().chain(self.mouth.iter()).copied().collect();
        if all.iter().any(|&i| i == 0) {
            return Err(Error::InvalidParameter("landmark numbers are 1-based".into()));
        }
        let mut sorted = all.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != all.len() {
            return Err(Error::InvalidParameter(
                "eye and mouth landmark sets must be disjoint and without repeats".into(),
            ));
        }
        Ok(())
    }

    /// Highest landmark number referenced by the layout.
    pub fn max_point(&self) -> usize {
        self.eye.iter().chain(self.mouth.iter()).copied().max().unwrap_or(0)
    }
}

/// One video frame worth of facial landmark coordinates (pixels).
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkFrame {
    pub frame_index: u64,
    pub points: Vec<Point>,
}

impl LandmarkFrame {
    pub const MIN_POINTS: usize = 18;

    pub fn new(frame_index: u64, points: Vec<Point>) -> Result<Self> {
        if points.len() < Self::MIN_POINTS {
            return Err(Error::InvalidParameter(format!(
                "frame {frame_index} has {} points, need at least {}",
                points.len(),
                Self::MIN_POINTS
            )));
        }
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "frame {frame_index} has non-finite coordinates"
            )));
        }
        Ok(Self { frame_index, points })
    }

    /// Landmark by its 1-based number.
    pub fn point(&self, number: usize) -> Point {
        self.points[number - 1]
    }
}

pub const LANDMARK_HEADER: [&str; 4] = ["frame", "point", "x", "y"];

/// Parses the landmark CSV. Rows must be grouped by frame with strictly
/// increasing frame numbers, and each frame must list points `1..N`
/// contiguously.
pub fn read_landmarks<R: Read>(reader: R) -> Result<Vec<LandmarkFrame>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    match records.next() {
        Some(Ok(header)) if header.iter().eq(LANDMARK_HEADER.iter().copied()) => {}
        Some(Ok(_)) | None => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{}`", LANDMARK_HEADER.join(",")),
            })
        }
        Some(Err(e)) => return Err(Error::Parse { line: 1, message: e.to_string() }),
    }

    let mut frames: Vec<LandmarkFrame> = Vec::new();
    let mut current: Option<(u64, Vec<Point>)> = None;

    for rec in records {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let bad = |message: String| Error::Parse { line, message };
        if rec.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", rec.len())));
        }
        let frame: u64 = rec[0].parse().map_err(|_| bad(format!("bad frame `{}`", &rec[0])))?;
        let point: usize = rec[1].parse().map_err(|_| bad(format!("bad point `{}`", &rec[1])))?;
        let x: f64 = rec[2].parse().map_err(|_| bad(format!("bad x `{}`", &rec[2])))?;
        let y: f64 = rec[3].parse().map_err(|_| bad(format!("bad y `{}`", &rec[3])))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(bad("non-finite coordinate".into()));
        }

        let starts_new = match &current {
            Some((f, _)) if *f == frame => false,
            Some((f, _)) if frame <= *f => {
                return Err(bad(format!("frame {frame} does not increase after {f}")))
            }
            _ => true,
        };
        if starts_new {
            if let Some((f, pts)) = current.take() {
                frames.push(LandmarkFrame::new(f, pts).map_err(|e| bad(e.to_string()))?);
            }
            current = Some((frame, Vec::new()));
        }
        let (_, pts) = current.as_mut().expect("frame started above");
        if point != pts.len() + 1 {
            return Err(bad(format!(
                "frame {frame}: expected point {}, found {point}",
                pts.len() + 1
            )));
        }
        pts.push(Point::new(x, y));
    }
    if let Some((f, pts)) = current.take() {
        let n = pts.len();
        frames.push(LandmarkFrame::new(f, pts).map_err(|e| Error::Parse {
            line: 0,
            message: format!("last frame ({n} points): {e}"),
        })?);
    }
    Ok(frames)
}

pub fn read_landmarks_file(path: &Path) -> Result<Vec<LandmarkFrame>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_landmarks(std::io::BufReader::new(file))
}

/// Serializes frames in the ingestion format.
pub fn write_landmarks<W: std::io::Write>(writer: W, frames: &[LandmarkFrame]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wtr.write_record(LANDMARK_HEADER).map_err(io)?;
    for f in frames {
        for (i, p) in f.points.iter().enumerate() {
            wtr.write_record([
                f.frame_index.to_string(),
                (i + 1).to_string(),
                p.x.to_string(),
                p.y.to_string(),
            ])
            .map_err(io)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_for(frames: &[(u64, usize)]) -> String {
        let mut s = String::from("frame,point,x,y\n");
        for &(f, n) in frames {
            for p in 1..=n {
                s.push_str(&format!("{f},{p},{}.5,{}\n", p, 2 * p));
            }
        }
        s
    }

    #[test]
    fn parses_well_formed_file() {
        let frames = read_landmarks(csv_for(&[(0, 18), (3, 20)]).as_bytes()).unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[1].frame_index, 3);
        assert_eq!(frames[1].points.len(), 20);
        assert_eq!(frames[0].point(2), Point::new(2.5, 4.0));
    }

    #[test]
    fn rejects_bad_header() {
        let err = read_landmarks("frame,pt,x,y\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn rejects_non_contiguous_points_with_line_number() {
        let mut s = csv_for(&[(0, 18)]);
        s.push_str("1,1,0,0\n1,3,0,0\n");
        match read_landmarks(s.as_bytes()).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 21),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn rejects_decreasing_frames() {
        let s = csv_for(&[(5, 18), (4, 18)]);
        assert!(read_landmarks(s.as_bytes()).is_err());
    }

    #[test]
    fn rejects_short_frames_and_garbage() {
        assert!(read_landmarks(csv_for(&[(0, 10)]).as_bytes()).is_err());
        let s = "frame,point,x,y\n0,1,abc,2\n";
        assert!(matches!(read_landmarks(s.as_bytes()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn write_then_read_is_lossless() {
        let frames = vec![LandmarkFrame::new(
            7,
            (0..18).map(|i| Point::new(i as f64 / 3.0, -0.1 * i as f64)).collect(),
        )
        .unwrap()];
        let mut buf = Vec::new();
        write_landmarks(&mut buf, &frames).unwrap();
        assert_eq!(read_landmarks(buf.as_slice()).unwrap(), frames);
    }

    #[test]
    fn layout_validation() {
        assert!(LandmarkLayout::default().validate().is_ok());
        let mut l = LandmarkLayout::default();
        l.mouth[0] = 1;
        assert!(l.validate().is_err());
    }
}
