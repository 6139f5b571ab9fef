//! Per-frame facial feature scalars: eye and mouth opening ratios and the
//! entropy of landmark-to-centroid distances.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::landmarks::{LandmarkFrame, LandmarkLayout};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FacialFeatures {
    pub efv: f64,
    pub mfv: f64,
    pub entropy: f64,
}

impl FacialFeatures {
    pub fn new(efv: f64, mfv: f64, entropy: f64) -> Self {
        Self { efv, mfv, entropy }
    }
}

/// Eye opening: mean vertical lid distance over the corner-to-corner width.
pub fn eye_feature(f: &LandmarkFrame, layout: &LandmarkLayout) -> Result<f64> {
    let [p1, p2, p3, p4, p5, p6] = layout.eye.map(|i| f.point(i));
    let width = p1.dist(&p4);
    if width <= 0.0 {
        return Err(Error::DegenerateFrame {
            frame: f.frame_index,
            reason: "eye corners coincide".into(),
        });
    }
    Ok((p2.dist(&p6) + p3.dist(&p5)) / (2.0 * width))
}

/// Mouth opening: mean of three vertical lip distances over the mouth width.
pub fn mouth_feature(f: &LandmarkFrame, layout: &LandmarkLayout) -> Result<f64> {
    let [p11, p12, p13, p14, p15, p16, p17, p18] = layout.mouth.map(|i| f.point(i));
    let width = p11.dist(&p15);
    if width <= 0.0 {
        return Err(Error::DegenerateFrame {
            frame: f.frame_index,
            reason: "mouth corners coincide".into(),
        });
    }
    Ok((p12.dist(&p16) + p13.dist(&p17) + p14.dist(&p18)) / (3.0 * width))
}

/// Shannon entropy (nats) of the landmark-to-centroid distance histogram.
///
/// Distances are binned into intervals of width `mean / std`; interval `i`
/// (0-based) holds distances in `[i·w, (i+1)·w)`. A zero spread yields a
/// single bin and therefore zero entropy.
pub fn motion_entropy(f: &LandmarkFrame) -> Result<f64> {
    let pts = &f.points;
    let n = pts.len();
    if n < 2 {
        return Err(Error::InvalidParameter("entropy needs at least two points".into()));
    }
    let nf = n as f64;
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / nf;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / nf;
    let dists: Vec<f64> = pts.iter().map(|p| (cx - p.x).hypot(cy - p.y)).collect();
    let mean = dists.iter().sum::<f64>() / nf;
    let std = (dists.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / nf).sqrt();
    if std <= 0.0 || mean <= 0.0 {
        return Ok(0.0);
    }
    let width = mean / std;

    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for l in &dists {
        *counts.entry((l / width).floor() as u64).or_default() += 1;
    }
    let h = counts
        .values()
        .map(|&c| {
            let q = c as f64 / nf;
            -q * q.ln()
        })
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// All three features of a frame.
pub fn extract(f: &LandmarkFrame, layout: &LandmarkLayout) -> Result<FacialFeatures> {
    Ok(FacialFeatures {
        efv: eye_feature(f, layout)?,
        mfv: mouth_feature(f, layout)?,
        entropy: motion_entropy(f)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver_state::landmarks::Point;
    use approx::assert_relative_eq;

    fn frame_with(overrides: &[(usize, (f64, f64))]) -> LandmarkFrame {
        let mut pts: Vec<Point> = (0..20).map(|i| Point::new(i as f64, (i * i) as f64 * 0.1)).collect();
        for &(n, (x, y)) in overrides {
            pts[n - 1] = Point::new(x, y);
        }
        LandmarkFrame::new(0, pts).unwrap()
    }

    fn symmetric_eye() -> LandmarkFrame {
        frame_with(&[
            (1, (0.0, 0.0)),
            (2, (1.0, 1.0)),
            (3, (3.0, 1.0)),
            (4, (4.0, 0.0)),
            (5, (3.0, -1.0)),
            (6, (1.0, -1.0)),
        ])
    }

    #[test]
    fn eye_feature_examples() {
        let l = LandmarkLayout::default();
        assert_relative_eq!(eye_feature(&symmetric_eye(), &l).unwrap(), 0.5);
        let closed = frame_with(&[
            (1, (0.0, 0.0)),
            (2, (1.0, 0.0)),
            (3, (3.0, 0.0)),
            (4, (4.0, 0.0)),
            (5, (3.0, 0.0)),
            (6, (1.0, 0.0)),
        ]);
        assert_eq!(eye_feature(&closed, &l).unwrap(), 0.0);
    }

    #[test]
    fn coincident_eye_corners_are_degenerate() {
        let f = frame_with(&[(1, (2.0, 2.0)), (4, (2.0, 2.0))]);
        assert!(matches!(
            eye_feature(&f, &LandmarkLayout::default()),
            Err(Error::DegenerateFrame { .. })
        ));
    }

    #[test]
    fn mouth_feature_examples() {
        let l = LandmarkLayout::default();
        // corners 4 apart, three vertical pairs each 4 apart
        let open = frame_with(&[
            (11, (0.0, 0.0)),
            (15, (4.0, 0.0)),
            (12, (1.0, 2.0)),
            (16, (1.0, -2.0)),
            (13, (2.0, 2.0)),
            (17, (2.0, -2.0)),
            (14, (3.0, 2.0)),
            (18, (3.0, -2.0)),
        ]);
        assert_relative_eq!(mouth_feature(&open, &l).unwrap(), 1.0);
        let closed = frame_with(&[
            (11, (0.0, 0.0)),
            (15, (4.0, 0.0)),
            (12, (1.0, 0.0)),
            (16, (1.0, 0.0)),
            (13, (2.0, 0.0)),
            (17, (2.0, 0.0)),
            (14, (3.0, 0.0)),
            (18, (3.0, 0.0)),
        ]);
        assert_eq!(mouth_feature(&closed, &l).unwrap(), 0.0);
        let degenerate = frame_with(&[(11, (1.0, 1.0)), (15, (1.0, 1.0))]);
        assert!(mouth_feature(&degenerate, &l).is_err());
    }

    #[test]
    fn entropy_degenerate_cases_are_zero() {
        let coincident = LandmarkFrame::new(0, vec![Point::new(3.0, -2.0); 18]).unwrap();
        assert_eq!(motion_entropy(&coincident).unwrap(), 0.0);

        let circle: Vec<Point> = (0..24)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / 24.0;
                Point::new(100.0 + 30.0 * a.cos(), 50.0 + 30.0 * a.sin())
            })
            .collect();
        let circle = LandmarkFrame::new(0, circle).unwrap();
        assert!(motion_entropy(&circle).unwrap().abs() < 1e-12);
    }

    #[test]
    fn entropy_with_two_distance_levels() {
        // only two distinct centroid distances, so at most two bins
        let mut pts = Vec::new();
        for (r, phase) in [(1.0, 0.0), (3.0, 0.25)] {
            for i in 0..4 {
                let a = (i as f64 + phase) * std::f64::consts::FRAC_PI_2;
                pts.push(Point::new(r * f64::cos(a), r * f64::sin(a)));
            }
        }
        // pad to 18 with antipodal pairs, keeping the centroid at the origin
        for i in 0..5 {
            let a = i as f64 * 0.3;
            pts.push(Point::new(a.cos(), a.sin()));
            pts.push(Point::new(-a.cos(), -a.sin()));
        }
        let f = LandmarkFrame::new(0, pts).unwrap();
        let h = motion_entropy(&f).unwrap();
        assert!(h > 0.0);
        assert!(h <= (2.0f64).ln() + 1e-12);
    }
}
