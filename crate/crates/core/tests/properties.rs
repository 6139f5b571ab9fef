use proptest::prelude::*;

use shared_follow::authority::{authority_factor, blend_accel, AllocationParams};
use shared_follow::config::RunConfigFile;
use shared_follow::controllers::{sat, terminal_exponent, terminal_surface, ErrorState};
use shared_follow::driver_state::{eye_feature, gaussian_membership, mouth_feature, LandmarkFrame, LandmarkLayout, Point};
use shared_follow::history::{HistoryBuffer, Snapshot};
use shared_follow::sim::{ControllerKind, DriverSource, LeadProfile, ScenarioConfig};
use shared_follow::vehicle::{desired_gap, idm_accel, IdmParams};

fn snapshot() -> impl Strategy<Value = Snapshot> {
    (0.0..40.0f64, 0.0..40.0f64, 0.1..150.0f64).prop_map(|(v_follow, v_lead, gap)| Snapshot { v_follow, v_lead, gap })
}

fn frame_points() -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((50.0..600.0f64, 50.0..400.0f64).prop_map(|(x, y)| Point::new(x, y)), 18..30)
}

proptest! {
    #[test]
    fn history_matches_a_plain_list(cap in 1usize..64, pushes in prop::collection::vec(snapshot(), 1..200), k in 0usize..300) {
        let mut h = HistoryBuffer::new(cap);
        for s in &pushes {
            h.push(*s);
        }
        let kept = &pushes[pushes.len().saturating_sub(cap)..];
        prop_assert_eq!(h.len(), kept.len());
        prop_assert_eq!(h.lookback(k).unwrap(), kept[kept.len() - 1 - k.min(kept.len() - 1)]);
    }

    #[test]
    fn idm_never_exceeds_a_max(s in snapshot()) {
        let p = IdmParams::default();
        let a = idm_accel(s.v_follow, s.gap, desired_gap(s.v_follow, s.v_follow - s.v_lead, &p), &p).unwrap();
        prop_assert!(a <= p.a_max);
        prop_assert!(a.is_finite());
    }

    #[test]
    fn closer_gap_never_brakes_less(s in snapshot(), shrink in 0.05..1.0f64) {
        let p = IdmParams::default();
        let star = desired_gap(s.v_follow, s.v_follow - s.v_lead, &p);
        let far = idm_accel(s.v_follow, s.gap, star, &p).unwrap();
        let near = idm_accel(s.v_follow, s.gap * shrink, star, &p).unwrap();
        if star >= 0.0 {
            prop_assert!(near <= far);
        }
    }

    #[test]
    fn authority_is_monotone_and_bounded(a in 0.0..4.0f64, b in 0.0..4.0f64,
                                         r_min in 0.0..1.0f64, w1 in 0.1..1.0f64, w2 in 0.1..1.5f64) {
        let p = AllocationParams::with_thresholds(r_min, r_min + w1, r_min + w1 + w2);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (e_lo, e_hi) = (authority_factor(lo, &p).unwrap(), authority_factor(hi, &p).unwrap());
        prop_assert!((0.0..=1.0).contains(&e_lo) && (0.0..=1.0).contains(&e_hi));
        prop_assert!(e_lo <= e_hi);
    }

    #[test]
    fn blend_stays_between_its_inputs(a in -20.0..20.0f64, h in -20.0..20.0f64, eta in 0.0..=1.0f64) {
        let b = blend_accel(a, h, eta);
        let slack = 4.0 * f64::EPSILON * a.abs().max(h.abs());
        prop_assert!(b >= a.min(h) - slack && b <= a.max(h) + slack);
    }

    #[test]
    fn opening_ratios_ignore_translation_and_scale(pts in frame_points(), dx in -40.0..40.0f64,
                                                    dy in -40.0..40.0f64, k in 0.2..5.0f64) {
        let layout = LandmarkLayout::default();
        let f = LandmarkFrame::new(0, pts.clone()).unwrap();
        let moved = LandmarkFrame::new(0, pts.iter().map(|p| Point::new(k * p.x + dx, k * p.y + dy)).collect()).unwrap();
        let (e0, e1) = (eye_feature(&f, &layout).unwrap(), eye_feature(&moved, &layout).unwrap());
        let (m0, m1) = (mouth_feature(&f, &layout).unwrap(), mouth_feature(&moved, &layout).unwrap());
        prop_assert!((e0 - e1).abs() <= 1e-9 * e0.max(1.0));
        prop_assert!((m0 - m1).abs() <= 1e-9 * m0.max(1.0));
    }

    #[test]
    fn membership_is_symmetric_and_peaks_at_centre(c in -5.0..5.0f64, d in 0.0..5.0f64, sigma in 0.01..3.0f64) {
        let up = gaussian_membership(c + d, c, sigma).unwrap();
        let down = gaussian_membership(c - d, c, sigma).unwrap();
        prop_assert!((up - down).abs() <= 1e-12);
        prop_assert!(up <= 1.0 && up >= 0.0);
        prop_assert_eq!(gaussian_membership(c, c, sigma).unwrap(), 1.0);
    }

    #[test]
    fn surface_is_continuous_at_the_exponent_switch(e1 in -5.0..5.0f64, s in prop::sample::select(vec![-1.0, 1.0])) {
        // With the switch at |ε₂| = 1 both exponents give |ε₂|^q = 1.
        let below = ErrorState::new(e1, s * (1.0 - 1e-9));
        let above = ErrorState::new(e1, s * (1.0 + 1e-9));
        let f = |es: &ErrorState| terminal_surface(es, 0.8, terminal_exponent(es.eps2, 1.2, 1.0));
        prop_assert!((f(&below) - f(&above)).abs() < 1e-8);
    }

    #[test]
    fn sat_is_bounded_and_odd(x in -10.0..10.0f64, phi in 0.01..5.0f64) {
        prop_assert!(sat(x, phi).abs() <= 1.0);
        prop_assert_eq!(sat(-x, phi), -sat(x, phi));
    }

    #[test]
    fn weaving_leader_respects_its_ramp_rates(t in 0.0..100.0f64, literal in any::<bool>()) {
        let lead = LeadProfile::RampWeaving { literal };
        let a = lead.accel(t);
        prop_assert!((-3.0..=2.5).contains(&a));
        let dt = 1e-3;
        let dv = lead.speed(t + dt) - lead.speed(t);
        // A jump only happens in the literal profile, when the plateau is
        // restored at t = 66 s.
        if !(literal && (t - 66.0).abs() < 2.0 * dt) {
            prop_assert!(dv.abs() <= 3.0 * dt + 1e-9);
        }
        prop_assert!(lead.speed(t) >= 0.0);
    }

    #[test]
    fn run_files_round_trip(duration in 1.0..200.0f64, gap in 1.0..80.0f64, r in 0.0..3.0f64,
                            beta in 0.1..3.0f64, k3 in 0.1..5.0f64,
                            ctrl in prop::sample::select(vec![ControllerKind::AFtsmc, ControllerKind::Ftsmc, ControllerKind::Pid, ControllerKind::None])) {
        let mut cfg = ScenarioConfig {
            duration,
            initial_gap: gap,
            controller: ctrl,
            driver: DriverSource::Constant { reaction_time: r },
            ..ScenarioConfig::default()
        };
        cfg.ftsmc.beta = beta;
        cfg.adaptive.k3 = k3;
        let file = RunConfigFile::new(cfg);
        let back = RunConfigFile::from_toml_str(&file.to_toml_string().unwrap()).unwrap();
        prop_assert_eq!(back, file);
    }
}
