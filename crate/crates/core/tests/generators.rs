use motif_core::analyzer::{discriminate, AnalyzerConfig};
use motif_core::dsl::{format_description, Convexity, Side, Turn};
use motif_core::generators::{
    gen_arc, gen_circle, gen_detour, gen_horizontal_shaking, gen_vertical_shaking, synthetic_corpus, GeneratorParams,
};
use motif_core::trajectory::{point_segment_distance, Point, Region, SceneObject};
use proptest::prelude::*;

fn accepts(g: &motif_core::generators::Generated) -> f64 {
    discriminate(&g.trajectory, &g.scene, &g.ast, &AnalyzerConfig::default()).unwrap().score
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn circles_sit_on_their_radius_and_describe_themselves(
        cx in 0.35f64..0.65, cy in 0.35f64..0.65, r in 0.1f64..0.3,
        count in 1u32..=3, cw in any::<bool>(), n in 24usize..64,
    ) {
        let p = GeneratorParams {
            center: Point::new(cx, cy), radius: r, count, n,
            turn: if cw { Turn::Clockwise } else { Turn::CounterClockwise },
            ..GeneratorParams::default()
        };
        let g = gen_circle(&p).unwrap();
        for q in g.points() {
            prop_assert!((q.dist(p.center) - r).abs() < 1e-9);
        }
        prop_assert!(accepts(&g) >= 0.9, "{}", format_description(&g.ast));
    }

    #[test]
    fn shaking_describes_itself(
        x in 0.3f64..0.7, y in 0.3f64..0.7, amp in 0.1f64..0.3,
        freq in 2u32..=6, n in 8usize..24, vertical in any::<bool>(),
    ) {
        let p = GeneratorParams {
            start: Point::new(x, y), amplitude: amp, frequency: freq, n,
            ..GeneratorParams::default()
        };
        let g = if vertical { gen_vertical_shaking(&p) } else { gen_horizontal_shaking(&p) }.unwrap();
        let pts = g.points();
        // the cross axis never moves without drift
        for q in &pts {
            if vertical {
                prop_assert_eq!(q.x, x);
            } else {
                prop_assert_eq!(q.y, y);
            }
        }
        prop_assert!(accepts(&g) >= 0.9, "{}", format_description(&g.ast));
    }

    #[test]
    fn arcs_bulge_the_requested_amount(
        x0 in 0.15f64..0.35, y0 in 0.15f64..0.85, x1 in 0.65f64..0.85, y1 in 0.15f64..0.85,
        frac in 0.15f64..0.3, convex in any::<bool>(),
    ) {
        let (start, end) = (Point::new(x0, y0), Point::new(x1, y1));
        let bulge = frac * start.dist(end);
        let p = GeneratorParams {
            start, end, bulge, n: 40,
            convexity: if convex { Convexity::Convex } else { Convexity::Concave },
            ..GeneratorParams::default()
        };
        let g = gen_arc(&p).unwrap();
        let pts = g.points();
        prop_assert_eq!(pts[0], start);
        prop_assert!(pts.last().unwrap().dist(end) < 1e-9);
        let sag = pts.iter().map(|&q| point_segment_distance(q, start, end)).fold(0.0, f64::max);
        prop_assert!((sag - bulge).abs() < 0.02 * start.dist(end) + 1e-3, "sag {sag} bulge {bulge}");
        prop_assert!(accepts(&g) >= 0.9, "{}", format_description(&g.ast));
    }

    #[test]
    fn detours_keep_their_clearance(
        y in 0.4f64..0.6, hw in 0.05f64..0.12, hh in 0.05f64..0.12,
        clearance in 0.04f64..0.08, left in any::<bool>(),
    ) {
        let obstacle = SceneObject::new("crate", Region::boxed(0.5 - hw, y - hh, 0.5 + hw, y + hh));
        let p = GeneratorParams {
            start: Point::new(0.1, y), end: Point::new(0.9, y), n: 80, clearance,
            side: if left { Side::Left } else { Side::Right },
            ..GeneratorParams::default()
        };
        let g = gen_detour(&p, &obstacle).unwrap();
        let pts = g.points();
        // the ramps cut the corners, so only the pass itself keeps full clearance
        let min = pts.iter().map(|&q| obstacle.region.distance(q)).fold(f64::INFINITY, f64::min);
        prop_assert!(pts.iter().all(|&q| !obstacle.region.contains(q)));
        prop_assert!(min > 0.5 * clearance, "min {min} clearance {clearance}");
        let beside: Vec<f64> = pts.iter().filter(|q| (q.x - 0.5).abs() <= hw).map(|&q| obstacle.region.distance(q)).collect();
        prop_assert!(!beside.is_empty());
        prop_assert!(beside.iter().all(|&d| d >= clearance - 1e-9));
        prop_assert!(accepts(&g) >= 0.9, "{}", format_description(&g.ast));
    }
}

#[test]
fn corpus_is_deterministic_per_seed() {
    let a = synthetic_corpus(25, 4, 320.0).unwrap();
    let b = synthetic_corpus(25, 4, 320.0).unwrap();
    let c = synthetic_corpus(25, 5, 320.0).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let ids: Vec<&str> = a.iter().map(|e| e.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(ids.len(), sorted.len());
}

#[test]
fn corpus_episodes_match_their_descriptions() {
    let cfg = AnalyzerConfig::default();
    for ep in synthetic_corpus(60, 8, 320.0).unwrap() {
        let ast = motif_core::dsl::parse_description(&ep.motion_description).unwrap();
        let v = motif_core::analyzer::discriminate_episode(&ep, &ast, &cfg).unwrap();
        assert_eq!(v.label, 1, "{}: {}", ep.id, ep.motion_description);
    }
}
