use std::f64::consts::{PI, TAU};

use approx::assert_abs_diff_eq;
use motif_core::analyzer::{
    check_clause, count_oscillations, discriminate, extract_features, grounding_events, rank,
    segment_primitives, winding, AnalyzerConfig,
};
use motif_core::dsl::{parse_description, Axis, Clause, Primitive, Side, Turn};
use motif_core::generators::{
    box_obstacle, gen_circle, gen_detour, gen_horizontal_shaking, gen_line, gen_vertical_shaking,
    GeneratorParams,
};
use motif_core::trajectory::{Compass, KeypointTrack, Point, SceneObject, Trajectory};
use motif_core::Error;

mod common;
use common::cup_scene;

fn cfg() -> AnalyzerConfig {
    AnalyzerConfig::default()
}

fn path(points: &[(f64, f64)]) -> Trajectory {
    let pts: Vec<Point> = points.iter().map(|&(x, y)| Point::new(x, y)).collect();
    Trajectory::single(KeypointTrack::from_points(0, &pts))
}

fn line(a: (f64, f64), b: (f64, f64)) -> GeneratorParams {
    GeneratorParams {
        start: Point::new(a.0, a.1),
        end: Point::new(b.0, b.1),
        n: 40,
        ..Default::default()
    }
}

fn verdict(traj: &Trajectory, scene: &[SceneObject], text: &str) -> (u8, f64) {
    let ast = parse_description(text).unwrap();
    let v = discriminate(traj, scene, &ast, &cfg()).unwrap();
    (v.label, v.score)
}

#[test]
fn line_is_one_segment() {
    let g = gen_line(&line((0.1, 0.1), (0.9, 0.4))).unwrap();
    let segs = segment_primitives(&g.trajectory, &cfg()).unwrap();
    assert_eq!(segs.len(), 1);
    assert_eq!(segs[0].span, 0..256);
}

#[test]
fn l_path_is_two_segments() {
    let (traj, _) = cup_scene();
    let segs = segment_primitives(&traj, &cfg()).unwrap();
    let dirs: Vec<_> = segs.iter().map(|s| s.dominant_direction).collect();
    assert_eq!(dirs, vec![Some(Compass::Down), Some(Compass::Left)]);
    assert_eq!(segs[0].span.end, segs[1].span.start);
}

#[test]
fn shaking_is_one_oscillating_block() {
    let g = gen_vertical_shaking(&GeneratorParams { n: 20, frequency: 4, ..Default::default() }).unwrap();
    let segs = segment_primitives(&g.trajectory, &cfg()).unwrap();
    assert_eq!(segs.len(), 1);
    assert!(segs[0].oscillating);
    assert_eq!(segs[0].legs, 4);
    assert_eq!(count_oscillations(&g.trajectory, Some(Axis::Vertical), &cfg()).unwrap().0, 4);
}

#[test]
fn degenerate_path_is_an_error() {
    let t = path(&[(0.3, 0.3), (0.3, 0.3)]);
    assert!(matches!(segment_primitives(&t, &cfg()), Err(Error::DegeneratePath(_))));
}

#[test]
fn oscillation_counts() {
    let straight = gen_line(&line((0.1, 0.5), (0.9, 0.5))).unwrap();
    assert_eq!(count_oscillations(&straight.trajectory, None, &cfg()).unwrap(), (0, 0.0));

    let shake = gen_vertical_shaking(&GeneratorParams {
        n: 10,
        frequency: 2,
        amplitude: 0.1,
        ..Default::default()
    })
    .unwrap();
    let (count, amp) = count_oscillations(&shake.trajectory, Some(Axis::Vertical), &cfg()).unwrap();
    assert_eq!(count, 2);
    assert_abs_diff_eq!(amp, 0.1, epsilon = 1e-3);
}

#[test]
fn sine_sweep_counts_half_cycles() {
    // leftward sweep modulated by cos over three full periods: the residual
    // alternates sign six times
    let pts: Vec<(f64, f64)> = (0..=300)
        .map(|i| {
            let s = i as f64 / 300.0;
            (0.9 - 0.8 * s, 0.5 + 0.05 * (3.0 * TAU * s).cos())
        })
        .collect();
    let (count, amp) = count_oscillations(&path(&pts), None, &cfg()).unwrap();
    assert_eq!(count, 6);
    assert_abs_diff_eq!(amp, 0.1, epsilon = 0.01);
}

#[test]
fn winding_examples() {
    let c = gen_circle(&GeneratorParams {
        count: 2,
        turn: Turn::CounterClockwise,
        n: 48,
        ..Default::default()
    })
    .unwrap();
    let w = winding(&c.trajectory, &cfg()).unwrap();
    assert_eq!(w.revolution_count, 2);
    assert_eq!(w.direction, Some(Turn::CounterClockwise));

    let l = gen_line(&line((0.0, 0.0), (1.0, 0.3))).unwrap();
    let w = winding(&l.trajectory, &cfg()).unwrap();
    assert_eq!(w.revolution_count, 0);
    assert_eq!(w.direction, None);

    let square = path(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)]);
    let w = winding(&square, &cfg()).unwrap();
    assert_abs_diff_eq!(w.total_turning, TAU, epsilon = 1e-6);
    assert_eq!(w.direction, Some(Turn::Clockwise));
}

#[test]
fn winding_is_additive_over_loops() {
    let one = gen_circle(&GeneratorParams { count: 1, n: 64, ..Default::default() }).unwrap();
    let three = gen_circle(&GeneratorParams { count: 3, n: 64, ..Default::default() }).unwrap();
    let w1 = winding(&one.trajectory, &cfg()).unwrap().total_turning;
    let w3 = winding(&three.trajectory, &cfg()).unwrap().total_turning;
    assert_abs_diff_eq!(w3, 3.0 * w1, epsilon = 1e-6);
    assert_abs_diff_eq!(w1, TAU, epsilon = 1e-6);
}

#[test]
fn grounding_examples() {
    let obstacle = box_obstacle("manhole", 0.4, 0.4, 0.6, 0.6);
    let p = GeneratorParams {
        start: Point::new(0.5, 0.9),
        end: Point::new(0.5, 0.1),
        side: Side::Right,
        n: 80,
        ..Default::default()
    };
    let g = gen_detour(&p, &obstacle).unwrap();
    let e = &grounding_events(&g.trajectory, &g.scene, &cfg()).unwrap()[0];
    assert!(!e.entered_region);
    assert_eq!(e.passing_side, Some(Side::Right));
    assert!(e.chord_crossed);

    let through = gen_line(&line((0.5, 0.9), (0.5, 0.1))).unwrap();
    let e = &grounding_events(&through.trajectory, &g.scene, &cfg()).unwrap()[0];
    assert!(e.entered_region);
    assert_eq!(e.min_distance, 0.0);

    // radial approach toward the box centre
    let approach = gen_line(&line((0.95, 0.95), (0.7, 0.7))).unwrap();
    let e = &grounding_events(&approach.trajectory, &g.scene, &cfg()).unwrap()[0];
    assert!(e.distance_slope < 0.0);
}

#[test]
fn clause_rubrics() {
    let left = gen_line(&line((0.9, 0.5), (0.1, 0.5))).unwrap();
    let f = extract_features(&left.trajectory, &[], &cfg()).unwrap();
    let translate = |c: Compass| Clause::Path(Primitive::Translate { direction: c.into() });
    assert_abs_diff_eq!(check_clause(&f, &translate(Compass::Left), &cfg()).unwrap(), 1.0, epsilon = 1e-12);
    assert_eq!(check_clause(&f, &translate(Compass::Right), &cfg()).unwrap(), 0.0);

    let shake = gen_vertical_shaking(&GeneratorParams { n: 10, frequency: 2, ..Default::default() }).unwrap();
    let f = extract_features(&shake.trajectory, &[], &cfg()).unwrap();
    let four = Clause::Path(Primitive::Oscillate {
        axis: Some(Axis::Vertical),
        count: Some(4),
    });
    assert_eq!(check_clause(&f, &four, &cfg()).unwrap(), 0.0);
    let three = Clause::Path(Primitive::Oscillate {
        axis: Some(Axis::Vertical),
        count: Some(3),
    });
    assert_abs_diff_eq!(check_clause(&f, &three, &cfg()).unwrap(), 0.5);

    let ast = parse_description("move over the sofa").unwrap();
    let err = discriminate(&left.trajectory, &[], &ast, &cfg()).unwrap_err();
    assert!(matches!(err, Error::UnknownObject(ref o) if o == "sofa"));
}

#[test]
fn discriminate_basics() {
    let up = gen_line(&line((0.5, 0.9), (0.5, 0.1))).unwrap();
    assert_eq!(verdict(&up.trajectory, &[], "move upward").0, 1);
    assert_eq!(verdict(&up.trajectory, &[], "move downward").0, 0);

    let v = discriminate(&up.trajectory, &[], &parse_description("move upward, then move to the left").unwrap(), &cfg())
        .unwrap();
    assert_eq!(v.clause_scores.len(), 2);
    assert_eq!(v.clause_scores[1].score, 0.0);
    assert_eq!(v.label, 0);
}

#[test]
fn pick_and_place_scene() {
    let (traj, scene) = cup_scene();
    let texts = [
        ("move downward, then move to the left", 1),
        ("move farther from the laptop, move downward, then move to the left", 1),
        ("move downward and to the left, passing over the laptop", 0),
        ("move over the laptop", 0),
        ("move downward and farther from the laptop, then move to the left", 1),
    ];
    for (text, want) in texts {
        let (label, score) = verdict(&traj, &scene, text);
        assert_eq!(label, want, "{text}: score {score}");
    }
}

#[test]
fn sweeping_oscillation_scenes() {
    // curl hair: downward sweep with side-to-side oscillations
    let curl = gen_horizontal_shaking(&GeneratorParams {
        start: Point::new(0.4, 0.1),
        n: 16,
        frequency: 6,
        amplitude: 0.15,
        drift: Some(Point::new(0.0, 0.6)),
        ..Default::default()
    })
    .unwrap();
    let t = &curl.trajectory;
    assert_eq!(verdict(t, &[], "move downward, while making horizontal oscillations").0, 1);
    assert_eq!(verdict(t, &[], "move downward, while making side-to-side movements").0, 1);
    assert_eq!(verdict(t, &[], "move downward").0, 0);
    assert_eq!(verdict(t, &[], "move downward, while making vertical oscillations").0, 0);

    // sprinkle: leftward sweep with vertical oscillations
    let sprinkle = gen_vertical_shaking(&GeneratorParams {
        start: Point::new(0.8, 0.4),
        n: 16,
        frequency: 6,
        amplitude: 0.15,
        drift: Some(Point::new(-0.6, 0.0)),
        ..Default::default()
    })
    .unwrap();
    let t = &sprinkle.trajectory;
    for text in [
        "move to the left, while making vertical oscillations and alternating rotations",
        "move to the left, while making vertical oscillations",
        "move to the left, while making vertical shaking movements",
    ] {
        assert_eq!(verdict(t, &[], text).0, 1, "{text}");
    }
    assert_eq!(verdict(t, &[], "move to the left in a straight line").0, 0);
}

#[test]
fn navigation_detour_scene() {
    let manhole = box_obstacle("manhole", 0.4, 0.4, 0.6, 0.6);
    let g = gen_detour(
        &GeneratorParams {
            start: Point::new(0.5, 0.9),
            end: Point::new(0.5, 0.1),
            side: Side::Right,
            n: 80,
            ..Default::default()
        },
        &manhole,
    )
    .unwrap();
    let t = &g.trajectory;
    let s = &g.scene;
    assert_eq!(verdict(t, s, "make a detour to the right of the manhole").0, 1);
    assert_eq!(verdict(t, s, "move forward, making a detour to the right of the manhole").0, 1);
    assert_eq!(verdict(t, s, "move forward in the shortest path").0, 0);
    assert_eq!(verdict(t, s, "move forward in a straight line, moving over the manhole").0, 0);
    assert_eq!(verdict(t, s, "make a detour to the left of the manhole").0, 0);
}

#[test]
fn scale_and_translation_leave_labels_unchanged() {
    let (traj, scene) = cup_scene();
    let moved = traj.map_points(|p| p * 3.7 + Point::new(-12.0, 40.0));
    let moved_scene: Vec<SceneObject> = scene
        .iter()
        .map(|o| SceneObject::new(o.label.clone(), o.region.map_points(|p| p * 3.7 + Point::new(-12.0, 40.0))))
        .collect();
    for text in [
        "move downward, then move to the left",
        "move farther from the laptop, move downward, then move to the left",
        "move over the laptop",
    ] {
        let a = verdict(&traj, &scene, text);
        let b = verdict(&moved, &moved_scene, text);
        assert_eq!(a.0, b.0);
        assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-6);
    }
}

#[test]
fn ranking_prefers_rounder_circles() {
    let circle = |sigma: f64| {
        gen_circle(&GeneratorParams {
            center: Point::new(0.5, 0.5),
            radius: 0.3,
            n: 64,
            noise_sigma: sigma,
            seed: 11,
            ..Default::default()
        })
        .unwrap()
        .trajectory
    };
    let shake = |vertical: bool| {
        let p = GeneratorParams { n: 16, frequency: 4, amplitude: 0.3, ..Default::default() };
        if vertical { gen_vertical_shaking(&p) } else { gen_horizontal_shaking(&p) }
            .unwrap()
            .trajectory
    };
    let trajs = vec![shake(true), circle(0.05), circle(0.0), shake(false), circle(0.1), circle(0.02)];
    let ast = parse_description("make a circular motion clockwise").unwrap();
    let ranked = rank(&trajs, &[], &ast, &cfg());
    let order: Vec<usize> = ranked.iter().map(|r| r.0).collect();
    assert_eq!(&order[..4], &[2, 5, 1, 4], "{ranked:?}");
    assert!(ranked.windows(2).take(3).all(|w| w[0].1 > w[1].1), "{ranked:?}");
    assert!(ranked[3].1 > ranked[4].1, "{ranked:?}");

    let single = rank(&trajs[2..3], &[], &ast, &cfg());
    assert_eq!(single.len(), 1);
    assert_eq!(single[0].0, 0);
}

#[test]
fn angle_conventions() {
    // a quarter turn right-then-down reads as clockwise on screen
    let t = path(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
    let w = winding(&t, &cfg()).unwrap();
    assert!(w.total_turning > 0.0 && w.total_turning < PI);
}
