use motif_core::render::{
    decode_png, encode_png, gradient_color, grid_layout, lerp_color, read_png, render_flow_overlay,
    render_keypoint_overlay, render_storyboard, select_keyframes, write_png, RenderConfig, RAINBOW,
};
use motif_core::trajectory::{Frame, KeypointTrack};
use motif_core::Error;
use proptest::prelude::*;

mod common;
use common::{assert_envelope_untouched, assert_gradient_monotone, noisy, track};

fn cfg() -> RenderConfig {
    RenderConfig::default()
}




#[test]
fn gradient_is_monotone_along_the_stroke() {
    assert_gradient_monotone(50, 2024);
}

#[test]
fn pixels_outside_the_envelope_are_untouched() {
    assert_envelope_untouched(50, 7);
}

#[test]
fn two_sample_track_colors() {
    let c = cfg();
    let base = Frame::filled(0, 200, 100, [40, 40, 40]);
    let out = render_keypoint_overlay(&base, &track(0, &[(10.0, 50.0), (150.0, 50.0)]), &c).unwrap();
    assert_eq!(out.pixel(10, 50), Some([255, 255, 255]));
    assert_eq!(out.pixel(150, 50), Some([255, 0, 0]));
    assert_eq!(out.pixel(190, 90), Some([40, 40, 40]));
}

#[test]
fn middle_segment_is_half_way() {
    // three segments: the middle one sits at t = 1/2
    let c = cfg();
    let base = Frame::filled(0, 300, 60, [0, 0, 0]);
    let out = render_keypoint_overlay(
        &base,
        &track(0, &[(10.0, 30.0), (100.0, 30.0), (190.0, 30.0), (280.0, 30.0)]),
        &c,
    )
    .unwrap();
    assert_eq!(out.pixel(145, 30), Some([128, 255, 128]));
    assert_eq!(lerp_color([255, 255, 255], [0, 255, 0], 0.5), [128, 255, 128]);
    assert_eq!(gradient_color(&c, 1, 3), [128, 255, 128]);
}

#[test]
fn flow_colors_wrap_every_twelve() {
    let c = cfg();
    let base = Frame::filled(0, 300, 300, [0, 0, 0]);
    let tracks: Vec<KeypointTrack> =
        (0..13).map(|k| track(k, &[(10.0, 10.0 + 20.0 * k as f64), (280.0, 10.0 + 20.0 * k as f64)])).collect();
    let out = render_flow_overlay(&base, &tracks, &c).unwrap();
    let color = |k: u32| out.pixel(150, 10 + 20 * k).unwrap();
    assert_eq!(color(0), color(12));
    assert_eq!(color(0), RAINBOW[0]);
    for k in 1..12 {
        assert_eq!(color(k), RAINBOW[k as usize]);
        assert_ne!(color(k), color(0));
    }
}

#[test]
fn flow_draws_in_keypoint_order() {
    let c = cfg();
    let base = Frame::filled(0, 100, 100, [0, 0, 0]);
    let a = track(5, &[(10.0, 50.0), (90.0, 50.0)]);
    let b = track(2, &[(50.0, 10.0), (50.0, 90.0)]);
    // id 5 is drawn after id 2 whatever the input order
    for tracks in [vec![a.clone(), b.clone()], vec![b, a]] {
        let out = render_flow_overlay(&base, &tracks, &c).unwrap();
        assert_eq!(out.pixel(50, 50), Some(RAINBOW[5]));
    }
}

#[test]
fn single_track_flow_matches_overlay_geometry() {
    let c = cfg();
    let base = Frame::filled(0, 120, 120, [0, 0, 0]);
    let pts = [(10.0, 10.0), (60.0, 100.0), (110.0, 20.0)];
    let flow = render_flow_overlay(&base, &[track(0, &pts)], &c).unwrap();
    let plain = RenderConfig { endpoint_radius: 0, ..c.clone() };
    let overlay = render_keypoint_overlay(&base, &track(0, &pts), &plain).unwrap();
    for y in 0..120 {
        for x in 0..120 {
            let touched = |f: &Frame| f.pixel(x, y) != Some([0, 0, 0]);
            assert_eq!(touched(&flow), touched(&overlay), "({x},{y})");
        }
    }
}

#[test]
fn missing_raster_is_an_error() {
    let bare = Frame { index: 9, width: 10, height: 10, pixels: None };
    let err = render_keypoint_overlay(&bare, &track(0, &[(1.0, 1.0)]), &cfg()).unwrap_err();
    assert!(matches!(err, Error::MissingRaster(9)));
}

#[test]
fn renders_are_byte_identical() {
    let c = cfg();
    let base = noisy(0, 96, 64, 1);
    let t = track(0, &[(5.0, 5.0), (40.0, 60.0), (90.0, 10.0)]);
    let png = |f: Frame| encode_png(&f).unwrap();
    assert_eq!(
        png(render_keypoint_overlay(&base, &t, &c).unwrap()),
        png(render_keypoint_overlay(&base, &t, &c).unwrap())
    );
    assert_eq!(
        png(render_flow_overlay(&base, std::slice::from_ref(&t), &c).unwrap()),
        png(render_flow_overlay(&base, &[t], &c).unwrap())
    );
}

#[test]
fn png_round_trip() {
    let f = noisy(0, 33, 17, 5);
    let back = decode_png(&encode_png(&f).unwrap(), 0).unwrap();
    assert_eq!(back, f);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.png");
    write_png(&f, &path).unwrap();
    assert_eq!(read_png(&path, 0).unwrap(), f);
}

fn solid(i: u64, c: u8) -> Frame {
    Frame::filled(i, 32, 24, [c, c, c])
}

#[test]
fn keyframes_pick_cluster_representatives() {
    let frames = [solid(0, 20), solid(1, 20), solid(2, 220), solid(3, 220)];
    assert_eq!(select_keyframes(&frames, 2, 0).unwrap(), vec![0, 2]);
    assert_eq!(select_keyframes(&frames, 4, 0).unwrap(), vec![0, 1, 2, 3]);
    let same = [solid(0, 5), solid(1, 5), solid(2, 5)];
    assert_eq!(select_keyframes(&same, 2, 3).unwrap(), vec![0, 1]);
    assert!(matches!(select_keyframes(&frames, 5, 0), Err(Error::InvalidArgument(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn duplicating_a_selected_frame_changes_nothing(
        levels in prop::collection::vec(0u8..=255, 3..9),
        n in 1usize..4,
        seed in 0u64..1000,
        pick in 0usize..8,
    ) {
        let frames: Vec<Frame> = levels.iter().enumerate().map(|(i, &c)| solid(i as u64, c)).collect();
        prop_assume!(n <= frames.len());
        let chosen = select_keyframes(&frames, n, seed).unwrap();
        prop_assert!(chosen.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(chosen.len(), n);
        let dup = chosen[pick % chosen.len()];
        let mut more = frames.clone();
        more.push(Frame { index: frames.len() as u64, ..frames[dup].clone() });
        prop_assert_eq!(select_keyframes(&more, n, seed).unwrap(), chosen);
    }
}

#[test]
fn storyboard_layout_and_labels() {
    let c = cfg();
    let colors = [10u8, 60, 110, 160, 210, 250];
    let frames: Vec<Frame> = colors.iter().enumerate().map(|(i, &v)| solid(i as u64, v)).collect();
    for n in [2, 4] {
        let (rows, cols) = grid_layout(n).unwrap();
        let board = render_storyboard(&frames, n, &c).unwrap();
        assert_eq!(board.width, 32 * cols);
        assert_eq!(board.height % rows, 0);
        let cell_h = board.height / rows;
        let label_h = cell_h - 24;
        let picked = select_keyframes(&frames, n, c.keyframe_seed).unwrap();
        for (slot, &i) in picked.iter().enumerate() {
            let (ox, oy) = ((slot as u32 % cols) * 32, (slot as u32 / cols) * cell_h);
            // the image part of each cell is the frame's flat color
            let v = colors[i];
            for y in oy + label_h..oy + cell_h {
                for x in ox..ox + 32 {
                    assert_eq!(board.pixel(x, y), Some([v, v, v]));
                }
            }
            // and the label strip carries some ink
            let ink = (oy..oy + label_h).any(|y| (ox..ox + 32).any(|x| board.pixel(x, y) == Some(c.label_color)));
            assert!(ink, "cell {slot} has no label");
        }
    }
    assert!(render_storyboard(&frames, 3, &c).is_err());
}

#[test]
fn storyboard_is_deterministic() {
    let frames: Vec<Frame> = (0..12).map(|i| noisy(i, 40, 30, i)).collect();
    let a = encode_png(&render_storyboard(&frames, 9, &cfg()).unwrap()).unwrap();
    let b = encode_png(&render_storyboard(&frames, 9, &cfg()).unwrap()).unwrap();
    assert_eq!(a, b);
}
