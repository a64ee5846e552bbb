use approx::assert_abs_diff_eq;
use motif_core::dataset::Sample;
use motif_core::eval::{category_report, evaluate, join_predictions, Confusion, Prediction};
use motif_core::Error;
use proptest::prelude::*;

mod common;
use common::{same_ratio, FIXTURES};

#[test]
fn adversarial_fixtures() {
    for f in &FIXTURES {
        let m = evaluate(f.preds, f.labels).unwrap();
        let c = m.confusion;
        assert_eq!((c.tp, c.fp, c.tn, c.fn_), f.counts, "{}", f.name);
        assert_eq!(c.total(), f.preds.len() as u64, "{}", f.name);
        assert!(same_ratio(m.precision, f.precision), "{}: precision {:?}", f.name, m.precision);
        assert!(same_ratio(m.recall, f.recall), "{}: recall {:?}", f.name, m.recall);
    }
}

#[test]
fn undefined_ratios_serialize_as_null() {
    let m = evaluate(&[0, 0], &[0, 0]).unwrap();
    let v = serde_json::to_value(&m).unwrap();
    assert!(v["precision"].is_null());
    assert!(v["recall"].is_null());
    assert_eq!(v["confusion"]["fn"], 0);
}

#[test]
fn bad_inputs() {
    assert!(matches!(evaluate(&[1, 0], &[1]), Err(Error::LengthMismatch { predictions: 2, labels: 1 })));
    assert!(evaluate(&[], &[]).is_err());
    assert!(evaluate(&[2], &[1]).is_err());
}

#[test]
fn category_averages() {
    let cats: Vec<String> = ["a", "a", "a", "a", "b", "b", "b"].iter().map(|s| s.to_string()).collect();
    // a: tp 1, fp 1, fn 1, tn 1 → p 1/2, r 1/2
    // b: tp 2, fp 0, fn 1      → p 1,   r 2/3
    let preds = [1, 1, 0, 0, 1, 1, 0];
    let labels = [1, 0, 1, 0, 1, 1, 1];
    let r = category_report(&cats, &preds, &labels).unwrap();
    assert_eq!(r.rows.len(), 2);
    assert_eq!(r.rows[0].category, "a");
    assert_abs_diff_eq!(r.average_precision.unwrap(), (0.5 + 1.0) / 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(r.average_recall.unwrap(), (0.5 + 2.0 / 3.0) / 2.0, epsilon = 1e-12);
    // pooled counts: tp 3, fp 1, fn 2
    assert_abs_diff_eq!(r.overall.precision.unwrap(), 3.0 / 4.0, epsilon = 1e-12);
    assert_abs_diff_eq!(r.overall.recall.unwrap(), 3.0 / 5.0, epsilon = 1e-12);

    let table = r.to_table();
    assert!(table.contains("average"));
    assert!(table.lines().count() >= 4);
}

#[test]
fn one_category_equals_evaluate() {
    let f = &FIXTURES[9];
    let cats = vec!["only".to_string(); f.preds.len()];
    let r = category_report(&cats, f.preds, f.labels).unwrap();
    let m = evaluate(f.preds, f.labels).unwrap();
    assert_eq!(r.rows[0].metrics, m);
    assert_eq!(r.overall, m);
    assert_eq!((r.average_precision, r.average_recall), (m.precision, m.recall));
}

#[test]
fn identical_categories_average_to_either() {
    let preds = [1, 0, 1, 1, 1, 0, 1, 1];
    let labels = [1, 1, 0, 1, 1, 1, 0, 1];
    let cats: Vec<String> = (0..8).map(|i| if i < 4 { "x" } else { "y" }.to_string()).collect();
    let r = category_report(&cats, &preds, &labels).unwrap();
    assert_eq!(r.rows[0].metrics, r.rows[1].metrics);
    assert_eq!(r.average_precision, r.rows[0].metrics.precision);
    assert_eq!(r.average_recall, r.rows[0].metrics.recall);
}

#[test]
fn undefined_rows_are_left_out_of_averages() {
    let cats: Vec<String> = ["a", "a", "b", "b"].iter().map(|s| s.to_string()).collect();
    // b never predicts 1: precision undefined there
    let r = category_report(&cats, &[1, 0, 0, 0], &[1, 1, 1, 0]).unwrap();
    assert_eq!(r.rows[1].metrics.precision, None);
    assert_eq!(r.average_precision, Some(1.0));
    assert_abs_diff_eq!(r.average_recall.unwrap(), (0.5 + 0.0) / 2.0);
    assert!(r.to_table().contains('-'));
}

fn sample(id: &str, desc: &str, label: u8) -> Sample {
    Sample {
        episode_id: id.into(),
        image_path: format!("{id}.png"),
        task_instruction: "t".into(),
        motion_description: desc.into(),
        label,
        prompt: String::new(),
        category: "c".into(),
    }
}

fn pred(id: &str, desc: &str, label: u8) -> Prediction {
    Prediction { episode_id: id.into(), description: desc.into(), label }
}

#[test]
fn predictions_join_on_episode_and_description() {
    let samples = [sample("e1", "move upward", 1), sample("e1", "move downward", 0), sample("e2", "move upward", 0)];
    let preds = [pred("e2", "move upward", 1), pred("e1", "move downward", 0), pred("e1", "move upward", 1)];
    assert_eq!(join_predictions(&samples, &preds).unwrap(), vec![1, 0, 1]);
    assert!(join_predictions(&samples, &preds[..2]).is_err());
    let dup = [preds[0].clone(), preds[0].clone(), preds[1].clone(), preds[2].clone()];
    assert!(join_predictions(&samples, &dup).is_err());
}

proptest! {
    #[test]
    fn metrics_ignore_sample_order(
        pairs in prop::collection::vec((0u8..=1, 0u8..=1), 1..60),
        seed in any::<u64>(),
    ) {
        let (p, l): (Vec<u8>, Vec<u8>) = pairs.iter().copied().unzip();
        let mut shuffled = pairs.clone();
        // deterministic Fisher-Yates from the seed
        let mut s = seed | 1;
        for i in (1..shuffled.len()).rev() {
            s ^= s << 13; s ^= s >> 7; s ^= s << 17;
            shuffled.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let (p2, l2): (Vec<u8>, Vec<u8>) = shuffled.into_iter().unzip();
        prop_assert_eq!(evaluate(&p, &l).unwrap(), evaluate(&p2, &l2).unwrap());

        let mut c = Confusion::default();
        for (a, b) in p.iter().zip(&l) {
            c.add(*a, *b);
        }
        prop_assert_eq!(c.total(), p.len() as u64);
        prop_assert_eq!(c.metrics(), evaluate(&p, &l).unwrap());
    }
}
