//! Precision/recall over binary predictions, overall and per category.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::Sample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Confusion {
    pub fn add(&mut self, pred: u8, label: u8) {
        match (pred, label) {
            (1, 1) => self.tp += 1,
            (1, _) => self.fp += 1,
            (_, 1) => self.fn_ += 1,
            _ => self.tn += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// TP/(TP+FP); `None` when nothing was predicted positive.
    pub fn precision(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fp)
    }

    /// TP/(TP+FN); `None` when there are no positive labels.
    pub fn recall(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn metrics(self) -> Metrics {
        Metrics {
            precision: self.precision(),
            recall: self.recall(),
            confusion: self,
        }
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub confusion: Confusion,
}

fn check_binary(values: &[u8], what: &str) -> Result<()> {
    match values.iter().position(|v| *v > 1) {
        Some(i) => Err(Error::InvalidArgument(format!("{what}[{i}] = {} is not 0 or 1", values[i]))),
        None => Ok(()),
    }
}

fn check(predictions: &[u8], labels: &[u8]) -> Result<()> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::InvalidArgument("no predictions to evaluate".into()));
    }
    check_binary(predictions, "predictions")?;
    check_binary(labels, "labels")
}

pub fn evaluate(predictions: &[u8], labels: &[u8]) -> Result<Metrics> {
    check(predictions, labels)?;
    let mut c = Confusion::default();
    for (p, l) in predictions.iter().zip(labels) {
        c.add(*p, *l);
    }
    Ok(c.metrics())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub category: String,
    #[serde(flatten)]
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryReport {
    pub rows: Vec<CategoryRow>,
    /// Unweighted mean over the categories where the ratio is defined.
    pub average_precision: Option<f64>,
    pub average_recall: Option<f64>,
    pub overall: Metrics,
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Per-category metrics, sorted by category name, plus their unweighted average.
pub fn category_report(categories: &[String], predictions: &[u8], labels: &[u8]) -> Result<CategoryReport> {
    check(predictions, labels)?;
    if categories.len() != labels.len() {
        return Err(Error::LengthMismatch {
            predictions: predictions.len(),
            labels: categories.len(),
        });
    }
    let mut by_cat: BTreeMap<&str, Confusion> = BTreeMap::new();
    let mut overall = Confusion::default();
    for ((cat, p), l) in categories.iter().zip(predictions).zip(labels) {
        by_cat.entry(cat.as_str()).or_default().add(*p, *l);
        overall.add(*p, *l);
    }
    let rows: Vec<CategoryRow> = by_cat
        .into_iter()
        .map(|(category, c)| CategoryRow {
            category: category.to_string(),
            metrics: c.metrics(),
        })
        .collect();
    Ok(CategoryReport {
        average_precision: mean_defined(rows.iter().map(|r| r.metrics.precision)),
        average_recall: mean_defined(rows.iter().map(|r| r.metrics.recall)),
        rows,
        overall: overall.metrics(),
    })
}

impl CategoryReport {
    /// Fixed-width text table; undefined ratios print as `-`.
    pub fn to_table(&self) -> String {
        fn cell(v: Option<f64>) -> String {
            v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"))
        }
        let width = self
            .rows
            .iter()
            .map(|r| r.category.len())
            .chain(["category".len(), "overall".len()])
            .max()
            .unwrap_or(8);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>9}  {:>6}  {:>5}  {:>5}  {:>5}  {:>5}", "category", "precision", "recall", "tp", "fp", "tn", "fn");
        let mut line = |name: &str, m: &Metrics| {
            let c = m.confusion;
            let _ = writeln!(
                out,
                "{:<width$}  {:>9}  {:>6}  {:>5}  {:>5}  {:>5}  {:>5}",
                name,
                cell(m.precision),
                cell(m.recall),
                c.tp,
                c.fp,
                c.tn,
                c.fn_
            );
        };
        for r in &self.rows {
            line(&r.category, &r.metrics);
        }
        line("overall", &self.overall);
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>6}",
            "average",
            cell(self.average_precision),
            cell(self.average_recall)
        );
        out
    }
}

/// One externally produced prediction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub episode_id: String,
    pub description: String,
    pub label: u8,
}

/// Lines up predictions with samples on (episode id, description).
/// Every sample must have exactly one prediction.
pub fn join_predictions(samples: &[Sample], predictions: &[Prediction]) -> Result<Vec<u8>> {
    let mut map: HashMap<(&str, &str), u8> = HashMap::with_capacity(predictions.len());
    for p in predictions {
        if map.insert((&p.episode_id, &p.description), p.label).is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate prediction for episode {:?}, description {:?}",
                p.episode_id, p.description
            )));
        }
    }
    samples
        .iter()
        .map(|s| {
            map.get(&(s.episode_id.as_str(), s.motion_description.as_str()))
                .copied()
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "no prediction for episode {:?}, description {:?}",
                        s.episode_id, s.motion_description
                    ))
                })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_counted() {
        let m = evaluate(&[1, 1, 0, 1], &[1, 0, 0, 0]).unwrap();
        assert_eq!(m.precision, Some(1.0 / 3.0));
        assert_eq!(m.recall, Some(1.0));
    }

    #[test]
    fn no_positive_predictions_is_null_precision() {
        let m = evaluate(&[0, 0, 0], &[1, 0, 0]).unwrap();
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, Some(0.0));
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"precision\":null"));
        assert!(json.contains("\"fn\":1"));
    }

    #[test]
    fn rejects_mismatch_and_non_binary() {
        assert!(matches!(evaluate(&[1], &[1, 0]), Err(Error::LengthMismatch { .. })));
        assert!(evaluate(&[], &[]).is_err());
        assert!(evaluate(&[2], &[1]).is_err());
    }
}
