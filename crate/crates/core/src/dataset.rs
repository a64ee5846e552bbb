//! Positive/negative sample construction, negative mining and splits.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dsl::SimilarityIndex;
use crate::error::{Error, Result};
use crate::trajectory::Episode;

/// Question appended to every prompt.
pub const QUESTION: &str = "Is the agent following the motion description or not? Express the answer as 1 or 0.";

/// Similarity backend recorded alongside emitted datasets.
pub const SIMILARITY_BACKEND: &str = "tf-idf cosine over lowercase word tokens, smooth idf";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub episode_id: String,
    pub image_path: String,
    pub task_instruction: String,
    pub motion_description: String,
    pub label: u8,
    pub prompt: String,
    #[serde(default)]
    pub category: String,
}

pub fn prompt(task_instruction: &str, motion_description: &str) -> String {
    format!(
        "The task instruction is \"{task_instruction}\".\nThe motion description is \"{motion_description}\".\n{QUESTION}"
    )
}

fn sample(ep: &Episode, image_path: &Path, description: &str, label: u8) -> Result<Sample> {
    if !image_path.exists() {
        return Err(Error::MissingArtifact(image_path.to_path_buf()));
    }
    Ok(Sample {
        episode_id: ep.id.clone(),
        image_path: image_path.display().to_string(),
        task_instruction: ep.task_instruction.clone(),
        motion_description: description.to_string(),
        label,
        prompt: prompt(&ep.task_instruction, description),
        category: ep.category.clone(),
    })
}

/// The episode paired with its own description.
pub fn build_positive(ep: &Episode, image_path: &Path) -> Result<Sample> {
    sample(ep, image_path, &ep.motion_description, 1)
}

/// The episode paired with a description taken from elsewhere in the corpus.
pub fn build_negative(ep: &Episode, image_path: &Path, description: &str) -> Result<Sample> {
    sample(ep, image_path, description, 0)
}

/// The `n_neg` corpus descriptions least similar to `own`.
///
/// The pool is deduplicated, anything string-equal or with similarity 1.0 to
/// `own` is dropped, and ties in similarity are broken lexicographically.
pub fn mine_negatives<S: AsRef<str>>(own: &str, corpus: &[S], n_neg: usize) -> Result<Vec<String>> {
    let pool: BTreeSet<&str> = corpus.iter().map(|s| s.as_ref()).collect();
    let pool: Vec<&str> = pool.into_iter().collect();
    let index = SimilarityIndex::new(&pool);
    mine_with(&index, own, &pool, n_neg)
}

fn mine_with(index: &SimilarityIndex, own: &str, pool: &[&str], n_neg: usize) -> Result<Vec<String>> {
    let mut scored: Vec<(f64, &str)> = pool
        .iter()
        .filter(|d| **d != own)
        .map(|d| (index.similarity(own, d), *d))
        .filter(|(s, _)| *s < 1.0)
        .collect();
    if scored.len() < n_neg {
        return Err(Error::CorpusTooSmall {
            needed: n_neg,
            available: scored.len(),
        });
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    Ok(scored.into_iter().take(n_neg).map(|(_, d)| d.to_string()).collect())
}

/// One positive and `n_neg` negatives per episode, ordered by episode id.
/// `image_for` maps an episode to its rendered representation.
pub fn build_samples(
    episodes: &[Episode],
    image_for: impl Fn(&Episode) -> std::path::PathBuf,
    n_neg: usize,
) -> Result<Vec<Sample>> {
    if episodes.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let pool: BTreeSet<&str> = episodes.iter().map(|e| e.motion_description.as_str()).collect();
    let pool: Vec<&str> = pool.into_iter().collect();
    let index = SimilarityIndex::new(&pool);
    let mut order: Vec<&Episode> = episodes.iter().collect();
    order.sort_by(|a, b| a.id.cmp(&b.id));
    let mut out = Vec::with_capacity(episodes.len() * (1 + n_neg));
    for ep in order {
        let image = image_for(ep);
        out.push(build_positive(ep, &image)?);
        for d in mine_with(&index, &ep.motion_description, &pool, n_neg)? {
            out.push(build_negative(ep, &image, &d)?);
        }
    }
    Ok(out)
}

/// Renders every episode into `images_dir` and builds the samples.
pub fn build_dataset(
    episodes: &[Episode],
    images_dir: &Path,
    rep: crate::render::Representation,
    n_neg: usize,
    cfg: &crate::render::RenderConfig,
) -> Result<Vec<Sample>> {
    fs::create_dir_all(images_dir).map_err(|e| Error::io(images_dir, e))?;
    for ep in episodes {
        crate::render::render_to(ep, rep, images_dir, cfg)?;
    }
    build_samples(episodes, |ep| images_dir.join(crate::render::image_name(ep, rep)), n_neg)
}

/// Sidecar metadata written next to an emitted dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub episodes: usize,
    pub samples: usize,
    pub n_neg: usize,
    pub representation: String,
    pub similarity: String,
}

/// Writes one JSON object per line.
pub fn emit_dataset(samples: &[Sample], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    for s in samples {
        serde_json::to_writer(&mut buf, s)?;
        buf.push(b'\n');
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&buf).map_err(|e| Error::io(path, e))
}

pub fn read_dataset(path: &Path) -> Result<Vec<Sample>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

/// Seeded shuffle partition into train/val/test, stratified by category.
///
/// Within each category (visited in sorted order) the episodes are sorted by
/// id, shuffled, and cut at `round(r_train·n)` and `round((r_train+r_val)·n)`.
pub fn split_corpus(
    episodes: &[Episode],
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<(Vec<Episode>, Vec<Episode>, Vec<Episode>)> {
    if episodes.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let (a, b, c) = ratios;
    if [a, b, c].iter().any(|r| !(*r >= 0.0)) || ((a + b + c) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("split ratios {ratios:?} must be non-negative and sum to 1")));
    }
    let mut by_cat: BTreeMap<&str, Vec<&Episode>> = BTreeMap::new();
    for ep in episodes {
        by_cat.entry(ep.category.as_str()).or_default().push(ep);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for group in by_cat.values_mut() {
        group.sort_by(|x, y| x.id.cmp(&y.id));
        group.shuffle(&mut rng);
        let n = group.len() as f64;
        let cut1 = (a * n).round() as usize;
        let cut2 = (((a + b) * n).round() as usize).max(cut1).min(group.len());
        let cut1 = cut1.min(group.len());
        train.extend(group[..cut1].iter().map(|e| (*e).clone()));
        val.extend(group[cut1..cut2].iter().map(|e| (*e).clone()));
        test.extend(group[cut2..].iter().map(|e| (*e).clone()));
    }
    Ok((train, val, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_similar_first() {
        let corpus = ["move upward and to the right", "make a circular motion clockwise", "move upward"];
        assert_eq!(
            mine_negatives("move upward", &corpus, 1).unwrap(),
            vec!["make a circular motion clockwise"]
        );
    }

    #[test]
    fn too_small_names_shortfall() {
        let corpus = ["move upward", "move downward"];
        let err = mine_negatives("move upward", &corpus, 3).unwrap_err();
        assert!(matches!(err, Error::CorpusTooSmall { needed: 3, available: 1 }));
        assert!(err.to_string().contains("short by 2"));
    }

    #[test]
    fn prompt_ends_with_question() {
        let p = prompt("shake the bottle", "move up and down 4 times");
        assert!(p.ends_with("Is the agent following the motion description or not? Express the answer as 1 or 0."));
        assert!(p.contains("\"move up and down 4 times\""));
    }
}
