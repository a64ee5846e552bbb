//! Keyframe selection by k-means over downsampled grayscale frames.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::trajectory::Frame;

const SIDE: usize = 16;
const MAX_ITERS: usize = 100;
const SHIFT_TOL: f64 = 1e-6;

/// 16×16 box-averaged luma in [0, 1], row-major.
pub fn embed(frame: &Frame) -> Result<Vec<f64>> {
    let px = frame.pixels.as_ref().ok_or(Error::MissingRaster(frame.index))?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    if w == 0 || h == 0 {
        return Err(Error::InvalidArgument(format!("frame {} is empty", frame.index)));
    }
    let span = |i: usize, len: usize| {
        let lo = i * len / SIDE;
        let hi = ((i + 1) * len / SIDE).max(lo + 1).min(len);
        lo.min(len - 1)..hi
    };
    let mut out = Vec::with_capacity(SIDE * SIDE);
    for gy in 0..SIDE {
        for gx in 0..SIDE {
            let (ys, xs) = (span(gy, h), span(gx, w));
            let mut sum = 0.0;
            let mut count = 0usize;
            for y in ys {
                for x in xs.clone() {
                    let i = (y * w + x) * 3;
                    sum += 0.299 * px[i] as f64 + 0.587 * px[i + 1] as f64 + 0.114 * px[i + 2] as f64;
                    count += 1;
                }
            }
            out.push(sum / count as f64 / 255.0);
        }
    }
    Ok(out)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    for (c, center) in centers.iter().enumerate().skip(1) {
        if dist2(p, center) < dist2(p, &centers[best]) {
            best = c;
        }
    }
    best
}

/// k-means++ seeding from `rng`; once every point coincides with a center,
/// further centers take the lowest-index point not yet used.
fn seed_centers(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut used = vec![false; points.len()];
    let first = rng.random_range(0..points.len());
    used[first] = true;
    let mut centers = vec![points[first].clone()];
    while centers.len() < k {
        let d: Vec<f64> = points
            .iter()
            .map(|p| centers.iter().map(|c| dist2(p, c)).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = d.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut pick = d.iter().rposition(|&v| v > 0.0).unwrap_or(0);
            for (i, &v) in d.iter().enumerate() {
                if v > 0.0 && r < v {
                    pick = i;
                    break;
                }
                r -= v;
            }
            pick
        } else {
            used.iter().position(|u| !u).unwrap_or(0)
        };
        used[pick] = true;
        centers.push(points[pick].clone());
    }
    centers
}

fn lloyd(points: &[Vec<f64>], mut centers: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    for _ in 0..MAX_ITERS {
        let mut sums = vec![vec![0.0; dim]; centers.len()];
        let mut counts = vec![0usize; centers.len()];
        for p in points {
            let c = nearest(p, &centers);
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut shift: f64 = 0.0;
        for c in 0..centers.len() {
            if counts[c] == 0 {
                continue;
            }
            let next: Vec<f64> = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            shift = shift.max(dist2(&next, &centers[c]).sqrt());
            centers[c] = next;
        }
        if shift < SHIFT_TOL {
            break;
        }
    }
    centers
}

/// Indices of `n` representative frames, ascending.
///
/// Frames are embedded as 16×16 grayscale and clustered with k-means
/// (k-means++ seeding from `seed`). Clustering runs over distinct embeddings,
/// so duplicate frames never shift the result. Each cluster contributes the
/// member closest to its centroid, earliest index on ties; when there are
/// fewer distinct frames than `n`, the lowest unused indices fill the rest.
pub fn select_keyframes(frames: &[Frame], n: usize, seed: u64) -> Result<Vec<usize>> {
    if n > frames.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot select {n} keyframes from {} frames",
            frames.len()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let emb = frames.iter().map(embed).collect::<Result<Vec<_>>>()?;
    let mut distinct: Vec<Vec<f64>> = Vec::new();
    for e in &emb {
        if !distinct.contains(e) {
            distinct.push(e.clone());
        }
    }
    let k = n.min(distinct.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = lloyd(&distinct, seed_centers(&distinct, k, &mut rng));

    let mut picked = vec![false; frames.len()];
    for (c, center) in centers.iter().enumerate() {
        let best = emb
            .iter()
            .enumerate()
            .filter(|(_, e)| nearest(e, &centers) == c)
            .map(|(i, e)| (i, dist2(e, center)))
            .fold(None, |best: Option<(usize, f64)>, cur| match best {
                Some(b) if b.1 <= cur.1 => Some(b),
                _ => Some(cur),
            });
        if let Some((i, _)) = best {
            picked[i] = true;
        }
    }
    let mut missing = n - picked.iter().filter(|p| **p).count();
    for p in picked.iter_mut() {
        if missing == 0 {
            break;
        }
        if !*p {
            *p = true;
            missing -= 1;
        }
    }
    Ok(picked.iter().enumerate().filter(|(_, p)| **p).map(|(i, _)| i).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solid(i: u64, c: u8) -> Frame {
        Frame::filled(i, 8, 8, [c, c, c])
    }

    #[test]
    fn two_exact_clusters_pick_earliest() {
        let frames = [solid(0, 10), solid(1, 10), solid(2, 200), solid(3, 200)];
        for seed in 0..10 {
            assert_eq!(select_keyframes(&frames, 2, seed).unwrap(), vec![0, 2]);
        }
    }

    #[test]
    fn identical_frames_fill_lowest() {
        let frames = [solid(0, 9), solid(1, 9), solid(2, 9)];
        assert_eq!(select_keyframes(&frames, 2, 0).unwrap(), vec![0, 1]);
        assert_eq!(select_keyframes(&frames, 3, 0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn too_many_requested() {
        assert!(select_keyframes(&[solid(0, 1)], 2, 0).is_err());
    }
}
