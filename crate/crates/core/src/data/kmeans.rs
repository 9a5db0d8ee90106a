//! Seeded Lloyd's k-means with k-means++ seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::squared_distance;

pub const MAX_ITERATIONS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeans {
    pub centers: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    /// Within-cluster sum of squares after each assignment step.
    pub objective: Vec<f64>,
    pub iterations: usize,
    /// Assignments stopped changing before the iteration cap.
    pub converged: bool,
}

fn nearest(centers: &[Vec<f64>], x: &[f64]) -> (usize, f64) {
    centers
        .iter()
        .enumerate()
        .map(|(j, c)| (j, squared_distance(c, x)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centers = vec![points[rng.random_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| squared_distance(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut idx = points.len() - 1;
            for (i, w) in d2.iter().enumerate() {
                if u < *w {
                    idx = i;
                    break;
                }
                u -= w;
            }
            idx
        } else {
            rng.random_range(0..points.len())
        };
        let c = points[pick].clone();
        for (p, d) in points.iter().zip(d2.iter_mut()) {
            *d = d.min(squared_distance(p, &c));
        }
        centers.push(c);
    }
    centers
}

/// Cluster `points` into `k` groups. `k` must not exceed the number of points.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeans> {
    if points.is_empty() || k == 0 || k > points.len() {
        return Err(Error::InvalidInput(format!(
            "k-means needs 1 <= k <= {} points, got k = {k}",
            points.len()
        )));
    }
    let dim = points[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = plus_plus(points, k, &mut rng);
    let mut assignments = vec![usize::MAX; points.len()];
    let mut objective = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut changed = false;
        let mut wcss = 0.0;
        for (i, p) in points.iter().enumerate() {
            let (j, d) = nearest(&centers, p);
            wcss += d;
            if assignments[i] != j {
                assignments[i] = j;
                changed = true;
            }
        }
        objective.push(wcss);
        if !changed {
            converged = true;
            break;
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &j) in points.iter().zip(&assignments) {
            counts[j] += 1;
            sums[j].iter_mut().zip(p).for_each(|(s, v)| *s += v);
        }
        for j in 0..k {
            if counts[j] > 0 {
                centers[j] = sums[j].iter().map(|s| s / counts[j] as f64).collect();
            }
        }
        // an empty cluster takes over the point farthest from its center
        for j in 0..k {
            if counts[j] == 0 {
                let far = points
                    .iter()
                    .zip(&assignments)
                    .map(|(p, &a)| squared_distance(p, &centers[a]))
                    .enumerate()
                    .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
                    .0;
                centers[j] = points[far].clone();
                counts[j] = 1;
                let old = assignments[far];
                counts[old] -= 1;
                assignments[far] = j;
            }
        }
    }
    Ok(KMeans {
        centers,
        assignments,
        objective,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k1_is_the_mean() {
        let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 3.0]];
        let r = kmeans(&pts, 1, 0).unwrap();
        assert_eq!(r.centers, vec![vec![1.0, 1.0]]);
        assert!(r.converged);
    }

    #[test]
    fn separates_obvious_clusters() {
        let mut pts = Vec::new();
        for i in 0..10 {
            let e = i as f64 * 0.01;
            pts.push(vec![e, 0.0]);
            pts.push(vec![10.0 + e, 0.0]);
            pts.push(vec![0.0, 10.0 + e]);
        }
        let r = kmeans(&pts, 3, 5).unwrap();
        let mut xs: Vec<_> = r.centers.iter().map(|c| (c[0].round() as i64, c[1].round() as i64)).collect();
        xs.sort();
        assert_eq!(xs, vec![(0, 0), (0, 10), (10, 0)]);
        assert!(r.objective.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn seeded() {
        let pts: Vec<Vec<f64>> = (0..50).map(|i| vec![(i * 37 % 11) as f64, (i * 13 % 7) as f64]).collect();
        assert_eq!(kmeans(&pts, 4, 3).unwrap(), kmeans(&pts, 4, 3).unwrap());
    }

    #[test]
    fn duplicates_and_bad_k() {
        let pts = vec![vec![1.0]; 5];
        let r = kmeans(&pts, 3, 0).unwrap();
        assert_eq!(r.centers.len(), 3);
        assert!(kmeans(&pts, 6, 0).is_err());
        assert!(kmeans(&pts, 0, 0).is_err());
    }
}
