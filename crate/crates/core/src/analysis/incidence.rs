//! How many quantization cells a separator through the origin must cross.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lattices::RegularLattice;
use crate::scheme::QuantizationScheme;
use crate::types::{self, Vector};

/// Refuse to enumerate grids with more cells than this.
pub const MAX_CELLS: u64 = 200_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct IncidenceReport {
    pub dim: usize,
    pub atoms: u64,
    pub normal: Vector,
    /// Closed cells meeting the hyperplane `<normal, x> = 0`.
    pub count: u64,
    /// `m^(1 - 1/d)`.
    pub predicted_order: f64,
}

/// Exact count of closed Voronoi cells of `lattice` meeting the hyperplane
/// through the origin with the given normal.
///
/// A box meets the plane iff the minimum and maximum of `<normal, corner>`
/// bracket zero; both are sums of per-axis extremes, so the grid is walked
/// one axis at a time carrying partial sums.
pub fn count_separator_incidence(lattice: &RegularLattice, normal: &[f64]) -> Result<IncidenceReport> {
    let d = lattice.dim();
    if normal.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: normal.len(),
        });
    }
    types::check_finite(normal)?;
    if types::norm(normal) == 0.0 {
        return Err(Error::InvalidInput("separator normal must be non-zero".into()));
    }
    if !lattice.domain().is_origin_centered() {
        return Err(Error::InvalidInput(
            "incidence counting needs a cube centered at the origin".into(),
        ));
    }
    let n = lattice.points_per_dim();
    let atoms = lattice
        .atom_count()
        .total()
        .filter(|&m| m <= MAX_CELLS)
        .ok_or_else(|| Error::InvalidInput(format!("{n}^{d} cells is too many to enumerate")))?;

    let cells: Vec<(f64, f64)> = (0..n).map(|i| lattice.cell_interval(i)).collect();
    // per axis, per cell: (min, max) of normal_k * x_k over the interval
    let extremes: Vec<Vec<(f64, f64)>> = normal
        .iter()
        .map(|&c| {
            cells
                .iter()
                .map(|&(a, b)| {
                    let (u, v) = (c * a, c * b);
                    (u.min(v), u.max(v))
                })
                .collect()
        })
        .collect();
    // the remaining axes can shift the sum by at most these amounts
    let mut tail_min = vec![0.0; d + 1];
    let mut tail_max = vec![0.0; d + 1];
    for k in (0..d).rev() {
        tail_min[k] = tail_min[k + 1] + extremes[k].iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
        tail_max[k] = tail_max[k + 1] + extremes[k].iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    }

    fn walk(k: usize, lo: f64, hi: f64, ext: &[Vec<(f64, f64)>], tmin: &[f64], tmax: &[f64]) -> u64 {
        if k == ext.len() {
            return u64::from(lo <= 0.0 && hi >= 0.0);
        }
        // prune whole subtrees that cannot reach zero
        if lo + tmin[k] > 0.0 || hi + tmax[k] < 0.0 {
            return 0;
        }
        ext[k]
            .iter()
            .map(|&(a, b)| walk(k + 1, lo + a, hi + b, ext, tmin, tmax))
            .sum()
    }
    let count = walk(0, 0.0, 0.0, &extremes, &tail_min, &tail_max);

    Ok(IncidenceReport {
        dim: d,
        atoms,
        normal: Vector::new(normal.to_vec())?,
        count,
        predicted_order: (atoms as f64).powf(1.0 - 1.0 / d as f64),
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One row of a scaling sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub points_per_dim: usize,
    pub atoms: u64,
    pub mean_count: f64,
    pub min_count: u64,
    pub max_count: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub dim: usize,
    pub rows: Vec<ScalingRow>,
    /// Slope of `ln(mean count)` against `ln m`; theory predicts `1 - 1/d`.
    pub slope: f64,
}

/// Incidence counts on `[-1, 1]^d` grids with each of `points` per dimension,
/// averaged over `normals` seeded random directions (the same directions for
/// every grid).
pub fn incidence_scaling(dim: usize, points: &[usize], normals: usize, seed: u64) -> Result<ScalingReport> {
    if normals == 0 || points.len() < 2 {
        return Err(Error::InvalidInput("need at least one normal and two grid sizes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<Vec<f64>> = (0..normals)
        .map(|_| loop {
            let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            if types::norm(&v) > 1e-9 {
                break v;
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(points.len());
    for &n in points {
        let lattice = RegularLattice::new(dim, n, -1.0, 1.0)?;
        let counts = dirs
            .iter()
            .map(|v| count_separator_incidence(&lattice, v).map(|r| r.count))
            .collect::<Result<Vec<_>>>()?;
        rows.push(ScalingRow {
            points_per_dim: n,
            atoms: (n as u64).pow(dim as u32),
            mean_count: counts.iter().sum::<u64>() as f64 / counts.len() as f64,
            min_count: *counts.iter().min().expect("normals > 0"),
            max_count: *counts.iter().max().expect("normals > 0"),
        });
    }
    let slope = loglog_slope(&rows.iter().map(|r| (r.atoms as f64, r.mean_count)).collect::<Vec<_>>())
        .ok_or_else(|| Error::InvalidInput("grid sizes must be distinct".into()))?;
    Ok(ScalingReport { dim, rows, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_axis_line_touches_all() {
        let l = RegularLattice::new(2, 2, -0.5, 0.5).unwrap();
        assert_eq!(count_separator_incidence(&l, &[0.0, 1.0]).unwrap().count, 4);
    }

    #[test]
    fn one_dimension_hits_one_or_two() {
        for n in 2..12 {
            let l = RegularLattice::new(1, n, -1.0, 1.0).unwrap();
            let c = count_separator_incidence(&l, &[-0.7]).unwrap().count;
            assert_eq!(c, if n % 2 == 0 { 2 } else { 1 }, "n = {n}");
        }
    }

    #[test]
    fn matches_naive_enumeration() {
        let l = RegularLattice::new(3, 7, -1.0, 1.0).unwrap();
        let normal = [0.3, -1.1, 0.45];
        let mut naive = 0;
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let b = [l.cell_interval(i), l.cell_interval(j), l.cell_interval(k)];
                    let mut lo = 0.0;
                    let mut hi = 0.0;
                    for (c, (a, z)) in normal.iter().zip(b) {
                        lo += (c * a).min(c * z);
                        hi += (c * a).max(c * z);
                    }
                    naive += u32::from(lo <= 0.0 && hi >= 0.0);
                }
            }
        }
        assert_eq!(count_separator_incidence(&l, &normal).unwrap().count, naive as u64);
    }

    #[test]
    fn rejects_bad_input() {
        let l = RegularLattice::new(2, 4, -1.0, 1.0).unwrap();
        assert!(count_separator_incidence(&l, &[0.0, 0.0]).is_err());
        assert!(count_separator_incidence(&l, &[1.0]).is_err());
        let off = RegularLattice::new(2, 4, 0.0, 1.0).unwrap();
        assert!(count_separator_incidence(&off, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [4.0, 16.0, 64.0].iter().map(|&m: &f64| (m, 3.0 * m.sqrt())).collect();
        assert!((loglog_slope(&pts).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(loglog_slope(&[(1.0, 1.0)]), None);
    }
}
