//! Distribution metrics, symmetry verdicts and scaling fits.

use crate::error::{Error, Result};
use crate::lattice::{Distribution, Topology};

/// Symmetry tolerance for pure-state walks.
pub const UNITARY_TOL: f64 = 1e-10;
/// Symmetry tolerance for density-matrix walks.
pub const DENSITY_TOL: f64 = 1e-8;
/// Monte-Carlo agreement is judged in units of the standard error.
pub const MONTE_CARLO_SIGMAS: f64 = 4.0;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Outcome of comparing two distributions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryVerdict {
    pub max_abs_diff: f64,
    pub total_variation: f64,
    pub holds: bool,
    pub tolerance: f64,
}

impl std::fmt::Display for SymmetryVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "max_abs_diff={:e} tol={:e} holds={}",
            self.max_abs_diff, self.tolerance, self.holds
        )
    }
}

/// One row of a noise sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub sigma: f64,
    /// σ without the symmetry operation over σ with it.
    pub sigma_ratio: f64,
}

fn same_topology(a: &Distribution, b: &Distribution) -> Result<()> {
    if a.topology() != b.topology() {
        return Err(Error::TopologyMismatch { left: a.topology(), right: b.topology() });
    }
    Ok(())
}

/// Standard deviation of the position over signed line coordinates.
pub fn std_dev(d: &Distribution) -> Result<f64> {
    let topo = d.topology();
    if !topo.is_line() {
        return Err(Error::RequiresLine("std_dev"));
    }
    let (mut m1, mut m2) = (CompensatedSum::default(), CompensatedSum::default());
    for (x, p) in d.reported() {
        let x = x as f64;
        m1.add(x * p);
        m2.add(x * x * p);
    }
    let mean = m1.value();
    Ok((m2.value() - mean * mean).max(0.0).sqrt())
}

/// `½ Σ |d1(x) − d2(x)|`.
pub fn total_variation(d1: &Distribution, d2: &Distribution) -> Result<f64> {
    same_topology(d1, d2)?;
    let mut acc = CompensatedSum::default();
    for (a, b) in d1.probs().iter().zip(d2.probs()) {
        acc.add((a - b).abs());
    }
    Ok(0.5 * acc.value())
}

pub fn max_abs_diff(d1: &Distribution, d2: &Distribution) -> Result<f64> {
    same_topology(d1, d2)?;
    Ok(d1
        .probs()
        .iter()
        .zip(d2.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

pub fn symmetry_verdict(d1: &Distribution, d2: &Distribution, tol: f64) -> Result<SymmetryVerdict> {
    let max_abs_diff = max_abs_diff(d1, d2)?;
    Ok(SymmetryVerdict {
        max_abs_diff,
        total_variation: total_variation(d1, d2)?,
        holds: max_abs_diff <= tol,
        tolerance: tol,
    })
}

/// Least-squares slope of `log σ` against `log n`.
pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!(
            "scaling fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, s)) = points.iter().find(|&&(n, s)| n < 10.0 || !(s > 0.0)) {
        return Err(Error::Degenerate(format!("unusable scaling point (n={n}, sigma={s})")));
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all scaling points share one n".into()));
    }
    Ok(sxy / sxx)
}

/// `max_x |P(x) − 1/R|` on a cycle.
pub fn uniformity_deviation(d: &Distribution) -> Result<f64> {
    let Topology::Cycle { sites } = d.topology() else {
        return Err(Error::RequiresCycle("uniformity_deviation"));
    };
    let u = 1.0 / sites as f64;
    Ok(d.probs().iter().map(|p| (p - u).abs()).fold(0.0, f64::max))
}

/// Entrywise mean of distributions on a common topology.
pub fn time_average(ds: &[Distribution]) -> Result<Distribution> {
    let first = ds.first().ok_or(Error::Empty("distribution list"))?;
    let topo = first.topology();
    let mut acc = vec![CompensatedSum::default(); topo.site_count()];
    for d in ds {
        same_topology(first, d)?;
        for (a, &p) in acc.iter_mut().zip(d.probs()) {
            a.add(p);
        }
    }
    let k = ds.len() as f64;
    Distribution::new(topo, acc.iter().map(|a| a.value() / k).collect())
}
