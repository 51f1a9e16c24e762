//! Deterministic probe, target and candidate grids.

use serde::{Deserialize, Serialize};

use crate::space::PairPoint;

/// Largest probe grid the default schedules are sized for.
const PROBE_CAP: usize = 4096;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn levels(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![0.5 * (lo + hi)];
    }
    let m = (count - 1) as f64;
    (0..count).map(|k| (lo * (m - k as f64) + hi * k as f64) / m).collect()
}

fn tensor(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for lv in axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                lv.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    let scale = inv;
    while k > 0 {
        out += (k % base) as f64 * inv;
        k /= base;
        inv *= scale;
    }
    out
}

/// Odd per-axis count with `count^dims <= budget`, at most `natural`.
fn per_axis(dims: usize, budget: usize, natural: usize) -> usize {
    let mut n = ((budget as f64).powf(1.0 / dims as f64) + 1e-9).floor() as usize;
    n = n.min(natural);
    if n < natural && n.is_multiple_of(2) {
        n -= 1;
    }
    n.max(1)
}

/// Tensor grid of `points` nodes per coordinate on `[-half, half]` in
/// `E x E*`, thinned to keep at most 4096 probes.
pub fn standard_probe_grid(dim: usize, half: f64, points: usize) -> Vec<PairPoint> {
    let k = per_axis(2 * dim, PROBE_CAP, points);
    let lv = levels(-half, half, k);
    tensor(&vec![lv; 2 * dim])
        .into_iter()
        .map(|z| PairPoint::new(z[..dim].to_vec(), z[dim..].to_vec()))
        .collect()
}

/// Tensor grid of `per_axis` nodes per coordinate on `[-half, half]^dim`.
pub fn target_grid(dim: usize, half: f64, per_axis: usize) -> Vec<Vec<f64>> {
    tensor(&vec![levels(-half, half, per_axis); dim])
}

/// Axis-aligned box in `E x E*`, coordinates ordered `x` then `x*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SearchBox {
    /// `[-half, half]^(2 dim)`
    pub fn cube(dim: usize, half: f64) -> SearchBox {
        SearchBox { lo: vec![-half; 2 * dim], hi: vec![half; 2 * dim] }
    }

    /// Deterministic candidates: a tensor grid with an odd number of nodes per
    /// axis when at least three fit in `budget`, otherwise the box center
    /// followed by a Halton sequence.
    pub fn candidates(&self, budget: usize) -> Vec<PairPoint> {
        let dims = self.lo.len();
        let n = dims / 2;
        let split = |z: Vec<f64>| PairPoint::new(z[..n].to_vec(), z[n..].to_vec());
        let k = per_axis(dims, budget, usize::MAX);
        if k >= 3 {
            let axes: Vec<Vec<f64>> = self.lo.iter().zip(&self.hi).map(|(&l, &h)| levels(l, h, k)).collect();
            return tensor(&axes).into_iter().map(split).collect();
        }
        let mut out = vec![split(self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect())];
        for i in 1..budget as u64 {
            let z = (0..dims)
                .map(|d| {
                    let u = radical_inverse(i, PRIMES[d % PRIMES.len()] as u64);
                    self.lo[d] + u * (self.hi[d] - self.lo[d])
                })
                .collect();
            out.push(split(z));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_grid_sizes() {
        assert_eq!(standard_probe_grid(1, 3.0, 13).len(), 169);
        assert_eq!(standard_probe_grid(2, 3.0, 13).len(), 7usize.pow(4));
    }

    #[test]
    fn axes_candidate_grid_hits_the_witness() {
        let c = SearchBox::cube(2, 4.0).candidates(6561);
        assert_eq!(c.len(), 6561);
        assert!(c.contains(&PairPoint::new(vec![1.0, 1.0], vec![2.0, 2.0])));
    }

    #[test]
    fn high_dimensional_candidates_use_halton() {
        let c = SearchBox::cube(6, 4.0).candidates(500);
        assert_eq!(c.len(), 500);
        assert!(c.iter().all(|p| p.x.iter().chain(&p.xstar).all(|v| v.abs() <= 4.0)));
        assert_eq!(c[0], PairPoint::new(vec![0.0; 6], vec![0.0; 6]));
    }
}
