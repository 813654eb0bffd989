//! Independent reference solutions shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Shortest weighted path on the 8-connected n x n lattice of the unit box (no wrap-around).
/// Edge cost is edge length times the mean of the two node weights.
pub fn dijkstra_8(n: usize, weight: impl Fn(f64, f64) -> f64, from: [f64; 2], to: [f64; 2]) -> f64 {
    let h = 1.0 / n as f64;
    let w: Vec<f64> = (0..n * n).map(|k| weight((k % n) as f64 * h, (k / n) as f64 * h)).collect();
    let node = |p: [f64; 2]| {
        let i = ((p[0] / h).round() as usize).min(n - 1);
        let j = ((p[1] / h).round() as usize).min(n - 1);
        i + n * j
    };
    let (src, dst) = (node(from), node(to));
    let mut dist = vec![f64::INFINITY; n * n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Reverse((Ordered(0.0), src)));
    while let Some(Reverse((Ordered(d), k))) = heap.pop() {
        if k == dst {
            return d;
        }
        if d > dist[k] {
            continue;
        }
        let (i, j) = ((k % n) as i64, (k / n) as i64);
        for di in -1i64..=1 {
            for dj in -1i64..=1 {
                if di == 0 && dj == 0 {
                    continue;
                }
                let (ni, nj) = (i + di, j + dj);
                if ni < 0 || nj < 0 || ni >= n as i64 || nj >= n as i64 {
                    continue;
                }
                let m = ni as usize + n * nj as usize;
                let len = h * ((di * di + dj * dj) as f64).sqrt();
                let nd = d + len * 0.5 * (w[k] + w[m]);
                if nd < dist[m] {
                    dist[m] = nd;
                    heap.push(Reverse((Ordered(nd), m)));
                }
            }
        }
    }
    dist[dst]
}

#[derive(PartialEq, PartialOrd)]
struct Ordered(f64);

impl Eq for Ordered {}

impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Area of the stable catenoid spanning two coaxial circles of radius `r` at distance `sep`,
/// or None past the existence limit.
pub fn catenoid_area(r: f64, sep: f64) -> Option<f64> {
    let h = sep / 2.0;
    let f = |a: f64| a * (h / a).cosh() - r;
    // a cosh(h/a) is minimal where tanh(h/a) = a/h, i.e. h/a = 1.19967864.
    let a_min = h / 1.199_678_640_257_734;
    if f(a_min) > 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (a_min, r);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    Some(std::f64::consts::PI * a * (2.0 * h + a * (2.0 * h / a).sinh()))
}

/// Length of the Fermat star joining three points, by Weiszfeld iteration.
pub fn fermat_length(p: [[f64; 2]; 3]) -> f64 {
    let total = |x: [f64; 2]| p.iter().map(|q| ((x[0] - q[0]).powi(2) + (x[1] - q[1]).powi(2)).sqrt()).sum::<f64>();
    let mut x = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
    for _ in 0..2000 {
        let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
        for q in p {
            let d = ((x[0] - q[0]).powi(2) + (x[1] - q[1]).powi(2)).sqrt().max(1e-15);
            sx += q[0] / d;
            sy += q[1] / d;
            sw += 1.0 / d;
        }
        x = [sx / sw, sy / sw];
    }
    // A vertex with an angle of 120 degrees or more is its own Fermat point.
    p.iter().map(|&v| total(v)).fold(total(x), f64::min)
}

#[test]
fn oracles_are_consistent() {
    let d = dijkstra_8(64, |_, _| 1.0, [0.25, 0.25], [0.75, 0.75]);
    assert!((d - 0.5 * 2f64.sqrt()).abs() < 1e-12);
    let across = dijkstra_8(64, |_, _| 1.0, [0.0625, 0.5], [0.9375, 0.5]);
    assert!((across - 0.875).abs() < 1e-12);
    assert!((catenoid_area(0.25, 0.25).unwrap() - 0.37449).abs() < 1e-4);
    assert!(catenoid_area(0.2, 0.5).is_none());
    let r = 0.3;
    let tri = [0, 1, 2].map(|k| {
        let a = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / 3.0;
        [r * a.cos(), r * a.sin()]
    });
    assert!((fermat_length(tri) - 3.0 * r).abs() < 1e-9);
    assert!((fermat_length([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.01]]) - 2.0).abs() < 1e-3);
}
