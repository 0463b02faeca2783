//! Iso-lines of a sampled field by marching squares.

use std::collections::BTreeMap;

use serde::Serialize;

/// Values `v[i * ys.len() + k]` at `(xs[i], ys[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledField {
    pub fn from_fn(xs: Vec<f64>, ys: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| f(x, y)).collect();
        Self { xs, ys, values }
    }

    fn at(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.ys.len() + k]
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub level: f64,
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

/// `count` levels splitting `(min, max)` into `count + 1` equal parts.
pub fn even_levels(min: f64, max: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|j| min + (max - min) * j as f64 / (count + 1) as f64).collect()
}

// Horizontal edge (i,k)-(i+1,k) or vertical edge (i,k)-(i,k+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

fn crossing(f: &SampledField, e: Edge, level: f64) -> (f64, f64) {
    let lerp = |a: f64, b: f64, va: f64, vb: f64| {
        if va == vb {
            0.5 * (a + b)
        } else {
            a + (b - a) * (level - va) / (vb - va)
        }
    };
    match e {
        Edge::H(i, k) => (lerp(f.xs[i], f.xs[i + 1], f.at(i, k), f.at(i + 1, k)), f.ys[k]),
        Edge::V(i, k) => (f.xs[i], lerp(f.ys[k], f.ys[k + 1], f.at(i, k), f.at(i, k + 1))),
    }
}

fn segments(f: &SampledField, level: f64) -> Vec<(Edge, Edge)> {
    let mut out = Vec::new();
    let (nx, ny) = (f.xs.len(), f.ys.len());
    for i in 0..nx.saturating_sub(1) {
        for k in 0..ny.saturating_sub(1) {
            // corners counter-clockwise from (i,k)
            let v = [f.at(i, k), f.at(i + 1, k), f.at(i + 1, k + 1), f.at(i, k + 1)];
            let code = v
                .iter()
                .enumerate()
                .fold(0u8, |c, (b, &val)| c | (((val > level) as u8) << b));
            let (bottom, right, top, left) = (Edge::H(i, k), Edge::V(i + 1, k), Edge::H(i, k + 1), Edge::V(i, k));
            let center_above = v.iter().sum::<f64>() * 0.25 > level;
            match code {
                0 | 15 => {}
                1 | 14 => out.push((left, bottom)),
                2 | 13 => out.push((bottom, right)),
                3 | 12 => out.push((left, right)),
                4 | 11 => out.push((right, top)),
                6 | 9 => out.push((bottom, top)),
                7 | 8 => out.push((left, top)),
                5 => {
                    if center_above {
                        out.push((left, top));
                        out.push((bottom, right));
                    } else {
                        out.push((left, bottom));
                        out.push((right, top));
                    }
                }
                10 => {
                    if center_above {
                        out.push((left, bottom));
                        out.push((right, top));
                    } else {
                        out.push((left, top));
                        out.push((bottom, right));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    out
}

/// Chains the marching-squares segments of one level into polylines.
pub fn contour(f: &SampledField, level: f64) -> Vec<Polyline> {
    let segs = segments(f, level);
    let mut adj: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (s, &(a, b)) in segs.iter().enumerate() {
        adj.entry(a).or_default().push(s);
        adj.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segs.len()];
    let mut lines = Vec::new();
    let other = |s: usize, e: Edge| if segs[s].0 == e { segs[s].1 } else { segs[s].0 };
    let walk = |start: Edge, used: &mut Vec<bool>| {
        let mut chain = vec![start];
        let mut cur = start;
        while let Some(&s) = adj[&cur].iter().find(|&&s| !used[s]) {
            used[s] = true;
            cur = other(s, cur);
            chain.push(cur);
        }
        chain
    };
    // open chains start at edges with a single segment, i.e. on the boundary
    let ends: Vec<Edge> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(&e, _)| e).collect();
    for e in ends {
        if adj[&e].iter().all(|&s| used[s]) {
            continue;
        }
        let chain = walk(e, &mut used);
        lines.push((chain, false));
    }
    for s in 0..segs.len() {
        if used[s] {
            continue;
        }
        used[s] = true;
        let (a, b) = segs[s];
        let mut chain = vec![a];
        chain.extend(walk(b, &mut used));
        let closed = chain.first() == chain.last();
        lines.push((chain, closed));
    }
    lines
        .into_iter()
        .map(|(chain, closed)| Polyline {
            level,
            points: chain.into_iter().map(|e| crossing(f, e, level)).collect(),
            closed,
        })
        .collect()
}

/// Polylines at `count` evenly spaced levels between the extremes of `f`.
pub fn level_sets(f: &SampledField, count: usize) -> Vec<Polyline> {
    let (lo, hi) = f.min_max();
    even_levels(lo, hi, count).into_iter().flat_map(|l| contour(f, l)).collect()
}
