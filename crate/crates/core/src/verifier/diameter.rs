//! Graph estimate of the Riemannian diameter of a chart.
//!
//! Nodes form a tensor grid on the chart domain (periodic axes wrap).
//! Every node is joined to all `3^d - 1` neighbours of its grid cell block,
//! with edge length `sqrt(dx^T g(mid) dx)` evaluated at the edge midpoint.
//! Shortest paths are exact Dijkstra distances on this graph, so the
//! result overestimates the true diameter by the grid's directional
//! discretisation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{GlueError, Result};
use crate::metric::Chart;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterEstimate {
    pub diameter: f64,
    pub nodes_per_axis: usize,
    pub nodes: usize,
    pub edges: usize,
    /// Single-source shortest-path runs needed to certify the maximum.
    pub sweeps: usize,
    pub endpoints: (Vec<f64>, Vec<f64>),
}

struct Graph {
    coords: Vec<Vec<f64>>,
    /// Compressed adjacency: neighbours of node `i` are
    /// `targets[offsets[i]..offsets[i + 1]]`.
    offsets: Vec<usize>,
    targets: Vec<(u32, f64)>,
}

#[derive(PartialEq)]
struct Entry(f64, u32);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Graph {
    fn build(ch: &(impl Chart + ?Sized), per_axis: usize) -> Graph {
        let d = ch.dim();
        let dom = ch.domain();
        let axes: Vec<Vec<f64>> = (0..d).map(|i| dom.axis_nodes(i, per_axis)).collect();
        let counts: Vec<usize> = axes.iter().map(Vec::len).collect();
        let total: usize = counts.iter().product();
        let unflatten = |mut idx: usize| -> Vec<usize> {
            let mut out = vec![0; d];
            for i in (0..d).rev() {
                out[i] = idx % counts[i];
                idx /= counts[i];
            }
            out
        };
        let flatten = |ix: &[usize]| ix.iter().zip(&counts).fold(0, |acc, (&i, &c)| acc * c + i);
        let coords: Vec<Vec<f64>> = (0..total)
            .map(|n| unflatten(n).iter().enumerate().map(|(i, &j)| axes[i][j]).collect())
            .collect();
        // Offsets in {-1, 0, 1}^d except zero.
        let moves: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
            .map(|mut c| {
                (0..d)
                    .map(|_| {
                        let v = (c % 3) as i64 - 1;
                        c /= 3;
                        v
                    })
                    .collect::<Vec<i64>>()
            })
            .filter(|m| m.iter().any(|&v| v != 0))
            .collect();
        let spacing: Vec<f64> = (0..d)
            .map(|i| match counts[i] {
                0 | 1 => 0.0,
                c if dom.periodic[i] => (dom.upper[i] - dom.lower[i]) / c as f64,
                c => (dom.upper[i] - dom.lower[i]) / (c - 1) as f64,
            })
            .collect();
        let mut offsets = Vec::with_capacity(total + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for node in 0..total {
            let ix = unflatten(node);
            for mv in &moves {
                let mut next = ix.clone();
                let mut ok = true;
                for i in 0..d {
                    let j = ix[i] as i64 + mv[i];
                    let c = counts[i] as i64;
                    if dom.periodic[i] && c > 2 {
                        next[i] = j.rem_euclid(c) as usize;
                    } else if j < 0 || j >= c {
                        ok = false;
                        break;
                    } else {
                        next[i] = j as usize;
                    }
                }
                if !ok {
                    continue;
                }
                let dx = DVector::from_fn(d, |i, _| mv[i] as f64 * spacing[i]);
                let mid: Vec<f64> = (0..d).map(|i| coords[node][i] + 0.5 * dx[i]).collect();
                let g = ch.metric_at(&mid);
                let len = dx.dot(&(&g * &dx)).max(0.0).sqrt();
                targets.push((flatten(&next) as u32, len));
            }
            offsets.push(targets.len());
        }
        Graph { coords, offsets, targets }
    }

    fn len(&self) -> usize {
        self.coords.len()
    }

    fn dijkstra(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Entry(0.0, source as u32));
        while let Some(Entry(d, u)) = heap.pop() {
            let u = u as usize;
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.targets[self.offsets[u]..self.offsets[u + 1]] {
                let nd = d + w;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    heap.push(Entry(nd, v));
                }
            }
        }
        dist
    }
}

fn farthest(dist: &[f64]) -> (usize, f64) {
    dist.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
}

/// Largest shortest-path distance between grid nodes.
///
/// The maximum eccentricity is found exactly with the bound
/// `ecc(u) <= d(w, u) + ecc(w)`: sources are processed in order of their
/// upper bound until no unprocessed node can beat the current maximum.
pub fn diameter_estimate(ch: &(impl Chart + ?Sized), nodes_per_axis: usize) -> Result<DiameterEstimate> {
    if nodes_per_axis < 2 {
        return Err(GlueError::InvalidInput("diameter grid needs at least 2 nodes per axis".into()));
    }
    let graph = Graph::build(ch, nodes_per_axis);
    let n = graph.len();
    let mut upper = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let (mut best, mut ends) = (f64::NEG_INFINITY, (0, 0));
    let mut sweeps = 0;
    // Double sweep seeds a good lower bound.
    let mut source = farthest(&graph.dijkstra(0)).0;
    sweeps += 1;
    loop {
        let dist = graph.dijkstra(source);
        sweeps += 1;
        done[source] = true;
        let (far, ecc) = farthest(&dist);
        if !ecc.is_finite() {
            return Err(GlueError::DisconnectedGraph);
        }
        if ecc > best {
            best = ecc;
            ends = (source, far);
        }
        for (u, d) in dist.iter().enumerate() {
            upper[u] = upper[u].min(d + ecc);
        }
        let next = (0..n)
            .filter(|&u| !done[u])
            .max_by(|&a, &b| upper[a].total_cmp(&upper[b]).then(b.cmp(&a)));
        match next {
            Some(u) if upper[u] > best * (1.0 + 1e-12) => {
                // Prefer the far end of the last sweep when it is still open.
                source = if !done[far] && upper[far] >= upper[u] { far } else { u };
            }
            _ => break,
        }
    }
    Ok(DiameterEstimate {
        diameter: best,
        nodes_per_axis,
        nodes: n,
        edges: graph.targets.len() / 2,
        sweeps,
        endpoints: (graph.coords[ends.0].clone(), graph.coords[ends.1].clone()),
    })
}
