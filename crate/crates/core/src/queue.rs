//! Queue layouts derived from track layouts, with exact small-case oracles.

use std::collections::BTreeSet;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::track::{verify_no_xcrossing, TrackAssignment};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueueError {
    #[error("track layout has {0} X-crossings")]
    XCrossings(usize),
    #[error("track layout does not cover vertex {0}")]
    Uncovered(usize),
    #[error("exact queue number is limited to n <= {limit}, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("vertex order is not a permutation of 0..{0}")]
    BadOrder(usize),
}

/// Vertex order plus one queue index per edge of the graph, in the order of
/// [`Graph::edges`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueLayout {
    pub order: Vec<usize>,
    pub queue_of: Vec<usize>,
    pub queue_count: usize,
}

impl QueueLayout {
    /// Position of each vertex in the order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.order.len()];
        for (i, &v) in self.order.iter().enumerate() {
            if v < pos.len() {
                pos[v] = i;
            }
        }
        pos
    }
}

/// Two same-queue edges, the first strictly nesting the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Nesting {
    pub outer: (usize, usize),
    pub inner: (usize, usize),
    pub queue: usize,
}

/// Orders vertices track by track and puts each edge in the queue of its
/// span, with the spans that occur renumbered densely from 0.
pub fn tracks_to_queues<K: Ord + Copy + Debug>(g: &Graph, t: &TrackAssignment<K>) -> Result<QueueLayout, QueueError> {
    if let Some(v) = (0..g.vertex_count()).find(|&v| !t.contains(v)) {
        return Err(QueueError::Uncovered(v));
    }
    let x = verify_no_xcrossing(g, t);
    if !x.is_empty() {
        return Err(QueueError::XCrossings(x.len()));
    }
    let order: Vec<usize> = t.tracks().iter().flatten().copied().collect();
    let spans: Vec<usize> = g.edges().iter().map(|&(u, v)| t.track(u).unwrap().abs_diff(t.track(v).unwrap())).collect();
    let distinct: Vec<usize> = spans.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let queue_of = spans.iter().map(|s| distinct.binary_search(s).unwrap()).collect();
    Ok(QueueLayout { order, queue_of, queue_count: distinct.len() })
}

fn check_order(n: usize, order: &[usize]) -> Result<Vec<usize>, QueueError> {
    let mut pos = vec![usize::MAX; n];
    if order.len() != n {
        return Err(QueueError::BadOrder(n));
    }
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(QueueError::BadOrder(n));
        }
        pos[v] = i;
    }
    Ok(pos)
}

/// Edges as position intervals `(left, right)`.
fn intervals(g: &Graph, pos: &[usize]) -> Vec<(usize, usize)> {
    g.edges().iter().map(|&(u, v)| (pos[u].min(pos[v]), pos[u].max(pos[v]))).collect()
}

fn nests(outer: (usize, usize), inner: (usize, usize)) -> bool {
    outer.0 < inner.0 && inner.1 < outer.1
}

/// Every strictly nested same-queue pair. Edges sharing an endpoint never
/// nest. Also fails on a malformed order or queue vector.
pub fn validate_queue_layout(g: &Graph, q: &QueueLayout) -> Result<Vec<Nesting>, QueueError> {
    let pos = check_order(g.vertex_count(), &q.order)?;
    if q.queue_of.len() != g.edge_count() || q.queue_of.iter().any(|&x| x >= q.queue_count.max(1)) {
        return Err(QueueError::BadOrder(g.vertex_count()));
    }
    let iv = intervals(g, &pos);
    let edges = g.edges();
    let mut out = Vec::new();
    for i in 0..iv.len() {
        for j in 0..iv.len() {
            if q.queue_of[i] == q.queue_of[j] && nests(iv[i], iv[j]) {
                out.push(Nesting { outer: edges[i], inner: edges[j], queue: q.queue_of[i] });
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Length of the longest chain of strictly nested edges under `order`,
/// which is the fewest queues any layout with this order needs.
pub fn min_queues_fixed_order(g: &Graph, order: &[usize]) -> Result<usize, QueueError> {
    let pos = check_order(g.vertex_count(), order)?;
    let mut iv = intervals(g, &pos);
    // Shorter intervals first, so every nested interval precedes its container.
    iv.sort_unstable_by_key(|&(a, b)| (b - a, a));
    let mut chain = vec![1usize; iv.len()];
    for i in 0..iv.len() {
        for j in 0..i {
            if nests(iv[i], iv[j]) {
                chain[i] = chain[i].max(chain[j] + 1);
            }
        }
    }
    Ok(chain.into_iter().max().unwrap_or(0))
}

pub const EXACT_QUEUE_LIMIT: usize = 10;

/// Minimum of [`min_queues_fixed_order`] over all vertex orders, by
/// branch and bound over order prefixes.
pub fn exact_queue_number(g: &Graph) -> Result<usize, QueueError> {
    let n = g.vertex_count();
    if n > EXACT_QUEUE_LIMIT {
        return Err(QueueError::TooLarge { n, limit: EXACT_QUEUE_LIMIT });
    }
    if g.edge_count() == 0 {
        return Ok(0);
    }
    let mut search = Search { g, pos: vec![usize::MAX; n], placed: Vec::new(), best: g.edge_count() };
    search.extend(0, 0);
    Ok(search.best)
}

struct Search<'g> {
    g: &'g Graph,
    pos: Vec<usize>,
    /// Completed edges as `(left position, chain length)`, in the order
    /// their right endpoints were placed.
    placed: Vec<(usize, usize)>,
    best: usize,
}

impl Search<'_> {
    /// `p` = number of placed vertices, `current` = longest chain so far.
    fn extend(&mut self, p: usize, current: usize) {
        let n = self.g.vertex_count();
        if p == n {
            self.best = self.best.min(current);
            return;
        }
        for v in 0..n {
            if self.pos[v] != usize::MAX {
                continue;
            }
            self.pos[v] = p;
            let mark = self.placed.len();
            let lefts: Vec<usize> = self.g.neighbors(v).iter().map(|&w| self.pos[w]).filter(|&x| x < p).collect();
            let mut local = current;
            for &left in &lefts {
                // Earlier edges all end before p, so nesting needs left' > left.
                let inner = self.placed[..mark].iter().filter(|&&(l, _)| l > left).map(|&(_, c)| c).max().unwrap_or(0);
                local = local.max(inner + 1);
                self.placed.push((left, inner + 1));
            }
            if local < self.best {
                self.extend(p + 1, local);
            }
            self.placed.truncate(mark);
            self.pos[v] = usize::MAX;
            if self.best <= 1 {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn layout(order: Vec<usize>, queue_of: Vec<usize>) -> QueueLayout {
        let queue_count = queue_of.iter().max().map_or(0, |&q| q + 1);
        QueueLayout { order, queue_of, queue_count }
    }

    #[test]
    fn nesting_rules() {
        let g = Graph::new(4, [(0, 3), (1, 2)]).unwrap();
        assert_eq!(validate_queue_layout(&g, &layout(vec![0, 1, 2, 3], vec![0, 0])).unwrap().len(), 1);
        assert!(validate_queue_layout(&g, &layout(vec![0, 1, 2, 3], vec![0, 1])).unwrap().is_empty());
        let g = Graph::new(3, [(0, 2), (0, 1)]).unwrap();
        assert!(validate_queue_layout(&g, &layout(vec![0, 1, 2], vec![0, 0])).unwrap().is_empty());
    }

    #[test]
    fn fixed_order_minimum() {
        let id: Vec<usize> = (0..4).collect();
        assert_eq!(min_queues_fixed_order(&Graph::new(4, [(0, 3), (1, 2)]).unwrap(), &id).unwrap(), 2);
        assert_eq!(min_queues_fixed_order(&Graph::new(4, [(0, 1), (2, 3)]).unwrap(), &id).unwrap(), 1);
        let k4 = Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(min_queues_fixed_order(&k4, &id).unwrap(), 2);
        assert!(min_queues_fixed_order(&k4, &[0, 1, 1, 2]).is_err());
    }

    #[test]
    fn exact_queue_numbers() {
        let c4 = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert_eq!(exact_queue_number(&c4).unwrap(), 1);
        assert_eq!(min_queues_fixed_order(&c4, &[0, 1, 3, 2]).unwrap(), 1);
        let k4 = Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(exact_queue_number(&k4).unwrap(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=9 {
            let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
            assert_eq!(exact_queue_number(&Graph::new(n, edges).unwrap()).unwrap(), (n > 1) as usize);
        }
        assert!(exact_queue_number(&Graph::empty(11)).is_err());
    }

    // Oracle: smallest k admitting a proper k-colouring of the nesting graph.
    fn brute_min_queues(g: &Graph, order: &[usize]) -> usize {
        let pos = check_order(g.vertex_count(), order).unwrap();
        let iv = intervals(g, &pos);
        let m = iv.len();
        if m == 0 {
            return 0;
        }
        for k in 1..=m {
            let mut colour = vec![0usize; m];
            loop {
                let ok = (0..m).all(|i| (0..m).all(|j| colour[i] != colour[j] || !nests(iv[i], iv[j])));
                if ok {
                    return k;
                }
                // Next colouring in base k.
                let mut i = 0;
                while i < m && colour[i] == k - 1 {
                    colour[i] = 0;
                    i += 1;
                }
                if i == m {
                    break;
                }
                colour[i] += 1;
            }
        }
        m
    }

    #[test]
    fn fixed_order_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let n = rng.gen_range(2..=7);
            let mut all: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            all.shuffle(&mut rng);
            all.truncate(rng.gen_range(0..=all.len().min(7)));
            let g = Graph::new(n, all).unwrap();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            assert_eq!(min_queues_fixed_order(&g, &order).unwrap(), brute_min_queues(&g, &order));
        }
    }

    #[test]
    fn exact_matches_all_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let n = rng.gen_range(2..=6);
            let edges: Vec<_> =
                (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(0.5)).collect();
            let g = Graph::new(n, edges).unwrap();
            let mut best = usize::MAX;
            let mut order: Vec<usize> = (0..n).collect();
            permute(&mut order, 0, &mut |o| best = best.min(min_queues_fixed_order(&g, o).unwrap()));
            assert_eq!(exact_queue_number(&g).unwrap(), best);
        }
    }

    fn permute(a: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == a.len() {
            f(a);
            return;
        }
        for i in k..a.len() {
            a.swap(k, i);
            permute(a, k + 1, f);
            a.swap(k, i);
        }
    }

    #[test]
    fn tracks_give_valid_queues() {
        let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let t = TrackAssignment::from_tracks(3, BTreeMap::from([(0, vec![0, 2]), (1, vec![1])])).unwrap();
        let q = tracks_to_queues(&path, &t).unwrap();
        assert_eq!(q.queue_count, 1);
        assert!(validate_queue_layout(&path, &q).unwrap().is_empty());

        let star = Graph::new(5, (1..5).map(|v| (0, v))).unwrap();
        let t = TrackAssignment::from_tracks(5, BTreeMap::from([(0, vec![0]), (1, vec![1, 2, 3, 4])])).unwrap();
        assert_eq!(tracks_to_queues(&star, &t).unwrap().queue_count, 1);

        let crossing = Graph::new(4, [(0, 3), (1, 2)]).unwrap();
        let t = TrackAssignment::from_tracks(4, BTreeMap::from([(0, vec![0, 1]), (1, vec![2, 3])])).unwrap();
        assert_eq!(tracks_to_queues(&crossing, &t), Err(QueueError::XCrossings(1)));
    }

    #[test]
    fn layered_layouts_give_valid_queues() {
        for seed in 0..40 {
            let (g, t) = crate::track::random_layered_layout(60, 8, 2, seed);
            let q = tracks_to_queues(&g, &t).unwrap();
            assert!(validate_queue_layout(&g, &q).unwrap().is_empty());
            assert!(q.queue_count <= t.track_count().saturating_sub(1));
            assert!(min_queues_fixed_order(&g, &q.order).unwrap() <= q.queue_count);
        }
    }
}
