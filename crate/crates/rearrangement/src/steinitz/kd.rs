//! Static kd-tree with deletions, used to order each steering stage.

const LEAF: usize = 8;
const NONE: usize = usize::MAX;

struct Node {
    lo: usize,
    hi: usize,
    left: usize,
    right: usize,
    live: usize,
}

/// Points are stored flat (`n × d`); ids are positions in that array.
pub(crate) struct KdTree {
    d: usize,
    pts: Vec<f64>,
    order: Vec<usize>,
    slot: Vec<usize>,
    alive: Vec<bool>,
    nodes: Vec<Node>,
    // per node: d minima then d maxima
    boxes: Vec<f64>,
}

impl KdTree {
    pub(crate) fn new(d: usize, pts: Vec<f64>) -> Self {
        let n = if d == 0 { 0 } else { pts.len() / d };
        let mut t = KdTree {
            d,
            pts,
            order: (0..n).collect(),
            slot: vec![0; n],
            alive: vec![true; n],
            nodes: Vec::new(),
            boxes: Vec::new(),
        };
        if n > 0 {
            t.build(0, n);
        }
        for (s, &i) in t.order.iter().enumerate() {
            t.slot[i] = s;
        }
        t
    }

    fn build(&mut self, lo: usize, hi: usize) -> usize {
        let d = self.d;
        let id = self.nodes.len();
        self.nodes.push(Node { lo, hi, left: NONE, right: NONE, live: hi - lo });
        let base = self.boxes.len();
        self.boxes.extend(std::iter::repeat_n(f64::INFINITY, d));
        self.boxes.extend(std::iter::repeat_n(f64::NEG_INFINITY, d));
        for &i in &self.order[lo..hi] {
            for j in 0..d {
                let x = self.pts[i * d + j];
                self.boxes[base + j] = self.boxes[base + j].min(x);
                self.boxes[base + d + j] = self.boxes[base + d + j].max(x);
            }
        }
        if hi - lo > LEAF {
            let axis = (0..d)
                .max_by(|&a, &b| {
                    let wa = self.boxes[base + d + a] - self.boxes[base + a];
                    let wb = self.boxes[base + d + b] - self.boxes[base + b];
                    wa.total_cmp(&wb)
                })
                .unwrap_or(0);
            let mid = (lo + hi) / 2;
            let pts = &self.pts;
            self.order[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| pts[a * d + axis].total_cmp(&pts[b * d + axis]));
            let l = self.build(lo, mid);
            let r = self.build(mid, hi);
            self.nodes[id].left = l;
            self.nodes[id].right = r;
        }
        id
    }

    fn box_dist(&self, node: usize, q: &[f64]) -> f64 {
        let d = self.d;
        let b = &self.boxes[node * 2 * d..(node + 1) * 2 * d];
        let mut s = 0.0;
        for j in 0..d {
            let e = if q[j] < b[j] {
                b[j] - q[j]
            } else if q[j] > b[d + j] {
                q[j] - b[d + j]
            } else {
                0.0
            };
            s += e * e;
        }
        s
    }

    /// Live point closest to `q`; ties go to the lowest id.
    pub(crate) fn nearest(&self, q: &[f64]) -> Option<usize> {
        if self.nodes.first().is_none_or(|n| n.live == 0) {
            return None;
        }
        let mut best = (f64::INFINITY, NONE);
        self.search(0, q, &mut best);
        Some(best.1)
    }

    fn search(&self, node: usize, q: &[f64], best: &mut (f64, usize)) {
        let nd = &self.nodes[node];
        if nd.live == 0 || self.box_dist(node, q) > best.0 {
            return;
        }
        if nd.left == NONE {
            let d = self.d;
            for &i in &self.order[nd.lo..nd.hi] {
                if !self.alive[i] {
                    continue;
                }
                let p = &self.pts[i * d..(i + 1) * d];
                let dd: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                if dd < best.0 || (dd == best.0 && i < best.1) {
                    *best = (dd, i);
                }
            }
            return;
        }
        let (a, b) = (nd.left, nd.right);
        if self.box_dist(a, q) <= self.box_dist(b, q) {
            self.search(a, q, best);
            self.search(b, q, best);
        } else {
            self.search(b, q, best);
            self.search(a, q, best);
        }
    }

    pub(crate) fn remove(&mut self, i: usize) {
        if !self.alive[i] {
            return;
        }
        self.alive[i] = false;
        let s = self.slot[i];
        let mut node = 0;
        loop {
            self.nodes[node].live -= 1;
            let nd = &self.nodes[node];
            if nd.left == NONE {
                break;
            }
            node = if s < self.nodes[nd.left].hi { nd.left } else { nd.right };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = 3;
        let n = 500;
        let pts: Vec<f64> = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut tree = KdTree::new(d, pts.clone());
        let mut alive = vec![true; n];
        for _ in 0..n {
            let q: Vec<f64> = (0..d).map(|_| rng.random_range(-1.5..1.5)).collect();
            let want = (0..n)
                .filter(|&i| alive[i])
                .min_by(|&a, &b| {
                    let da: f64 = (0..d).map(|j| (pts[a * d + j] - q[j]).powi(2)).sum();
                    let db: f64 = (0..d).map(|j| (pts[b * d + j] - q[j]).powi(2)).sum();
                    da.total_cmp(&db).then(a.cmp(&b))
                })
                .unwrap();
            let got = tree.nearest(&q).unwrap();
            assert_eq!(got, want);
            tree.remove(got);
            alive[got] = false;
        }
        assert_eq!(tree.nearest(&[0.0, 0.0, 0.0]), None);
    }

    #[test]
    fn ties_take_lowest_id() {
        let tree = KdTree::new(1, vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(tree.nearest(&[0.0]), Some(0));
        assert_eq!(tree.nearest(&[-0.9]), Some(1));
    }
}
