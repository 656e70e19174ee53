use crate::channel::ChannelCurve;
use crate::geometry::Point;

/// Euclidean minimum spanning tree by Prim's algorithm on the complete
/// graph. Returns `n - 1` edges `(parent, child)`; ties go to the lower index.
pub fn euclidean_mst(points: &[Point]) -> Vec<(usize, usize)> {
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![0usize; n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = points[0].distance(points[j]);
    }
    let mut edges = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let mut next = None;
        for j in 0..n {
            if !in_tree[j] && next.is_none_or(|k: usize| best[j] < best[k]) {
                next = Some(j);
            }
        }
        let k = next.expect("at least one node outside the tree");
        in_tree[k] = true;
        edges.push((parent[k], k));
        for j in 0..n {
            if !in_tree[j] {
                let d = points[k].distance(points[j]);
                if d < best[j] {
                    best[j] = d;
                    parent[j] = k;
                }
            }
        }
    }
    edges
}

/// Relays that split every spanning-tree edge longer than the cutoff
/// distance into equal segments shorter than it.
pub fn mst_feasible_init(task_positions: &[Point], curve: &ChannelCurve) -> Vec<Point> {
    let cutoff = curve.cutoff_distance_m;
    let mut relays = Vec::new();
    for (a, b) in euclidean_mst(task_positions) {
        let (pa, pb) = (task_positions[a], task_positions[b]);
        let len = pa.distance(pb);
        if len <= 0.0 {
            continue;
        }
        let mut count = ((len / cutoff).ceil() as usize).saturating_sub(1);
        // exact multiples of the cutoff would leave zero-rate segments
        if len / (count as f64 + 1.0) >= cutoff {
            count += 1;
        }
        for k in 1..=count {
            let t = k as f64 / (count as f64 + 1.0);
            relays.push(pa + (pb - pa) * t);
        }
    }
    relays
}
