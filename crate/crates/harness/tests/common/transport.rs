//! Brute-force minimum-cost transport between histograms with cost |i − j|,
//! by successive shortest paths (Bellman-Ford).

pub fn transport_cost(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len();
    // nodes: 0 = source, 1..=n supply, n+1..=2n demand, 2n+1 = sink
    let (src, sink, nodes) = (0, 2 * n + 1, 2 * n + 2);
    struct Edge {
        to: usize,
        cap: f64,
        cost: f64,
    }
    let mut edges: Vec<Edge> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let add = |edges: &mut Vec<Edge>, adj: &mut Vec<Vec<usize>>, a: usize, b: usize, cap: f64, cost: f64| {
        adj[a].push(edges.len());
        edges.push(Edge { to: b, cap, cost });
        adj[b].push(edges.len());
        edges.push(Edge { to: a, cap: 0.0, cost: -cost });
    };
    for i in 0..n {
        add(&mut edges, &mut adj, src, 1 + i, p[i], 0.0);
        add(&mut edges, &mut adj, n + 1 + i, sink, q[i], 0.0);
        for j in 0..n {
            add(&mut edges, &mut adj, 1 + i, n + 1 + j, f64::INFINITY, (i as f64 - j as f64).abs());
        }
    }
    let eps = 1e-15;
    let mut total = 0.0;
    loop {
        let mut dist = vec![f64::INFINITY; nodes];
        let mut prev: Vec<Option<usize>> = vec![None; nodes];
        dist[src] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if dist[u].is_infinite() {
                    continue;
                }
                for &e in &adj[u] {
                    let ed = &edges[e];
                    if ed.cap > eps && dist[u] + ed.cost < dist[ed.to] - 1e-12 {
                        dist[ed.to] = dist[u] + ed.cost;
                        prev[ed.to] = Some(e);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[sink].is_infinite() {
            break;
        }
        let mut push = f64::INFINITY;
        let mut v = sink;
        while let Some(e) = prev[v] {
            push = push.min(edges[e].cap);
            v = edges[e ^ 1].to;
        }
        let mut v = sink;
        while let Some(e) = prev[v] {
            edges[e].cap -= push;
            edges[e ^ 1].cap += push;
            v = edges[e ^ 1].to;
        }
        total += push * dist[sink];
    }
    total
}
