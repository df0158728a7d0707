//! Brute-force optimal-transport oracle: min-cost flow by successive
//! shortest paths on the bipartite transport network. Exact for the tiny
//! instances used in the acceptance suite and entirely independent of the
//! merged-CDF integral under test.

/// Wasserstein-1 between two uniform empirical distributions, solved as a
/// transportation problem with integer unit masses (each `a`-atom carries
/// `nb` units, each `b`-atom absorbs `na`).
pub fn min_cost_transport(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len(), b.len());
    assert!(na > 0 && nb > 0);
    let n = na + nb + 2;
    let (s, t) = (0, n - 1);
    let mut cap = vec![vec![0i64; n]; n];
    let mut cost = vec![vec![0f64; n]; n];
    for i in 0..na {
        cap[s][1 + i] = nb as i64;
    }
    for j in 0..nb {
        cap[1 + na + j][t] = na as i64;
    }
    for i in 0..na {
        for j in 0..nb {
            cap[1 + i][1 + na + j] = nb as i64;
            cost[1 + i][1 + na + j] = (a[i] - b[j]).abs();
            cost[1 + na + j][1 + i] = -(a[i] - b[j]).abs();
        }
    }
    let mut remaining = (na * nb) as i64;
    let mut total = 0.0;
    while remaining > 0 {
        // Bellman-Ford over the residual network (reverse arcs carry
        // negative cost, so Dijkstra is out).
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        dist[s] = 0.0;
        for _ in 0..n {
            let mut improved = false;
            for u in 0..n {
                if !dist[u].is_finite() {
                    continue;
                }
                for v in 0..n {
                    if cap[u][v] > 0 && dist[u] + cost[u][v] < dist[v] {
                        dist[v] = dist[u] + cost[u][v];
                        prev[v] = u;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        assert!(dist[t].is_finite(), "transport network must stay feasible");
        let mut bottleneck = remaining;
        let mut v = t;
        while v != s {
            let u = prev[v];
            bottleneck = bottleneck.min(cap[u][v]);
            v = u;
        }
        let mut v = t;
        while v != s {
            let u = prev[v];
            cap[u][v] -= bottleneck;
            cap[v][u] += bottleneck;
            total += cost[u][v] * bottleneck as f64;
            v = u;
        }
        remaining -= bottleneck;
    }
    total / (na * nb) as f64
}
