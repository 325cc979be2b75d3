//! Fixed-order Gauss–Legendre rule and composite panel sums.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Points per panel.
pub const ORDER: usize = 16;

struct Rule {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(ORDER))
}

fn legendre_rule(n: usize) -> Rule {
    let mut nodes = [0.0; ORDER];
    let mut weights = [0.0; ORDER];
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    Rule { nodes, weights }
}

/// Calls `visit(x, w)` for every node of `panels` equal Gauss–Legendre panels
/// on `[a, b]`.
pub fn for_each_node(a: f64, b: f64, panels: usize, mut visit: impl FnMut(f64, f64)) {
    let r = rule();
    let width = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let half = 0.5 * width;
        let mid = lo + half;
        for (x, w) in r.nodes.iter().zip(r.weights.iter()) {
            visit(mid + half * x, half * w);
        }
    }
}

/// Nodes and weights of the composite rule, materialized.
pub fn nodes_weights(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(panels * ORDER);
    for_each_node(a, b, panels, |x, w| out.push((x, w)));
    out
}
