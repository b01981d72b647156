//! Exact earth mover's distance between sparse magnitude vectors on a line.

use crate::error::{Error, Result};
use crate::transport::sparse::{FlowPlan, SparseCoefVector};

/// Relative tolerance under which two total masses count as equal.
const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct EmdOutcome {
    /// Transport cost, including the mass-mismatch penalty when the totals
    /// differ.
    pub cost: f64,
    /// An optimal routing of the common mass.
    pub plan: FlowPlan,
    /// Absolute difference of the two total masses (0 for balanced inputs).
    pub mass_mismatch: f64,
}

/// Optimal transport cost between two sparse vectors of the same ambient
/// length under the index distance d(i,j) = |i-j|.
///
/// Equal totals use the cumulative-distribution identity
/// cost = sum over index gaps of |F_c - F_chat| * gap, with the matching
/// monotone plan. When the totals differ, the smaller total is routed onto
/// the larger one at minimum cost and the leftover mass is charged a flat
/// penalty of mismatch * length.
pub fn emd(c: &SparseCoefVector, chat: &SparseCoefVector) -> Result<EmdOutcome> {
    if c.len() != chat.len() {
        return Err(Error::DimensionMismatch {
            expected: c.len(),
            got: chat.len(),
        });
    }
    if c.is_empty() || chat.is_empty() {
        return Err(Error::EmptyInput("coefficient vector"));
    }
    let mc = c.total_mass();
    let mh = chat.total_mass();
    let mismatch = (mc - mh).abs();
    if mismatch <= MASS_TOL * mc.max(mh).max(1.0) {
        let cost = cdf_cost(c, chat);
        let plan = monotone_plan(c, chat);
        Ok(EmdOutcome {
            cost,
            plan,
            mass_mismatch: 0.0,
        })
    } else {
        let penalty = mismatch * c.len() as f64;
        let (flow_cost, plan) = partial_transport(c, chat)?;
        Ok(EmdOutcome {
            cost: flow_cost + penalty,
            plan,
            mass_mismatch: mismatch,
        })
    }
}

/// Balanced cost via the merged cumulative distributions.
fn cdf_cost(c: &SparseCoefVector, chat: &SparseCoefVector) -> f64 {
    let (sc, wc) = (c.support(), c.weights());
    let (sh, wh) = (chat.support(), chat.weights());
    let (mut i, mut j) = (0usize, 0usize);
    let (mut fc, mut fh) = (0.0f64, 0.0f64);
    let mut cost = 0.0;
    let mut prev: Option<usize> = None;
    while i < sc.len() || j < sh.len() {
        let pos = match (sc.get(i), sh.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        if let Some(p) = prev {
            cost += (pos - p) as f64 * (fc - fh).abs();
        }
        if i < sc.len() && sc[i] == pos {
            fc += wc[i];
            i += 1;
        }
        if j < sh.len() && sh[j] == pos {
            fh += wh[j];
            j += 1;
        }
        prev = Some(pos);
    }
    cost
}

/// Monotone north-west routing, optimal on the line for balanced masses.
fn monotone_plan(c: &SparseCoefVector, chat: &SparseCoefVector) -> FlowPlan {
    let (sc, wc) = (c.support(), c.weights());
    let (sh, wh) = (chat.support(), chat.weights());
    let slack = MASS_TOL * c.total_mass().max(1.0);
    let mut flows = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    let mut ri = wc[0];
    let mut rj = wh[0];
    while i < sc.len() && j < sh.len() {
        let f = ri.min(rj);
        if f > 0.0 {
            flows.push((sc[i], sh[j], f));
        }
        ri -= f;
        rj -= f;
        if ri <= slack {
            i += 1;
            if i < sc.len() {
                ri = wc[i];
            }
        }
        if rj <= slack {
            j += 1;
            if j < sh.len() {
                rj = wh[j];
            }
        }
    }
    FlowPlan { flows }
}

/// Routes the smaller total onto the larger one at minimum cost by
/// successive shortest augmenting paths, returning (cost, plan) with plan
/// flows always oriented c -> chat.
fn partial_transport(
    c: &SparseCoefVector,
    chat: &SparseCoefVector,
) -> Result<(f64, FlowPlan)> {
    let c_is_smaller = c.total_mass() <= chat.total_mass();
    let (small, large) = if c_is_smaller { (c, chat) } else { (chat, c) };

    let n1 = small.nnz();
    let n2 = large.nnz();
    let source = 0usize;
    let sink = n1 + n2 + 1;
    let mut net = MinCostNet::new(n1 + n2 + 2);
    for (i, &w) in small.weights().iter().enumerate() {
        net.add_edge(source, 1 + i, w, 0.0);
    }
    let mut bridge = vec![vec![0usize; n2]; n1];
    for (i, &si) in small.support().iter().enumerate() {
        for (j, &sj) in large.support().iter().enumerate() {
            bridge[i][j] = net.add_edge(1 + i, 1 + n1 + j, f64::INFINITY, si.abs_diff(sj) as f64);
        }
    }
    for (j, &w) in large.weights().iter().enumerate() {
        net.add_edge(1 + n1 + j, sink, w, 0.0);
    }
    let cost = net.run(source, sink)?;

    let mut flows = Vec::new();
    for (i, row) in bridge.iter().enumerate() {
        for (j, &edge) in row.iter().enumerate() {
            let f = net.flow_on(1 + i, edge);
            if f > 0.0 {
                let (from, to) = if c_is_smaller {
                    (small.support()[i], large.support()[j])
                } else {
                    (large.support()[j], small.support()[i])
                };
                flows.push((from, to, f));
            }
        }
    }
    flows.sort_by_key(|&(a, b, _)| (a, b));
    Ok((cost, FlowPlan { flows }))
}

struct Arc {
    to: usize,
    rev: usize,
    cap: f64,
    cost: f64,
}

/// Small dense-graph min-cost flow pushing all available source mass.
struct MinCostNet {
    graph: Vec<Vec<Arc>>,
}

impl MinCostNet {
    fn new(nodes: usize) -> Self {
        Self {
            graph: (0..nodes).map(|_| Vec::new()).collect(),
        }
    }

    /// Adds a directed arc and its residual twin; returns the arc's index at
    /// `from`.
    fn add_edge(&mut self, from: usize, to: usize, cap: f64, cost: f64) -> usize {
        let fwd = self.graph[from].len();
        let rev = self.graph[to].len();
        self.graph[from].push(Arc {
            to,
            rev,
            cap,
            cost,
        });
        self.graph[to].push(Arc {
            to: from,
            rev: fwd,
            cap: 0.0,
            cost: -cost,
        });
        fwd
    }

    fn flow_on(&self, from: usize, edge: usize) -> f64 {
        let arc = &self.graph[from][edge];
        self.graph[arc.to][arc.rev].cap
    }

    /// Augments along shortest residual paths until the sink is unreachable;
    /// returns the total routed cost.
    fn run(&mut self, source: usize, sink: usize) -> Result<f64> {
        let n = self.graph.len();
        let arc_count: usize = self.graph.iter().map(|a| a.len()).sum();
        let mut total_cost = 0.0;
        for _round in 0..arc_count + 2 {
            // Bellman-Ford tolerates the negative residual arcs.
            let mut dist = vec![f64::INFINITY; n];
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
            dist[source] = 0.0;
            for _ in 0..n {
                let mut changed = false;
                for u in 0..n {
                    if !dist[u].is_finite() {
                        continue;
                    }
                    for (e, arc) in self.graph[u].iter().enumerate() {
                        if arc.cap > 1e-15 && dist[u] + arc.cost < dist[arc.to] - 1e-12 {
                            dist[arc.to] = dist[u] + arc.cost;
                            prev[arc.to] = Some((u, e));
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            if !dist[sink].is_finite() {
                return Ok(total_cost);
            }
            let mut bottleneck = f64::INFINITY;
            let mut node = sink;
            while node != source {
                let (u, e) = prev[node].expect("path recorded");
                bottleneck = bottleneck.min(self.graph[u][e].cap);
                node = u;
            }
            let mut node = sink;
            while node != source {
                let (u, e) = prev[node].expect("path recorded");
                let rev = self.graph[u][e].rev;
                self.graph[u][e].cap -= bottleneck;
                let to = self.graph[u][e].to;
                self.graph[to][rev].cap += bottleneck;
                node = u;
            }
            total_cost += bottleneck * dist[sink];
        }
        Err(Error::InvalidCoefVector(
            "transport augmentation failed to terminate".into(),
        ))
    }
}
