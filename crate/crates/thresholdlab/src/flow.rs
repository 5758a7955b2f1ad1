//! Dinic max-flow on small integer-capacity networks.
//!
//! Used by the exact densest-subgraph solver; capacities are pre-scaled
//! integers, so min-cut comparisons stay exact.

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    cap: i64,
}

/// Max-flow network with residual edges stored pairwise (edge `2i` and its
/// reverse `2i + 1`).
pub struct FlowNetwork {
    edges: Vec<Edge>,
    head: Vec<Vec<usize>>, // per node, indices into `edges`
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            edges: Vec::new(),
            head: vec![Vec::new(); nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.head.len()
    }

    /// Adds a directed edge `from -> to` with the given capacity
    /// (the residual reverse edge starts at capacity 0).
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) {
        assert!(cap >= 0, "capacities must be nonnegative");
        let id = self.edges.len();
        self.edges.push(Edge { to, cap });
        self.edges.push(Edge { to: from, cap: 0 });
        self.head[from].push(id);
        self.head[to].push(id + 1);
    }

    fn bfs_levels(&self, source: usize, sink: usize) -> Option<Vec<i32>> {
        let mut level = vec![-1i32; self.node_count()];
        let mut queue = std::collections::VecDeque::new();
        level[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &eid in &self.head[v] {
                let e = &self.edges[eid];
                if e.cap > 0 && level[e.to] < 0 {
                    level[e.to] = level[v] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        (level[sink] >= 0).then_some(level)
    }

    fn dfs_augment(
        &mut self,
        v: usize,
        sink: usize,
        pushed: i64,
        level: &[i32],
        iter: &mut [usize],
    ) -> i64 {
        if v == sink {
            return pushed;
        }
        while iter[v] < self.head[v].len() {
            let eid = self.head[v][iter[v]];
            let (to, cap) = {
                let e = &self.edges[eid];
                (e.to, e.cap)
            };
            if cap > 0 && level[to] == level[v] + 1 {
                let d = self.dfs_augment(to, sink, pushed.min(cap), level, iter);
                if d > 0 {
                    self.edges[eid].cap -= d;
                    self.edges[eid ^ 1].cap += d;
                    return d;
                }
            }
            iter[v] += 1;
        }
        0
    }

    /// Computes the max flow from `source` to `sink`.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> i64 {
        assert_ne!(source, sink);
        let mut flow = 0i64;
        while let Some(level) = self.bfs_levels(source, sink) {
            let mut iter = vec![0usize; self.node_count()];
            loop {
                let pushed = self.dfs_augment(source, sink, i64::MAX, &level, &mut iter);
                if pushed == 0 {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }

    /// Nodes reachable from `source` in the residual network. After
    /// `max_flow`, this is the source side of a minimum cut.
    pub fn residual_reachable(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![source];
        seen[source] = true;
        while let Some(v) = stack.pop() {
            for &eid in &self.head[v] {
                let e = &self.edges[eid];
                if e.cap > 0 && !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen
    }
}
