//! Weighted de Bruijn graph of a rule and exact extreme mean cycles.

use serde::Serialize;

use crate::dillmaps::RuleTable;
use crate::words::{Letter, Word};
use crate::Rational;

/// Nodes are words of length δ−1; the edge of window `w` goes from
/// `w_{[0,δ−1)}` to `w_{[1,δ)}` and weighs `|f(w)|`. Edge ids are window codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeBruijnGraph {
    alphabet_size: usize,
    diameter: usize,
    node_count: usize,
    weights: Vec<u64>,
}

/// Closed walk given by its edge ids; it starts and ends at `base`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Cycle {
    pub base: usize,
    pub edges: Vec<usize>,
    pub weight: u64,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn mean(&self) -> Rational {
        Rational::new(self.weight as i64, self.edges.len() as i64)
    }
}

impl DeBruijnGraph {
    pub fn from_rule(rule: &RuleTable) -> Self {
        let k = rule.alphabet().size();
        Self {
            alphabet_size: k,
            diameter: rule.diameter(),
            node_count: rule.window_count() / k,
            weights: rule.images().iter().map(|w| w.len() as u64).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn source(&self, edge: usize) -> usize {
        edge / self.alphabet_size
    }

    pub fn target(&self, edge: usize) -> usize {
        edge % self.node_count
    }

    pub fn weight(&self, edge: usize) -> u64 {
        self.weights[edge]
    }

    pub fn out_edges(&self, node: usize) -> std::ops::Range<usize> {
        node * self.alphabet_size..(node + 1) * self.alphabet_size
    }

    /// Letters of a node, most significant first.
    pub fn node_word(&self, mut node: usize) -> Word {
        let mut letters = vec![0; self.diameter - 1];
        for slot in letters.iter_mut().rev() {
            *slot = (node % self.alphabet_size) as Letter;
            node /= self.alphabet_size;
        }
        Word::new(letters)
    }

    /// Node reached by reading a word of length δ−1.
    pub fn node_of(&self, letters: &[Letter]) -> usize {
        debug_assert_eq!(letters.len(), self.diameter - 1);
        letters.iter().fold(0, |acc, &l| acc * self.alphabet_size + l as usize)
    }

    /// The word of length `|edges| + δ − 1` spelled by a path from `start`.
    pub fn path_word(&self, start: usize, edges: &[usize]) -> Word {
        let mut word = self.node_word(start);
        let mut at = start;
        for &e in edges {
            debug_assert_eq!(self.source(e), at, "edges do not form a path");
            word.push((e % self.alphabet_size) as Letter);
            at = self.target(e);
        }
        word
    }

    /// Edge ids of the path spelled by `word` (|word| ≥ δ−1).
    pub fn path_of(&self, rule: &RuleTable, word: &[Letter]) -> Vec<usize> {
        word.windows(self.diameter).map(|w| rule.window_code(w)).collect()
    }

    pub fn path_weight(&self, edges: &[usize]) -> u64 {
        edges.iter().map(|&e| self.weights[e]).sum()
    }

    fn cycle(&self, edges: Vec<usize>) -> Cycle {
        Cycle {
            base: self.source(edges[0]),
            weight: self.path_weight(&edges),
            edges,
        }
    }

    /// Shortest path (fewest edges) between two nodes.
    pub fn shortest_path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut via: Vec<Option<usize>> = vec![None; self.node_count];
        let mut seen = vec![false; self.node_count];
        let mut queue = std::collections::VecDeque::from([from]);
        seen[from] = true;
        while let Some(node) = queue.pop_front() {
            if node == to {
                break;
            }
            for e in self.out_edges(node) {
                let t = self.target(e);
                if !seen[t] {
                    seen[t] = true;
                    via[t] = Some(e);
                    queue.push_back(t);
                }
            }
        }
        let mut path = Vec::new();
        let mut at = to;
        while at != from {
            let e = via[at].expect("de Bruijn graphs are strongly connected");
            path.push(e);
            at = self.source(e);
        }
        path.reverse();
        path
    }

    /// Minimum mean weight over all cycles, with a cycle attaining it.
    pub fn min_mean_cycle(&self) -> (Rational, Cycle) {
        let weights: Vec<i64> = self.weights.iter().map(|&w| w as i64).collect();
        let (mean, edges) = self.extreme_cycle(&weights);
        (mean, self.cycle(edges))
    }

    /// Maximum mean weight over all cycles, by negating the weights.
    pub fn max_mean_cycle(&self) -> (Rational, Cycle) {
        let weights: Vec<i64> = self.weights.iter().map(|&w| -(w as i64)).collect();
        let (mean, edges) = self.extreme_cycle(&weights);
        (-mean, self.cycle(edges))
    }

    fn extreme_cycle(&self, weights: &[i64]) -> (Rational, Vec<usize>) {
        let mean = self.karp_min_mean(weights);
        (mean, self.zero_reduced_cycle(weights, mean))
    }

    /// Karp's recurrence: `D_j(v)` is the lightest walk of exactly `j` edges
    /// ending at `v` (starting anywhere); the minimum cycle mean is
    /// `min_v max_{j<n} (D_n(v) − D_j(v)) / (n − j)`.
    fn karp_min_mean(&self, weights: &[i64]) -> Rational {
        let n = self.node_count;
        let mut table = vec![vec![0i64; n]; n + 1];
        for j in 1..=n {
            let (done, rest) = table.split_at_mut(j);
            let (prev, row) = (&done[j - 1], &mut rest[0]);
            row.fill(i64::MAX);
            for (e, &w) in weights.iter().enumerate() {
                let (s, t) = (self.source(e), self.target(e));
                row[t] = row[t].min(prev[s] + w);
            }
        }
        (0..n)
            .map(|v| {
                (0..n)
                    .map(|j| Rational::new(table[n][v] - table[j][v], (n - j) as i64))
                    .max()
                    .expect("at least one node")
            })
            .min()
            .expect("at least one node")
    }

    /// With reduced weights `den·w − num` every cycle is nonnegative and the
    /// optimal ones weigh zero; their edges are exactly the tight edges of a
    /// shortest-path potential, so any cycle among tight edges is optimal.
    fn zero_reduced_cycle(&self, weights: &[i64], mean: Rational) -> Vec<usize> {
        let (num, den) = (*mean.numer(), *mean.denom());
        let reduced: Vec<i64> = weights.iter().map(|&w| den * w - num).collect();
        let n = self.node_count;
        let mut dist = vec![0i64; n];
        for _ in 0..n {
            let mut changed = false;
            for (e, &w) in reduced.iter().enumerate() {
                let (s, t) = (self.source(e), self.target(e));
                if dist[s] + w < dist[t] {
                    dist[t] = dist[s] + w;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let tight = |e: usize| dist[self.source(e)] + reduced[e] == dist[self.target(e)];

        // iterative DFS over tight edges looking for a back edge
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let mut mark = vec![Mark::New; n];
        for root in 0..n {
            if mark[root] != Mark::New {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(root, self.out_edges(root).start)];
            let mut path_edges: Vec<usize> = Vec::new();
            mark[root] = Mark::Active;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if *next == self.out_edges(node).end {
                    mark[node] = Mark::Done;
                    stack.pop();
                    path_edges.pop();
                    continue;
                }
                let e = *next;
                *next += 1;
                if !tight(e) {
                    continue;
                }
                let t = self.target(e);
                match mark[t] {
                    Mark::Active => {
                        let at = stack.iter().position(|&(v, _)| v == t).expect("active node on stack");
                        let mut cycle = path_edges[at..].to_vec();
                        cycle.push(e);
                        return cycle;
                    }
                    Mark::New => {
                        mark[t] = Mark::Active;
                        stack.push((t, self.out_edges(t).start));
                        path_edges.push(e);
                    }
                    Mark::Done => {}
                }
            }
        }
        unreachable!("an optimal cycle always consists of tight edges")
    }

    /// Node potential `φ` with `den·w(e) − num = φ(target) − φ(source)`,
    /// when all cycles have mean `num/den`; `None` otherwise.
    pub fn potential(&self, mean: Rational) -> Option<Vec<i64>> {
        let (num, den) = (*mean.numer(), *mean.denom());
        let mut phi: Vec<Option<i64>> = vec![None; self.node_count];
        phi[0] = Some(0);
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(node) = queue.pop_front() {
            for e in self.out_edges(node) {
                let t = self.target(e);
                if phi[t].is_none() {
                    phi[t] = Some(phi[node]? + den * self.weights[e] as i64 - num);
                    queue.push_back(t);
                }
            }
        }
        let phi: Vec<i64> = phi.into_iter().collect::<Option<_>>()?;
        (0..self.edge_count())
            .all(|e| den * self.weights[e] as i64 - num == phi[self.target(e)] - phi[self.source(e)])
            .then_some(phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dillmaps::named;
    use crate::words::Alphabet;

    /// All simple cycles by brute force over start node and DFS.
    fn simple_cycle_means(g: &DeBruijnGraph) -> Vec<Rational> {
        fn walk(
            g: &DeBruijnGraph,
            start: usize,
            at: usize,
            on: &mut Vec<usize>,
            weight: u64,
            len: i64,
            out: &mut Vec<Rational>,
        ) {
            for e in g.out_edges(at) {
                let t = g.target(e);
                let (w, l) = (weight + g.weight(e), len + 1);
                if t == start {
                    out.push(Rational::new(w as i64, l));
                } else if t > start && !on.contains(&t) {
                    on.push(t);
                    walk(g, start, t, on, w, l, out);
                    on.pop();
                }
            }
        }
        let mut out = Vec::new();
        for s in 0..g.node_count() {
            walk(g, s, s, &mut vec![s], 0, 0, &mut out);
        }
        out
    }

    #[test]
    fn diamond_example_graph() {
        let g = DeBruijnGraph::from_rule(&named::diamond_example());
        assert_eq!((g.node_count(), g.edge_count()), (2, 4));
        let mut means = simple_cycle_means(&g);
        means.sort();
        assert_eq!(means, vec![Rational::from_integer(2); 3]);
        assert_eq!(g.min_mean_cycle().0, Rational::from_integer(2));
        assert_eq!(g.max_mean_cycle().0, Rational::from_integer(2));
        assert!(g.potential(Rational::from_integer(2)).is_some());
        assert!(g.potential(Rational::from_integer(1)).is_none());
    }

    #[test]
    fn substitution_loops() {
        let g = DeBruijnGraph::from_rule(&named::doubling_ones());
        assert_eq!(g.node_count(), 1);
        let (lo, c_lo) = g.min_mean_cycle();
        let (hi, c_hi) = g.max_mean_cycle();
        assert_eq!((lo, hi), (Rational::from_integer(1), Rational::from_integer(2)));
        assert_eq!(c_lo.edges, vec![0]);
        assert_eq!(c_hi.edges, vec![1]);
    }

    #[test]
    fn path_words_and_weights() {
        let rule = named::diamond_example();
        let g = DeBruijnGraph::from_rule(&rule);
        let a = Alphabet::binary();
        let word = a.parse_word("abbaab").unwrap();
        let path = g.path_of(&rule, &word);
        assert_eq!(g.path_word(g.node_of(&word[..1]), &path), word);
        assert_eq!(g.path_weight(&path) as usize, rule.star_len(&word));
        assert_eq!(g.shortest_path(0, 0), Vec::<usize>::new());
        assert_eq!(g.shortest_path(0, 1), vec![1]);
    }

    #[test]
    fn extreme_means_match_enumeration_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let diameter = rng.gen_range(1..=3);
            let rule = RuleTable::from_fn(Alphabet::binary(), diameter, |_| {
                Word::new(vec![0; rng.gen_range(1..=4)])
            })
            .unwrap();
            let g = DeBruijnGraph::from_rule(&rule);
            let means = simple_cycle_means(&g);
            let (lo, c_lo) = g.min_mean_cycle();
            let (hi, c_hi) = g.max_mean_cycle();
            assert_eq!(lo, *means.iter().min().unwrap());
            assert_eq!(hi, *means.iter().max().unwrap());
            assert_eq!(c_lo.mean(), lo);
            assert_eq!(c_hi.mean(), hi);
            for c in [&c_lo, &c_hi] {
                assert_eq!(g.target(*c.edges.last().unwrap()), c.base);
            }
        }
    }
}
