//! Union-find over constant indices with two extras the prover relies on:
//! the representative of a class is always its oldest (lowest-index) member,
//! and every union records the equality fact that caused it in a proof
//! forest, so any two equal constants can be explained by a chain of facts.

#[derive(Debug, Clone, Default)]
pub struct UnionFind {
    parent: Vec<usize>,
    /// Proof forest: edge toward a neighbor, labeled with the fact id of the
    /// equality that merged them.
    proof_parent: Vec<Option<(usize, usize)>>,
}

impl UnionFind {
    pub fn add(&mut self) -> usize {
        let i = self.parent.len();
        self.parent.push(i);
        self.proof_parent.push(None);
        i
    }

    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`, keeping the oldest constant as
    /// representative. Returns `(kept, retired)` class representatives, or
    /// None when already equal. `fact` labels the proof-forest edge a—b.
    pub fn union(&mut self, a: usize, b: usize, fact: usize) -> Option<(usize, usize)> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return None;
        }
        let (kept, retired) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[retired] = kept;
        self.reroot(a);
        self.proof_parent[a] = Some((b, fact));
        Some((kept, retired))
    }

    /// Fact ids whose equalities chain `x` to `y` (empty when x == y).
    /// Both must be in the same class.
    pub fn explain(&self, x: usize, y: usize) -> Vec<usize> {
        debug_assert_eq!(self.find(x), self.find(y));
        let chain = |mut c: usize| {
            let mut nodes = vec![c];
            let mut edges = Vec::new();
            while let Some((p, e)) = self.proof_parent[c] {
                edges.push(e);
                nodes.push(p);
                c = p;
            }
            (nodes, edges)
        };
        let (xn, xe) = chain(x);
        let (yn, ye) = chain(y);
        for (i, n) in yn.iter().enumerate() {
            if let Some(j) = xn.iter().position(|m| m == n) {
                let mut out: Vec<usize> = xe[..j].to_vec();
                out.extend_from_slice(&ye[..i]);
                out.sort_unstable();
                out.dedup();
                return out;
            }
        }
        unreachable!("explain called on constants in different classes");
    }

    /// Makes `x` the root of its proof tree by reversing the path above it.
    fn reroot(&mut self, x: usize) {
        let mut prev: Option<(usize, usize)> = None;
        let mut cur = x;
        loop {
            let next = self.proof_parent[cur];
            self.proof_parent[cur] = prev;
            match next {
                Some((p, e)) => {
                    prev = Some((cur, e));
                    cur = p;
                }
                None => break,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oldest_constant_wins() {
        let mut uf = UnionFind::default();
        for _ in 0..4 {
            uf.add();
        }
        uf.union(2, 3, 10);
        assert_eq!(uf.find(3), 2);
        uf.union(3, 0, 11);
        assert_eq!(uf.find(2), 0);
        assert_eq!(uf.find(3), 0);
        assert_eq!(uf.find(1), 1);
    }

    #[test]
    fn idempotent_union() {
        let mut uf = UnionFind::default();
        for _ in 0..2 {
            uf.add();
        }
        assert!(uf.union(0, 1, 5).is_some());
        assert!(uf.union(0, 1, 6).is_none());
        assert!(uf.union(1, 1, 7).is_none());
    }

    #[test]
    fn explain_produces_the_merging_facts() {
        let mut uf = UnionFind::default();
        for _ in 0..5 {
            uf.add();
        }
        uf.union(0, 1, 100);
        uf.union(2, 3, 101);
        uf.union(1, 2, 102);
        assert_eq!(uf.explain(0, 1), vec![100]);
        assert_eq!(uf.explain(0, 3), vec![100, 101, 102]);
        assert_eq!(uf.explain(1, 2), vec![102]);
        assert_eq!(uf.explain(3, 3), Vec::<usize>::new());
    }

    /// The partition after a merge sequence does not depend on merge order,
    /// and neither do the representatives (oldest-wins makes them canonical).
    #[test]
    fn partition_is_merge_order_independent() {
        let pairs = [(0usize, 4usize), (1, 2), (4, 2), (5, 6)];
        let mut orders = vec![
            vec![0, 1, 2, 3],
            vec![3, 2, 1, 0],
            vec![2, 0, 3, 1],
            vec![1, 3, 0, 2],
        ];
        let mut partitions = Vec::new();
        for order in orders.drain(..) {
            let mut uf = UnionFind::default();
            for _ in 0..7 {
                uf.add();
            }
            for (k, i) in order.into_iter().enumerate() {
                let (a, b) = pairs[i];
                uf.union(a, b, k);
            }
            let reps: Vec<usize> = (0..7).map(|i| uf.find(i)).collect();
            partitions.push(reps);
        }
        for p in &partitions[1..] {
            assert_eq!(p, &partitions[0]);
        }
        assert_eq!(partitions[0], vec![0, 0, 0, 3, 0, 5, 5]);
    }
}
