//! Unrooted binary trees with labeled leaves.
//!
//! Vertices `0..n` are the leaves, sorted by label; the remaining vertices
//! are internal and have degree three. A rooted view hanging from leaf
//! vertex `0` is cached at construction because every traversal needs it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::caterpillar::Caterpillar;
use crate::error::{guard, Error, Result};
use crate::Label;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct Tree {
    labels: Vec<Label>,
    adj: Vec<Vec<usize>>,
    parent: Vec<usize>,
    postorder: Vec<usize>,
}

impl PartialEq for Tree {
    /// Equality is isomorphism preserving leaf labels.
    fn eq(&self, other: &Self) -> bool {
        self.is_isomorphic(other)
    }
}

impl Eq for Tree {}

impl Tree {
    /// Builds a tree from edges where vertices `0..labels.len()` are the
    /// labeled leaves and higher ids are unlabeled. Degree-2 unlabeled
    /// vertices are suppressed.
    pub fn from_edges(labels: &[Label], num_vertices: usize, edges: &[(usize, usize)]) -> Result<Tree> {
        let mut vertex_labels = vec![None; num_vertices];
        for (v, &l) in labels.iter().enumerate() {
            if v >= num_vertices {
                return Err(Error::InvalidTree("more labels than vertices".into()));
            }
            vertex_labels[v] = Some(l);
        }
        Tree::from_labeled_graph(&vertex_labels, edges)
    }

    /// Builds a tree from an arbitrary labeled graph: it must be a tree,
    /// labeled vertices must be leaves (or the single vertex when n = 1),
    /// unlabeled vertices of degree two are suppressed, and the remaining
    /// unlabeled vertices must have degree three.
    pub fn from_labeled_graph(vertex_labels: &[Option<Label>], edges: &[(usize, usize)]) -> Result<Tree> {
        let nv = vertex_labels.len();
        if nv == 0 {
            return Err(Error::Empty("tree"));
        }
        if edges.len() + 1 != nv {
            return Err(Error::InvalidTree(format!("{} vertices but {} edges", nv, edges.len())));
        }
        let mut adj = vec![Vec::new(); nv];
        for &(u, v) in edges {
            if u >= nv || v >= nv || u == v {
                return Err(Error::InvalidTree(format!("bad edge ({u}, {v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        // connectivity, hence acyclicity given the edge count
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != nv {
            return Err(Error::InvalidTree("graph is not connected".into()));
        }

        let n = vertex_labels.iter().filter(|l| l.is_some()).count();
        if n == 0 {
            return Err(Error::InvalidTree("no labeled leaves".into()));
        }
        let mut alive = vec![true; nv];
        let mut work: Vec<usize> = (0..nv).filter(|&v| vertex_labels[v].is_none() && adj[v].len() == 2).collect();
        while let Some(v) = work.pop() {
            if !alive[v] || adj[v].len() != 2 {
                continue;
            }
            let (a, b) = (adj[v][0], adj[v][1]);
            alive[v] = false;
            adj[v].clear();
            for (x, y) in [(a, b), (b, a)] {
                let slot = adj[x].iter().position(|&w| w == v).unwrap();
                adj[x][slot] = y;
            }
        }

        let mut labels: Vec<(Label, usize)> = Vec::with_capacity(n);
        let mut internal = Vec::new();
        for v in (0..nv).filter(|&v| alive[v]) {
            let deg = adj[v].len();
            match vertex_labels[v] {
                Some(l) => {
                    if n >= 2 && deg != 1 {
                        return Err(Error::InvalidTree(format!("labeled vertex {l} has degree {deg}")));
                    }
                    labels.push((l, v));
                }
                None => {
                    if deg != 3 {
                        return Err(Error::InvalidTree(format!("internal vertex of degree {deg}")));
                    }
                    internal.push(v);
                }
            }
        }
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidTree(format!("duplicate leaf label {}", w[0].0)));
        }
        if n >= 3 && internal.len() != n - 2 {
            return Err(Error::InvalidTree("not a binary tree".into()));
        }

        let mut index = vec![NONE; nv];
        for (i, &(_, v)) in labels.iter().enumerate() {
            index[v] = i;
        }
        for (i, &v) in internal.iter().enumerate() {
            index[v] = n + i;
        }
        let order: Vec<usize> = labels.iter().map(|&(_, v)| v).chain(internal.iter().copied()).collect();
        let new_adj = order
            .iter()
            .map(|&v| adj[v].iter().map(|&w| index[w]).collect())
            .collect();
        Ok(Tree::assemble(labels.into_iter().map(|(l, _)| l).collect(), new_adj))
    }

    fn assemble(labels: Vec<Label>, adj: Vec<Vec<usize>>) -> Tree {
        let nv = adj.len();
        let mut parent = vec![NONE; nv];
        let mut postorder = Vec::with_capacity(nv);
        // iterative DFS from leaf vertex 0; emit on exit
        let mut stack = vec![(0usize, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                postorder.push(v);
                continue;
            }
            stack.push((v, true));
            for &w in adj[v].iter().rev() {
                if w != parent[v] {
                    parent[w] = v;
                    stack.push((w, false));
                }
            }
        }
        Tree {
            labels,
            adj,
            parent,
            postorder,
        }
    }

    /// Single-vertex tree, single-edge tree, or three-leaf star on `1..=n`.
    pub fn small(n: usize) -> Result<Tree> {
        match n {
            1 => Ok(Tree::assemble(vec![1], vec![vec![]])),
            2 => Ok(Tree::assemble(vec![1, 2], vec![vec![1], vec![0]])),
            3 => Ok(Tree::assemble(vec![1, 2, 3], vec![vec![3], vec![3], vec![3], vec![0, 1, 2]])),
            _ => Err(Error::OutOfRange(format!("no canonical small tree with {n} leaves"))),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Leaf labels in ascending order; leaf vertex `i` carries `labels()[i]`.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// True when the labels are exactly `1..=n`.
    pub fn has_standard_labels(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &l)| l as usize == i + 1)
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v < self.n()
    }

    /// Parent in the view rooted at leaf vertex 0.
    pub fn parent(&self, v: usize) -> Option<usize> {
        (self.parent[v] != NONE).then_some(self.parent[v])
    }

    /// Vertices with every child before its parent; vertex 0 comes last.
    pub fn postorder(&self) -> &[usize] {
        &self.postorder
    }

    /// Leaf vertex carrying `label`.
    pub fn leaf_vertex(&self, label: Label) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    /// Edges as `(child, parent)` pairs in postorder of the child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.postorder
            .iter()
            .filter(|&&v| self.parent[v] != NONE)
            .map(|&v| (v, self.parent[v]))
            .collect()
    }

    /// Leaf-rank bitsets of the sides of all internal edges, each taken on
    /// the side away from the smallest label.
    pub fn splits(&self) -> BTreeSet<Vec<u64>> {
        let n = self.n();
        let words = n.div_ceil(64);
        let mut below: Vec<Vec<u64>> = vec![Vec::new(); self.num_vertices()];
        let mut out = BTreeSet::new();
        for &v in &self.postorder {
            let mut set = vec![0u64; words];
            if v < n {
                set[v / 64] |= 1 << (v % 64);
            }
            for &w in &self.adj[v] {
                if w != self.parent[v] {
                    let child = core::mem::take(&mut below[w]);
                    for (a, b) in set.iter_mut().zip(&child) {
                        *a |= b;
                    }
                }
            }
            let size: u32 = set.iter().map(|w| w.count_ones()).sum();
            if size >= 2 && (size as usize) + 2 <= n && self.parent[v] != NONE {
                out.insert(set.clone());
            }
            below[v] = set;
        }
        out
    }

    /// Splits written out as label lists.
    pub fn split_labels(&self) -> Vec<Vec<Label>> {
        self.splits()
            .iter()
            .map(|set| {
                (0..self.n())
                    .filter(|&i| set[i / 64] >> (i % 64) & 1 == 1)
                    .map(|i| self.labels[i])
                    .collect()
            })
            .collect()
    }

    /// Isomorphism preserving leaf labels.
    pub fn is_isomorphic(&self, other: &Tree) -> bool {
        self.labels == other.labels && self.splits() == other.splits()
    }

    /// The induced binary subtree on the leaf labels in `subset`.
    pub fn restrict(&self, subset: &[Label]) -> Result<Tree> {
        if subset.is_empty() {
            return Err(Error::Empty("leaf subset"));
        }
        let mut inside = vec![false; self.n()];
        for &l in subset {
            let v = self
                .leaf_vertex(l)
                .ok_or_else(|| Error::LabelMismatch(format!("label {l} is not a leaf of the tree")))?;
            inside[v] = true;
        }
        let total = inside.iter().filter(|&&b| b).count();
        let mut count = vec![0usize; self.num_vertices()];
        let mut edges = Vec::new();
        for &v in &self.postorder {
            let mut c = usize::from(v < self.n() && inside[v]);
            for &w in &self.adj[v] {
                if w != self.parent[v] {
                    c += count[w];
                }
            }
            count[v] = c;
            if self.parent[v] != NONE && c > 0 && c < total {
                edges.push((v, self.parent[v]));
            }
        }
        let mut keep: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        if edges.is_empty() {
            keep.push(inside.iter().position(|&b| b).unwrap());
        }
        keep.sort_unstable();
        keep.dedup();
        let local: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let vertex_labels: Vec<Option<Label>> = keep
            .iter()
            .map(|&v| (v < self.n()).then(|| self.labels[v]))
            .collect();
        let edges: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (local[&a], local[&b])).collect();
        Tree::from_labeled_graph(&vertex_labels, &edges)
    }

    /// A copy with every label replaced by `f(label)`.
    pub fn relabeled(&self, f: impl Fn(Label) -> Label) -> Result<Tree> {
        let vertex_labels: Vec<Option<Label>> = (0..self.num_vertices())
            .map(|v| (v < self.n()).then(|| f(self.labels[v])))
            .collect();
        Tree::from_labeled_graph(&vertex_labels, &self.edges())
    }

    /// The caterpillar permutation (over leaf ranks) if removing the leaves
    /// leaves a path, in canonical form.
    pub fn as_caterpillar(&self) -> Option<Caterpillar> {
        let n = self.n();
        if n <= 3 {
            return Some(Caterpillar::identity(n));
        }
        let internal_neighbors = |v: usize| self.adj[v].iter().copied().filter(|&w| w >= n);
        let mut end = None;
        for v in n..self.num_vertices() {
            let d = internal_neighbors(v).count();
            if d > 2 {
                return None;
            }
            if d == 1 && end.is_none() {
                end = Some(v);
            }
        }
        let mut perm = Vec::with_capacity(n);
        let (mut prev, mut cur) = (NONE, end?);
        loop {
            let mut leaves: Vec<Label> = self.adj[cur].iter().filter(|&&w| w < n).map(|&w| w as Label + 1).collect();
            leaves.sort_unstable();
            perm.extend(leaves);
            match internal_neighbors(cur).find(|&w| w != prev) {
                Some(next) => {
                    prev = cur;
                    cur = next;
                }
                None => break,
            }
        }
        Caterpillar::new(perm).ok().map(|c| c.canonical())
    }

    /// Uniform random topology on labels `1..=n`: leaves are inserted one
    /// at a time on a uniformly chosen edge.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Tree> {
        if n <= 3 {
            return Tree::small(n);
        }
        // vertices: leaves 0..n, internal n..2n-2
        let mut edges: Vec<(usize, usize)> = vec![(0, n), (1, n), (2, n)];
        for leaf in 3..n {
            let e = rng.random_range(0..edges.len());
            let (a, b) = edges[e];
            let w = n + leaf - 2;
            edges[e] = (a, w);
            edges.push((w, b));
            edges.push((w, leaf));
        }
        let labels: Vec<Label> = (1..=n as Label).collect();
        Tree::from_edges(&labels, 2 * n - 2, &edges)
    }

    /// Every binary tree on labels `1..=n`, `(2n-5)!!` of them for n >= 3.
    pub fn all(n: usize, max_n: usize) -> Result<Vec<Tree>> {
        guard("tree enumeration", n, max_n)?;
        if n <= 3 {
            return Ok(vec![Tree::small(n)?]);
        }
        let mut partial: Vec<Vec<(usize, usize)>> = vec![vec![(0, n), (1, n), (2, n)]];
        for leaf in 3..n {
            let w = n + leaf - 2;
            partial = partial
                .into_iter()
                .flat_map(|edges| {
                    (0..edges.len()).map(move |e| {
                        let mut next = edges.clone();
                        let (a, b) = next[e];
                        next[e] = (a, w);
                        next.push((w, b));
                        next.push((w, leaf));
                        next
                    })
                })
                .collect();
        }
        let labels: Vec<Label> = (1..=n as Label).collect();
        partial
            .iter()
            .map(|edges| Tree::from_edges(&labels, 2 * n - 2, edges))
            .collect()
    }

    /// Canonical string of the unlabeled shape; equal strings iff the trees
    /// are isomorphic once labels are forgotten.
    pub fn shape_signature(&self) -> String {
        let nv = self.num_vertices();
        if nv <= 2 {
            return format!("{}", nv);
        }
        // centers by repeated leaf stripping
        let mut degree: Vec<usize> = self.adj.iter().map(|a| a.len()).collect();
        let mut layer: Vec<usize> = (0..nv).filter(|&v| degree[v] <= 1).collect();
        let mut remaining = nv;
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for &v in &layer {
                for &w in &self.adj[v] {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
            layer = next;
        }
        layer
            .iter()
            .map(|&c| self.rooted_shape(c, NONE))
            .min()
            .unwrap()
    }

    fn rooted_shape(&self, v: usize, from: usize) -> String {
        let mut parts: Vec<String> = self.adj[v]
            .iter()
            .filter(|&&w| w != from)
            .map(|&w| self.rooted_shape(w, v))
            .collect();
        parts.sort();
        let mut s = String::from("(");
        for p in parts {
            s.push_str(&p);
        }
        s.push(')');
        s
    }
}
