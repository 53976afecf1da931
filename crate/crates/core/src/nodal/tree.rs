use std::collections::VecDeque;

use super::label::NodalDecomposition;
use super::union_find::UnionFind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeRoot {
    Component(u32),
    /// Stands for all boundary-touching components, contracted to one vertex.
    Virtual,
}

/// Rooted tree on sign components; edges join components that share a
/// piece of the zero set.
#[derive(Debug, Clone)]
pub struct NestingTree {
    root: TreeRoot,
    component_count: usize,
    /// Node `component_count` is the virtual root when present.
    parent: Vec<Option<u32>>,
    children: Vec<Vec<u32>>,
    codes: Vec<String>,
}

impl NestingTree {
    pub fn root(&self) -> TreeRoot {
        self.root
    }

    fn root_node(&self) -> usize {
        match self.root {
            TreeRoot::Component(c) => c as usize,
            TreeRoot::Virtual => self.component_count,
        }
    }

    /// Number of sign components (the virtual root is not counted).
    pub fn vertex_count(&self) -> usize {
        self.component_count
    }

    /// Parent node; `None` for the root and for children of the virtual root.
    pub fn parent(&self, component: u32) -> Option<u32> {
        self.parent[component as usize].filter(|&p| (p as usize) < self.component_count)
    }

    pub fn children(&self, component: u32) -> &[u32] {
        &self.children[component as usize]
    }

    /// Children of the root, whether real or virtual.
    pub fn root_children(&self) -> &[u32] {
        &self.children[self.root_node()]
    }

    /// Canonical code of the whole tree: equal codes iff isomorphic rooted trees.
    pub fn code(&self) -> &str {
        &self.codes[self.root_node()]
    }

    /// Canonical code of the subtree hanging from `component`.
    pub fn subtree_code(&self, component: u32) -> &str {
        &self.codes[component as usize]
    }

    /// Number of components in `ids` whose descendant subtree has code `code`.
    pub fn count_matching<'a>(&self, ids: impl IntoIterator<Item = &'a u32>, code: &str) -> usize {
        ids.into_iter().filter(|&&c| self.subtree_code(c) == code).count()
    }

    /// Whether every node has at most one child.
    pub fn is_path(&self) -> bool {
        self.children.iter().all(|c| c.len() <= 1)
    }

    /// Number of real ancestors.
    pub fn depth_of(&self, component: u32) -> usize {
        let mut d = 0;
        let mut c = component;
        while let Some(p) = self.parent(c) {
            d += 1;
            c = p;
        }
        d
    }
}

/// Builds the nesting tree from the adjacency of a decomposition.
///
/// With one boundary-touching component it is the root. With several, they
/// are contracted into a virtual root. A cycle in the adjacency graph means
/// the sample is too coarse or degenerate.
pub fn build_nesting_tree(dec: &NodalDecomposition) -> Result<NestingTree> {
    let n = dec.total_count();
    let mut uf = UnionFind::new(n);
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n];
    for a in dec.adjacency() {
        if !uf.union(a.positive, a.negative) {
            return Err(Error::DegenerateSample(format!(
                "component adjacency has a cycle through components {} and {}",
                a.positive, a.negative
            )));
        }
        neighbors[a.positive as usize].push(a.negative);
        neighbors[a.negative as usize].push(a.positive);
    }
    let boundary: Vec<u32> = dec
        .components()
        .iter()
        .filter(|c| c.touches_boundary)
        .map(|c| c.id)
        .collect();
    let (root, sources): (TreeRoot, Vec<u32>) = match boundary.len() {
        0 => {
            let largest = dec.components().iter().max_by_key(|c| (c.size, std::cmp::Reverse(c.id)));
            let id = largest.map(|c| c.id).unwrap_or(0);
            (TreeRoot::Component(id), vec![id])
        }
        1 => (TreeRoot::Component(boundary[0]), boundary.clone()),
        _ => (TreeRoot::Virtual, boundary.clone()),
    };
    let virtual_node = n as u32;
    let mut parent: Vec<Option<u32>> = vec![None; n + 1];
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
    let mut visited = vec![false; n];
    let mut order: Vec<u32> = Vec::with_capacity(n + 1);
    let mut queue = VecDeque::new();
    for &s in &sources {
        visited[s as usize] = true;
    }
    if root == TreeRoot::Virtual {
        order.push(virtual_node);
    }
    for &s in &sources {
        order.push(s);
        queue.push_back(s);
    }
    let is_source = |c: u32| root == TreeRoot::Virtual && dec.component(c).touches_boundary;
    while let Some(v) = queue.pop_front() {
        for &w in &neighbors[v as usize] {
            if visited[w as usize] {
                continue;
            }
            if is_source(w) {
                continue;
            }
            visited[w as usize] = true;
            let p = if is_source(v) { virtual_node } else { v };
            parent[w as usize] = Some(p);
            children[p as usize].push(w);
            order.push(w);
            queue.push_back(w);
        }
    }
    if visited.iter().any(|&b| !b) {
        return Err(Error::DegenerateSample("component adjacency graph is disconnected".into()));
    }
    for c in &mut children {
        c.sort_unstable();
    }

    let mut codes = vec![String::new(); n + 1];
    for &v in order.iter().rev() {
        let mut child_codes: Vec<&str> = children[v as usize].iter().map(|&c| codes[c as usize].as_str()).collect();
        child_codes.sort_unstable();
        let mut code = String::with_capacity(2 + child_codes.iter().map(|c| c.len()).sum::<usize>());
        code.push('(');
        for c in child_codes {
            code.push_str(c);
        }
        code.push(')');
        codes[v as usize] = code;
    }
    if root == TreeRoot::Virtual {
        for &s in &sources {
            codes[s as usize].clear();
        }
    }
    if root != TreeRoot::Virtual {
        parent.truncate(n);
        children.truncate(n);
        codes.truncate(n);
    }
    Ok(NestingTree {
        root,
        component_count: n,
        parent,
        children,
        codes,
    })
}
