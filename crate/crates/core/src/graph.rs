//! Finite metric graphs with a free fundamental group.
//!
//! A graph is stored as a multigraph (loops and parallel edges allowed)
//! with exact edge lengths. A breadth-first spanning tree from the
//! basepoint fixes a free basis: one generator per chord, oriented along
//! the chord's stored direction. Elements of the fundamental group are
//! `Word`s over these generators; geometric lengths come from reduced edge
//! paths in the graph.
//!
//! Text format, one declaration per line (`#` starts a comment):
//!
//! ```text
//! v a
//! v b
//! e left  a a 3
//! e right b b 2*pi
//! e bar   a b 1/2
//! base a
//! ```

use crate::expr::{parse_length, ExprError};
use crate::value::Value;
use crate::word::{Letter, Word};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Length {
        line: usize,
        #[source]
        source: ExprError,
    },
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
    #[error("edge `{0}` has non-positive length")]
    BadLength(String),
}

/// Oriented edge: `2*edge` runs along the stored direction, `2*edge + 1`
/// against it.
pub type DartId = usize;

#[derive(Debug, Clone)]
pub struct Edge {
    pub name: String,
    pub ends: (usize, usize),
    pub length: Value,
}

#[derive(Debug, Clone)]
pub struct MetricGraph {
    vertex_names: Vec<String>,
    vidx: HashMap<String, usize>,
    edges: Vec<Edge>,
    eidx: HashMap<String, usize>,
    base: usize,
    out_darts: Vec<Vec<DartId>>,
    /// For each non-base vertex, the dart leading one step toward the base.
    tree_parent_dart: Vec<Option<DartId>>,
    is_tree_edge: Vec<bool>,
    /// generator index -> chord edge.
    gens: Vec<usize>,
    gen_of_edge: Vec<Option<u32>>,
}

impl MetricGraph {
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, String, Value)>,
        base: Option<String>,
    ) -> Result<MetricGraph, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut vidx = HashMap::new();
        for (i, name) in vertices.iter().enumerate() {
            if vidx.insert(name.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(name.clone()));
            }
        }
        let mut eidx = HashMap::new();
        let mut edge_list = Vec::with_capacity(edges.len());
        for (name, u, v, length) in edges {
            let ui = *vidx.get(&u).ok_or_else(|| GraphError::UnknownVertex(u.clone()))?;
            let vi = *vidx.get(&v).ok_or_else(|| GraphError::UnknownVertex(v.clone()))?;
            if !(length.to_f64() > 0.0) {
                return Err(GraphError::BadLength(name));
            }
            if eidx.insert(name.clone(), edge_list.len()).is_some() {
                return Err(GraphError::DuplicateEdge(name));
            }
            edge_list.push(Edge { name, ends: (ui, vi), length });
        }
        let base = match base {
            Some(name) => *vidx.get(&name).ok_or(GraphError::UnknownVertex(name))?,
            None => 0,
        };

        let n = vertices.len();
        let mut out_darts = vec![Vec::new(); n];
        for (e, edge) in edge_list.iter().enumerate() {
            out_darts[edge.ends.0].push(2 * e);
            out_darts[edge.ends.1].push(2 * e + 1);
        }

        let mut g = MetricGraph {
            vertex_names: vertices,
            vidx,
            edges: edge_list,
            eidx,
            base,
            out_darts,
            tree_parent_dart: vec![None; n],
            is_tree_edge: Vec::new(),
            gens: Vec::new(),
            gen_of_edge: Vec::new(),
        };
        g.build_tree()?;
        Ok(g)
    }

    fn build_tree(&mut self) -> Result<(), GraphError> {
        let n = self.vertex_names.len();
        self.is_tree_edge = vec![false; self.edges.len()];
        self.gen_of_edge = vec![None; self.edges.len()];
        let mut seen = vec![false; n];
        seen[self.base] = true;
        let mut queue = std::collections::VecDeque::from([self.base]);
        while let Some(v) = queue.pop_front() {
            for &d in &self.out_darts[v] {
                let w = self.dart_dst(d);
                if !seen[w] {
                    seen[w] = true;
                    self.is_tree_edge[d / 2] = true;
                    self.tree_parent_dart[w] = Some(reverse(d));
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(GraphError::Disconnected);
        }
        for (e, &tree) in self.is_tree_edge.iter().enumerate() {
            if !tree {
                self.gen_of_edge[e] = Some(self.gens.len() as u32);
                self.gens.push(e);
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<MetricGraph, GraphError> {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut base = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut fields = content.split_whitespace();
            match fields.next().unwrap() {
                "v" => {
                    let name = fields
                        .next()
                        .ok_or_else(|| GraphError::Parse { line, msg: "v needs a name".into() })?;
                    if fields.next().is_some() {
                        return Err(GraphError::Parse { line, msg: "v takes one name".into() });
                    }
                    vertices.push(name.to_string());
                }
                "e" => {
                    let name = fields.next();
                    let u = fields.next();
                    let v = fields.next();
                    let rest: Vec<&str> = fields.collect();
                    let (Some(name), Some(u), Some(v)) = (name, u, v) else {
                        return Err(GraphError::Parse {
                            line,
                            msg: "e needs: name endpoint endpoint length".into(),
                        });
                    };
                    if rest.is_empty() {
                        return Err(GraphError::Parse { line, msg: "edge needs a length".into() });
                    }
                    let length = parse_length(&rest.join(" "))
                        .map_err(|source| GraphError::Length { line, source })?;
                    edges.push((name.to_string(), u.to_string(), v.to_string(), length));
                }
                "base" => {
                    let name = fields
                        .next()
                        .ok_or_else(|| GraphError::Parse { line, msg: "base needs a vertex".into() })?;
                    base = Some(name.to_string());
                }
                other => {
                    return Err(GraphError::Parse {
                        line,
                        msg: format!("unknown declaration `{other}`"),
                    })
                }
            }
        }
        MetricGraph::new(vertices, edges, base)
    }

    /// Circle of the given circumference: one vertex, one loop edge.
    pub fn circle(circumference: Value) -> MetricGraph {
        MetricGraph::new(
            vec!["o".into()],
            vec![("c".into(), "o".into(), "o".into(), circumference)],
            None,
        )
        .unwrap()
    }

    /// Wedge of circles at a single vertex, one loop per length.
    pub fn wedge_of_circles(circumferences: &[Value]) -> MetricGraph {
        let edges = circumferences
            .iter()
            .enumerate()
            .map(|(i, c)| (format!("c{}", i + 1), "o".into(), "o".into(), c.clone()))
            .collect();
        MetricGraph::new(vec!["o".into()], edges, None).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vidx.get(name).copied()
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.eidx.get(name).copied()
    }

    /// Generator names are the chord edges' names.
    pub fn gen_name(&self, g: u32) -> &str {
        &self.edges[self.gens[g as usize]].name
    }

    pub fn chord_of_gen(&self, g: u32) -> usize {
        self.gens[g as usize]
    }

    pub fn gen_of_edge(&self, e: usize) -> Option<u32> {
        self.gen_of_edge[e]
    }

    pub fn resolve_gen(&self, name: &str) -> Option<u32> {
        self.eidx.get(name).and_then(|&e| self.gen_of_edge[e])
    }

    pub fn min_edge_length(&self) -> Option<&Value> {
        self.edges
            .iter()
            .map(|e| &e.length)
            .min_by(|a, b| Value::cmp_val(a, b))
    }

    pub fn dart_src(&self, d: DartId) -> usize {
        let ends = self.edges[d / 2].ends;
        if d % 2 == 0 {
            ends.0
        } else {
            ends.1
        }
    }

    pub fn dart_dst(&self, d: DartId) -> usize {
        let ends = self.edges[d / 2].ends;
        if d % 2 == 0 {
            ends.1
        } else {
            ends.0
        }
    }

    pub fn dart_length(&self, d: DartId) -> &Value {
        &self.edges[d / 2].length
    }

    pub fn out_darts(&self, v: usize) -> &[DartId] {
        &self.out_darts[v]
    }

    pub fn num_darts(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.is_tree_edge[e]
    }

    /// Darts from `v` to the basepoint along the spanning tree.
    pub fn tree_path_to_base(&self, mut v: usize) -> Vec<DartId> {
        let mut path = Vec::new();
        while let Some(d) = self.tree_parent_dart[v] {
            path.push(d);
            v = self.dart_dst(d);
        }
        path
    }

    /// The based loop of a generator: tree to the chord's tail, the chord,
    /// tree back home.
    fn gen_loop(&self, g: u32) -> Vec<DartId> {
        let e = self.gens[g as usize];
        let (u, v) = self.edges[e].ends;
        let mut path: Vec<DartId> =
            self.tree_path_to_base(u).into_iter().rev().map(reverse).collect();
        path.push(2 * e);
        path.extend(self.tree_path_to_base(v));
        path
    }

    /// Reduced edge path of a based loop representing `w`.
    pub fn word_to_path(&self, w: &Word) -> Vec<DartId> {
        let mut path: Vec<DartId> = Vec::new();
        for letter in w.letters() {
            let seg = self.gen_loop(letter.gen);
            let iter: Box<dyn Iterator<Item = DartId>> = if letter.inverse {
                Box::new(seg.into_iter().rev().map(reverse))
            } else {
                Box::new(seg.into_iter())
            };
            for d in iter {
                if path.last() == Some(&reverse(d)) {
                    path.pop();
                } else {
                    path.push(d);
                }
            }
        }
        path
    }

    /// Collapse the spanning tree: a closed path based anywhere maps to a
    /// word in the chord generators (conjugated appropriately when not
    /// based at the basepoint, which does not matter for conjugacy data).
    pub fn path_to_word(&self, path: &[DartId]) -> Word {
        let letters: Vec<Letter> = path
            .iter()
            .filter_map(|&d| {
                self.gen_of_edge[d / 2].map(|g| {
                    if d % 2 == 0 {
                        Letter::new(g)
                    } else {
                        Letter::inv(g)
                    }
                })
            })
            .collect();
        Word::from_letters(letters)
    }

    fn path_length(&self, path: &[DartId]) -> Value {
        let mut total = Value::zero();
        for &d in path {
            total = total.add(self.dart_length(d));
        }
        total
    }

    /// Distance the deck transformation of `w` moves the base lift:
    /// the length of the reduced based representative.
    pub fn based_length(&self, w: &Word) -> Value {
        self.path_length(&self.word_to_path(w))
    }

    /// The immersed cyclic representative of `w`'s conjugacy class.
    pub fn cyclic_core_path(&self, w: &Word) -> Vec<DartId> {
        let mut path = self.word_to_path(w);
        let mut lo = 0;
        while path.len() >= lo + 2 && path[lo] == reverse(path[path.len() - 1]) {
            path.pop();
            lo += 1;
        }
        path.drain(..lo);
        path
    }

    /// Minimal displacement of `w` acting on the universal cover; zero only
    /// for the identity.
    pub fn translation_length(&self, w: &Word) -> Value {
        self.path_length(&self.cyclic_core_path(w))
    }

    /// Length of the shortest closed geodesic, `None` on trees. Every
    /// minimal immersed cycle is edge-simple, so it is the minimum over
    /// edges of (edge length + distance between its ends avoiding it).
    pub fn shortest_essential_loop(&self) -> Option<Value> {
        let mut best: Option<Value> = None;
        for (e, edge) in self.edges.iter().enumerate() {
            let (u, v) = edge.ends;
            let cycle = if u == v {
                edge.length.clone()
            } else {
                match self.distance_avoiding(u, v, e) {
                    Some(d) => d.add(&edge.length),
                    None => continue,
                }
            };
            if best.as_ref().is_none_or(|b| cycle.cmp_val(b) == std::cmp::Ordering::Less) {
                best = Some(cycle);
            }
        }
        best
    }

    /// Exact Dijkstra from `from` to `to` skipping one edge.
    fn distance_avoiding(&self, from: usize, to: usize, skip_edge: usize) -> Option<Value> {
        let n = self.vertex_names.len();
        let mut dist: Vec<Option<Value>> = vec![None; n];
        let mut done = vec![false; n];
        dist[from] = Some(Value::zero());
        loop {
            let mut cur: Option<usize> = None;
            for v in 0..n {
                if done[v] || dist[v].is_none() {
                    continue;
                }
                if cur.is_none_or(|c| {
                    dist[v].as_ref().unwrap().cmp_val(dist[c].as_ref().unwrap())
                        == std::cmp::Ordering::Less
                }) {
                    cur = Some(v);
                }
            }
            let Some(v) = cur else { return None };
            if v == to {
                return dist[v].clone();
            }
            done[v] = true;
            for &d in &self.out_darts[v] {
                if d / 2 == skip_edge {
                    continue;
                }
                let nd = dist[v].as_ref().unwrap().add(self.dart_length(d));
                let w = self.dart_dst(d);
                if dist[w].as_ref().is_none_or(|old| nd.cmp_val(old) == std::cmp::Ordering::Less) {
                    dist[w] = Some(nd);
                }
            }
        }
    }

    /// Replace one edge by a chain of `parts` edges of equal length.
    pub fn subdivide_edge(&self, edge_name: &str, parts: usize) -> Result<MetricGraph, GraphError> {
        assert!(parts >= 1);
        let target = self.eidx.get(edge_name).copied().ok_or_else(|| GraphError::Parse {
            line: 0,
            msg: format!("no edge `{edge_name}`"),
        })?;
        let mut vertices = self.vertex_names.clone();
        let mut edges: Vec<(String, String, String, Value)> = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            let u = self.vertex_names[edge.ends.0].clone();
            let v = self.vertex_names[edge.ends.1].clone();
            if e != target || parts == 1 {
                edges.push((edge.name.clone(), u, v, edge.length.clone()));
                continue;
            }
            let piece = edge.length.div(&Value::from_int(parts as i64));
            let mut prev = u;
            for k in 1..=parts {
                let next = if k == parts {
                    v.clone()
                } else {
                    let name = format!("{}_cut{k}", edge.name);
                    vertices.push(name.clone());
                    name
                };
                edges.push((format!("{}_seg{k}", edge.name), prev, next.clone(), piece.clone()));
                prev = next;
            }
        }
        MetricGraph::new(vertices, edges, Some(self.vertex_names[self.base].clone()))
    }

    /// Parse a word over this graph's generators (chord edge names).
    pub fn parse_group_word(&self, s: &str) -> Result<Word, String> {
        crate::word::parse_word(s, |name| self.resolve_gen(name))
    }

    pub fn display_word(&self, w: &Word) -> String {
        w.display_with(|g| self.gen_name(g).to_string())
    }
}

pub fn reverse(d: DartId) -> DartId {
    d ^ 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn barbell() -> MetricGraph {
        // Loops of length 1 and 2 joined by a bar of length 2.
        MetricGraph::parse(
            "v a\nv b\ne p a a 1\ne q b b 2\ne bar a b 2\nbase a\n",
        )
        .unwrap()
    }

    #[test]
    fn barbell_lengths() {
        let g = barbell();
        assert_eq!(g.rank(), 2);
        let p = g.parse_group_word("p").unwrap();
        let q = g.parse_group_word("q").unwrap();
        assert_eq!(g.translation_length(&p), Value::from_int(1));
        assert_eq!(g.translation_length(&q), Value::from_int(2));
        // Based length picks up the bar twice; translation length does not.
        assert_eq!(g.based_length(&q), Value::from_int(6));
        // p q travels loop, bar, loop, bar.
        let pq = p.concat(&q);
        assert_eq!(g.translation_length(&pq), Value::from_int(7));
        assert_eq!(g.based_length(&pq), Value::from_int(7));
        // Conjugation does not change translation length.
        let conj = pq.conjugate_by(&p); // p^2 q p^-1
        assert_eq!(g.translation_length(&conj), Value::from_int(7));
        assert_eq!(g.based_length(&conj), Value::from_int(9));
    }

    #[test]
    fn figure_eight_pi_lengths() {
        let g = MetricGraph::wedge_of_circles(&[Value::pi_times(3, 1), Value::pi_times(4, 1)]);
        let a = g.parse_group_word("c1").unwrap();
        let b = g.parse_group_word("c2").unwrap();
        assert_eq!(g.translation_length(&a.concat(&b)), Value::pi_times(7, 1));
        let comm = a.concat(&b).concat(&a.inverse()).concat(&b.inverse());
        assert_eq!(g.translation_length(&comm), Value::pi_times(14, 1));
        // Powers scale.
        assert_eq!(g.translation_length(&a.pow(3)), Value::pi_times(9, 1));
    }

    #[test]
    fn word_path_round_trip() {
        let g = barbell();
        for s in ["p", "q^-1", "p q", "p q^-1 p^-1", "p^3 q^2"] {
            let w = g.parse_group_word(s).unwrap();
            let path = g.word_to_path(&w);
            assert_eq!(g.path_to_word(&path), w, "{s}");
        }
    }

    #[test]
    fn identity_has_zero_length() {
        let g = barbell();
        let id = g.parse_group_word("1").unwrap();
        assert!(g.translation_length(&id).is_zero());
        assert!(g.based_length(&id).is_zero());
    }

    #[test]
    fn subdivision_preserves_circle_length() {
        let g = MetricGraph::circle(Value::from_int(3));
        let sub = g.subdivide_edge("c", 3).unwrap();
        assert_eq!(sub.rank(), 1);
        assert_eq!(sub.num_vertices(), 3);
        let w = Word::generator(0);
        assert_eq!(sub.translation_length(&w), Value::from_int(3));
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(
            MetricGraph::parse("v a\ne x a b 1\n"),
            Err(GraphError::UnknownVertex(_))
        ));
        assert!(matches!(
            MetricGraph::parse("v a\nv b\ne x a a 1\n"),
            Err(GraphError::Disconnected)
        ));
        assert!(MetricGraph::parse("v a\ne x a a 0\n").is_err());
        assert!(MetricGraph::parse("v a\nv a\n").is_err());
        assert!(MetricGraph::parse("hello\n").is_err());
    }

    #[test]
    fn expression_lengths_parse() {
        let g = MetricGraph::parse("v o\ne c o o 2*pi # circle\nbase o\n").unwrap();
        assert_eq!(g.edges()[0].length, Value::pi_times(2, 1));
    }
}
