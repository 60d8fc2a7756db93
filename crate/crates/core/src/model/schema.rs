//! Graphs, paths and categorical schemas.
//!
//! A schema is a finite graph together with a finite set of declared path
//! equivalences; the category it presents is the free category on the graph
//! modulo the congruence those equivalences generate.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub source: VertexId,
    pub target: VertexId,
}

/// A finite directed multigraph with named vertices and arrows.
///
/// Vertex names and arrow names live in separate namespaces, and each is
/// unique: arrows are named schema-wide, not per table.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    vertex_index: HashMap<String, VertexId>,
    arrow_index: HashMap<String, ArrowId>,
    outgoing: Vec<Vec<ArrowId>>,
    // position of each arrow inside its source's outgoing list
    slot: Vec<usize>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.arrows == other.arrows
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> Result<VertexId> {
        let name = name.into();
        if self.vertex_index.contains_key(&name) {
            return Err(Error::Duplicate { kind: "vertex", name });
        }
        let id = VertexId(self.vertices.len());
        self.vertex_index.insert(name.clone(), id);
        self.vertices.push(name);
        self.outgoing.push(Vec::new());
        Ok(id)
    }

    pub fn add_arrow(
        &mut self,
        name: impl Into<String>,
        source: VertexId,
        target: VertexId,
    ) -> Result<ArrowId> {
        let name = name.into();
        if self.arrow_index.contains_key(&name) {
            return Err(Error::Duplicate { kind: "arrow", name });
        }
        for v in [source, target] {
            if v.0 >= self.vertices.len() {
                return Err(Error::UnknownVertex(format!("#{}", v.0)));
            }
        }
        let id = ArrowId(self.arrows.len());
        self.arrow_index.insert(name.clone(), id);
        self.arrows.push(Arrow { name, source, target });
        self.slot.push(self.outgoing[source.0].len());
        self.outgoing[source.0].push(id);
        Ok(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn arrows(&self) -> impl Iterator<Item = ArrowId> + '_ {
        (0..self.arrows.len()).map(ArrowId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn arrow(&self, a: ArrowId) -> &Arrow {
        &self.arrows[a.0]
    }

    pub fn arrow_name(&self, a: ArrowId) -> &str {
        &self.arrows[a.0].name
    }

    pub fn source(&self, a: ArrowId) -> VertexId {
        self.arrows[a.0].source
    }

    pub fn target(&self, a: ArrowId) -> VertexId {
        self.arrows[a.0].target
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn arrow_by_name(&self, name: &str) -> Option<ArrowId> {
        self.arrow_index.get(name).copied()
    }

    /// Arrows leaving `v`, in declaration order.
    pub fn outgoing(&self, v: VertexId) -> &[ArrowId] {
        &self.outgoing[v.0]
    }

    /// Index of `a` within `outgoing(source(a))`.
    pub fn slot(&self, a: ArrowId) -> usize {
        self.slot[a.0]
    }
}

/// A head-to-tail sequence of arrows starting at `source`.
///
/// The empty sequence is the trivial path on `source`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub source: VertexId,
    pub arrows: Vec<ArrowId>,
}

impl Path {
    pub fn identity(v: VertexId) -> Self {
        Path {
            source: v,
            arrows: Vec::new(),
        }
    }

    pub fn new(source: VertexId, arrows: Vec<ArrowId>) -> Self {
        Path { source, arrows }
    }

    pub fn is_identity(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathEquivalence {
    pub lhs: Path,
    pub rhs: Path,
}

/// A categorical schema: a graph and a set of generating path equivalences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    name: String,
    graph: Graph,
    equations: Vec<PathEquivalence>,
}

impl Schema {
    pub fn new(name: impl Into<String>, graph: Graph) -> Self {
        Schema {
            name: name.into(),
            graph,
            equations: Vec::new(),
        }
    }

    /// Declares `lhs ≃ rhs`. Both must be valid paths with common endpoints.
    pub fn add_equation(&mut self, lhs: Path, rhs: Path) -> Result<()> {
        let lt = self.target(&lhs)?;
        let rt = self.target(&rhs)?;
        if lhs.source != rhs.source || lt != rt {
            return Err(Error::InvalidPath(format!(
                "equation sides `{}` and `{}` do not share endpoints",
                self.display_qualified(&lhs),
                self.display_qualified(&rhs)
            )));
        }
        self.equations.push(PathEquivalence { lhs, rhs });
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn equations(&self) -> &[PathEquivalence] {
        &self.equations
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        self.graph
            .vertex(name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn arrow(&self, name: &str) -> Result<ArrowId> {
        self.graph
            .arrow_by_name(name)
            .ok_or_else(|| Error::UnknownArrow(name.to_string()))
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        self.graph.vertex_name(v)
    }

    pub fn arrow_name(&self, a: ArrowId) -> &str {
        self.graph.arrow_name(a)
    }

    /// Builds a path from `source` by arrow names.
    pub fn path(&self, source: &str, arrows: &[&str]) -> Result<Path> {
        let source = self.vertex(source)?;
        let arrows = arrows
            .iter()
            .map(|a| self.arrow(a))
            .collect::<Result<Vec<_>>>()?;
        let p = Path { source, arrows };
        self.target(&p)?;
        Ok(p)
    }

    /// Target vertex of `p`, checking that it is head-to-tail.
    pub fn target(&self, p: &Path) -> Result<VertexId> {
        if p.source.0 >= self.graph.vertex_count() {
            return Err(Error::InvalidPath(format!("unknown source vertex #{}", p.source.0)));
        }
        let mut at = p.source;
        for &a in &p.arrows {
            if a.0 >= self.graph.arrow_count() {
                return Err(Error::InvalidPath(format!("unknown arrow #{}", a.0)));
            }
            if self.graph.source(a) != at {
                return Err(Error::InvalidPath(format!(
                    "arrow `{}` starts at `{}`, not at `{}`",
                    self.arrow_name(a),
                    self.vertex_name(self.graph.source(a)),
                    self.vertex_name(at)
                )));
            }
            at = self.graph.target(a);
        }
        Ok(at)
    }

    /// Target of a path already known to be valid.
    pub fn path_target(&self, p: &Path) -> VertexId {
        p.arrows
            .last()
            .map(|&a| self.graph.target(a))
            .unwrap_or(p.source)
    }

    /// Arrow names joined by `.`, or `id` for a trivial path.
    pub fn display_path(&self, p: &Path) -> String {
        if p.arrows.is_empty() {
            "id".to_string()
        } else {
            p.arrows
                .iter()
                .map(|&a| self.arrow_name(a))
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// `source.a1.a2...`
    pub fn display_qualified(&self, p: &Path) -> String {
        let mut s = self.graph.vertex_name(p.source).to_string();
        for &a in &p.arrows {
            s.push('.');
            s.push_str(self.arrow_name(a));
        }
        s
    }

    pub fn display_equation(&self, eq: &PathEquivalence) -> String {
        format!("{} = {}", self.display_path(&eq.lhs), self.display_path(&eq.rhs))
    }
}

/// Concatenates `p` then `q`.
pub fn compose_paths(schema: &Schema, p: &Path, q: &Path) -> Result<Path> {
    let end = schema.target(p)?;
    schema.target(q)?;
    if end != q.source {
        return Err(Error::Composition {
            left: schema.vertex_name(end).to_string(),
            right: schema.vertex_name(q.source).to_string(),
        });
    }
    let mut arrows = p.arrows.clone();
    arrows.extend_from_slice(&q.arrows);
    Ok(Path {
        source: p.source,
        arrows,
    })
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Convenience builder used by tests and generators.
#[derive(Debug)]
pub struct SchemaBuilder {
    schema: Schema,
}

impl SchemaBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        SchemaBuilder {
            schema: Schema::new(name, Graph::new()),
        }
    }

    pub fn vertex(mut self, name: &str) -> Result<Self> {
        self.schema.graph.add_vertex(name)?;
        Ok(self)
    }

    pub fn vertices(mut self, names: &[&str]) -> Result<Self> {
        for n in names {
            self.schema.graph.add_vertex(*n)?;
        }
        Ok(self)
    }

    pub fn arrow(mut self, name: &str, source: &str, target: &str) -> Result<Self> {
        let s = self.schema.vertex(source)?;
        let t = self.schema.vertex(target)?;
        self.schema.graph.add_arrow(name, s, t)?;
        Ok(self)
    }

    pub fn equation(mut self, source: &str, lhs: &[&str], rhs: &[&str]) -> Result<Self> {
        let l = self.schema.path(source, lhs)?;
        let r = self.schema.path(source, rhs)?;
        self.schema.add_equation(l, r)?;
        Ok(self)
    }

    pub fn build(self) -> Schema {
        self.schema
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn self_email() -> Schema {
        SchemaBuilder::new("SelfEmail")
            .vertices(&["A", "B", "C"])
            .unwrap()
            .arrow("f", "A", "B")
            .unwrap()
            .arrow("g", "B", "C")
            .unwrap()
            .arrow("h", "B", "C")
            .unwrap()
            .equation("A", &["f", "g"], &["f", "h"])
            .unwrap()
            .build()
    }

    #[test]
    fn trivial_path_is_a_unit() {
        let s = self_email();
        let q = s.path("A", &["f", "g"]).unwrap();
        let id_a = Path::identity(s.vertex("A").unwrap());
        let id_c = Path::identity(s.vertex("C").unwrap());
        assert_eq!(compose_paths(&s, &id_a, &q).unwrap(), q);
        assert_eq!(compose_paths(&s, &q, &id_c).unwrap(), q);
    }

    #[test]
    fn f_then_g_has_length_two() {
        let s = self_email();
        let f = s.path("A", &["f"]).unwrap();
        let g = s.path("B", &["g"]).unwrap();
        let fg = compose_paths(&s, &f, &g).unwrap();
        assert_eq!(fg.len(), 2);
        assert_eq!(s.display_path(&fg), "f.g");
        assert_eq!(s.display_qualified(&fg), "A.f.g");
    }

    #[test]
    fn composition_mismatch_names_both_vertices() {
        let s = self_email();
        let f = s.path("A", &["f"]).unwrap();
        let err = compose_paths(&s, &f, &f).unwrap_err();
        assert_eq!(
            err,
            Error::Composition {
                left: "B".into(),
                right: "A".into()
            }
        );
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let err = SchemaBuilder::new("X")
            .vertices(&["A", "A"])
            .unwrap_err();
        assert!(matches!(err, Error::Duplicate { kind: "vertex", .. }));
        let err = SchemaBuilder::new("X")
            .vertices(&["A", "B"])
            .unwrap()
            .arrow("f", "A", "B")
            .unwrap()
            .arrow("f", "B", "A")
            .unwrap_err();
        assert!(matches!(err, Error::Duplicate { kind: "arrow", .. }));
    }

    #[test]
    fn equation_endpoints_must_agree() {
        let err = SchemaBuilder::new("X")
            .vertices(&["A", "B"])
            .unwrap()
            .arrow("f", "A", "B")
            .unwrap()
            .equation("A", &["f"], &[])
            .unwrap_err();
        assert!(matches!(err, Error::InvalidPath(_)));
    }

    #[test]
    fn non_head_to_tail_path_is_invalid() {
        let s = self_email();
        assert!(s.path("A", &["g"]).is_err());
    }
}
