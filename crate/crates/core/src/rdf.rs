//! Flattening instances into subject-predicate-object triples and back.
//!
//! Every row becomes a node named `vertex/row` and every cell becomes one
//! triple whose predicate is the column's arrow. The schema types the store:
//! subjects of a predicate live at its source vertex and objects at its
//! target.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use percent_encoding::{utf8_percent_encode, AsciiSet, CONTROLS};

use crate::error::{Error, Result};
use crate::model::instance::Instance;
use crate::model::schema::{ArrowId, Schema, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub vertex: VertexId,
    pub row: String,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Node,
    pub predicate: ArrowId,
    pub object: Node,
}

/// Nodes typed by schema vertices and triples typed by schema arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleStore {
    schema: Arc<Schema>,
    /// Nodes in table order.
    nodes: Vec<Node>,
    triples: Vec<Triple>,
}

impl TripleStore {
    /// Builds a store, checking that every triple is well typed.
    pub fn new(schema: Arc<Schema>, nodes: Vec<Node>, triples: Vec<Triple>) -> Result<Self> {
        let g = schema.graph();
        let known: BTreeSet<&Node> = nodes.iter().collect();
        for t in &triples {
            let a = t.predicate;
            if a.0 >= g.arrow_count() {
                return Err(Error::IllTypedTriple(format!("unknown predicate #{}", a.0)));
            }
            for (end, want) in [(&t.subject, g.source(a)), (&t.object, g.target(a))] {
                if end.vertex != want {
                    return Err(Error::IllTypedTriple(format!(
                        "`{}` has type `{}` but predicate `{}` needs `{}`",
                        node_id(&schema, end),
                        schema.vertex_name(end.vertex),
                        g.arrow_name(a),
                        schema.vertex_name(want)
                    )));
                }
                if !known.contains(end) {
                    return Err(Error::IllTypedTriple(format!(
                        "`{}` is not a node of the store",
                        node_id(&schema, end)
                    )));
                }
            }
        }
        Ok(TripleStore {
            schema,
            nodes,
            triples,
        })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Removes every triple matching `pred`.
    pub fn without(&self, pred: impl Fn(&Triple) -> bool) -> Self {
        TripleStore {
            schema: self.schema.clone(),
            nodes: self.nodes.clone(),
            triples: self.triples.iter().filter(|t| !pred(t)).cloned().collect(),
        }
    }

    /// Node id as `vertex/row`.
    pub fn node_id(&self, n: &Node) -> String {
        node_id(&self.schema, n)
    }
}

fn node_id(schema: &Schema, n: &Node) -> String {
    format!("{}/{}", schema.vertex_name(n.vertex), n.row)
}

/// One node per row and one triple per cell.
pub fn grothendieck(i: &Instance) -> TripleStore {
    let schema = i.schema().clone();
    let g = schema.graph();
    let mut nodes = Vec::with_capacity(i.total_rows());
    for v in g.vertices() {
        for r in i.rows(v) {
            nodes.push(Node {
                vertex: v,
                row: r.clone(),
            });
        }
    }
    let mut triples = Vec::new();
    for v in g.vertices() {
        for r in 0..i.row_count(v) {
            for &a in g.outgoing(v) {
                let w = g.target(a);
                triples.push(Triple {
                    subject: Node {
                        vertex: v,
                        row: i.row_id(v, r).to_string(),
                    },
                    predicate: a,
                    object: Node {
                        vertex: w,
                        row: i.row_id(w, i.apply(a, r)).to_string(),
                    },
                });
            }
        }
    }
    TripleStore {
        schema,
        nodes,
        triples,
    }
}

/// Rebuilds the instance whose tables are the nodes of each type.
///
/// Every node needs exactly one triple for each arrow out of its type.
pub fn ungrothendieck(s: &TripleStore) -> Result<Instance> {
    let schema = s.schema.clone();
    let g = schema.graph();
    let mut rows: Vec<Vec<String>> = vec![Vec::new(); g.vertex_count()];
    let mut position: Vec<BTreeMap<&str, usize>> = vec![BTreeMap::new(); g.vertex_count()];
    for n in &s.nodes {
        let table = &mut position[n.vertex.0];
        if table.contains_key(n.row.as_str()) {
            continue;
        }
        table.insert(&n.row, rows[n.vertex.0].len());
        rows[n.vertex.0].push(n.row.clone());
    }
    let mut cells: Vec<Vec<Option<usize>>> = g
        .arrows()
        .map(|a| vec![None; rows[g.source(a).0].len()])
        .collect();
    for t in &s.triples {
        let a = t.predicate;
        let i = position[t.subject.vertex.0][t.subject.row.as_str()];
        let j = position[t.object.vertex.0][t.object.row.as_str()];
        let cell = &mut cells[a.0][i];
        if cell.is_some() {
            return Err(Error::DuplicatePredicate {
                node: node_id(&schema, &t.subject),
                arrow: g.arrow_name(a).to_string(),
            });
        }
        *cell = Some(j);
    }
    let mut columns = Vec::with_capacity(g.arrow_count());
    for a in g.arrows() {
        let v = g.source(a);
        let col = cells[a.0]
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| Error::MissingTriple {
                    node: node_id(
                        &schema,
                        &Node {
                            vertex: v,
                            row: rows[v.0][i].clone(),
                        },
                    ),
                    arrow: g.arrow_name(a).to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        columns.push(col);
    }
    Instance::from_parts(schema, rows, columns)
}

// Everything outside RFC 3986 unreserved characters and `/` is escaped.
const IRI: &AsciiSet = &CONTROLS
    .add(b' ')
    .add(b'"')
    .add(b'#')
    .add(b'%')
    .add(b'<')
    .add(b'>')
    .add(b'?')
    .add(b'[')
    .add(b'\\')
    .add(b']')
    .add(b'^')
    .add(b'`')
    .add(b'{')
    .add(b'|')
    .add(b'}');

fn iri(base: &str, local: &str) -> String {
    format!("<{base}/{}>", utf8_percent_encode(local, IRI))
}

/// One `<base/s> <base/p> <base/o> .` line per triple, sorted.
pub fn export_triples(s: &TripleStore, base: &str) -> String {
    let base = base.trim_end_matches('/');
    let g = s.schema.graph();
    let mut lines: Vec<String> = s
        .triples
        .iter()
        .map(|t| {
            format!(
                "{} {} {} .",
                iri(base, &s.node_id(&t.subject)),
                iri(base, g.arrow_name(t.predicate)),
                iri(base, &s.node_id(&t.object))
            )
        })
        .collect();
    lines.sort();
    let mut out = String::new();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}
