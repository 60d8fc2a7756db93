//! Instances: one table of rows per vertex and one total column per arrow.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::schema::{ArrowId, Path, Schema, VertexId};

/// A set-valued functor on a schema, stored as tables.
///
/// Rows are identified by opaque strings that are unique per vertex. Internally
/// each row is addressed by its position in the table and every column is a
/// vector of target positions, so construction guarantees totality and
/// foreign-key closure. Equation satisfaction is checked separately by
/// [`validate_instance`].
#[derive(Clone, Debug)]
pub struct Instance {
    schema: Arc<Schema>,
    rows: Vec<Vec<String>>,
    index: Vec<HashMap<String, usize>>,
    columns: Vec<Vec<usize>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.schema, &other.schema) || self.schema == other.schema)
            && self.rows == other.rows
            && self.columns == other.columns
    }
}

impl Eq for Instance {}

impl Instance {
    /// The instance with every table empty.
    pub fn empty(schema: Arc<Schema>) -> Self {
        let nv = schema.graph().vertex_count();
        let na = schema.graph().arrow_count();
        Instance {
            schema,
            rows: vec![Vec::new(); nv],
            index: vec![HashMap::new(); nv],
            columns: vec![Vec::new(); na],
        }
    }

    /// Builds an instance from row ids per vertex and target positions per arrow.
    pub fn from_parts(
        schema: Arc<Schema>,
        rows: Vec<Vec<String>>,
        columns: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let g = schema.graph();
        if rows.len() != g.vertex_count() {
            return Err(Error::MalformedInstance(format!(
                "expected {} tables, got {}",
                g.vertex_count(),
                rows.len()
            )));
        }
        if columns.len() != g.arrow_count() {
            return Err(Error::MalformedInstance(format!(
                "expected {} columns, got {}",
                g.arrow_count(),
                columns.len()
            )));
        }
        let mut index = Vec::with_capacity(rows.len());
        for (v, table) in rows.iter().enumerate() {
            let mut map = HashMap::with_capacity(table.len());
            for (i, id) in table.iter().enumerate() {
                if map.insert(id.clone(), i).is_some() {
                    return Err(Error::Duplicate {
                        kind: "row",
                        name: format!("{}.{}", g.vertex_name(VertexId(v)), id),
                    });
                }
            }
            index.push(map);
        }
        for a in g.arrows() {
            let (s, t) = (g.source(a), g.target(a));
            let col = &columns[a.0];
            if col.len() != rows[s.0].len() {
                return Err(Error::MalformedInstance(format!(
                    "column `{}` has {} entries but table `{}` has {} rows",
                    g.arrow_name(a),
                    col.len(),
                    g.vertex_name(s),
                    rows[s.0].len()
                )));
            }
            if let Some((i, _)) = col.iter().enumerate().find(|(_, &x)| x >= rows[t.0].len()) {
                return Err(Error::MalformedInstance(format!(
                    "column `{}` of row `{}` points outside table `{}`",
                    g.arrow_name(a),
                    rows[s.0][i],
                    g.vertex_name(t)
                )));
            }
        }
        Ok(Instance {
            schema,
            rows,
            index,
            columns,
        })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn rows(&self, v: VertexId) -> &[String] {
        &self.rows[v.0]
    }

    pub fn row_count(&self, v: VertexId) -> usize {
        self.rows[v.0].len()
    }

    pub fn total_rows(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row_id(&self, v: VertexId, i: usize) -> &str {
        &self.rows[v.0][i]
    }

    pub fn row_index(&self, v: VertexId, id: &str) -> Option<usize> {
        self.index[v.0].get(id).copied()
    }

    /// Looks up a row, failing with [`Error::UnknownRow`].
    pub fn require_row(&self, v: VertexId, id: &str) -> Result<usize> {
        self.row_index(v, id).ok_or_else(|| Error::UnknownRow {
            vertex: self.schema.vertex_name(v).to_string(),
            row: id.to_string(),
        })
    }

    pub fn column(&self, a: ArrowId) -> &[usize] {
        &self.columns[a.0]
    }

    pub fn apply(&self, a: ArrowId, i: usize) -> usize {
        self.columns[a.0][i]
    }

    /// Follows `arrows` from row position `i`.
    pub fn follow(&self, arrows: &[ArrowId], i: usize) -> usize {
        arrows.iter().fold(i, |r, &a| self.columns[a.0][r])
    }

    /// Row ids of each table, for use with [`Instance::from_parts`].
    pub fn tables(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    /// Same tables with column `a` of row `i` redirected to row `to`.
    pub fn with_cell(&self, a: ArrowId, i: usize, to: usize) -> Result<Self> {
        let mut columns = self.columns.clone();
        columns[a.0][i] = to;
        Instance::from_parts(self.schema.clone(), self.rows.clone(), columns)
    }

    /// Same tables and columns over an equal schema value.
    pub fn reattach(&self, schema: Arc<Schema>) -> Result<Self> {
        if *schema != *self.schema {
            return Err(Error::SchemaMismatch {
                expected: schema.name().to_string(),
                found: self.schema.name().to_string(),
            });
        }
        Ok(Instance {
            schema,
            ..self.clone()
        })
    }
}

/// Builds an instance by names, resolving column targets at the end.
#[derive(Debug)]
pub struct InstanceBuilder {
    schema: Arc<Schema>,
    rows: Vec<Vec<String>>,
    cells: Vec<Vec<Option<String>>>,
}

impl InstanceBuilder {
    pub fn new(schema: Arc<Schema>) -> Self {
        let nv = schema.graph().vertex_count();
        let na = schema.graph().arrow_count();
        InstanceBuilder {
            schema,
            rows: vec![Vec::new(); nv],
            cells: vec![Vec::new(); na],
        }
    }

    /// Adds a row with `(arrow, target-row)` cells.
    pub fn row(mut self, table: &str, id: &str, cells: &[(&str, &str)]) -> Result<Self> {
        let v = self.schema.vertex(table)?;
        let pos = self.rows[v.0].len();
        self.rows[v.0].push(id.to_string());
        for &a in self.schema.graph().outgoing(v) {
            self.cells[a.0].push(None);
        }
        for (arrow, target) in cells {
            let a = self.schema.arrow(arrow)?;
            if self.schema.graph().source(a) != v {
                return Err(Error::MalformedInstance(format!(
                    "arrow `{arrow}` is not a column of table `{table}`"
                )));
            }
            self.cells[a.0][pos] = Some(target.to_string());
        }
        Ok(self)
    }

    /// Adds bare rows to a table without columns.
    pub fn leaf(mut self, table: &str, ids: &[&str]) -> Result<Self> {
        for id in ids {
            self = self.row(table, id, &[])?;
        }
        Ok(self)
    }

    pub fn build(self) -> Result<Instance> {
        let g = self.schema.graph();
        let index: Vec<HashMap<&str, usize>> = self
            .rows
            .iter()
            .map(|t| t.iter().enumerate().map(|(i, r)| (r.as_str(), i)).collect())
            .collect();
        let mut columns = Vec::with_capacity(g.arrow_count());
        for a in g.arrows() {
            let (s, t) = (g.source(a), g.target(a));
            let mut col = Vec::with_capacity(self.cells[a.0].len());
            for (i, cell) in self.cells[a.0].iter().enumerate() {
                let row = &self.rows[s.0][i];
                let target = cell.as_ref().ok_or_else(|| {
                    Error::MalformedInstance(format!(
                        "row `{row}` of table `{}` has no value for column `{}`",
                        g.vertex_name(s),
                        g.arrow_name(a)
                    ))
                })?;
                let j = index[t.0].get(target.as_str()).ok_or_else(|| {
                    Error::MalformedInstance(format!(
                        "column `{}` of row `{row}` refers to `{target}`, which is not a row of table `{}`",
                        g.arrow_name(a),
                        g.vertex_name(t)
                    ))
                })?;
                col.push(*j);
            }
            columns.push(col);
        }
        Instance::from_parts(self.schema, self.rows, columns)
    }
}

/// Applies each arrow of `p` in order, starting from row `r`.
pub fn evaluate_path(instance: &Instance, p: &Path, r: &str) -> Result<String> {
    instance.schema.target(p)?;
    let i = instance.require_row(p.source, r)?;
    let j = instance.follow(&p.arrows, i);
    Ok(instance
        .row_id(instance.schema.path_target(p), j)
        .to_string())
}

/// A row on which the two sides of a declared equivalence disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub equation: usize,
    /// The equation as `lhs = rhs`.
    pub display: String,
    pub vertex: String,
    pub row: String,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "row `{}` of `{}` breaks `{}`: left side gives `{}`, right side gives `{}`",
            self.row, self.vertex, self.display, self.lhs, self.rhs
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every declared equivalence on every row.
///
/// Dangling references cannot occur in an [`Instance`] value; they are
/// rejected when the instance is built.
pub fn validate_instance(instance: &Instance) -> ValidationReport {
    let s = &instance.schema;
    let mut violations = Vec::new();
    for (k, eq) in s.equations().iter().enumerate() {
        let t = s.path_target(&eq.lhs);
        for i in 0..instance.row_count(eq.lhs.source) {
            let l = instance.follow(&eq.lhs.arrows, i);
            let r = instance.follow(&eq.rhs.arrows, i);
            if l != r {
                violations.push(Violation {
                    equation: k,
                    display: s.display_equation(eq),
                    vertex: s.vertex_name(eq.lhs.source).to_string(),
                    row: instance.row_id(eq.lhs.source, i).to_string(),
                    lhs: instance.row_id(t, l).to_string(),
                    rhs: instance.row_id(t, r).to_string(),
                });
            }
        }
    }
    ValidationReport { violations }
}
